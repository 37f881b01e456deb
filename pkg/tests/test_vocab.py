import numpy as np
import pytest
from hypothesis import given, strategies as st

from diffstr.vocab import (
    Charset, LabelTooLong, NotClean, UnknownCharacter, Vocabulary, decode_tokens, encode_label,
    presence_targets,
)

V = Vocabulary()
EOS, PAD, MASK = V.eos, V.pad, V.mask


def test_default_ids():
    assert V.n_chars == 94
    assert (EOS, PAD, MASK, V.K) == (94, 95, 96, 97)
    # id = codepoint - 33
    for ch in "!AZaz~0":
        assert V.char_id(ch) == ord(ch) - 33


def test_encode_examples():
    assert encode_label("", V, 4).tolist() == [EOS, PAD, PAD, PAD]
    table = {chr(c): c - 33 for c in range(33, 127)}
    expected = [table["H"], table["i"], table["!"], EOS] + [PAD] * 22
    assert expected[:3] == [39, 72, 0]
    assert encode_label("Hi!", V, 26).tolist() == expected
    with pytest.raises(LabelTooLong):
        encode_label("x" * 26, V, 26)
    encode_label("x" * 25, V, 26)


def test_unknown_character_reports_position():
    with pytest.raises(UnknownCharacter) as e:
        encode_label("ab c", V, 26)
    assert e.value.char == " " and e.value.position == 2


def test_decode_examples():
    assert decode_tokens([39, 72, 0, EOS] + [PAD] * 22, V) == "Hi!"
    assert decode_tokens([EOS] + [PAD] * 25, V) == ""
    assert decode_tokens([39, MASK, 0, EOS] + [PAD] * 22, V) == "H"
    assert decode_tokens([MASK] * 5, V) == ""


def test_presence_examples():
    assert presence_targets(encode_label("Hi!", V, 26), V).tolist() == [1, 1, 1] + [0] * 23
    assert presence_targets(encode_label("", V, 4), V).tolist() == [0, 0, 0, 0]
    assert presence_targets(encode_label("a" * 25, V, 26), V).tolist() == [1] * 25 + [0]
    with pytest.raises(NotClean):
        presence_targets([1, MASK, EOS, PAD], V)


labels = st.text(alphabet=V.charset.chars, max_size=25)


@given(labels)
def test_round_trip(label):
    assert decode_tokens(encode_label(label, V, 26), V) == label


@given(labels)
def test_presence_matches_length_and_layout(label):
    x0 = encode_label(label, V, 26)
    assert presence_targets(x0, V).sum() == len(decode_tokens(x0, V))
    assert (x0 == EOS).sum() == 1
    eos_at = int(np.flatnonzero(x0 == EOS)[0])
    assert (x0[:eos_at] < V.n_chars).all() and (x0[eos_at + 1:] == PAD).all()


def test_charset_file(tmp_path):
    f = tmp_path / "cs.txt"
    f.write_text("# comment\nb\na\n#\n", encoding="utf-8")
    cs = Charset.from_file(f)
    assert cs.chars == "ba"
    v = Vocabulary(cs)
    assert (v.eos, v.pad, v.mask, v.K) == (2, 3, 4, 5)


def test_charset_rejects_duplicates():
    with pytest.raises(ValueError):
        Charset("aa")


def test_alnum36_file_matches_builtin():
    from importlib import resources
    path = resources.files("diffstr.charsets").joinpath("alnum36.txt")
    assert Charset.from_file(path) == Charset.named("alnum36")
