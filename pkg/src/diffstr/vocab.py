"""Token alphabet and conversions between strings and fixed-length sequences.

Ids ``0..K_char-1`` are characters, followed by the three special tokens
EOS, PAD and MASK.  A clean sequence of length ``L`` looks like::

    c_1 .. c_n  EOS  PAD .. PAD
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_CHARS = "".join(chr(c) for c in range(33, 127))
ALNUM36_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789"


class VocabError(ValueError):
    pass


class UnknownCharacter(VocabError):
    def __init__(self, char, position, source=None):
        self.char = char
        self.position = position
        self.source = source
        where = f" in {source}" if source else ""
        super().__init__(f"unknown character {char!r} at position {position}{where}")


class LabelTooLong(VocabError):
    def __init__(self, length, max_length):
        self.length = length
        self.max_length = max_length
        super().__init__(f"label length {length} exceeds maximum {max_length}")


class NotClean(VocabError):
    pass


@dataclass(frozen=True)
class Charset:
    chars: str = DEFAULT_CHARS

    def __post_init__(self):
        if len(set(self.chars)) != len(self.chars):
            raise VocabError("charset contains duplicate characters")
        if not self.chars:
            raise VocabError("charset is empty")

    @property
    def size(self) -> int:
        return len(self.chars)

    @classmethod
    def from_file(cls, path) -> "Charset":
        """One character per line, ``#`` lines are comments, order defines ids."""
        chars = []
        for line in Path(path).read_text(encoding="utf-8").split("\n"):
            if not line or line.startswith("#"):
                continue
            if len(line) != 1:
                raise VocabError(f"charset line must hold one character, got {line!r}")
            chars.append(line)
        return cls("".join(chars))

    @classmethod
    def named(cls, name: str) -> "Charset":
        if name == "full94":
            return cls(DEFAULT_CHARS)
        if name == "alnum36":
            return cls(ALNUM36_CHARS)
        return cls.from_file(name)


@dataclass(frozen=True)
class Vocabulary:
    charset: Charset = field(default_factory=Charset)

    def __post_init__(self):
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.charset.chars)})

    @property
    def n_chars(self) -> int:
        return self.charset.size

    @property
    def eos(self) -> int:
        return self.charset.size

    @property
    def pad(self) -> int:
        return self.charset.size + 1

    @property
    def mask(self) -> int:
        return self.charset.size + 2

    @property
    def K(self) -> int:
        return self.charset.size + 3

    def char_id(self, ch: str) -> int:
        return self._index[ch]

    def __contains__(self, ch) -> bool:
        return ch in self._index

    def token_str(self, tok: int, mask_symbol: str = "␣") -> str:
        if tok < self.n_chars:
            return self.charset.chars[tok]
        return {self.eos: "[E]", self.pad: "[P]", self.mask: mask_symbol}[tok]


def validate_label(label: str, vocab: Vocabulary, source=None):
    for i, ch in enumerate(label):
        if ch not in vocab:
            raise UnknownCharacter(ch, i, source)


def encode_label(label: str, vocab: Vocabulary, L: int) -> np.ndarray:
    """Encode ``label`` as a clean sequence of exactly ``L`` token ids."""
    if len(label) > L - 1:
        raise LabelTooLong(len(label), L - 1)
    validate_label(label, vocab)
    out = np.full(L, vocab.pad, dtype=np.int64)
    out[: len(label)] = [vocab.char_id(c) for c in label]
    out[len(label)] = vocab.eos
    return out


def decode_tokens(tokens: Sequence[int], vocab: Vocabulary) -> str:
    chars = []
    for tok in np.asarray(tokens).tolist():
        if tok >= vocab.n_chars:
            break
        chars.append(vocab.charset.chars[tok])
    return "".join(chars)


def presence_targets(x0, vocab: Vocabulary) -> np.ndarray:
    """1 where the clean sequence holds a character, 0 at EOS/PAD."""
    x0 = np.asarray(x0)
    if (x0 == vocab.mask).any():
        raise NotClean("clean sequence contains MASK")
    return (x0 < vocab.n_chars).astype(np.int64)
