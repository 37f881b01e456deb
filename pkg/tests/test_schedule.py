import numpy as np
import pytest

from diffstr.schedule import InvalidT, build_schedule


def direct_product(betas):
    out = [1.0]
    for b in betas[1:]:
        out.append(out[-1] * (1 - b))
    return np.array(out)


def test_linear_mask_T4():
    s = build_schedule("linear-mask", 4)
    np.testing.assert_allclose(s.betas[1:], [1 / 4, 1 / 3, 1 / 2, 1], rtol=0, atol=1e-15)
    np.testing.assert_allclose(direct_product(s.betas), [1, 0.75, 0.5, 0.25, 0], atol=1e-12)
    np.testing.assert_allclose(s.alpha_bars, [1, 0.75, 0.5, 0.25, 0], atol=1e-15)


def test_linear_mask_T1():
    s = build_schedule("linear-mask", 1)
    assert s.alpha_bars.tolist() == [1.0, 0.0]
    assert s.betas[1:].tolist() == [1.0]


def test_cosine_T1000():
    s = build_schedule("cosine", 1000)
    assert s.alpha_bars[0] == 1.0
    assert s.alpha_bars[-1] <= 1e-6
    assert (np.diff(s.alpha_bars) < 0).all()
    # away from the clipped tail the closed form holds
    t = np.arange(0, 900)
    f = np.cos((t / 1000 + 0.008) / 1.008 * np.pi / 2) ** 2
    np.testing.assert_allclose(s.alpha_bars[:900], f / f[0], rtol=1e-10)


@pytest.mark.parametrize("kind", ["linear-mask", "cosine"])
@pytest.mark.parametrize("T", [1, 2, 3, 7, 20, 100, 1000])
def test_invariants(kind, T):
    s = build_schedule(kind, T)
    assert s.alpha_bars[0] == 1.0 and s.alpha_bars[T] <= 1e-6
    assert ((s.betas[1:] > 0) & (s.betas[1:] <= 1)).all()
    assert (np.diff(s.alpha_bars) <= 0).all()
    assert np.abs(s.alpha_bars[1:] - s.alpha_bars[:-1] * (1 - s.betas[1:])).max() <= 1e-12
    if kind == "linear-mask":
        assert np.abs(s.alpha_bars - (1 - np.arange(T + 1) / T)).max() <= 1e-12


def test_invalid():
    with pytest.raises(InvalidT):
        build_schedule("linear-mask", 0)
    with pytest.raises(ValueError):
        build_schedule("sigmoid", 10)
