"""Synthetic text-line renderer and the ``labels.tsv`` dataset directory format.

A dataset directory holds ``labels.tsv`` (UTF-8, one ``filename<TAB>label``
per line, ``\\n`` endings, no header) next to the image files it names.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from . import _font
from .vocab import Charset, LabelTooLong, UnknownCharacter, validate_label, Vocabulary

CELL_PITCH = 8  # glyph width 6 + 2 px gap
CANVAS_HEIGHT = 16
GLYPH_TOP = 2


class GlyphMissing(KeyError):
    pass


class MissingLabelsFile(FileNotFoundError):
    pass


class UnreadableImage(OSError):
    pass


@dataclass
class LabeledSample:
    image: np.ndarray  # (H, W, C) float32 in [-1, 1]
    label: str
    seed: Optional[int] = None


@dataclass
class RenderSpec:
    """What to draw and how to degrade it.

    Augmentation ranges: ``rotation_deg`` in [0, 45], ``noise_sigma`` in
    [0, 1] (in normalised pixel units), ``blur_sigma`` in [0, 5] pixels.
    """

    charset: str = "alnum36"
    min_len: int = 1
    max_len: int = 8
    H: int = 32
    W: int = 64
    C: int = 1
    rotation: bool = False
    rotation_deg: float = 3.0
    noise: bool = False
    noise_sigma: float = 0.1
    blur: bool = False
    blur_sigma: float = 0.5

    def __post_init__(self):
        if not 0 <= self.min_len <= self.max_len:
            raise ValueError("need 0 <= min_len <= max_len")
        if not 0 <= self.rotation_deg <= 45:
            raise ValueError("rotation_deg must be in [0, 45]")
        if not 0 <= self.noise_sigma <= 1:
            raise ValueError("noise_sigma must be in [0, 1]")
        if not 0 <= self.blur_sigma <= 5:
            raise ValueError("blur_sigma must be in [0, 5]")

    def chars(self) -> str:
        return Charset.named(self.charset).chars

    def to_dict(self) -> dict:
        return asdict(self)


def glyph_bitmap(ch: str) -> np.ndarray:
    try:
        rows = _font.GLYPHS[ch]
    except KeyError:
        raise GlyphMissing(ch) from None
    w = _font.GLYPH_WIDTH
    bits = [[(r >> (w - 1 - c)) & 1 for c in range(w)] for r in rows]
    return np.array(bits, dtype=np.float32)


def rasterize(label: str, slots: int) -> np.ndarray:
    """Draw ``label`` left-aligned on a ``CANVAS_HEIGHT x slots*CELL_PITCH`` canvas."""
    canvas = np.zeros((CANVAS_HEIGHT, slots * CELL_PITCH), dtype=np.float32)
    for i, ch in enumerate(label):
        g = glyph_bitmap(ch)
        x0 = i * CELL_PITCH
        canvas[GLYPH_TOP:GLYPH_TOP + g.shape[0], x0:x0 + g.shape[1]] = g
    return canvas


def resize_nearest(img: np.ndarray, H: int, W: int) -> np.ndarray:
    rows = ((np.arange(H) + 0.5) * img.shape[0] / H).astype(np.int64)
    cols = ((np.arange(W) + 0.5) * img.shape[1] / W).astype(np.int64)
    return img[rows][:, cols]


def render_sample(spec: RenderSpec, rng: np.random.Generator, seed=None) -> LabeledSample:
    chars = spec.chars()
    missing = [c for c in chars if c not in _font.GLYPHS]
    if missing:
        raise GlyphMissing(missing[0])
    n = int(rng.integers(spec.min_len, spec.max_len + 1))
    label = "".join(chars[i] for i in rng.integers(0, len(chars), size=n))

    img = resize_nearest(rasterize(label, spec.max_len), spec.H, spec.W)
    if spec.rotation:
        angle = rng.uniform(-spec.rotation_deg, spec.rotation_deg)
        img = ndimage.rotate(img, angle, reshape=False, order=1, mode="constant", cval=0.0)
    if spec.blur:
        img = ndimage.gaussian_filter(img, spec.blur_sigma)
    img = img * 2.0 - 1.0
    if spec.noise:
        img = img + rng.normal(0.0, spec.noise_sigma, size=img.shape)
    img = np.clip(img, -1.0, 1.0).astype(np.float32)
    img = np.repeat(img[:, :, None], spec.C, axis=2)
    return LabeledSample(img, label, seed)


def render_dataset(spec: RenderSpec, seeds: Iterable[int]) -> list[LabeledSample]:
    """One sample per seed; each sample owns an independent generator."""
    return [render_sample(spec, np.random.default_rng(s), seed=s) for s in seeds]


# ----------------------------------------------------------------------------
# directory format


def _to_uint8(image: np.ndarray) -> np.ndarray:
    return np.round((image + 1.0) * 127.5).clip(0, 255).astype(np.uint8)


def write_dataset(samples: Sequence[LabeledSample], out_dir, spec: Optional[RenderSpec] = None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, s in enumerate(samples):
        name = f"{i:06d}.png"
        px = _to_uint8(s.image)
        mode = "L" if px.shape[2] == 1 else "RGB"
        Image.fromarray(px[:, :, 0] if mode == "L" else px, mode).save(out / name, optimize=False)
        lines.append(f"{name}\t{s.label}\n")
    with open(out / "labels.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
    if spec is not None:
        prov = {"render_spec": spec.to_dict(), "seeds": [s.seed for s in samples]}
        (out / "render_spec.json").write_text(json.dumps(prov, indent=2, sort_keys=True) + "\n")


def load_image(path, H: int, W: int, C: int) -> np.ndarray:
    try:
        with Image.open(path) as im:
            im = im.convert("L" if C == 1 else "RGB")
            if im.size != (W, H):
                im = im.resize((W, H), Image.BILINEAR)
            px = np.asarray(im, dtype=np.float32)
    except (OSError, UnidentifiedImageError) as e:
        raise UnreadableImage(f"cannot read image {path}: {e}") from e
    if px.ndim == 2:
        px = px[:, :, None]
    return px / 127.5 - 1.0


def load_dataset(directory, vocab: Vocabulary, H: int, W: int, C: int,
                 max_label_len: Optional[int] = None) -> list[LabeledSample]:
    d = Path(directory)
    labels = d / "labels.tsv"
    if not labels.is_file():
        raise MissingLabelsFile(f"no labels.tsv in {d}")
    samples = []
    with open(labels, encoding="utf-8", newline="") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            name, sep, label = line.partition("\t")
            if not sep:
                raise ValueError(f"malformed line in {labels}: {line!r}")
            validate_label(label, vocab, source=name)
            if max_label_len is not None and len(label) > max_label_len:
                raise LabelTooLong(len(label), max_label_len)
            samples.append(LabeledSample(load_image(d / name, H, W, C), label))
    return samples


def stack_images(samples: Sequence[LabeledSample]) -> np.ndarray:
    return np.stack([s.image for s in samples]).astype(np.float32)


__all__ = [
    "GlyphMissing", "LabeledSample", "MissingLabelsFile", "RenderSpec", "UnknownCharacter",
    "UnreadableImage", "glyph_bitmap", "load_dataset", "load_image", "rasterize",
    "render_dataset", "render_sample", "resize_nearest", "stack_images", "write_dataset",
]
