"""Regenerate ``src/diffstr/_font.py`` from Pillow's built-in bitmap font.

Run once; the generated table is committed so rendering never depends on
the host's fonts or Pillow version.
"""

from pathlib import Path

import numpy as np
from PIL import ImageFont

OUT = Path(__file__).resolve().parents[1] / "src" / "diffstr" / "_font.py"


def main():
    font = ImageFont.load_default_imagefont()
    lines = [
        '"""Embedded 6x11 bitmap glyphs for printable ASCII. Generated by tools/build_font.py."""',
        "",
        "GLYPH_HEIGHT = 11",
        "GLYPH_WIDTH = 6",
        "",
        "# Each glyph is a tuple of row bitmasks, bit (WIDTH - 1 - col) set for ink.",
        "GLYPHS = {",
    ]
    for code in range(33, 127):
        ch = chr(code)
        mask = font.getmask(ch)
        w, h = mask.size
        arr = np.array(mask, dtype=np.uint8).reshape(h, w) > 0
        assert arr.shape == (11, 6), (ch, arr.shape)
        rows = [int("".join("1" if v else "0" for v in row), 2) for row in arr]
        lines.append(f"    {ch!r}: ({', '.join(str(r) for r in rows)}),")
    lines.append("}")
    OUT.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
