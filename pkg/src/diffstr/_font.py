"""Embedded 6x11 bitmap glyphs for printable ASCII. Generated by tools/build_font.py."""

GLYPH_HEIGHT = 11
GLYPH_WIDTH = 6

# Each glyph is a tuple of row bitmasks, bit (WIDTH - 1 - col) set for ink.
GLYPHS = {
    '!': (0, 0, 0, 24, 24, 24, 24, 0, 24, 0, 0),
    '"': (0, 0, 0, 20, 20, 20, 0, 0, 0, 0, 0),
    '#': (0, 0, 20, 20, 62, 20, 20, 62, 20, 20, 0),
    '$': (0, 8, 30, 50, 60, 30, 6, 54, 60, 8, 0),
    '%': (0, 0, 56, 42, 60, 8, 30, 42, 14, 0, 0),
    '&': (0, 0, 0, 28, 48, 24, 62, 44, 62, 0, 0),
    "'": (0, 0, 12, 8, 16, 0, 0, 0, 0, 0, 0),
    '(': (0, 0, 4, 8, 24, 24, 24, 24, 8, 4, 0),
    ')': (0, 0, 16, 8, 12, 12, 12, 12, 8, 16, 0),
    '*': (0, 0, 8, 60, 24, 36, 0, 0, 0, 0, 0),
    '+': (0, 0, 0, 8, 8, 62, 8, 8, 0, 0, 0),
    ',': (0, 0, 0, 0, 0, 0, 0, 0, 12, 8, 16),
    '-': (0, 0, 0, 0, 0, 62, 0, 0, 0, 0, 0),
    '.': (0, 0, 0, 0, 0, 0, 0, 0, 24, 0, 0),
    '/': (0, 0, 2, 2, 4, 4, 8, 8, 16, 16, 0),
    '0': (0, 0, 28, 54, 54, 54, 54, 54, 28, 0, 0),
    '1': (0, 0, 12, 60, 12, 12, 12, 12, 63, 0, 0),
    '2': (0, 0, 28, 54, 6, 12, 24, 54, 62, 0, 0),
    '3': (0, 0, 28, 54, 6, 28, 6, 54, 28, 0, 0),
    '4': (0, 0, 6, 14, 22, 54, 63, 6, 6, 0, 0),
    '5': (0, 0, 62, 48, 60, 54, 6, 38, 60, 0, 0),
    '6': (0, 0, 28, 54, 48, 60, 54, 54, 28, 0, 0),
    '7': (0, 0, 62, 54, 6, 12, 12, 24, 24, 0, 0),
    '8': (0, 0, 28, 54, 54, 28, 54, 54, 28, 0, 0),
    '9': (0, 0, 28, 54, 54, 30, 6, 54, 28, 0, 0),
    ':': (0, 0, 0, 0, 0, 24, 0, 0, 24, 0, 0),
    ';': (0, 0, 0, 0, 0, 24, 0, 0, 24, 16, 32),
    '<': (0, 0, 0, 12, 24, 48, 24, 12, 0, 0, 0),
    '=': (0, 0, 0, 0, 60, 0, 60, 0, 0, 0, 0),
    '>': (0, 0, 0, 24, 12, 6, 12, 24, 0, 0, 0),
    '?': (0, 0, 0, 28, 38, 12, 24, 0, 24, 0, 0),
    '@': (0, 0, 28, 50, 38, 42, 42, 39, 48, 28, 0),
    'A': (0, 0, 0, 60, 28, 20, 62, 54, 55, 0, 0),
    'B': (0, 0, 0, 60, 54, 60, 54, 54, 60, 0, 0),
    'C': (0, 0, 0, 30, 54, 48, 48, 54, 28, 0, 0),
    'D': (0, 0, 0, 60, 54, 54, 54, 54, 60, 0, 0),
    'E': (0, 0, 0, 62, 48, 60, 48, 54, 62, 0, 0),
    'F': (0, 0, 0, 62, 48, 60, 48, 48, 56, 0, 0),
    'G': (0, 0, 0, 28, 54, 48, 62, 54, 30, 0, 0),
    'H': (0, 0, 0, 55, 54, 62, 54, 54, 55, 0, 0),
    'I': (0, 0, 0, 60, 24, 24, 24, 24, 60, 0, 0),
    'J': (0, 0, 0, 30, 12, 12, 44, 44, 56, 0, 0),
    'K': (0, 0, 0, 54, 52, 56, 60, 54, 59, 0, 0),
    'L': (0, 0, 0, 56, 48, 48, 48, 54, 62, 0, 0),
    'M': (0, 0, 0, 34, 54, 54, 62, 42, 42, 0, 0),
    'N': (0, 0, 0, 55, 58, 58, 54, 54, 50, 0, 0),
    'O': (0, 0, 0, 28, 54, 54, 54, 54, 28, 0, 0),
    'P': (0, 0, 0, 60, 54, 54, 60, 48, 56, 0, 0),
    'Q': (0, 0, 0, 28, 54, 54, 54, 54, 28, 6, 0),
    'R': (0, 0, 0, 60, 54, 54, 60, 54, 59, 0, 0),
    'S': (0, 0, 0, 30, 50, 60, 14, 38, 60, 0, 0),
    'T': (0, 0, 0, 62, 26, 24, 24, 24, 60, 0, 0),
    'U': (0, 0, 0, 55, 54, 54, 54, 54, 28, 0, 0),
    'V': (0, 0, 0, 55, 54, 20, 28, 28, 8, 0, 0),
    'W': (0, 0, 0, 43, 42, 42, 62, 28, 20, 0, 0),
    'X': (0, 0, 0, 51, 30, 12, 12, 30, 51, 0, 0),
    'Y': (0, 0, 0, 51, 51, 30, 12, 12, 30, 0, 0),
    'Z': (0, 0, 0, 62, 54, 12, 24, 54, 62, 0, 0),
    '[': (0, 0, 28, 24, 24, 24, 24, 24, 24, 28, 0),
    '\\': (0, 0, 32, 32, 16, 16, 8, 8, 4, 4, 0),
    ']': (0, 0, 28, 12, 12, 12, 12, 12, 12, 28, 0),
    '^': (0, 0, 8, 28, 54, 0, 0, 0, 0, 0, 0),
    '_': (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 63),
    '`': (0, 0, 24, 8, 4, 0, 0, 0, 0, 0, 0),
    'a': (0, 0, 0, 0, 28, 54, 30, 54, 63, 0, 0),
    'b': (0, 0, 48, 48, 60, 54, 54, 54, 60, 0, 0),
    'c': (0, 0, 0, 0, 28, 54, 48, 54, 28, 0, 0),
    'd': (0, 0, 14, 6, 30, 54, 54, 54, 31, 0, 0),
    'e': (0, 0, 0, 0, 28, 54, 62, 48, 30, 0, 0),
    'f': (0, 0, 14, 24, 62, 24, 24, 24, 62, 0, 0),
    'g': (0, 0, 0, 0, 27, 54, 54, 54, 30, 6, 60),
    'h': (0, 0, 48, 48, 60, 54, 54, 54, 54, 0, 0),
    'i': (0, 0, 12, 0, 60, 12, 12, 12, 63, 0, 0),
    'j': (0, 0, 12, 0, 60, 12, 12, 12, 12, 12, 56),
    'k': (0, 0, 48, 48, 54, 60, 56, 60, 55, 0, 0),
    'l': (0, 0, 60, 12, 12, 12, 12, 12, 63, 0, 0),
    'm': (0, 0, 0, 0, 60, 62, 42, 42, 42, 0, 0),
    'n': (0, 0, 0, 0, 44, 54, 54, 54, 54, 0, 0),
    'o': (0, 0, 0, 0, 28, 54, 54, 54, 28, 0, 0),
    'p': (0, 0, 0, 0, 60, 54, 54, 54, 60, 48, 56),
    'q': (0, 0, 0, 0, 27, 54, 54, 54, 30, 6, 15),
    'r': (0, 0, 0, 0, 55, 29, 24, 24, 60, 0, 0),
    's': (0, 0, 0, 0, 30, 56, 30, 7, 62, 0, 0),
    't': (0, 0, 24, 24, 62, 24, 24, 27, 14, 0, 0),
    'u': (0, 0, 0, 0, 54, 54, 54, 54, 31, 0, 0),
    'v': (0, 0, 0, 0, 54, 54, 28, 28, 8, 0, 0),
    'w': (0, 0, 0, 0, 43, 42, 62, 30, 20, 0, 0),
    'x': (0, 0, 0, 0, 59, 30, 12, 30, 55, 0, 0),
    'y': (0, 0, 0, 0, 55, 54, 54, 20, 28, 24, 48),
    'z': (0, 0, 0, 0, 62, 44, 24, 54, 62, 0, 0),
    '{': (0, 0, 6, 12, 12, 24, 12, 12, 12, 6, 0),
    '|': (0, 0, 0, 8, 8, 8, 8, 8, 8, 8, 0),
    '}': (0, 0, 48, 24, 24, 12, 24, 24, 24, 48, 0),
    '~': (0, 0, 0, 0, 26, 44, 0, 0, 0, 0, 0),
}
