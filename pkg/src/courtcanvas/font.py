"""Embedded deterministic bitmap font (8x16 cells, stroke-generated).

Glyphs are defined as line strokes on the 8x16 cell grid and rasterized once
at import with integer Bresenham, so renders are identical everywhere with
no font-file dependency.  Legibility is segment-display style; outline fonts
are deliberately out of scope.
"""

from __future__ import annotations

import numpy as np

CELL_W = 8
CELL_H = 16

# segment shorthands on the 8x16 grid
_T = (1, 2, 6, 2)       # top bar
_M = (1, 8, 6, 8)       # middle bar
_B = (1, 13, 6, 13)     # bottom bar
_LT = (1, 2, 1, 8)      # left upper
_LB = (1, 8, 1, 13)     # left lower
_RT = (6, 2, 6, 8)      # right upper
_RB = (6, 8, 6, 13)     # right lower
_CV = (4, 2, 4, 13)     # center vertical

_STROKES: dict[str, list[tuple[int, int, int, int]]] = {
    " ": [],
    "A": [_T, _LT, _LB, _RT, _RB, _M],
    "B": [(1, 2, 5, 2), (1, 8, 5, 8), (1, 13, 5, 13), _LT, _LB,
          (6, 3, 6, 7), (6, 9, 6, 12), (5, 2, 6, 3), (5, 8, 6, 7),
          (5, 8, 6, 9), (5, 13, 6, 12)],
    "C": [_T, _B, _LT, _LB],
    "D": [(1, 2, 4, 2), (1, 13, 4, 13), _LT, _LB,
          (6, 4, 6, 11), (4, 2, 6, 4), (4, 13, 6, 11)],
    "E": [_T, _M, _B, _LT, _LB],
    "F": [_T, _M, _LT, _LB],
    "G": [_T, _B, _LT, _LB, _RB, (4, 8, 6, 8)],
    "H": [_LT, _LB, _RT, _RB, _M],
    "I": [_T, _B, _CV],
    "J": [_B, _RT, _RB, (1, 11, 1, 13)],
    "K": [_LT, _LB, (6, 2, 1, 8), (1, 8, 6, 13)],
    "L": [_LT, _LB, _B],
    "M": [_LT, _LB, _RT, _RB, (1, 2, 4, 7), (6, 2, 4, 7)],
    "N": [_LT, _LB, _RT, _RB, (1, 2, 6, 13)],
    "O": [_T, _B, _LT, _LB, _RT, _RB],
    "P": [_T, _M, _LT, _LB, _RT],
    "Q": [_T, _B, _LT, _LB, _RT, _RB, (4, 10, 7, 14)],
    "R": [_T, _M, _LT, _LB, _RT, (2, 8, 6, 13)],
    "S": [_T, _M, _B, _LT, _RB],
    "T": [_T, _CV],
    "U": [_LT, _LB, _RT, _RB, _B],
    "V": [(1, 2, 4, 13), (6, 2, 4, 13)],
    "W": [_LT, _LB, _RT, _RB, (1, 13, 4, 9), (6, 13, 4, 9)],
    "X": [(1, 2, 6, 13), (6, 2, 1, 13)],
    "Y": [(1, 2, 4, 8), (6, 2, 4, 8), (4, 8, 4, 13)],
    "Z": [_T, _B, (6, 2, 1, 13)],
    "0": [_T, _B, _LT, _LB, _RT, _RB, (6, 3, 1, 12)],
    "1": [(2, 4, 4, 2), (4, 2, 4, 13), (2, 13, 6, 13)],
    "2": [_T, _RT, _M, _LB, _B],
    "3": [_T, _M, _B, _RT, _RB],
    "4": [_LT, _M, _RT, _RB],
    "5": [_T, _LT, (1, 7, 6, 7), (6, 7, 6, 13), _B],
    "6": [_T, _LT, _LB, _M, _RB, _B],
    "7": [_T, _RT, _RB],
    "8": [_T, _M, _B, _LT, _LB, _RT, _RB],
    "9": [_T, _LT, _M, _RT, _RB, _B],
    ".": [(3, 12, 4, 12), (3, 13, 4, 13)],
    ",": [(4, 12, 3, 14)],
    ":": [(3, 5, 4, 5), (3, 6, 4, 6), (3, 11, 4, 11), (3, 12, 4, 12)],
    ";": [(3, 5, 4, 5), (3, 6, 4, 6), (4, 11, 3, 14)],
    "!": [(4, 2, 4, 10), (3, 12, 4, 12), (3, 13, 4, 13)],
    "?": [_T, (6, 2, 6, 6), (6, 6, 4, 8), (4, 8, 4, 10), (3, 12, 4, 12), (3, 13, 4, 13)],
    "-": [(2, 8, 5, 8)],
    "+": [(1, 8, 6, 8), (4, 5, 4, 11)],
    "/": [(6, 2, 1, 13)],
    "'": [(4, 2, 4, 5)],
    "(": [(5, 2, 3, 5), (3, 5, 3, 10), (3, 10, 5, 13)],
    ")": [(2, 2, 4, 5), (4, 5, 4, 10), (4, 10, 2, 13)],
    "%": [(2, 2, 2, 4), (6, 2, 1, 13), (5, 11, 5, 13)],
    "=": [(1, 6, 6, 6), (1, 10, 6, 10)],
}

_FALLBACK = [(0, 2, 7, 2), (7, 2, 7, 13), (7, 13, 0, 13), (0, 13, 0, 2)]


def _draw_line(grid: np.ndarray, x0: int, y0: int, x1: int, y1: int) -> None:
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        grid[y0, x0] = True
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def _rasterize(strokes) -> np.ndarray:
    grid = np.zeros((CELL_H, CELL_W), dtype=bool)
    for x0, y0, x1, y1 in strokes:
        _draw_line(grid, x0, y0, x1, y1)
    return grid


_GLYPHS: dict[str, np.ndarray] = {ch: _rasterize(s) for ch, s in _STROKES.items()}
_FALLBACK_GLYPH = _rasterize(_FALLBACK)


def glyph(ch: str) -> np.ndarray:
    """16x8 boolean bitmap for a character (lowercase folds to uppercase)."""
    g = _GLYPHS.get(ch)
    if g is None:
        g = _GLYPHS.get(ch.upper(), _FALLBACK_GLYPH)
    return g


def text_bitmap(content: str, scale: int) -> np.ndarray:
    """Boolean bitmap of a glyph run at an integer scale factor."""
    if scale < 1:
        scale = 1
    if not content:
        return np.zeros((CELL_H * scale, 0), dtype=bool)
    row = np.concatenate([glyph(ch) for ch in content], axis=1)
    return np.repeat(np.repeat(row, scale, axis=0), scale, axis=1)


def text_box(content: str, font_px: int) -> tuple[int, int, int]:
    """(width, height, scale) of a glyph run rendered at roughly font_px."""
    scale = max(1, font_px // CELL_H)
    return CELL_W * scale * len(content), CELL_H * scale, scale
