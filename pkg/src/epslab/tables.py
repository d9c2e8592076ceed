"""Inclination-polynomial coefficient tables.

Each cell is stored as printed: an integer prefactor, a power of c^2
(c^2 = 1 - s^2), and an ordered list of polynomial factors in s^2
(coefficients low degree first). Keeping the factored structure makes the
transcription auditable term by term and lets the spot-value tests pin the
rows exactly; `dump_tables` serializes everything to a text file mirroring
the row order.
"""

from __future__ import annotations

# factor shorthands
_F23 = (2, -3)        # (2 - 3 s^2)
_S2 = (0, 1)          # s^2
_S4 = (0, 0, 1)       # s^4

# --- third-order secular term: q[k][(i, j)] ------------------------------
# rows (i, j) as printed; columns k = 0, 1, 2. None is a printed zero.

THIRD_ORDER_ROWS = (
    (0, 0), (0, 1), (0, 2), (0, 3), (0, 4),
    (1, 0), (1, 1), (1, 2), (1, 3),
    (2, 0), (2, 1), (2, 2),
    (3, 0), (3, 1),
    (4, 0),
)

THIRD_ORDER_Q = {
    (0, 0): ((-72, 0, (_F23, _F23, _F23, _S4)),
             (-4, 0, (_F23, _F23, _F23, (8, -24, 41))),
             (18, 0, (_F23, _F23, _F23, _S4))),
    (0, 1): ((-4, 0, (_F23, _F23, _F23, (8, -24, 67))),
             (-2, 0, (_F23, _F23, _F23, (144, -432, 413))),
             (54, 0, (_F23, _F23, _F23, _S4))),
    (0, 2): ((-32, 0, (_F23, _F23, _F23, (8, -24, 15))),
             (-4, 0, (_F23, _F23, _F23, (272, -816, 513))),
             (9, 0, (_F23, _F23, _F23, _S4))),
    (0, 3): ((-16, 0, (_F23, _F23, _F23, (40, -120, 63))),
             (-16, 0, (_F23, _F23, _F23, (120, -360, 217))),
             None),
    (0, 4): ((-64, 0, (_F23, _F23, _F23, (8, -24, 17))),
             (-160, 0, (_F23, _F23, _F23, (8, -24, 17))),
             None),
    (1, 0): ((-144, 1, (_F23, _F23, _S2, (-2, 15))),
             (-64, 1, (_F23, _F23, (6, -16, 69))),
             (36, 1, (_F23, _F23, _S2, (-1, 15)))),
    (1, 1): ((-48, 1, (_F23, _F23, (8, -24, 117))),
             (-12, 1, (_F23, _F23, (224, -448, 1135))),
             (72, 1, (_F23, _F23, _S2, (-1, 18)))),
    (1, 2): ((-288, 1, (_F23, _F23, (8, -12, 13))),
             (-96, 1, (_F23, _F23, (80, -144, 149))),
             (216, 1, (_F23, _F23, _S4))),
    (1, 3): ((-768, 1, (_F23, _F23, (4, -6, 3))),
             (-64, 1, (_F23, _F23, (120, -224, 141))),
             None),
    (2, 0): ((432, 1, (_F23, _S2, (16, -76, 63))),
             (144, 1, (_F23, (-8, 80, -449, 399))),
             (-27, 1, (_F23, _S2, (40, -274, 243)))),
    (2, 1): ((144, 1, (_F23, (-8, 80, -411, 375))),
             (144, 1, (_F23, (-40, 192, -947, 883))),
             (-216, 1, (_F23, _S2, (8, -56, 51)))),
    (2, 2): ((576, 1, (_F23, (-8, 8, -27, 36))),
             (288, 1, (_F23, (-40, 96, -235, 223))),
             (1296, 2, (_F23, _S4))),
    (3, 0): ((5184, 2, (_S2, (-2, 5), (-5, 6))),
             (1728, 2, (_S2, (56, -239, 205))),
             (-1296, 2, (_S2, (8, -35, 30)))),
    (3, 1): ((3456, 2, (_S2, (-3, 4), (-4, 13))),
             (1728, 2, (_S2, (72, -289, 261))),
             (2592, 2, (_F23, _S2, (-2, 5)))),
    (4, 0): ((-15552, 3, (_S2, (-4, 7))),
             (-38016, 3, (_S2, (-4, 7))),
             (3888, 3, (_S2, (-4, 7)))),
}

# --- second-order long-period generator: b[(l, k)][(i, j)] ----------------
# rows (i, j) as printed; columns (l=1,k=0), (l=1,k=1), (l=2,k=0).

LONG_PERIOD_COLS = ((1, 0), (1, 1), (2, 0))

LONG_PERIOD_B = {
    (0, 0): ((8, 0, (_F23, _F23, (-8, 24, 3))),
             (6, 0, (_F23, _F23, (8, -24, 3))),
             (-3, 0, (_F23, _F23, _F23))),
    (0, 1): ((-24, 0, (_F23, _F23, (20, -60, 13))),
             (24, 0, (_F23, _F23, (8, -24, 7))),
             (-6, 0, (_F23, _F23, _F23))),
    (0, 2): ((-32, 0, (_F23, _F23, (41, -123, 60))),
             (12, 0, (_F23, _F23, (24, -72, 37))),
             (-9, 0, (_F23, _F23, _F23))),
    (0, 3): ((-8, 0, (_F23, _F23, (200, -600, 399))),
             (24, 0, (_F23, _F23, (8, -24, 15))),
             None),
    (0, 4): ((-48, 0, (_F23, _F23, (16, -48, 33))),
             None,
             None),
    (1, 0): ((24, 1, (_F23, _S2, (-68, 159))),
             (-12, 1, (_F23, (-88, 212, 15))),
             (-90, 1, (_F23, _F23))),
    (1, 1): ((24, 1, (_F23, (-136, 100, 207))),
             (24, 1, (_F23, (152, -384, 81))),
             (-180, 1, (_F23, _F23))),
    (1, 2): ((-72, 1, (_F23, (168, -368, 229))),
             (24, 1, (_F23, (200, -560, 279))),
             (-216, 1, (_F23, _F23))),
    (1, 3): ((-192, 1, (_F23, (60, -164, 117))),
             (288, 1, (_F23, (8, -24, 15))),
             None),
    (2, 0): ((-144, 1, ((-136, 680, -1087, 552),)),
             (96, 1, ((64, -127, -60, 126),)),
             (27, 1, (_F23, (-34, 35)))),
    (2, 1): ((-144, 1, ((-256, 1324, -2091, 1065),)),
             (192, 1, ((88, -217, 87, 45),)),
             (-1728, 2, (_F23,))),
    (2, 2): ((-432, 1, (_S2, (16, -61, 61))),
             (288, 2, ((56, -128, 57),)),
             (-1296, 2, (_F23,))),
    (3, 0): ((864, 2, ((100, -296, 211),)),
             (-1728, 2, (_S2, (-19, 22))),
             (648, 2, ((-6, 7),))),
    (3, 1): ((3456, 2, ((32, -85, 62),)),
             (-1152, 2, ((-4, -17, 27),)),
             (-5184, 3, ())),
    (4, 0): ((-10368, 3, ((-10, 13),)),
             (6912, 3, ((-2, 5),)),
             (-3888, 3, ())),
}

# --- comparison generator of the physical-time theory (five polynomials) --

_F1514 = (-14, 15)  # (15 s^2 - 14)

COMPARISON_B = {
    (1, 0): (-2, 0, ((16, 2928, -6870, 3975),)),
    (1, 1): (2, 0, ((-2320, 6288, -5370, 1425),)),
    (1, 2): (-2, 0, (_F1514, (184, -388, 195))),
    (1, 3): (2, 0, (_F1514, (-56, 36, 45))),
    (2, 0): (1, 0, (_F1514, _F1514, (-13, 15))),
}


def eval_cell(cell, s2):
    """Evaluate one table cell at s^2 (abstract scalar kind)."""
    if cell is None:
        return 0.0
    pref, c_pow, factors = cell
    acc = float(pref)
    if c_pow:
        c2 = 1.0 - s2
        for _ in range(c_pow):
            acc = acc * c2
    for poly in factors:
        val = 0.0
        for coef in reversed(poly):
            val = val * s2 + float(coef)
        acc = acc * val
    return acc


def third_order_q(k: int, i: int, j: int, s2):
    return eval_cell(THIRD_ORDER_Q[(i, j)][k], s2) if (i, j) in THIRD_ORDER_Q else 0.0


def long_period_b(l: int, k: int, i: int, j: int, s2):
    if (i, j) not in LONG_PERIOD_B:
        return 0.0
    return eval_cell(LONG_PERIOD_B[(i, j)][LONG_PERIOD_COLS.index((l, k))], s2)


def comparison_b(j: int, i: int, s2):
    return eval_cell(COMPARISON_B[(j, i)], s2)


# --- human-auditable serialization ----------------------------------------

def _poly_str(poly) -> str:
    terms = []
    for deg in reversed(range(len(poly))):
        coef = poly[deg]
        if coef == 0:
            continue
        mag = abs(coef)
        if deg == 0:
            body = f"{mag}"
        else:
            body = f"s^{2 * deg}" if mag == 1 else f"{mag} s^{2 * deg}"
        if not terms:
            terms.append(("-" if coef < 0 else "") + body)
        else:
            terms.append(("- " if coef < 0 else "+ ") + body)
    return " ".join(terms) if terms else "0"


def _cell_str(cell) -> str:
    if cell is None:
        return "0"
    pref, c_pow, factors = cell
    parts = [str(pref)]
    if c_pow:
        parts.append(f"c^{2 * c_pow}")
    # group identical consecutive factors into powers
    idx = 0
    while idx < len(factors):
        run = 1
        while idx + run < len(factors) and factors[idx + run] == factors[idx]:
            run += 1
        body = _poly_str(factors[idx])
        parts.append(f"({body})" + (f"^{run}" if run > 1 else ""))
        idx += run
    return " * ".join(parts)


def dump_tables() -> str:
    """Render all coefficient tables in printed row order."""
    lines = ["# Inclination polynomials, third-order secular term q[k,i,j]",
             "# columns: k=0, k=1, k=2 ; c^2 = 1 - s^2"]
    for (i, j) in THIRD_ORDER_ROWS:
        cells = THIRD_ORDER_Q[(i, j)]
        for k in range(3):
            lines.append(f"q[k={k},i={i},j={j}] = {_cell_str(cells[k])}")
    lines.append("")
    lines.append("# Inclination polynomials, second-order long-period generator b[l,k,i,j]")
    lines.append("# columns: (l=1,k=0), (l=1,k=1), (l=2,k=0)")
    for (i, j) in THIRD_ORDER_ROWS:
        cells = LONG_PERIOD_B[(i, j)]
        for col, (l, k) in enumerate(LONG_PERIOD_COLS):
            lines.append(f"b[l={l},k={k},i={i},j={j}] = {_cell_str(cells[col])}")
    lines.append("")
    lines.append("# Comparison generator polynomials b[j,i]")
    for (j, i), cell in COMPARISON_B.items():
        lines.append(f"b[{j},{i}] = {_cell_str(cell)}")
    lines.append("")
    return "\n".join(lines)


def write_tables(path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_tables())
