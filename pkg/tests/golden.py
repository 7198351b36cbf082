"""Reference data copied verbatim from printed displays, with a reader that
shares no code with the package."""

import re

import numpy as np

BASIS = ["Hq1", "Hp1", "Hq2", "Hp2"] + [f"E{i}" for i in range(1, 17)]

ACTION_A2A2 = r"""
H_{q_1}\mapsto H_{p_2}, \quad
H_{p_1}\mapsto H_{q_2}+2H_{p_2}-E_{9,10,13,14}\\
H_{q_2}\mapsto H_{p_1}, \quad
H_{p_2}\mapsto H_{q_1}+2H_{p_1}-E_{1,2,5,6}\\
E_{1}\mapsto H_{p_2}-E_{10}, \quad
E_{2}\mapsto H_{p_2}-E_{9}, \quad
E_{3}\mapsto E_{15}, \quad
E_{4}\mapsto E_{16}, \\
E_{5}\mapsto E_{11}, \quad
E_{6}\mapsto E_{12}, \quad
E_{7}\mapsto H_{p_2}-E_{14}, \quad
E_{8}\mapsto H_{p_2}-E_{13}, \\
E_{9}\mapsto H_{p_1}-E_{2}, \quad
E_{10}\mapsto H_{p_1}-E_{1}, \quad
E_{11}\mapsto E_{7}, \quad
E_{12}\mapsto E_{8}, \\
E_{13}\mapsto E_{3}, \quad
E_{14}\mapsto E_{4}, \quad
E_{15}\mapsto H_{p_1}-E_{6}, \quad
E_{16}\mapsto H_{p_1}-E_{5}
"""

ACTION_A5 = r"""
H_{q_1}\mapsto H_{p_2},\quad
H_{p_1}\mapsto H_{p_1}+H_{q_2}+H_{p_2}-E_{1,2,5,6}\\
H_{q_2}\mapsto H_{p_1},\quad
H_{p_2}\mapsto H_{q_1}+H_{p_1}+H_{p_2}-E_{9,10,13,14}\\
E_1\mapsto H_{p_1}-E_2,\quad
E_2\mapsto H_{p_1}-E_1,\quad
E_3\mapsto E_7,\quad
E_4\mapsto E_8,\\
E_5\mapsto E_3,\quad
E_6\mapsto E_4,\quad
E_7\mapsto H_{p_2}-E_6,\quad
E_8\mapsto H_{p_2}-E_5,\\
E_9\mapsto H_{p_2}-E_{10},\quad
E_{10}\mapsto H_{p_2}-E_9,\quad
E_{11}\mapsto E_{15},\quad
E_{12}\mapsto E_{16},\\
E_{13}\mapsto E_{11},\quad
E_{14}\mapsto E_{12},\quad
E_{15}\mapsto H_{p_1}-E_{14},\quad
E_{16}\mapsto H_{p_1}-E_{13}
"""

# the two 5x5 matrices of the standard Cremona example, as printed
CREMONA_A = [[3, 1, 1, 1, 1], [-2, 0, -1, -1, -1], [-2, -1, 0, -1, -1], [-2, -1, -1, 0, -1], [-2, -1, -1, -1, 0]]
CREMONA_B = [[3, 2, 2, 2, 2], [-1, 0, -1, -1, -1], [-1, -1, 0, -1, -1], [-1, -1, -1, 0, -1], [-1, -1, -1, -1, 0]]

_ATOM = re.compile(r"([+-]?)(\d*)(H_\{([qp])_(\d)\}|E_\{([\d,]+)\}|E_(\d+))")


def _name(m):
    if m.group(3).startswith("H"):
        return [f"H{m.group(4)}{m.group(5)}"]
    idx = m.group(6) or m.group(7)
    return [f"E{i}" for i in idx.split(",")]


def _vector(text):
    v = [0] * 20
    text = text.replace(" ", "")
    pos = 0
    for m in _ATOM.finditer(text):
        assert m.start() == pos, f"unparsed input near {text[pos:]!r}"
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        for n in _name(m):
            v[BASIS.index(n)] += sign * coeff
    assert pos == len(text), f"trailing input {text[pos:]!r}"
    return v


def matrix_from_display(display):
    """Columns are the images of the basis classes."""
    rules = {}
    for chunk in re.split(r"\\quad|\\\\|\n", display):
        chunk = chunk.strip().strip(",").strip()
        if not chunk:
            continue
        lhs, rhs = chunk.split(r"\mapsto")
        (src,) = _name(_ATOM.fullmatch(lhs.strip()))
        rules[src] = _vector(rhs)
    assert sorted(rules) == sorted(BASIS)
    return np.array([rules[b] for b in BASIS], dtype=object).T


GOLDEN_ACTIONS = {"a2a2": ACTION_A2A2, "a5": ACTION_A5}
