"""Matrix elements of the bosonic controls X and P in the dressed basis."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import MINUS, PLUS, LevelIndex, ModelParams, energy, levels, mixing

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TransitionEdge:
    """Unordered level pair; ``a`` is stored as the higher-n end."""

    a: LevelIndex
    b: LevelIndex
    freq: float
    h1: float
    h2: complex

    @property
    def key(self) -> tuple[LevelIndex, LevelIndex]:
        return (self.a, self.b)

    def to_dict(self) -> dict:
        return {
            "a": [self.a.n, self.a.nu],
            "b": [self.b.n, self.b.nu],
            "freq": self.freq,
            "h1": self.h1,
        }


def _ordered(a: LevelIndex, b: LevelIndex) -> tuple[LevelIndex, LevelIndex]:
    if (a.n, a.nu) >= (b.n, b.nu):
        return a, b
    return b, a


def _upper_element(params: ModelParams, hi: LevelIndex, lo: LevelIndex) -> float:
    # hi.n == lo.n + 1
    n = lo.n
    if n == -1:
        m0 = mixing(params, 0)
        return (m0.s if hi.nu == PLUS else m0.c) / SQRT2
    m, m1 = mixing(params, n), mixing(params, n + 1)
    cn, sn, cn1, sn1 = m.c, m.s, m1.c, m1.s
    r1, r2 = math.sqrt(n + 1), math.sqrt(n + 2)
    if hi.nu == PLUS and lo.nu == PLUS:
        val = r1 * cn * cn1 + r2 * sn * sn1
    elif hi.nu == MINUS and lo.nu == MINUS:
        val = r1 * sn * sn1 + r2 * cn * cn1
    elif hi.nu == MINUS and lo.nu == PLUS:
        val = r2 * sn * cn1 - r1 * cn * sn1
    else:
        val = r2 * cn * sn1 - r1 * sn * cn1
    return val / SQRT2


def h1_element(params: ModelParams, a: LevelIndex, b: LevelIndex) -> float:
    """``<a| X (x) 1 |b>``; real and symmetric in the dressed basis."""
    a.validate(params)
    b.validate(params)
    hi, lo = _ordered(a, b)
    if hi.n - lo.n != 1:
        return 0.0
    return _upper_element(params, hi, lo)


def h2_element(params: ModelParams, a: LevelIndex, b: LevelIndex) -> complex:
    """``<a| P (x) 1 |b>`` with ``P = i(a^dag - a)/sqrt(2)``.

    Equals ``i * h1`` when ``a`` is the higher-n level and ``-i * h1``
    otherwise.
    """
    v = h1_element(params, a, b)
    if v == 0.0:
        return 0j
    return 1j * v if a.n > b.n else -1j * v


def make_edge(params: ModelParams, a: LevelIndex, b: LevelIndex) -> TransitionEdge:
    if a == b:
        raise ValueError("an edge needs two distinct levels")
    hi, lo = _ordered(a, b)
    h1 = h1_element(params, hi, lo)
    return TransitionEdge(
        hi,
        lo,
        abs(energy(params, hi) - energy(params, lo)),
        h1,
        h2_element(params, hi, lo),
    )


def coupled_pairs(params: ModelParams, n_max: int, threshold: float = 0.0) -> list[TransitionEdge]:
    """All level pairs with ``n <= n_max`` and ``|h1| > threshold``.

    Only pairs whose n differ by exactly one can couple, so the scan is
    restricted to those.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    by_n: dict[int, list[LevelIndex]] = {}
    for lv in levels(params, n_max):
        by_n.setdefault(lv.n, []).append(lv)
    out = []
    for n in range(-1, n_max):
        for lo in by_n[n]:
            for hi in by_n[n + 1]:
                edge = make_edge(params, hi, lo)
                if abs(edge.h1) > threshold:
                    out.append(edge)
    return out
