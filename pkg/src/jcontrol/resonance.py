"""Singular couplings: level crossings and resonances of the chain C0.

The singular set is g = 0 together with

* crossings ``E_(n,nu) = E_(n+1,-)`` (family ``criteig``), where two
  coupled levels become degenerate;
* roots of ``2w = RHS(g)`` for the three resonance families below, where a
  chain transition shares its frequency with another coupled transition.

Every family right-hand side is even in g and strictly increasing in |g| on
its valid index range, so each equation is solved for g >= 0 by a doubling
bracket followed by bisection.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .coupling import h1_element
from .model import (
    MINUS,
    PLUS,
    LevelIndex,
    ModelParams,
    branch_set,
    energy,
    f,
    in_branch_set,
    levels,
)

MAX_ITER = 200
DEDUP_REL = 1e-9


class Family(str, enum.Enum):
    ZERO = "zero"
    CRIT_EIG = "criteig"
    ONE_PLUS_C = "1c"
    ONE_D = "1d"
    TWO_C = "2c"
    BENIGN = "benign"  # crossings E_n = E_(n+2,-); listed for reference, never singular


S2_FAMILIES = (Family.ONE_PLUS_C, Family.ONE_D, Family.TWO_C)


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SingularTag:
    family: Family
    m: Optional[int] = None
    n: Optional[int] = None
    nu: Optional[str] = None
    residual: float = 0.0
    amplitude: Optional[float] = None

    def label(self) -> str:
        if self.family is Family.ZERO:
            return "zero"
        if self.family in (Family.CRIT_EIG, Family.BENIGN):
            return f"{self.family.value}({self.n},{self.nu})"
        return f"{self.family.value}({self.m},{self.n})"

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "m": self.m,
            "n": self.n,
            "nu": self.nu,
            "residual": self.residual,
            "amplitude": self.amplitude,
        }


@dataclass(frozen=True)
class SingularPoint:
    g_star: float
    tags: tuple[SingularTag, ...] = field(default_factory=tuple)

    @property
    def family(self) -> Family:
        return self.tags[0].family

    @property
    def indices(self) -> tuple[Optional[int], Optional[int], Optional[str]]:
        t = self.tags[0]
        return t.m, t.n, t.nu

    @property
    def residual(self) -> float:
        return max(t.residual for t in self.tags)

    def to_dict(self) -> dict:
        return {
            "g_star": self.g_star,
            "residual": self.residual,
            "tags": [t.to_dict() for t in self.tags],
        }


# -- crossings ----------------------------------------------------------------


def _crossing(nu: int, a: float, b: float, prod: float) -> Optional[float]:
    # roots x = a -+ sqrt(b) of x^2 - 2 a x + prod = 0, x = g^2
    inner = math.sqrt(b)
    if nu < 0:
        x = a + inner
    else:
        hi = a + inner
        if prod < 0:
            return None
        # small root via the product to avoid cancellation
        x = prod / hi if hi > 0 else 0.0
    if x < 0:
        return None
    return math.sqrt(x)


def g1_crossing(params: ModelParams, level: LevelIndex) -> Optional[float]:
    """|g| where ``E_level = E_(n+1,-)``, or None if the levels never cross."""
    level.validate(params)
    w, d, n = params.omega, params.detuning(), level.n
    a = w * w * (2 * n + 3)
    b = 4 * w**4 * (n * n + 3 * n + 2) + w * w * d * d
    return _crossing(level.sign, a, b, w**4 - w * w * d * d)


def g2_crossing(params: ModelParams, level: LevelIndex) -> Optional[float]:
    """|g| where ``E_level = E_(n+2,-)``; the pair is uncoupled there."""
    level.validate(params)
    w, d, n = params.omega, params.detuning(), level.n
    a = 2 * w * w * (n + 2)
    b = 4 * w**4 * (n * n + 4 * n + 3) + w * w * d * d
    return _crossing(level.sign, a, b, 4 * w**4 - w * w * d * d)


# -- resonance families ---------------------------------------------------------


def rhs(family: Family, params: ModelParams, m: int, n: int, g: float) -> float:
    fm1, fm = f(params, m + 1, g), f(params, m, g)
    fn1, fn = f(params, n + 1, g), f(params, n, g)
    if family is Family.ONE_PLUS_C:
        return fm1 + fm - fn1 + fn
    if family is Family.ONE_D:
        return fm1 - fm - fn1 + fn
    if family is Family.TWO_C:
        return fm1 + fm - fn1 - fn
    raise ValueError(f"no resonance equation for family {family}")


def _sqrt1(k: int) -> float:
    return math.sqrt(k + 1)


def rhs_slope(family: Family, m: int, n: int) -> float:
    """Large-|g| slope of RHS, which is also its exact slope at D = 0."""
    sm1, sm, sn1, sn = _sqrt1(m + 1), _sqrt1(m), _sqrt1(n + 1), _sqrt1(n)
    if family is Family.ONE_PLUS_C:
        return sm1 + sm - sn1 + sn
    if family is Family.ONE_D:
        return sm1 - sm - sn1 + sn
    if family is Family.TWO_C:
        return sm1 + sm - sn1 - sn
    raise ValueError(f"no resonance equation for family {family}")


def index_sets(family: Family) -> tuple[str, str]:
    """Branch labels of the copies that m and n range over."""
    return {
        Family.ONE_PLUS_C: (PLUS, PLUS),
        Family.ONE_D: (MINUS, PLUS),
        Family.TWO_C: (PLUS, MINUS),
    }[family]


def is_valid_instance(params: ModelParams, family: Family, m: int, n: int) -> bool:
    m_set, n_set = index_sets(family)
    if not (in_branch_set(params, m, m_set) and in_branch_set(params, n, n_set)):
        return False
    if family is Family.ONE_D:
        return m < n
    if family is Family.TWO_C:
        return m > n
    return True


def _bisect(fun, lo: float, hi: float) -> float:
    # fun(lo) < 0 <= fun(hi)
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fun(mid) < 0:
            lo = mid
        else:
            hi = mid
    return hi if abs(fun(hi)) <= abs(fun(lo)) else lo


def solve_s2(omega: float, capital_omega: float, family: Family, m: int, n: int) -> list[float]:
    """Non-negative roots of ``2 omega = RHS_family(g)``.

    Raises ValueError when (m, n) lies outside the family's index set.
    """
    family = Family(family)
    params = ModelParams(omega, capital_omega)
    if family not in S2_FAMILIES:
        raise ValueError(f"{family} is not a resonance family")
    if not is_valid_instance(params, family, m, n):
        raise ValueError(f"(m={m}, n={n}) is outside the index set of family {family.value}")
    target = 2.0 * omega
    slope = rhs_slope(family, m, n)
    if params.detuning() == 0:
        return [target / slope] if slope > 0 else []

    def fun(g: float) -> float:
        return rhs(family, params, m, n, g) - target

    at_zero = fun(0.0)
    if at_zero > 0:
        return []
    if at_zero == 0:
        return [0.0]
    if slope <= 0:
        return []
    hi = max(target / slope, omega)
    for _ in range(MAX_ITER):
        if fun(hi) >= 0:
            break
        hi *= 2.0
    else:
        return []
    return [_bisect(fun, 0.0, hi)]


# -- enumeration ------------------------------------------------------------------


def _chain_partner_amplitude(params: ModelParams, family: Family, m: int) -> float:
    lower = LevelIndex(m, PLUS if family in (Family.ONE_PLUS_C, Family.TWO_C) else MINUS)
    return abs(h1_element(params, LevelIndex(m + 1, MINUS), lower))


def _criteig_tags(params: ModelParams, g_max: float, n_cap: int, benign: bool = False):
    cross = g2_crossing if benign else g1_crossing
    step = 2 if benign else 1
    fam = Family.BENIGN if benign else Family.CRIT_EIG
    for lv in levels(params, n_cap):
        gs = cross(params, lv)
        if gs is None or gs > g_max:
            continue
        at = params.with_g(gs)
        partner = LevelIndex(lv.n + step, MINUS)
        res = abs(energy(at, lv) - energy(at, partner))
        amp = abs(h1_element(at, partner, lv))
        yield gs, SingularTag(fam, None, lv.n, lv.nu, res, amp)


def _s2_tags(params: ModelParams, g_max: float, n_cap: int):
    w, big = params.omega, params.capital_omega
    for family in S2_FAMILIES:
        m_set, n_set = index_sets(family)
        for m in branch_set(params, m_set, n_cap):
            for n in branch_set(params, n_set, n_cap):
                if not is_valid_instance(params, family, m, n):
                    continue
                for gs in solve_s2(w, big, family, m, n):
                    if gs > g_max:
                        continue
                    res = abs(rhs(family, params, m, n, gs) - 2 * w)
                    amp = _chain_partner_amplitude(params.with_g(gs), family, m)
                    yield gs, SingularTag(family, m, n, None, res, amp)


def _truncation_possible(params: ModelParams, g_max: float, n_cap: int) -> bool:
    nxt = n_cap + 1
    w = params.omega
    for family in S2_FAMILIES:
        for m, n in ((nxt, nxt), (nxt, -1), (nxt, 0), (0, nxt), (-1, nxt), (nxt - 1, nxt)):
            if is_valid_instance(params, family, m, n) and rhs(family, params, m, n, g_max) >= 2 * w:
                return True
    return False


def _merge(candidates: list[tuple[float, SingularTag]], tol: float) -> list[SingularPoint]:
    candidates.sort(key=lambda c: (c[0], c[1].label()))
    points: list[SingularPoint] = []
    group: list[tuple[float, SingularTag]] = []
    for cand in candidates:
        if group and cand[0] - group[-1][0] > tol:
            points.append(_close(group))
            group = []
        group.append(cand)
    if group:
        points.append(_close(group))
    return points


def _close(group: list[tuple[float, SingularTag]]) -> SingularPoint:
    zero = [t for g, t in group if t.family is Family.ZERO]
    g_star = 0.0 if zero else group[0][0]
    return SingularPoint(g_star, tuple(t for _, t in group))


def enumerate_singular(
    omega: float, capital_omega: float, g_max: float, n_cap: int
) -> list[SingularPoint]:
    """Singular couplings in [0, g_max] from every index up to ``n_cap``.

    Points closer than ``1e-9 * omega`` are merged, keeping all tags. A
    TruncationWarning is emitted when indices beyond ``n_cap`` could add
    roots below ``g_max``.
    """
    if n_cap < 0:
        raise ValueError("n_cap must be >= 0")
    params = ModelParams(omega, capital_omega)
    cands: list[tuple[float, SingularTag]] = [(0.0, SingularTag(Family.ZERO))]
    if g_max > 0:
        cands += list(_criteig_tags(params, g_max, n_cap))
        cands += list(_s2_tags(params, g_max, n_cap))
        if _truncation_possible(params, g_max, n_cap):
            warnings.warn(
                f"indices above n_cap={n_cap} contribute further singular points below g_max={g_max}",
                TruncationWarning,
                stacklevel=2,
            )
    return _merge(cands, DEDUP_REL * omega)


def benign_crossings(
    omega: float, capital_omega: float, g_max: float, n_cap: int
) -> list[SingularPoint]:
    """Crossings ``E_n = E_(n+2,-)``; these pairs are uncoupled, so not singular."""
    params = ModelParams(omega, capital_omega)
    cands = list(_criteig_tags(params, g_max, n_cap, benign=True)) if g_max > 0 else []
    return _merge(cands, DEDUP_REL * omega)


def resonance_scan(params: ModelParams, n_max: int, tol: float):
    """Chain transitions whose frequency matches another coupled transition."""
    from .chain import build_c0, find_conflicts
    from .coupling import coupled_pairs

    if tol <= 0:
        raise ValueError("tol must be positive")
    return find_conflicts(build_c0(params, n_max), coupled_pairs(params, n_max, 0.0), tol)
