"""The chain C0 of coupled transitions and its non-resonance certificate."""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .coupling import TransitionEdge, coupled_pairs, make_edge
from .model import MINUS, PLUS, LevelIndex, ModelParams, spurious

SCHEMA_VERSION = 1
DEFAULT_THRESHOLD = 1e-12
DEFAULT_TOL = 1e-9


class Verdict(str, enum.Enum):
    CERTIFIED = "CertifiedNonResonant"
    RESONANCE = "ResonanceFound"
    COUPLING_BROKEN = "CouplingBroken"


@dataclass(frozen=True)
class Conflict:
    chain_edge: TransitionEdge
    other: TransitionEdge
    gap: float

    def to_dict(self) -> dict:
        return {
            "chain_edge": self.chain_edge.to_dict(),
            "conflicting_edge": self.other.to_dict(),
            "gap": self.gap,
        }


@dataclass
class ChainReport:
    g: float
    n_max: int
    connected: bool
    resonant_conflicts: list[Conflict]
    zero_amplitude_edges: list[TransitionEdge]
    verdict: Verdict
    degenerate_coupled: list[TransitionEdge] = field(default_factory=list)
    uncovered_levels: list[LevelIndex] = field(default_factory=list)
    omega: float = 1.0
    capital_omega: float = 1.0
    tol: float = DEFAULT_TOL
    threshold: float = DEFAULT_THRESHOLD

    @property
    def caveat(self) -> dict:
        return {
            "scope": "truncation",
            "n_max": self.n_max,
            "note": "evidence for levels with n <= n_max only; not a proof for the infinite system",
        }

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "omega": self.omega,
            "capital_omega": self.capital_omega,
            "g": self.g,
            "n_max": self.n_max,
            "tol": self.tol,
            "threshold": self.threshold,
            "connected": self.connected,
            "uncovered_levels": [[lv.n, lv.nu] for lv in self.uncovered_levels],
            "resonant_conflicts": [c.to_dict() for c in self.resonant_conflicts],
            "zero_amplitude_edges": [e.to_dict() for e in self.zero_amplitude_edges],
            "degenerate_coupled": [e.to_dict() for e in self.degenerate_coupled],
            "verdict": self.verdict.value,
            "caveat": self.caveat,
        }


def build_c0(params: ModelParams, n_max: int) -> list[TransitionEdge]:
    """C0 truncated to ``n <= n_max``: ``[(n+1,+),(n,+)]``, ``[(n+1,+),(n,-)]``
    for ``0 <= n < n_max``, plus ``[(0,+),(-1,delta)]``."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    edges = [make_edge(params, LevelIndex(0, PLUS), spurious(params))]
    for n in range(n_max):
        top = LevelIndex(n + 1, PLUS)
        edges.append(make_edge(params, top, LevelIndex(n, PLUS)))
        edges.append(make_edge(params, top, LevelIndex(n, MINUS)))
    return edges


def chain_levels(params: ModelParams, n_max: int) -> list[LevelIndex]:
    """Levels that the truncated chain must reach.

    ``(n_max, -)`` is excluded: its chain edge goes to ``(n_max+1, +)``.
    """
    out = [spurious(params)]
    for n in range(n_max):
        out += [LevelIndex(n, PLUS), LevelIndex(n, MINUS)]
    out.append(LevelIndex(n_max, PLUS))
    return out


def check_connected(
    edges: list[TransitionEdge],
    params: ModelParams,
    n_max: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[bool, list[LevelIndex]]:
    """Whether edges with ``|h1| > threshold`` join every chain level.

    Returns the flag and the levels not reachable from the spurious level.
    """
    required = chain_levels(params, n_max)
    parent: dict[LevelIndex, LevelIndex] = {lv: lv for lv in required}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if abs(e.h1) <= threshold:
            continue
        for lv in (e.a, e.b):
            parent.setdefault(lv, lv)
        ra, rb = find(e.a), find(e.b)
        if ra != rb:
            parent[ra] = rb
    root = find(required[0])
    uncovered = [lv for lv in required if find(lv) != root]
    return not uncovered, uncovered


def _gaps(chain: list[TransitionEdge], others: list[TransitionEdge]) -> np.ndarray:
    cf = np.array([e.freq for e in chain])
    of = np.array([e.freq for e in others])
    gap = np.abs(cf[:, None] - of[None, :])
    where = {e.key: j for j, e in enumerate(others)}
    for i, e in enumerate(chain):
        j = where.get(e.key)
        if j is not None:
            gap[i, j] = np.inf
    return gap


def find_conflicts(
    chain: list[TransitionEdge], others: list[TransitionEdge], tol: float
) -> list[Conflict]:
    if not chain or not others:
        return []
    gap = _gaps(chain, others)
    return [
        Conflict(chain[i], others[j], float(gap[i, j]))
        for i, j in zip(*np.nonzero(gap <= tol))
    ]


def min_gap(params: ModelParams, n_max: int, threshold: float = 0.0) -> float:
    """Smallest frequency difference between a chain edge and any other coupled edge."""
    gap = _gaps(build_c0(params, n_max), coupled_pairs(params, n_max, threshold))
    return float(gap.min()) if gap.size else float("inf")


def certify(
    params: ModelParams,
    n_max: int,
    tol: float | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> ChainReport:
    """Check C0 for connectedness and non-resonance at ``params.g``.

    ``tol`` defaults to ``1e-9 * omega``. A degenerate pair of coupled
    levels counts as broken coupling, as does any chain edge with
    ``|h1| <= threshold``.
    """
    if n_max < 1:
        warnings.warn("n_max < 1 gives a chain with a single edge", stacklevel=2)
    tol = DEFAULT_TOL * params.omega if tol is None else tol
    chain = build_c0(params, n_max)
    coupled = coupled_pairs(params, n_max, threshold)
    connected, uncovered = check_connected(chain, params, n_max, threshold)
    zero_amp = [e for e in chain if abs(e.h1) <= threshold]
    degenerate = [e for e in coupled if e.freq <= tol]
    conflicts = find_conflicts(chain, coupled, tol)
    if not connected or zero_amp or degenerate:
        verdict = Verdict.COUPLING_BROKEN
    elif conflicts:
        verdict = Verdict.RESONANCE
    else:
        verdict = Verdict.CERTIFIED
    return ChainReport(
        g=params.g,
        n_max=n_max,
        connected=connected,
        resonant_conflicts=conflicts,
        zero_amplitude_edges=zero_amp,
        verdict=verdict,
        degenerate_coupled=degenerate,
        uncovered_levels=uncovered,
        omega=params.omega,
        capital_omega=params.capital_omega,
        tol=tol,
        threshold=threshold,
    )
