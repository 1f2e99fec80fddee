"""Truncated Fock (x) spin matrices and piecewise-constant propagation.

Basis order: ``|n>e1`` at index ``2n`` and ``|n>e-1`` at index ``2n+1`` for
``n = 0..n_fock``. The JC Hamiltonian conserves the excitation number, so
its spectrum on every complete block ``n <= n_fock - 1`` is exact; the lone
state ``|n_fock>e1`` is a truncation artifact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import LevelIndex, ModelParams, eigenvector_coeffs, energy, levels

GUARD_BAND = 10
SCHEMA_VERSION = 1
BASIS_ORDER = "fock-major, spin-minor: index 2n = |n>e1, index 2n+1 = |n>e-1"


@dataclass(frozen=True)
class TruncatedOperator:
    matrix: np.ndarray
    n_fock: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __post_init__(self):
        if self.matrix.shape != (2 * (self.n_fock + 1),) * 2:
            raise ValueError(f"matrix shape {self.matrix.shape} does not match n_fock={self.n_fock}")

    def is_hermitian(self, rtol: float = 1e-13) -> bool:
        m = self.matrix
        scale = max(np.abs(m).max(), 1.0)
        return bool(np.abs(m - m.conj().T).max() <= rtol * scale)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "operator",
            "dim": self.dim,
            "n_fock": self.n_fock,
            "basis_order": BASIS_ORDER,
            "entries": [[float(z.real), float(z.imag)] for z in self.matrix.astype(complex).ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TruncatedOperator":
        dim = data["dim"]
        flat = np.array([complex(re, im) for re, im in data["entries"]])
        return cls(flat.reshape(dim, dim), data["n_fock"])


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def n_fock(self) -> int:
        return self.amplitudes.shape[0] // 2 - 1

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "state",
            "dim": int(self.amplitudes.shape[0]),
            "n_fock": self.n_fock,
            "basis_order": BASIS_ORDER,
            "entries": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StateVector":
        return cls(np.array([complex(re, im) for re, im in data["entries"]]))


@dataclass(frozen=True)
class PiecewiseControl:
    """Segments ``(duration, u1, u2)``, applied in order."""

    segments: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        segs = tuple((float(d), float(u1), float(u2)) for d, u1, u2 in self.segments)
        for d, u1, u2 in segs:
            if not all(math.isfinite(x) for x in (d, u1, u2)):
                raise ValueError("schedule entries must be finite")
            if d <= 0:
                raise ValueError(f"segment duration must be positive, got {d}")
        object.__setattr__(self, "segments", segs)

    @property
    def total_time(self) -> float:
        return sum(d for d, _, _ in self.segments)

    def within_bounds(self, c: float) -> bool:
        """Whether every control value lies in ``[0, c]``."""
        return all(0 <= u <= c for _, u1, u2 in self.segments for u in (u1, u2))

    @classmethod
    def parse(cls, text: str) -> "PiecewiseControl":
        segs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"schedule line {lineno}: expected 'duration u1 u2'")
            segs.append(tuple(float(p) for p in parts))
        return cls(tuple(segs))

    @classmethod
    def from_file(cls, path: str | Path) -> "PiecewiseControl":
        return cls.parse(Path(path).read_text())


# -- ladder algebra ---------------------------------------------------------------


def _annihilation(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock + 1, dtype=float)), 1)


def _ops(n_fock: int):
    a = np.kron(_annihilation(n_fock), np.eye(2))
    sigma = np.kron(np.eye(n_fock + 1), np.array([[0.0, 0.0], [1.0, 0.0]]))
    sz = np.kron(np.eye(n_fock + 1), np.diag([1.0, -1.0]))
    return a, sigma, sz


def _check_n_fock(n_fock: int) -> None:
    if n_fock < 1:
        raise ValueError("n_fock must be >= 1")


def build_free(params: ModelParams, n_fock: int) -> TruncatedOperator:
    _check_n_fock(n_fock)
    a, _, sz = _ops(n_fock)
    eye = np.eye(a.shape[0])
    h = params.omega * (a.T @ a + 0.5 * eye) + 0.5 * params.capital_omega * sz
    return TruncatedOperator(h, n_fock)


def build_jc(params: ModelParams, n_fock: int) -> TruncatedOperator:
    """``w(a^dag a + 1/2) + (W/2) sz + g (a sigma^dag + a^dag sigma)``."""
    a, sigma, _ = _ops(n_fock)
    h = build_free(params, n_fock).matrix + params.g * (a @ sigma.T + a.T @ sigma)
    return TruncatedOperator(h, n_fock)


def build_rabi(params: ModelParams, n_fock: int) -> TruncatedOperator:
    """``w(a^dag a + 1/2) + (W/2) sz + g (a + a^dag)(sigma + sigma^dag)``."""
    a, sigma, _ = _ops(n_fock)
    h = build_free(params, n_fock).matrix + params.g * (a + a.T) @ (sigma + sigma.T)
    return TruncatedOperator(h, n_fock)


def build_control(kind: str, n_fock: int) -> TruncatedOperator:
    """Position ``X = (a + a^dag)/sqrt2`` or momentum ``P = i(a^dag - a)/sqrt2``."""
    _check_n_fock(n_fock)
    a = _annihilation(n_fock)
    if kind == "X":
        q = (a + a.T) / math.sqrt(2)
    elif kind == "P":
        q = 1j * (a.T - a) / math.sqrt(2)
    else:
        raise ValueError(f"control kind must be 'X' or 'P', got {kind!r}")
    return TruncatedOperator(np.kron(q, np.eye(2)), n_fock)


def excitation_number(n_fock: int) -> TruncatedOperator:
    a, sigma, _ = _ops(n_fock)
    return TruncatedOperator(a.T @ a + sigma.T @ sigma, n_fock)


def block_indices(n: int) -> list[int]:
    """Basis indices spanning the invariant block of level index ``n``."""
    if n == -1:
        return [1]
    return [2 * n, 2 * (n + 1) + 1]


# -- states -----------------------------------------------------------------------


def bare_state(n_fock: int, n: int, spin: int) -> StateVector:
    if not 0 <= n <= n_fock or spin not in (1, -1):
        raise ValueError(f"no bare state |{n}> e{spin} with n_fock={n_fock}")
    v = np.zeros(2 * (n_fock + 1), dtype=complex)
    v[2 * n + (0 if spin == 1 else 1)] = 1.0
    return StateVector(v)


def dressed_state(params: ModelParams, level: LevelIndex, n_fock: int) -> StateVector:
    if level.n + 1 > n_fock:
        raise ValueError(f"level {level} does not fit in n_fock={n_fock}")
    cu, cd = eigenvector_coeffs(params, level)
    v = np.zeros(2 * (n_fock + 1), dtype=complex)
    if level.n == -1:
        v[1] = cd
    else:
        up, down = block_indices(level.n)
        v[up], v[down] = cu, cd
    return StateVector(v)


def dressed_basis(params: ModelParams, n_max: int, n_fock: int) -> tuple[list[LevelIndex], np.ndarray]:
    """Levels with ``n <= n_max`` and the matrix whose columns are their vectors."""
    lvls = levels(params, n_max)
    cols = np.column_stack([dressed_state(params, lv, n_fock).amplitudes for lv in lvls])
    return lvls, cols


def fidelity(psi: StateVector, phi: StateVector) -> float:
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)))


def distance(psi: StateVector, phi: StateVector) -> float:
    return float(np.linalg.norm(psi.amplitudes - phi.amplitudes))


# -- propagation ------------------------------------------------------------------


@dataclass
class Propagation:
    """Outcome of :func:`propagate`: states at every segment boundary."""

    states: list[StateVector]
    times: list[float]
    unitarity_defects: list[float] = field(default_factory=list)
    norm_defects: list[float] = field(default_factory=list)

    @property
    def final(self) -> StateVector:
        return self.states[-1]


def propagate(
    h: TruncatedOperator,
    controls: tuple[TruncatedOperator, TruncatedOperator],
    schedule: PiecewiseControl,
    psi0: StateVector,
) -> Propagation:
    """Apply ``exp(-i (H + u1 H1 + u2 H2) dt)`` segment by segment.

    Each distinct ``(u1, u2)`` is diagonalized once. Per segment the result
    records ``max|U^dag U - 1|`` and the change of the state norm.
    """
    h1, h2 = controls
    dim = h.dim
    if h1.dim != dim or h2.dim != dim or psi0.amplitudes.shape != (dim,):
        raise ValueError("operator and state dimensions do not match")
    for m in (h.matrix, h1.matrix, h2.matrix, psi0.amplitudes):
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite entries")
    if abs(psi0.norm - 1.0) > 1e-10:
        raise ValueError(f"initial state is not normalized (norm {psi0.norm})")

    cache: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}
    psi = psi0.amplitudes.astype(complex)
    out = Propagation([StateVector(psi.copy())], [0.0])
    t = 0.0
    eye = np.eye(dim)
    for dt, u1, u2 in schedule.segments:
        key = (u1, u2)
        if key not in cache:
            cache[key] = np.linalg.eigh(h.matrix + u1 * h1.matrix + u2 * h2.matrix)
        evals, vecs = cache[key]
        u = (vecs * np.exp(-1j * evals * dt)) @ vecs.conj().T
        before = np.linalg.norm(psi)
        psi = u @ psi
        t += dt
        out.unitarity_defects.append(float(np.abs(u.conj().T @ u - eye).max()))
        out.norm_defects.append(float(abs(np.linalg.norm(psi) - before)))
        out.states.append(StateVector(psi.copy()))
        out.times.append(t)
    return out


# -- rotating-wave average ----------------------------------------------------------


def _phase_average(freq: np.ndarray, T: float) -> np.ndarray:
    """``(1/T) int_0^T exp(i freq t) dt`` elementwise."""
    x = freq * T
    out = np.ones_like(x, dtype=complex)
    nz = x != 0
    out[nz] = (np.exp(1j * x[nz]) - 1.0) / (1j * x[nz])
    return out


def rwa_average(params: ModelParams, n_fock: int, T: float) -> tuple[TruncatedOperator, float]:
    """Time average of ``H_R - H_0`` in the interaction picture of ``H_0``.

    Elements of ``exp(i H0 t) V exp(-i H0 t)`` oscillate at ``E_j - E_k``;
    their averages over ``[0, T]`` are taken in closed form. Returns the
    averaged co-rotating part and the spectral norm of the averaged
    counter-rotating part.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    a, sigma, _ = _ops(n_fock)
    e0 = np.diag(build_free(params, n_fock).matrix)
    avg = _phase_average(e0[:, None] - e0[None, :], T)
    co = params.g * (a @ sigma.T + a.T @ sigma)
    counter = params.g * (a @ sigma + a.T @ sigma.T)
    co_avg = TruncatedOperator(co * avg, n_fock)
    counter_norm = float(np.linalg.norm(counter * avg, 2))
    return co_avg, counter_norm


# -- spectrum oracle ----------------------------------------------------------------


def spectrum_oracle(params: ModelParams, n_max: int, n_fock: int | None = None) -> dict[LevelIndex, float]:
    """Dense-diagonalization eigenvalue assigned to each level with ``n <= n_max``.

    Eigenvalues of :func:`build_jc` are matched to levels by sorting both
    lists, after dropping the truncation-edge state ``|n_fock> e1``.
    """
    n_fock = n_max + 1 if n_fock is None else n_fock
    if n_fock < n_max + 1:
        raise ValueError("n_fock must be at least n_max + 1")
    evals = np.linalg.eigvalsh(build_jc(params, n_fock).matrix)
    edge = params.omega * (n_fock + 0.5) + 0.5 * params.capital_omega
    evals = np.delete(evals, np.argmin(np.abs(evals - edge)))
    all_levels = levels(params, n_fock - 1)
    order = sorted(all_levels, key=lambda lv: energy(params, lv))
    assigned = dict(zip(order, np.sort(evals)))
    return {lv: float(assigned[lv]) for lv in levels(params, n_max)}


def save_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj.to_dict()))
