"""Exact spectrum of the Jaynes-Cummings Hamiltonian.

Units with hbar = 1. The Hamiltonian restricted to the invariant block
``span{|n>e1, |n+1>e-1}`` is ``w(n+1) + [[D/2, g sqrt(n+1)], [g sqrt(n+1), -D/2]]``
with detuning ``D = W - w``; the remaining state ``|0>e-1`` is the spurious
level ``(-1, delta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal

PLUS = "+"
MINUS = "-"
Sign = Literal["+", "-"]


def sign_value(nu: str) -> int:
    if nu == PLUS:
        return 1
    if nu == MINUS:
        return -1
    raise ValueError(f"sign must be '+' or '-', got {nu!r}")


@dataclass(frozen=True)
class ModelParams:
    omega: float
    capital_omega: float
    g: float = 0.0

    def __post_init__(self):
        for name in ("omega", "capital_omega", "g"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega <= 0 or self.capital_omega <= 0:
            raise ValueError("omega and capital_omega must be positive")

    def detuning(self) -> float:
        return self.capital_omega - self.omega

    def delta_sign(self) -> str:
        """Sign label of the spurious level ``|0>e-1``.

        Chosen so that its energy ``-D/2`` equals ``delta * f_{-1}``: '+' for
        D <= 0 and '-' for D > 0.
        """
        return PLUS if self.detuning() <= 0 else MINUS

    def with_g(self, g: float) -> "ModelParams":
        return ModelParams(self.omega, self.capital_omega, g)


@dataclass(frozen=True, order=True)
class LevelIndex:
    """Dressed-state label ``(n, nu)``; ``n = -1`` is the spurious level."""

    n: int
    nu: str

    def __post_init__(self):
        if self.n < -1:
            raise ValueError(f"level index n must be >= -1, got {self.n}")
        sign_value(self.nu)

    @property
    def sign(self) -> int:
        return sign_value(self.nu)

    def is_valid(self, params: ModelParams) -> bool:
        return self.n >= 0 or self.nu == params.delta_sign()

    def validate(self, params: ModelParams) -> "LevelIndex":
        if not self.is_valid(params):
            raise ValueError(
                f"level (-1, {self.nu}) is not in the index set; "
                f"the spurious level is (-1, {params.delta_sign()})"
            )
        return self

    def __str__(self) -> str:
        return f"({self.n},{self.nu})"


def spurious(params: ModelParams) -> LevelIndex:
    return LevelIndex(-1, params.delta_sign())


def levels(params: ModelParams, n_max: int) -> list[LevelIndex]:
    """All levels with ``n <= n_max``, spurious level first."""
    out = [spurious(params)]
    for n in range(n_max + 1):
        out.append(LevelIndex(n, PLUS))
        out.append(LevelIndex(n, MINUS))
    return out


def in_branch_set(params: ModelParams, k: int, nu: str) -> bool:
    """Membership of ``k`` in the index copy labelled ``nu``.

    Both copies contain the natural numbers; -1 belongs to the copy whose
    label is ``delta_sign()``.
    """
    sign_value(nu)
    if k >= 0:
        return True
    return k == -1 and nu == params.delta_sign()


def branch_set(params: ModelParams, nu: str, n_max: int) -> Iterator[int]:
    start = -1 if in_branch_set(params, -1, nu) else 0
    return iter(range(start, n_max + 1))


def f(params: ModelParams, n: int, g: float | None = None) -> float:
    """Half the level splitting of block ``n``: ``sqrt(D^2 + 4 g^2 (n+1)) / 2``."""
    if n < -1:
        raise ValueError(f"n must be >= -1, got {n}")
    g = params.g if g is None else g
    d = params.detuning()
    if n == -1:
        return abs(d) / 2
    return 0.5 * math.hypot(d, 2.0 * g * math.sqrt(n + 1))


def f_prime(params: ModelParams, n: int, g: float | None = None) -> float:
    """Derivative of ``f`` with respect to g, ``g (n+1) / f_n``."""
    g = params.g if g is None else g
    fn = f(params, n, g)
    if fn == 0.0:
        if n == -1:
            return 0.0
        # D = 0, g = 0: one-sided slope of |g| sqrt(n+1)
        return math.sqrt(n + 1)
    return g * (n + 1) / fn


def energy(
    params: ModelParams,
    level: LevelIndex,
    labeling: Literal["magnitude", "analytic"] = "magnitude",
) -> float:
    level.validate(params)
    if labeling not in ("magnitude", "analytic"):
        raise ValueError(f"unknown labeling {labeling!r}")
    if level.n == -1:
        return -params.detuning() / 2
    base = params.omega * (level.n + 1)
    if labeling == "analytic" and params.detuning() == 0:
        return base + level.sign * math.sqrt(level.n + 1) * params.g
    return base + level.sign * f(params, level.n)


@dataclass(frozen=True)
class MixingCoefficients:
    theta: float
    c: float
    s: float


def mixing(params: ModelParams, n: int) -> MixingCoefficients:
    """Mixing angle of block ``n`` and its half-angle cosine/sine.

    ``theta = atan2(2 g sqrt(n+1), D)`` in [-pi, pi]; for D = 0 this is
    ``sign(g) pi/2``, and ``theta = 0`` when g = D = 0. The half-angle
    values are computed without trigonometry so that exact zeros stay exact.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    d = params.detuning()
    b = 2.0 * params.g * math.sqrt(n + 1) + 0.0  # drop the sign of -0.0
    r = math.hypot(d, b)
    if r == 0.0:
        return MixingCoefficients(0.0, 1.0, 0.0)
    theta = math.atan2(b, d)
    if d >= 0:
        c = math.sqrt((r + d) / (2 * r))
        s = b / (2 * r * c)
    else:
        s = math.sqrt((r - d) / (2 * r))
        if b < 0:
            s = -s
        c = b / (2 * r * s)
    return MixingCoefficients(theta, c, s)


def eigenvector_coeffs(params: ModelParams, level: LevelIndex) -> tuple[float, float]:
    """Coefficients on ``(|n>e1, |n+1>e-1)``.

    For the spurious level the pair is ``(0, 1)``, the second slot meaning
    ``|0>e-1``.
    """
    level.validate(params)
    if level.n == -1:
        return 0.0, 1.0
    m = mixing(params, level.n)
    if level.nu == PLUS:
        return m.c, m.s
    return -m.s, m.c


@dataclass(frozen=True)
class TaylorEnergy:
    """Polynomial in g: ``sum(coeffs[k] * g**k)``; ``exact`` marks D = 0."""

    coeffs: tuple[float, ...]
    exact: bool

    def __call__(self, g: float) -> float:
        return sum(c * g**k for k, c in enumerate(self.coeffs))


def taylor_energy(params: ModelParams, level: LevelIndex, order: int = 4) -> TaylorEnergy:
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    level.validate(params)
    d = abs(params.detuning())
    nu = level.sign
    base = params.omega * (level.n + 1)
    if level.n == -1:
        return TaylorEnergy((-params.detuning() / 2,), True)
    if d == 0:
        return TaylorEnergy((base, nu * math.sqrt(level.n + 1)), True)
    k = level.n + 1
    coeffs = [base + nu * d / 2, 0.0, nu * k / d]
    if order == 4:
        coeffs += [0.0, -nu * k * k / d**3]
    return TaylorEnergy(tuple(coeffs), False)
