"""Dense matrix builders for the non-Hermitian Harper chain and its 2D parent lattice.

The 1D chain has asymmetric hoppings -e^{g} (rightward, row m column m+1) and
-e^{-g} (leftward), with onsite potential -2 cos(2*pi*q*m/L + 2*pi*p/L) in the
quasi-periodic case.  The orientation is normative: the coefficient multiplying
site m+1 in row m is -e^{g}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

MAX_NONHERMITICITY = 20.0  # |g| cap; guards overflow of e^{+-g} products in diagnostics
MAX_2D_SIZE = 12           # 2D builder is oracle-scale only


@dataclass(frozen=True)
class FluxRational:
    """Magnetic flux per plaquette as the exact rational q/L (q reduced mod L)."""

    q: int
    L: int

    def __post_init__(self):
        if self.L < 3:
            raise ValueError(f"lattice size must be >= 3, got L={self.L}")
        object.__setattr__(self, "q", self.q % self.L)

    @property
    def value(self) -> float:
        return self.q / self.L


@dataclass(frozen=True)
class Harper:
    """Quasi-periodic onsite potential -2 cos(2*pi*phi*m + k)."""


@dataclass(frozen=True)
class Constant:
    """Uniform onsite potential -c."""

    c: float = 2.0


@dataclass(frozen=True)
class RandomOnsite:
    """Seeded random onsite potential -V_m, V_m uniform on [-width, width].

    Draws are taken from numpy's PCG64 generator, so the same seed yields the
    same potential on every platform.
    """

    seed: int
    width: float = 1.0


PotentialKind = Union[Harper, Constant, RandomOnsite]


@dataclass(frozen=True)
class OperatorSpec:
    """Full parameter point; the single source of truth for what matrix is built.

    q may be any integer (flux enters only through q mod L); p must already lie
    in [0, L).
    """

    L: int
    q: int
    p: int
    g: float = 0.0
    boundary: str = "periodic"
    potential: PotentialKind = field(default_factory=Harper)

    def __post_init__(self):
        if self.L < 3:
            raise ValueError(f"lattice size must be >= 3, got L={self.L}")
        if not 0 <= self.p < self.L:
            raise ValueError(f"momentum index p must lie in [0, {self.L}), got {self.p}")
        if not math.isfinite(self.g):
            raise ValueError(f"non-Hermiticity g must be finite, got {self.g}")
        if abs(self.g) > MAX_NONHERMITICITY:
            raise ValueError(f"|g| must be <= {MAX_NONHERMITICITY}, got {self.g}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        if not isinstance(self.potential, (Harper, Constant, RandomOnsite)):
            raise ValueError(f"unknown potential kind: {self.potential!r}")
        if isinstance(self.potential, RandomOnsite) and not math.isfinite(self.potential.width):
            raise ValueError("random potential width must be finite")

    @property
    def flux(self) -> FluxRational:
        return FluxRational(self.q, self.L)

    @property
    def momentum(self) -> float:
        """Wave vector k = 2*pi*p/L."""
        return 2.0 * math.pi * self.p / self.L

    def replace(self, **kwargs) -> "OperatorSpec":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)


def _random_draws(potential: RandomOnsite, L: int) -> np.ndarray:
    return np.random.default_rng(potential.seed).uniform(
        -potential.width, potential.width, size=L
    )


def onsite_potential(spec: OperatorSpec, m: int) -> float:
    """Diagonal entry at site m for the given parameter point."""
    if not 0 <= m < spec.L:
        raise ValueError(f"site index m must lie in [0, {spec.L}), got {m}")
    pot = spec.potential
    if isinstance(pot, Harper):
        # cos(2*pi*(q*m + p)/L); the integer argument is reduced mod L first so
        # that q and q + L give bit-identical matrices (exact flux periodicity).
        r = (spec.q * m + spec.p) % spec.L
        return -2.0 * math.cos(2.0 * math.pi * r / spec.L)
    if isinstance(pot, Constant):
        return -pot.c
    return -float(_random_draws(pot, spec.L)[m])


def build_harper_matrix(spec: OperatorSpec) -> np.ndarray:
    """Dense L x L real matrix of the chain; row m couples to m+1 with -e^{g}."""
    L = spec.L
    hop_right = -math.exp(spec.g)
    hop_left = -math.exp(-spec.g)
    H = np.zeros((L, L))
    for m in range(L):
        H[m, m] = onsite_potential(spec, m)
    for m in range(L - 1):
        H[m, m + 1] = hop_right
        H[m + 1, m] = hop_left
    if spec.boundary == "periodic":
        H[L - 1, 0] = hop_right
        H[0, L - 1] = hop_left
    return H


def build_2d_hofstadter_matrix(L: int, q: int, g: float) -> np.ndarray:
    """Dense L^2 x L^2 complex matrix of the 2D parent lattice, periodic both ways.

    Site ordering is index = n*L + m.  Hops along n carry Peierls phases
    e^{+-i 2*pi*q*m/L}; hops along m carry the asymmetric factors e^{+-g}.
    Oracle-scale only (L <= 12): used to cross-check the momentum decomposition.
    """
    if not 3 <= L <= MAX_2D_SIZE:
        raise ValueError(f"2D builder requires 3 <= L <= {MAX_2D_SIZE}, got {L}")
    if not 0 <= q < L:
        raise ValueError(f"flux numerator q must lie in [0, {L}), got {q}")
    if not math.isfinite(g):
        raise ValueError(f"non-Hermiticity g must be finite, got {g}")
    N = L * L
    H = np.zeros((N, N), dtype=complex)
    for n in range(L):
        for m in range(L):
            i = n * L + m
            phase = 2.0 * math.pi * ((q * m) % L) / L
            H[i, ((n + 1) % L) * L + m] = -complex(math.cos(phase), math.sin(phase))
            H[i, ((n - 1) % L) * L + m] = -complex(math.cos(phase), -math.sin(phase))
            H[i, n * L + (m + 1) % L] = -math.exp(g)
            H[i, n * L + (m - 1) % L] = -math.exp(-g)
    return H
