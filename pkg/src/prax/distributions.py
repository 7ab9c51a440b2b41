"""Power-law length distributions and finite sampling primitives.

The length distribution used throughout the package puts mass
``(1/zeta(t)) * (l + 1 - d)**(-t)`` on every integer length ``l >= d``,
for an exponent ``t > 1`` and a nonnegative shift ``d`` that skips the
small lengths.  This module provides the exact pmf, its normalizing
constant, truncation to a finite prefix plus a residual ``none``
outcome, and the seeded randomness primitives the samplers are built
from.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError

# Residual-mass bookkeeping: 1 - sum(weights) may land a few ulp below 0
# after summing up to ~4e7 terms; anything worse is a real bug.
NONE_MASS_CLAMP = 1e-12
NORMALIZATION_TOL = 1e-9

_ZETA_TERMS = 200_000
_zeta_cache: dict[float, float] = {}


def snapped_ceil(x: float, rel: float = 1e-12) -> int:
    """Ceiling that forgives float noise around exact integers.

    The closed-form size bounds evaluate to exact integers in real
    arithmetic for round parameter choices (e.g. (2/delta)**(1/(t-1)) =
    400000); a stray ulp must not bump them to the next integer.  Values
    within `rel` (relative) of an integer round to it, everything else
    gets a plain ceiling.
    """
    r = round(x)
    if abs(x - r) <= rel * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def zeta(t: float) -> float:
    """Riemann zeta at a real argument t > 1, to ~1e-14 absolute.

    Partial series over the first 200k terms plus the integral tail
    correction N**(1-t)/(t-1) refined with the next two Euler-Maclaurin
    terms; without those two terms the plain integral correction cannot
    reach the target accuracy for t near 1 in any feasible number of
    terms.  Results are cached per t.
    """
    if t <= 1.0:
        raise ValueError(f"zeta requires t > 1, got {t}")
    cached = _zeta_cache.get(t)
    if cached is not None:
        return cached
    n = _ZETA_TERMS
    k = np.arange(1, n + 1, dtype=np.float64)
    s = float(np.sum(k ** (-t)))
    s += n ** (1.0 - t) / (t - 1.0) - 0.5 * n ** (-t) + (t / 12.0) * n ** (-t - 1.0)
    _zeta_cache[t] = s
    return s


@dataclass(frozen=True)
class DirichletParams:
    """Exponent/shift pair for the power-law length distribution.

    `zeta_t` is filled in at construction; pass it explicitly only when
    replaying a stored configuration.
    """

    t: float
    d: int = 0
    zeta_t: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.t <= 1.0:
            raise ValueError(f"exponent t must be > 1, got {self.t}")
        if self.d < 0:
            raise ValueError(f"shift d must be >= 0, got {self.d}")
        if self.zeta_t == 0.0:
            object.__setattr__(self, "zeta_t", zeta(self.t))


def dirichlet_pmf(params: DirichletParams, ell: int) -> float:
    """Probability of length `ell`: (1/zeta(t)) * (ell+1-d)**(-t), or 0 below the shift."""
    if ell < params.d:
        return 0.0
    return (ell + 1 - params.d) ** (-params.t) / params.zeta_t


def dirichlet_pmf_vector(params: DirichletParams, upto: int) -> np.ndarray:
    """Vector of pmf values for lengths 0..upto inclusive."""
    if upto < 0:
        return np.zeros(0)
    out = np.zeros(upto + 1)
    if upto >= params.d:
        ell = np.arange(params.d, upto + 1, dtype=np.float64)
        out[params.d:] = (ell + 1 - params.d) ** (-params.t) / params.zeta_t
    return out


def dirichlet_tail_bound(params: DirichletParams, m: int) -> float:
    """Upper bound on the mass of lengths > m (integral comparison)."""
    if m < params.d:
        return 1.0
    return (m + 1 - params.d) ** (1.0 - params.t) / ((params.t - 1.0) * params.zeta_t)


def max_len_1d(params: DirichletParams, delta: float) -> int:
    """Smallest formula-backed M with tail mass beyond M at most delta.

    M = ceil((1/delta)**(1/(t-1))) + (d-1).  Always >= d.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    return snapped_ceil((1.0 / delta) ** (1.0 / (params.t - 1.0))) + params.d - 1


class RandomSource:
    """Seeded stream of uniform draws with reproducible child streams.

    A source is single-owner: share work across threads by `split`-ting
    children, never by sharing one instance.  Child streams are derived
    by hashing (parent seed, index), so a parallel run's layout does not
    depend on scheduling.
    """

    __slots__ = ("seed", "_rng")

    def __init__(self, seed: int):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self._rng = random.Random(self.seed)

    def uniform(self) -> float:
        """One draw, uniform on [0, 1)."""
        return self._rng.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return self._rng.randrange(n)

    def choices(self, seq, k: int) -> list:
        """k independent uniform picks from seq (with replacement)."""
        return self._rng.choices(seq, k=k) if k else []

    def split(self, index: int) -> "RandomSource":
        """Child source number `index`; independent of draws made so far."""
        digest = hashlib.sha256(f"{self.seed}:{index}".encode("ascii")).digest()
        return RandomSource(int.from_bytes(digest[:8], "big"))

    def __repr__(self):
        return f"RandomSource(seed={self.seed})"


def toss_coin(src: RandomSource, p: float) -> int:
    """Return 0 with probability p, 1 with probability 1-p (one draw)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    return 0 if src.uniform() < p else 1


class FiniteDistribution:
    """Probability vector over indices 0..k-1, optionally with a trailing
    residual "none" outcome carrying the remaining mass.

    Prefix sums are cached at construction so selection is one uniform
    draw plus a binary search (O(log k) per draw after O(k) setup).
    """

    __slots__ = ("weights", "none_mass", "has_none", "cumulative")

    def __init__(self, weights, none_mass: float | None = None):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.has_none = none_mass is not None
        mass = float(none_mass) if none_mass is not None else 0.0
        if mass < 0.0:
            if mass < -NONE_MASS_CLAMP:
                raise ConsistencyError(f"none mass {mass} below clamp threshold")
            mass = 0.0
        self.none_mass = mass
        if self.weights.size and float(self.weights.min()) < 0.0:
            worst = float(self.weights.min())
            if worst < -NONE_MASS_CLAMP:
                raise ConsistencyError(f"negative weight {worst}")
            self.weights = np.maximum(self.weights, 0.0)
        total = float(self.weights.sum()) + self.none_mass
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ConsistencyError(f"total mass {total} not within {NORMALIZATION_TOL} of 1")
        self.cumulative = np.cumsum(self.weights)

    def __len__(self):
        return int(self.weights.size)

    @property
    def support_mass(self) -> float:
        return float(self.cumulative[-1]) if len(self) else 0.0


def select_fin(src: RandomSource, dist: FiniteDistribution) -> int | None:
    """Draw an outcome index from `dist`, or None for the residual mass."""
    u = src.uniform()
    idx = int(np.searchsorted(dist.cumulative, u, side="right"))
    if idx >= len(dist):
        if dist.has_none:
            return None
        return len(dist) - 1  # u fell into rounding slack past the last prefix sum
    return idx


def truncate(params: DirichletParams, m: int) -> FiniteDistribution:
    """Distribution over lengths 0..m with the tail mass moved to `none`."""
    if m < params.d:
        raise ValueError(f"truncation point {m} below shift d={params.d}")
    weights = dirichlet_pmf_vector(params, m)
    return FiniteDistribution(weights, none_mass=1.0 - float(weights.sum()))
