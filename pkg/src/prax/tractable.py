"""Size-structured sample spaces over words, 2D words, and integer triples.

Each family exposes the three primitives that make an infinite domain
samplable to any tail tolerance:

* ``prob(m)``        - total mass of the elements of size m,
* ``size_select(m)`` - draw an element uniformly-within-mass of size m,
* ``max_len(delta)`` - a size cutoff M whose tail mass is at most delta.

``select_any`` combines them: pick a size from the truncated size
distribution (or the residual ``none``), then an element of that size.
An element x of size m then comes out with overall probability
prob(m) * mass(x)/mass(size class m) = mass(x), i.e. the two-level draw
realizes the underlying distribution restricted to sizes <= M.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .distributions import (
    DirichletParams,
    FiniteDistribution,
    RandomSource,
    dirichlet_pmf,
    dirichlet_pmf_vector,
    max_len_1d,
    select_fin,
    snapped_ceil,
    truncate,
)

Word = tuple[str, ...]
Triple = tuple[int, int, int]


@dataclass(frozen=True)
class Grid:
    """Rectangular symbol array; rows or cols may be zero."""

    rows: int
    cols: int
    cells: tuple[Word, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative grid dimensions")
        if len(self.cells) != self.rows or any(len(r) != self.cols for r in self.cells):
            raise ValueError("cells do not match declared dimensions")

    @classmethod
    def from_rows(cls, rows: list[str] | list[Word], cols: int | None = None) -> "Grid":
        cells = tuple(tuple(r) for r in rows)
        if cols is None:
            cols = len(cells[0]) if cells else 0
        return cls(len(cells), cols, cells)

    def size(self) -> int:
        return max(self.rows, self.cols)


class LocallyTractableFamily(ABC):
    """A distribution family samplable via per-size mass, per-size
    selection, and a polynomial size cutoff."""

    domain: str  # element kind tag: "word" | "grid" | "triple"

    @abstractmethod
    def prob(self, m: int) -> float:
        """Mass of the size-m class."""

    @abstractmethod
    def size_select(self, src: RandomSource, m: int):
        """Draw an element of size exactly m."""

    @abstractmethod
    def max_len(self, delta: float) -> int:
        """Size cutoff M with tail mass (sizes > M) at most delta."""

    @abstractmethod
    def _size_mass_vector(self, upto: int) -> np.ndarray:
        """Vectorized prob(0..upto), for building truncations at scale."""

    @abstractmethod
    def describe(self) -> str:
        ...

    def truncated_size_distribution(self, delta: float) -> FiniteDistribution:
        """Size distribution (prob(0), ..., prob(M), residual) for M =
        max_len(delta); built once per delta and cached."""
        cache = self.__dict__.setdefault("_trunc_cache", {})
        dist = cache.get(delta)
        if dist is None:
            weights = self._size_mass_vector(self.max_len(delta))
            dist = FiniteDistribution(weights, none_mass=1.0 - float(weights.sum()))
            cache[delta] = dist
        return dist

    def truncated_sampler(self, delta: float) -> Callable[[RandomSource], Optional[object]]:
        """Closure drawing one element (or None) per call at tolerance delta."""
        dist = self.truncated_size_distribution(delta)

        def draw(src: RandomSource):
            m = select_fin(src, dist)
            if m is None:
                return None
            return self.size_select(src, m)

        return draw


def select_any(src: RandomSource, fam: LocallyTractableFamily, delta: float):
    """Two-level draw from `fam` truncated at tail tolerance delta.

    Returns an element of size <= max_len(delta), or None with the
    residual (tail) mass.
    """
    dist = fam.truncated_size_distribution(delta)
    m = select_fin(src, dist)
    if m is None:
        return None
    return fam.size_select(src, m)


class WordFamily1D(LocallyTractableFamily):
    """Words w over a finite alphabet with mass pmf(|w|) * s**(-|w|)."""

    domain = "word"

    def __init__(self, params: DirichletParams, alphabet):
        self.params = params
        self.alphabet = tuple(alphabet)
        if not self.alphabet:
            raise ValueError("alphabet must be nonempty")
        self.s = len(self.alphabet)

    def prob(self, m: int) -> float:
        return dirichlet_pmf(self.params, m)

    def size_select(self, src: RandomSource, m: int) -> Word:
        if m < self.params.d:
            raise ValueError(f"size {m} below shift d={self.params.d}")
        return tuple(src.choices(self.alphabet, m))

    def max_len(self, delta: float) -> int:
        return max_len_1d(self.params, delta)

    def _size_mass_vector(self, upto: int) -> np.ndarray:
        return dirichlet_pmf_vector(self.params, upto)

    def describe(self) -> str:
        return f"words over {{{','.join(self.alphabet)}}}, t={self.params.t}, d={self.params.d}"


class WordFamily2D(LocallyTractableFamily):
    """2D words z with mass pmf(rows)*pmf(cols)*s**-(rows+cols); the size
    of z is max(rows, cols)."""

    domain = "grid"

    def __init__(self, params: DirichletParams, alphabet):
        self.params = params
        self.alphabet = tuple(alphabet)
        if not self.alphabet:
            raise ValueError("alphabet must be nonempty")
        self.s = len(self.alphabet)
        self._pmf: list[float] = []      # pmf(0..)
        self._prefix: list[float] = []   # sum of pmf below each index

    def _ensure(self, m: int) -> None:
        while len(self._pmf) <= m:
            ell = len(self._pmf)
            self._prefix.append((self._prefix[-1] + self._pmf[-1]) if ell else 0.0)
            self._pmf.append(dirichlet_pmf(self.params, ell))

    def prob(self, m: int) -> float:
        return prob_2d(self, m)

    def size_select(self, src: RandomSource, m: int) -> Grid:
        return size_select_2d(src, self, m)

    def max_len(self, delta: float) -> int:
        return max_len_2d(self, delta)

    def _size_mass_vector(self, upto: int) -> np.ndarray:
        pmf = dirichlet_pmf_vector(self.params, upto)
        prefix = np.concatenate(([0.0], np.cumsum(pmf)[:-1]))
        return 2.0 * pmf * prefix + pmf * pmf

    def describe(self) -> str:
        return f"2D words over {{{','.join(self.alphabet)}}}, t={self.params.t}, d={self.params.d}"


def prob_2d(fam: WordFamily2D, m: int) -> float:
    """Mass of the 2D words with max(rows, cols) = m: counting the row-m
    band, the column-m band, and their shared corner once each gives
    2*pmf(m)*prefix(m) + pmf(m)**2."""
    if m < fam.params.d:
        return 0.0
    fam._ensure(m)
    tm = fam._pmf[m]
    return 2.0 * tm * fam._prefix[m] + tm * tm


def size_select_2d(src: RandomSource, fam: WordFamily2D, m: int) -> Grid:
    """Draw a 2D word of size exactly m: first the dimension pair from the
    2(m-d)+1 admissible pairs (conditioned on the size class), then the
    rows*cols symbols uniformly."""
    if m < fam.params.d:
        raise ValueError(f"size {m} below shift d={fam.params.d}")
    fam._ensure(m)
    tm = fam._pmf[m]
    mass = 2.0 * tm * fam._prefix[m] + tm * tm
    below = np.asarray(fam._pmf[:m])
    # pair order: (m, 0..m-1), (0..m-1, m), (m, m)
    weights = np.concatenate((tm * below, below * tm, [tm * tm])) / mass
    idx = select_fin(src, FiniteDistribution(weights))
    if idx < m:
        rows, cols = m, idx
    elif idx < 2 * m:
        rows, cols = idx - m, m
    else:
        rows, cols = m, m
    cells = tuple(tuple(src.choices(fam.alphabet, cols)) for _ in range(rows))
    return Grid(rows, cols, cells)


def max_len_2d(fam: WordFamily2D, delta: float) -> int:
    """Cutoff M whose 2D tail 2x - x**2 (x = 1D tail at M) is at most delta.

    Requires the 1D tail to be at most 1 - sqrt(1-delta), written as
    delta/(1 + sqrt(1-delta)) to avoid cancellation for small delta.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    one_d = delta / (1.0 + math.sqrt(1.0 - delta))
    t, d = fam.params.t, fam.params.d
    return snapped_ceil((1.0 / one_d) ** (1.0 / (t - 1.0))) + d - 1


class TripleFamily3D(LocallyTractableFamily):
    """Integer triples with independent per-coordinate length mass; the
    size of (j, k, l) is max(j, k, l)."""

    domain = "triple"

    def __init__(self, params: DirichletParams):
        self.params = params
        self._pmf: list[float] = []
        self._prefix: list[float] = []

    def _ensure(self, m: int) -> None:
        while len(self._pmf) <= m:
            ell = len(self._pmf)
            self._prefix.append((self._prefix[-1] + self._pmf[-1]) if ell else 0.0)
            self._pmf.append(dirichlet_pmf(self.params, ell))

    def prob(self, m: int) -> float:
        return prob_3d(self, m)

    def size_select(self, src: RandomSource, m: int) -> Triple:
        if m < self.params.d:
            raise ValueError(f"size {m} below shift d={self.params.d}")
        triples = enumerate_size_class_3d(m)
        self._ensure(m)
        pmf = self._pmf
        weights = np.array([pmf[a] * pmf[b] * pmf[c] for a, b, c in triples])
        weights /= prob_3d(self, m)
        idx = select_fin(src, FiniteDistribution(weights))
        return triples[idx]

    def max_len(self, delta: float) -> int:
        return max_len_3d(self, delta)

    def _size_mass_vector(self, upto: int) -> np.ndarray:
        pmf = dirichlet_pmf_vector(self.params, upto)
        prefix = np.concatenate(([0.0], np.cumsum(pmf)[:-1]))
        return 3.0 * pmf * prefix * prefix + 3.0 * pmf * pmf * prefix + pmf ** 3

    def describe(self) -> str:
        return f"nonnegative integer triples, t={self.params.t}, d={self.params.d}"

    def truncated_sampler(self, delta: float) -> Callable[[RandomSource], Optional[Triple]]:
        """Independent-coordinate sampler: three draws from the 1D length
        distribution truncated at the 3D cutoff.  Distributionally
        equivalent to the generic two-level draw on this family (each
        triple keeps probability pmf(j)*pmf(k)*pmf(l)) but avoids
        materializing the O(M^2) size classes."""
        dist = self._coordinate_distribution(delta)

        def draw(src: RandomSource) -> Optional[Triple]:
            x = select_fin(src, dist)
            if x is None:
                return None
            y = select_fin(src, dist)
            if y is None:
                return None
            z = select_fin(src, dist)
            if z is None:
                return None
            return (x, y, z)

        return draw

    def _coordinate_distribution(self, delta: float) -> FiniteDistribution:
        cache = self.__dict__.setdefault("_coord_cache", {})
        dist = cache.get(delta)
        if dist is None:
            dist = truncate(self.params, self.max_len(delta))
            cache[delta] = dist
        return dist


def enumerate_size_class_3d(m: int) -> list[Triple]:
    """All triples with max coordinate exactly m: the three faces, the
    three edges, and the corner (3m^2 + 3m + 1 triples)."""
    below = range(m)
    out: list[Triple] = []
    out += [(m, j, k) for j in below for k in below]
    out += [(j, m, k) for j in below for k in below]
    out += [(j, k, m) for j in below for k in below]
    out += [(m, m, j) for j in below]
    out += [(m, j, m) for j in below]
    out += [(j, m, m) for j in below]
    out.append((m, m, m))
    return out


def prob_3d(fam: TripleFamily3D, m: int) -> float:
    """Mass of the triples with max coordinate = m.

    Partitioning the class into faces, edges, and corner gives
    3*pmf(m)*prefix(m)**2 + 3*pmf(m)**2*prefix(m) + pmf(m)**3.
    """
    if m < fam.params.d:
        return 0.0
    fam._ensure(m)
    tm, ym = fam._pmf[m], fam._prefix[m]
    return 3.0 * tm * ym * ym + 3.0 * tm * tm * ym + tm ** 3


def prob_3d_unscaled_variant(fam: TripleFamily3D, m: int) -> float:
    """Rejected candidate for the size-class mass that omits the pmf(m)
    factors on the face and edge terms.  Not a probability (it can exceed
    1); kept only so validation can demonstrate the brute-force oracle
    rules it out.  Never used on a production path."""
    if m < fam.params.d:
        return 0.0
    fam._ensure(m)
    tm, ym = fam._pmf[m], fam._prefix[m]
    return 3.0 * ym * ym + 3.0 * ym + tm ** 3


def max_len_3d(fam: TripleFamily3D, delta: float) -> int:
    """Cutoff M whose 3D tail 3x - 3x**2 + x**3 is at most delta; the
    sufficient 1D tail bound is delta/2."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    t, d = fam.params.t, fam.params.d
    return snapped_ceil((2.0 / delta) ** (1.0 / (t - 1.0))) + d - 1


def select_triple_independent(src: RandomSource, fam: TripleFamily3D, delta: float) -> Optional[Triple]:
    """Alternative triple sampler using three independent coordinate draws
    from the 1D truncation at the 3D cutoff; None if any draw lands in
    the tail."""
    return fam.truncated_sampler(delta)(src)
