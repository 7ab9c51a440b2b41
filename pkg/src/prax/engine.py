"""Randomized emptiness / universality decision engines.

Both engines draw n = ceil(c / (eps/2)) elements from the instance's
distribution truncated at tail tolerance eps/2 and return False with a
witness as soon as one sample decides the question (a member for
emptiness, a non-member for universality).  False answers are therefore
always correct; True answers are wrong only when the instance violates
the tolerance band, and then with probability at most 1/4.  That error
bound is what the sample constant c = 4.76603 buys: it is the smallest
5-decimal value satisfying c**3 >= 2*c**2 + 5*c + 39, the condition
under which n >= c/delta samples push the all-or-nothing failure events
below 1/4.

A tail draw ("none") can never produce a witness: it counts as a miss
for emptiness and as a success for universality.
"""

from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, runtime_checkable

from .distributions import RandomSource, snapped_ceil
from .errors import ConfigurationError
from .tractable import LocallyTractableFamily

SAMPLE_CONSTANT = 4.76603


def check_constant(c: float) -> bool:
    """True iff c satisfies the cubic sample-size condition
    c**3 >= 2*c**2 + 5*c + 39."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    return c ** 3 >= 2 * c ** 2 + 5 * c + 39


@dataclass(frozen=True)
class PraxConfig:
    """Run parameters for one engine invocation.

    `tail_split` is the fraction of epsilon given to the tail cutoff
    (delta = tail_split * eps, n = ceil(c / (eps - delta))); 1/2 is the
    n*M-minimizing choice for the default t=2 family and is the value
    the error analysis assumes.
    """

    epsilon: float
    seed: int = 0
    c: float = SAMPLE_CONSTANT
    parallel: bool = False
    tail_split: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"epsilon must be in (0,1), got {self.epsilon}")
        if self.c < SAMPLE_CONSTANT:
            raise ConfigurationError(
                f"sample constant {self.c} below {SAMPLE_CONSTANT}; "
                "smaller values break the cubic error-bound condition"
            )
        if not 0.0 < self.tail_split < 1.0:
            raise ConfigurationError(f"tail_split must be in (0,1), got {self.tail_split}")

    @property
    def tail_delta(self) -> float:
        return self.epsilon * self.tail_split


def sample_count(config: PraxConfig) -> int:
    """Number of samples: ceil(c / (eps - delta)), i.e. ceil(2c/eps) at the
    default split."""
    return snapped_ceil(config.c / (config.epsilon - config.tail_delta))


@dataclass(frozen=True)
class Verdict:
    """Decision plus the evidence that produced it.

    `witness` is present exactly when `answer` is False and certifies it:
    a member of the language for emptiness, a non-member for
    universality.
    """

    answer: bool
    witness: Optional[object]
    samples_used: int
    none_count: int


@runtime_checkable
class SubsetSpecLike(Protocol):
    """What the engines need from a problem instance."""

    domain: str
    distr_parameter: Optional[int]

    def membership(self, x) -> bool: ...


def estimate_parameter(
    src: RandomSource,
    n: int,
    sampler: Callable[[RandomSource], object],
    predicate: Callable[[object], bool],
) -> float:
    """Fraction of n drawn elements satisfying the predicate."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cnt = sum(1 for _ in range(n) if predicate(sampler(src)))
    return cnt / n


def _check_domain(spec, fam) -> None:
    spec_domain = getattr(spec, "domain", None)
    if spec_domain != fam.domain:
        raise ConfigurationError(
            f"spec domain {spec_domain!r} does not match family domain {fam.domain!r}"
        )


def _run_sequential(src, draw, is_witness, n: int) -> Verdict:
    none_count = 0
    for i in range(n):
        x = draw(src)
        if x is None:
            none_count += 1
            continue
        if is_witness(x):
            return Verdict(False, x, i + 1, none_count)
    return Verdict(True, None, n, none_count)


def _run_parallel(base: RandomSource, draw, is_witness, n: int) -> Verdict:
    """Evaluate iterations on split child sources, in chunked rounds.

    Iteration i always uses base.split(i), so the outcome per index is
    independent of scheduling; the verdict takes the witness with the
    lowest index and counts the none draws at indices up to it.
    """
    workers = min(8, os.cpu_count() or 1)
    chunk = max(workers * 64, 512)

    def eval_range(lo: int, hi: int):
        out = []
        for i in range(lo, hi):
            x = draw(base.split(i))
            if x is None:
                out.append((i, True, None))
            elif is_witness(x):
                out.append((i, False, x))
        return out

    nones_before = 0
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, n, chunk):
            stop = min(start + chunk, n)
            step = max(1, (stop - start + workers - 1) // workers)
            ranges = [(lo, min(lo + step, stop)) for lo in range(start, stop, step)]
            results: list[tuple[int, bool, object]] = []
            for part in pool.map(lambda r: eval_range(*r), ranges):
                results.extend(part)
            hits = sorted(i for i, is_none, _ in results if not is_none)
            if hits:
                win = hits[0]
                witness = next(x for i, is_none, x in results if i == win)
                nones = nones_before + sum(
                    1 for i, is_none, _ in results if is_none and i <= win
                )
                return Verdict(False, witness, win + 1, nones)
            nones_before += sum(1 for _, is_none, _ in results if is_none)
    return Verdict(True, None, n, nones_before)


def _decide(
    src: RandomSource,
    spec,
    draw,
    config: PraxConfig,
    want_member: bool,
) -> Verdict:
    n = sample_count(config)
    membership = spec.membership

    def is_witness(x) -> bool:
        return membership(x) == want_member

    if config.parallel:
        return _run_parallel(src, draw, is_witness, n)
    return _run_sequential(src, draw, is_witness, n)


def prax_emptiness(
    src: RandomSource,
    spec: SubsetSpecLike,
    fam: LocallyTractableFamily,
    config: PraxConfig,
) -> Verdict:
    """Approximate emptiness: True if no sampled element is a member.

    Always True on genuinely empty languages; when the language's mass
    exceeds epsilon, the probability of a (wrong) True is at most 1/4.
    """
    _check_domain(spec, fam)
    draw = fam.truncated_sampler(config.tail_delta)
    return _decide(src, spec, draw, config, want_member=True)


def prax_universality(
    src: RandomSource,
    spec: SubsetSpecLike,
    fam: LocallyTractableFamily,
    config: PraxConfig,
) -> Verdict:
    """Approximate universality: True if every sampled element (and every
    tail draw) is a member.

    Always True on genuinely universal languages; when the language's
    mass is below 1 - epsilon, the probability of a (wrong) True is at
    most 1/4.
    """
    _check_domain(spec, fam)
    draw = fam.truncated_sampler(config.tail_delta)
    return _decide(src, spec, draw, config, want_member=False)


def _fin_draw(spec, sample):
    k = getattr(spec, "distr_parameter", None)
    if k is None:
        raise ConfigurationError(
            "spec has no finite-domain parameter; use the truncating engine instead"
        )

    def draw(src: RandomSource):
        return sample(src, k)

    return draw


def fin_prax_emptiness(
    src: RandomSource,
    spec: SubsetSpecLike,
    sample: Callable[[RandomSource, int], object],
    config: PraxConfig,
) -> Verdict:
    """Emptiness over a finite domain sampled by `sample(src, k)`; no
    truncation, so tail draws never occur."""
    return _decide(src, spec, _fin_draw(spec, sample), config, want_member=True)


def fin_prax_universality(
    src: RandomSource,
    spec: SubsetSpecLike,
    sample: Callable[[RandomSource, int], object],
    config: PraxConfig,
) -> Verdict:
    """Universality over a finite domain sampled by `sample(src, k)`."""
    return _decide(src, spec, _fin_draw(spec, sample), config, want_member=False)
