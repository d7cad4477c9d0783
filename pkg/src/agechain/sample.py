"""Exact stationary and forward simulation, plus Monte-Carlo estimators.

Sampling uses the renewal structure directly: the position of the first 1
is drawn from the exact residual law given the entry age, and every later
gap between 1's is an independent draw from the gap distribution.  Gap and
age tables are truncated where their geometric tail bounds drop below the
per-draw budget, so a stationary window's law is within a stated total
variation of the true stationary marginal.

RNG contract: NumPy's PCG64 via ``numpy.random.default_rng(seed)``, one
stream per sample or estimate.  Identical (seed, parameters, length) give
bit-identical output; parallelism is by independent seeded streams merged
with :func:`pool_estimates`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exact import CylinderSpec, cylinder_probability
from .kernel import PSequence

__all__ = [
    "SamplePath",
    "Estimate",
    "InsufficientHitsError",
    "forward_sample",
    "stationary_sample",
    "mc_conditional",
    "mc_one_sided",
    "pool_estimates",
]

MIN_HITS = 100

# Per-draw truncation budget for forward simulation, which exposes no
# tolerance knob; at path length 1e6 the accumulated total-variation error
# stays below 1e-11.
_FORWARD_DRAW_TOL = 1e-18


class InsufficientHitsError(RuntimeError):
    """The conditioning event occurred too rarely to estimate honestly."""

    def __init__(self, n_hits: int, needed: int, expected: float | None = None):
        self.n_hits = n_hits
        self.needed = needed
        self.expected = expected
        msg = f"insufficient hits: got {n_hits}, need >= {needed}"
        if expected is not None:
            msg += f" (predicted {expected:.1f} for this run)"
        super().__init__(msg)


@dataclass(frozen=True)
class SamplePath:
    """A simulated symbol window with its seed and left-edge age."""

    symbols: str
    seed: int
    left_age: int | float


@dataclass(frozen=True)
class Estimate:
    """A Monte-Carlo estimate with a binomial error model on its hits.

    ``value`` is NaN when no hit occurred.
    """

    value: float
    std_error: float
    n_samples: int
    n_hits: int


class _GapTables:
    """Truncated cumulative tables for gap and age draws."""

    def __init__(self, seq: PSequence, per_draw_tol: float):
        eps = seq.eps
        survival = [1.0]
        gap_probs = []
        while survival[-1] / eps > per_draw_tol or len(gap_probs) < 8:
            p = seq.prob(len(gap_probs))
            gap_probs.append(survival[-1] * p)
            survival.append(survival[-1] * (1.0 - p))
        self.depth = len(gap_probs)
        self.gap_cum = np.cumsum(gap_probs)
        self.age_cum = np.cumsum(survival[:-1])
        total = self.gap_cum[-1]
        mean_span = float(np.dot(np.arange(self.depth) + 1.0, gap_probs)) / total
        self.ones_density = 1.0 / mean_span

    def draw_age(self, rng: np.random.Generator) -> int:
        u = rng.random() * self.age_cum[-1]
        return int(np.searchsorted(self.age_cum, u, side="right"))


def _first_one_offset(
    seq: PSequence, initial_age: int | float, length: int, rng: np.random.Generator
) -> int:
    """Offset of the first 1, drawn from the exact residual law."""
    if isinstance(initial_age, float) and math.isinf(initial_age):
        # age stays infinite along zeros, so the wait is geometric(p_inf)
        u = rng.random()
        return int(math.log1p(-u) / math.log1p(-seq.p_inf))
    age = int(initial_age)
    if age < 0:
        raise ValueError(f"initial age must be >= 0, got {initial_age}")
    t = 0
    while t < length:
        if rng.random() < seq.prob(age + t):
            return t
        t += 1
    return length


def _renewal_symbols(
    seq: PSequence,
    length: int,
    initial_age: int | float,
    rng: np.random.Generator,
    tables: _GapTables,
) -> np.ndarray:
    out = np.zeros(length, dtype=np.uint8)
    t = _first_one_offset(seq, initial_age, length, rng)
    if t >= length:
        return out
    out[t] = 1
    pos = t + 1
    while pos < length:
        need = length - pos
        n_draw = max(32, int(need * tables.ones_density * 1.3) + 16)
        us = rng.random(n_draw)
        gaps = np.searchsorted(tables.gap_cum, us, side="right")
        np.minimum(gaps, tables.depth - 1, out=gaps)
        ones_at = pos + np.cumsum(gaps + 1) - 1
        inside = ones_at[ones_at < length]
        out[inside] = 1
        if len(inside) < len(ones_at):
            break
        pos = int(ones_at[-1]) + 1
    return out


def _to_string(symbols: np.ndarray) -> str:
    return (symbols + ord("0")).astype(np.uint8).tobytes().decode("ascii")


def forward_sample(
    seq: PSequence, initial_age: int | float, length: int, seed: int
) -> SamplePath:
    """Simulate ``length`` symbols forward from a given entry age.

    Each symbol is a 1 with probability p at the running age, which resets
    to 0 after a 1 and grows by one after a 0; an infinite entry age stays
    infinite until the first 1.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    rng = np.random.default_rng(seed)
    tables = _GapTables(seq, _FORWARD_DRAW_TOL)
    symbols = _renewal_symbols(seq, length, initial_age, rng, tables)
    return SamplePath(_to_string(symbols), seed, initial_age)


def stationary_sample(
    seq: PSequence, length: int, seed: int, tol: float = 1e-12
) -> SamplePath:
    """Simulate a window under the stationary law.

    The left-edge age is drawn from the stationary age distribution by
    inverse transform over its certified truncated series, then the window
    is filled forward.  The window's law is within total variation ``tol``
    of the stationary marginal, all of it from table truncation.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    rng = np.random.default_rng(seed)
    tables = _GapTables(seq, tol / (2.0 * (length + 2)))
    age = tables.draw_age(rng)
    symbols = _renewal_symbols(seq, length, age, rng, tables)
    return SamplePath(_to_string(symbols), seed, age)


def _stationary_array(
    seq: PSequence, length: int, rng: np.random.Generator, tol: float
) -> np.ndarray:
    tables = _GapTables(seq, tol / (2.0 * (length + 2)))
    age = tables.draw_age(rng)
    return _renewal_symbols(seq, length, age, rng, tables)


def _binomial_estimate(favorable: int, n_hits: int, n_samples: int) -> Estimate:
    if n_hits == 0:
        return Estimate(math.nan, math.nan, n_samples, 0)
    value = favorable / n_hits
    se = math.sqrt(value * (1.0 - value) / n_hits)
    return Estimate(value, se, n_samples, n_hits)


def mc_conditional(
    seq: PSequence,
    i: int,
    j: int,
    n_paths: int,
    seed: int,
    tol: float = 1e-12,
) -> Estimate:
    """Estimate P(X = 0 | 1, i zeros left; j zeros, 1 right) by simulation.

    Scans ``n_paths`` disjoint stationary windows of width i + j + 3 and,
    among windows showing the bracketing pattern, counts zeros at the
    center.  Given the pattern, center symbols are independent, so the
    binomial error model on hits is honest.  Raises
    :class:`InsufficientHitsError` below 100 hits.
    """
    if i < 0 or j < 0:
        raise ValueError(f"distances must be >= 0, got ({i}, {j})")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    width = i + j + 3
    event_prob = _pattern_probability(seq, i, j)
    expected = n_paths * event_prob
    if expected < 10.0:
        warnings.warn(
            f"conditioning event has probability {event_prob:.2e}; "
            f"only {expected:.2f} hits expected from {n_paths} windows",
            RuntimeWarning,
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    sym = _stationary_array(seq, n_paths * width, rng, tol)
    win = sym.reshape(n_paths, width)
    mask = (win[:, 0] == 1) & (win[:, width - 1] == 1)
    if i > 0:
        mask &= (win[:, 1 : i + 1] == 0).all(axis=1)
    if j > 0:
        mask &= (win[:, i + 2 : i + j + 2] == 0).all(axis=1)
    hits = win[mask]
    n_hits = len(hits)
    if n_hits < MIN_HITS:
        raise InsufficientHitsError(n_hits, MIN_HITS, expected)
    zeros = int((hits[:, i + 1] == 0).sum())
    return _binomial_estimate(zeros, n_hits, n_paths)


def _pattern_probability(seq: PSequence, i: int, j: int) -> float:
    """Stationary probability of the two-sided conditioning pattern."""
    left, right = "1" + "0" * i, "0" * j + "1"
    p0 = cylinder_probability(seq, CylinderSpec(0, left + "0" + right), 1e-6)
    p1 = cylinder_probability(seq, CylinderSpec(0, left + "1" + right), 1e-6)
    return p0.value + p1.value


def mc_one_sided(seq: PSequence, age: int, n_paths: int, seed: int) -> Estimate:
    """Estimate P(X = 0 | 1 then ``age`` zeros to the left) by simulation.

    Same harvesting scheme as :func:`mc_conditional` with windows of width
    age + 2 and no constraint to the right of the center.
    """
    if age < 0:
        raise ValueError(f"age must be >= 0, got {age}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    width = age + 2
    rng = np.random.default_rng(seed)
    sym = _stationary_array(seq, n_paths * width, rng, 1e-12)
    win = sym.reshape(n_paths, width)
    mask = win[:, 0] == 1
    if age > 0:
        mask &= (win[:, 1 : age + 1] == 0).all(axis=1)
    hits = win[mask]
    n_hits = len(hits)
    if n_hits < MIN_HITS:
        raise InsufficientHitsError(n_hits, MIN_HITS)
    zeros = int((hits[:, age + 1] == 0).sum())
    return _binomial_estimate(zeros, n_hits, n_paths)


def pool_estimates(estimates: Sequence[Estimate]) -> Estimate:
    """Merge estimates from independent streams by count-addition."""
    if not estimates:
        raise ValueError("nothing to pool")
    n_hits = sum(e.n_hits for e in estimates)
    n_samples = sum(e.n_samples for e in estimates)
    favorable = sum(round(e.value * e.n_hits) for e in estimates if e.n_hits)
    return _binomial_estimate(favorable, n_hits, n_samples)
