"""Closed-form conditionals and a certified renewal oracle.

The stationary chain regenerates at every 1: gaps between consecutive 1's
are independent, and the chance that a gap holds exactly i zeros is
q_i = p_i * prod_{k<i}(1 - p_k).  Because every p_k >= eps > 0, survival
products decay geometrically, which gives certified truncation for every
infinite series in this module: results that depend on a truncated series
are returned as :class:`Certified` values carrying an error bound, and
successive refinements (smaller tolerances) always stay inside earlier
certified intervals.

Two independent routes compute the central two-sided conditional
P(X = 0 | 1 then i zeros on the left, j zeros then 1 on the right):

* :func:`two_sided_conditional` evaluates the closed ratio form with a
  telescoped product of kernel complements (bounded, no underflow);
* :func:`conditional_from_cylinders` builds it from certified cylinder
  probabilities of the renewal decomposition, knowing nothing about the
  ratio form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .blockseq import term, window_sum
from .kernel import OscillatingParams, PSequence

__all__ = [
    "Certified",
    "CertificateError",
    "CylinderSpec",
    "GapDistribution",
    "two_sided_conditional",
    "two_sided_conditional_closed",
    "prefactor",
    "limit_value",
    "one_sided_conditional",
    "gap_distribution",
    "marginal_one",
    "age_distribution",
    "cylinder_probability",
    "conditional_from_cylinders",
]

DEFAULT_TOL = 1e-12

# Multiplier on n * machine epsilon covering accumulated rounding in the
# certified series sums (the geometric-tail certificates cover truncation
# only).
_ROUNDOFF_PAD = 8.0 * 2.0**-53


class CertificateError(RuntimeError):
    """A certified bound failed (for example a denominator's lower bound
    was not positive at the requested tolerance)."""


class Certified(NamedTuple):
    """A value with a certified absolute error bound."""

    value: float
    error: float


@dataclass(frozen=True)
class CylinderSpec:
    """A finite window of fixed symbols on consecutive sites.

    ``offset`` is the leftmost site; by stationarity it never affects the
    probability but is kept for bookkeeping.
    """

    offset: int
    word: str

    def __post_init__(self) -> None:
        if not self.word:
            raise ValueError("cylinder word must be nonempty")
        if set(self.word) - {"0", "1"}:
            raise ValueError(f"cylinder word must be over 0/1, got {self.word!r}")


# -- conditionals ------------------------------------------------------------


def two_sided_conditional(seq: PSequence, i: int, j: int) -> float:
    """P(X = 0 | 1 and i zeros to the left, j zeros and 1 to the right).

    Valid for any window sizes beyond the bracketing 1's: the value depends
    on the context only through (i, j).  Computed as a / (a + b) with

        a = (1 - p_{i+j}) p_{i+j+1} * prod_{k<min} (1-p_{k+max})/(1-p_k)
        b = p_i p_j

    The product telescopes the full ratio form, stays within a bounded
    range for every family here, and is symmetric in (i, j) by
    construction, bit for bit.
    """
    if i < 0 or j < 0:
        raise ValueError(f"distances must be >= 0, got ({i}, {j})")
    lo, hi = (i, j) if i <= j else (j, i)
    t = 1.0
    for k in range(lo):
        t *= (1.0 - seq.prob(k + hi)) / (1.0 - seq.prob(k))
    a = (1.0 - seq.prob(i + j)) * seq.prob(i + j + 1) * t
    b = seq.prob(i) * seq.prob(j)
    return a / (a + b)


def two_sided_conditional_closed(params: OscillatingParams, i: int, j: int) -> float:
    """Same conditional for the oscillating family, via the exact exponent.

    The telescoped product equals xi raised to the exact rational
    window_sum(i, j), imported from :mod:`agechain.blockseq` and
    exponentiated once; nothing is accumulated in floating point.
    """
    if i < 0 or j < 0:
        raise ValueError(f"distances must be >= 0, got ({i}, {j})")
    w = window_sum(i, j)
    swing = math.exp(math.log(params.xi) * (w.numerator / w.denominator))
    return 1.0 / (1.0 + prefactor(params, i, j) * swing)


def _osc_prob(params: OscillatingParams, k: int) -> float:
    t = term(k)
    return 1.0 - (1.0 - params.p_inf) * math.exp(
        math.log(params.xi) * (t.numerator / t.denominator)
    )


def prefactor(params: OscillatingParams, i: int, j: int) -> float:
    """The boundary factor p_i p_j / ((1 - p_{i+j}) p_{i+j+1}).

    Converges to p_inf / (1 - p_inf) as i, j grow, since all four kernel
    terms approach their limit.
    """
    num = _osc_prob(params, i) * _osc_prob(params, j)
    den = (1.0 - _osc_prob(params, i + j)) * _osc_prob(params, i + j + 1)
    return num / den


def limit_value(params: OscillatingParams, family: int) -> float:
    """Limit of the two-sided conditional along the two window families.

    Family 1 (window sums locked at -1): (1-p_inf) xi / ((1-p_inf) xi + p_inf).
    Family 2 (window sums locked at 0): 1 - p_inf.  The two differ whenever
    xi > 1, which is the whole point: no single two-sided limit exists.
    """
    q = 1.0 - params.p_inf
    if family == 1:
        return q * params.xi / (q * params.xi + params.p_inf)
    if family == 2:
        return q
    raise ValueError(f"family must be 1 or 2, got {family}")


def one_sided_conditional(seq: PSequence, age: int | float) -> float:
    """P(X = 0 | age of the zero-run to the left), i.e. 1 - p_age."""
    return 1.0 - seq.prob(age)


# -- renewal quantities ------------------------------------------------------


@dataclass(frozen=True)
class GapDistribution:
    """Law of the number of zeros between consecutive 1's."""

    seq: PSequence

    def prob(self, g: int) -> float:
        """q_g = p_g * prod_{k<g}(1 - p_k)."""
        if g < 0:
            raise ValueError(f"gap must be >= 0, got {g}")
        a = 1.0
        for k in range(g):
            a *= 1.0 - self.seq.prob(k)
        return a * self.seq.prob(g)

    def tail_bound(self, g: int) -> float:
        """Certified geometric bound: q_g <= (1 - eps)**g."""
        return (1.0 - self.seq.eps) ** g


def gap_distribution(seq: PSequence) -> GapDistribution:
    return GapDistribution(seq)


def marginal_one(seq: PSequence, tol: float = DEFAULT_TOL) -> Certified:
    """Stationary probability of a 1 at a site: 1 / sum_i prod_{k<i}(1-p_k).

    The survival series is truncated once its geometric tail bound brings
    the certified interval under ``tol``; the returned error is that
    interval's half-width plus a rounding allowance.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    eps = seq.eps
    total = 0.0
    survival = 1.0
    n = 0
    while True:
        total += survival
        survival *= 1.0 - seq.prob(n)
        n += 1
        tail = survival / eps  # sum of all remaining survival terms
        lo, hi = 1.0 / (total + tail), 1.0 / total
        if hi - lo <= 2.0 * tol and n >= 4:
            mid = 0.5 * (lo + hi)
            return Certified(mid, 0.5 * (hi - lo) + _ROUNDOFF_PAD * n * mid)


def age_distribution(seq: PSequence, i: int, tol: float = DEFAULT_TOL) -> float:
    """Stationary P(age at a site = i): marginal_one * prod_{k<i}(1 - p_k).

    Nonnegative and summing to 1 over i, up to the tolerance of the
    embedded marginal.
    """
    if i < 0:
        raise ValueError(f"age must be >= 0, got {i}")
    m = marginal_one(seq, tol).value
    survival = 1.0
    for k in range(i):
        survival *= 1.0 - seq.prob(k)
    return m * survival


def _window_factor(seq: PSequence, word: str, start_age: int) -> float:
    """Probability of emitting ``word`` when the run age enters at
    ``start_age``."""
    f = 1.0
    age = start_age
    for ch in word:
        p = seq.prob(age)
        if ch == "1":
            f *= p
            age = 0
        else:
            f *= 1.0 - p
            age += 1
    return f


def cylinder_probability(
    seq: PSequence, cyl: CylinderSpec, tol: float = DEFAULT_TOL
) -> Certified:
    """Certified stationary probability of a cylinder.

    Decomposes over the age at the leftmost site:
    sum_a P(age = a) * P(word | entry age a), with the age series truncated
    under its geometric tail bound.  The certified interval endpoints are
    monotone in the truncation depth, so refining the tolerance always
    yields a value inside every earlier interval.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    eps = seq.eps
    weights = 0.0  # running sum of survival terms a_a
    weighted = 0.0  # running sum of a_a * P(word | age a)
    survival = 1.0
    a = 0
    while True:
        weighted += survival * _window_factor(seq, cyl.word, a)
        weights += survival
        survival *= 1.0 - seq.prob(a)
        a += 1
        tail = survival / eps
        lo = weighted / (weights + tail)
        hi = (weighted + tail) / weights
        if hi - lo <= 2.0 * tol and a >= 4:
            mid = 0.5 * (lo + hi)
            pad = _ROUNDOFF_PAD * a * (len(cyl.word) + 2) * max(mid, 1e-300)
            return Certified(mid, 0.5 * (hi - lo) + pad)


def conditional_from_cylinders(
    seq: PSequence,
    left_word: str,
    right_word: str,
    tol: float = DEFAULT_TOL,
) -> Certified:
    """P(X = 0 | left_word to the left, right_word to the right), from
    certified cylinder probabilities only.

    This is the independent oracle for :func:`two_sided_conditional`: the
    two cylinders (with 0 and with 1 inserted between the words) are summed
    over the renewal age decomposition and combined as a ratio with interval
    propagation.  Cylinder tolerances are refined until the propagated
    half-width drops under ``tol``; the certified result is returned with
    that propagated error.
    """
    for w in (left_word, right_word):
        if set(w) - {"0", "1"}:
            raise ValueError(f"window words must be over 0/1, got {w!r}")
    word0 = left_word + "0" + right_word
    word1 = left_word + "1" + right_word
    inner = tol
    for _ in range(12):
        p0 = cylinder_probability(seq, CylinderSpec(0, word0), inner)
        p1 = cylinder_probability(seq, CylinderSpec(0, word1), inner)
        den_lo = (p0.value - p0.error) + (p1.value - p1.error)
        if den_lo <= 0.0:
            if inner > 1e-280:
                inner *= 1e-6
                continue
            raise CertificateError(
                "denominator's certified lower bound is not positive "
                f"(p0={p0}, p1={p1})"
            )
        lo = (p0.value - p0.error) / ((p0.value - p0.error) + (p1.value + p1.error))
        hi = (p0.value + p0.error) / ((p0.value + p0.error) + (p1.value - p1.error))
        if hi - lo <= 2.0 * tol:
            return Certified(0.5 * (lo + hi), 0.5 * (hi - lo))
        # shrink cylinder tolerance to the scale the ratio needs
        inner = max(1e-300, min(inner * 1e-3, 0.2 * tol * (p0.value + p1.value)))
    raise CertificateError(f"could not certify the ratio at tol={tol}")
