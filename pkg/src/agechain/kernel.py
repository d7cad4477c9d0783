"""Transition kernels driven by the age of the current zero-run.

The chain emits symbols in {0, 1}.  The probability of emitting a 1 depends
on the past only through the *age*: the number of consecutive 0's since the
most recent 1.  A probability sequence assigns p_k to age k, with a declared
limit p_inf for the infinitely-old (all-zero) past and a positive lower
bound, so the kernel is continuous and strongly non-null.

Three families are provided:

* ``oscillating`` -- p_k = 1 - (1 - p_inf) * xi**term(k), with term(k) the
  exact rational from :mod:`agechain.blockseq`.  The parameters must satisfy
  1 < xi < (1 - p_inf)**-2 so that every p_k lies in (0, 1).
* ``constant`` -- p_k = p for all k (an i.i.d. Bernoulli chain).
* ``custom`` -- arbitrary head values for k < len(head), then exactly p_inf.
  Exists mainly as a test fixture with trivially exact tail bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .blockseq import block_index, term

__all__ = [
    "ParameterError",
    "IndeterminateContextError",
    "NoTailBoundError",
    "OscillatingParams",
    "PSequence",
    "ContextSummary",
    "age_of",
    "wait_of",
    "transition_prob",
    "continuity_modulus",
]

INF = math.inf

# Horizon used when measuring the numeric lower bound of an oscillating
# sequence.  Covers every block up to index ~60, in particular the block
# holding the largest term, where the sequence attains its minimum.
_EPS_SCAN_HORIZON = 2000


class ParameterError(ValueError):
    """A kernel parameter violates its declared constraint."""


class IndeterminateContextError(ValueError):
    """A context window is all zeros and the unseen remainder is unspecified."""


class NoTailBoundError(ValueError):
    """The probability sequence declares no tail envelope."""


@dataclass(frozen=True)
class OscillatingParams:
    """Parameter pair (p_inf, xi) of the oscillating family.

    Constraints: 0 < p_inf < 1 and 1 < xi < (1 - p_inf)**-2.  The upper
    bound on xi is exactly what keeps every p_k inside (0, 1), since the
    largest exponent ever taken is 1/2.
    """

    p_inf: float
    xi: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p_inf < 1.0):
            raise ParameterError(f"requires 0 < p_inf < 1, got p_inf={self.p_inf}")
        bound = (1.0 - self.p_inf) ** -2
        if not (1.0 < self.xi < bound):
            raise ParameterError(
                f"requires 1 < xi < (1 - p_inf)**-2 = {bound!r}, got xi={self.xi}"
            )


class PSequence:
    """A probability sequence p_k with declared limit and lower bound.

    Instances are immutable after construction; all methods are pure and
    safe for concurrent use.  Build one with :meth:`oscillating`,
    :meth:`constant`, :meth:`custom_tail` or :meth:`from_config`.
    """

    def __init__(
        self,
        family: str,
        p_inf: float,
        *,
        params: OscillatingParams | None = None,
        head: tuple[float, ...] = (),
    ):
        self.family = family
        self.p_inf = p_inf
        self.params = params
        self.head = head
        if params is not None:
            self._ln_xi = math.log(params.xi)
        self.eps = self._lower_bound()

    # -- constructors ------------------------------------------------------

    @classmethod
    def oscillating(cls, p_inf: float, xi: float) -> "PSequence":
        params = OscillatingParams(p_inf, xi)
        return cls("oscillating", p_inf, params=params)

    @classmethod
    def constant(cls, p: float) -> "PSequence":
        if not (0.0 < p < 1.0):
            raise ParameterError(f"requires 0 < p < 1, got p={p}")
        return cls("constant", p)

    @classmethod
    def custom_tail(cls, head: Iterable[float], p_inf: float) -> "PSequence":
        head = tuple(float(x) for x in head)
        if not (0.0 < p_inf < 1.0):
            raise ParameterError(f"requires 0 < p_inf < 1, got p_inf={p_inf}")
        for k, x in enumerate(head):
            if not (0.0 < x < 1.0):
                raise ParameterError(f"requires 0 < p_k < 1, got p_{k}={x}")
        return cls("custom", p_inf, head=head)

    @classmethod
    def from_config(cls, config: dict) -> "PSequence":
        """Build from a record {family, p_inf?, xi?, p?, custom_head?}."""
        family = config.get("family", "oscillating")
        if family == "oscillating":
            missing = [k for k in ("p_inf", "xi") if config.get(k) is None]
            if missing:
                raise ParameterError(f"oscillating family requires {missing}")
            return cls.oscillating(float(config["p_inf"]), float(config["xi"]))
        if family == "constant":
            p = config.get("p", config.get("p_inf"))
            if p is None:
                raise ParameterError("constant family requires p")
            return cls.constant(float(p))
        if family == "custom":
            head = config.get("custom_head")
            if head is None or config.get("p_inf") is None:
                raise ParameterError("custom family requires custom_head and p_inf")
            return cls.custom_tail(head, float(config["p_inf"]))
        raise ParameterError(
            f"family must be one of oscillating|constant|custom, got {family!r}"
        )

    # -- evaluation --------------------------------------------------------

    def prob(self, k: int | float) -> float:
        """p_k for an age k >= 0; ``math.inf`` returns the limit p_inf."""
        if isinstance(k, float) and math.isinf(k):
            return self.p_inf
        k = int(k)
        if k < 0:
            raise ValueError(f"age must be >= 0, got {k}")
        if self.family == "constant":
            return self.p_inf
        if self.family == "custom":
            return self.head[k] if k < len(self.head) else self.p_inf
        t = term(k)
        return 1.0 - (1.0 - self.p_inf) * math.exp(
            self._ln_xi * (t.numerator / t.denominator)
        )

    def prob_array(self, ks: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`prob` over an integer array of ages."""
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size and ks.min() < 0:
            raise ValueError("ages must be >= 0")
        if self.family == "constant":
            return np.full(ks.shape, self.p_inf)
        if self.family == "custom":
            out = np.full(ks.shape, self.p_inf)
            if self.head:
                mask = ks < len(self.head)
                out[mask] = np.asarray(self.head)[ks[mask]]
            return out
        r = ((1.0 + np.sqrt(8.0 * ks.astype(np.float64) + 1.0)) // 2).astype(np.int64)
        # repair float-sqrt off-by-one at block boundaries
        r -= (r * (r - 1)) // 2 > ks
        r += (r * (r + 1)) // 2 <= ks
        sign = np.where(r % 2 == 0, 1.0, -1.0)
        return 1.0 - (1.0 - self.p_inf) * np.exp(self._ln_xi * sign / r)

    def tail_spread(self, horizon: int) -> float:
        """Certified bound on sup over t > horizon of ``|p_t - p_inf|``.

        For the oscillating family the exponents beyond the horizon are at
        most 1/r in magnitude, with r the block index there, so the spread
        is (1 - p_inf) * max(xi**(1/r) - 1, 1 - xi**(-1/r)).
        """
        if self.family == "constant":
            return 0.0
        if self.family == "custom":
            if horizon + 1 >= len(self.head):
                return 0.0
            return max(abs(p - self.p_inf) for p in self.head[horizon + 1 :])
        r = block_index(horizon)
        up = math.exp(self._ln_xi / r) - 1.0
        down = 1.0 - math.exp(-self._ln_xi / r)
        return (1.0 - self.p_inf) * max(up, down)

    def _lower_bound(self) -> float:
        if self.family == "constant":
            return self.p_inf
        if self.family == "custom":
            return min((*self.head, self.p_inf))
        scan = float(self.prob_array(np.arange(_EPS_SCAN_HORIZON)).min())
        beyond = self.p_inf - self.tail_spread(_EPS_SCAN_HORIZON)
        return min(scan, beyond)

    def __repr__(self) -> str:
        if self.family == "oscillating":
            return f"PSequence.oscillating(p_inf={self.p_inf}, xi={self.params.xi})"
        if self.family == "constant":
            return f"PSequence.constant({self.p_inf})"
        return f"PSequence.custom_tail({list(self.head)}, p_inf={self.p_inf})"


# -- context extraction ------------------------------------------------------


def age_of(past: Sequence[int] | str, beyond: str = "unknown") -> int | float:
    """Zeros at the end of ``past`` before its last 1, scanning backward.

    ``past`` lists symbols in chronological order, so ``past[-1]`` is the
    most recent one.  ``beyond`` states what the unseen remainder left of
    the window holds: "one" (a 1 immediately beyond), "zeros" (all zeros,
    giving an infinite age when the window itself is all zeros), or
    "unknown".  A window with no 1 and an unknown remainder is an error.
    """
    return _zero_run(list(reversed([int(s) for s in past])), beyond, "past")


def wait_of(future: Sequence[int] | str, beyond: str = "unknown") -> int | float:
    """Zeros at the start of ``future`` before its first 1.

    Mirror of :func:`age_of`; ``future[0]`` is the symbol right after the
    site in question.
    """
    return _zero_run([int(s) for s in future], beyond, "future")


def _zero_run(window: list[int], beyond: str, side: str) -> int | float:
    if beyond not in ("one", "zeros", "unknown"):
        raise ValueError(f"beyond must be one|zeros|unknown, got {beyond!r}")
    if any(s not in (0, 1) for s in window):
        raise ValueError("symbols must be 0 or 1")
    for n, s in enumerate(window):
        if s == 1:
            return n
    if beyond == "one":
        return len(window)
    if beyond == "zeros":
        return INF
    raise IndeterminateContextError(
        f"{side} window is all zeros and the remainder is unspecified"
    )


@dataclass(frozen=True)
class ContextSummary:
    """Sufficient statistic of a two-sided context: backward and forward
    distances to the nearest 1 (each an int >= 0 or ``math.inf``)."""

    age: int | float
    wait: int | float

    @classmethod
    def from_windows(
        cls,
        past: Sequence[int] | str,
        future: Sequence[int] | str,
        past_beyond: str = "unknown",
        future_beyond: str = "unknown",
    ) -> "ContextSummary":
        return cls(age_of(past, past_beyond), wait_of(future, future_beyond))


# -- the kernel and its continuity diagnostic --------------------------------


def transition_prob(seq: PSequence, symbol: int, age: int | float) -> float:
    """P(next symbol | age of the current zero-run).

    Emitting 1 has probability p_age; emitting 0 the complement.  The two
    values sum to 1 exactly.
    """
    if symbol not in (0, 1):
        raise ValueError(f"symbol must be 0 or 1, got {symbol}")
    p = seq.prob(age)
    return p if symbol == 1 else 1.0 - p


def continuity_modulus(
    seq: PSequence, k: int, horizon: int
) -> tuple[float, float]:
    """Bracket sup over l, m >= k of ``|p_l - p_m|``.

    ``lower`` scans ages in [k, horizon] exactly; ``upper`` widens the scan
    by the certified tail envelope beyond the horizon, so
    lower <= true sup <= upper.  Raises :class:`NoTailBoundError` when the
    sequence has no tail envelope.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if horizon < k:
        raise ValueError(f"horizon must be >= k, got {horizon} < {k}")
    spread_fn = getattr(seq, "tail_spread", None)
    spread = spread_fn(horizon) if spread_fn is not None else None
    if spread is None:
        raise NoTailBoundError(f"no tail bound declared by {seq!r}")
    ps = seq.prob_array(np.arange(k, horizon + 1))
    hi, lo = float(ps.max()), float(ps.min())
    lower = hi - lo
    upper = max(hi, seq.p_inf + spread) - min(lo, seq.p_inf - spread)
    return lower, upper
