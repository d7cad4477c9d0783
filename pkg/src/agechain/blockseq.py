"""Exact rational arithmetic for the block-structured alternating sequence.

The sequence is built from triangular blocks: block r (r = 1, 2, ...) covers
the r indices k with r(r-1)/2 <= k < r(r+1)/2, and every term inside block r
equals (-1)^r / r.  Terms shrink to zero while the running sum keeps swinging
across [-1, 0] forever: each odd block walks the sum from 0 down to -1, each
even block walks it back up to 0.

Everything in this module is computed in exact rational arithmetic
(:class:`fractions.Fraction`); no floating point is used anywhere.  All
functions are pure, so they are safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

__all__ = [
    "block_index",
    "term",
    "partial_sum",
    "window_sum",
    "SubseqPair",
    "find_subsequences",
    "ShiftSearchExhausted",
]

# Default shift-search bound, as a multiple of (window length + 1) squared.
SEARCH_CAP_FACTOR = 10

# Default first blocks for the two window families.  Chosen so that the
# conditional-probability demo downstream converges cleanly: by the tenth
# pair the kernel terms involved are all O(1/5000).
DEFAULT_START_BLOCK = {1: 25, 2: 26}
DEFAULT_GROWTH = 1.8


class ShiftSearchExhausted(RuntimeError):
    """No admissible shift was found below the search cap.

    This signals that the cap is too small, not that no shift exists; raise
    the cap and retry.
    """

    def __init__(self, window: int, cap: int, last_shift: int):
        self.window = window
        self.cap = cap
        self.last_shift = last_shift
        super().__init__(
            f"no admissible shift for window length {window} up to cap {cap} "
            f"(last shift examined: {last_shift}); the cap may be too small"
        )


def block_index(k: int) -> int:
    """Index r >= 1 of the triangular block containing position ``k``.

    Satisfies r(r-1)/2 <= k < r(r+1)/2.  Equivalently, r is the smallest
    integer with 1 + 2 + ... + r >= k + 1.
    """
    if k < 0:
        raise ValueError(f"position must be >= 0, got {k}")
    return (1 + math.isqrt(8 * k + 1)) // 2


def _tri(r: int) -> int:
    """Triangular number r(r+1)/2, the first position after block r."""
    return r * (r + 1) // 2


def term(k: int) -> Fraction:
    """The k-th term, (-1)^r / r with r = block_index(k).  Exact."""
    r = block_index(k)
    return Fraction(-1, r) if r % 2 else Fraction(1, r)


def partial_sum(i: int) -> Fraction:
    """Sum of the first ``i`` terms (positions 0 .. i-1), exactly.

    Closed form: complete blocks telescope to -1 or 0 depending on parity,
    and the partial block contributes a multiple of 1/r.  O(1) per call.
    """
    if i < 0:
        raise ValueError(f"prefix length must be >= 0, got {i}")
    if i == 0:
        return Fraction(0)
    r = block_index(i)
    steps_into_block = i - _tri(r - 1)
    at_boundary = Fraction(-1) if (r - 1) % 2 else Fraction(0)
    step = Fraction(-1, r) if r % 2 else Fraction(1, r)
    return at_boundary + steps_into_block * step


def window_sum(i: int, j: int) -> Fraction:
    """Exact sum of (term(k) - term(k + j)) over k = 0 .. i-1.

    Telescopes to S(i) - (S(i+j) - S(j)) with S = partial_sum.  The empty
    window (i = 0) and the zero shift (j = 0) both give 0.
    """
    if i < 0 or j < 0:
        raise ValueError(f"window length and shift must be >= 0, got ({i}, {j})")
    if i == 0 or j == 0:
        return Fraction(0)
    return partial_sum(i) - (partial_sum(i + j) - partial_sum(j))


@dataclass(frozen=True)
class SubseqPair:
    """One (window length, shift) pair from a discontinuity-demo family.

    ``window_sum`` is the exact value of sum_k (term(k) - term(k+j)) over the
    window: -1 for family 1 and 0 for family 2.  The shifted window alone
    always sums to 0.
    """

    family: int
    n: int
    i: int
    j: int
    window_sum: Fraction


def _sum_sign(k: int) -> int:
    """Sign of term(k): +1 in even blocks, -1 in odd blocks."""
    return 1 if block_index(k) % 2 == 0 else -1


def _shift_hits(i: int, j_start: int, j_cap: int) -> Iterator[int]:
    """Yield shifts j >= j_start, increasing, with S(i+j) == S(j) exactly.

    The running sum is piecewise linear in j (slope changes only when j or
    i+j crosses a block boundary), so each linear piece is solved in O(1)
    exact rational arithmetic instead of stepping one shift at a time.
    """
    j = j_start
    while j <= j_cap:
        r_lo = block_index(j)
        r_hi = block_index(i + j)
        piece_last = min(_tri(r_lo) - 1, _tri(r_hi) - 1 - i, j_cap)
        gap = partial_sum(i + j) - partial_sum(j)
        if gap == 0:
            yield j
            j += 1
            continue
        slope = term(i + j) - term(j)  # constant across the piece
        if slope != 0:
            steps = -gap / slope
            if steps.denominator == 1:
                t = int(steps)
                # j + t - 1 must stay inside the piece for the linear model
                # to hold for every increment consumed.
                if 1 <= t <= piece_last + 1 - j:
                    cand = j + t
                    if cand <= j_cap and partial_sum(i + cand) == partial_sum(cand):
                        yield cand
                        j = cand + 1
                        continue
        j = piece_last + 1


def _next_block(r: int, parity: int, growth: float) -> int:
    nxt = max(math.ceil(r * growth), r + 2)
    if nxt % 2 != parity:
        nxt += 1
    return nxt


def find_subsequences(
    family: int,
    count: int,
    search_cap: int | None = None,
    *,
    start_block: int | None = None,
    growth: float = DEFAULT_GROWTH,
) -> list[SubseqPair]:
    """Find ``count`` window/shift pairs whose sums hit exact targets.

    Family 1 takes windows ending at odd-block boundaries (the running sum
    there is exactly -1); family 2 at even-block boundaries (sum exactly 0).
    For each window length i the shift j is found by increasing search for
    an exact repeat of the running sum, S(i+j) == S(j), so that the shifted
    window sums to 0.  Consecutive window lengths grow geometrically and
    both coordinates increase strictly with n.

    Shifts are additionally required to start in an even block and to end in
    an even (family 1) or odd (family 2) block.  This pins the signs of the
    window's edge terms, which keeps the deviation of the downstream
    conditional probabilities decaying monotonely along the family.

    Raises :class:`ShiftSearchExhausted` when no admissible shift exists
    below the cap (default cap: SEARCH_CAP_FACTOR * (i+1)**2 per window).
    """
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if growth < 1.0:
        raise ValueError(f"growth must be >= 1, got {growth}")

    parity = 1 if family == 1 else 0
    end_sign = 1 if family == 1 else -1
    target = Fraction(-1) if family == 1 else Fraction(0)

    r = DEFAULT_START_BLOCK[family] if start_block is None else start_block
    if r < 1:
        raise ValueError(f"start_block must be >= 1, got {r}")
    if r % 2 != parity:
        r += 1

    pairs: list[SubseqPair] = []
    prev_j = 0
    for n in range(1, count + 1):
        i = _tri(r)
        j_start = max(prev_j + 1, i)
        cap = SEARCH_CAP_FACTOR * (i + 1) ** 2 if search_cap is None else search_cap
        found = None
        for j in _shift_hits(i, j_start, cap):
            if _sum_sign(j) > 0 and _sum_sign(i + j) == end_sign:
                found = j
                break
        if found is None:
            raise ShiftSearchExhausted(window=i, cap=cap, last_shift=max(j_start - 1, cap))
        w = window_sum(i, found)
        if w != target:
            raise AssertionError(f"window identity violated at (i={i}, j={found}): {w}")
        pairs.append(SubseqPair(family=family, n=n, i=i, j=found, window_sum=w))
        prev_j = found
        r = _next_block(r, parity, growth)
    return pairs
