from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agechain.blockseq import term
from agechain.kernel import (
    INF,
    ContextSummary,
    IndeterminateContextError,
    NoTailBoundError,
    OscillatingParams,
    ParameterError,
    PSequence,
    age_of,
    continuity_modulus,
    transition_prob,
    wait_of,
)


def direct_oscillating_prob(p_inf: float, xi: float, k: int) -> float:
    """Independent oracle: evaluate 1 - (1-p_inf) * xi**term(k) directly."""
    t = term(k)
    return 1.0 - (1.0 - p_inf) * xi ** (t.numerator / t.denominator)


valid_params = st.tuples(
    st.floats(min_value=0.05, max_value=0.95),
    st.floats(min_value=1e-6, max_value=1.0 - 1e-9),
).map(lambda t: (t[0], 1.0 + t[1] * ((1.0 - t[0]) ** -2 - 1.0)))


class TestOscillatingParams:
    def test_rejects_xi_at_upper_bound(self):
        with pytest.raises(ParameterError, match=r"xi < \(1 - p_inf\)\*\*-2"):
            OscillatingParams(0.5, 4.0)

    def test_rejects_xi_one(self):
        with pytest.raises(ParameterError):
            OscillatingParams(0.5, 1.0)

    def test_rejects_bad_p_inf(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ParameterError):
                OscillatingParams(bad, 1.5)

    @given(valid_params)
    @settings(max_examples=50)
    def test_accepts_valid_pairs(self, pair):
        p_inf, xi = pair
        params = OscillatingParams(p_inf, xi)
        assert 1.0 < params.xi < (1.0 - p_inf) ** -2


class TestPSequence:
    def test_oscillating_first_value(self, osc):
        # k = 0: term is -1, so p_0 = 1 - (1/2) * 2**-1 = 3/4
        assert osc.prob(0) == pytest.approx(0.75, abs=1e-15)
        assert direct_oscillating_prob(0.5, 2.0, 0) == 0.75

    def test_constant_everywhere(self, const03):
        for k in (0, 1, 17, 10**6):
            assert const03.prob(k) == 0.3
        assert const03.prob(INF) == 0.3

    def test_limit_value_at_infinite_age(self, osc):
        assert osc.prob(INF) == 0.5

    def test_rejects_negative_age(self, osc):
        with pytest.raises(ValueError):
            osc.prob(-1)

    def test_matches_direct_formula(self, osc):
        for k in range(2000):
            expected = direct_oscillating_prob(0.5, 2.0, k)
            assert osc.prob(k) == pytest.approx(expected, rel=1e-15)

    def test_prob_array_matches_scalar(self, osc):
        ks = np.concatenate([np.arange(0, 3000), [10**6, 10**9]])
        arr = osc.prob_array(ks)
        for k, p in zip(ks[::97], arr[::97]):
            assert p == pytest.approx(osc.prob(int(k)), rel=1e-15)

    def test_lower_bound_holds(self, osc):
        ks = np.arange(0, 10**4)
        ps = osc.prob_array(ks)
        assert float(ps.min()) >= osc.eps
        assert osc.prob(INF) >= osc.eps
        # the bound is attained inside the second block where the term is 1/2
        assert osc.eps == pytest.approx(1.0 - 0.5 * math.sqrt(2.0), rel=1e-12)

    def test_custom_tail_family(self):
        seq = PSequence.custom_tail([0.9, 0.1, 0.5], p_inf=0.4)
        assert [seq.prob(k) for k in range(5)] == [0.9, 0.1, 0.5, 0.4, 0.4]
        assert seq.prob(INF) == 0.4
        assert seq.eps == 0.1

    def test_custom_tail_validation(self):
        with pytest.raises(ParameterError):
            PSequence.custom_tail([0.5, 1.2], p_inf=0.4)

    def test_from_config_round_trips(self):
        seq = PSequence.from_config({"family": "oscillating", "p_inf": 0.5, "xi": 2.0})
        assert seq.family == "oscillating" and seq.prob(0) == pytest.approx(0.75)
        seq = PSequence.from_config({"family": "constant", "p": 0.3})
        assert seq.prob(5) == 0.3
        seq = PSequence.from_config(
            {"family": "custom", "custom_head": [0.2], "p_inf": 0.6}
        )
        assert seq.prob(0) == 0.2 and seq.prob(1) == 0.6

    def test_from_config_names_the_violation(self):
        with pytest.raises(ParameterError, match="requires"):
            PSequence.from_config({"family": "oscillating", "p_inf": 0.5})
        with pytest.raises(ParameterError):
            PSequence.from_config({"family": "nope"})

    @given(valid_params, st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=80)
    def test_values_stay_in_open_interval(self, pair, k):
        seq = PSequence.oscillating(*pair)
        assert 0.0 < seq.prob(k) < 1.0


class TestContexts:
    def test_age_examples(self):
        assert age_of([0, 1]) == 0
        assert age_of([1, 0, 0]) == 2
        assert age_of("100") == 2
        assert age_of([0, 0, 0], beyond="zeros") == INF
        assert age_of([0, 0, 0], beyond="one") == 3

    def test_wait_examples(self):
        assert wait_of([1, 0]) == 0
        assert wait_of([0, 0, 0, 1]) == 3
        assert wait_of("0001") == 3
        assert wait_of([0, 0], beyond="zeros") == INF
        assert wait_of([0, 0], beyond="one") == 2

    def test_indeterminate_context(self):
        with pytest.raises(IndeterminateContextError):
            age_of([0, 0, 0])
        with pytest.raises(IndeterminateContextError):
            wait_of([0, 0])

    def test_bad_symbols_rejected(self):
        with pytest.raises(ValueError):
            age_of([0, 2])
        with pytest.raises(ValueError):
            age_of([0], beyond="maybe")

    def test_summary_from_windows(self):
        cs = ContextSummary.from_windows([1, 0], [0, 0, 1])
        assert cs == ContextSummary(age=1, wait=2)


class TestTransitionProb:
    @given(st.integers(min_value=0, max_value=500))
    @settings(max_examples=60)
    def test_normalization(self, age):
        seq = PSequence.oscillating(0.5, 2.0)
        total = transition_prob(seq, 0, age) + transition_prob(seq, 1, age)
        assert abs(total - 1.0) <= math.ulp(1.0)

    def test_constant_family(self, const03):
        assert transition_prob(const03, 1, 12) == 0.3
        assert transition_prob(const03, 0, 12) == 0.7

    def test_oscillating_at_age_zero(self, osc):
        assert transition_prob(osc, 1, 0) == pytest.approx(0.75, abs=1e-15)

    def test_strong_non_nullness(self, osc):
        for age in [*range(200), INF]:
            assert transition_prob(osc, 1, age) >= osc.eps
            assert transition_prob(osc, 0, age) >= (1.0 - osc.p_inf) / 2.0

    def test_rejects_bad_symbol(self, osc):
        with pytest.raises(ValueError):
            transition_prob(osc, 2, 0)


class TestContinuityModulus:
    def test_constant_is_flat(self, const03):
        assert continuity_modulus(const03, 0, 50) == (0.0, 0.0)

    def test_lower_below_upper(self, osc):
        for k in (0, 3, 50, 500):
            lower, upper = continuity_modulus(osc, k, k + 2000)
            assert lower <= upper

    def test_lower_sees_first_two_terms(self, osc):
        lower, _ = continuity_modulus(osc, 0, 10)
        assert lower >= abs(osc.prob(0) - osc.prob(1)) - 1e-15

    def test_upper_nonincreasing_at_fixed_offset(self, osc):
        offset = 1500
        uppers = [continuity_modulus(osc, k, k + offset)[1] for k in range(0, 60, 7)]
        assert all(b <= a + 1e-15 for a, b in zip(uppers, uppers[1:]))

    def test_upper_shrinks_toward_zero(self, osc):
        _, far = continuity_modulus(osc, 20000, 40000)
        _, near = continuity_modulus(osc, 10, 40000)
        assert far < 0.02 < near

    def test_custom_tail_is_exact_beyond_head(self):
        seq = PSequence.custom_tail([0.9, 0.1], p_inf=0.4)
        lower, upper = continuity_modulus(seq, 2, 10)
        assert lower == upper == 0.0

    def test_no_tail_bound_error(self):
        class Bare:
            p_inf = 0.5

            def prob_array(self, ks):
                return np.full(len(ks), 0.5)

        with pytest.raises(NoTailBoundError):
            continuity_modulus(Bare(), 0, 5)

    def test_rejects_horizon_before_k(self, osc):
        with pytest.raises(ValueError):
            continuity_modulus(osc, 10, 5)
