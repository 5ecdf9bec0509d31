import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from weightedl1 import theory
from weightedl1.theory import (BoundConstants, TheoryDomainError, TheoryParams,
                               b_constant, bound_constants, delta_threshold,
                               error_bound, gamma_constant, k_n, optimize_weights,
                               proposition_ordering, rip_condition_holds)


def params(w, r, al, a=3.0):
    return TheoryParams(weights=tuple(w), rhos=tuple(r), alphas=tuple(al), a=a)


class TestBConstant:
    def test_full_weight_kills_second_term(self):
        assert b_constant(1.0, 0.7, 0.3) == 1.0

    def test_perfect_prior_zero_weight(self):
        assert b_constant(0.0, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_half_weight_unit_radicand(self):
        # radicand 1 + 1 - 2*0.5*1 = 1
        assert b_constant(0.5, 1.0, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_negative_radicand_rejected(self):
        with pytest.raises(TheoryDomainError):
            b_constant(0.0, 3.0, 1.0)

    def test_out_of_range_weight_rejected(self):
        with pytest.raises(TheoryDomainError):
            b_constant(1.2, 0.5, 0.5)


class TestKN:
    def test_paper_two_set_example(self):
        value = k_n(params((1.0, 0.0), (0.5, 0.5), (0.1, 0.9)))
        assert value == pytest.approx(math.sqrt(0.6), abs=1e-12)
        # the source rounds sqrt(0.6)=0.7746 to 0.78
        assert abs(value - 0.78) < 6e-3

    def test_all_unit_weights(self):
        assert k_n(params((1.0,) * 3, (0.4, 0.3, 0.2), (0.9, 0.5, 0.1))) == 1.0

    def test_single_set_reduces_to_b(self):
        for w, r, al in [(0.3, 0.8, 0.6), (0.0, 1.0, 1.0), (1.0, 0.5, 0.2)]:
            assert k_n(params((w,), (r,), (al,))) == pytest.approx(
                b_constant(w, r, al), abs=1e-15)

    @given(w=st.floats(0, 1), rho1=st.floats(0, 0.45), rho2=st.floats(0, 0.45),
           alpha=st.floats(0, 1))
    def test_equal_weights_merge_to_single_b(self, w, rho1, rho2, alpha):
        value = k_n(params((w, w), (rho1, rho2), (alpha, alpha)))
        assert value == pytest.approx(b_constant(w, rho1 + rho2, alpha), abs=1e-12)

    @given(w=st.lists(st.floats(0, 1), min_size=2, max_size=4),
           rhos=st.lists(st.floats(0, 0.5), min_size=4, max_size=4),
           alphas=st.lists(st.floats(0.5, 1), min_size=4, max_size=4))
    def test_equal_weights_weighted_average_alpha(self, w, rhos, alphas):
        # with one shared weight, only sum(rho) and sum(alpha*rho) matter
        weight = w[0]
        p = params((weight,) * 4, rhos, alphas)
        total_rho = sum(rhos)
        if total_rho == 0:
            avg = 0.0
        else:
            avg = sum(a * r for a, r in zip(alphas, rhos)) / total_rho
        assert k_n(p) == pytest.approx(b_constant(weight, total_rho, avg), abs=1e-12)

    def test_merging_adjacent_equal_weights(self):
        # K3 with w2 == w3 equals K2 on merged sets
        k3 = k_n(params((0.8, 0.3, 0.3), (0.3, 0.2, 0.4), (1.0, 0.9, 0.7)))
        merged_alpha = (0.9 * 0.2 + 0.7 * 0.4) / 0.6
        k2 = k_n(params((0.8, 0.3), (0.3, 0.6), (1.0, merged_alpha)))
        assert k3 == pytest.approx(k2, abs=1e-12)
        # and with w1 == w2
        k3 = k_n(params((0.8, 0.8, 0.3), (0.3, 0.2, 0.4), (1.0, 0.9, 0.7)))
        merged_alpha = (1.0 * 0.3 + 0.9 * 0.2) / 0.5
        k2 = k_n(params((0.8, 0.3), (0.5, 0.4), (merged_alpha, 0.7)))
        assert k3 == pytest.approx(k2, abs=1e-12)

    def test_unordered_input_sorted_internally(self):
        p = params((0.2, 0.9), (0.5, 0.3), (0.1, 1.0))
        assert p.weights == (0.9, 0.2)
        assert p.rhos == (0.3, 0.5)
        assert p.alphas == (1.0, 0.1)


class TestGamma:
    def test_single_set_equals_b(self):
        for w, r, al in [(0.4, 0.9, 0.3), (0.0, 1.0, 1.0)]:
            assert gamma_constant(params((w,), (r,), (al,))) == pytest.approx(
                b_constant(w, r, al), abs=1e-15)

    def test_all_unit_weights(self):
        assert gamma_constant(params((1.0, 1.0), (0.5, 0.5), (0.2, 0.8))) == 1.0

    def test_hand_substitution(self):
        # sum w - (N-1) + sum (1-w_i) sqrt(1 + rho_i - 2 rho_i)
        value = gamma_constant(params((0.5, 0.5), (0.5, 0.5), (1.0, 1.0)))
        expected = 1.0 - 1.0 + 0.5 * math.sqrt(0.5) + 0.5 * math.sqrt(0.5)
        assert value == pytest.approx(expected, abs=1e-15)

    def test_can_go_negative(self):
        value = gamma_constant(params((0.0,) * 4, (1.0,) * 4, (1.0,) * 4, a=4.0))
        assert value < 0


class TestDeltaThreshold:
    @pytest.mark.parametrize("c,a,expected", [(1.0, 3.0, 0.5), (0.0, 3.0, 1.0),
                                              (math.sqrt(3.0), 3.0, 0.0)])
    def test_known_values(self, c, a, expected):
        assert delta_threshold(c, a) == pytest.approx(expected, abs=1e-15)

    @given(a=st.floats(1.001, 10), c1=st.floats(0, 3), c2=st.floats(0, 3))
    def test_strictly_decreasing_in_constant(self, a, c1, c2):
        lo, hi = sorted((c1, c2))
        if hi - lo > 1e-9:
            assert delta_threshold(hi, a) < delta_threshold(lo, a)


class TestRipCondition:
    def test_zero_deltas_hold(self):
        assert rip_condition_holds(0.0, 0.0, 1.0, 3.0)

    def test_large_deltas_fail(self):
        assert not rip_condition_holds(0.9, 0.95, 1.0, 3.0)

    def test_unweighted_classical_boundary(self):
        # kn = 1, a = 3 requires delta_3s + 3 delta_4s < 2
        assert rip_condition_holds(0.49, 0.5, 1.0, 3.0)
        assert not rip_condition_holds(0.5, 0.5, 1.0, 3.0)

    def test_zero_kn_vacuous(self):
        assert rip_condition_holds(0.99, 0.999, 0.0, 3.0)
        assert not rip_condition_holds(0.0, 1.0, 0.0, 3.0)


class TestBoundConstants:
    def test_direct_substitution(self):
        p = params((1.0,), (0.5,), (0.5,))  # k_n = 1
        consts = bound_constants(p, 0.0, 0.0)
        r3 = 1.0 / math.sqrt(3.0)
        assert consts.c0 == pytest.approx(2 * (1 + r3) / (1 - r3), abs=1e-12)
        assert consts.c1 == pytest.approx((2 / math.sqrt(3.0)) * 2 / (1 - r3), abs=1e-12)

    def test_matches_single_weight_constants(self):
        # with one set, the constants coincide with the single-weight display
        w, rho, alpha = 0.4, 0.8, 0.9
        p = params((w,), (rho,), (alpha,))
        b = b_constant(w, rho, alpha)
        das, da1s = 0.1, 0.2
        consts = bound_constants(p, das, da1s)
        denom = math.sqrt(1 - da1s) - (b / math.sqrt(3)) * math.sqrt(1 + das)
        assert consts.c0 == pytest.approx(2 * (1 + b / math.sqrt(3)) / denom, abs=1e-12)

    def test_boundary_denominator_rejected(self):
        # k_n = sqrt(a) makes the zero-delta denominator vanish
        p = params((0.0,), (2.0,), (0.0,))  # b = sqrt(3)
        with pytest.raises(TheoryDomainError):
            bound_constants(p, 0.0, 0.0)


class TestErrorBound:
    def test_exact_recovery_regime(self):
        p = params((0.5, 0.25), (0.5, 0.5), (1.0, 1.0))
        consts = bound_constants(p, 0.0, 0.0)
        assert error_bound(p, consts, 0.0, 16, 0.0, 0.0, [0.0, 0.0]) == 0.0

    def test_unweighted_reduction(self):
        p = params((1.0,), (0.5,), (0.5,))
        consts = bound_constants(p, 0.1, 0.2)
        tail = 0.37
        value = error_bound(p, consts, 0.05, 16, tail, 0.11, [0.07])
        # with w = 1 the cross terms cancel: C0 eps + C1 s^{-1/2} tail
        assert value == pytest.approx(consts.c0 * 0.05 + consts.c1 * tail / 4.0, abs=1e-12)

    def test_hand_evaluated_generic_instance(self):
        p = params((0.6, 0.2), (0.5, 0.5), (0.8, 0.9))
        consts = BoundConstants(c0=3.0, c1=2.0, delta_as=0.0, delta_a1s=0.0, kn=1.0)
        eps, s = 0.1, 4
        tail, off, per_set = 0.5, 0.2, [0.05, 0.03]
        omega = 0.8
        expected = 3.0 * eps + (2.0 / 2.0) * (
            tail * omega + (1 - omega) * off - (omega - 0.6) * 0.05 - (omega - 0.2) * 0.03)
        assert error_bound(p, consts, eps, s, tail, off, per_set) == pytest.approx(
            expected, abs=1e-12)


def grid_search_kn(rhos, alphas, step):
    best = math.inf
    ticks = [i * step for i in range(int(round(1 / step)) + 1)]
    for combo in itertools.product(ticks, repeat=len(rhos)):
        value = k_n(params(combo, rhos, alphas))
        best = min(best, value)
    return best


class TestOptimizeWeights:
    def test_paper_example(self):
        weights, kn = optimize_weights((0.5, 0.5), (0.1, 0.9))
        assert weights == (1.0, 0.0)
        assert kn == pytest.approx(math.sqrt(0.6), abs=1e-12)

    def test_perfect_prior(self):
        weights, kn = optimize_weights((1.0,), (1.0,))
        assert weights == (0.0,)
        assert kn == pytest.approx(0.0, abs=1e-15)

    def test_grid_oracle_fine(self):
        _, kn = optimize_weights((0.3, 0.3), (0.5, 0.5))
        assert kn <= grid_search_kn((0.3, 0.3), (0.5, 0.5), 0.01) + 1e-12

    @pytest.mark.parametrize("rhos,alphas", [
        ((0.5, 0.5), (0.1, 0.9)),
        ((0.2, 0.7, 0.1), (0.9, 0.3, 0.6)),
        ((1.0, 0.5), (1.0, 0.0)),
    ])
    def test_grid_oracle(self, rhos, alphas):
        _, kn = optimize_weights(rhos, alphas)
        assert kn <= grid_search_kn(rhos, alphas, 0.05) + 1e-12

    def test_large_n_rejected(self):
        with pytest.raises(TheoryDomainError):
            optimize_weights((0.01,) * 21, (0.5,) * 21)


class TestProposition:
    def test_perfect_accuracy_holds(self):
        assert proposition_ordering(params((0.9, 0.5, 0.2), (0.3, 0.3, 0.4), (1.0,) * 3))

    def test_zero_accuracy_fails(self):
        assert not proposition_ordering(params((0.9, 0.2), (0.5, 0.5), (0.0, 0.0)))

    def test_equal_weights_always_hold(self):
        for alpha in (0.0, 0.3, 0.7, 1.0):
            assert proposition_ordering(params((0.4, 0.4), (0.5, 0.5), (alpha, alpha)))

    def test_unequal_alphas_rejected(self):
        with pytest.raises(TheoryDomainError):
            proposition_ordering(params((0.9, 0.2), (0.5, 0.5), (0.2, 0.8)))

    @settings(max_examples=300, deadline=None)
    @given(alpha=st.sampled_from([i / 10 for i in range(11)]),
           data=st.data())
    def test_equivalence_with_half_accuracy(self, alpha, data):
        n = data.draw(st.integers(2, 4))
        raw = data.draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n))
        # strict top/bottom gap; the equivalence degenerates for equal weights
        weights = sorted(raw, reverse=True)
        weights[0] = 0.6 + 0.4 * weights[0]
        weights[-1] = 0.4 * weights[-1]
        weights[1:-1] = [min(max(w, weights[-1]), weights[0]) for w in weights[1:-1]]
        rhos = data.draw(st.lists(st.floats(0.05, 0.2), min_size=n, max_size=n))
        holds = proposition_ordering(params(weights, rhos, (alpha,) * n))
        assert holds == (alpha >= 0.5)


class TestParamsValidation:
    def test_length_mismatch(self):
        with pytest.raises(TheoryDomainError):
            params((0.5,), (0.5, 0.5), (1.0, 1.0))

    def test_hypothesis_budget(self):
        # sum rho_i (1 - alpha_i) must not exceed a
        with pytest.raises(TheoryDomainError):
            params((0.5,), (4.0,), (0.0,))

    def test_a_must_exceed_one(self):
        with pytest.raises(TheoryDomainError):
            params((0.5,), (0.5,), (1.0,), a=1.0)
