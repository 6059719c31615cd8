import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from occam import bernoulli_models as bm
from occam.bernoulli_models import (
    MACKAY_28_4,
    CoinPosterior,
    CoinState,
    ContingencyCounts,
    ContingencyHypothesis as H,
    beta_log_evidence,
    coin_posterior_batch,
    coin_trajectory,
    coin_update_naive_iterative,
    coin_update_quasi_iterative,
    contingency_exact_log_evidence,
    contingency_laplace,
    contingency_laplace_log_evidence,
    contingency_map,
    contingency_model_posterior,
)

bit_lists = st.lists(st.integers(0, 1), max_size=300)


def fold_quasi(bits, prior=0.0):
    post, state = CoinPosterior(prior), CoinState()
    for b in bits:
        post, state = coin_update_quasi_iterative(post, state, b)
    return post, state


class TestBetaEvidence:
    def test_empty(self):
        assert beta_log_evidence(0, 0) == 0.0

    def test_quadrature(self):
        quad, _ = integrate.quad(lambda r: r * (1 - r), 0, 1)
        assert quad == pytest.approx(1 / 6)
        assert beta_log_evidence(1, 2) == pytest.approx(math.log(quad), rel=1e-12)

    @pytest.mark.parametrize("k, n", [(0, 5), (3, 7), (10, 10), (4, 30)])
    def test_against_quadrature(self, k, n):
        quad, _ = integrate.quad(lambda r: r**k * (1 - r) ** (n - k), 0, 1, epsabs=0, epsrel=1e-13)
        assert beta_log_evidence(k, n) == pytest.approx(math.log(quad), rel=1e-10)

    def test_large_is_finite(self):
        v = beta_log_evidence(500, 1000)
        # exact integer arithmetic oracle for -ln((N+1) C(N,K))
        oracle = -(math.log(1001) + math.log(math.comb(1000, 500)))
        assert v == pytest.approx(oracle, rel=1e-12)
        stirling = -1000 * math.log(2) + 0.5 * math.log(math.pi / 1001)
        assert math.isfinite(v) and abs(v - stirling) < 0.5

    def test_invalid(self):
        with pytest.raises(ValueError):
            beta_log_evidence(3, 2)

    @pytest.mark.parametrize("n", [0, 1, 7, 40, 100])
    def test_total_probability(self, n):
        total = sum(math.exp(beta_log_evidence(k, n)) * math.comb(n, k) for k in range(n + 1))
        assert abs(total - 1.0) < 1e-10


class TestCoinBatch:
    def test_no_data(self):
        assert coin_posterior_batch(CoinState(0, 0), 0.7).log_odds_fair == 0.7

    def test_fair_n1000(self):
        post = coin_posterior_batch(CoinState(1000, 500))
        oracle = math.log(1001) + math.log(math.comb(1000, 500)) - 1000 * math.log(2)
        assert post.log_odds_fair == pytest.approx(oracle, rel=1e-12)
        assert post.log_odds_fair == pytest.approx(3.228835787, abs=1e-8)
        assert post.p_fair > 0.5

    def test_all_ones(self):
        post = coin_posterior_batch(CoinState(100, 0))
        assert post.log_odds_fair == pytest.approx(math.log(101) - 100 * math.log(2), rel=1e-12)
        assert post.log_odds_fair == pytest.approx(-64.6996, abs=1e-4)

    def test_corrected_stirling_rate(self):
        # exact ratio p(t|H0)/p(t|H1) at K = N/2 approaches sqrt(2(N+1)/pi)
        for n in (100, 1000, 10000):
            ratio = math.exp(coin_posterior_batch(CoinState(n, n // 2)).log_odds_fair)
            assert ratio == pytest.approx(math.sqrt(2 * (n + 1) / math.pi), rel=0.02)

    @settings(max_examples=50)
    @given(bit_lists, st.randoms(use_true_random=False))
    def test_permutation_invariance(self, bits, rnd):
        shuffled = list(bits)
        rnd.shuffle(shuffled)
        a = coin_posterior_batch(CoinState.from_bits(bits))
        b = coin_posterior_batch(CoinState.from_bits(shuffled))
        assert a == b

    def test_enumeration_oracle(self):
        # posterior for H0 by summing over every sequence of length 6
        n = 6
        for seq in itertools.product([0, 1], repeat=n):
            k = seq.count(0)
            ev1, _ = integrate.quad(lambda r: r**k * (1 - r) ** (n - k), 0, 1)
            expected = math.log(0.5**n) - math.log(ev1)
            assert coin_posterior_batch(CoinState.from_bits(seq)).log_odds_fair == pytest.approx(expected, rel=1e-9)


class TestQuasiIterative:
    def test_first_toss_uninformative(self):
        for bit in (0, 1):
            post, state = coin_update_quasi_iterative(CoinPosterior(0.0), CoinState(), bit)
            assert post.log_odds_fair == 0.0
            assert state == CoinState(1, 1 - bit)

    @settings(max_examples=100)
    @given(bit_lists, st.floats(-5, 5))
    def test_equals_batch(self, bits, prior):
        post, state = fold_quasi(bits, prior)
        assert state == CoinState.from_bits(bits)
        assert abs(post.log_odds_fair - coin_posterior_batch(state, prior).log_odds_fair) < 1e-9

    def test_equals_batch_long(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 1000)
        post, state = fold_quasi(bits)
        assert abs(post.log_odds_fair - coin_posterior_batch(state).log_odds_fair) < 1e-9

    def test_trajectory_matches_fold(self):
        rng = np.random.default_rng(1)
        bits = rng.integers(0, 2, 200)
        path = coin_trajectory(bits)
        post, state = CoinPosterior(), CoinState()
        for i, b in enumerate(bits):
            post, state = coin_update_quasi_iterative(post, state, int(b))
            assert path[i] == pytest.approx(post.log_odds_fair, abs=1e-12)

    def test_invalid_bit(self):
        with pytest.raises(ValueError):
            coin_update_quasi_iterative(CoinPosterior(), CoinState(), 2)
        with pytest.raises(ValueError, match="position 2"):
            coin_trajectory([0, 1, 3])


class TestNaive:
    @given(st.floats(-50, 50), bit_lists)
    def test_constant(self, lo, bits):
        post = CoinPosterior(lo)
        out = post
        for b in bits:
            out = coin_update_naive_iterative(out, b)
        assert out == post

    def test_million_bits(self):
        post = CoinPosterior(0.0)
        out = post
        for b in np.random.default_rng(0).integers(0, 2, 10**6):
            out = coin_update_naive_iterative(out, int(b))
        assert out.log_odds_fair == 0.0

    def test_contrast_all_ones(self):
        ones = [1] * 100
        quasi, _ = fold_quasi(ones)
        naive = CoinPosterior(0.0)
        for b in ones:
            naive = coin_update_naive_iterative(naive, b)
        assert quasi.p_bent > 0.999
        assert naive.p_bent == 0.5


class TestContingencyMap:
    def test_h00(self):
        assert contingency_map(MACKAY_28_4, H.H00)[0] == pytest.approx(36 / 326)
        assert round(contingency_map(MACKAY_28_4, H.H00)[0], 4) == 0.1104

    def test_h11(self):
        np.testing.assert_allclose(contingency_map(MACKAY_28_4, H.H11), [0.1258, 0, 0.1746, 0.0583], atol=5e-5)
        assert contingency_map(MACKAY_28_4, H.H11)[1] == 0.0

    def test_single_cell(self):
        assert contingency_map(ContingencyCounts(VM=(1, 1)), H.H00)[0] == 0.5

    def test_empty_group(self):
        with pytest.raises(ValueError, match="no observations"):
            contingency_map(ContingencyCounts(VM=(1, 1)), H.H11)

    def test_grouping_partitions(self):
        for hyp in H:
            cells = [c for g in hyp.groups for c in g]
            assert sorted(cells) == sorted(bm.CELLS)


class TestContingencyEvidence:
    def test_h10_paper_value(self):
        ev = math.exp(contingency_laplace_log_evidence(MACKAY_28_4, H.H10))
        assert ev == pytest.approx(4.698e-51, rel=0.01)

    def test_h11_paper_value(self):
        ev = math.exp(contingency_laplace_log_evidence(MACKAY_28_4, H.H11))
        assert ev == pytest.approx(1.4875e-51, rel=0.01)

    def test_h01_value(self):
        # the printed 2.7485e-51 has the wrong exponent; mantissa matches
        ev = math.exp(contingency_laplace_log_evidence(MACKAY_28_4, H.H01))
        assert ev == pytest.approx(2.7485e-52, rel=1e-4)

    def test_boundary_hessian_matches_printed(self):
        lap = contingency_laplace(MACKAY_28_4, H.H11)
        assert lap.hessian_diag[1] == pytest.approx(9.0)  # 9 / (1 - 0)^2
        assert lap.notes and "boundary" in lap.notes[0]

    def test_exact_h00(self):
        assert contingency_exact_log_evidence(MACKAY_28_4, H.H00) == beta_log_evidence(36, 326)

    def test_exact_empty(self):
        assert contingency_exact_log_evidence(ContingencyCounts(), H.H11) == 0.0

    @pytest.mark.parametrize("hyp", [H.H00, H.H10, H.H01])
    def test_laplace_close_to_exact_interior(self, hyp):
        gap = abs(contingency_exact_log_evidence(MACKAY_28_4, hyp) - contingency_laplace_log_evidence(MACKAY_28_4, hyp))
        assert gap < 0.15

    def test_laplace_boundary_error_h11(self):
        gap = contingency_laplace_log_evidence(MACKAY_28_4, H.H11) - contingency_exact_log_evidence(MACKAY_28_4, H.H11)
        assert gap > 1.0

    def test_all_zero_deaths(self):
        counts = ContingencyCounts(VM=(0, 10), VbarM=(0, 5), VMbar=(0, 7), VbarMbar=(0, 3))
        b = 25
        assert contingency_exact_log_evidence(counts, H.H00) == pytest.approx(beta_log_evidence(0, b))
        quad, _ = integrate.quad(lambda t: (1 - t) ** b, 0, 1)
        assert contingency_exact_log_evidence(counts, H.H00) == pytest.approx(math.log(quad), rel=1e-10)
        lap = contingency_laplace_log_evidence(counts, H.H00)
        assert lap == pytest.approx(0.5 * math.log(2 * math.pi / b))
        assert lap > contingency_exact_log_evidence(counts, H.H00)

    def test_all_zero_table(self):
        counts = ContingencyCounts()
        lap = contingency_laplace(counts, H.H10)
        assert lap.log_evidence == 0.0
        assert len(lap.notes) == 2
        np.testing.assert_array_equal(contingency_model_posterior(counts, method="exact"), [0.25] * 4)


class TestContingencyPosterior:
    def test_normalized_and_winner(self):
        for method in ("laplace", "exact"):
            p = contingency_model_posterior(MACKAY_28_4, method=method)
            assert abs(p.sum() - 1) < 1e-12
            assert int(np.argmax(p)) == 1  # H10

    def test_excluded_hypothesis(self):
        lp = np.log([0.25, 0.25, 0.25, 0.25])
        lp[3] = -np.inf
        p = contingency_model_posterior(MACKAY_28_4, lp)
        assert p[3] == 0.0
        full = contingency_model_posterior(MACKAY_28_4)
        np.testing.assert_allclose(p[:3], full[:3] / full[:3].sum(), rtol=1e-12)

    def test_zero_data_is_prior(self):
        lp = np.log([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(contingency_model_posterior(ContingencyCounts(), lp, "exact"), [0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(contingency_model_posterior(ContingencyCounts(), lp, "laplace"), [0.1, 0.2, 0.3, 0.4])

    def test_posteriors_from_printed_evidences(self):
        # the printed posterior list follows from the printed evidences (incl. the mis-printed H01)
        printed = np.array([2.8313, 4.698, 2.7485, 1.4875])
        np.testing.assert_allclose(printed / printed.sum(), [0.24, 0.40, 0.23, 0.13], atol=0.01)

    def test_bad_method(self):
        with pytest.raises(ValueError):
            contingency_model_posterior(MACKAY_28_4, method="mcmc")
