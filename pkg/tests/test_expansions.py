"""Series machinery: coefficient recurrences, auxiliary functions, expansions."""

import math

import pytest

from covertfbl.channel_metrics import ChannelPoint, bound_family, tvd_exact
from covertfbl.errors import DomainError, SeriesDivergenceError
from covertfbl.expansions import (
    AOffset,
    Branch,
    DEFAULT_A_OFFSET,
    ExpansionConfig,
    TruncationRule,
    coeffs,
    gamma_half_n_prefactor,
    offset_error_table,
    phi_tail,
    phi_transition,
    taylor_offsets,
    tvd_expansion,
)


def pochhammer(x: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= x + i
    return out


def c_by_definition(a: float, k: int) -> float:
    """The explicit double-sum definition of the tail coefficients."""
    return sum(pochhammer(-a, j) / math.factorial(j)
               * a ** (k - j) / math.factorial(k - j) for j in range(k + 1))


class TestCoeffs:
    def test_tail_seeds_and_first_values(self):
        t = coeffs(7.0, 6)
        assert t.c[0] == 1.0 and t.c[1] == 0.0
        assert t.c[2] == pytest.approx(-3.5, abs=1e-14)  # -a/2
        assert t.c_star[2] == pytest.approx(-7.0, abs=1e-13)  # (-1)^2 2! (-a/2)

    @pytest.mark.parametrize("a", [1.5, 10.0, 50.0])
    def test_recurrence_matches_sum_definition(self, a):
        # the alternating double sum cancels catastrophically for large a,
        # so the definitional oracle is only trustworthy at modest shapes
        t = coeffs(a, 8)
        for k in range(9):
            ref = c_by_definition(a, k)
            assert t.c[k] == pytest.approx(ref, rel=1e-9, abs=1e-9)

    def test_star_identity_exact(self):
        t = coeffs(123.0, 20)
        for k in range(21):
            assert t.c_star[k] == (-1.0) ** k * math.factorial(k) * t.c[k]

    def test_transition_seeds_and_third(self):
        t = coeffs(9.0, 5)
        assert t.c_transition[0] == 1.0
        assert t.c_transition[1] == 0.0 and t.c_transition[2] == 0.0
        assert t.c_transition[3] == pytest.approx(3.0, abs=1e-14)  # a/3
        assert t.c_transition[4] == pytest.approx(-9.0 / 4.0, abs=1e-14)  # -a/4

    def test_k_max_cap(self):
        with pytest.raises(DomainError):
            coeffs(5.0, 61)
        with pytest.raises(DomainError):
            coeffs(-1.0, 5)


class TestPhiTail:
    def test_phi0_forms(self):
        assert phi_tail(-10.0, 0)[0] == pytest.approx((math.exp(-10.0) - 1.0) / -10.0,
                                                      rel=1e-13)
        assert phi_tail(-10.0, 0)[0] == pytest.approx(0.09999546, abs=1e-8)

    def test_phi1_by_hand_recurrence(self):
        d = -10.0
        phi0 = (math.exp(d) - 1.0) / d
        phi1 = (math.exp(d) - 1.0 * phi0) / d
        assert phi_tail(d, 1)[1] == pytest.approx(phi1, rel=1e-12)
        assert phi_tail(d, 1)[1] == pytest.approx(0.0099950, abs=1e-7)

    def test_small_argument_limit(self):
        vals = phi_tail(1e-13, 6)
        for k, v in enumerate(vals):
            assert v == pytest.approx(1.0 / (k + 1.0), rel=1e-10)
        vals = phi_tail(-1e-13, 6)
        for k, v in enumerate(vals):
            assert v == pytest.approx(1.0 / (k + 1.0), rel=1e-10)

    def test_closed_form_identity(self):
        # Phi_k(d) = (-1)^(k+1) k!/d^(k+1) + e^d sum_j (-1)^j k!/((k-j)! d^(j+1))
        d = -8.0
        vals = phi_tail(d, 6)
        for k in range(7):
            direct = (-1.0) ** (k + 1) * math.factorial(k) / d ** (k + 1) \
                + math.exp(d) * sum((-1.0) ** j * math.factorial(k)
                                    / (math.factorial(k - j) * d ** (j + 1))
                                    for j in range(k + 1))
            assert vals[k] == pytest.approx(direct, rel=1e-9)

    def test_decay_diagnostic(self):
        # for d < 0, Phi_k <= k!/|d|^(k+1) and the ratio tends to 1
        for d in (-40.0, -200.0):
            vals = phi_tail(d, 10)
            for k, v in enumerate(vals):
                bound = math.factorial(k) / abs(d) ** (k + 1)
                assert 0.0 < v <= bound * (1.0 + 1e-12)

    def test_positive_argument_series(self):
        # Phi_0(d) = (e^d - 1)/d also for d > 0
        for d in (0.5, 10.0, 100.0):
            assert phi_tail(d, 0)[0] == pytest.approx(math.expm1(d) / d, rel=1e-12)

    def test_recurrence_and_stable_paths_agree_deep_in_tail(self):
        # d <= -30 uses the recurrence, cross-checked against the gamma form
        vals = phi_tail(-45.0, 20)
        assert all(v > 0.0 for v in vals)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            phi_tail(0.0, 3)


class TestPhiTransition:
    def test_at_the_transition_point(self):
        a = 50.0
        vals = phi_transition(a, a, 3)
        assert vals[0] == pytest.approx(math.sqrt(math.pi / (2.0 * a)), rel=1e-14)
        assert vals[1] == pytest.approx(1.0 / a, rel=1e-14)
        assert vals[2] == pytest.approx(math.sqrt(math.pi / (2.0 * a)) / a, rel=1e-13)

    def test_off_transition_recurrence(self):
        a, z = 200.0, 212.0
        d = z - a
        w = math.exp(-d * d / (2.0 * a))
        vals = phi_transition(a, z, 4)
        assert vals[1] == pytest.approx(w / a, rel=1e-14)
        assert vals[2] == pytest.approx((vals[0] + (d / a) * w) / a, rel=1e-13)
        assert vals[3] == pytest.approx((2.0 * vals[1] + (d / a) ** 2 * w) / a,
                                        rel=1e-13)

    def test_far_from_transition_stays_finite(self):
        # the correction term pairs a vanished exponential with a huge power;
        # it must resolve to 0, never to inf * 0 = nan
        for z in (350.0, 0.5):
            vals = phi_transition(100.0, z, 60)
            assert all(math.isfinite(v) for v in vals)

    def test_domain(self):
        with pytest.raises(DomainError):
            phi_transition(0.0, 1.0, 2)


class TestTaylorOffsets:
    @pytest.mark.parametrize("theta", [1e-10, 1e-4, 0.05, 0.4, 0.7, 3.0])
    def test_matches_threshold_definitions(self, theta):
        x, y = taylor_offsets(theta)
        r = math.log1p(theta) / theta
        assert 1.0 - y == pytest.approx(r, rel=1e-13)
        assert 1.0 + x == pytest.approx(r * (1.0 + theta), rel=1e-13)

    def test_leading_terms(self):
        x, y = taylor_offsets(1e-8)
        assert x == pytest.approx(0.5e-8, rel=1e-6)
        assert y == pytest.approx(0.5e-8, rel=1e-6)

    def test_balanced_prefactor_identity(self):
        # exp(-f + n/2) (f/(n/2))^(n/2) equals exp(-g + n/2) (g/(n/2))^(n/2):
        # in logs, -x + log1p(x) = y + log1p(-y)
        for theta in (1e-4, 0.01, 0.3, 2.0):
            for n in (10, 1000, 100_000):
                x, y = taylor_offsets(theta)
                lhs = 0.5 * n * (math.log1p(x) - x)
                rhs = 0.5 * n * (math.log1p(-y) + y)
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


class TestPrefactorDiagnostic:
    def test_n2_exact_side(self):
        d = gamma_half_n_prefactor(2)
        assert d.exact_log == 0.0
        assert d.gap == d.shortcut_log > 0.0

    def test_gap_grows_like_three_quarters_log(self):
        g10 = gamma_half_n_prefactor(10).gap
        g1000 = gamma_half_n_prefactor(1000).gap
        g100000 = gamma_half_n_prefactor(100_000).gap
        assert 0.0 < g10 < g1000 < g100000
        assert g1000 - g10 == pytest.approx(0.75 * math.log(100.0), abs=0.05)
        assert g100000 - g1000 == pytest.approx(0.75 * math.log(100.0), abs=0.01)

    def test_anchor_value(self):
        # shortcut(10) = -5 + 5 ln 5 + (1/4) ln 10 + ln sqrt(pi) + (5/4) ln 2
        d = gamma_half_n_prefactor(10)
        shortcut = -5.0 + 5.0 * math.log(5.0) + 0.25 * math.log(10.0) \
            + 0.5 * math.log(math.pi) + 1.25 * math.log(2.0)
        assert d.shortcut_log == pytest.approx(shortcut, abs=1e-12)
        assert d.exact_log == pytest.approx(math.log(24.0), abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_half_n_prefactor(1)


class TestTvdExpansion:
    def test_transition_regime_accuracy(self):
        res = tvd_expansion(ChannelPoint.from_tau(10_000, 0.6),
                            ExpansionConfig(branch=Branch.TRANSITION))
        assert res.rel_err_vs_exact <= 1e-2
        assert res.regime_warning is None

    def test_tail_regime_accuracy(self):
        res = tvd_expansion(ChannelPoint.from_tau(10_000, 0.25),
                            ExpansionConfig(branch=Branch.TAIL_LOWER))
        assert res.rel_err_vs_exact <= 1e-2
        assert res.regime_warning is None

    def test_tail_upper_is_the_same_combined_evaluation(self):
        cp = ChannelPoint.from_tau(10_000, 0.25)
        a = tvd_expansion(cp, ExpansionConfig(branch=Branch.TAIL_LOWER))
        b = tvd_expansion(cp, ExpansionConfig(branch=Branch.TAIL_UPPER))
        assert a.value == b.value

    @pytest.mark.parametrize("branch,tau", [(Branch.TRANSITION, 0.6),
                                            (Branch.TAIL_LOWER, 0.25)])
    def test_error_non_increasing_with_n(self, branch, tau):
        noise_floor = 1e-8
        errs = [tvd_expansion(ChannelPoint.from_tau(n, tau),
                              ExpansionConfig(branch=branch)).rel_err_vs_exact
                for n in (1000, 5623, 31_623, 177_828, 1_000_000)]
        for prev, cur in zip(errs, errs[1:]):
            assert cur <= prev or cur <= noise_floor, errs

    def test_k0_transition_is_the_clt_estimate(self):
        cp = ChannelPoint.from_tau(50_000, 0.5)
        res = tvd_expansion(cp, ExpansionConfig(branch=Branch.TRANSITION, k_max=0,
                                                truncation_rule=TruncationRule.FIXED_K))
        n = cp.n
        half = 0.5 * n
        a = half - 1.0
        x, y = taylor_offsets(cp.theta)
        pref = math.exp(-a + (a + 1.0) * math.log(a) - math.lgamma(a + 1.0))
        expected = pref * math.sqrt(math.pi / (2.0 * a)) * (
            math.erfc((-half * y + 1.0) / math.sqrt(2.0 * a))
            - math.erfc((half * x + 1.0) / math.sqrt(2.0 * a)))
        assert res.value == pytest.approx(expected, rel=1e-12)
        rep = bound_family(cp)
        assert rep.hellinger_lb <= res.value <= 1.0

    def test_k0_transition_clt_consistency_at_large_n(self):
        cp = ChannelPoint.from_tau(1_000_000, 0.5)
        res = tvd_expansion(cp, ExpansionConfig(branch=Branch.TRANSITION, k_max=0,
                                                truncation_rule=TruncationRule.FIXED_K))
        assert abs(res.value - tvd_exact(cp)) <= 0.01

    def test_terms_match_k_used_and_value(self):
        res = tvd_expansion(ChannelPoint.from_tau(10_000, 0.6),
                            ExpansionConfig(branch=Branch.TRANSITION))
        assert len(res.terms) == res.k_used + 1
        assert res.value == pytest.approx(math.fsum(res.terms), abs=1e-15)
        assert -1e-9 <= res.value <= 1.0 + 1e-9

    def test_tail_baseline_is_one(self):
        res = tvd_expansion(ChannelPoint.from_tau(10_000, 0.25),
                            ExpansionConfig(branch=Branch.TAIL_LOWER))
        assert res.value == pytest.approx(1.0 + math.fsum(res.terms), abs=1e-15)

    def test_out_of_regime_sets_warning(self):
        res = tvd_expansion(ChannelPoint(10, 0.2),
                            ExpansionConfig(branch=Branch.TAIL_LOWER))
        assert res.regime_warning is not None

    def test_divergent_series_raises(self):
        with pytest.raises(SeriesDivergenceError):
            tvd_expansion(ChannelPoint(100, 0.02),
                          ExpansionConfig(branch=Branch.TAIL_LOWER))

    def test_overflowing_coefficients_truncate_cleanly(self):
        # at shapes far beyond the design range the order-60 coefficients
        # overflow; the series must truncate finitely instead of emitting nan
        res = tvd_expansion(ChannelPoint(40_000_000, 40_000_000 ** -0.25),
                            ExpansionConfig(branch=Branch.TAIL_LOWER, k_max=60))
        assert math.isfinite(res.value)
        assert all(math.isfinite(t) for t in res.terms)

    def test_fixed_k_rule_keeps_everything(self):
        res = tvd_expansion(ChannelPoint.from_tau(10_000, 0.6),
                            ExpansionConfig(branch=Branch.TRANSITION, k_max=12,
                                            truncation_rule=TruncationRule.FIXED_K))
        assert res.k_used == 12
        assert len(res.terms) == 13

    def test_config_validation(self):
        with pytest.raises(DomainError):
            ExpansionConfig(branch=Branch.TRANSITION, k_max=61)
        with pytest.raises(DomainError):
            tvd_expansion(ChannelPoint(100, 0.0),
                          ExpansionConfig(branch=Branch.TRANSITION))


class TestOffsetDefaults:
    def test_frozen_defaults_are_sane(self):
        # the exact-alignment offset must not be materially worse than the
        # alternative anywhere in each branch's regime
        table = offset_error_table(Branch.TRANSITION, (0.55, 0.65), (1000, 31_623),
                                   k_max=40)
        for off in AOffset:
            assert all(err <= 1e-6 for _, _, err in table[off])
        table = offset_error_table(Branch.TAIL_LOWER, (0.2, 0.25), (10_000, 100_000),
                                   k_max=40)
        default_errs = [e for _, _, e in table[DEFAULT_A_OFFSET[Branch.TAIL_LOWER]]]
        other = AOffset.HALF_N if DEFAULT_A_OFFSET[Branch.TAIL_LOWER] \
            is AOffset.HALF_N_MINUS_1 else AOffset.HALF_N_MINUS_1
        other_errs = [e for _, _, e in table[other]]
        for d, o in zip(default_errs, other_errs):
            assert d <= 2.0 * max(o, 1e-15)

    def test_offset_override_is_respected(self):
        cp = ChannelPoint.from_tau(10_000, 0.6)
        res = tvd_expansion(cp, ExpansionConfig(branch=Branch.TRANSITION,
                                                a_offset=AOffset.HALF_N))
        assert res.a_offset is AOffset.HALF_N
        assert res.rel_err_vs_exact <= 1e-2
