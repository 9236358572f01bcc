import math

import numpy as np
import pytest

from ringcavity import (
    AboveThresholdError,
    SystemParams,
    UndefinedObservableError,
    anomalous_coherences,
    cauchy_schwarz,
    cavity_moments,
    cavity_observables,
    coherence_degree,
    coherence_route_u,
    critical_couplings,
    g2_functions,
    lyapunov_steady,
    pair_moments,
    total_field_variance_sum,
)

FIG = dict(omega=1.0, omega0=1.0, delta=0.1 * math.pi, kappa=0.2)


def fp(alpha, beta, **over):
    return SystemParams(alpha_k=alpha, beta=beta, **{**FIG, **over})


# ---------------------------------------------------------------------------
# pair moments
# ---------------------------------------------------------------------------

def test_vacuum_at_zero_drive():
    for j in (1, 2):
        m = pair_moments(j, fp(0.4, 0.0))
        assert all(v == 0.0 for v in m.as_dict().values())


def test_full_overlap_freezes_pair_two():
    for beta in (0.1, 0.3):
        m = pair_moments(2, fp(1.0, beta))
        assert all(v == 0.0 for v in m.as_dict().values())
        assert pair_moments(1, fp(1.0, beta)).n_a > 0.0


def test_above_threshold_error_names_branch():
    p = fp(0.5, 0.6)  # beta_c1 ~ 0.4457
    with pytest.raises(AboveThresholdError) as err:
        pair_moments(1, p)
    assert err.value.branch == 1
    assert err.value.beta_c == pytest.approx(critical_couplings(p)[0], rel=1e-12)


def test_pair_moments_match_oracle_at_figure_point():
    p = fp(0.5, 0.3)
    oracle = lyapunov_steady(p)
    for j in (1, 2):
        closed = pair_moments(j, p).as_dict()
        solved = oracle.pair_moments(j).as_dict()
        for name, value in closed.items():
            assert value == pytest.approx(solved[name], rel=1e-8, abs=1e-12), name


def test_moment_physicality_on_draws():
    rng = np.random.default_rng(9)
    for _ in range(50):
        alpha = rng.uniform(0.0, 0.95)
        p0 = fp(alpha, 0.0)
        bc = min(critical_couplings(p0))
        p = p0.with_beta(rng.uniform(0.05, 0.95) * bc)
        for j in (1, 2):
            m = pair_moments(j, p)
            assert m.n_a >= 0.0 and m.n_d >= 0.0
            assert abs(m.a_sq) <= m.n_a + 0.5 + 1e-12
            assert abs(m.d_sq) <= m.n_d + 0.5 + 1e-12


def test_occupation_diverges_at_threshold():
    p0 = fp(0.5, 0.0)
    bc = critical_couplings(p0)[0]
    n_low = pair_moments(1, p0.with_beta(0.9 * bc)).n_a
    n_high = pair_moments(1, p0.with_beta(0.999 * bc)).n_a
    assert n_high > 10.0 * n_low


# ---------------------------------------------------------------------------
# cavity moments and first-order coherence
# ---------------------------------------------------------------------------

def test_thermal_limit_has_no_coherence():
    p = fp(0.0, 0.3)
    n_r, coh, sq_rr, sq_rl = cavity_moments(p)
    assert n_r > 0.0
    assert coh == 0.0
    assert abs(sq_rr) == 0.0  # <a_1^2> = -<a_2^2> exactly
    assert abs(sq_rl) > 0.0


def test_dual_route_coherence_identity():
    rng = np.random.default_rng(4)
    for _ in range(50):
        alpha = rng.uniform(0.01, 0.95)
        p0 = fp(alpha, 0.0)
        p = p0.with_beta(rng.uniform(0.05, 0.9) * min(critical_couplings(p0)))
        _, coh, _, _ = cavity_moments(p)
        assert coh == pytest.approx(alpha * coherence_route_u(p), rel=1e-10)


def test_coherence_degree_range_and_limits():
    assert coherence_degree(fp(0.0, 0.2)) == (0.0, 0.0)
    for beta in (0.05, 0.2, 0.4):
        gamma, vis = coherence_degree(fp(1.0, beta))
        assert gamma == 1.0 and vis == 1.0
    gamma, vis = coherence_degree(fp(0.5, 0.3))
    assert 0.0 < gamma < 1.0
    assert vis == gamma  # visibility equals the degree of coherence


def test_coherence_increases_with_overlap():
    for beta in (0.1, 0.2, 0.3):
        gammas = [coherence_degree(fp(a, beta))[0] for a in (0.1, 0.5, 0.8)]
        assert gammas[0] < gammas[1] < gammas[2]


def test_undefined_at_zero_drive():
    p = fp(0.3, 0.0)
    for fn in (coherence_degree, anomalous_coherences, g2_functions, cauchy_schwarz):
        with pytest.raises(UndefinedObservableError):
            fn(p)


# ---------------------------------------------------------------------------
# second-order coherence
# ---------------------------------------------------------------------------

def test_anomalous_coherence_limits():
    eta_rr, eta_rl = anomalous_coherences(fp(0.0, 0.25))
    assert eta_rr == 0.0
    assert eta_rl == pytest.approx(1.0, abs=1e-12)
    eta_rr, eta_rl = anomalous_coherences(fp(1.0, 0.25))
    assert eta_rr == pytest.approx(eta_rl, rel=1e-12)


def test_anomalous_coherences_match_oracle():
    p = fp(0.5, 0.2)
    oracle = lyapunov_steady(p)
    m1, m2 = oracle.pair_moments(1), oracle.pair_moments(2)
    n = m1.n_a + m2.n_a
    eta_rr, eta_rl = anomalous_coherences(p)
    assert eta_rr == pytest.approx(abs(m1.a_sq + m2.a_sq) / n, rel=1e-8)
    assert eta_rl == pytest.approx(abs(m1.a_sq - m2.a_sq) / n, rel=1e-8)


def test_g2_endpoints_and_range():
    assert g2_functions(fp(0.0, 0.2)) == pytest.approx((2.0, 2.0, 2.0), abs=1e-12)
    assert g2_functions(fp(1.0, 0.2)) == pytest.approx((3.0, 3.0, 3.0), abs=1e-12)
    for alpha in np.linspace(0.0, 1.0, 21):
        for beta in (0.1, 0.2, 0.3):
            g_rr, g_ll, g_rl = g2_functions(fp(alpha, beta))
            assert g_rr == g_ll
            assert 2.0 - 1e-12 <= g_rr <= 3.0 + 1e-12
            assert 2.0 - 1e-12 <= g_rl <= 3.0 + 1e-12


def test_g2_increases_with_overlap():
    for beta in (0.1, 0.2, 0.3):
        vals = [g2_functions(fp(a, beta))[0] for a in (0.1, 0.5, 0.8)]
        assert vals[0] < vals[1] < vals[2]


# ---------------------------------------------------------------------------
# Cauchy-Schwarz ratios
# ---------------------------------------------------------------------------

def test_cavity_ratio_never_violated():
    for alpha in np.linspace(0.0, 1.0, 41):
        for beta in (0.1, 0.2, 0.3):
            if alpha == 1.0:
                g_rr, _, g_rl = g2_functions(fp(alpha, beta))
                chi_rl = g_rr**2 / g_rl**2
            else:
                chi_rl, _, _ = cauchy_schwarz(fp(alpha, beta))
            assert chi_rl >= 1.0 - 1e-12
    for alpha in (0.0, 1.0):
        g_rr, _, g_rl = g2_functions(fp(alpha, 0.2))
        assert g_rr**2 / g_rl**2 == pytest.approx(1.0, abs=1e-9)


def test_cavity_ratio_equivalent_to_eta_bound():
    rng = np.random.default_rng(12)
    for _ in range(40):
        alpha = rng.uniform(0.0, 0.95)
        p0 = fp(alpha, 0.0)
        p = p0.with_beta(rng.uniform(0.05, 0.9) * min(critical_couplings(p0)))
        chi_rl, _, _ = cauchy_schwarz(p)
        _, eta_rl = anomalous_coherences(p)
        assert (chi_rl >= 1.0 - 1e-12) == (eta_rl <= 1.0 + 1e-12)


def test_in_pair_ratios_are_violated():
    for alpha in np.linspace(0.0, 0.95, 20):
        for beta in (0.1, 0.2, 0.3):
            _, chi_11, chi_22 = cauchy_schwarz(fp(alpha, beta))
            assert chi_11 < 1.0
            assert chi_22 < 1.0


def test_in_pair_ratio_undefined_at_full_overlap():
    with pytest.raises(UndefinedObservableError):
        cauchy_schwarz(fp(1.0, 0.2))


# ---------------------------------------------------------------------------
# total-field variance sum
# ---------------------------------------------------------------------------

def test_variance_sum_vacuum_is_zero():
    assert total_field_variance_sum(fp(0.4, 0.0), 1.1) == 0.0


def test_variance_sum_never_negative():
    p = fp(0.5, 0.3)
    thetas = np.linspace(0.0, 2.0 * math.pi, 2000, endpoint=False)
    vals = [total_field_variance_sum(p, t) for t in thetas]
    assert min(vals) >= 0.0


def test_variance_sum_null_angle():
    p = fp(0.5, 0.3)
    phi1 = math.atan2(p.kappa, p.Omega_1)
    phi2 = math.atan2(p.kappa, p.Omega_2)
    theta = math.pi / 2.0 - phi1
    expected = pair_moments(2, p).n_a * math.cos(theta + phi2) ** 2
    assert total_field_variance_sum(p, theta) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# observable record
# ---------------------------------------------------------------------------

def test_observables_independent_of_phasor_argument():
    base = cavity_observables(fp(0.5, 0.3))
    for phi in (-2.0, 0.7, 3.0):
        other = cavity_observables(fp(0.5, 0.3, phi_n=phi))
        assert other.g2_RL == base.g2_RL
        assert other.gamma_RL == base.gamma_RL
        assert other.chi_11 == base.chi_11
        assert other.coh_RL == base.coh_RL


def test_observables_record_marks_undefined():
    rec = cavity_observables(fp(0.3, 0.0))
    assert math.isnan(rec.g2_RR) and math.isnan(rec.chi_11)
    assert rec.error != ""
    assert rec.n_R == 0.0
    rec1 = cavity_observables(fp(1.0, 0.2))
    assert rec1.g2_RR == pytest.approx(3.0, abs=1e-12)
    assert math.isnan(rec1.chi_22)
    d = rec1.as_dict()
    assert d["coh_RL"] == {"re": rec1.coh_RL.real, "im": rec1.coh_RL.imag}
