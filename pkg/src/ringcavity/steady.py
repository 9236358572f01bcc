"""Closed-form steady-state moments and equal-time observables.

Below both thresholds each pair (a_j, d_j) relaxes from vacuum to a
zero-mean Gaussian state whose second moments have closed forms in the
gap h_j = omega_0 (kappa^2 + Omega_j^2) - 4 lambda_j^2 Omega_j:

    <a_j+ a_j> = lambda_j^2 (kappa^2 + Omega_j^2) / (2 Omega_j h_j)
    <a_j^2>    = (-1)^(j+1) lambda_j^2 (Omega_j + i kappa)^2 / (2 Omega_j h_j)
    ...

The clockwise/anti-clockwise cavity modes are R = (a_1 + a_2)/sqrt(2),
L = (a_1 - a_2)/sqrt(2), so their occupations, coherence and anomalous
moments follow from sums/differences of the pair moments.  Fourth-order
correlators are obtained by Gaussian moment factorization.

All observables here are independent of the phasor argument phi_N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import AboveThresholdError, UndefinedObservableError
from .model import SystemParams, critical_couplings, stability_gap


@dataclass(frozen=True)
class PairMoments:
    """Steady-state second moments of one (a_j, d_j) pair."""

    n_a: float
    n_d: float
    m_da: complex  # <d_j+ a_j>
    c_da: complex  # <d_j a_j>
    a_sq: complex  # <a_j^2>
    d_sq: complex  # <d_j^2>

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def pair_moments(j: int, p: SystemParams) -> PairMoments:
    """Closed-form steady-state moments of pair j in {1, 2}.

    A pair with lambda_j = 0 (undriven, or pair 2 at alpha_k = 1) is
    decoupled from the input and keeps its initial vacuum: all moments
    are zero.  Otherwise requires h_j > 0 (strictly below threshold).
    """
    lam = p.lambda_j(j)
    if lam == 0.0:
        return PairMoments(0.0, 0.0, 0j, 0j, 0j, 0j)

    h = stability_gap(p, j)
    if h <= 0.0:
        beta_c = critical_couplings(p)[j - 1]
        raise AboveThresholdError(branch=j, beta=p.beta, beta_c=beta_c)

    Om = p.Omega_j(j)
    k, w0 = p.kappa, p.omega0
    K2 = k**2 + Om**2
    sign = -1.0 if j == 2 else 1.0  # (-1)^(j+1)

    n_a = lam**2 * K2 / (2.0 * Om * h)
    n_d = (
        (2.0 * lam**2 * Om + w0 * (k**2 + (w0 - Om) ** 2)) * h
        + 8.0 * lam**4 * Om**2
    ) / (4.0 * w0**2 * Om * h)
    m_da = -lam * ((Om + 1j * k) * K2 - h) / (4.0 * Om * h)
    c_da = -sign * lam * ((Om + 1j * k) * K2 + h) / (4.0 * Om * h)
    a_sq = sign * lam**2 * (Om + 1j * k) ** 2 / (2.0 * Om * h)
    d_sq = sign * lam**2 * K2 / (2.0 * w0 * h)
    return PairMoments(n_a=n_a, n_d=n_d, m_da=m_da, c_da=c_da, a_sq=a_sq, d_sq=d_sq)


def cavity_moments(p: SystemParams) -> tuple[float, float, complex, complex]:
    """(n_R, coh_RL, sq_RR, sq_RL) of the counter-propagating modes.

    n_R = n_L = (n_a1 + n_a2)/2,  <a_R+ a_L> = (n_a1 - n_a2)/2,
    <a_R a_R> = (<a_1^2> + <a_2^2>)/2,  <a_R a_L> = (<a_1^2> - <a_2^2>)/2.
    """
    m1 = pair_moments(1, p)
    m2 = pair_moments(2, p)
    n_r = (m1.n_a + m2.n_a) / 2.0
    coh = (m1.n_a - m2.n_a) / 2.0
    sq_rr = (m1.a_sq + m2.a_sq) / 2.0
    sq_rl = (m1.a_sq - m2.a_sq) / 2.0
    return n_r, coh, sq_rr, sq_rl


def coherence_route_u(p: SystemParams) -> float:
    """First-order coherence <a_R+ a_L> via the rational function U(omega, kappa).

    Independent algebraic route used to cross-check the pair-moment route:
    <a_R+ a_L> = alpha_k * U.  Shares no code with :func:`pair_moments`.
    The denominator uses the identity u3^2 - alpha^2 w3^2 = h_1 h_2.
    """
    a, b = p.alpha_k, p.beta
    w, w0, d, k = p.omega, p.omega0, p.delta, p.kappa
    u1 = b**2 * (w - a**2 * d)
    u2 = a**2 * d**2 + k**2 + w**2
    u3 = u2 * w0 - 4.0 * b**2 * (a**2 * d + w)
    w1 = b**2 * (w - d)
    w2 = 2.0 * w * d
    w3 = 4.0 * b**2 * (w + d) - w2 * w0
    numer = w1 * (a**2 * w2 * w3 + u2 * u3) + u1 * (u3 * w2 + u2 * w3)
    denom = (w**2 - a**2 * d**2) * 2.0 * (u3**2 - a**2 * w3**2)
    return numer / denom


def coherence_degree(p: SystemParams) -> tuple[float, float]:
    """Degree of first-order coherence |gamma_RL| and fringe visibility.

    gamma_RL = |n_a1 - n_a2| / (n_a1 + n_a2); the visibility of the
    interference pattern equals gamma_RL identically because the two
    cavity modes are equally populated.
    """
    n_r, coh, _, _ = cavity_moments(p)
    if n_r == 0.0:
        raise UndefinedObservableError(
            "coherence degree is 0/0 for an unpopulated cavity (beta = 0)"
        )
    gamma = abs(coh) / n_r
    return gamma, gamma


def anomalous_coherences(p: SystemParams) -> tuple[float, float]:
    """Normalized phase-sensitive coherences (eta_RR, eta_RL)."""
    n_r, _, sq_rr, sq_rl = cavity_moments(p)
    if n_r == 0.0:
        raise UndefinedObservableError(
            "anomalous coherences are 0/0 for an unpopulated cavity (beta = 0)"
        )
    return abs(sq_rr) / n_r, abs(sq_rl) / n_r


def g2_functions(p: SystemParams) -> tuple[float, float, float]:
    """Equal-time second-order correlations (g2_RR, g2_LL, g2_RL).

    Gaussian moment factorization gives g2_RR = g2_LL = 2 + eta_RR^2 and
    g2_RL = 1 + gamma_RL^2 + eta_RL^2; values run from 2 (thermal, at
    alpha_k = 0) up to the super-bunched 3 at alpha_k = 1.
    """
    gamma, _ = coherence_degree(p)
    eta_rr, eta_rl = anomalous_coherences(p)
    g2_same = 2.0 + eta_rr**2
    g2_cross = 1.0 + gamma**2 + eta_rl**2
    return g2_same, g2_same, g2_cross


def _fourth_moments(m: PairMoments) -> tuple[float, float, float]:
    """Gaussian-factorized fourth moments of one pair.

    <a+2 a2> = 2 n_a^2 + |<a^2>|^2,  <d+2 d2> = 2 n_d^2 + |<d^2>|^2,
    <a+ d+ a d> = n_a n_d + |<d+ a>|^2 + |<d a>|^2.
    """
    aa = 2.0 * m.n_a**2 + abs(m.a_sq) ** 2
    dd = 2.0 * m.n_d**2 + abs(m.d_sq) ** 2
    ad = m.n_a * m.n_d + abs(m.m_da) ** 2 + abs(m.c_da) ** 2
    return aa, dd, ad


def cauchy_schwarz(p: SystemParams) -> tuple[float, float, float]:
    """Cauchy-Schwarz ratios (chi_RL, chi_11, chi_22).

    chi_RL = g2_RR g2_LL / g2_RL^2 >= 1 for the cavity modes (equality at
    alpha_k in {0, 1}); chi_jj compares photon correlations within pair j
    and drops below 1 (a nonclassical violation) below threshold.
    """
    g2_rr, g2_ll, g2_rl = g2_functions(p)
    chi_rl = g2_rr * g2_ll / g2_rl**2
    chis = []
    for j in (1, 2):
        m = pair_moments(j, p)
        aa, dd, ad = _fourth_moments(m)
        if ad == 0.0:
            raise UndefinedObservableError(
                f"pair-{j} cross correlation vanishes; chi_{j}{j} is 0/0"
            )
        chis.append(aa * dd / ad**2)
    return chi_rl, chis[0], chis[1]


def total_field_variance_sum(p: SystemParams, theta: float) -> float:
    """Two-mode squeezing witness of the total (frequency-integrated) field.

    Returns n_a1 cos^2(theta + phi_1) + n_a2 cos^2(theta + phi_2) with
    phi_j = arctan(kappa / Omega_j), proportional to the sum of normally
    ordered variances of the X quadrature of a_1 and the P quadrature of
    a_2 (quadratures X^theta = (a e^{i theta} + a+ e^{-i theta})/sqrt(2)).
    Negativity would certify entanglement of the R/L modes; below
    threshold the sum is >= 0 for every theta: the total field is never
    two-mode squeezed.
    """
    m1 = pair_moments(1, p)
    m2 = pair_moments(2, p)
    phi1 = math.atan2(p.kappa, p.Omega_1)
    phi2 = math.atan2(p.kappa, p.Omega_2)
    return m1.n_a * math.cos(theta + phi1) ** 2 + m2.n_a * math.cos(theta + phi2) ** 2


@dataclass(frozen=True)
class CavityObservables:
    """Full equal-time observable record at one operating point.

    Undefined entries (0/0 normalizations at beta = 0, or pair-2 ratios at
    alpha_k = 1) are NaN and noted in ``error``.
    """

    alpha_k: float
    beta: float
    n_R: float
    coh_RL: complex
    gamma_RL: float
    visibility: float
    eta_RR: float
    eta_RL: float
    g2_RR: float
    g2_LL: float
    g2_RL: float
    chi_RL: float
    chi_11: float
    chi_22: float
    U_value: float
    error: str = ""

    def as_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                d[f.name] = {"re": v.real, "im": v.imag}
            else:
                d[f.name] = v
        return d


def cavity_observables(p: SystemParams) -> CavityObservables:
    """Evaluate every equal-time observable, marking undefined ones NaN."""
    nan = math.nan
    notes = []
    n_r, coh, _, _ = cavity_moments(p)
    u_val = coherence_route_u(p)
    try:
        gamma, vis = coherence_degree(p)
        eta_rr, eta_rl = anomalous_coherences(p)
        g2_rr, g2_ll, g2_rl = g2_functions(p)
        chi_rl = g2_rr * g2_ll / g2_rl**2
    except UndefinedObservableError as exc:
        notes.append(str(exc))
        gamma = vis = eta_rr = eta_rl = g2_rr = g2_ll = g2_rl = chi_rl = nan
    try:
        _, chi_11, chi_22 = cauchy_schwarz(p)
    except UndefinedObservableError as exc:
        notes.append(str(exc))
        chi_11 = chi_22 = nan
    return CavityObservables(
        alpha_k=p.alpha_k,
        beta=p.beta,
        n_R=n_r,
        coh_RL=complex(coh),
        gamma_RL=gamma,
        visibility=vis,
        eta_RR=eta_rr,
        eta_RL=eta_rl,
        g2_RR=g2_rr,
        g2_LL=g2_ll,
        g2_RL=g2_rl,
        chi_RL=chi_rl,
        chi_11=chi_11,
        chi_22=chi_22,
        U_value=u_val,
        error="; ".join(notes),
    )
