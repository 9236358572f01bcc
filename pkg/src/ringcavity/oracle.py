"""Brute-force validation engines for the closed-form results.

The steady state of the linear system is recomputed here without using
any closed form: the quadrature covariance sigma of
(x_a1, p_a1, x_d1, p_d1, x_a2, p_a2, x_d2, p_d2) obeys

    d sigma/dt = A sigma + sigma A^T + Q,

so the steady state solves the continuous Lyapunov equation
A sigma + sigma A^T + Q = 0 (Bartels-Stewart, via SciPy) and the
transient is integrated by fixed-step classical RK4 from the vacuum
sigma(0) = I/2.  Complex pair moments are then read off the quadrature
covariance and compared against the closed forms.  Thresholds are
re-found by bisection on the drift stability margin.

The quadrature (real) representation is deliberately a different code
path from the closed-form module, so agreement is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .errors import AboveThresholdError, BracketingError, DomainError, NumericalError
from .model import (
    SystemParams,
    critical_couplings,
    drift_matrix,
    stability_margin,
)
from .steady import PairMoments, cavity_moments, coherence_route_u, pair_moments
from .spectra import integrate_intracavity_spectrum

#: Residual contract of the Lyapunov solve, relative to ||Q||.
LYAPUNOV_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MomentState:
    """Quadrature covariance of all four modes at one instant."""

    time: float
    sigma: np.ndarray

    def pair_moments(self, j: int) -> PairMoments:
        """Complex second moments of pair j read off the covariance.

        Quadratures are x = (a + a+)/sqrt(2), p = i(a+ - a)/sqrt(2), so
        n = (<x^2> + <p^2> - 1)/2, <a^2> = (<x^2> - <p^2>)/2 + i <xp>_sym,
        and the a-d cross moments follow from the 2x2 cross block.
        """
        if j not in (1, 2):
            raise DomainError(f"branch must be 1 or 2, got {j}")
        i = 4 * (j - 1)
        s = self.sigma[i : i + 4, i : i + 4]
        xx_a, pp_a, xp_a = s[0, 0], s[1, 1], s[0, 1]
        xx_d, pp_d, xp_d = s[2, 2], s[3, 3], s[2, 3]
        xa_xd, xa_pd = s[0, 2], s[0, 3]
        pa_xd, pa_pd = s[1, 2], s[1, 3]
        return PairMoments(
            n_a=(xx_a + pp_a - 1.0) / 2.0,
            n_d=(xx_d + pp_d - 1.0) / 2.0,
            m_da=((xa_xd + pa_pd) + 1j * (pa_xd - xa_pd)) / 2.0,
            c_da=((xa_xd - pa_pd) + 1j * (xa_pd + pa_xd)) / 2.0,
            a_sq=(xx_a - pp_a) / 2.0 + 1j * xp_a,
            d_sq=(xx_d - pp_d) / 2.0 + 1j * xp_d,
        )


def vacuum_state() -> MomentState:
    return MomentState(time=0.0, sigma=0.5 * np.eye(8))


def lyapunov_steady(p: SystemParams) -> MomentState:
    """Steady-state covariance from the Lyapunov equation.

    Refuses unless the drift is strictly stable (margin < 0); a marginal
    undriven pair has no unique steady state.  The returned covariance
    satisfies ||A sigma + sigma A^T + Q|| <= 1e-10 ||Q||.
    """
    margin = stability_margin(p)
    if margin >= 0.0:
        beta_c1, _ = critical_couplings(p)
        raise AboveThresholdError(branch=1, beta=p.beta, beta_c=beta_c1)
    sys = drift_matrix(p)
    a, q = sys.drift, sys.diffusion
    sigma = solve_continuous_lyapunov(a, -q)
    sigma = (sigma + sigma.T) / 2.0
    residual = np.linalg.norm(a @ sigma + sigma @ a.T + q)
    if residual > LYAPUNOV_RESIDUAL_TOL * np.linalg.norm(q):
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds "
            f"{LYAPUNOV_RESIDUAL_TOL:.0e} * ||Q||"
        )
    return MomentState(time=math.inf, sigma=sigma)


def evolve_moments(
    p: SystemParams,
    t_end: float,
    dt: float,
    record_every: int | None = None,
) -> list[MomentState]:
    """Integrate the covariance from vacuum with fixed-step classical RK4.

    The step count is n = ceil(t_end / dt) with a uniform step t_end / n,
    so the final record lands exactly at t_end.  ``record_every`` thins
    the returned trajectory (default: about 200 records); the initial and
    final states are always included.  Covariance blow-up (non-finite or
    astronomically large entries) raises a numerical error.
    """
    if dt <= 0.0 or t_end < 0.0:
        raise DomainError("need dt > 0 and t_end >= 0")
    state = vacuum_state()
    if t_end == 0.0:
        return [state]

    n_steps = max(1, math.ceil(t_end / dt))
    h = t_end / n_steps
    if record_every is None:
        record_every = max(1, n_steps // 200)

    sys = drift_matrix(p)
    a, q = sys.drift, sys.diffusion

    def rhs(s: np.ndarray) -> np.ndarray:
        return a @ s + s @ a.T + q

    sigma = state.sigma.copy()
    out = [state]
    for step in range(1, n_steps + 1):
        k1 = rhs(sigma)
        k2 = rhs(sigma + 0.5 * h * k1)
        k3 = rhs(sigma + 0.5 * h * k2)
        k4 = rhs(sigma + h * k3)
        sigma = sigma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sigma = (sigma + sigma.T) / 2.0
        # above threshold the moments legitimately grow without bound;
        # only numerically meaningless states are rejected
        if not np.all(np.isfinite(sigma)) or np.abs(sigma).max() > 1e150:
            raise NumericalError(
                f"covariance blow-up at t = {step * h:.6g}; reduce dt"
            )
        if step % record_every == 0 or step == n_steps:
            out.append(MomentState(time=step * h, sigma=sigma.copy()))
    return out


def _branch_margin(p: SystemParams, j: int, beta: float) -> float:
    sys = drift_matrix(p.with_beta(beta))
    return float(np.linalg.eigvals(sys.pair_block(j)).real.max())


def threshold_search(
    p: SystemParams,
    branch: int,
    bracket: tuple[float, float],
    tol: float = 1e-8,
) -> float:
    """Critical drive of one branch by bisection on its stability margin."""
    if branch not in (1, 2):
        raise DomainError(f"branch must be 1 or 2, got {branch}")
    lo, hi = bracket
    if not lo < hi:
        raise DomainError("bracket must satisfy beta_lo < beta_hi")
    m_lo = _branch_margin(p, branch, lo)
    m_hi = _branch_margin(p, branch, hi)
    if not (m_lo < 0.0 <= m_hi):
        raise BracketingError(
            f"stability margin does not change sign over {bracket!r}: "
            f"margin({lo}) = {m_lo:.3e}, margin({hi}) = {m_hi:.3e}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _branch_margin(p, branch, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# verification campaigns
# ---------------------------------------------------------------------------

def _rel_err(value: complex, reference: complex) -> float:
    return abs(value - reference) / max(abs(reference), 1e-14)


def draw_params(rng: np.random.Generator, alpha_max: float = 0.95) -> SystemParams:
    """One random below-threshold operating point at figure-like scales.

    alpha_k ~ U[0, alpha_max]; omega, omega_0 ~ U[0.6, 1.4];
    kappa ~ U[0.05, 0.4]; delta ~ U[0, 0.5] capped so both mode
    frequencies stay positive; beta ~ U[0.05, 0.95] * min(beta_c1, beta_c2).
    """
    alpha = rng.uniform(0.0, alpha_max)
    omega = rng.uniform(0.6, 1.4)
    omega0 = rng.uniform(0.6, 1.4)
    kappa = rng.uniform(0.05, 0.4)
    delta_max = min(0.5, (omega - 0.05) / alpha) if alpha > 0 else 0.5
    delta = rng.uniform(0.0, delta_max)
    phi_n = rng.uniform(-math.pi, math.pi)
    probe = SystemParams(
        omega=omega, omega0=omega0, delta=delta, beta=0.0,
        alpha_k=alpha, kappa=kappa, phi_n=phi_n,
    )
    beta_c1, beta_c2 = critical_couplings(probe)
    beta = rng.uniform(0.05, 0.95) * min(beta_c1, beta_c2)
    return probe.with_beta(beta)


def moment_campaign(draws: int, seed: int) -> dict:
    """Closed forms vs Lyapunov solve, plus the dual coherence routes.

    For each draw, every pair moment of both branches is compared at
    relative tolerance 1e-8 and the first-order coherence
    (n_a1 - n_a2)/2 is compared against alpha_k * U at 1e-10.
    """
    if draws < 1:
        raise DomainError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    results = []
    worst_moment = 0.0
    worst_coherence = 0.0
    for i in range(draws):
        p = draw_params(rng)
        steady = lyapunov_steady(p)
        errs = {}
        for j in (1, 2):
            closed = pair_moments(j, p).as_dict()
            solved = steady.pair_moments(j).as_dict()
            for name, value in closed.items():
                errs[f"{name}_{j}"] = _rel_err(value, solved[name])
        _, coh, _, _ = cavity_moments(p)
        coh_err = _rel_err(coh, p.alpha_k * coherence_route_u(p))
        max_err = max(errs.values())
        worst_moment = max(worst_moment, max_err)
        worst_coherence = max(worst_coherence, coh_err)
        results.append(
            {
                "draw": i,
                "params": p.to_dict(),
                "max_rel_error": max_err,
                "worst_moment": max(errs, key=errs.get),
                "coherence_rel_error": coh_err,
                "pass": bool(max_err <= 1e-8 and coh_err <= 1e-10),
            }
        )
    return {
        "kind": "moments",
        "draws": draws,
        "seed": seed,
        "tolerance_moments": 1e-8,
        "tolerance_coherence": 1e-10,
        "max_rel_error_moments": worst_moment,
        "max_rel_error_coherence": worst_coherence,
        "passed": all(r["pass"] for r in results),
        "results": results,
    }


def threshold_campaign(draws: int, seed: int) -> dict:
    """Closed-form critical couplings vs bisection, both branches."""
    if draws < 1:
        raise DomainError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    results = []
    worst = 0.0
    for i in range(draws):
        p = draw_params(rng, alpha_max=0.9)
        beta_c = critical_couplings(p)
        errs = {}
        for j in (1, 2):
            numeric = threshold_search(
                p, j, bracket=(0.25 * beta_c[j - 1], 4.0 * beta_c[j - 1])
            )
            errs[f"beta_c{j}"] = abs(numeric - beta_c[j - 1]) / beta_c[j - 1]
        max_err = max(errs.values())
        worst = max(worst, max_err)
        results.append(
            {
                "draw": i,
                "params": p.to_dict(),
                "errors": errs,
                "pass": bool(max_err <= 1e-6),
            }
        )
    return {
        "kind": "thresholds",
        "draws": draws,
        "seed": seed,
        "tolerance": 1e-6,
        "max_rel_error": worst,
        "passed": all(r["pass"] for r in results),
        "results": results,
    }


def wiener_khinchin_campaign(points: list[SystemParams] | None = None) -> dict:
    """Integrated intracavity densities vs closed-form moments (1e-4)."""
    if points is None:
        points = [
            SystemParams(
                omega=1.0, omega0=1.0, delta=0.1 * math.pi, beta=beta,
                alpha_k=alpha, kappa=0.2,
            )
            for alpha in (0.1, 0.5)
            for beta in (0.1, 0.3)
        ]
    results = []
    worst = 0.0
    for p in points:
        errs = {}
        for j in (1, 2):
            closed = pair_moments(j, p)
            n_int = integrate_intracavity_spectrum(p, f"n_a{j}")
            sq_int = integrate_intracavity_spectrum(p, f"a_sq{j}")
            errs[f"n_a{j}"] = _rel_err(n_int, closed.n_a)
            errs[f"a_sq{j}"] = _rel_err(sq_int, closed.a_sq)
        max_err = max(errs.values())
        worst = max(worst, max_err)
        results.append(
            {
                "params": p.to_dict(),
                "errors": errs,
                "pass": bool(max_err <= 1e-4),
            }
        )
    return {
        "kind": "wiener-khinchin",
        "tolerance": 1e-4,
        "max_rel_error": worst,
        "passed": all(r["pass"] for r in results),
        "results": results,
    }


def run_verification(draws: int, seed: int) -> dict:
    """Full verification report: moments, thresholds, spectral integrals."""
    moments = moment_campaign(draws, seed)
    thresholds = threshold_campaign(min(draws, 20), seed + 1)
    wk = wiener_khinchin_campaign()
    return {
        "draws": draws,
        "seed": seed,
        "passed": bool(
            moments["passed"] and thresholds["passed"] and wk["passed"]
        ),
        "campaigns": [moments, thresholds, wk],
    }
