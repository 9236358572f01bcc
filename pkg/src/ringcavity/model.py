"""Effective two-pair model of the driven ensemble-cavity system.

Below threshold the dynamics reduce to two decoupled harmonic pairs.  Pair
j couples a cavity superposition mode a_j (frequency Omega_j) to a
collective bosonic mode d_j (frequency omega_0) with strength lambda_j:

    Omega_1 = omega + alpha_k * delta      lambda_1 = beta * sqrt(1 + alpha_k)
    Omega_2 = omega - alpha_k * delta      lambda_2 = beta * sqrt(1 - alpha_k)

Pair 1 couples through the in-phase quadratures (x_a1 x_d1), pair 2 through
the out-of-phase quadratures (p-type).  Only the cavity modes are damped
(rate kappa, vacuum input noise).  Each pair loses linear stability at a
critical drive

    beta_cj = sqrt(omega_0 (kappa^2 + Omega_j^2) / Omega_j) / (2 sqrt(1 +/- alpha_k)),

equivalently when the gap h_j = omega_0 (kappa^2 + Omega_j^2)
- 4 lambda_j^2 Omega_j changes sign.

Rates are plain numbers in a common unit; the bundled presets use the
normalization 5*kappa = 1 (kappa = 0.2).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DomainError, UnsupportedConfigError

#: Relative tolerance for rejecting asymmetric drive strengths.
BETA_SYMMETRY_TOL = 1e-12

#: Ratio |Delta| / max(Omega_u, Omega_s, g) below which the dispersive
#: approximation is considered shaky (warn-only).
DISPERSIVE_RATIO = 10.0

#: Quadrature ordering of the drift/diffusion matrices.
QUADRATURE_BASIS = (
    "x_a1", "p_a1", "x_d1", "p_d1",
    "x_a2", "p_a2", "x_d2", "p_d2",
)


@dataclass(frozen=True)
class RawParams:
    """Raw physical inputs of the driven four-level ensemble.

    ``delta_e`` is the common detuning of both drive lasers and the cavity
    from the excited states; ``omega_1`` the ground-state splitting;
    ``omega_d`` half the difference of the two laser frequencies.
    """

    g: float
    n_atoms: int
    delta_e: float
    omega_u: float
    omega_s: float
    delta_c: float
    omega_1: float
    omega_d: float
    kappa: float
    alpha_k: float = 1.0
    phi_n: float = 0.0

    def __post_init__(self):
        if self.n_atoms < 1:
            raise DomainError("n_atoms must be >= 1")
        if self.kappa <= 0.0:
            raise DomainError("kappa must be positive")
        if not 0.0 <= self.alpha_k <= 1.0:
            raise DomainError("alpha_k must lie in [0, 1]")

    def dispersive_ok(self) -> bool:
        drive = max(abs(self.omega_u), abs(self.omega_s), abs(self.g))
        return drive == 0.0 or abs(self.delta_e) >= DISPERSIVE_RATIO * drive


@dataclass(frozen=True)
class SystemParams:
    """Effective-model parameters (all rates in one common unit)."""

    omega: float
    omega0: float
    delta: float
    beta: float
    alpha_k: float
    kappa: float
    phi_n: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise DomainError("kappa must be positive")
        if not 0.0 <= self.alpha_k <= 1.0:
            raise DomainError("alpha_k must lie in [0, 1]")
        if self.beta < 0.0:
            raise DomainError("beta must be >= 0")

    # derived couplings and shifted mode frequencies
    @property
    def lambda_1(self) -> float:
        return self.beta * math.sqrt(1.0 + self.alpha_k)

    @property
    def lambda_2(self) -> float:
        return self.beta * math.sqrt(1.0 - self.alpha_k)

    @property
    def Omega_1(self) -> float:
        return self.omega + self.alpha_k * self.delta

    @property
    def Omega_2(self) -> float:
        return self.omega - self.alpha_k * self.delta

    def lambda_j(self, j: int) -> float:
        return (self.lambda_1, self.lambda_2)[_branch_index(j)]

    def Omega_j(self, j: int) -> float:
        return (self.Omega_1, self.Omega_2)[_branch_index(j)]

    def with_beta(self, beta: float) -> "SystemParams":
        return replace(self, beta=beta)

    # -- JSON round trip (exact key names are part of the file format) --
    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "omega0": self.omega0,
            "delta": self.delta,
            "beta": self.beta,
            "alpha_k": self.alpha_k,
            "phi_N": self.phi_n,
            "kappa": self.kappa,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemParams":
        try:
            return cls(
                omega=float(d["omega"]),
                omega0=float(d["omega0"]),
                delta=float(d["delta"]),
                beta=float(d["beta"]),
                alpha_k=float(d["alpha_k"]),
                kappa=float(d["kappa"]),
                phi_n=float(d.get("phi_N", 0.0)),
            )
        except KeyError as exc:
            raise DomainError(f"parameter record is missing key {exc}") from exc

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "SystemParams":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _branch_index(j: int) -> int:
    if j not in (1, 2):
        raise DomainError(f"branch must be 1 or 2, got {j}")
    return j - 1


def derive_params(raw: RawParams) -> SystemParams:
    """Map raw atomic/drive inputs onto the effective-model record.

    omega  = Delta_c + N g^2 / Delta_e          (cavity detuning + shift)
    omega0 = omega_1 - omega_d + (Omega_u^2 - Omega_s^2) / (4 Delta_e)
    beta   = sqrt(N) g Omega_u / (2 Delta_e)    (requires Omega_u = Omega_s)
    delta  = N g^2 / Delta_e

    Asymmetric drives (beta_u != beta_s) are rejected: all closed-form
    observables in this package assume a single effective drive strength.
    """
    if raw.delta_e == 0.0:
        raise DomainError("excited-state detuning must be nonzero")
    if not raw.dispersive_ok():
        warnings.warn(
            "detuning is not large compared to the drives; the dispersive "
            "effective model may be inaccurate",
            stacklevel=2,
        )
    beta_u = math.sqrt(raw.n_atoms) * raw.g * raw.omega_u / (2.0 * raw.delta_e)
    beta_s = math.sqrt(raw.n_atoms) * raw.g * raw.omega_s / (2.0 * raw.delta_e)
    scale = max(1.0, abs(beta_u), abs(beta_s))
    if abs(beta_u - beta_s) > BETA_SYMMETRY_TOL * scale:
        raise UnsupportedConfigError(
            f"asymmetric effective drives beta_u={beta_u!r}, beta_s={beta_s!r} "
            "are not supported; set Omega_u = Omega_s"
        )
    delta = raw.n_atoms * raw.g**2 / raw.delta_e
    omega = raw.delta_c + delta
    omega0 = raw.omega_1 - raw.omega_d + (raw.omega_u**2 - raw.omega_s**2) / (
        4.0 * raw.delta_e
    )
    return SystemParams(
        omega=omega,
        omega0=omega0,
        delta=delta,
        beta=abs(beta_u),
        alpha_k=raw.alpha_k,
        kappa=raw.kappa,
        phi_n=raw.phi_n,
    )


def stability_gap(p: SystemParams, j: int) -> float:
    """h_j = omega_0 (kappa^2 + Omega_j^2) - 4 lambda_j^2 Omega_j.

    Positive exactly when branch j is below its critical drive.
    """
    lam = p.lambda_j(j)
    Om = p.Omega_j(j)
    return p.omega0 * (p.kappa**2 + Om**2) - 4.0 * lam**2 * Om


def critical_couplings(p: SystemParams) -> tuple[float, float]:
    """Critical drive strengths (beta_c1, beta_c2) of the two pairs.

    beta_c2 is ``inf`` at alpha_k = 1 (pair 2 decouples entirely) and
    ``nan`` when Omega_2 <= 0 (no finite threshold on that branch).
    """
    if p.Omega_1 <= 0.0:
        raise DomainError(
            f"branch 1 mode frequency Omega_1 = {p.Omega_1:.6g} must be positive"
        )
    beta_c1 = 0.5 * math.sqrt(
        p.omega0 * (p.kappa**2 + p.Omega_1**2) / p.Omega_1
    ) / math.sqrt(1.0 + p.alpha_k)
    if p.alpha_k == 1.0:
        return beta_c1, math.inf
    if p.Omega_2 <= 0.0:
        return beta_c1, math.nan
    beta_c2 = 0.5 * math.sqrt(
        p.omega0 * (p.kappa**2 + p.Omega_2**2) / p.Omega_2
    ) / math.sqrt(1.0 - p.alpha_k)
    return beta_c1, beta_c2


@dataclass(frozen=True, eq=False)
class DriftSystem:
    """Drift and diffusion of the quadrature first/second-moment equations.

    Basis order is :data:`QUADRATURE_BASIS`; d sigma/dt = A sigma
    + sigma A^T + Q.  The two pair blocks are exactly decoupled, and only
    the cavity quadratures carry input noise.
    """

    drift: np.ndarray
    diffusion: np.ndarray

    def pair_block(self, j: int) -> np.ndarray:
        i = 4 * _branch_index(j)
        return self.drift[i : i + 4, i : i + 4]

    def pair_diffusion(self, j: int) -> np.ndarray:
        i = 4 * _branch_index(j)
        return self.diffusion[i : i + 4, i : i + 4]


def _pair_drift(p: SystemParams, j: int) -> np.ndarray:
    lam = p.lambda_j(j)
    Om = p.Omega_j(j)
    k, w0 = p.kappa, p.omega0
    if j == 1:
        # x-x coupling: the interaction enters p_a and p_d equations
        return np.array(
            [
                [-k, Om, 0.0, 0.0],
                [-Om, -k, -2.0 * lam, 0.0],
                [0.0, 0.0, 0.0, w0],
                [-2.0 * lam, 0.0, -w0, 0.0],
            ]
        )
    # p-p coupling: the interaction enters x_a and x_d equations
    return np.array(
        [
            [-k, Om, 0.0, 2.0 * lam],
            [-Om, -k, 0.0, 0.0],
            [0.0, 2.0 * lam, 0.0, w0],
            [0.0, 0.0, -w0, 0.0],
        ]
    )


def drift_matrix(p: SystemParams) -> DriftSystem:
    """Assemble the 8x8 drift and diffusion matrices of both pairs.

    The diffusion is 2*kappa times the vacuum input variance 1/2 on each
    cavity quadrature; collective modes are undamped and noiseless.
    """
    A = np.zeros((8, 8))
    Q = np.zeros((8, 8))
    for j in (1, 2):
        i = 4 * (j - 1)
        A[i : i + 4, i : i + 4] = _pair_drift(p, j)
        Q[i, i] = p.kappa
        Q[i + 1, i + 1] = p.kappa
    return DriftSystem(drift=A, diffusion=Q)


def stability_margin(p: SystemParams) -> float:
    """Largest real part over the drift eigenvalues.

    Negative exactly when both pairs are strictly below threshold (for
    lambda_j > 0); an uncoupled, undamped collective mode is marginal and
    yields 0.
    """
    sys = drift_matrix(p)
    margins = [
        float(np.linalg.eigvals(sys.pair_block(j)).real.max()) for j in (1, 2)
    ]
    return max(margins)
