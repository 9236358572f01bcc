"""Finite-size atomic ensemble in a ring cavity: steady-state coherence,
photon correlations, and spectral two-mode squeezing/entanglement of the
counter-propagating cavity modes, with independent numerical oracles."""

from .errors import (
    AboveThresholdError,
    BracketingError,
    DomainError,
    NumericalError,
    RingCavityError,
    UndefinedObservableError,
    UnsupportedConfigError,
)
from .geometry import (
    EnsembleGeometry,
    alpha_from_positions,
    convergence_scan,
    load_positions_csv,
    sample_ensemble,
    save_positions_csv,
)
from .model import (
    DriftSystem,
    RawParams,
    SystemParams,
    critical_couplings,
    derive_params,
    drift_matrix,
    stability_gap,
    stability_margin,
)
from .oracle import (
    MomentState,
    evolve_moments,
    lyapunov_steady,
    run_verification,
    threshold_search,
)
from .spectra import (
    OutputCovariancePoint,
    SpectralPoint,
    TransferPoint,
    integrate_intracavity_spectrum,
    intracavity_density,
    log_negativity,
    optimize_theta,
    output_covariance,
    resonances,
    spectrum_scan,
    squeezing_spectrum,
    symplectic_eigenvalues,
    transfer_functions,
)
from .steady import (
    CavityObservables,
    PairMoments,
    anomalous_coherences,
    cauchy_schwarz,
    cavity_moments,
    cavity_observables,
    coherence_degree,
    coherence_route_u,
    g2_functions,
    pair_moments,
    total_field_variance_sum,
)

__version__ = "0.1.0"

__all__ = [
    "AboveThresholdError",
    "BracketingError",
    "CavityObservables",
    "DomainError",
    "DriftSystem",
    "EnsembleGeometry",
    "MomentState",
    "NumericalError",
    "OutputCovariancePoint",
    "PairMoments",
    "RawParams",
    "RingCavityError",
    "SpectralPoint",
    "SystemParams",
    "TransferPoint",
    "UndefinedObservableError",
    "UnsupportedConfigError",
    "alpha_from_positions",
    "anomalous_coherences",
    "cauchy_schwarz",
    "cavity_moments",
    "cavity_observables",
    "coherence_degree",
    "coherence_route_u",
    "convergence_scan",
    "critical_couplings",
    "derive_params",
    "drift_matrix",
    "evolve_moments",
    "g2_functions",
    "integrate_intracavity_spectrum",
    "intracavity_density",
    "load_positions_csv",
    "log_negativity",
    "lyapunov_steady",
    "optimize_theta",
    "output_covariance",
    "pair_moments",
    "resonances",
    "run_verification",
    "sample_ensemble",
    "save_positions_csv",
    "spectrum_scan",
    "squeezing_spectrum",
    "stability_gap",
    "stability_margin",
    "symplectic_eigenvalues",
    "threshold_search",
    "total_field_variance_sum",
    "transfer_functions",
]
