"""Phase-matching factor of a finite-size atomic ensemble.

The two counter-propagating cavity modes acquire a direct coupling whose
strength is set by the ensemble-averaged phasor

    alpha_k * exp(i phi_N) = (1/N) * sum_j exp(2i k_c . r_j),

where r_j are the atom positions and k_c the clockwise-mode wave vector.
For a point-like ensemble the phasors add in phase (alpha_k = 1); for an
ensemble spread over many wavelengths the sum is a random-phasor walk and
alpha_k ~ 1/sqrt(N), vanishing in the thermodynamic limit.

Positions are measured in units of the cavity wavelength, so the default
wave vector has magnitude 2*pi.  Sampling is reproducible: every sampler
takes an explicit integer seed and uses NumPy's PCG64 ``default_rng``
stream; per-trial seeds in :func:`convergence_scan` are spawned
deterministically from the root seed via ``SeedSequence``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

#: Wave vector of the clockwise mode for positions in wavelength units.
DEFAULT_K_C = (2.0 * np.pi, 0.0, 0.0)

#: Phasor magnitudes below this are treated as exact cancellation and the
#: (undefined) argument is reported as 0.
ZERO_PHASOR_TOL = 1e-12

DISTRIBUTIONS = ("point", "uniform-segment", "gaussian-cloud")


@dataclass(frozen=True, eq=False)
class EnsembleGeometry:
    """Atom positions (wavelength units) and the cavity wave vector."""

    positions: np.ndarray
    k_c: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_K_C))

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.size == 0 or pos.shape[0] < 1:
            raise DomainError("ensemble needs at least one atom position")
        if pos.shape[1] != 3:
            raise DomainError("positions must be 3-vectors")
        kc = np.asarray(self.k_c, dtype=float).reshape(3)
        pos.flags.writeable = False
        kc.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "k_c", kc)

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]


def alpha_from_positions(geom: EnsembleGeometry) -> tuple[float, float]:
    """Polar form of the phase-matching phasor sum.

    Returns ``(alpha_mag, phi_N)`` with ``alpha_mag = |(1/N) sum_j
    exp(2i k_c . r_j)|`` in [0, 1] and ``phi_N`` its argument in
    (-pi, pi], defined as 0 when the magnitude is below
    ``ZERO_PHASOR_TOL``.
    """
    phases = 2.0 * (geom.positions @ geom.k_c)
    phasor = np.exp(1j * phases).mean()
    mag = min(abs(phasor), 1.0)
    phi = float(np.angle(phasor)) if mag >= ZERO_PHASOR_TOL else 0.0
    return float(mag), phi


def sample_ensemble(
    n: int,
    dist: str,
    seed: int,
    *,
    length: float = 0.0,
    sigma: float = 0.0,
    k_c: Sequence[float] = DEFAULT_K_C,
) -> EnsembleGeometry:
    """Draw a reproducible ensemble from one of the canonical distributions.

    distributions
        ``point``            all atoms at the origin;
        ``uniform-segment``  uniform over a segment of the given ``length``
                             along the cavity axis (the k_c direction);
        ``gaussian-cloud``   isotropic normal with standard deviation
                             ``sigma`` per axis.

    Lengths are in cavity wavelengths.  Fixed ``(n, dist, seed)`` yields
    bit-identical positions.
    """
    if n < 1:
        raise DomainError("atom number must be >= 1")
    if dist not in DISTRIBUTIONS:
        raise DomainError(f"unknown distribution {dist!r}; choose from {DISTRIBUTIONS}")
    if length < 0.0:
        raise DomainError("segment length must be >= 0")
    if sigma < 0.0:
        raise DomainError("cloud sigma must be >= 0")

    kc = np.asarray(k_c, dtype=float).reshape(3)
    rng = np.random.default_rng(seed)
    if dist == "point":
        pos = np.zeros((n, 3))
    elif dist == "uniform-segment":
        knorm = np.linalg.norm(kc)
        axis = kc / knorm if knorm > 0 else np.array([1.0, 0.0, 0.0])
        s = rng.uniform(0.0, length, size=n)
        pos = np.outer(s, axis)
    else:  # gaussian-cloud
        pos = rng.normal(0.0, 1.0, size=(n, 3)) * sigma
    return EnsembleGeometry(positions=pos, k_c=kc)


def convergence_scan(
    dist: str,
    n_values: Iterable[int],
    trials: int,
    seed: int,
    *,
    length: float = 0.0,
    sigma: float = 0.0,
    k_c: Sequence[float] = DEFAULT_K_C,
) -> list[tuple[int, float, float]]:
    """Mean and standard deviation of |alpha_k| versus atom number.

    Runs ``trials`` independent ensembles per entry of ``n_values``; trial
    seeds are spawned deterministically from ``seed``.  Returns rows
    ``(n, mean, std)``.  For spreads much larger than a wavelength the mean
    decays like 1/sqrt(n).
    """
    n_values = [int(n) for n in n_values]
    if any(n < 1 for n in n_values):
        raise DomainError("all atom numbers must be >= 1")
    if trials < 1:
        raise DomainError("trials must be >= 1")

    children = np.random.SeedSequence(seed).spawn(len(n_values) * trials)
    rows = []
    for i, n in enumerate(n_values):
        mags = np.empty(trials)
        for t in range(trials):
            child = children[i * trials + t]
            geom = sample_ensemble(
                n, dist, child, length=length, sigma=sigma, k_c=k_c
            )
            mags[t] = alpha_from_positions(geom)[0]
        rows.append((n, float(mags.mean()), float(mags.std())))
    return rows


def save_positions_csv(path: str | Path, geom: EnsembleGeometry) -> None:
    """Write positions as CSV with header ``x,y,z``, one row per atom."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z"])
        for row in geom.positions:
            writer.writerow([f"{v:.17g}" for v in row])


def load_positions_csv(
    path: str | Path, k_c: Sequence[float] = DEFAULT_K_C
) -> EnsembleGeometry:
    """Read a positions CSV written by :func:`save_positions_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "y", "z"]:
            raise DomainError(f"{path}: expected CSV header 'x,y,z'")
        pos = [[float(v) for v in row] for row in reader if row]
    if not pos:
        raise DomainError(f"{path}: no atom positions found")
    return EnsembleGeometry(positions=np.array(pos), k_c=np.asarray(k_c, float))
