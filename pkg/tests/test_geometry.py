import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringcavity import (
    DomainError,
    EnsembleGeometry,
    alpha_from_positions,
    convergence_scan,
    load_positions_csv,
    sample_ensemble,
    save_positions_csv,
)
from ringcavity.geometry import DEFAULT_K_C


def test_single_atom_at_origin():
    geom = EnsembleGeometry(positions=np.zeros((1, 3)))
    assert alpha_from_positions(geom) == (1.0, 0.0)


def test_two_atom_cancellation():
    # phases 2 k.r of 0 and pi: exact phasor cancellation
    x_half = math.pi / (2.0 * DEFAULT_K_C[0])
    geom = EnsembleGeometry(positions=np.array([[0.0, 0, 0], [x_half, 0, 0]]))
    mag, phi = alpha_from_positions(geom)
    assert mag == pytest.approx(0.0, abs=1e-15)
    assert phi == 0.0


def test_empty_positions_rejected():
    with pytest.raises(DomainError):
        EnsembleGeometry(positions=np.zeros((0, 3)))


def test_large_uniform_ensemble_dephases():
    # 1e4 atoms over 10 wavelengths: random-phasor sum, |alpha| ~ 1/sqrt(N)
    geom = sample_ensemble(10_000, "uniform-segment", seed=42, length=10.0)
    mag, _ = alpha_from_positions(geom)
    assert mag < 3.0 / math.sqrt(10_000)


def test_point_distribution_and_zero_width_cloud():
    pt = sample_ensemble(5, "point", seed=3)
    assert np.all(pt.positions == 0.0)
    cloud = sample_ensemble(100, "gaussian-cloud", seed=7, sigma=0.0)
    assert np.all(cloud.positions == 0.0)
    assert alpha_from_positions(cloud) == (1.0, 0.0)


def test_sampling_is_deterministic():
    a = sample_ensemble(1000, "uniform-segment", seed=1, length=10.0)
    b = sample_ensemble(1000, "uniform-segment", seed=1, length=10.0)
    assert np.array_equal(a.positions, b.positions)


def test_sampler_input_validation():
    with pytest.raises(DomainError):
        sample_ensemble(0, "point", seed=1)
    with pytest.raises(DomainError):
        sample_ensemble(5, "uniform-segment", seed=1, length=-1.0)
    with pytest.raises(DomainError):
        sample_ensemble(5, "gaussian-cloud", seed=1, sigma=-0.5)
    with pytest.raises(DomainError):
        sample_ensemble(5, "ring", seed=1)


def test_convergence_scan_point_distribution():
    rows = convergence_scan("point", [10, 100], trials=5, seed=0)
    for _, mean, std in rows:
        assert mean == 1.0
        assert std == 0.0


def test_convergence_scan_scaling():
    # uniform over many wavelengths: mean |alpha| ~ sqrt(pi/4)/sqrt(n)
    rows = convergence_scan(
        "uniform-segment", [100, 1000, 10_000], trials=100, seed=1, length=10.0
    )
    for n, mean, _ in rows:
        expected = math.sqrt(math.pi / 4.0 / n)
        assert mean == pytest.approx(expected, rel=0.15)
    means = [m for _, m, _ in rows]
    assert means[0] > means[1] > means[2]


def test_small_gaussian_cloud_matches_characteristic_function():
    # characteristic function of an isotropic normal: exp(-2 |k|^2 sigma^2),
    # checked against brute-force averaging over many seeds
    sigma = 0.02
    k2 = sum(c * c for c in DEFAULT_K_C)
    expected = math.exp(-2.0 * k2 * sigma**2)
    mags = [
        alpha_from_positions(
            sample_ensemble(100, "gaussian-cloud", seed=s, sigma=sigma)
        )[0]
        for s in range(200)
    ]
    assert np.mean(mags) == pytest.approx(expected, abs=3e-3)


coords = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)
position_lists = st.lists(
    st.tuples(coords, coords, coords), min_size=1, max_size=30
)


@settings(max_examples=50, deadline=None)
@given(position_lists)
def test_alpha_bounded_by_one(pos):
    geom = EnsembleGeometry(positions=np.array(pos))
    mag, phi = alpha_from_positions(geom)
    assert 0.0 <= mag <= 1.0
    assert -math.pi < phi <= math.pi


@settings(max_examples=50, deadline=None)
@given(position_lists, coords, coords)
def test_translation_perpendicular_to_k_is_invariant(pos, dy, dz):
    geom = EnsembleGeometry(positions=np.array(pos))
    shifted = EnsembleGeometry(positions=geom.positions + np.array([0.0, dy, dz]))
    m0, p0 = alpha_from_positions(geom)
    m1, p1 = alpha_from_positions(shifted)
    assert m1 == pytest.approx(m0, abs=1e-12)
    assert p1 == pytest.approx(p0, abs=1e-9) or m0 < 1e-9


@settings(max_examples=50, deadline=None)
@given(position_lists, st.floats(-3.0, 3.0, allow_nan=False))
def test_translation_along_k_shifts_phase(pos, d):
    geom = EnsembleGeometry(positions=np.array(pos))
    shifted = EnsembleGeometry(positions=geom.positions + np.array([d, 0.0, 0.0]))
    m0, p0 = alpha_from_positions(geom)
    m1, p1 = alpha_from_positions(shifted)
    assert m1 == pytest.approx(m0, abs=1e-12)
    if m0 > 1e-9:
        expected = p0 + 2.0 * DEFAULT_K_C[0] * d
        assert math.cos(p1 - expected) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(position_lists, st.randoms(use_true_random=False))
def test_permutation_invariance(pos, rnd):
    perm = list(range(len(pos)))
    rnd.shuffle(perm)
    geom = EnsembleGeometry(positions=np.array(pos))
    shuffled = EnsembleGeometry(positions=geom.positions[perm])
    m0, p0 = alpha_from_positions(geom)
    m1, p1 = alpha_from_positions(shuffled)
    # invariant up to summation-order rounding
    assert m1 == pytest.approx(m0, abs=1e-13)
    if m0 > 1e-9:
        assert math.cos(p1 - p0) == pytest.approx(1.0, abs=1e-12)


def test_positions_csv_round_trip(tmp_path):
    geom = sample_ensemble(50, "gaussian-cloud", seed=11, sigma=0.3)
    path = tmp_path / "pos.csv"
    save_positions_csv(path, geom)
    header = path.read_text().splitlines()[0]
    assert header == "x,y,z"
    back = load_positions_csv(path)
    assert np.allclose(back.positions, geom.positions, rtol=0, atol=0)
    assert alpha_from_positions(back) == alpha_from_positions(geom)


def test_positions_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(DomainError):
        load_positions_csv(path)
