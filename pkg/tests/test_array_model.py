import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coprime_doa.array_model import (SnapshotSet, SourceScenario, make_geometry,
                                     model_covariance, sample_covariance, snr_to_noise_power,
                                     steering_matrix, steering_vector, synthesize_snapshots)
from coprime_doa.exceptions import CoprimeDOAError, GeometryError

COPRIME_PAIRS = [(5, 7), (3, 2), (2, 3), (4, 7), (7, 9)]
angles = st.floats(-np.pi, np.pi - 1e-9, allow_nan=False)


def test_geometry_5_7():
    g = make_geometry(5, 7)
    assert g.positions == (0, 5, 10, 15, 20, 25, 30, 7, 14, 21, 28)
    assert g.size == 11


def test_geometry_small_pair():
    g = make_geometry(3, 2)
    assert g.positions == (0, 3, 2, 4)
    assert g.subarray_positions(1).tolist() == [0, 3]
    assert g.subarray_positions(2).tolist() == [0, 2, 4]


@pytest.mark.parametrize("m,n", COPRIME_PAIRS)
def test_geometry_invariants(m, n):
    g = make_geometry(m, n)
    assert g.size == m + n - 1
    assert len(set(g.positions)) == g.size
    p1, p2 = g.subarray_positions(1), g.subarray_positions(2)
    assert len(p1) == n and np.all(np.diff(p1) == m)
    assert len(p2) == m and np.all(np.diff(p2) == n)
    assert g.subarray1_idx[0] == 0 and g.subarray2_idx[0] == 0


@pytest.mark.parametrize("m,n,word", [(4, 6, "coprime"), (1, 5, ">= 2"),
                                      (5, 5, "differ"), (2, 4, "coprime")])
def test_geometry_rejects(m, n, word):
    with pytest.raises(GeometryError, match=word):
        make_geometry(m, n)


def test_steering_zero_angle_is_ones():
    g = make_geometry(5, 7)
    np.testing.assert_array_equal(steering_vector(g, 0.0), np.ones(11))


def test_steering_element_at_position_five():
    g = make_geometry(5, 7)
    a = steering_vector(g, 0.1 * np.pi)
    assert abs(a[1] - 1j) < 1e-15
    assert a[0] == 1


def test_steering_subarray_phases():
    g = make_geometry(5, 7)
    a = steering_vector(g, 0.1 * np.pi, which=1)
    assert a.shape == (7,)
    expected = np.exp(1j * np.array([0, 0.5, 1, 1.5, 2, 2.5, 3]) * np.pi)
    np.testing.assert_allclose(a, expected, atol=1e-14)


@given(angles)
def test_steering_full_period(psi):
    g = make_geometry(5, 7)
    np.testing.assert_allclose(steering_vector(g, psi + 2 * np.pi), steering_vector(g, psi),
                               atol=1e-12)


@given(angles, st.integers(1, 6))
def test_steering_subarray_aliasing(psi, shift):
    g = make_geometry(5, 7)
    np.testing.assert_allclose(steering_vector(g, psi + shift * 2 * np.pi / 5, which=1),
                               steering_vector(g, psi, which=1), atol=1e-11)
    np.testing.assert_allclose(steering_vector(g, psi + shift * 2 * np.pi / 7, which=2),
                               steering_vector(g, psi, which=2), atol=1e-11)


def test_noiseless_snapshots_are_rank_one():
    g = make_geometry(5, 7)
    sc = SourceScenario((0.1 * np.pi,), (1.0,), 0.0)
    y = synthesize_snapshots(g, sc, 50, 3).data
    a = steering_vector(g, 0.1 * np.pi)
    coef = y[0]
    np.testing.assert_allclose(y, np.outer(a, coef), atol=1e-12)


def test_snapshots_deterministic():
    g = make_geometry(5, 7)
    sc = SourceScenario.from_snr((0.1 * np.pi, -0.4 * np.pi), 3.0)
    a = synthesize_snapshots(g, sc, 40, 11).data
    b = synthesize_snapshots(g, sc, 40, 11).data
    assert a.tobytes() == b.tobytes()
    c = synthesize_snapshots(g, sc, 40, 12).data
    assert a.tobytes() != c.tobytes()


def test_snapshot_covariance_converges():
    g = make_geometry(5, 7)
    sc = SourceScenario((0.1 * np.pi,), (1.0,), 1.0)
    snaps = synthesize_snapshots(g, sc, 100_000, 5)
    r = sample_covariance(snaps)
    target = model_covariance(g, sc)
    assert np.linalg.norm(r - target) / np.linalg.norm(target) < 0.05


def test_snapshot_circular_symmetry():
    g = make_geometry(5, 7)
    sc = SourceScenario((0.1 * np.pi,), (1.0,), 1.0)
    y = synthesize_snapshots(g, sc, 100_000, 8).data
    pseudo = y @ y.T / y.shape[1]
    herm = y @ y.conj().T / y.shape[1]
    assert np.linalg.norm(pseudo) <= 0.05 * np.linalg.norm(herm)


def test_sample_covariance_single_snapshot():
    r = sample_covariance(np.array([[1.0], [1j]]))
    np.testing.assert_allclose(r, [[1, -1j], [1j, 1]], atol=0)


def test_sample_covariance_zero():
    assert not np.any(sample_covariance(np.zeros((4, 6), dtype=complex)))


def test_sample_covariance_matches_outer_product_sum():
    rng = np.random.default_rng(0)
    y = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    brute = sum(np.outer(y[:, k], y[:, k].conj()) for k in range(3)) / 3
    np.testing.assert_allclose(sample_covariance(y), brute, atol=1e-14)


@settings(max_examples=30)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_sample_covariance_hermitian_psd(k, seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((6, k)) + 1j * rng.standard_normal((6, k))
    r = sample_covariance(y)
    np.testing.assert_array_equal(r, r.conj().T)
    assert np.linalg.eigvalsh(r).min() >= -1e-10 * np.trace(r).real


def test_snr_convention():
    assert snr_to_noise_power(0) == 1.0
    assert snr_to_noise_power(10) == pytest.approx(0.1)
    sc = SourceScenario.from_snr([0.2], -12)
    assert sc.powers == (1.0,)
    assert sc.noise_power == pytest.approx(10 ** 1.2)


@pytest.mark.parametrize("kwargs", [
    dict(doas=(), powers=(), noise_power=1.0),
    dict(doas=(0.1, 0.1), powers=(1, 1), noise_power=1.0),
    dict(doas=(0.1,), powers=(0,), noise_power=1.0),
    dict(doas=(0.1,), powers=(1,), noise_power=-1.0),
    dict(doas=(4.0,), powers=(1,), noise_power=1.0),
])
def test_scenario_validation(kwargs):
    with pytest.raises(CoprimeDOAError):
        SourceScenario(**kwargs)


def test_snapshot_csv_roundtrip(tmp_path):
    data = np.array([[1 + 2j, -0.5j], [3.25, -1 - 1j]])
    path = tmp_path / "s.csv"
    SnapshotSet(data).to_csv(path)
    rows = path.read_text().strip().splitlines()
    parsed = np.array([[complex(c) for c in row.split(",")] for row in rows])
    np.testing.assert_array_equal(parsed, data)


def test_steering_matrix_columns():
    g = make_geometry(3, 2)
    a = steering_matrix(g, [0.3, -1.0])
    np.testing.assert_allclose(a[:, 1], steering_vector(g, -1.0))
