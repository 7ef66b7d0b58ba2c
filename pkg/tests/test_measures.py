import numpy as np
import pytest

from otlaplace.errors import DimensionMismatch, EmptyInput, InvalidSpec, NonFiniteCoordinate
from otlaplace.measures import (
    EmpiricalMeasure,
    GaussianFamilySpec,
    LabeledDataset,
    empirical_from_points,
    sample_gaussian_family,
    sample_translation_family,
)


def test_empirical_from_points_basic():
    mu = empirical_from_points([[0, 0], [1, 1]])
    assert mu.m == 2 and mu.ambient_dim == 2

    dirac = empirical_from_points([[3]])
    assert dirac.m == 1 and dirac.ambient_dim == 1


def test_empirical_from_points_errors():
    with pytest.raises(EmptyInput):
        empirical_from_points([])
    with pytest.raises(DimensionMismatch):
        empirical_from_points([[0, 0], [1]])
    with pytest.raises(NonFiniteCoordinate):
        empirical_from_points([[0.0, np.nan]])
    with pytest.raises(NonFiniteCoordinate):
        empirical_from_points([[np.inf]])


def test_labeled_dataset_invariants():
    measures = [EmpiricalMeasure([[float(i)]]) for i in range(3)]
    ds = LabeledDataset(measures, [0, 1, None], n_classes=2)
    assert ds.n == 3 and ds.n_labeled == 2

    with pytest.raises(InvalidSpec):  # label after a gap
        LabeledDataset(measures, [0, None, 1], n_classes=2)
    with pytest.raises(InvalidSpec):  # label out of range
        LabeledDataset(measures, [5, None, None], n_classes=2)
    with pytest.raises(DimensionMismatch):
        LabeledDataset([measures[0], EmpiricalMeasure([[0.0, 0.0]])], [0, 0], n_classes=1)


def test_gaussian_spec_validation():
    GaussianFamilySpec(n=5, m=3)
    with pytest.raises(InvalidSpec):
        GaussianFamilySpec(n=5, m=3, zeta_sq=0.0)
    with pytest.raises(InvalidSpec):  # density mass != 1
        GaussianFamilySpec(n=5, m=3, densities=(0.5, 0.5, 0.5))


def test_gaussian_family_determinism():
    spec = GaussianFamilySpec(n=2, m=3)
    a = sample_gaussian_family(spec, seed=123)
    b = sample_gaussian_family(spec, seed=123)
    for mu_a, mu_b in zip(a.measures, b.measures):
        assert np.array_equal(mu_a.points, mu_b.points)
    assert a.labels == b.labels
    c = sample_gaussian_family(spec, seed=124)
    assert not np.array_equal(a.measures[0].points, c.measures[0].points)


def test_gaussian_family_shapes_and_labels():
    ds = sample_gaussian_family(GaussianFamilySpec(n=40, m=7), seed=1)
    assert ds.n == 40 and ds.n_labeled == 40 and ds.n_classes == 2
    assert all(mu.m == 7 and mu.ambient_dim == 2 for mu in ds.measures)


def test_gaussian_label_balance_monte_carlo():
    # the mean density is symmetric about zero, so P(label=1) = 1/2;
    # binomial 3 sigma bound at n = 10000 is 0.015
    n = 10000
    ds = sample_gaussian_family(GaussianFamilySpec(n=n, m=1), seed=77)
    frac = np.mean([lab == 1 for lab in ds.labels])
    assert abs(frac - 0.5) <= 3 * 0.5 / np.sqrt(n)


def test_gaussian_mean_density_masses():
    # mass of [-10,-8] is (1/6)*2 = 1/3; recover the sampled means by
    # shrinking the per-point noise to effectively zero
    n = 10000
    ds = sample_gaussian_family(
        GaussianFamilySpec(n=n, m=1, zeta_sq=1e-12), seed=78
    )
    c1 = np.array([mu.points[0, 0] for mu in ds.measures])
    frac = np.mean((c1 >= -10) & (c1 <= -8))
    assert abs(frac - 1 / 3) <= 0.02
    # and nothing lands outside the support
    assert np.all((c1 >= -10) & (c1 <= 10))


def test_translation_family_examples():
    base = EmpiricalMeasure([[0.0, 0.0]])
    ds, thetas = sample_translation_family(base, [[0.0], [1.0]])
    assert np.allclose(ds.measures[0].points, [[0, 0]])
    assert np.allclose(ds.measures[1].points, [[1, 0]])
    assert thetas.shape == (2, 1)

    base4 = EmpiricalMeasure(np.arange(8.0).reshape(4, 2))
    ds, _ = sample_translation_family(base4, [[0.5]])
    assert np.allclose(ds.measures[0].points, base4.points + [0.5, 0.0])

    ds, _ = sample_translation_family(base4, np.zeros((3, 2)))
    for mu in ds.measures:
        assert np.array_equal(mu.points, base4.points)


def test_translation_family_resampling_and_errors():
    base = EmpiricalMeasure(np.arange(10.0)[:, None])
    ds, _ = sample_translation_family(base, [[0.25]], resample_m=64, seed=9)
    assert ds.measures[0].m == 64
    # resampled points are shifted base points
    shifted = set((base.points + 0.25).ravel().tolist())
    assert set(ds.measures[0].points.ravel().tolist()) <= shifted

    with pytest.raises(DimensionMismatch):
        sample_translation_family(base, [[1.0, 2.0]])  # d > k
