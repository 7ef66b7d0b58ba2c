"""Empirical probability measures, labeled datasets and synthetic samplers.

An empirical measure is m points in R^k carrying uniform mass 1/m each.  A
labeled dataset is n such measures where the first n_labeled entries carry a
known class id and the rest are unlabeled.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidSpec,
    NonFiniteCoordinate,
)
from .rng import make_rng


@dataclass(frozen=True)
class EmpiricalMeasure:
    """m points in R^k with uniform mass 1/m per point."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.size == 0:
            raise EmptyInput("measure needs at least one point")
        if not np.isfinite(pts).all():
            raise NonFiniteCoordinate("measure contains non-finite coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def shifted(self, v) -> "EmpiricalMeasure":
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.ambient_dim,):
            raise DimensionMismatch("shift vector has wrong dimension")
        return EmpiricalMeasure(self.points + v)


def empirical_from_points(points) -> EmpiricalMeasure:
    """Build an EmpiricalMeasure from a list of vectors.

    Raises EmptyInput, DimensionMismatch (ragged rows) or
    NonFiniteCoordinate.
    """
    if isinstance(points, np.ndarray):
        arr = points
    else:
        points = list(points)
        if len(points) == 0:
            raise EmptyInput("no points given")
        lengths = {len(np.atleast_1d(p)) for p in points}
        if len(lengths) != 1:
            raise DimensionMismatch("points have inconsistent dimensions")
        arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("no points given")
    return EmpiricalMeasure(arr)


@dataclass
class LabeledDataset:
    """n measures with class ids on the first n_labeled entries.

    labels[i] is an int in [0, n_classes) for i < n_labeled and None after;
    all measures share one ambient dimension.
    """

    measures: list
    labels: list
    n_classes: int

    def __post_init__(self):
        if len(self.measures) == 0:
            raise EmptyInput("dataset needs at least one measure")
        if len(self.labels) != len(self.measures):
            raise DimensionMismatch("labels and measures lengths differ")
        dims = {mu.ambient_dim for mu in self.measures}
        if len(dims) != 1:
            raise DimensionMismatch("measures have mixed ambient dimensions")
        known = [lab is not None for lab in self.labels]
        n_lab = sum(known)
        if any(known[n_lab:]):
            raise InvalidSpec("known labels must occupy the leading indices")
        for lab in self.labels[:n_lab]:
            if not (0 <= int(lab) < self.n_classes):
                raise InvalidSpec("label %r outside [0, %d)" % (lab, self.n_classes))

    @property
    def n(self) -> int:
        return len(self.measures)

    @property
    def n_labeled(self) -> int:
        return sum(1 for lab in self.labels if lab is not None)

    @property
    def ambient_dim(self) -> int:
        return self.measures[0].ambient_dim

    def point_counts(self) -> np.ndarray:
        return np.array([mu.m for mu in self.measures])


@dataclass(frozen=True)
class GaussianFamilySpec:
    """Synthetic 2-D Gaussian mixture family.

    Each of the n samples is an m-point draw from N(c_i, zeta_sq * I_2).
    The first mean coordinate follows a piecewise-constant density given by
    ``breakpoints``/``densities``; the second is uniform on ``c2_range``.
    The class id is 0 when the first mean coordinate is negative, else 1.
    """

    n: int
    m: int
    zeta_sq: float = 1.0
    breakpoints: tuple = (-10.0, -8.0, 8.0, 10.0)
    densities: tuple = (1.0 / 6.0, 1.0 / 48.0, 1.0 / 6.0)
    c2_range: tuple = (-10.0, 10.0)

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=np.float64)
        dens = np.asarray(self.densities, dtype=np.float64)
        if self.n < 1 or self.m < 1:
            raise InvalidSpec("n and m must be positive")
        if not self.zeta_sq > 0:
            raise InvalidSpec("zeta_sq must be positive")
        if bp.ndim != 1 or len(bp) != len(dens) + 1 or np.any(np.diff(bp) <= 0):
            raise InvalidSpec("breakpoints must be increasing with one density per cell")
        if np.any(dens < 0):
            raise InvalidSpec("densities must be nonnegative")
        total = float(np.sum(dens * np.diff(bp)))
        if abs(total - 1.0) > 1e-9:
            raise InvalidSpec("density must integrate to 1, got %g" % total)
        if not self.c2_range[0] < self.c2_range[1]:
            raise InvalidSpec("c2_range must be an increasing pair")

    def segment_masses(self) -> np.ndarray:
        bp = np.asarray(self.breakpoints)
        return np.asarray(self.densities) * np.diff(bp)


def _sample_piecewise(spec: GaussianFamilySpec, u: np.ndarray) -> np.ndarray:
    # inverse CDF of the piecewise-constant density; exact, no rejection
    bp = np.asarray(spec.breakpoints)
    dens = np.asarray(spec.densities)
    masses = spec.segment_masses()
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    cum[-1] = 1.0
    seg = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(dens) - 1)
    return bp[seg] + (u - cum[seg]) / dens[seg]


def sample_gaussian_family(spec: GaussianFamilySpec, seed: int) -> LabeledDataset:
    """Draw the synthetic Gaussian dataset; deterministic in (spec, seed).

    All n labels are populated; experiment runners mask a fraction.
    """
    rng = make_rng(seed)
    u = rng.random(spec.n)
    c1 = _sample_piecewise(spec, u)
    c2 = rng.uniform(spec.c2_range[0], spec.c2_range[1], spec.n)
    noise = rng.standard_normal((spec.n, spec.m, 2))
    scale = np.sqrt(spec.zeta_sq)
    centers = np.stack([c1, c2], axis=1)
    measures = [
        EmpiricalMeasure(centers[i] + scale * noise[i]) for i in range(spec.n)
    ]
    labels = [0 if c < 0 else 1 for c in c1]
    return LabeledDataset(measures, labels, n_classes=2)


def sample_translation_family(
    base: EmpiricalMeasure,
    thetas,
    resample_m: int | None = None,
    seed: int = 0,
):
    """Translate a base cloud by each theta (zero-padded to the ambient dim).

    With ``resample_m`` set, each translated cloud is replaced by that many
    uniform-with-replacement draws from it, emulating the empirical
    perturbation of a sampled measure.  Returns (dataset, thetas).
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.ndim == 1:
        thetas = thetas[:, None]
    d = thetas.shape[1]
    k = base.ambient_dim
    if d > k:
        raise DimensionMismatch("theta dimension %d exceeds ambient %d" % (d, k))
    shifts = np.zeros((thetas.shape[0], k))
    shifts[:, :d] = thetas
    rng = make_rng(seed)
    measures = []
    for shift in shifts:
        pts = base.points + shift
        if resample_m is not None:
            idx = rng.integers(0, base.m, size=int(resample_m))
            pts = pts[idx]
        measures.append(EmpiricalMeasure(pts))
    labels = [0] * len(measures)
    dataset = LabeledDataset(measures, labels, n_classes=1)
    return dataset, thetas
