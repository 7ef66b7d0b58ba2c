"""Transportation-L^p distance between (function, measure) pairs.

The distance couples the supports with lifted cost d(x, y)^p + |f(x)-g(y)|^p
and returns the p-th root of the optimal value.  Ground atoms are either
Euclidean points or empirical measures compared by exact 2-Wasserstein
distance; in the latter case the ground matrix can be passed in to reuse
across calls.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels
from .errors import IncompatibleGround, InvalidSpec, SizeLimitExceeded
from .measures import EmpiricalMeasure
from .transport import min_cost_flow_dense, w2_exact

_PAIR_LIMIT = 1_000_000
_DENOM_CAP = 1_000_000


@dataclass
class FunctionOverMeasure:
    """A real function sampled on the atoms of a discrete measure.

    support: (M, k) array of Euclidean atoms, or a list of
    EmpiricalMeasure atoms (ground distances are then 2-Wasserstein).
    masses must be nonnegative and sum to one; values are the function
    samples.
    """

    support: object
    masses: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.masses = np.asarray(self.masses, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if isinstance(self.support, (list, tuple)):
            if not all(isinstance(a, EmpiricalMeasure) for a in self.support):
                raise InvalidSpec("list support must hold EmpiricalMeasure atoms")
            self.ground = "w2"
            m = len(self.support)
        else:
            self.support = np.atleast_2d(np.asarray(self.support, dtype=np.float64))
            self.ground = "euclidean"
            m = self.support.shape[0]
        if self.masses.shape != (m,) or self.values.shape != (m,):
            raise InvalidSpec("masses and values must have one entry per atom")
        if (self.masses < 0).any() or abs(self.masses.sum() - 1.0) > 1e-12:
            raise InvalidSpec("masses must be nonnegative and sum to 1")
        if not np.isfinite(self.values).all():
            raise InvalidSpec("values must be finite")

    @property
    def size(self) -> int:
        return len(self.masses)


def _ground_matrix(a: FunctionOverMeasure, b: FunctionOverMeasure) -> np.ndarray:
    if a.ground != b.ground:
        raise IncompatibleGround("mixed Euclidean / Wasserstein supports")
    if a.ground == "euclidean":
        if a.support.shape[1] != b.support.shape[1]:
            raise IncompatibleGround("Euclidean atoms of different dimension")
        return cdist(a.support, b.support)
    dims = {mu.ambient_dim for mu in a.support} | {mu.ambient_dim for mu in b.support}
    if len(dims) != 1:
        raise IncompatibleGround("measure atoms of different ambient dimension")
    d = np.empty((a.size, b.size))
    for i, mu in enumerate(a.support):
        for j, nu in enumerate(b.support):
            d[i, j], _ = w2_exact(mu, nu)
    return d


def _rational_units(masses: np.ndarray):
    fracs = [Fraction(float(x)).limit_denominator(_DENOM_CAP) for x in masses]
    if any(abs(float(f) - x) > 1e-12 for f, x in zip(fracs, masses)):
        return None
    if sum(fracs) != 1:
        return None
    denom = lcm(*[f.denominator for f in fracs]) if fracs else 1
    if denom > _DENOM_CAP:
        return None
    units = np.array([int(f * denom) for f in fracs], dtype=np.float64)
    return units, denom


def _orientation_key(a: FunctionOverMeasure) -> tuple:
    if a.ground == "euclidean":
        support = a.support.tobytes()
    else:
        support = b"".join(mu.points.tobytes() for mu in a.support)
    return (a.size, a.values.tobytes(), a.masses.tobytes(), support)


def tlp_distance(
    a: FunctionOverMeasure,
    b: FunctionOverMeasure,
    p: float = 2.0,
    ground_matrix=None,
) -> float:
    """Exact TL^p distance between two (function, measure) pairs.

    Uniform equal-size instances are solved as an assignment; general
    masses go through min-cost flow after scaling to integers (lcm of the
    rationalized denominators), falling back to a float flow with 1e-10
    feasibility tolerance when no small common denominator exists.  The
    arguments are put in a canonical order first so the float result is
    exactly symmetric.
    """
    if p < 1:
        raise InvalidSpec("p must be >= 1")
    if _orientation_key(b) < _orientation_key(a):
        gm = None if ground_matrix is None else np.asarray(ground_matrix).T
        return tlp_distance(b, a, p=p, ground_matrix=gm)
    if a.size * b.size > _PAIR_LIMIT:
        raise SizeLimitExceeded("instance above the 10^6 pair desk-scale limit")
    d = _ground_matrix(a, b) if ground_matrix is None else np.asarray(ground_matrix, float)
    if d.shape != (a.size, b.size):
        raise InvalidSpec("ground matrix has wrong shape")
    cost = d**p + np.abs(a.values[:, None] - b.values[None, :]) ** p

    uniform = (
        a.size == b.size
        and np.allclose(a.masses, 1.0 / a.size, rtol=0, atol=1e-15)
        and np.allclose(b.masses, 1.0 / b.size, rtol=0, atol=1e-15)
    )
    if uniform:
        _, total = kernels.solve_assignment(cost)
        return float((total / a.size) ** (1.0 / p))

    ra = _rational_units(a.masses)
    rb = _rational_units(b.masses)
    if ra is not None and rb is not None:
        ua, da = ra
        ub, db = rb
        scale = lcm(da, db)
        if scale <= _DENOM_CAP:
            supply = ua * (scale // da)
            demand = ub * (scale // db)
            rows, cols, flows = min_cost_flow_dense(cost, supply, demand, atol=0.5)
            total = float(np.sum(flows / scale * cost[rows, cols]))
            return float(total ** (1.0 / p))
    rows, cols, flows = min_cost_flow_dense(cost, a.masses, b.masses, atol=1e-10)
    total = float(np.sum(flows * cost[rows, cols]))
    return float(total ** (1.0 / p))
