"""Synthetic 4-class 3-D point-cloud benchmark.

Desk-scale stand-in for mesh-derived furniture clouds: boxes, sphere
shells, cylinder shells and flat plates, each sampled on the surface with
random anisotropic size, random rotation, additive jitter, and normalized
to unit RMS radius so that scale alone cannot separate the classes.
"""

import numpy as np

from .measures import EmpiricalMeasure, LabeledDataset
from .rng import make_rng

CLASS_NAMES = ("box", "sphere", "cylinder", "plane")


def _random_rotation(rng, tilt: float) -> np.ndarray:
    """Upright pose: free rotation about z, then a tilt of bounded angle.

    Mirrors mesh-benchmark conventions where objects sit upright with pose
    noise; tilt controls class difficulty (0 = perfectly upright, ~pi =
    unrestricted)."""
    phi = rng.uniform(0.0, 2 * np.pi)
    rz = np.array(
        [[np.cos(phi), -np.sin(phi), 0.0], [np.sin(phi), np.cos(phi), 0.0], [0.0, 0.0, 1.0]]
    )
    if tilt <= 0:
        return rz
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    ang = rng.uniform(0.0, tilt)
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    rt = np.eye(3) + np.sin(ang) * k + (1 - np.cos(ang)) * (k @ k)
    return rt @ rz


def _box_surface(rng, m):
    # two modes: roughly cubic crates and flat planks
    if rng.random() < 0.5:
        sides = rng.uniform(0.5, 1.5, size=3)
    else:
        sides = np.array(
            [rng.uniform(1.2, 2.0), rng.uniform(0.9, 1.4), rng.uniform(0.15, 0.35)]
        )
    areas = np.array(
        [sides[1] * sides[2], sides[0] * sides[2], sides[0] * sides[1]]
    )
    probs = np.repeat(areas, 2)
    probs = probs / probs.sum()
    face = rng.choice(6, size=m, p=probs)
    pts = rng.uniform(-0.5, 0.5, size=(m, 3)) * sides
    axis = face // 2
    sign = np.where(face % 2 == 0, 0.5, -0.5)
    pts[np.arange(m), axis] = sign * sides[axis]
    return pts


def _sphere_shell(rng, m):
    radius = rng.uniform(0.5, 1.0)
    v = rng.standard_normal((m, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return radius * v


def _cylinder_shell(rng, m):
    # two modes: tall tubes and squat rings
    if rng.random() < 0.5:
        radius, height = rng.uniform(0.3, 0.6), rng.uniform(1.2, 2.2)
    else:
        radius, height = rng.uniform(0.6, 1.0), rng.uniform(0.2, 0.6)
    phi = rng.uniform(0.0, 2 * np.pi, m)
    z = rng.uniform(-height / 2, height / 2, m)
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])


def _plane_patch(rng, m):
    sides = rng.uniform(0.8, 2.0, size=2)
    xy = rng.uniform(-0.5, 0.5, size=(m, 2)) * sides
    return np.column_stack([xy, np.zeros(m)])


_GENERATORS = (_box_surface, _sphere_shell, _cylinder_shell, _plane_patch)


def sample_shape_cloud(
    class_id: int, m: int, rng, noise: float = 0.04, tilt: float = 0.5
) -> np.ndarray:
    pts = _GENERATORS[class_id](rng, m)
    pts = pts @ _random_rotation(rng, tilt).T
    pts = pts + noise * rng.standard_normal((m, 3))
    rms = np.sqrt(np.mean(np.sum(pts**2, axis=1)))
    return pts / max(rms, 1e-12)


def sample_shape_family(
    n: int, m: int, seed: int, noise: float = 0.04, tilt: float = 0.5
) -> LabeledDataset:
    """n clouds of m surface points each, classes drawn uniformly.

    All labels are populated (experiment runners mask a fraction); class ids
    index CLASS_NAMES.
    """
    rng = make_rng(seed)
    class_ids = rng.integers(0, len(_GENERATORS), size=n)
    measures = [
        EmpiricalMeasure(sample_shape_cloud(int(c), m, rng, noise, tilt))
        for c in class_ids
    ]
    return LabeledDataset(measures, [int(c) for c in class_ids], n_classes=len(_GENERATORS))
