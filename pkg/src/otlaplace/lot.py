"""Linear Wasserstein (LOT) embedding against a fixed reference measure.

Each dataset measure is represented by the images of the reference points
under the optimal transport map from the reference; the L2 distance between
two such maps (in the reference's own measure) approximates the Wasserstein
distance between the measures and is exact on translation families.
"""

import struct
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch
from .measures import EmpiricalMeasure, LabeledDataset
from .transport import barycentric_map, w2_exact

_MAGIC = b"OTLE"


@dataclass
class LotEmbedding:
    """Transport maps from one reference measure to each dataset measure."""

    reference: EmpiricalMeasure
    maps: np.ndarray  # (n, m_ref, k)
    source_index_of_reference: int | None = None

    @property
    def n(self) -> int:
        return self.maps.shape[0]

    @property
    def m_ref(self) -> int:
        return self.maps.shape[1]

    def as_matrix(self) -> np.ndarray:
        """Flattened (n, m_ref*k) view; rows at Euclidean distance
        sqrt(m_ref) * lot_distance."""
        return self.maps.reshape(self.n, -1)


def lot_embed(reference: EmpiricalMeasure, dataset: LabeledDataset) -> LotEmbedding:
    """Embed every dataset measure as a transport map from the reference.

    maps[i] is the barycentric projection of the optimal plan from the
    reference to measure i; when measure i equals the reference this is the
    identity on the reference points.
    """
    if dataset.ambient_dim != reference.ambient_dim:
        raise DimensionMismatch("dataset and reference dimensions differ")
    maps = np.empty((dataset.n, reference.m, reference.ambient_dim))
    ref_index = None
    for i, mu in enumerate(dataset.measures):
        _, plan = w2_exact(reference, mu)
        maps[i] = barycentric_map(plan, mu).images
        if ref_index is None and mu.points.shape == reference.points.shape:
            if np.array_equal(mu.points, reference.points):
                ref_index = i
    return LotEmbedding(reference, maps, ref_index)


def lot_distance(emb: LotEmbedding, i: int, j: int) -> float:
    """L2(reference) distance between maps i and j of the embedding."""
    n = emb.n
    if not (-n <= i < n and -n <= j < n):
        raise IndexError("map index out of range")
    diff = emb.maps[i] - emb.maps[j]
    return float(np.sqrt(np.sum(diff * diff) / emb.m_ref))


def lot_pairwise(emb: LotEmbedding) -> np.ndarray:
    """Full n x n matrix of lot_distance values (exact-difference cdist)."""
    flat = emb.as_matrix()
    d = cdist(flat, flat) / np.sqrt(emb.m_ref)
    np.fill_diagonal(d, 0.0)
    return d


def save_embedding(emb: LotEmbedding, path) -> None:
    n, m_ref, k = emb.maps.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", n, m_ref, k))
        fh.write(np.ascontiguousarray(emb.maps, dtype="<f8").tobytes())


def load_embedding(path) -> LotEmbedding:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != _MAGIC or len(raw) < 16:
        raise ValueError("not an embedding file")
    n, m_ref, k = struct.unpack("<III", raw[4:16])
    maps = np.frombuffer(raw, dtype="<f8", offset=16, count=n * m_ref * k)
    maps = maps.reshape(n, m_ref, k).copy()
    # the original reference points are not stored; reuse the first map only
    # when it is known to be the identity
    return LotEmbedding(EmpiricalMeasure(maps[0].copy()), maps, None)
