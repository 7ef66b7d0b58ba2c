import numpy as np
import pytest

from otlaplace.graphs import WeightedGraph
from otlaplace.measures import EmpiricalMeasure, LabeledDataset


def random_measure(rng, m=None, k=None, scale=1.0):
    m = m if m is not None else int(rng.integers(1, 7))
    k = k if k is not None else int(rng.integers(1, 4))
    return EmpiricalMeasure(scale * rng.standard_normal((m, k)))


def random_connected_graph(rng, n, extra_edge_prob=0.25, epsilon=1.0):
    """Random spanning tree plus extra edges; positive uniform weights."""
    rows, cols = [], []
    order = rng.permutation(n)
    for a, b in zip(order[:-1], order[1:]):
        i, j = (int(a), int(b)) if a < b else (int(b), int(a))
        rows.append(i)
        cols.append(j)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < extra_edge_prob
    seen = set(zip(rows, cols))
    for i, j in zip(iu[mask], ju[mask]):
        if (int(i), int(j)) not in seen:
            rows.append(int(i))
            cols.append(int(j))
            seen.add((int(i), int(j)))
    weights = rng.uniform(0.1, 1.0, size=len(rows))
    return WeightedGraph(n, np.array(rows), np.array(cols), weights, epsilon=epsilon)


def node_dataset(labels, n_classes=None):
    """Dataset of one-point measures, one per node; labels is a list with
    None for unlabeled entries (which must trail the labeled ones)."""
    measures = [EmpiricalMeasure([[float(i)]]) for i in range(len(labels))]
    if n_classes is None:
        n_classes = max(l for l in labels if l is not None) + 1
    return LabeledDataset(measures, list(labels), n_classes=n_classes)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
