"""Constrained Laplace Learning on a weighted graph.

solve_p2 minimizes the p=2 graph Dirichlet energy subject to hard one-hot
label constraints on the first n_labeled nodes: per class column the
unlabeled block solves L_uu f_u = -L_ul y_l with L = D - W.  solve_p
handles p > 2 by projected gradient descent with a Barzilai-Borwein step
and monotone backtracking.  predict_and_score turns relaxed labels into
class ids (argmax, lowest index on ties) and scores the unlabeled nodes.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .dirichlet import graph_dirichlet_energy, graph_p_laplacian
from .errors import InvalidSpec, ShapeMismatch, SingularSystem, UnlabeledComponent
from .graphs import WeightedGraph, connected_components
from .measures import LabeledDataset

_DENSE_CUTOFF = 500


@dataclass
class LearnResult:
    values: np.ndarray  # (n, c) relaxed labels
    predictions: np.ndarray  # (n,) argmax class ids
    residual: float  # sup norm of the graph Laplacian on unlabeled nodes
    iterations: int
    objective: float
    p: float = 2.0
    converged: bool = True
    objective_trace: list = field(default_factory=list)
    notes: tuple = ()


def _one_hot(dataset: LabeledDataset) -> np.ndarray:
    n_lab, c = dataset.n_labeled, dataset.n_classes
    y = np.zeros((n_lab, c))
    for i in range(n_lab):
        y[i, int(dataset.labels[i])] = 1.0
    return y


def _component_split(graph: WeightedGraph, n_labeled: int):
    orphans = []
    covered = np.ones(graph.n, dtype=bool)
    for comp in connected_components(graph):
        if min(comp) >= n_labeled:  # labeled nodes occupy the leading indices
            orphans.append(comp)
            covered[comp] = False
    return orphans, covered


def _majority_label(dataset: LabeledDataset) -> int:
    counts = np.bincount(
        [int(lab) for lab in dataset.labels[: dataset.n_labeled]],
        minlength=dataset.n_classes,
    )
    return int(np.argmax(counts))


def _pcg(A, b, stop_inf: float, max_iter: int):
    """Jacobi-preconditioned conjugate gradient with an inf-norm stop."""
    diag = A.diagonal()
    if (diag <= 0).any():
        raise SingularSystem("unlabeled block has a nonpositive diagonal")
    minv = 1.0 / diag
    x = np.zeros_like(b)
    r = b.copy()
    z = minv * r
    p = z.copy()
    rz = float(r @ z)
    it = 0
    while it < max_iter and np.abs(r).max() > stop_inf:
        Ap = A @ p
        pAp = float(p @ Ap)
        if pAp <= 0:
            raise SingularSystem("unlabeled block is not positive definite")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        z = minv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    return x, it


def solve_p2(
    graph: WeightedGraph,
    dataset: LabeledDataset,
    allow_unlabeled: str = "error",
) -> LearnResult:
    """Harmonic extension of the one-hot labels (p = 2 Laplace Learning).

    Components without a labeled node raise UnlabeledComponent unless
    allow_unlabeled="majority", which fills them with the global majority
    label and flags the result.  Labeled rows equal their one-hot targets
    bit-exactly; the stationarity residual is driven well below
    1e-8 * max|y|.
    """
    if graph.n != dataset.n:
        raise ShapeMismatch("graph and dataset sizes differ")
    n_lab = dataset.n_labeled
    if n_lab < 1:
        raise InvalidSpec("at least one labeled node is required")
    orphans, covered = _component_split(graph, n_lab)
    notes = ()
    if orphans:
        if allow_unlabeled != "majority":
            raise UnlabeledComponent(orphans)
        notes = ("unlabeled components filled with majority label",)

    n, c = graph.n, dataset.n_classes
    y = _one_hot(dataset)
    values = np.zeros((n, c))
    values[:n_lab] = y

    unlabeled = np.nonzero(covered & (np.arange(n) >= n_lab))[0]
    iterations = 0
    if len(unlabeled) > 0:
        W = graph.weight_matrix()
        lap = sparse.diags(np.asarray(W.sum(axis=1)).ravel()) - W
        lap = lap.tocsr()
        A = lap[unlabeled][:, unlabeled]
        rhs = -lap[unlabeled][:, :n_lab] @ y
        # residual target in graph_p_laplacian scaling, with a safety margin
        target = 1e-8 * np.abs(y).max()
        stop_raw = 0.05 * target * n * graph.epsilon**2
        if n < _DENSE_CUTOFF:
            dense = A.toarray()
            try:
                sol = np.linalg.solve(dense, rhs)
                for _ in range(3):
                    resid = rhs - dense @ sol
                    if np.abs(resid).max() <= stop_raw:
                        break
                    sol += np.linalg.solve(dense, resid)
            except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc
            values[unlabeled] = sol
            iterations = 1
        else:
            for l in range(c):
                col, it = _pcg(A.tocsr(), rhs[:, l], stop_raw, max_iter=20 * n)
                values[unlabeled, l] = col
                iterations = max(iterations, it)

    if orphans:
        fill = _majority_label(dataset)
        for comp in orphans:
            values[comp] = 0.0
            values[np.asarray(comp), fill] = 1.0

    lf = graph_p_laplacian(graph, values, p=2.0)
    mask = np.arange(n) >= n_lab
    residual = float(np.abs(lf[mask]).max()) if mask.any() else 0.0
    return LearnResult(
        values=values,
        predictions=np.argmax(values, axis=1),
        residual=residual,
        iterations=iterations,
        objective=graph_dirichlet_energy(graph, values, p=2.0),
        p=2.0,
        converged=True,
        objective_trace=[],
        notes=notes,
    )


def solve_p(
    graph: WeightedGraph,
    dataset: LabeledDataset,
    p: float,
    max_iter: int = 500,
    tol: float = 1e-8,
    allow_unlabeled: str = "error",
) -> LearnResult:
    """Minimize the p > 2 Dirichlet energy with pinned labels.

    Projected gradient descent from the harmonic warm start, Barzilai-Borwein
    step with backtracking; the objective trace is monotone nonincreasing.
    Hitting max_iter returns the best iterate flagged converged=False.
    """
    if not p > 2:
        raise InvalidSpec("solve_p requires p > 2 (use solve_p2 for p = 2)")
    warm = solve_p2(graph, dataset, allow_unlabeled=allow_unlabeled)
    n_lab = dataset.n_labeled
    values = warm.values.copy()
    free = np.arange(graph.n) >= n_lab
    _, covered = _component_split(graph, n_lab)
    free &= covered

    trace = [graph_dirichlet_energy(graph, values, p)]
    if not free.any():
        return LearnResult(
            values=values,
            predictions=np.argmax(values, axis=1),
            residual=0.0,
            iterations=0,
            objective=trace[0],
            p=p,
            converged=True,
            objective_trace=trace,
            notes=warm.notes,
        )

    grad = graph_p_laplacian(graph, values, p)[free]
    prev_f = None
    prev_g = None
    alpha = 1.0 / max(1e-12, np.abs(grad).max())
    it = 0
    converged = False
    # true directional-derivative scale for the Armijo test
    slope_scale = 4.0 / graph.n
    while it < max_iter:
        gnorm_inf = np.abs(grad).max()
        if gnorm_inf < tol:
            converged = True
            break
        if prev_f is not None:
            s = (values[free] - prev_f).ravel()
            ydiff = (grad - prev_g).ravel()
            sy = float(s @ ydiff)
            alpha = float(s @ s) / sy if sy > 1e-30 else 1e3 * alpha
        alpha = float(np.clip(alpha, 1e-14, 1e14))
        predicted = slope_scale * float(np.sum(grad * grad))
        step = alpha
        e_old = trace[-1]
        for _ in range(60):
            trial = values.copy()
            trial[free] -= step * grad
            e_new = graph_dirichlet_energy(graph, trial, p)
            if e_new <= e_old - 1e-4 * step * predicted:
                break
            step /= 2.0
        if e_new > e_old:  # no descent possible at float precision
            converged = True
            break
        prev_f = values[free].copy()
        prev_g = grad
        values = trial
        trace.append(e_new)
        grad = graph_p_laplacian(graph, values, p)[free]
        it += 1
        if e_old > 0 and (e_old - e_new) / e_old < tol:
            converged = True
            break

    residual = float(np.abs(grad).max())
    return LearnResult(
        values=values,
        predictions=np.argmax(values, axis=1),
        residual=residual,
        iterations=it,
        objective=trace[-1],
        p=p,
        converged=converged,
        objective_trace=trace,
        notes=warm.notes,
    )


def predict_and_score(result: LearnResult, truth, mask) -> float:
    """Accuracy of the argmax predictions over the unlabeled nodes.

    mask marks the labeled nodes (boolean array or index list); with no
    unlabeled node left the accuracy is vacuously 1.0 and a warning is
    emitted.
    """
    truth = np.asarray(truth)
    n = len(result.predictions)
    if truth.shape != (n,):
        raise ShapeMismatch("truth must have one entry per node")
    labeled = np.zeros(n, dtype=bool)
    labeled[np.asarray(mask)] = True
    unlabeled = ~labeled
    if not unlabeled.any():
        warnings.warn("no unlabeled nodes: accuracy is vacuously 1.0")
        return 1.0
    return float(np.mean(result.predictions[unlabeled] == truth[unlabeled]))


def save_result_csv(result: LearnResult, truth, path) -> None:
    """Rows node,pred,truth,value_0..value_{c-1}; truth blank when unknown."""
    n, c = result.values.shape
    truth = [None] * n if truth is None else list(truth)
    header = "node,pred,truth," + ",".join("value_%d" % l for l in range(c))
    lines = [header]
    for i in range(n):
        t = "" if truth[i] is None else str(int(truth[i]))
        vals = ",".join(repr(float(v)) for v in result.values[i])
        lines.append("%d,%d,%s,%s" % (i, int(result.predictions[i]), t, vals))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def save_run_summary_json(result: LearnResult, config: dict, path) -> None:
    doc = {
        "residual": result.residual,
        "iterations": result.iterations,
        "objective": result.objective,
        "p": result.p,
        "converged": result.converged,
        "notes": list(result.notes),
        "config": config,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
