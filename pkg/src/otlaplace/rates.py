"""Sampling-rate functions for empirical measures and an empirical harness.

rate_q / rate_q_tilde evaluate the piecewise-in-dimension rates governing
the infinity- and 2-Wasserstein distance between a bounded-density measure
and its m-point empirical approximation.  empirical_w2_rate measures the
distances (closed-form against U[0,1] via order statistics in dimension 1,
a large-sample discrete proxy above) and fits the log-log slope.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, DomainError
from .measures import EmpiricalMeasure
from .rng import make_rng, trial_seed
from .transport import w2_exact

_PAIR_LIMIT = 1_000_000


def _check_km(k: int, m: int) -> None:
    if int(k) != k or k < 1:
        raise DomainError("dimension k must be a positive integer")
    if int(m) != m or m < 2:
        raise DomainError("sample size m must be an integer >= 2")


def rate_q(k: int, m: int) -> float:
    """Rate for the infinity-Wasserstein sampling distance."""
    _check_km(k, m)
    if k == 1:
        if m < 3:
            raise DomainError("iterated logarithm needs m >= 3")
        return float(np.sqrt(np.log(np.log(m)) / m))
    if k == 2:
        return float(np.log(m) ** 0.75 / np.sqrt(m))
    return float((np.log(m) / m) ** (1.0 / k))


def rate_q_tilde(k: int, m: int) -> float:
    """Rate for the 2-Wasserstein sampling distance."""
    _check_km(k, m)
    if k == 1:
        return float(np.sqrt(np.log(m) / m))
    if k == 2:
        return float(np.log(m) ** 0.75 / np.sqrt(m))
    if k == 3:
        return float((np.log(m) / m) ** (1.0 / 3.0))
    if k == 4:
        return float(np.sqrt(np.log(m)) / m**0.25)
    return float(m ** (-1.0 / k))


def w2_uniform01_empirical(samples: np.ndarray) -> float:
    """Exact W2 between U[0,1] and the empirical measure of the samples.

    Uses the quantile representation: the empirical quantile function is
    the i-th order statistic on ((i-1)/m, i/m], so the squared distance is
    a sum of closed-form segment integrals of (x_(i) - t)^2.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    m = len(x)
    a = np.arange(m) / m
    b = np.arange(1, m + 1) / m
    seg = ((x - a) ** 3 - (x - b) ** 3) / 3.0
    return float(np.sqrt(np.sum(seg)))


def uniform_quantile_measure(m: int) -> EmpiricalMeasure:
    """Discretization of U[0,1] at the m mid-quantiles (i-1/2)/m."""
    return EmpiricalMeasure(((np.arange(m) + 0.5) / m)[:, None])


@dataclass
class RateReport:
    k: int
    m_values: list
    trials: int
    measured_mean: np.ndarray
    measured_se: np.ndarray
    predicted: np.ndarray
    fitted_slope: float
    fitted_intercept: float
    c_hat: float  # anchored on the smallest m: measured / predicted

    def dominated(self) -> np.ndarray:
        """measured <= c_hat * predicted, per m."""
        return self.measured_mean <= self.c_hat * self.predicted + 1e-15


def empirical_w2_rate(
    k: int,
    m_values,
    trials: int,
    proxy_m: int | None = None,
    seed: int = 0,
) -> RateReport:
    """Measure mean W2(mu, mu^(m)) across m and fit the log-log slope.

    k = 1 draws from U[0,1] and evaluates the distance in closed form; for
    k >= 2 the continuous side is replaced by an M-point empirical proxy
    (M >= 50 * max(m), documented upper-bias) and solved by discrete OT.
    """
    m_values = [int(m) for m in m_values]
    if len(m_values) < 2 or any(m2 <= m1 for m1, m2 in zip(m_values, m_values[1:])):
        raise DomainError("m_values must be strictly increasing with >= 2 entries")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if k >= 2:
        if proxy_m is None or proxy_m < 50 * max(m_values):
            raise DomainError("k >= 2 needs proxy_m >= 50 * max(m_values)")
        if proxy_m * max(m_values) > _PAIR_LIMIT:
            raise BudgetExceeded(
                "proxy instance exceeds the 10^6 pair desk-scale budget"
            )

    means = np.empty(len(m_values))
    ses = np.empty(len(m_values))
    for idx, m in enumerate(m_values):
        vals = np.empty(trials)
        for t in range(trials):
            rng = make_rng(trial_seed(seed, t * len(m_values) + idx))
            if k == 1:
                vals[t] = w2_uniform01_empirical(rng.random(m))
            else:
                big = EmpiricalMeasure(rng.random((proxy_m, k)))
                small = EmpiricalMeasure(rng.random((m, k)))
                vals[t], _ = w2_exact(big, small)
        means[idx] = vals.mean()
        ses[idx] = vals.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0

    logm = np.log(np.asarray(m_values, dtype=float))
    slope, intercept = np.polyfit(logm, np.log(means), 1)
    predicted = np.array([rate_q_tilde(k, m) for m in m_values])
    c_hat = float(means[0] / predicted[0])
    return RateReport(
        k=k,
        m_values=m_values,
        trials=trials,
        measured_mean=means,
        measured_se=ses,
        predicted=predicted,
        fitted_slope=float(slope),
        fitted_intercept=float(intercept),
        c_hat=c_hat,
    )


def save_rate_report_csv(report: RateReport, path) -> None:
    lines = ["m,measured_mean,measured_se,predicted"]
    for m, mean, se, pred in zip(
        report.m_values, report.measured_mean, report.measured_se, report.predicted
    ):
        lines.append("%d,%s,%s,%s" % (m, repr(float(mean)), repr(float(se)), repr(float(pred))))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def save_rate_report_json(report: RateReport, path) -> None:
    doc = {
        "k": report.k,
        "m_values": report.m_values,
        "trials": report.trials,
        "measured_mean": report.measured_mean.tolist(),
        "measured_se": report.measured_se.tolist(),
        "predicted": report.predicted.tolist(),
        "fitted_slope": report.fitted_slope,
        "fitted_intercept": report.fitted_intercept,
        "c_hat": report.c_hat,
        "dominated": report.dominated().tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
