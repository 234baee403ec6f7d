"""Statistical machinery: Holm adjustment, logistic LRT, time correlation.

The logistic fit is a plain iteratively-reweighted least squares with a tiny
ridge and clamped linear predictor, which keeps separated data finite; the
likelihood-ratio p-value comes from the chi-square tail. Degenerate inputs
(constant outcomes, constant regressors) follow stated p = 1 conventions so
every test is a total function.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
import scipy.stats

__all__ = [
    "holm_bonferroni",
    "fit_logistic",
    "logistic_lrt",
    "linear_lrt",
    "pairwise_test",
    "correlation_reading_recognition",
]

_ETA_CLAMP = 30.0
_RIDGE = 1e-9


def holm_bonferroni(pvals: Sequence[float]) -> list[float]:
    """Step-down Holm adjustment, returned in input order.

    adjusted_(i) = max_{j <= i} min(1, (m - j + 1) * p_(j)) over the
    ascending ordering; the running max keeps the sorted output monotone.
    """
    m = len(pvals)
    if m == 0:
        return []
    arr = np.asarray(pvals, dtype=float)
    order = np.argsort(arr, kind="stable")
    adjusted = np.empty(m, dtype=float)
    running = 0.0
    for rank, idx in enumerate(order):
        candidate = min(1.0, (m - rank) * float(arr[idx]))
        running = max(running, candidate)
        adjusted[idx] = running
    return adjusted.tolist()


def _log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    eta = np.clip(X @ beta, -_ETA_CLAMP, _ETA_CLAMP)
    # log(1 + e^eta) evaluated stably
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def fit_logistic(X: np.ndarray, y: np.ndarray, *, max_iter: int = 100,
                 tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """IRLS logistic fit; returns (coefficients, log-likelihood)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    beta = np.zeros(p)
    eye = np.eye(p)
    for _ in range(max_iter):
        eta = np.clip(X @ beta, -_ETA_CLAMP, _ETA_CLAMP)
        mu = scipy.stats.logistic.cdf(eta)
        w = np.maximum(mu * (1.0 - mu), 1e-12)
        z = eta + (y - mu) / w
        xtw = X.T * w
        try:
            new = np.linalg.solve(xtw @ X + _RIDGE * eye, xtw @ z)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(new)):
            break
        if np.max(np.abs(new - beta)) < tol:
            beta = new
            break
        beta = new
    return beta, _log_likelihood(X, y, beta)


def logistic_lrt(y: Sequence[float], treat: Sequence[float],
                 covariate: Optional[Sequence[float]] = None) -> float:
    """LRT p-value for the treatment term, optionally past a covariate."""
    y = np.asarray(y, dtype=float)
    if y.size == 0 or y.min() == y.max():
        return 1.0
    cols = [np.ones(y.size)]
    if covariate is not None:
        cov = np.asarray(covariate, dtype=float)
        if cov.std() > 0:
            cols.append(cov)
    x_null = np.column_stack(cols)
    x_full = np.column_stack(cols + [np.asarray(treat, dtype=float)])
    _, ll_null = fit_logistic(x_null, y)
    _, ll_full = fit_logistic(x_full, y)
    lr = max(0.0, 2.0 * (ll_full - ll_null))
    return float(scipy.stats.chi2.sf(lr, 1))


def linear_lrt(y: Sequence[float], treat: Sequence[float],
               covariate: Optional[Sequence[float]] = None) -> float:
    """Gaussian likelihood-ratio p-value for a treatment term in a linear
    model, the continuous-outcome counterpart of logistic_lrt."""
    y = np.asarray(y, dtype=float)
    if y.size < 3 or y.std() == 0:
        return 1.0
    cols = [np.ones(y.size)]
    if covariate is not None:
        cov = np.asarray(covariate, dtype=float)
        if cov.std() > 0:
            cols.append(cov)
    x_null = np.column_stack(cols)
    x_full = np.column_stack(cols + [np.asarray(treat, dtype=float)])

    def rss(x):
        beta, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ beta
        return float(resid @ resid)

    rss_null, rss_full = rss(x_null), rss(x_full)
    if rss_full <= 0 or rss_null <= rss_full:
        if rss_null == rss_full:
            return 1.0
        rss_full = max(rss_full, 1e-300)
    lr = y.size * (np.log(rss_null) - np.log(rss_full))
    return float(scipy.stats.chi2.sf(max(0.0, lr), 1))


def pairwise_test(group_a: Sequence[float], group_b: Sequence[float],
                  base_a: Optional[Sequence[float]] = None,
                  base_b: Optional[Sequence[float]] = None) -> float:
    """Two-group comparison of binary outcomes via logistic LRT.

    Baseline covariates, when given for both groups, enter the model as a
    fixed effect. Identical outcomes everywhere return p = 1 by convention.
    """
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    y = np.concatenate([a, b])
    if y.size == 0 or y.min() == y.max():
        return 1.0
    treat = np.concatenate([np.zeros(a.size), np.ones(b.size)])
    cov = None
    if base_a is not None and base_b is not None:
        cov = np.concatenate([np.asarray(base_a, dtype=float),
                              np.asarray(base_b, dtype=float)])
    return logistic_lrt(y, treat, cov)


def correlation_reading_recognition(times: Sequence[float],
                                    rates: Sequence[float],
                                    ) -> tuple[float, float]:
    """Slope and p-value of recognition rate on log10(1 + seconds)."""
    t = np.log10(1.0 + np.asarray(times, dtype=float))
    r = np.asarray(rates, dtype=float)
    if t.size < 3 or t.std() == 0 or r.std() == 0:
        return 0.0, 1.0
    fit = scipy.stats.linregress(t, r)
    p = fit.pvalue
    if math.isnan(p):
        return 0.0, 1.0
    return float(fit.slope), float(p)
