"""Gaussian numeric observers and threshold scoring.

Per-leaf numeric statistics live in five ``(n_attributes, n_classes)``
arrays: weight, mean, M2 (weighted Welford), min and max. Rows of nominal
attributes are left untouched. Fresh arrays must start with weight and
mean at 0, min at +inf and max at -inf.
"""

import math

import numpy as np
from scipy.special import ndtr

from .._backend import njit

ENTROPY = 0
GINI = 1

_SQRT2 = math.sqrt(2.0)


def _impurity(counts, total, criterion):
    if total <= 0.0:
        return 0.0
    acc = 0.0
    if criterion == ENTROPY:
        for c in range(counts.shape[0]):
            p = counts[c] / total
            if p > 0.0:
                acc -= p * math.log2(p)
        return acc
    for c in range(counts.shape[0]):
        p = counts[c] / total
        acc += p * p
    return 1.0 - acc


_impurity_nb = njit(_impurity)


def _gaussian_update_loop(w, mean, m2, lo, hi, x, numeric, cls, weight):
    for i in range(numeric.shape[0]):
        a = numeric[i]
        v = x[a]
        new_w = w[a, cls] + weight
        d = v - mean[a, cls]
        mean[a, cls] += weight * d / new_w
        m2[a, cls] += weight * d * (v - mean[a, cls])
        w[a, cls] = new_w
        if v < lo[a, cls]:
            lo[a, cls] = v
        if v > hi[a, cls]:
            hi[a, cls] = v


def _left_mass(t, wc, mu, m2c, loc, hic):
    if wc <= 0.0 or t < loc:
        return 0.0
    if t >= hic:
        return wc
    sd = math.sqrt(m2c / (wc - 1.0)) if wc > 1.0 else 0.0
    if sd > 0.0:
        return wc * 0.5 * math.erfc(-(t - mu) / (sd * _SQRT2))
    return wc if t >= mu else 0.0


_left_mass_nb = njit(_left_mass)


def _numeric_merits_loop(w, mean, m2, lo, hi, numeric, k, criterion):
    n_attr = numeric.shape[0]
    n_cls = w.shape[1]
    merit = np.full(n_attr, -np.inf)
    threshold = np.full(n_attr, np.nan)
    left_best = np.zeros((n_attr, n_cls))
    right_best = np.zeros((n_attr, n_cls))
    left = np.zeros(n_cls)
    right = np.zeros(n_cls)
    for i in range(n_attr):
        a = numeric[i]
        glo = np.inf
        ghi = -np.inf
        total = 0.0
        for c in range(n_cls):
            if w[a, c] > 0.0:
                total += w[a, c]
                if lo[a, c] < glo:
                    glo = lo[a, c]
                if hi[a, c] > ghi:
                    ghi = hi[a, c]
        if not ghi > glo:
            continue
        parent = _impurity_nb(w[a], total, criterion)
        step = (ghi - glo) / (k + 1)
        for j in range(k):
            t = glo + step * (j + 1)
            lt = 0.0
            for c in range(n_cls):
                left[c] = _left_mass_nb(t, w[a, c], mean[a, c], m2[a, c], lo[a, c], hi[a, c])
                right[c] = w[a, c] - left[c]
                lt += left[c]
            rt = total - lt
            g = parent - (lt / total) * _impurity_nb(left, lt, criterion)
            g -= (rt / total) * _impurity_nb(right, rt, criterion)
            if g < 0.0:
                g = 0.0
            if g > merit[i]:
                merit[i] = g
                threshold[i] = t
                left_best[i] = left
                right_best[i] = right
    return merit, threshold, left_best, right_best


gaussian_update_numba = njit(_gaussian_update_loop)
numeric_merits_numba = njit(_numeric_merits_loop)


def gaussian_update_numpy(w, mean, m2, lo, hi, x, numeric, cls, weight):
    v = x[numeric]
    new_w = w[numeric, cls] + weight
    d = v - mean[numeric, cls]
    new_mean = mean[numeric, cls] + weight * d / new_w
    mean[numeric, cls] = new_mean
    m2[numeric, cls] += weight * d * (v - new_mean)
    w[numeric, cls] = new_w
    lo[numeric, cls] = np.minimum(lo[numeric, cls], v)
    hi[numeric, cls] = np.maximum(hi[numeric, cls], v)


def _impurity_rows(counts, criterion):
    """Row-wise impurity of a ``(..., n_classes)`` mass array."""
    total = counts.sum(axis=-1)
    safe = np.where(total > 0.0, total, 1.0)
    p = counts / safe[..., None]
    if criterion == ENTROPY:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0.0, -p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
        out = terms.sum(axis=-1)
    else:
        out = 1.0 - (p * p).sum(axis=-1)
    return np.where(total > 0.0, out, 0.0)


def numeric_merits_numpy(w, mean, m2, lo, hi, numeric, k, criterion):
    n_attr = numeric.shape[0]
    n_cls = w.shape[1]
    merit = np.full(n_attr, -np.inf)
    threshold = np.full(n_attr, np.nan)
    left_best = np.zeros((n_attr, n_cls))
    right_best = np.zeros((n_attr, n_cls))
    if n_attr == 0:
        return merit, threshold, left_best, right_best

    wa = w[numeric]  # (A, C)
    live = wa > 0.0
    glo = np.where(live, lo[numeric], np.inf).min(axis=1)
    ghi = np.where(live, hi[numeric], -np.inf).max(axis=1)
    ok = ghi > glo
    if not ok.any():
        return merit, threshold, left_best, right_best

    steps = (np.arange(k) + 1.0)[None, :]
    span = np.where(ok, ghi - glo, 0.0)
    t = np.where(ok, glo, 0.0)[:, None] + (span / (k + 1))[:, None] * steps  # (A, K)

    tt = t[:, :, None]
    wc = wa[:, None, :]
    mu = mean[numeric][:, None, :]
    loc = lo[numeric][:, None, :]
    hic = hi[numeric][:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        var = np.where(wc > 1.0, m2[numeric][:, None, :] / (wc - 1.0), 0.0)
        sd = np.sqrt(np.maximum(var, 0.0))
        z = np.where(sd > 0.0, (tt - mu) / np.where(sd > 0.0, sd, 1.0), 0.0)
    inner = np.where(sd > 0.0, wc * ndtr(z), np.where(tt >= mu, wc, 0.0))
    left = np.where(tt >= hic, wc, inner)
    left = np.where((wc <= 0.0) | (tt < loc), 0.0, left)  # (A, K, C)
    right = wc - left

    total = wa.sum(axis=1)
    parent = _impurity_rows(wa, criterion)
    lt = left.sum(axis=-1)
    rt = total[:, None] - lt
    safe_total = np.where(total > 0.0, total, 1.0)[:, None]
    g = parent[:, None] - (lt / safe_total) * _impurity_rows(left, criterion)
    g -= (rt / safe_total) * _impurity_rows(right, criterion)
    g = np.maximum(g, 0.0)

    best = np.argmax(g, axis=1)
    rows = np.arange(n_attr)
    merit = np.where(ok, g[rows, best], -np.inf)
    threshold = np.where(ok, t[rows, best], np.nan)
    left_best = np.where(ok[:, None], left[rows, best], 0.0)
    right_best = np.where(ok[:, None], right[rows, best], 0.0)
    return merit, threshold, left_best, right_best
