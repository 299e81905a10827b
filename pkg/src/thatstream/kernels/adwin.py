"""ADWIN cut-scan kernels.

Bucket layout shared by both backends: ``sums[level, slot]`` and
``sqs[level, slot]`` hold the sum and sum of squares of a bucket of
``2**level`` elements; ``counts[level]`` is the number of live slots.
Slot 0 of a level is its oldest bucket, and higher levels are older
than lower ones, so the window tail is ``(top_level, 0)``.
"""

import math

import numpy as np

from .._backend import njit


def _cut_epsilon(n0, n1, delta, n):
    m = 1.0 / (1.0 / n0 + 1.0 / n1)
    delta_prime = delta / n
    return math.sqrt(math.log(4.0 / delta_prime) / (2.0 * m))


_cut_epsilon_nb = njit(_cut_epsilon)


# -- bucketed window -----------------------------------------------------------


def _bucket_insert_loop(sums, sqs, counts, x, max_buckets):
    c0 = counts[0]
    sums[0, c0] = x
    sqs[0, c0] = x * x
    counts[0] = c0 + 1
    level = 0
    while counts[level] > max_buckets:
        if level + 1 >= counts.shape[0]:
            raise OverflowError("ADWIN bucket levels exhausted")
        j = counts[level + 1]
        sums[level + 1, j] = sums[level, 0] + sums[level, 1]
        sqs[level + 1, j] = sqs[level, 0] + sqs[level, 1]
        counts[level + 1] = j + 1
        for s in range(counts[level] - 2):
            sums[level, s] = sums[level, s + 2]
            sqs[level, s] = sqs[level, s + 2]
        counts[level] -= 2
        level += 1


def _bucket_cut_loop(sums, sqs, counts, total_n, total_sum, delta):
    dropped_n = 0
    dropped_sum = 0.0
    dropped_sq = 0.0
    while total_n >= 2:
        top = counts.shape[0] - 1
        while top > 0 and counts[top] == 0:
            top -= 1
        n0 = 0
        s0 = 0.0
        found = False
        for level in range(top, -1, -1):
            size = 1 << level
            for slot in range(counts[level]):
                n0 += size
                s0 += sums[level, slot]
                n1 = total_n - n0
                if n1 <= 0:
                    break
                diff = abs(s0 / n0 - (total_sum - s0) / n1)
                if diff >= _cut_epsilon_nb(n0, n1, delta, total_n):
                    found = True
                    break
            if found or total_n - n0 <= 0:
                break
        if not found:
            break
        size = 1 << top
        dropped_n += size
        dropped_sum += sums[top, 0]
        dropped_sq += sqs[top, 0]
        total_n -= size
        total_sum -= sums[top, 0]
        for s in range(counts[top] - 1):
            sums[top, s] = sums[top, s + 1]
            sqs[top, s] = sqs[top, s + 1]
        counts[top] -= 1
    return dropped_n, dropped_sum, dropped_sq


bucket_insert_numba = njit(_bucket_insert_loop)
bucket_cut_numba = njit(_bucket_cut_loop)


def bucket_insert_numpy(sums, sqs, counts, x, max_buckets):
    c0 = counts[0]
    sums[0, c0] = x
    sqs[0, c0] = x * x
    counts[0] = c0 + 1
    level = 0
    while counts[level] > max_buckets:
        if level + 1 >= counts.shape[0]:
            raise OverflowError("ADWIN bucket levels exhausted")
        j = counts[level + 1]
        sums[level + 1, j] = sums[level, 0] + sums[level, 1]
        sqs[level + 1, j] = sqs[level, 0] + sqs[level, 1]
        counts[level + 1] = j + 1
        c = counts[level]
        sums[level, : c - 2] = sums[level, 2:c]
        sqs[level, : c - 2] = sqs[level, 2:c]
        counts[level] = c - 2
        level += 1


def bucket_cut_numpy(sums, sqs, counts, total_n, total_sum, delta):
    dropped_n = 0
    dropped_sum = 0.0
    dropped_sq = 0.0
    while total_n >= 2:
        live = np.nonzero(counts)[0]
        top = int(live[-1]) if live.size else 0
        levels = np.arange(top, -1, -1)
        per_level = counts[levels]
        sizes = np.repeat(2.0**levels, per_level)
        bsums = np.concatenate([sums[lv, : counts[lv]] for lv in levels])
        n0 = np.cumsum(sizes)[:-1]
        s0 = np.cumsum(bsums)[:-1]
        n1 = total_n - n0
        if n0.size:
            diff = np.abs(s0 / n0 - (total_sum - s0) / n1)
            m = 1.0 / (1.0 / n0 + 1.0 / n1)
            eps = np.sqrt(np.log(4.0 / (delta / total_n)) / (2.0 * m))
            found = bool(np.any(diff >= eps))
        else:
            found = False
        if not found:
            break
        size = 1 << top
        dropped_n += size
        dropped_sum += sums[top, 0]
        dropped_sq += sqs[top, 0]
        total_n -= size
        total_sum -= sums[top, 0]
        c = counts[top]
        sums[top, : c - 1] = sums[top, 1:c]
        sqs[top, : c - 1] = sqs[top, 1:c]
        counts[top] = c - 1
    return dropped_n, dropped_sum, dropped_sq


# -- naive exhaustive window ---------------------------------------------------


def _naive_cut_loop(buf, start, end, delta):
    length = end - start
    cum = np.empty(length + 1)
    cum[0] = 0.0
    for i in range(length):
        cum[i + 1] = cum[i] + buf[start + i]
    s = 0
    while length - s >= 2:
        n = length - s
        total = cum[length] - cum[s]
        found = False
        for j in range(s + 1, length):
            n0 = j - s
            n1 = length - j
            s0 = cum[j] - cum[s]
            diff = abs(s0 / n0 - (total - s0) / n1)
            if diff >= _cut_epsilon_nb(n0, n1, delta, n):
                found = True
                break
        if not found:
            break
        s += 1
    return s


naive_cut_numba = njit(_naive_cut_loop)


def naive_cut_numpy(buf, start, end, delta):
    window = buf[start:end]
    length = window.size
    cum = np.empty(length + 1)
    cum[0] = 0.0
    np.cumsum(window, out=cum[1:])
    s = 0
    while length - s >= 2:
        n = length - s
        j = np.arange(s + 1, length)
        n0 = (j - s).astype(np.float64)
        n1 = (length - j).astype(np.float64)
        s0 = cum[j] - cum[s]
        diff = np.abs(s0 / n0 - (cum[length] - cum[s] - s0) / n1)
        m = 1.0 / (1.0 / n0 + 1.0 / n1)
        eps = np.sqrt(np.log(4.0 / (delta / n)) / (2.0 * m))
        if not np.any(diff >= eps):
            break
        s += 1
    return s
