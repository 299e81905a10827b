"""Numeric kernels, dispatched to numba or numpy by ``THATSTREAM_BACKEND``."""

from .._backend import BACKEND, USE_NUMBA
from . import adwin as _adwin
from . import split as _split

if USE_NUMBA:
    bucket_insert = _adwin.bucket_insert_numba
    bucket_cut = _adwin.bucket_cut_numba
    naive_cut = _adwin.naive_cut_numba
    gaussian_update = _split.gaussian_update_numba
    numeric_merits = _split.numeric_merits_numba
else:
    bucket_insert = _adwin.bucket_insert_numpy
    bucket_cut = _adwin.bucket_cut_numpy
    naive_cut = _adwin.naive_cut_numpy
    gaussian_update = _split.gaussian_update_numpy
    numeric_merits = _split.numeric_merits_numpy

ENTROPY = _split.ENTROPY
GINI = _split.GINI

__all__ = [
    "BACKEND",
    "ENTROPY",
    "GINI",
    "bucket_cut",
    "bucket_insert",
    "gaussian_update",
    "naive_cut",
    "numeric_merits",
]
