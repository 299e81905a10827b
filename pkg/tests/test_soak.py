"""Constant-memory streaming over a million rows."""

import tracemalloc

import pytest

from thatstream.pmu import PMU_SCHEMA, SIGNATURES, NO_DRIFT, SignatureSpec, SignatureStream
from thatstream.stream import parse_csv_stream, write_csv_stream

pytestmark = pytest.mark.soak

ROWS = 1_000_000
BUDGET = 4 * 2**20


@pytest.fixture(scope="module")
def big_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("soak") / "big.csv"
    spec = SignatureSpec(SIGNATURES[2].osc_freq_range, SIGNATURES[2].duration_threshold, n_per_class=ROWS // 2)
    with open(path, "w", newline="") as fh:
        assert write_csv_stream(SignatureStream(spec, NO_DRIFT, seed=0), PMU_SCHEMA, fh) == ROWS
    return path


def parse_peak(path, limit):
    tracemalloc.start()
    try:
        n = 0
        with open(path, "rb") as fh:
            for _ in parse_csv_stream(fh, PMU_SCHEMA):
                n += 1
                if n == limit:
                    break
        return n, tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()


def test_csv_parse_memory_is_flat(big_csv):
    n_small, small = parse_peak(big_csv, ROWS // 100)
    n_full, full = parse_peak(big_csv, None)
    assert (n_small, n_full) == (ROWS // 100, ROWS)
    assert full <= BUDGET
    # a hundredfold longer read must not cost meaningfully more memory
    assert full <= small + 2**20


def test_generator_memory_is_flat():
    spec = SignatureSpec(SIGNATURES[0].osc_freq_range, SIGNATURES[0].duration_threshold, n_per_class=ROWS // 2)
    tracemalloc.start()
    try:
        n = sum(1 for _ in SignatureStream(spec, NO_DRIFT, seed=1))
        peak = tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()
    assert n == ROWS
    assert peak <= BUDGET
