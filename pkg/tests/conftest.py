import numpy as np
import pytest


def max_deviation(a, b, scale=1.0):
    """Worst per-element deviation, measured relative where the values are
    large and absolutely (in units of ``scale``) where they are small."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), scale)
    return float(np.max(np.abs(a - b) / denom))


def assert_series_close(a, b, rtol, scale=1.0, label=""):
    dev = max_deviation(a, b, scale=scale)
    assert dev <= rtol, f"{label}: max deviation {dev:.3e} > {rtol:.0e}"


def assert_paths_close(closed, oracle, rtol, pool_scale=None):
    """Compare every series of two population paths.

    The pool series of large populations carries an irreducible
    cancellation floor of order N * eps, so its absolute scale is the
    pool size rather than 1.
    """
    assert_series_close(closed.active, oracle.active, rtol, label="active")
    assert_series_close(closed.entering, oracle.entering, rtol, label="entering")
    assert_series_close(closed.exiting, oracle.exiting, rtol, label="exiting")
    if closed.pool_remaining is not None:
        scale = pool_scale if pool_scale is not None else 1.0
        assert_series_close(closed.pool_remaining, oracle.pool_remaining,
                            rtol, scale=scale, label="pool")


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
