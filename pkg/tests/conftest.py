import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def unit(n, i, j, m=None):
    E = np.zeros((n, n if m is None else m), dtype=np.complex128)
    E[i, j] = 1
    return E


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def brute_kernel(fn, rows, cols):
    """Kernel of a linear map on rows x cols matrices, built entry by entry.

    ``fn`` takes a matrix and returns a list of arrays.  The map is
    evaluated on every matrix unit and flattened row-major, so it shares
    nothing with the Kronecker route used by the library.  Returns
    (dimension, list of kernel matrices).
    """
    cols_ = []
    for i in range(rows):
        for j in range(cols):
            out = fn(unit(rows, i, j, cols))
            cols_.append(np.concatenate([np.ravel(o) for o in out]) if out else np.zeros(0))
    M = np.column_stack(cols_)
    if M.shape[0] == 0:
        return rows * cols, [unit(rows, i, j, cols) for i in range(rows) for j in range(cols)]
    _, s, vh = np.linalg.svd(M)
    r = int(np.sum(s > 1e-9 * max(1.0, s[0]) + 1e-10))
    null = vh[r:].conj()
    return rows * cols - r, [v.reshape(rows, cols) for v in null]


def brute_commutant_dim(mats):
    n = mats[0].shape[0]
    return brute_kernel(lambda X: [X @ A - A @ X for A in mats], n, n)[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
