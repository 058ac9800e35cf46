import numpy as np
import pytest

# Toy wide dataset: the response is 1 exactly when x1 = x2 = 1 or x3 = x4 = 1.
# The first pair is constructed to be individually uncorrelated with the
# response, the second pair carries a moderate marginal correlation, so
# correlation-based screening is structurally blind to half the signal.
# Column 12 is all zeros (zero variance).  18 columns, 0-based indices.
TOY_X = np.array(
    [
        [1, 1, 0, 1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 1, 1, 0, 1, 1],
        [1, 1, 1, 0, 0, 0, 0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 0],
        [0, 0, 1, 1, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 1, 1, 1],
        [0, 0, 1, 1, 0, 1, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0],
        [1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 0, 0, 1, 1, 0],
        [1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0],
        [0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0],
        [0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0],
    ],
    dtype=np.int8,
)
TOY_Y = np.array([1, 1, 1, 1, 0, 0, 0, 0], dtype=np.int8)


@pytest.fixture
def toy_xy():
    return TOY_X.copy(), TOY_Y.copy()


def hat_pinv(rows: np.ndarray) -> np.ndarray:
    """Projector onto the column space via the explicit (pseudo-)inverse.

    Independent of the package's factorization path; only used as a test
    oracle on small instances.
    """
    rows = np.asarray(rows, dtype=np.float64)
    return rows @ np.linalg.pinv(rows.T @ rows) @ rows.T


def random_binary_instance(rng, max_n=8, max_p=20, full_rank=True):
    """A random 0/1 dataset (x, y) with n <= max_n, p <= max_p, p >= n."""
    while True:
        n = int(rng.integers(2, max_n + 1))
        p = int(rng.integers(n, max_p + 1))
        x = rng.integers(0, 2, size=(n, p)).astype(np.int8)
        y = rng.integers(0, 2, size=n).astype(np.int8)
        if not y.any():
            continue
        rows = np.vstack([x.T.astype(float), y.astype(float)[None, :]])
        if not full_rank or np.linalg.matrix_rank(rows) == n:
            return x, y
