import os

# Pin BLAS to one thread before numpy loads anywhere: the acceptance runtime
# budgets assume a single thread, and serial reductions keep results reproducible.
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import numpy as np
import pytest


SEED = int(os.environ.get("EBENCH_SEED", "0")) or 0xEB2026


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def session_rng():
    return np.random.default_rng(SEED)
