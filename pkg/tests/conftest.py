import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_psd(n, seed, rank=None, scale=1.0):
    """``G G^T`` with Gaussian ``G`` (n x rank); full rank by default."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, rank or n))
    K = scale * (G @ G.T) / (rank or n)
    return 0.5 * (K + K.T)


def rbf_kernel_matrix(n, seed, dim=3, width=1.0):
    from nystromlab.kernels import KernelFunction, gram

    X = np.random.default_rng(seed).standard_normal((n, dim))
    return gram(X, KernelFunction("rbf", width=width))


@pytest.fixture
def psd():
    return random_psd


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
