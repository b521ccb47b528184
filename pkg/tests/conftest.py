import warnings

import pytest

import warpknot as wk


@pytest.fixture(scope="session")
def metric_23():
    """The (m, n, rho) = (2, 3, 0.25) quotient metric used throughout."""
    return wk.build_metric(2, 3, 0.25)


@pytest.fixture(scope="session")
def metric_round():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return wk.build_metric(1, 1, 0.25)


@pytest.fixture(scope="session")
def profile_n3():
    return wk.build_warp(3, 0.25, 1e-12)
