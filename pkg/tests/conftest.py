import pytest

from vgpricer.model import MarketInputs, VgParams
from vgpricer.reference import load_reference


@pytest.fixture(scope="session")
def bench_params() -> VgParams:
    """The parameter set every reference table shares."""
    return VgParams(sigma=0.2, nu=0.85, theta=0.0)


@pytest.fixture(scope="session")
def reference():
    return load_reference()


def make_market(spot, tau, strike=4000.0, rate=0.01, **kwargs) -> MarketInputs:
    return MarketInputs(spot=spot, strike=strike, rate=rate, tau=tau, **kwargs)
