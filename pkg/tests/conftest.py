import pytest
from hypothesis import HealthCheck, settings

from wolbachia import ModelParams

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

TABLE_RATES = dict(b_i=0.45, b_u=0.55, delta_i=0.05, delta_u=0.048, d_i=0.001, d_u=0.001)

STUDIED_CASES = {
    "A1": dict(sigma_i=1.1, sigma_u=1.2),
    "A2": dict(sigma_i=0.2, sigma_u=1.2),
    "B1": dict(sigma_i=0.1, sigma_u=0.5),
    "B2": dict(sigma_i=1.1, sigma_u=0.5),
    "B3": dict(sigma_i=0.6, sigma_u=0.5),
}


@pytest.fixture(scope="session")
def studied_params():
    return {code: ModelParams(**TABLE_RATES, **sig) for code, sig in STUDIED_CASES.items()}
