import pytest

from rotor_ratchet import scaling_curve


@pytest.fixture(scope="session")
def default_curve():
    """Scaling curve at default tolerances, shared across test modules."""
    return scaling_curve(20.0, 401, 1024, 1e-3)
