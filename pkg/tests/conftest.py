import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from crawlerlab.params import Groups

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


@pytest.fixture(scope="session")
def fixtures_dir():
    return os.path.abspath(FIXTURES)


@pytest.fixture(scope="session")
def analytic_groups():
    """Composite gain exactly 2 with pi_l = 3: the critical gain is 2 and
    the crossing frequency 1."""
    return Groups(zeta=0.0, pi_f=1.0, pi_V=0.5,
                  pi_eps=2.0 / (1.0 - math.tanh(0.5)), n_f=0.5,
                  pi_c=1.0, pi_l=3.0, pi_s=1.0)


@pytest.fixture(scope="session")
def damped_groups():
    """Same skeleton with damping (composite gain 2.5); limit cycles at
    moderate gains are strongly attracting, which makes simulation-based
    tests fast and clean."""
    return Groups(zeta=0.25, pi_f=1.0, pi_V=0.5,
                  pi_eps=2.0 / (1.0 - math.tanh(0.5)), n_f=0.5,
                  pi_c=1.0, pi_l=3.0, pi_s=1.0)


@pytest.fixture(scope="session")
def stiff_groups():
    """Stiff reference point: strong anisotropy, timescale ratio 1e-4."""
    return Groups(zeta=4.7, pi_f=2.5, pi_V=0.5, pi_eps=4.7e3, n_f=1.5,
                  pi_c=1e4, pi_l=2e4, pi_s=2e4)


@pytest.fixture(scope="session")
def relay_groups():
    """Describing-function reference point (relay magnitude passed apart)."""
    return Groups(zeta=2.0, pi_f=2.5, pi_V=0.5, pi_eps=1.0, n_f=1.5,
                  pi_c=1.0, pi_l=1.0, pi_s=1.0)
