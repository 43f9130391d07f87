import importlib
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fbmac.channel import ChannelConfig, FeedbackCov
from fbmac.scheme import SchemeParams

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def unit_cfg():
    return ChannelConfig(1.0, 1.0, 1.0, FeedbackCov(1.0, 1.0, 0.0))


@pytest.fixture
def asym_cfg():
    return ChannelConfig(1.3, 0.7, 0.9, FeedbackCov(0.5, 0.8, 0.3))


def random_params(rng, eta, scale=0.6, partial=False):
    a1 = rng.normal(size=eta)
    a2 = rng.normal(size=eta)
    b1 = np.zeros((eta, eta)) if partial else np.tril(scale * rng.normal(size=(eta, eta)), -1)
    b2 = np.tril(scale * rng.normal(size=(eta, eta)), -1)
    return SchemeParams(eta, a1, a2, b1, b2)


def random_psd(rng, scale=1.0):
    g = scale * rng.normal(size=(2, 2))
    return g @ g.T


@pytest.fixture(params=["python", "cython"])
def kernel_module(request):
    """Each kernel implementation in turn; the compiled one is skipped if not built."""
    if request.param == "python":
        return importlib.import_module("fbmac._kernels_py")
    try:
        return importlib.import_module("fbmac._ckernels")
    except ImportError:
        pytest.skip("compiled kernels not built")


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
