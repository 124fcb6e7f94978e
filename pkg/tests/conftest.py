import numpy as np
import pytest

from zenolab.engine import make_instance, subspace_frames, zeno_limit
from zenolab.rng import SplitMix64, random_density, random_projection
from zenolab.standard_form import build_standard_form

Q3_P = np.array([1 / 2, 1 / 3, 1 / 6])
NC2_P = np.array([0.75, 0.25])

ACCEPTANCE_LINES = []


def q3_instance():
    sf = build_standard_form(3, np.diag(Q3_P))
    return make_instance(sf, np.diag([1.0, 1.0, 0.0]), instance_id="Q3")


def nc2_instance():
    sf = build_standard_form(2, np.diag(NC2_P))
    return make_instance(sf, 0.5 * np.ones((2, 2)), instance_id="NC2")


def identity_instance(rho):
    rho = np.asarray(rho, complex)
    sf = build_standard_form(rho.shape[0], rho)
    return make_instance(sf, np.eye(rho.shape[0]), instance_id="identity")


def random_instance(seed, d=None, k=None):
    rng = SplitMix64(seed)
    d = d or rng.integer(2, 5)
    k = k or rng.integer(1, d - 1)
    sf = build_standard_form(d, random_density(rng, d))
    return make_instance(sf, random_projection(rng, d, k), instance_id=f"random{seed}")


def commuting_instance(seed):
    """Random density with a projection onto a subset of its eigenvectors."""
    rng = SplitMix64(seed)
    d = rng.integer(2, 5)
    k = rng.integer(1, d - 1)
    rho = random_density(rng, d)
    w, U = np.linalg.eigh(rho)
    cols = U[:, :k]
    sf = build_standard_form(d, rho)
    return make_instance(sf, cols @ cols.conj().T, instance_id=f"commuting{seed}")


@pytest.fixture
def q3():
    return q3_instance()


@pytest.fixture
def nc2():
    return nc2_instance()


@pytest.fixture
def q3_limit(q3):
    return zeno_limit(q3)


@pytest.fixture
def q3_frames(q3):
    return subspace_frames(q3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
