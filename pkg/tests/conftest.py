import numpy as np
import pytest

from siruv.core import EQ1_MATRIX, TABLE1, PatchArrays, PatchParams


@pytest.fixture
def table1():
    return [TABLE1] * 3


@pytest.fixture
def eq1():
    return EQ1_MATRIX


def as_dicts(params):
    return [
        dict(mu=p.mu, gamma=p.gamma, nu=p.nu, theta=p.theta, alpha=p.alpha, beta=p.beta, N=p.host_pop, M=p.vector_pop)
        for p in params
    ]


def random_params(rng, n):
    """Rates of order 0.01-1 per day; vector/host ratio within [0.1, 10]."""
    out = []
    for _ in range(n):
        N = rng.uniform(1e3, 1e6)
        out.append(
            PatchParams(
                mu=rng.uniform(0, 0.01),
                gamma=rng.uniform(0.01, 0.3),
                nu=rng.uniform(0.02, 0.2),
                theta=rng.uniform(0, 1),
                alpha=rng.uniform(0, 0.5),
                beta=rng.uniform(0, 0.5),
                host_pop=N,
                vector_pop=N * 10 ** rng.uniform(-1, 1),
            )
        )
    return out


def random_batch_params(rng, batch, n):
    """PatchArrays with shape (batch, n) drawn like ``random_params``."""
    return PatchArrays(
        mu=rng.uniform(0, 0.01, (batch, n)),
        gamma=rng.uniform(0.01, 0.3, (batch, n)),
        nu=rng.uniform(0.02, 0.2, (batch, n)),
        theta=rng.uniform(0, 1, (batch, n)),
        alpha=rng.uniform(0, 0.5, (batch, n)),
        beta=rng.uniform(0, 0.5, (batch, n)),
        host_pop=(N := rng.uniform(1e3, 1e6, (batch, n))),
        vector_pop=N * 10 ** rng.uniform(-1, 1, (batch, n)),
    )


def random_matrix(rng, n, *batch):
    return rng.dirichlet(np.ones(n), size=tuple(batch) + (n,))


def random_states(rng, n, *batch):
    """States on both simplices."""
    shape = tuple(batch) + (n,)
    sir = rng.dirichlet(np.ones(3), size=shape)
    v = rng.uniform(0, 1, shape)
    return np.concatenate([sir, (1 - v)[..., None], v[..., None]], axis=-1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
