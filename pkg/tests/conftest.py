import math

import numpy as np
import pytest

from chargedrop.capillarity import SessileConfig, build_bbeta
from chargedrop.optimizer import SolverConfig, minimize
from chargedrop.shapes import unit_square

SQUARE_ROBIN = -math.log(math.gamma(0.25) ** 2 / (4.0 * math.pi ** 1.5))


def solver_config(beta=0.0, q=0.0, **kw) -> SolverConfig:
    return SolverConfig(sessile=SessileConfig(beta=beta, q=q, n_panels=1024), **kw)


class MinimizerCache:
    """Minimizers shared across tests; each (beta, q, init) cell runs once."""

    def __init__(self):
        self._runs = {}

    def __call__(self, beta: float, q: float, init: str = "square"):
        key = (float(beta), float(q), init)
        if key not in self._runs:
            cfg = solver_config(beta, q)
            start = unit_square() if init == "square" else build_bbeta(beta, 1.0, cfg.n_shape_vertices)
            P, trace = minimize(start, cfg)
            self._runs[key] = (P, trace, cfg)
        return self._runs[key]


@pytest.fixture(scope="session")
def minimized():
    return MinimizerCache()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
