import numpy as np
import pytest

from qharm import QLattice, QParams, build_transform_table

# q=0.9 needs a wider window: kernels decay like q^{n^2} at the small-x end
# and only like the measure weight at the large-n end
REGIMES = [
    (0.5, 0.0, -20, 60),
    (0.5, 1.5, -20, 60),
    (0.9, 0.0, -30, 160),
    (0.9, 1.5, -30, 160),
]

_TABLE_CACHE = {}


def get_table(q, v, n_min, n_max):
    key = (q, v, n_min, n_max)
    if key not in _TABLE_CACHE:
        params = QParams(q=q, v=v)
        _TABLE_CACHE[key] = build_transform_table(params, QLattice(q, n_min, n_max))
    return _TABLE_CACHE[key]


@pytest.fixture(params=REGIMES, ids=lambda r: f"q{r[0]}-v{r[1]}")
def regime_table(request):
    return get_table(*request.param)


@pytest.fixture
def table05():
    return get_table(0.5, 0.0, -20, 60)


@pytest.fixture
def rng():
    return np.random.default_rng(987)
