import numpy as np
import pytest

from swiptfog import SystemParams, evaluate_strategies, load_params


@pytest.fixture
def params() -> SystemParams:
    # defaults, shielded from ambient environment overrides
    return load_params("", env={})


def random_gain_pairs(rng: np.random.Generator, n: int, params: SystemParams,
                      require_both: bool = True):
    """Log-uniform (downlink gain, offload gain) pairs, filtered to instances
    where the requested strategies are feasible."""
    pairs = []
    while len(pairs) < n:
        gd = 10.0 ** rng.uniform(-8.0, -3.0)
        go = 10.0 ** rng.uniform(-8.0, -4.0)
        local, offload = evaluate_strategies(params, gd, go)
        if require_both and not (local.feasible and offload.feasible):
            continue
        if not require_both and not (local.feasible or offload.feasible):
            continue
        pairs.append((gd, go))
    return pairs
