import numpy as np
import pytest

import decmech as dm


def random_game(rng, n_states=2, n_types=None, n_actions=None, scale=1.0):
    """Seeded random game with standard-normal utilities."""
    m = n_types if n_types is not None else int(rng.integers(1, 4))
    k = n_actions if n_actions is not None else int(rng.integers(2, 4))
    return dm.BasicGame(
        states=tuple(f"x{i}" for i in range(n_states)),
        types=tuple(f"t{i}" for i in range(m)),
        actions=tuple(["DO"] + [f"a{i}" for i in range(1, k)]),
        utility_D=scale * rng.normal(size=(n_states, m, k)),
        utility_U=scale * rng.normal(size=(n_states, m, k)),
    )


def random_b_D(rng, n_states, n_types):
    return rng.dirichlet(np.ones(n_types), size=n_states)


@pytest.fixture
def benchmark():
    return dm.insider_game()
