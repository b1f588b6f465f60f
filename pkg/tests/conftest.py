import itertools

import numpy as np
import pytest

from pege.environments import build_ranking_game


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def all_rankings(n):
    return list(itertools.permutations(range(n)))


def brute_values(game, theta):
    """Reward of every permutation, in lexicographic order, by direct enumeration."""
    perms = all_rankings(game.n_items)
    F = np.array([[game.gain_vector[x.index(i)] for i in range(game.n_items)] for x in perms])
    return perms, F @ np.asarray(theta, dtype=float)


@pytest.fixture
def ranking3():
    return build_ranking_game(3)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
