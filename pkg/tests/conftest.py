import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nwfpp import nwgraph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = []


def record_criterion(number, name, passed, detail):
    _ACCEPTANCE.append((number, name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {number:>2}. {name}: {detail}")


@pytest.fixture
def small_graph():
    return nwgraph.generate(nwgraph.GraphConfig(60, 1.5, seed=11))


def random_graph(n, rho, seed):
    return nwgraph.generate(nwgraph.GraphConfig(n, rho, seed))


def scipy_distances(graph, source):
    from scipy.sparse.csgraph import dijkstra

    return dijkstra(graph.to_scipy(), directed=False, indices=source)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_force_distance(graph, u, v):
    """Minimum weight over all simple paths from u to v (exponential, n <= 8)."""
    adj = {x: [] for x in range(graph.n)}
    for a, b, w in zip(graph.u.tolist(), graph.v.tolist(), graph.weight.tolist()):
        adj[a].append((b, w))
        adj[b].append((a, w))
    best = math.inf

    def walk(x, seen, acc):
        nonlocal best
        if x == v:
            best = min(best, acc)
            return
        for y, w in adj[x]:
            if y not in seen:
                seen.add(y)
                walk(y, seen, acc + w)
                seen.remove(y)

    walk(u, {u}, 0.0)
    return best
