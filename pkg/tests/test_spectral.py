import math

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from percolab.errors import InvalidLambda, NotRegular, ValidationError
from percolab.generators import gen_complete, gen_cycle, gen_hypercube, gen_random_regular
from percolab.spectral import (
    alon_milman_bound,
    edges_between,
    mixing_bounds,
    mixing_interval,
    short_cycle_census,
    spectral_lambda,
)

from conftest import path_graph, random_tree


def dense(g):
    a = np.zeros((g.n, g.n))
    a[g.edges[:, 0], g.edges[:, 1]] = 1
    return a + a.T


@pytest.mark.parametrize("g, lam", [(gen_complete(50), 1.0), (gen_cycle(4), 2.0),
                                    (gen_hypercube(3), 3.0), (gen_cycle(9), 2 * math.cos(math.pi / 9))])
def test_closed_forms(g, lam):
    est = spectral_lambda(g, tol=1e-10)
    assert est.lam == pytest.approx(lam, abs=1e-6)
    assert est.residual <= 1e-10


def test_against_dense_eigensolver():
    for seed in range(5):
        g = gen_random_regular(80, 5, seed)
        ev = eigvalsh(dense(g))
        est = spectral_lambda(g, tol=1e-10, seed=seed)
        assert est.lambda2 == pytest.approx(ev[-2], abs=1e-6)
        assert est.lambda_min == pytest.approx(ev[0], abs=1e-6)


def test_k2_degenerate():
    est = spectral_lambda(gen_complete(2))
    assert est.lambda2 == pytest.approx(-1) and est.lam == pytest.approx(1)


def test_errors():
    with pytest.raises(NotRegular):
        spectral_lambda(path_graph(4))
    with pytest.raises(ValidationError):
        spectral_lambda(gen_complete(1))


def test_mixing_examples():
    assert alon_milman_bound(100, 10, 3, 10) == pytest.approx(63)
    assert alon_milman_bound(100, 10, 10, 40) == 0
    assert mixing_interval(100, 10, 3, 10, 10) == pytest.approx((0.0, 40.0))
    assert mixing_bounds(100, 10, 3, [10, (10, 10)]) == [pytest.approx(63), pytest.approx((0.0, 40.0))]
    with pytest.raises(InvalidLambda):
        mixing_bounds(100, 10, 11, [5])
    with pytest.raises(ValidationError):
        mixing_bounds(100, 10, 3, [101])


def test_mixing_certificates_dominated():
    rng = np.random.default_rng(0)
    checks = 0
    for seed in range(10):
        n = int(rng.integers(40, 201)) // 2 * 2
        d = int(rng.integers(3, 9))
        g = gen_random_regular(n, d, seed)
        est = spectral_lambda(g, tol=1e-10, seed=seed)
        lam = min(d, est.lam + est.residual)
        for _ in range(10):
            perm = rng.permutation(n)
            b = int(rng.integers(1, n // 2))
            c = int(rng.integers(1, n - b + 1))
            B, C = perm[:b], perm[b:b + c]
            lo, hi = mixing_interval(n, d, lam, b, c)
            assert lo - 1e-9 <= edges_between(g, B, C) <= hi + 1e-9
            comp = perm[b:]
            assert edges_between(g, B, comp) >= alon_milman_bound(n, d, lam, b) - 1e-9
            checks += 1
    assert checks == 100


def test_census_cases(rng):
    assert short_cycle_census(random_tree(30, rng), 5)[0] == 30
    assert short_cycle_census(gen_cycle(9), 3)[0] == 9
    count, flags = short_cycle_census(gen_cycle(9), 4)
    assert count == 0 and not flags.any()
    assert short_cycle_census(gen_hypercube(3), 0)[0] == 8
    assert short_cycle_census(gen_hypercube(3), 1)[0] == 8
    assert short_cycle_census(gen_hypercube(3), 2)[0] == 0
    with pytest.raises(ValidationError):
        short_cycle_census(gen_cycle(5), -1)
