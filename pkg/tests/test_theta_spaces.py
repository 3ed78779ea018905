"""Theta space bases: functional equations, dimensions, product-map ranks."""

import cmath
import random

import pytest

from ellsurf.special_functions import NumericParams
from ellsurf.theta import (
    ThetaExpr,
    bc1_symmetric_space,
    multiplier_space,
    product_map_rank,
    sample_points,
)

PARAMS = NumericParams(p=0.23 + 0.06j, q=0.4 - 0.1j, eta=1.1 + 0.2j)


def random_pts(params, n, seed):
    return sample_points(params, n, random.Random(seed))


def check_multiplier(params, space, A, k, seed=5, tol=1e-10):
    for z in random_pts(params, 20, seed):
        for f in space.basis:
            lhs = f(params, params.p * z)
            rhs = A * z ** (-k) * f(params, z)
            assert abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs), 1e-300)


def test_multiplier_space_dimension_and_equation():
    rng = random.Random(0)
    A = 0.9 + 0.4j
    space = multiplier_space(PARAMS, A, 3, rng)
    assert space.dim == 3
    check_multiplier(PARAMS, space, A, 3)


def test_multiplier_space_negative_degree_empty():
    assert multiplier_space(PARAMS, 1.0 + 0j, -1).dim == 0


def test_multiplier_space_degree_zero():
    assert multiplier_space(PARAMS, PARAMS.p**2, 0).dim == 1
    assert multiplier_space(PARAMS, 1.7 + 0.1j, 0).dim == 0
    sp = multiplier_space(PARAMS, PARAMS.p, 0)
    z = 0.8 + 0.1j
    f = sp.basis[0]
    assert abs(f(PARAMS, PARAMS.p * z) - PARAMS.p * f(PARAMS, z)) < 1e-12


def test_degree2_multiplier_space_from_eta_data():
    # the coefficient space of an even degree-(s+f) generator has k = 4
    A = PARAMS.q * PARAMS.eta * (0.8 - 0.3j) / PARAMS.p**2
    space = multiplier_space(PARAMS, A, 2, random.Random(3))
    assert space.dim == 2
    check_multiplier(PARAMS, space, A, 2)


def test_bc1_space_dimensions():
    assert bc1_symmetric_space(PARAMS, PARAMS.eta, -1).dim == 0
    assert bc1_symmetric_space(PARAMS, PARAMS.eta, 0).dim == 1
    assert bc1_symmetric_space(PARAMS, PARAMS.eta, 1).dim == 2
    assert bc1_symmetric_space(PARAMS, PARAMS.eta, 3).dim == 4


def test_bc1_functional_equations():
    eta = PARAMS.eta
    space = bc1_symmetric_space(PARAMS, eta, 2, random.Random(9))
    for z in random_pts(PARAMS, 50, 10):
        for f in space.basis:
            fz = f(PARAMS, z)
            assert abs(f(PARAMS, eta / z) - fz) <= 1e-10 * abs(fz)
            lhs = f(PARAMS, PARAMS.p * z)
            rhs = (eta / (PARAMS.p * z**2)) ** 2 * fz
            assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_product_map_surjective_distinct_multipliers():
    rng = random.Random(21)
    A1, A2 = 1.3 + 0.2j, 0.7 - 0.5j
    L1 = multiplier_space(PARAMS, A1, 2, rng)
    L2 = multiplier_space(PARAMS, A2, 2, rng)
    assert product_map_rank(L1, L2) == 4


def test_product_map_constants():
    rng = random.Random(22)
    L1 = bc1_symmetric_space(PARAMS, PARAMS.eta, 0, rng)
    L2 = multiplier_space(PARAMS, 0.5 + 0.8j, 3, rng)
    assert product_map_rank(L1, L2) == L2.dim


def test_product_map_equal_multiplier_degree2_defect():
    # deg 2 x deg 2 with literally equal multiplier: image misses one dimension
    rng = random.Random(23)
    A = 1.1 + 0.3j
    L1 = multiplier_space(PARAMS, A, 2, rng)
    L2 = multiplier_space(PARAMS, A, 2, rng)
    assert product_map_rank(L1, L2) == 3


@pytest.mark.parametrize("da,db", [(2, 3), (3, 2), (3, 3), (2, 4)])
def test_product_map_surjectivity_sweep(da, db):
    # degrees >= 2 and not the equal-multiplier (2, 2) case: rank = da + db
    rng = random.Random(1000 + 10 * da + db)
    for _ in range(5):
        A1 = cmath.rect(rng.uniform(0.7, 1.4), 6.28 * rng.random())
        A2 = cmath.rect(rng.uniform(0.7, 1.4), 6.28 * rng.random())
        L1 = multiplier_space(PARAMS, A1, da, rng)
        L2 = multiplier_space(PARAMS, A2, db, rng)
        assert product_map_rank(L1, L2) == da + db


def test_theta_expr_closure_ops():
    e = ThetaExpr(scale=2.0, zpow=1).shift(PARAMS.q)
    assert abs(e.scale - 2.0 * PARAMS.q) < 1e-15
    f = ThetaExpr(zpow=2).invert(0.5 + 0j)
    assert f.zpow == -2 and abs(f.scale - 0.25) < 1e-15
