"""Special function identities against brute-force product oracles."""

import cmath
import random

import pytest

from ellsurf.errors import DomainError, NonConvergent, PoleHit
from ellsurf.special_functions import (
    NumericParams,
    elliptic_gamma,
    theta_p,
    theta_pochhammer,
)


def brute_theta(p, z, terms=200):
    out = 1.0
    for i in range(terms):
        out *= (1 - p**i * z) * (1 - p ** (i + 1) / z)
    return out


def brute_gamma(p, q, z, terms=60):
    out = 1.0
    for j in range(terms):
        for k in range(terms):
            out *= (1 - p ** (j + 1) * q ** (k + 1) / z) / (1 - p**j * q**k * z)
    return out


def random_z(rng, lo=0.5, hi=2.0):
    r = rng.uniform(lo, hi)
    return r * cmath.exp(2j * cmath.pi * rng.random())


def test_theta_vanishes_at_one():
    assert theta_p(0.3, 1.0) == 0


def test_theta_matches_brute_force():
    val = theta_p(0.1, 0.5)
    ref = brute_theta(0.1, 0.5)
    assert abs(val - ref) <= 1e-14 * abs(ref)


def test_gamma_matches_brute_force():
    val = elliptic_gamma(0.1, 0.2, 0.5)
    ref = brute_gamma(0.1, 0.2, 0.5)
    assert abs(val - ref) <= 1e-12 * abs(ref)


def test_theta_quasiperiodicity():
    rng = random.Random(11)
    p = 0.31 + 0.07j
    for _ in range(100):
        z = random_z(rng)
        lhs = theta_p(p, p * z)
        rhs = -theta_p(p, z) / z
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_theta_inversion_and_p_symmetry():
    rng = random.Random(12)
    p = 0.2 - 0.1j
    for _ in range(50):
        z = random_z(rng)
        assert abs(theta_p(p, 1 / z) + theta_p(p, z) / z) <= 1e-10 * abs(theta_p(p, z) / z)
        assert abs(theta_p(p, p / z) - theta_p(p, z)) <= 1e-10 * abs(theta_p(p, z))


def test_gamma_difference_equations():
    rng = random.Random(13)
    p, q = 0.23 + 0.05j, 0.17 - 0.08j
    for _ in range(50):
        z = random_z(rng)
        gq = elliptic_gamma(p, q, q * z)
        gp = elliptic_gamma(p, q, p * z)
        g = elliptic_gamma(p, q, z)
        assert abs(gq - theta_p(p, z) * g) <= 1e-10 * abs(gq)
        assert abs(gp - theta_p(q, z) * g) <= 1e-10 * abs(gp)


def test_gamma_reflection_product_is_one():
    # The defining double product forces gamma(z) gamma(pq/z) = 1; the
    # literature sometimes prints gamma(pq/z) = gamma(z), which the product
    # contradicts.  We test the identity the definition implies.
    rng = random.Random(14)
    p, q = 0.29, 0.11 + 0.13j
    for _ in range(50):
        z = random_z(rng)
        prod = elliptic_gamma(p, q, z) * elliptic_gamma(p, q, p * q / z)
        assert abs(prod - 1) <= 1e-10


def test_pochhammer_empty_product():
    assert theta_pochhammer(0.2, 0.5, 0.7 + 0.1j, 0) == 1


def test_pochhammer_matches_two_thetas():
    val = theta_pochhammer(0.2, 0.5, 0.7, 2)
    ref = theta_p(0.2, 0.7) * theta_p(0.2, 0.35)
    assert abs(val - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("k", range(-3, 4))
def test_pochhammer_gamma_ratio(k):
    rng = random.Random(100 + k)
    p, q = 0.21, 0.33 - 0.1j
    for _ in range(10):
        z = random_z(rng)
        val = theta_pochhammer(p, q, z, k)
        ref = elliptic_gamma(p, q, q**k * z) / elliptic_gamma(p, q, z)
        assert abs(val - ref) <= 1e-10 * abs(ref)


def test_pochhammer_cocycle():
    rng = random.Random(15)
    p, q = 0.19 + 0.04j, 0.41
    for a in range(-3, 4):
        for b in range(-3, 4):
            z = random_z(rng)
            lhs = theta_pochhammer(p, q, z, a + b)
            rhs = theta_pochhammer(p, q, z, a) * theta_pochhammer(p, q, q**a * z, b)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


def test_domain_errors():
    with pytest.raises(NonConvergent):
        theta_p(1.2, 0.5)
    with pytest.raises(DomainError):
        theta_p(0.5, 0.0)
    with pytest.raises(DomainError):
        elliptic_gamma(0.3, 1.1, 0.5)
    with pytest.raises(PoleHit):
        theta_pochhammer(0.2, 0.5, 0.5, -1)  # q^-1 z = 1 is a zero of theta


def test_params_validation():
    with pytest.raises(NonConvergent):
        NumericParams(p=1.5, q=0.5)
    with pytest.raises(DomainError):
        NumericParams(p=0.5, q=0.5, truncation_eps=0.0)
    ok = NumericParams(p=0.3, q=0.5, eta=1.2, x=(0.7,))
    assert ok.x == (0.7,)
