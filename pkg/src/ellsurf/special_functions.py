"""Multiplicative elliptic special functions.

Everything is built from the theta function

    theta_p(z) = prod_{i>=0} (1 - p^i z)(1 - p^{i+1}/z),      |p| < 1,

its q-Pochhammer cocycle theta_p(z; q)_k, and the elliptic Gamma function

    gamma_pq(z) = prod_{j,k>=0} (1 - p^{j+1} q^{k+1}/z) / (1 - p^j q^k z),

with truncation controlled so the dropped tail stays below a relative
error target.  All evaluators accept scalars or numpy arrays for z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergent, PoleHit

DEFAULT_EPS = 1e-14

# Extra headroom over the tail bound so rounding in the partial product
# never dominates the requested tolerance.
_MARGIN = 1e-2


@dataclass(frozen=True)
class NumericParams:
    """Evaluation context: nome p, shift q, symmetry point eta, marked points x."""

    p: complex
    q: complex
    eta: complex = 1.0
    x: tuple = ()
    truncation_eps: float = DEFAULT_EPS

    def __post_init__(self):
        if abs(self.p) >= 1:
            raise NonConvergent(f"|p| = {abs(self.p)} must be < 1")
        if self.truncation_eps <= 0:
            raise DomainError("truncation_eps must be positive")
        for name, val in [("p", self.p), ("q", self.q), ("eta", self.eta)]:
            if val == 0:
                raise DomainError(f"{name} must be nonzero")
        if any(v == 0 for v in self.x):
            raise DomainError("marked points must be nonzero")
        object.__setattr__(self, "x", tuple(self.x))


def _truncation_order(p: complex, zmod: float, eps: float) -> int:
    """Smallest N with |p|^N * zmod below eps * margin."""
    ap = abs(p)
    if ap >= 1:
        raise NonConvergent("|p| must be < 1")
    target = eps * _MARGIN / max(zmod, 1.0)
    if target >= 1.0:
        return 1
    n = int(np.ceil(np.log(target) / np.log(ap)))
    return max(n, 1)


def theta_p(p: complex, z, eps: float = DEFAULT_EPS):
    """theta_p(z) = prod_{0<=i<N} (1 - p^i z)(1 - p^{i+1}/z), tail < eps."""
    arr = np.asarray(z, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("theta_p is singular at z = 0")
    zmod = float(np.max(np.maximum(np.abs(arr), 1.0 / np.abs(arr))))
    n = _truncation_order(p, zmod, eps)
    out = np.ones_like(arr)
    pi = 1.0 + 0j
    for _ in range(n):
        out = out * (1.0 - pi * arr) * (1.0 - (pi * p) / arr)
        pi *= p
    return out if isinstance(z, np.ndarray) else complex(out)


def theta_p_many(p: complex, values, z, eps: float = DEFAULT_EPS):
    """Product of theta_p(a*z) over a in values (theta_p(a1 z, a2 z, ...) shorthand)."""
    out = np.ones_like(z, dtype=complex) if isinstance(z, np.ndarray) else 1.0 + 0j
    for a in values:
        out = out * theta_p(p, a * z, eps)
    return out


def theta_pochhammer(p: complex, q: complex, z, k: int, eps: float = DEFAULT_EPS):
    """theta_p(z; q)_k = prod_{0<=j<k} theta_p(q^j z), with
    prod_{0<=j<k} = prod_{k<=j<0}^{-1} for negative k."""
    if q == 0:
        raise DomainError("q must be nonzero")
    if k >= 0:
        out = 1.0 + 0j if not isinstance(z, np.ndarray) else np.ones_like(z, dtype=complex)
        for j in range(k):
            out = out * theta_p(p, (q ** j) * z, eps)
        return out
    out = 1.0 + 0j if not isinstance(z, np.ndarray) else np.ones_like(z, dtype=complex)
    for j in range(k, 0):
        factor = theta_p(p, (q ** j) * z, eps)
        if np.min(np.abs(np.asarray(factor))) < eps:
            raise PoleHit(f"inverted Pochhammer factor vanishes at j={j}")
        out = out / factor
    return out


def elliptic_gamma(p: complex, q: complex, z, eps: float = DEFAULT_EPS):
    """Elliptic Gamma function; requires |p|, |q| < 1.

    Solves gamma(qz) = theta_p(z) gamma(z) and gamma(pz) = theta_q(z) gamma(z),
    and satisfies gamma(z) gamma(pq/z) = 1 (see package docs: the defining
    double product forces this form of the reflection identity).
    """
    if abs(q) >= 1:
        raise DomainError("elliptic_gamma requires |q| < 1; use the Pochhammer cocycle")
    if abs(p) >= 1:
        raise NonConvergent("|p| must be < 1")
    arr = np.asarray(z, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("z must be nonzero")
    zmod = float(np.max(np.maximum(np.abs(arr), 1.0 / np.abs(arr))))
    nj = _truncation_order(p, zmod, eps)
    nk = _truncation_order(q, zmod, eps)
    out = np.ones_like(arr)
    pj = 1.0 + 0j
    for _ in range(nj):
        qk = 1.0 + 0j
        num = np.ones_like(arr)
        den = np.ones_like(arr)
        for _ in range(nk):
            num = num * (1.0 - (pj * p * qk * q) / arr)
            den = den * (1.0 - pj * qk * arr)
            qk *= q
        bad = np.abs(den) < eps * _MARGIN
        if np.any(bad):
            raise PoleHit("z within truncation_eps of a pole p^-j q^-k of elliptic_gamma")
        out = out * num / den
        pj *= p
    return out if isinstance(z, np.ndarray) else complex(out)


def elliptic_gamma_many(p: complex, q: complex, args, eps: float = DEFAULT_EPS):
    """Product of elliptic_gamma over an iterable of arguments."""
    out = 1.0 + 0j
    for a in args:
        out = out * elliptic_gamma(p, q, a, eps)
    return out


def qpochhammer_inf(a: complex, q: complex, eps: float = DEFAULT_EPS) -> complex:
    """(a; q)_inf = prod_{k>=0} (1 - a q^k)."""
    if abs(q) >= 1:
        raise NonConvergent("|q| must be < 1")
    n = _truncation_order(q, max(abs(a), 1.0), eps)
    out = 1.0 + 0j
    qk = 1.0 + 0j
    for _ in range(n):
        out *= 1.0 - a * qk
        qk *= q
    return out
