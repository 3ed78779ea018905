"""Closed-form theta expressions and finite-dimensional theta-function spaces.

A ThetaExpr is a product

    scale * z^zpow * prod theta_p(a * z^s)^e * prod theta_p(a * z^s; q)_k^e

which is closed under multiplication, the shift z -> q z, and the
substitution z -> c / z.  Spaces of theta functions with a prescribed
multiplier f(pz) = A z^-k f(z), or with BC1(eta) symmetry, get explicit
product bases with randomized zero locations; ranks of function systems
are measured by sampled SVD.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateMultiplier, DomainError, IndeterminateRank
from .special_functions import DEFAULT_EPS, NumericParams, theta_p, theta_pochhammer

RANK_TOL = 1e-8
GAP_RATIO = 1e2


@dataclass(frozen=True)
class ThetaAtom:
    a: complex
    sigma: int = 1  # theta argument is a * z^sigma; any nonzero integer
    exp: int = 1


@dataclass(frozen=True)
class PochAtom:
    a: complex
    sigma: int = 1
    k: int = 0
    exp: int = 1


@dataclass(frozen=True)
class ThetaExpr:
    scale: complex = 1.0
    zpow: int = 0
    atoms: tuple = ()
    poch_atoms: tuple = ()

    def __mul__(self, other):
        if isinstance(other, ThetaExpr):
            return ThetaExpr(
                self.scale * other.scale,
                self.zpow + other.zpow,
                self.atoms + other.atoms,
                self.poch_atoms + other.poch_atoms,
            )
        return ThetaExpr(self.scale * other, self.zpow, self.atoms, self.poch_atoms)

    __rmul__ = __mul__

    def shift(self, c: complex) -> "ThetaExpr":
        """Substitute z -> c*z (the q-shift is shift(q))."""
        atoms = tuple(replace(t, a=t.a * c**t.sigma) for t in self.atoms)
        pochs = tuple(replace(t, a=t.a * c**t.sigma) for t in self.poch_atoms)
        return ThetaExpr(self.scale * c**self.zpow, self.zpow, atoms, pochs)

    def invert(self, c: complex) -> "ThetaExpr":
        """Substitute z -> c/z."""
        atoms = tuple(replace(t, a=t.a * c**t.sigma, sigma=-t.sigma) for t in self.atoms)
        pochs = tuple(replace(t, a=t.a * c**t.sigma, sigma=-t.sigma) for t in self.poch_atoms)
        return ThetaExpr(self.scale * c**self.zpow, -self.zpow, atoms, pochs)

    def power_minus_one(self) -> "ThetaExpr":
        atoms = tuple(replace(t, exp=-t.exp) for t in self.atoms)
        pochs = tuple(replace(t, exp=-t.exp) for t in self.poch_atoms)
        return ThetaExpr(1.0 / self.scale, -self.zpow, atoms, pochs)

    def __call__(self, params: NumericParams, z):
        out = self.scale * np.asarray(z, dtype=complex) ** self.zpow
        for t in self.atoms:
            val = theta_p(params.p, t.a * np.asarray(z, dtype=complex) ** t.sigma, params.truncation_eps)
            out = out * np.asarray(val) ** t.exp
        for t in self.poch_atoms:
            val = theta_pochhammer(
                params.p, params.q, t.a * np.asarray(z, dtype=complex) ** t.sigma, t.k, params.truncation_eps
            )
            out = out * np.asarray(val) ** t.exp
        return out if isinstance(z, np.ndarray) else complex(out)

    def zero_like_points(self):
        """Centers a (per atom) whose p-orbit carries zeros/poles; used to reject samples."""
        pts = []
        for t in self.atoms:
            pts.append((t.a, t.sigma))
        for t in self.poch_atoms:
            pts.append((t.a, t.sigma))
        return pts


def const_expr(c: complex = 1.0) -> ThetaExpr:
    return ThetaExpr(scale=c)


def theta_expr(*centers, scale=1.0, zpow=0) -> ThetaExpr:
    """Product theta_p(z/a1) ... theta_p(z/an) written via atom a_i = 1/a_i...

    Centers are the zeros: theta_p(z/a) vanishes on a p^Z.
    """
    atoms = tuple(ThetaAtom(a=1.0 / a, sigma=1) for a in centers)
    return ThetaExpr(scale=scale, zpow=zpow, atoms=atoms)


class CoefExpr:
    """Finite sum of ThetaExpr terms; the coefficient field for operators."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        if isinstance(terms, ThetaExpr):
            terms = (terms,)
        self.terms = tuple(terms)

    @staticmethod
    def zero():
        return CoefExpr(())

    def is_zero_form(self):
        return not self.terms

    def __add__(self, other):
        other = as_coef(other)
        return CoefExpr(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return CoefExpr(tuple(t * other for t in self.terms))
        other = as_coef(other)
        return CoefExpr(tuple(a * b for a in self.terms for b in other.terms))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def shift(self, c):
        return CoefExpr(tuple(t.shift(c) for t in self.terms))

    def invert(self, c):
        return CoefExpr(tuple(t.invert(c) for t in self.terms))

    def __call__(self, params, z):
        if not self.terms:
            return np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0j
        out = self.terms[0](params, z)
        for t in self.terms[1:]:
            out = out + t(params, z)
        return out

    def zero_like_points(self):
        pts = []
        for t in self.terms:
            pts.extend(t.zero_like_points())
        return pts


def as_coef(c) -> CoefExpr:
    if isinstance(c, CoefExpr):
        return c
    if isinstance(c, ThetaExpr):
        return CoefExpr((c,))
    if isinstance(c, (int, float, complex)):
        return CoefExpr((const_expr(c),))
    raise TypeError(f"cannot coerce {type(c)} to CoefExpr")


# ---------------------------------------------------------------------------
# sampling and rank measurement


def sample_points(params: NumericParams, n: int, rng: random.Random, avoid=(), lo=None, hi=None):
    """n points on the annulus lo <= |z| <= hi (default |p|^(1/2) .. 1),
    rejecting near-zeros of the atoms in avoid."""
    if lo is None:
        lo = abs(params.p) ** 0.5
    if hi is None:
        hi = 1.0
    pts = []
    guard = 0
    while len(pts) < n:
        guard += 1
        if guard > 500 * n + 200:
            raise DomainError("sample rejection did not converge")
        r = rng.uniform(lo, hi)
        z = r * cmath.exp(2j * math.pi * rng.random())
        ok = True
        for a, sigma in avoid:
            w = a * z**sigma
            if abs(w) < 1e-12:
                ok = False
                break
            # zeros of theta_p(w) lie on w in p^Z; keep a relative margin
            k = round(math.log(abs(w)) / math.log(abs(params.p)))
            for kk in (k - 1, k, k + 1):
                pk = params.p**kk
                if abs(w - pk) < 1e-4 * max(abs(pk), 1e-6):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            pts.append(z)
    return pts


def numerical_rank(matrix, tol: float = RANK_TOL) -> int:
    """Rank by SVD with relative cutoff; ambiguous spectra raise IndeterminateRank."""
    m = np.asarray(matrix, dtype=complex)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    rel = s / s[0]
    kept = int(np.sum(rel > tol))
    if 0 < kept < len(rel):
        gap = rel[kept - 1] / rel[kept]
        if gap < GAP_RATIO:
            raise IndeterminateRank(
                f"singular value gap {gap:.2e} below {GAP_RATIO:.0e} at tol {tol:g}"
            )
    return kept


def rank_of_functions(params, funcs, n_points, rng, tol=RANK_TOL, avoid=()):
    """Numerical rank of a list of callables/(ThetaExpr|CoefExpr) sampled at n_points."""
    pts = sample_points(params, n_points, rng, avoid=avoid)
    rows = []
    for f in funcs:
        vals = [f(params, z) if not callable(f) or isinstance(f, (ThetaExpr, CoefExpr)) else f(z) for z in pts]
        row = np.array(vals, dtype=complex)
        norm = np.linalg.norm(row)
        if norm == 0:
            rows.append(row)
        else:
            rows.append(row / norm)
    return numerical_rank(np.array(rows), tol)


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class ThetaSpace:
    kind: tuple  # ("multiplier", A, k) or ("bc1", eta, d)
    basis: tuple
    params: NumericParams

    @property
    def dim(self):
        return len(self.basis)


def _in_p_power(params: NumericParams, A: complex, tol: float = 1e-9):
    """Return integer m with A = p^m within tol, else None."""
    ap = abs(params.p)
    if A == 0:
        return None
    m = round(math.log(abs(A)) / math.log(ap))
    if abs(A - params.p**m) <= tol * max(1.0, abs(A)):
        return m
    return None


def multiplier_space(params: NumericParams, A: complex, k: int, rng=None) -> ThetaSpace:
    """Basis of {f holomorphic on C*: f(pz) = A z^-k f(z)}; dimension max(k, 0)
    for k > 0, and 1 or 0 for k = 0 according to A in p^Z."""
    rng = rng or random.Random(20241)
    if k < 0:
        return ThetaSpace(("multiplier", A, k), (), params)
    if k == 0:
        m = _in_p_power(params, A)
        if m is None:
            return ThetaSpace(("multiplier", A, k), (), params)
        # f(pz) = p^m f(z) is solved by z^m
        return ThetaSpace(("multiplier", A, k), (ThetaExpr(zpow=m),), params)
    basis = []
    for _ in range(k):
        zeros = [cmath.exp(2j * math.pi * rng.random()) * rng.uniform(0.8, 1.25) for _ in range(k - 1)]
        # prod of zeros must be (-1)^k A for f(pz) = A z^-k f(z)
        last = (-1) ** k * A / math.prod(zeros) if zeros else (-1) ** k * A
        zeros.append(last)
        basis.append(theta_expr(*zeros))
    space = ThetaSpace(("multiplier", A, k), tuple(basis), params)
    _verify_full_rank(space, rng)
    return space


def bc1_symmetric_space(params: NumericParams, eta: complex, d: int, rng=None) -> ThetaSpace:
    """Basis of BC1(eta)-symmetric theta functions of degree d:
    f(eta/z) = f(z) and f(pz) = (eta/p z^2)^d f(z); dimension d + 1."""
    rng = rng or random.Random(31415)
    if d < 0:
        return ThetaSpace(("bc1", eta, d), (), params)
    if d == 0:
        return ThetaSpace(("bc1", eta, d), (const_expr(1.0),), params)
    basis = []
    for _ in range(d + 1):
        expr = const_expr(1.0)
        for _ in range(d):
            a = cmath.exp(2j * math.pi * rng.random()) * rng.uniform(0.8, 1.25)
            # theta_p(z/a) theta_p(eta/(a z)) is BC1(eta)-symmetric of degree 1
            expr = expr * ThetaExpr(atoms=(ThetaAtom(a=1.0 / a), ThetaAtom(a=eta / a, sigma=-1)))
        basis.append(expr)
    space = ThetaSpace(("bc1", eta, d), tuple(basis), params)
    _verify_full_rank(space, rng)
    return space


def _verify_full_rank(space: ThetaSpace, rng):
    n = max(2 * space.dim, 4)
    avoid = []
    for b in space.basis:
        avoid.extend(b.zero_like_points() if isinstance(b, ThetaExpr) else [])
    r = rank_of_functions(space.params, space.basis, n, rng, avoid=avoid)
    if r != space.dim:
        raise DegenerateMultiplier(
            f"constructed basis has numerical rank {r} != {space.dim}"
        )


def product_map_rank(L1: ThetaSpace, L2: ThetaSpace, tol: float = RANK_TOL, rng=None) -> int:
    """Rank of the multiplication map image {f*g} sampled pointwise."""
    rng = rng or random.Random(777)
    if L1.params is not L2.params and L1.params != L2.params:
        raise DomainError("spaces must share parameters")
    prods = [f * g for f in L1.basis for g in L2.basis]
    n = 2 * (L1.dim + L2.dim) + 4
    avoid = []
    for b in prods:
        avoid.extend(b.zero_like_points())
    return rank_of_functions(L1.params, prods, n, rng, tol=tol, avoid=avoid)
