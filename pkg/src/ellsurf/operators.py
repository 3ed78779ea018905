"""Meromorphic q-difference operators sum_k c_k(z) T^k.

T is the shift (Tf)(z) = f(qz); multiplication follows the operator rule
T f(z) = f(qz) T, so composition convolves coefficients with q-shifted
arguments.  Coefficients are kept as closed theta expressions whenever the
operator was assembled from generators; sampled closures are allowed as a
fallback (torsion Frobenius images, quadrature output).

The module also provides the symmetric first-order constructor

    D_eta(b) = z / theta_p(z^2 / eta) * (b(z) - b(eta/z) T),

the lowering operators D_{l; eta}, the formal adjoint (q -> 1/q), and the
formal Gamma-symbol gauge that multiplies the k-th coefficient by a theta
Pochhammer cocycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PoleHit, TorsionDegenerate
from .special_functions import NumericParams, theta_p
from .theta import CoefExpr, PochAtom, ThetaAtom, ThetaExpr, as_coef, const_expr


class _ShiftedClosure:
    """c(q^k z) for a callable coefficient c."""

    def __init__(self, func, factor):
        self.func = func
        self.factor = factor

    def __call__(self, params, z):
        return self.func(params, self.factor * z)


class _ProductClosure:
    def __init__(self, a, b):
        self.a = a
        self.b = b

    def __call__(self, params, z):
        return _eval_coeff(self.a, params, z) * _eval_coeff(self.b, params, z)


class _SumClosure:
    def __init__(self, parts):
        self.parts = parts

    def __call__(self, params, z):
        return sum(_eval_coeff(p, params, z) for p in self.parts)


def _eval_coeff(c, params, z):
    if isinstance(c, (ThetaExpr, CoefExpr)):
        return c(params, z)
    return c(params, z)


def _shift_coeff(c, factor):
    if isinstance(c, (ThetaExpr, CoefExpr)):
        return as_coef(c).shift(factor)
    return _ShiftedClosure(c, factor)


def _mul_coeff(a, b):
    if isinstance(a, (ThetaExpr, CoefExpr)) and isinstance(b, (ThetaExpr, CoefExpr)):
        return as_coef(a) * as_coef(b)
    return _ProductClosure(a, b)


def _sum_coeffs(parts):
    parts = [p for p in parts if p is not None]
    if not parts:
        return None
    if all(isinstance(p, (ThetaExpr, CoefExpr)) for p in parts):
        out = as_coef(parts[0])
        for p in parts[1:]:
            out = out + as_coef(p)
        return out
    return _SumClosure(parts)


@dataclass(frozen=True)
class DiffOp:
    """Finite difference operator over shift q, coefficients indexed from T^0."""

    q: complex
    coeffs: tuple
    word: tuple = None
    degree_tag: tuple = None

    @property
    def order(self):
        return len(self.coeffs) - 1

    def local_params(self, params: NumericParams) -> NumericParams:
        if params.q == self.q:
            return params
        return replace(params, q=self.q)

    def coeff(self, k, params, z):
        if k < 0 or k >= len(self.coeffs) or self.coeffs[k] is None:
            return np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0j
        return _eval_coeff(self.coeffs[k], self.local_params(params), z)

    def coeff_vector(self, params, z):
        return [self.coeff(k, params, z) for k in range(len(self.coeffs))]

    def scaled(self, c):
        const = as_coef(c)
        out = tuple(None if ck is None else _mul_coeff(ck, const) for ck in self.coeffs)
        return DiffOp(self.q, out, self.word, self.degree_tag)


def identity_op(q: complex) -> DiffOp:
    return DiffOp(q, (as_coef(1.0),))


def shift_op(q: complex, power: int = 1) -> DiffOp:
    coeffs = [None] * power + [as_coef(1.0)]
    return DiffOp(q, tuple(coeffs))


def mult_op(q: complex, f) -> DiffOp:
    return DiffOp(q, (as_coef(f) if isinstance(f, (ThetaExpr, CoefExpr, int, float, complex)) else f,))


def compose(d1: DiffOp, d2: DiffOp) -> DiffOp:
    """Operator product d1 d2: coefficient of T^l is sum_k c_k(z) c'_{l-k}(q^k z)."""
    if d1.q != d2.q:
        raise ValueError("operators must share the shift parameter q")
    q = d1.q
    n1, n2 = len(d1.coeffs), len(d2.coeffs)
    out = []
    for target in range(n1 + n2 - 1):
        parts = []
        for k in range(n1):
            j = target - k
            if 0 <= j < n2 and d1.coeffs[k] is not None and d2.coeffs[j] is not None:
                parts.append(_mul_coeff(d1.coeffs[k], _shift_coeff(d2.coeffs[j], q**k)))
        out.append(_sum_coeffs(parts))
    word = None
    if d1.word is not None and d2.word is not None:
        word = d2.word + d1.word
    return DiffOp(q, tuple(out), word)


def compose_all(ops) -> DiffOp:
    """Compose a sequence acting right-to-left: compose_all([a, b, c]) = a b c."""
    ops = list(ops)
    out = ops[0]
    for op in ops[1:]:
        out = compose(out, op)
    return out


def add_ops(d1: DiffOp, d2: DiffOp) -> DiffOp:
    if d1.q != d2.q:
        raise ValueError("operators must share q")
    n = max(len(d1.coeffs), len(d2.coeffs))
    coeffs = []
    for k in range(n):
        a = d1.coeffs[k] if k < len(d1.coeffs) else None
        b = d2.coeffs[k] if k < len(d2.coeffs) else None
        coeffs.append(_sum_coeffs([a, b]))
    return DiffOp(d1.q, tuple(coeffs))


def apply_op(d: DiffOp, f, z, params: NumericParams):
    """(D f)(z) = sum_k c_k(z) f(q^k z)."""
    total = 0j
    for k in range(len(d.coeffs)):
        ck = d.coeff(k, params, z)
        if np.all(np.asarray(ck) == 0):
            continue
        total = total + ck * f(d.q**k * z)
    return total


def _sym_prefactor(eta: complex) -> ThetaExpr:
    # z / theta_p(z^2 / eta)
    return ThetaExpr(zpow=1, atoms=(ThetaAtom(a=1.0 / eta, sigma=2, exp=-1),))


def op_D(params: NumericParams, eta: complex, b) -> DiffOp:
    """D_{eta;q;p}(b) = z/theta_p(z^2/eta) (b(z) - b(eta/z) T)."""
    b = as_coef(b)
    pre = _sym_prefactor(eta)
    c0 = as_coef(pre) * b
    c1 = as_coef(pre) * b.invert(eta) * (-1.0)
    return DiffOp(params.q, (c0, c1))


def _binom_ratio(params: NumericParams, l: int, k: int, tol: float = 1e-9) -> complex:
    """theta_p(q^-l; q)_k / theta_p(q; q)_k with pairwise torsion limits.

    Zero factors occur exactly when the theta argument sits in p^Z (for the
    relevant exponents, only at argument 1, i.e. torsion q); they must cancel
    in pairs matched by order of occurrence, else the limit does not exist.
    """
    p, q = params.p, params.q
    num_exps = [j - l for j in range(k)]
    den_exps = [j for j in range(1, k + 1)]
    num_zero, den_zero = [], []
    val = 1.0 + 0j
    scale = abs(theta_p(p, 1.1)) + 1.0
    for e in num_exps:
        t = theta_p(p, q**e)
        if abs(t) < tol * scale:
            num_zero.append(e)
        else:
            val *= t
    for e in den_exps:
        t = theta_p(p, q**e)
        if abs(t) < tol * scale:
            den_zero.append(e)
        else:
            val /= t
    if len(num_zero) != len(den_zero):
        raise TorsionDegenerate(
            f"lowering coefficient has unmatched zero factors at torsion q (l={l}, k={k})"
        )
    for en, ed in zip(num_zero, den_zero):
        # lim theta_p(q_eps^en)/theta_p(q_eps^ed) = en/ed along q_eps = q e^eps
        val *= en / ed
    return val


def lowering_Dl(params: NumericParams, l: int, eta: complex) -> DiffOp:
    """The order-l lowering operator

    D_{l;eta} = sum_k q^{lk} [theta_p(q^-l;q)_k / theta_p(q;q)_k]
                z^l theta_p(q^{2k-1} z^2/eta) / theta_p(q^{k-1} z^2/eta; q)_{l+1} T^k,

    which annihilates every BC1(q eta)-symmetric theta function of degree l-1.
    """
    q = params.q
    coeffs = []
    for k in range(l + 1):
        const = q ** (l * k) * _binom_ratio(params, l, k)
        expr = ThetaExpr(
            scale=const,
            zpow=l,
            atoms=(ThetaAtom(a=q ** (2 * k - 1) / eta, sigma=2),),
            poch_atoms=(PochAtom(a=q ** (k - 1) / eta, sigma=2, k=l + 1, exp=-1),),
        )
        coeffs.append(as_coef(expr))
    return DiffOp(q, tuple(coeffs))


def adjoint(d: DiffOp, eta: complex, d1: int, d2: int) -> DiffOp:
    """Formal adjoint over 1/q:

    (sum c_k(z) T_q^k)^ad
        = sum q^k theta_p(q^{d2-2k-1} z^2/eta)/theta_p(q^{d1-1} z^2/eta)
              c_k(q^-k z) T_{1/q}^k,

    contravariant, with object map ds+d'f -> (2-d)s+(2-d')f; normalized by
    the scalar gauge q^{-(d2-d1)/2} so the adjoint of T is T in every degree.
    """
    import cmath

    q = d.q
    norm = cmath.sqrt(q) ** (-(d2 - d1))
    out = []
    for k, ck in enumerate(d.coeffs):
        if ck is None:
            out.append(None)
            continue
        ratio = ThetaExpr(
            scale=norm * q**k,
            atoms=(
                ThetaAtom(a=q ** (d2 - 2 * k - 1) / eta, sigma=2),
                ThetaAtom(a=q ** (d1 - 1) / eta, sigma=2, exp=-1),
            ),
        )
        shifted = _shift_coeff(ck, q ** (-k))
        out.append(_mul_coeff(as_coef(ratio), shifted))
    tag = None
    if d.degree_tag is not None:
        tag = tuple(reversed(d.degree_tag))
    return DiffOp(1.0 / q, tuple(out), None, tag)


def gamma_gauge(d: DiffOp, x: complex, r1: int, r2: int, sign: int = 1) -> DiffOp:
    """Formal Gamma-symbol conjugation: coefficient k picks up
    theta_p(q^{r2} z/x; q)_{r1+k-r2}^(sign).  Gauges compose as a cocycle."""
    q = d.q
    out = []
    for k, ck in enumerate(d.coeffs):
        if ck is None:
            out.append(None)
            continue
        factor = ThetaExpr(
            poch_atoms=(PochAtom(a=q**r2 / x, sigma=1, k=r1 + k - r2, exp=sign),)
        )
        out.append(_mul_coeff(as_coef(factor), ck))
    return DiffOp(q, tuple(out), d.word, d.degree_tag)


def shift_down(d: DiffOp, steps: int = 1) -> DiffOp:
    """T^-steps * d; requires the first `steps` coefficients to be (formally) dropped."""
    q = d.q
    out = []
    for k in range(steps, len(d.coeffs)):
        ck = d.coeffs[k]
        out.append(None if ck is None else _shift_coeff(ck, q ** (-steps)))
    return DiffOp(q, tuple(out))


def op_distance(d1: DiffOp, d2: DiffOp, params: NumericParams, pts) -> float:
    """Max relative coefficient difference over sample points."""
    n = max(len(d1.coeffs), len(d2.coeffs))
    num = 0.0
    den = 0.0
    for k in range(n):
        for z in pts:
            a = complex(d1.coeff(k, params, z))
            b = complex(d2.coeff(k, params, z))
            num = max(num, abs(a - b))
            den = max(den, abs(a), abs(b))
    return num / den if den > 0 else 0.0


def proportionality_residual(d1: DiffOp, d2: DiffOp, params: NumericParams, pts) -> float:
    """How far d1 is from lambda * d2 (best lambda over the samples)."""
    va, vb = [], []
    n = max(len(d1.coeffs), len(d2.coeffs))
    for k in range(n):
        for z in pts:
            va.append(complex(d1.coeff(k, params, z)))
            vb.append(complex(d2.coeff(k, params, z)))
    va = np.array(va)
    vb = np.array(vb)
    denom = np.vdot(vb, vb)
    if abs(denom) == 0:
        return float(np.linalg.norm(va))
    lam = np.vdot(vb, va) / denom
    r = np.linalg.norm(va - lam * vb)
    return float(r / max(np.linalg.norm(va), np.linalg.norm(vb)))
