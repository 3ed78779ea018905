"""Exact Picard-lattice combinatorics and the saturated Hom dimension algorithm.

Divisor classes live in the basis s, f, e_1..e_m with intersection form
s.f = 1, e_i.e_i = -1, and s.s = 0 (even basis, the F0/F2 family) or
s.s = -1 (odd basis, F1); the anticanonical class is 2s+2f-sum(e) resp.
2s+3f-sum(e).

Parameters are tracked exactly by a homomorphism rho from the lattice into a
finitely generated abelian group Z^n / <relations>, with distinguished
coordinates for the nome p and the shift q.  Every resonance decision
(rho(alpha) in p^Z q^Z, torsion orders) is integer linear algebra; floating
point never decides a resonance.

saturated_dim reduces (rho, D1, D2) by blowing down, stripping exceptional
multiples, anticanonical descent, and simple-root steps -- free reflections
off the resonance locus, and the two bounded-window rules (factor out the
resonant root / affine reflection) on it -- until the difference class
reaches the fundamental chamber, where the Euler characteristic (or, for
m = 8, the torsion count along the anticanonical ray) gives the dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import DomainError, NonTermination, ParityViolation, UnsupportedResonance

MAX_REDUCTIONS = 10_000


# ---------------------------------------------------------------------------
# divisor classes


@dataclass(frozen=True)
class DivisorClass:
    coeffs: tuple  # (d, d', c_1, ..., c_m) in the basis s, f, e_1..e_m
    basis: str = "odd"  # 'odd': s.s = -1; 'even': s.s = 0

    def __post_init__(self):
        if self.basis not in ("even", "odd"):
            raise DomainError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def m(self):
        return len(self.coeffs) - 2

    def __add__(self, other):
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.basis)

    def __sub__(self, other):
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.basis)

    def __rmul__(self, k: int):
        return DivisorClass(tuple(k * a for a in self.coeffs), self.basis)

    def __neg__(self):
        return -1 * self

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def _check(self, other):
        if self.basis != other.basis or len(self.coeffs) != len(other.coeffs):
            raise DomainError("divisor classes live on different lattices")

    def dot(self, other) -> int:
        self._check(other)
        d1, dp1, *e1 = self.coeffs
        d2, dp2, *e2 = other.coeffs
        ss = 0 if self.basis == "even" else -1
        out = ss * d1 * d2 + d1 * dp2 + dp1 * d2
        out -= sum(a * b for a, b in zip(e1, e2))
        return out


def unit(basis: str, m: int, idx: int) -> DivisorClass:
    coeffs = [0] * (m + 2)
    coeffs[idx] = 1
    return DivisorClass(tuple(coeffs), basis)


def canonical_anti(basis: str, m: int) -> DivisorClass:
    dp = 2 if basis == "even" else 3
    return DivisorClass((2, dp) + (-1,) * m, basis)


def simple_roots(basis: str, m: int):
    """Simple roots, the subsystem orthogonal to f first; the final root
    (s-f even, s-e1 odd) is the one whose reflection lowers D.f."""
    roots = []
    for i in range(m - 1):
        coeffs = [0] * (m + 2)
        coeffs[2 + i] = 1
        coeffs[2 + i + 1] = -1
        roots.append(DivisorClass(tuple(coeffs), basis))
    if m >= 2:
        coeffs = [0, 1] + [0] * m
        coeffs[2] = -1
        coeffs[3] = -1
        roots.append(DivisorClass(tuple(coeffs), basis))
    if basis == "even":
        roots.append(DivisorClass((1, -1) + (0,) * m, basis))
    elif m >= 1:
        coeffs = [1, 0] + [0] * m
        coeffs[2] = -1
        roots.append(DivisorClass(tuple(coeffs), basis))
    return roots


def reflect(D: DivisorClass, alpha: DivisorClass) -> DivisorClass:
    # roots have self-intersection -2, so s_a(D) = D + (D.a) a
    return D + D.dot(alpha) * alpha


def intersection(D1: DivisorClass, D2: DivisorClass) -> int:
    return D1.dot(D2)


def euler_characteristic(D: DivisorClass) -> int:
    C = canonical_anti(D.basis, D.m)
    twice = D.dot(D) + D.dot(C)
    if twice % 2:
        raise DomainError("D.(D+C) is odd; not a divisor class on this lattice")
    return 1 + twice // 2


# ---------------------------------------------------------------------------
# numerical invariants and the chi pairing


@dataclass(frozen=True)
class NumericalInvariants:
    rank: int
    c1: DivisorClass
    chi: int


def chi_pairing(a: NumericalInvariants, b: NumericalInvariants) -> int:
    C = canonical_anti(a.c1.basis, a.c1.m)
    return -a.rank * b.rank + a.rank * b.chi + a.chi * b.rank - a.c1.dot(b.c1 + b.rank * C)


# ---------------------------------------------------------------------------
# exact integer linear algebra


def smith_diagonalize(mat):
    """Diagonalize an integer matrix: returns (D, U, V) with U A V = D,
    U and V unimodular, D diagonal (divisor chain not enforced)."""
    a = [list(map(int, row)) for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]
    t = 0
    while t < min(rows, cols):
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    piv, best = (i, j), abs(a[i][j])
        if piv is None:
            break
        pi, pj = piv
        a[t], a[pi] = a[pi], a[t]
        u[t], u[pi] = u[pi], u[t]
        for r in range(rows):
            a[r][t], a[r][pj] = a[r][pj], a[r][t]
        for r in range(cols):
            v[r][t], v[r][pj] = v[r][pj], v[r][t]
        while True:
            # Euclidean reduction of row/column t against the pivot
            moved = False
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    k = a[i][t] // a[t][t]
                    a[i] = [x - k * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - k * y for x, y in zip(u[i], u[t])]
                    if a[i][t] != 0:  # remainder smaller than pivot: swap up
                        a[t], a[i] = a[i], a[t]
                        u[t], u[i] = u[i], u[t]
                        moved = True
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    k = a[t][j] // a[t][t]
                    for r in range(rows):
                        a[r][j] -= k * a[r][t]
                    for r in range(cols):
                        v[r][j] -= k * v[r][t]
                    if a[t][j] != 0:
                        for r in range(rows):
                            a[r][t], a[r][j] = a[r][j], a[r][t]
                        for r in range(cols):
                            v[r][t], v[r][j] = v[r][j], v[r][t]
                        moved = True
            if not moved:
                break
        t += 1
    return a, u, v


def solve_in_span(gens, vec):
    """Integer coefficients x with sum x_i gens_i = vec, or None."""
    n = len(vec)
    k = len(gens)
    if k == 0:
        return [] if all(val == 0 for val in vec) else None
    mat = [[gens[j][i] for j in range(k)] for i in range(n)]
    d, u, v = smith_diagonalize(mat)
    w = [sum(u[i][t] * vec[t] for t in range(n)) for i in range(n)]
    y = [0] * k
    for i in range(n):
        di = d[i][i] if i < min(n, k) else 0
        if di != 0:
            if w[i] % di:
                return None
            y[i] = w[i] // di
        elif w[i] != 0:
            return None
    return [sum(v[i][j] * y[j] for j in range(k)) for i in range(k)]


def order_mod_lattice(vec, gens):
    """Smallest r >= 1 with r*vec in the Z-span of gens; None if no such r."""
    n = len(vec)
    if all(val == 0 for val in vec):
        return 1
    if not gens:
        return None
    k = len(gens)
    mat = [[gens[j][i] for j in range(k)] for i in range(n)]
    d, u, _ = smith_diagonalize(mat)
    w = [sum(u[i][t] * vec[t] for t in range(n)) for i in range(n)]
    r = 1
    for i in range(n):
        di = d[i][i] if i < min(n, k) else 0
        if di == 0:
            if w[i] != 0:
                return None
        elif w[i] % di != 0:
            need = abs(di) // math.gcd(abs(di), abs(w[i]))
            r = r * need // math.gcd(r, need)
    return r


def _rat_solve(rows, rhs):
    """Solve rows @ x = rhs over Q (exactly/overdetermined); None if inconsistent."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [v / inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                fct = a[i][c]
                a[i] = [x - fct * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for row_i, c in enumerate(piv_cols):
        x[c] = a[row_i][n]
    return x


# ---------------------------------------------------------------------------
# exact parameter maps


@dataclass(frozen=True)
class ExactParamMap:
    """rho: <s, f, e_1..e_m> -> Z^ambient_rank / <relations>.

    Convention: rho(s) = eta' (even basis) or x_0 (odd), rho(f) = eta,
    rho(e_i) = x_i.  relations lists integer vectors declared trivial in the
    parameter group (used to encode exact torsion)."""

    ambient_rank: int
    p_index: int
    q_index: int
    images: tuple  # one integer vector per basis class s, f, e_1..e_m
    relations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(tuple(int(v) for v in im) for im in self.images))
        object.__setattr__(
            self, "relations", tuple(tuple(int(v) for v in rel) for rel in self.relations)
        )
        for im in self.images + self.relations:
            if len(im) != self.ambient_rank:
                raise DomainError("vector length does not match ambient_rank")

    @property
    def m(self):
        return len(self.images) - 2

    def p_vec(self):
        return tuple(1 if i == self.p_index else 0 for i in range(self.ambient_rank))

    def q_vec(self):
        return tuple(1 if i == self.q_index else 0 for i in range(self.ambient_rank))

    def rho(self, D: DivisorClass):
        out = [0] * self.ambient_rank
        for c, im in zip(D.coeffs, self.images):
            for i, v in enumerate(im):
                out[i] += c * v
        return tuple(out)

    def q_exponent_mod_p(self, vec):
        """l with vec = l q mod <p, relations>, or None.  Any representative
        works for the reduction algorithm (exponents differing by the q-order
        stay in p^Z after the normalizing twist)."""
        gens = [self.p_vec(), self.q_vec()] + list(self.relations)
        sol = solve_in_span(gens, list(vec))
        if sol is None:
            return None
        return sol[1]

    def in_pZ_qZ(self, vec) -> bool:
        return self.q_exponent_mod_p(vec) is not None

    def q_order(self):
        """Order of q modulo <p, relations> (None = infinite)."""
        return order_mod_lattice(
            list(self.q_vec()), [self.p_vec()] + list(self.relations)
        )

    def torsion_order(self, vec):
        """Smallest r >= 1 with r*vec in <p, relations> (None = infinite)."""
        return order_mod_lattice(list(vec), [self.p_vec()] + list(self.relations))

    def twist(self, D0: DivisorClass) -> "ExactParamMap":
        """Translation by D0: rho'(D) = q^{-D.D0} rho(D)."""
        q = self.q_vec()
        basis = D0.basis
        m = self.m
        new_images = []
        for idx in range(m + 2):
            pair = unit(basis, m, idx).dot(D0)
            im = list(self.images[idx])
            for i, v in enumerate(q):
                im[i] -= pair * v
            new_images.append(tuple(im))
        return replace(self, images=tuple(new_images))

    def reflected(self, alpha: DivisorClass) -> "ExactParamMap":
        """rho o s_alpha."""
        basis = alpha.basis
        m = self.m
        new_images = []
        for idx in range(m + 2):
            img = reflect(unit(basis, m, idx), alpha)
            vec = [0] * self.ambient_rank
            for c, im in zip(img.coeffs, self.images):
                for i, v in enumerate(im):
                    vec[i] += c * v
            new_images.append(tuple(vec))
        return replace(self, images=tuple(new_images))

    def drop_last_point(self) -> "ExactParamMap":
        return replace(self, images=self.images[:-1])


def generic_map(basis: str, m: int) -> ExactParamMap:
    """Totally non-resonant parameters: one free generator per basis class."""
    n = m + 4
    images = []
    for i in range(m + 2):
        vec = [0] * n
        vec[i + 2] = 1
        images.append(tuple(vec))
    return ExactParamMap(ambient_rank=n, p_index=0, q_index=1, images=tuple(images))


def resonant_map(basis: str, m: int, relation: DivisorClass, q_power: int) -> ExactParamMap:
    """Generic map modified so rho(relation) = q^{q_power} exactly."""
    base = generic_map(basis, m)
    idxs = [i for i, c in enumerate(relation.coeffs) if abs(c) == 1]
    if not idxs:
        raise DomainError("relation needs a +-1 coefficient to solve for")
    j = idxs[-1]
    cj = relation.coeffs[j]
    target = [0] * base.ambient_rank
    target[base.q_index] = q_power
    for i, c in enumerate(relation.coeffs):
        if i == j or c == 0:
            continue
        for t, v in enumerate(base.images[i]):
            target[t] -= c * v
    imj = tuple(v if cj == 1 else -v for v in target)
    images = list(base.images)
    images[j] = imj
    return replace(base, images=tuple(images))


def torsion_anticanonical_map(m: int, order: int) -> ExactParamMap:
    """Odd-basis map with rho(C_m) of exact torsion order `order` modulo p^Z."""
    base = generic_map("odd", m)
    C = canonical_anti("odd", m)
    vec = base.rho(C)
    rel = tuple(order * v for v in vec)
    return replace(base, relations=base.relations + (rel,))


def torsion_q_map(basis: str, m: int, order: int) -> ExactParamMap:
    """Map where q has exact order `order` modulo p^Z."""
    base = generic_map(basis, m)
    rel = [0] * base.ambient_rank
    rel[base.q_index] = order
    return replace(base, relations=base.relations + (tuple(rel),))


# ---------------------------------------------------------------------------
# universal nef cone and cone membership


def _nef_generators(basis: str, m: int):
    if basis == "even":
        if m != 0:
            raise DomainError("even-basis nef cone implemented for m = 0 only")
        return [DivisorClass((0, 1), "even"), DivisorClass((1, 1), "even")]
    gens = [unit("odd", m, 1), DivisorClass((1, 1) + (0,) * m, "odd")]
    if m >= 1:
        coeffs = [1, 2] + [0] * m
        coeffs[2] = -1
        gens.append(DivisorClass(tuple(coeffs), "odd"))
    for l in range(2, m + 1):
        coeffs = [2, 3] + [0] * m
        for i in range(l):
            coeffs[2 + i] = -1
        gens.append(DivisorClass(tuple(coeffs), "odd"))
    return gens


def in_universal_nef_cone(D: DivisorClass) -> bool:
    gens = _nef_generators(D.basis, D.m)
    rows = [[g.coeffs[i] for g in gens] for i in range(len(D.coeffs))]
    sol = _rat_solve(rows, list(D.coeffs))
    if sol is None or any(c < 0 for c in sol):
        return False
    return D.dot(canonical_anti(D.basis, D.m)) >= 0


def cone_membership(rho: ExactParamMap, D: DivisorClass):
    """Reflect D toward the universal nef cone along admissible (non-resonant)
    negative simple roots; returns (nef, trace)."""
    trace = []
    work = D
    cur = rho
    for _ in range(MAX_REDUCTIONS):
        if work.dot(unit(work.basis, work.m, 1)) < 0:
            trace.append(f"f-degree negative at {work.coeffs}")
            return False, trace
        if in_universal_nef_cone(work):
            trace.append(f"reached nef cone at {work.coeffs}")
            return True, trace
        progressed = False
        for alpha in simple_roots(work.basis, work.m):
            if work.dot(alpha) < 0:
                if cur.in_pZ_qZ(cur.rho(alpha)):
                    trace.append(f"effective root obstruction at {alpha.coeffs}")
                    return False, trace
                work = reflect(work, alpha)
                cur = cur.reflected(alpha)
                trace.append(f"reflected in {alpha.coeffs} -> {work.coeffs}")
                progressed = True
                break
        if not progressed:
            trace.append(f"chamber but outside nef cone at {work.coeffs}")
            return False, trace
    raise NonTermination("cone membership did not stabilize")


# ---------------------------------------------------------------------------
# saturated dimensions


def _transversal(alpha: DivisorClass) -> DivisorClass:
    """Lattice vector v with v.alpha = 1."""
    basis, m = alpha.basis, alpha.m
    for idx in range(m + 2):
        for sign in (1, -1):
            v = sign * unit(basis, m, idx)
            if v.dot(alpha) == 1:
                return v
    raise DomainError(f"no unit transversal for root {alpha.coeffs}")


def _multiple_in_window(s2: int, s1: int, r):
    """A multiple t*r in the half-open window (s2, s1]; None if empty.
    For infinite order (r = None) the only candidate is 0."""
    if r is None:
        return 0 if s2 < 0 <= s1 else None
    t = s1 // r
    val = t * r
    return val if val > s2 else None


def saturated_dim(rho: ExactParamMap, D1: DivisorClass, D2: DivisorClass, want_trace=False):
    """Dimension of the saturated Hom space from D1 to D2 under the exact map rho."""
    if rho.m != D1.m or D1.basis != D2.basis or D1.m != D2.m:
        raise DomainError("rho and divisor classes must share a lattice")
    trace = []
    state = (rho, D1, D2)

    def done(val):
        return (val, trace) if want_trace else val

    for _ in range(MAX_REDUCTIONS):
        rho, D1, D2 = state
        basis, m = D1.basis, D1.m
        D = D2 - D1
        if D.dot(unit(basis, m, 1)) < 0:
            trace.append("operator order negative: dim 0")
            return done(0)
        if D.is_zero():
            trace.append("zero degree: dim 1")
            return done(1)
        if m >= 1:
            c_last = D.coeffs[-1]
            if c_last > 0:
                # a positive e_m multiple never constrains
                state = (rho, D1, D2 - c_last * unit(basis, m, m + 1))
                trace.append(f"stripped {c_last} e_{m}")
                continue
            if c_last == 0:
                t = D1.coeffs[-1]
                if t != 0:
                    D0 = t * unit(basis, m, m + 1)
                    rho, D1, D2 = rho.twist(D0), D1 - D0, D2 - D0
                    trace.append(f"translated by {t} e_{m}")
                rho = rho.drop_last_point()
                D1 = DivisorClass(D1.coeffs[:-1], basis)
                D2 = DivisorClass(D2.coeffs[:-1], basis)
                state = (rho, D1, D2)
                trace.append(f"blew down e_{m}")
                continue
        if basis == "odd" and m == 0:
            s_cls = unit(basis, 0, 0)
            neg = D.dot(s_cls)
            if neg < 0:
                # -1-curve fixed component on F1: morphisms factor through
                # the (unique) section multiples, so drop them
                state = (rho, D1, D2 + neg * s_cls)
                trace.append(f"stripped {-neg} s (F1 section)")
                continue
        C = canonical_anti(basis, m)
        if D.dot(C) < 0:
            state = (rho, D1, D2 - C)
            trace.append("subtracted C_m (D.C < 0)")
            continue
        alpha = next((a for a in simple_roots(basis, m) if D.dot(a) < 0), None)
        if alpha is None:
            if m == 8 and D.dot(C) == 0 and D.coeffs[0] % 2 == 0:
                dmult = D.coeffs[0] // 2
                if dmult > 0 and (D - dmult * C).is_zero():
                    r = rho.torsion_order(rho.rho(C))
                    if r is None:
                        trace.append("rho(C_8) non-torsion: dim 1")
                        return done(1)
                    val = 1 + dmult // r
                    trace.append(f"dC_8 ray, torsion order {r}: dim {val}")
                    return done(val)
            if D.dot(C) > 0:
                val = euler_characteristic(D)
                trace.append(f"fundamental chamber, D.C > 0: chi = {val}")
                return done(val)
            raise UnsupportedResonance(
                f"chamber class {D.coeffs} with D.C_m = 0 outside the case analysis",
                root=None,
            )
        vec = rho.rho(alpha)
        a_exp = rho.q_exponent_mod_p(vec)
        if a_exp is None:
            state = (rho.reflected(alpha), reflect(D1, alpha), reflect(D2, alpha))
            trace.append(f"free reflection in {alpha.coeffs}")
            continue
        # resonant root: normalize rho(alpha) into p^Z by a twist translation
        v = _transversal(alpha)
        D0 = a_exp * v
        rho_n, D1n, D2n = rho.twist(D0), D1 - D0, D2 - D0
        r = rho_n.q_order()
        s1 = D1n.dot(alpha)
        s2 = D2n.dot(alpha)
        tr = _multiple_in_window(s2, s1, r)
        if tr is not None:
            # rule (1): factor out the resonant root from the target
            l = tr - s2
            D2n = D2n - l * alpha
            trace.append(f"rule(1) at {alpha.coeffs}: target dropped by {l} alpha")
            state = (rho_n.twist(-1 * D0), D1n + D0, D2n + D0)
            continue
        # rule (2): affine reflection within the window
        if r is not None and s1 > 0:
            t_shift = -(-s1 // r)  # ceil
        else:
            t_shift = 0
        w = (t_shift * (r or 0)) * v
        rho_r = rho_n.twist(w).reflected(alpha).twist(-1 * w)
        D1r = reflect(D1n - w, alpha) + w
        D2r = reflect(D2n - w, alpha) + w
        trace.append(f"rule(2) affine reflection at {alpha.coeffs}")
        state = (rho_r.twist(-1 * D0), D1r + D0, D2r + D0)
    raise NonTermination("saturated dimension reduction exceeded its bound")


# ---------------------------------------------------------------------------
# K_0 action of the K^2 = 0 derived equivalences


def k0_action(a: int, b: int, c: int, d: int, h: int):
    """Matrix of the SL2(Z) derived equivalence on the K_0 slice spanned by
    (1,0,0), (0,e8,0), (0,C8,0), (0,0,1); h ranges over ab+bc+cd+2Z."""
    if a * d - b * c != 1:
        raise DomainError("(a b; c d) must lie in SL_2(Z)")
    if (h - (a * b + b * c + c * d)) % 2 != 0:
        raise ParityViolation(f"h = {h} must be congruent to ab+bc+cd = {a*b+b*c+c*d} mod 2")

    def half(x):
        if x % 2:
            raise ParityViolation("internal parity failure in k0_action")
        return x // 2

    col1 = (d, -b, half(d * h - b + c), half(-b * h - b - a + d))
    col2 = (-c, a, half(-c * h + c + a - d), half(a * h + b - c))
    col3 = (0, 0, d, -b)
    col4 = (0, 0, -c, a)
    cols = [col1, col2, col3, col4]
    return [[cols[j][i] for j in range(4)] for i in range(4)]


def k0_gram():
    """Gram matrix of the chi pairing on the basis (1,0,0), (0,e8,0),
    (0,C8,0), (0,0,1) over the odd m = 8 lattice."""
    zero = DivisorClass((0,) * 10, "odd")
    e8 = unit("odd", 8, 9)
    c8 = canonical_anti("odd", 8)
    basis = [
        NumericalInvariants(1, zero, 0),
        NumericalInvariants(0, e8, 0),
        NumericalInvariants(0, c8, 0),
        NumericalInvariants(0, zero, 1),
    ]
    return [[chi_pairing(x, y) for y in basis] for x in basis]
