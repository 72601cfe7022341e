"""D-module constructions.

Annihilators of f^s, Bernstein-Sato polynomials with explicit witness
operators, cyclic presentations of localizations R_n[F^-1], and the
reduced Cech complex of such localizations for a list of divisors.

The annihilator uses the elimination construction: inside the Weyl
algebra on x_1..x_n, t with two auxiliary central variables u, v one
takes the ideal generated by t - u f, d_i + u f_i d_t and uv - 1,
eliminates u, v, and rewrites the weight-zero normalizations of the
survivors in terms of s = -d_t t.
"""

from __future__ import annotations

from gmpy2 import mpq

from derham import gb as _gb
from derham.dtools import elems_to_vecs, groebner, in_ideal
from derham.poly import Poly
from derham.weyl import (
    WeylAlgebra,
    WeylElement,
    comm_var,
    d_var,
    elimination_order,
    grevlex_order,
    weight_term_order,
    x_var,
)


# ---- formal calculus with f^s ---------------------------------------------


S_NAME = "@s"


class FsExpr:
    """Formal expression  num(x, s) * f^(s - k).

    num is a polynomial in the x-variables plus a trailing exponent
    variable (named "@s" so it can never collide with a divisor
    variable).
    Supports the left action of operators in D_n[s]; equality with 0 is
    exact, which is what the annihilator and functional-equation
    checks need.
    """

    def __init__(self, f: Poly, num: Poly, k: int = 0):
        self.f = f
        self.num = num
        self.k = k

    @classmethod
    def power(cls, f: Poly, shift: int = 0) -> "FsExpr":
        """f^(s + shift)."""
        svars = f.vars + (S_NAME,)
        one = Poly.const(svars, 1)
        return cls(f, one, -shift)

    def _svars(self):
        return self.f.vars + (S_NAME,)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _mul_x(self, i: int) -> "FsExpr":
        return FsExpr(self.f, self.num * Poly.var(self._svars(), self.f.vars[i]), self.k)

    def _mul_s(self) -> "FsExpr":
        return FsExpr(self.f, self.num * Poly.var(self._svars(), S_NAME), self.k)

    def _apply_d(self, i: int) -> "FsExpr":
        svars = self._svars()
        nvar = len(svars)
        f_s = Poly(svars, {e + (0,): c for e, c in self.f.terms.items()})
        df_s = Poly(svars, {e + (0,): c for e, c in self.f.diff(i).terms.items()})
        s = Poly.var(svars, S_NAME)
        kconst = Poly.const(svars, self.k)
        dnum = self.num.diff(i)
        num = dnum * f_s + self.num * (s - kconst) * df_s
        return FsExpr(self.f, num, self.k + 1)

    def _add(self, other: "FsExpr") -> "FsExpr":
        k = max(self.k, other.k)
        svars = self._svars()
        f_s = Poly(svars, {e + (0,): c for e, c in self.f.terms.items()})
        a = self.num * f_s ** (k - self.k)
        b = other.num * f_s ** (k - other.k)
        return FsExpr(self.f, a + b, k)

    def apply(self, op: WeylElement) -> "FsExpr":
        """Left action of an element of D_n[s] (s = the single
        commutative variable of the ring, when present)."""
        ring = op.ring
        n = ring.n
        has_s = len(ring.comm) == 1
        total: FsExpr | None = None
        for m, c in op.terms.items():
            cur = FsExpr(self.f, self.num * c, self.k)
            # rightmost factors act first: d's, then x's, then s's
            for i in range(n):
                for _ in range(m[n + i]):
                    cur = cur._apply_d(i)
            for i in range(n):
                for _ in range(m[i]):
                    cur = cur._mul_x(i)
            if has_s:
                for _ in range(m[2 * n]):
                    cur = cur._mul_s()
            total = cur if total is None else total._add(cur)
        if total is None:
            total = FsExpr(self.f, Poly.zero(self._svars()), 0)
        return total


# ---- annihilator of f^s -----------------------------------------------------


def _dns_ring(n: int, xnames) -> WeylAlgebra:
    return WeylAlgebra(n, comm=("s",), xnames=xnames)


def ann_fs(f: Poly) -> list[WeylElement]:
    """Generators of the annihilator of f^s in D_n[s]."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = len(f.vars)
    ring_s = _dns_ring(n, f.vars)
    if f.is_constant():
        return [d_var(ring_s, i) for i in range(n)]
    # Weyl algebra on x_1..x_n, t plus central u, v
    big = WeylAlgebra(n + 1, comm=("u", "v"), xnames=tuple(f.vars) + ("t",))
    t = x_var(big, n)
    dt = d_var(big, n)
    u = comm_var(big, 0)
    v = comm_var(big, 1)

    def embed(p: Poly) -> WeylElement:
        return WeylElement(big, {big.mono(xexp=tuple(e) + (0,)): c for e, c in p.terms.items()})

    gens = [t - u * embed(f)]
    for i in range(n):
        gens.append(d_var(big, i) + u * embed(f.diff(i)) * dt)
    gens.append(u * v - WeylElement.const(big, 1))
    order = elimination_order(big, [2 * (n + 1), 2 * (n + 1) + 1])
    basis, _ = groebner(gens, order)

    uv_slots = (2 * (n + 1), 2 * (n + 1) + 1)
    t_slot, dt_slot = n, 2 * n + 1
    out: list[WeylElement] = []
    for g in basis:
        if any(m[uv_slots[0]] or m[uv_slots[1]] for m in g.terms):
            continue
        # weight under t -> -1, dt -> +1 must be constant on the element
        wts = {m[dt_slot] - m[t_slot] for m in g.terms}
        if len(wts) != 1:
            raise AssertionError("eliminated generator is not weight homogeneous")
        d = wts.pop()
        if d > 0:
            g = WeylElement.from_mono(big, big.mono(xexp=(0,) * n + (d,))) * g
        elif d < 0:
            g = WeylElement.from_mono(big, big.mono(dexp=(0,) * n + (-d,))) * g
        out.append(_rewrite_in_s(g, ring_s, n))
    # drop zero / duplicate generators deterministically
    seen = set()
    final = []
    for g in sorted(out, key=lambda e: sorted(e.terms)):
        if g.is_zero():
            continue
        kk = frozenset(g.terms.items())
        if kk in seen:
            continue
        seen.add(kk)
        final.append(g)
    return final


def _rewrite_in_s(g: WeylElement, ring_s: WeylAlgebra, n: int) -> WeylElement:
    """Rewrite a weight-zero element of D_{n+1} (equal t and dt
    exponents after normal ordering) in D_n[s], s = -d_t t.

    t^a d_t^a equals theta (theta-1) ... (theta-a+1) for theta = t d_t,
    and theta acts on f^s as -s-1.
    """
    t_slot, dt_slot = n, 2 * n + 1
    out = WeylElement.zero(ring_s)
    s = comm_var(ring_s, 0)
    for m, c in g.terms.items():
        a = m[t_slot]
        if m[dt_slot] != a:
            raise AssertionError("not weight zero")
        xexp = m[:n]
        dexp = m[n + 1 : 2 * n + 1]
        base = WeylElement.from_mono(ring_s, ring_s.mono(xexp=xexp, dexp=dexp), c)
        fac = WeylElement.const(ring_s, 1)
        for i in range(a):
            # theta - i with theta = -s-1
            fac = fac * (-s - WeylElement.const(ring_s, 1 + i))
        out = out + base * fac
    return out


def substitute_s(e: WeylElement, value, ring: WeylAlgebra) -> WeylElement:
    """Set s to a rational value, landing in the plain Weyl algebra."""
    n = e.ring.n
    if len(e.ring.comm) != 1:
        raise ValueError("element has no s variable")
    value = mpq(value)
    terms: dict = {}
    for m, c in e.terms.items():
        cc = c * value ** m[2 * n]
        if cc == 0:
            continue
        m2 = ring.mono(xexp=m[:n], dexp=m[n : 2 * n])
        w = terms.get(m2, mpq(0)) + cc
        if w == 0:
            terms.pop(m2, None)
        else:
            terms[m2] = w
    return WeylElement(ring, terms)


# ---- Bernstein-Sato ----------------------------------------------------------


class BSPoly:
    """Monic Bernstein-Sato polynomial with its witness operator.

    witness satisfies  b(s) f^s = witness * f^(s+1)  formally.
    """

    def __init__(self, b: Poly, witness: WeylElement | None = None):
        self.b = b  # monic, vars ("s",)
        self.witness = witness

    def roots(self) -> list:
        return rational_roots(self.b)

    def integer_roots(self) -> list[int]:
        return sorted({int(r) for r in self.roots() if r.denominator == 1})

    def __call__(self, value):
        value = mpq(value)
        acc = mpq(0)
        for e, c in self.b.terms.items():
            acc += c * value ** e[0]
        return acc

    def __repr__(self):
        return f"BSPoly({self.b})"


def rational_roots(p: Poly) -> list:
    """All roots of a rational polynomial that factors over Q.

    Raises if irrational factors of degree >= 2 remain after deflation
    and the remaining part has positive degree.
    """
    if len(p.vars) != 1:
        raise ValueError("univariate expected")
    coeffs = {e[0]: c for e, c in p.terms.items()}
    deg = max(coeffs) if coeffs else 0
    dense = [coeffs.get(i, mpq(0)) for i in range(deg + 1)]
    roots = []
    while len(dense) > 1:
        # strip zero roots
        if dense[0] == 0:
            roots.append(mpq(0))
            dense = dense[1:]
            continue
        den_l = 1
        for c in dense:
            den_l = den_l * c.denominator // _gcd_int(den_l, c.denominator)
        ints = [int(c * den_l) for c in dense]
        a0, an = ints[0], ints[-1]
        found = None
        for q in _divisors(abs(an)):
            for pnum in _divisors(abs(a0)):
                for sgn in (1, -1):
                    r = mpq(sgn * pnum, q)
                    if _eval_dense(dense, r) == 0:
                        found = r
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            raise ValueError(f"polynomial has an irrational root: {p}")
        roots.append(found)
        dense = _deflate(dense, found)
    return roots


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int):
    n = abs(n)
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _eval_dense(dense, r):
    acc = mpq(0)
    for c in reversed(dense):
        acc = acc * r + c
    return acc


def _deflate(dense, r):
    out = [mpq(0)] * (len(dense) - 1)
    acc = dense[-1]
    for i in range(len(dense) - 2, -1, -1):
        out[i] = acc
        acc = dense[i] + acc * r
    assert acc == 0
    return out


def minimal_s_polynomial(gens: list[WeylElement], ring_s: WeylAlgebra,
                         shift: WeylElement | None = None,
                         track_gen: int | None = None,
                         max_degree: int = 64):
    """Monic generator of {b : b(e) in <gens>} where e = s + shift.

    Computed from a cheap graded Groebner basis by searching for the
    first linear dependency among the normal forms of (s+shift)^k;
    this avoids elimination orders entirely.  With track_gen set, also
    returns the cofactor of gens[track_gen] in the expression of b(e).
    """
    from derham.exactla import Echelon

    order = grevlex_order(ring_s)
    basis = _gb.buchberger(elems_to_vecs(gens), ring_s, order,
                           track_repr=track_gen if track_gen is not None else False)
    n = ring_s.n
    s_elt = comm_var(ring_s, 0)
    e_elt = s_elt + shift if shift is not None else s_elt
    ech = Echelon(tracked=True)
    power = WeylElement.const(ring_s, 1)
    nf_data = []  # (k, cofactors over basis)
    for k in range(max_degree + 1):
        vec = {(m, 0): c for m, c in power.terms.items()}
        rem, cof = _gb.normal_form(vec, basis, track=track_gen is not None)
        nf_data.append(cof)
        new = ech.add({m: c for (m, _p), c in rem.items()}, tag=k)
        if not new:
            _, combo = ech.reduce({m: c for (m, _p), c in rem.items()})
            # (s+shift)^k = sum combo_j (s+shift)^j modulo the ideal
            bterms = {(k,): mpq(1)}
            for j, c in combo.items():
                bterms[(j,)] = bterms.get((j,), mpq(0)) - c
            b = Poly(("s",), bterms)
            witness = None
            if track_gen is not None:
                # b(e) = sum_k b_k e^k; each e^k = NF + sum cof*basis,
                # and each basis elt carries its gens[track_gen]-cofactor
                acc = WeylElement.zero(ring_s)
                coeffs = {kk[0]: cc for kk, cc in b.terms.items()}
                for deg, cof_k in enumerate(nf_data):
                    ck = coeffs.get(deg)
                    if not ck or not cof_k:
                        continue
                    for bidx, op in cof_k.items():
                        rep = basis.reprs[bidx]
                        if not rep:
                            continue
                        rep_elt = WeylElement(ring_s, {m: c for (m, _g), c in rep.items()})
                        op_elt = WeylElement(ring_s, op)
                        acc = acc + ck * (op_elt * rep_elt)
                witness = acc
            return b, witness
        power = power * e_elt
    raise AssertionError("no minimal polynomial found below the degree cap")


def bernstein_sato(f: Poly) -> BSPoly:
    """Minimal monic b with b(s) f^s in D_n[s] f^(s+1), plus witness."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = len(f.vars)
    ring_s = _dns_ring(n, f.vars)
    if f.is_constant():
        one = Poly(("s",), {(0,): 1})
        return BSPoly(one, WeylElement.const(ring_s, 1 / f.constant_value()))
    ann = ann_fs(f)
    f_elt = WeylElement(ring_s, {ring_s.mono(xexp=e): c for e, c in f.terms.items()})
    gens = ann + [f_elt]
    b, witness = minimal_s_polynomial(gens, ring_s, track_gen=len(gens) - 1)
    return BSPoly(b, witness)


# ---- localizations -----------------------------------------------------------


class PresentedDModule:
    """Cyclic quotient D_n / J with a tagged generator."""

    def __init__(self, ring: WeylAlgebra, relations: list[WeylElement], generator_tag: str,
                 divisor: Poly | None = None, power: int = 0, bs: BSPoly | None = None,
                 ann_s: list[WeylElement] | None = None):
        self.ring = ring
        self.relations = relations
        self.generator_tag = generator_tag
        self.divisor = divisor
        self.power = power  # generator is divisor^(-power)
        self.bs = bs
        self.ann_s = ann_s
        self._gb = None

    def gb(self) -> _gb.GroebnerBasis:
        if self._gb is None:
            _, self._gb = groebner(self.relations, grevlex_order(self.ring))
        return self._gb

    def reduces_to_zero(self, e: WeylElement) -> bool:
        return in_ideal(e, self.gb())

    def __repr__(self):
        return f"PresentedDModule(D{self.ring.n} * {self.generator_tag})"


def localize_cyclic(F: Poly) -> PresentedDModule:
    """Present R_n[F^-1] as D_n / Ann(F^-a), a = -(least integer root
    of the Bernstein-Sato polynomial of F)."""
    if F.is_zero():
        raise ValueError("zero divisor polynomial")
    n = len(F.vars)
    ring = WeylAlgebra(n, xnames=F.vars)
    if F.is_constant():
        rels = [d_var(ring, i) for i in range(n)]
        one = Poly(("s",), {(0,): 1})
        ring_s = _dns_ring(n, F.vars)
        witness = WeylElement.const(ring_s, 1 / F.constant_value())
        return PresentedDModule(ring, rels, "1", F, 0,
                                BSPoly(one, witness), ann_s=[])
    ann = ann_fs(F)
    bs = bernstein_sato(F)
    int_roots = [r for r in bs.integer_roots() if r < 0]
    if not int_roots:
        raise ValueError(
            "Bernstein-Sato polynomial has no negative integer root; "
            "cyclic presentation would be a proper submodule"
        )
    a = -min(int_roots)
    rels = [substitute_s(g, -a, ring) for g in ann]
    rels = [r for r in rels if not r.is_zero()]
    return PresentedDModule(ring, rels, f"({F})^-{a}", F, a, bs, ann_s=ann)


# ---- reduced Cech complex ----------------------------------------------------


def _descent_operator(mod: PresentedDModule, target_power: int) -> WeylElement:
    """Operator carrying divisor^(-mod.power) to divisor^(-target_power)
    using the Bernstein-Sato functional equation."""
    ring = mod.ring
    op = WeylElement.const(ring, 1)
    if target_power < mod.power:
        raise ValueError("can only descend to deeper powers")
    for k in range(mod.power, target_power):
        bval = mod.bs(-k - 1)
        if bval == 0:
            raise AssertionError("unexpected integer root below the minimal one")
        step = substitute_s(mod.bs.witness, -k - 1, ring)
        op = (step * op) * (1 / bval)
    return op


def connecting_operator(src: PresentedDModule, tgt: PresentedDModule,
                        extra: Poly) -> WeylElement:
    """Operator P with P * gen(tgt) = gen(src) inside the bigger
    localization, where divisor(tgt) = divisor(src) * extra."""
    ring = tgt.ring
    a_src, a_tgt = src.power, tgt.power
    N = max(a_src, a_tgt)
    # src_div^-a_src = extra^N * src_div^(N - a_src) * tgt_div^-N
    g = extra ** N * src.divisor ** (N - a_src) if src.divisor is not None else extra ** N
    g_elt = WeylElement(ring, {ring.mono(xexp=e): c for e, c in g.terms.items()})
    return g_elt * _descent_operator(tgt, N)


def holonomic_rank_generic(mod: PresentedDModule, tries: int = 3) -> int | None:
    """Holonomic rank by a generic-point dimension count.

    Takes the (0,1)-weight initial forms of a Groebner basis of the
    relations, specializes the x-variables at random rational points
    and counts standard monomials of the resulting commutative ideal in
    the symbol variables.  Returns None when the count is unbounded.
    """
    import random

    ring = mod.ring
    n = ring.n
    order = weight_term_order(ring, (0,) * n, (1,) * n)
    basis, _ = groebner(mod.relations, order)
    rng = random.Random(20200814)
    best = None
    for _ in range(tries):
        point = [mpq(rng.randrange(2, 50), rng.randrange(1, 7)) for _ in range(n)]
        xi_ring = WeylAlgebra(0, comm=tuple(f"xi{i}" for i in range(n)))
        gens = []
        for g in basis:
            top = max(sum(m[n : 2 * n]) for m in g.terms)
            terms: dict = {}
            for m, c in g.terms.items():
                if sum(m[n : 2 * n]) != top:
                    continue
                val = c
                for i in range(n):
                    val *= point[i] ** m[i]
                key = xi_ring.mono(comm=m[n : 2 * n])
                terms[key] = terms.get(key, mpq(0)) + val
            e = WeylElement(xi_ring, terms)
            if not e.is_zero():
                gens.append(e)
        if not gens:
            continue
        cbasis, _ = groebner(gens, grevlex_order(xi_ring))
        leads = [max(g.terms, key=lambda m: (sum(m), m)) for g in cbasis]
        count = _count_standard_monomials(leads, n, cap=4096)
        if count is not None and (best is None or count < best):
            best = count
    return best


def _count_standard_monomials(leads, n, cap):
    from itertools import product

    # bounding box: a standard set is finite iff every coordinate axis
    # is blocked by a pure power
    bound = [None] * n
    for m in leads:
        for i in range(n):
            if all(m[j] == 0 for j in range(n) if j != i):
                b = m[i]
                if bound[i] is None or b < bound[i]:
                    bound[i] = b
    if any(b is None for b in bound):
        return None
    count = 0
    for e in product(*[range(b) for b in bound]):
        if all(any(ei < mi for ei, mi in zip(e, m)) for m in leads):
            count += 1
            if count > cap:
                return None
    return count


class CechDComplex:
    """Reduced Cech complex of localizations for divisors f_0..f_r.

    terms[d] lists (index_set, PresentedDModule) with |I| = d + 1;
    maps[(src_I, tgt_I)] is the signed connecting operator expressed in
    the cyclic presentations.
    """

    def __init__(self, divisors: list[Poly]):
        if not divisors or any(f.is_zero() for f in divisors):
            raise ValueError("divisors must be nonzero")
        self.divisors = divisors
        r = len(divisors) - 1
        self.terms: list[list[tuple[tuple, PresentedDModule]]] = []
        self.modules: dict[tuple, PresentedDModule] = {}
        import itertools

        for d in range(r + 1):
            level = []
            for I in itertools.combinations(range(r + 1), d + 1):
                F = Poly.const(divisors[0].vars, 1)
                for i in I:
                    F = F * divisors[i]
                mod = localize_cyclic(F)
                self.modules[I] = mod
                level.append((I, mod))
            self.terms.append(level)
        self.maps: dict[tuple, WeylElement] = {}
        for d in range(r):
            for I, src in self.terms[d]:
                for j in range(r + 1):
                    if j in I:
                        continue
                    J = tuple(sorted(I + (j,)))
                    tgt = self.modules[J]
                    sign = (-1) ** J.index(j)
                    op = connecting_operator(src, tgt, self.divisors[j])
                    self.maps[(I, J)] = op * sign

    def check_d_squared(self) -> bool:
        """Composites of consecutive maps vanish modulo relations."""
        import itertools

        r = len(self.divisors) - 1
        for d in range(r - 1):
            for I, _src in self.terms[d]:
                for K, tgt in self.terms[d + 2]:
                    if not set(I) <= set(K):
                        continue
                    total = WeylElement.zero(tgt.ring)
                    for J, _mid in self.terms[d + 1]:
                        if set(I) <= set(J) <= set(K):
                            total = total + self.maps[(J, K)] * self.maps[(I, J)]
                    if not tgt.reduces_to_zero(total):
                        return False
        return True
