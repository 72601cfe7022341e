"""Integration of the Cech complex of localizations.

Pipeline: build a weight-adapted free complex quasi-isomorphic to the
reduced Cech complex (iterated syzygies over the homogenized Weyl
algebra, with minimal shifts making every matrix entry respect the
filtration), compute the b-function for integration degree by degree,
truncate the induced complex of polynomial vectors at the largest
integral root, take cohomology with exact linear algebra, and convert
the surviving classes into explicit cochains of algebraic differential
forms via a staircase through the double complex.

De Rham degree = complex degree + n throughout.
"""

from __future__ import annotations

import itertools

from gmpy2 import mpq

from derham import gb as _gb
from derham.dmod import CechDComplex, PresentedDModule
from derham.dtools import elems_to_vecs
from derham.exactla import Echelon, RatMatrix, Subquotient, complex_cohomology
from derham.poly import LocalFraction, Poly
from derham.weyl import (
    WeylAlgebra,
    WeylElement,
    dehomogenize_element,
    euler_operator,
    grevlex_order,
    homogenize_element,
    homogenized_ring,
    to_antinormal,
    weight_order,
)


class ResourceLimit(RuntimeError):
    """A configured cap was exceeded; names the failing stage."""


# ---- adapted resolutions ----------------------------------------------------


def _hom_vecs(vecs, ring, hring, dshifts):
    """Homogenize module vectors; each position carries a degree
    offset so the result is graded."""
    out = []
    for v in vecs:
        if not v:
            continue
        d = max(sum(m) + dshifts.get(pos, 0) for (m, pos) in v)
        hv = {}
        for (m, pos), c in v.items():
            pad = d - sum(m) - dshifts.get(pos, 0)
            hv[(m + (pad,), pos)] = c
        out.append(hv)
    return out


def _dehom_vec(v):
    out = {}
    for (m, pos), c in v.items():
        key = (m[:-1], pos)
        w = out.get(key, mpq(0)) + c
        if w == 0:
            out.pop(key, None)
        else:
            out[key] = w
    return out


def resolve_module(mod: PresentedDModule, max_length: int | None = None):
    """Weight-adapted free resolution of D/J.

    Returns (matrices, shifts): matrices[k] is the list of rows of the
    map from level k+1 to level k (row = dict over level-k positions),
    shifts[k] the weight shifts of the level-k free module, with
    shifts[0] = [0].
    """
    ring = mod.ring
    n = ring.n
    if max_length is None:
        max_length = 2 * n + 3
    hring = homogenized_ring(ring)
    u = (1,) * n
    v = (-1,) * n

    shifts = [[0]]
    matrices = []
    if not mod.relations:
        return matrices, shifts
    cur_shifts = {0: 0}
    cur_dshifts = {0: 0}
    gens = _hom_vecs(elems_to_vecs(mod.relations), ring, hring, {})
    level = 0
    while True:
        order = weight_order(hring, u, v, shifts=cur_shifts, dshifts=cur_dshifts)
        basis = _gb.buchberger(gens, hring, order)
        if not basis.basis:
            break
        rows = [_dehom_vec(vec) for vec in basis.basis]
        matrices.append(rows)
        next_shifts = {}
        next_dshifts = {}
        for i, (lm, lp) in enumerate(basis.leads):
            next_shifts[i] = hring.vweight(lm) + cur_shifts.get(lp, 0)
            anyterm = next(iter(basis.basis[i]))
            next_dshifts[i] = sum(anyterm[0]) + cur_dshifts.get(anyterm[1], 0)
        shifts.append([next_shifts[i] for i in range(len(basis.basis))])
        level += 1
        if level > max_length:
            raise ResourceLimit("adapted resolution exceeded the length cap")
        syz = _gb.syzygies(basis)
        if not syz:
            break
        gens = syz
        cur_shifts = next_shifts
        cur_dshifts = next_dshifts
    return matrices, shifts


# ---- the shifted free complex ------------------------------------------------


class PosTag(tuple):
    """(index_set, level, idx) identifying a free-module coordinate."""

    __slots__ = ()

    @property
    def index_set(self):
        return self[0]

    @property
    def level(self):
        return self[1]

    @property
    def idx(self):
        return self[2]


class ShiftedFreeComplex:
    """Free complex with weight shifts, quasi-isomorphic to a reduced
    Cech complex of localizations.

    positions[d] lists PosTags in degree d; shifts[d] the matching
    weight shifts; entry(d, i, j) the matrix entry of the map from
    degree d to d+1 (row convention: image of e_i is sum entry*e_j).
    """

    def __init__(self, cech: CechDComplex):
        self.cech = cech
        self.ring = next(iter(cech.modules.values())).ring
        r = len(cech.divisors) - 1
        if r > 1:
            raise ResourceLimit(
                "free complexes are built for at most two divisors "
                "(longer Cech complexes would need higher homotopies)"
            )
        self.resolutions = {}
        for I, mod in cech.modules.items():
            self.resolutions[I] = resolve_module(mod)
        self.positions: dict[int, list[PosTag]] = {}
        self.shifts: dict[int, list[int]] = {}
        for I, (matrices, shifts) in sorted(self.resolutions.items()):
            c_I = len(I) - 1
            for level, shift_list in enumerate(shifts):
                d = c_I - level
                for idx, s in enumerate(shift_list):
                    self.positions.setdefault(d, []).append(PosTag((I, level, idx)))
                    self.shifts.setdefault(d, []).append(s)
        self.degrees = sorted(self.positions)
        self.pos_index = {
            d: {tag: i for i, tag in enumerate(tags)} for d, tags in self.positions.items()
        }
        self._entries: dict[int, dict] = {d: {} for d in self.degrees}
        self._install_resolution_blocks()
        self._install_cech_lifts()
        # uniform shift correction so every entry respects the filtration
        self._fix_shifts()

    # -- assembly ------------------------------------------------------------
    def _install_resolution_blocks(self):
        for I, (matrices, shifts) in self.resolutions.items():
            c_I = len(I) - 1
            sign = (-1) ** c_I
            for level_from, rows in enumerate(matrices, start=1):
                d = c_I - level_from
                for i, row in enumerate(rows):
                    src = self.pos_index[d][PosTag((I, level_from, i))]
                    for (m, pos), c in row.items():
                        tgt = self.pos_index[d + 1][PosTag((I, level_from - 1, pos))]
                        ent = self._entries[d].setdefault((src, tgt), WeylElement.zero(self.ring))
                        self._entries[d][(src, tgt)] = ent + WeylElement.from_mono(
                            self.ring, m, c * sign
                        )

    def _install_cech_lifts(self):
        cech = self.cech
        for (I, J), op in cech.maps.items():
            lift = self._lift_chain_map(I, J, op)
            for (level, i, j), e in lift.items():
                d = len(I) - 1 - level
                src = self.pos_index[d][PosTag((I, level, i))]
                tgt = self.pos_index[d + 1][PosTag((J, level, j))]
                ent = self._entries[d].setdefault((src, tgt), WeylElement.zero(self.ring))
                self._entries[d][(src, tgt)] = ent + e

    def _lift_chain_map(self, I, J, op):
        """Lift gen -> op*gen to a chain map between the resolutions."""
        ring = self.ring
        order = grevlex_order(ring)
        mats_I, _ = self.resolutions[I]
        mats_J, _ = self.resolutions[J]
        lift: dict[tuple, WeylElement] = {(0, 0, 0): op}
        # phi_prev: level-(l-1) row index -> vector over J level-(l-1) positions
        phi_prev = {0: {(m, 0): c for m, c in op.terms.items()}}
        for level in range(1, len(mats_I) + 1):
            if level > len(mats_J):
                # target resolution exhausted; composite must be zero
                rows = mats_I[level - 1]
                for i, row in enumerate(rows):
                    acc = {}
                    for (m, pos), c in row.items():
                        prev = phi_prev.get(pos)
                        if prev:
                            _gb.vec_add_scaled(acc, _gb.vec_mono_mul(ring, m, prev), c)
                    if acc:
                        raise AssertionError("chain map does not terminate cleanly")
                break
            target_vecs = [dict(row) for row in mats_J[level - 1]]
            tgt_basis = _gb.buchberger(target_vecs, ring, order, track_repr=True)
            phi_cur = {}
            rows = mats_I[level - 1]
            for i, row in enumerate(rows):
                acc: dict = {}
                for (m, pos), c in row.items():
                    prev = phi_prev.get(pos)
                    if prev:
                        _gb.vec_add_scaled(acc, _gb.vec_mono_mul(ring, m, prev), c)
                if not acc:
                    phi_cur[i] = {}
                    continue
                rem, cof = _gb.normal_form(acc, tgt_basis, track=True)
                if rem:
                    raise AssertionError("chain-map lift failed: image not in row span")
                vec: dict = {}
                for bidx, opd in (cof or {}).items():
                    rep = tgt_basis.reprs[bidx]
                    for mono, c in opd.items():
                        _gb.vec_add_scaled(vec, _gb.vec_mono_mul(ring, mono, rep), c)
                # vec is over (mono, original-row-index) pairs
                row_vec: dict = {}
                for (mono, ridx), c in vec.items():
                    row_vec[(mono, ridx)] = c
                phi_cur[i] = row_vec
                for (mono, ridx), c in row_vec.items():
                    key = (level, i, ridx)
                    ent = lift.get(key, WeylElement.zero(ring))
                    lift[key] = ent + WeylElement.from_mono(ring, mono, c)
            phi_prev = phi_cur
            if all(not v for v in phi_cur.values()):
                break
        return lift

    def _fix_shifts(self):
        # bump shifts per index set uniformly until all entries satisfy
        # v_degree(entry) <= shift(src) - shift(tgt)
        correction = {I: 0 for I in self.resolutions}
        changed = True
        guard = 0
        while changed:
            changed = False
            guard += 1
            if guard > 100:
                raise ResourceLimit("shift correction did not stabilize")
            for d in self.degrees:
                for (i, j), e in self._entries[d].items():
                    if e.is_zero():
                        continue
                    tag_s = self.positions[d][i]
                    tag_t = self.positions[d + 1][j]
                    ms = self.shifts[d][i] + correction[tag_s.index_set]
                    mt = self.shifts[d + 1][j] + correction[tag_t.index_set]
                    excess = e.v_degree() - (ms - mt)
                    if excess > 0:
                        correction[tag_t.index_set] -= excess
                        changed = True
        for d in self.degrees:
            for i, tag in enumerate(self.positions[d]):
                self.shifts[d][i] += correction[tag.index_set]

    # -- access ---------------------------------------------------------------
    def rank(self, d: int) -> int:
        return len(self.positions.get(d, []))

    def entry(self, d, i, j) -> WeylElement | None:
        return self._entries.get(d, {}).get((i, j))

    def matrix_rows(self, d: int) -> list[dict]:
        """Map degree d -> d+1 as rows over (mono, target index)."""
        rows = [dict() for _ in range(self.rank(d))]
        for (i, j), e in self._entries.get(d, {}).items():
            for m, c in e.terms.items():
                rows[i][(m, j)] = rows[i].get((m, j), mpq(0)) + c
        return rows

    def is_strict(self) -> bool:
        """Every entry has v-degree at most shift(src) - shift(tgt)."""
        for d in self.degrees:
            for (i, j), e in self._entries[d].items():
                if e.is_zero():
                    continue
                if e.v_degree() > self.shifts[d][i] - self.shifts[d + 1][j]:
                    return False
        return True

    def check_d_squared(self) -> bool:
        for d in self.degrees:
            if d + 1 not in self._entries:
                continue
            for i in range(self.rank(d)):
                acc: dict[int, WeylElement] = {}
                for (ii, j), e in self._entries[d].items():
                    if ii != i:
                        continue
                    for (jj, k), f in self._entries[d + 1].items():
                        if jj != j:
                            continue
                        cur = acc.get(k, WeylElement.zero(self.ring))
                        acc[k] = cur + e * f
                for k, v in acc.items():
                    if not v.is_zero():
                        return False
        return True

    def gr_entry(self, d, i, j) -> WeylElement | None:
        e = self.entry(d, i, j)
        if e is None or e.is_zero():
            return e
        w = self.shifts[d][i] - self.shifts[d + 1][j]
        return e.v_part(w)


# ---- b-function for integration ----------------------------------------------


def _poly_gcd_dense(a, b):
    a, b = list(a), list(b)

    def deg(p):
        while p and p[-1] == 0:
            p.pop()
        return len(p) - 1

    while deg(b) >= 0:
        da, db = deg(a), deg(b)
        if da < db:
            a, b = b, a
            continue
        lead = a[deg(a)] / b[deg(b)]
        shift = deg(a) - deg(b)
        for i, c in enumerate(b):
            a[i + shift] -= lead * c
        while a and a[-1] == 0:
            a.pop()
        a, b = b, a
    return a


def poly_lcm(p: Poly, q: Poly) -> Poly:
    """Least common multiple of univariate polynomials, monic."""
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    da = {e[0]: c for e, c in p.terms.items()}
    db = {e[0]: c for e, c in q.terms.items()}
    a = [da.get(i, mpq(0)) for i in range(max(da) + 1)]
    b = [db.get(i, mpq(0)) for i in range(max(db) + 1)]
    g = _poly_gcd_dense(a, b)
    gp = Poly(("s",), {(i,): c for i, c in enumerate(g)})
    prod = p * q.rename(p.vars)
    out = prod.exact_div(gp.rename(p.vars))
    lead = out.terms[max(out.terms, key=lambda e: e[0])]
    return out * (1 / lead)


class IntegrationBData:
    """Per-degree minimal polynomials of the shifted Euler action and
    the integral truncation bound."""

    def __init__(self, per_degree: dict[int, Poly], lcm: Poly, k1: int | None):
        self.per_degree = per_degree
        self.lcm = lcm
        self.k1 = k1

    def __repr__(self):
        return f"IntegrationBData(k1={self.k1}, lcm={self.lcm})"


def _module_minimal_poly(gens_N, ring, rank, gen_vec, eps: WeylElement, max_degree=64):
    """Monic generator of {b : b(eps) * gen_vec in <gens_N>}."""
    order = grevlex_order(ring)
    if gens_N:
        basis = _gb.buchberger(gens_N, ring, order)
    else:
        basis = _gb.GroebnerBasis(ring, order, [], [])
    ech = Echelon(tracked=True)
    cur = dict(gen_vec)
    for k in range(max_degree + 1):
        rem, _ = _gb.normal_form(cur, basis)
        if not ech.add(dict(rem), tag=k):
            _, combo = ech.reduce(dict(rem))
            bterms = {(k,): mpq(1)}
            for j, c in combo.items():
                bterms[(j,)] = bterms.get((j,), mpq(0)) - c
            return Poly(("s",), bterms)
        # multiply by eps on the left
        nxt: dict = {}
        for m, c in eps.terms.items():
            _gb.vec_add_scaled(nxt, _gb.vec_mono_mul(ring, m, cur), c)
        cur = nxt
    raise ResourceLimit("integration b-function degree cap exceeded")


def integration_bfunction(a: ShiftedFreeComplex) -> IntegrationBData:
    """Minimal polynomials of -E-n acting on the top graded piece of
    the cohomology of the associated graded complex, degree by degree,
    and the largest integral root of their least common multiple."""
    ring = a.ring
    n = ring.n
    E = euler_operator(ring)
    per_degree: dict[int, Poly] = {}
    order = grevlex_order(ring)
    for d in a.degrees:
        rank_d = a.rank(d)
        if rank_d == 0:
            continue
        # kernel of the graded map out of degree d: zero rows are kernel
        # elements outright, syzygies of the rest give the others
        if d + 1 in a.positions and a.positions[d + 1]:
            rows = [dict() for _ in range(rank_d)]
            for (i, j), _e in a._entries[d].items():
                ge = a.gr_entry(d, i, j)
                if ge is None or ge.is_zero():
                    continue
                for m, c in ge.terms.items():
                    rows[i][(m, j)] = rows[i].get((m, j), mpq(0)) + c
            kernel_gens = [{(ring.zero_mono, i): mpq(1)} for i, r in enumerate(rows) if not r]
            live = [(i, r) for i, r in enumerate(rows) if r]
            if live:
                for s in _gb.syzygies_of([r for _, r in live], ring, order):
                    out: dict = {}
                    for (mono, li), c in s.items():
                        out[(mono, live[li][0])] = c
                    kernel_gens.append(out)
        else:
            kernel_gens = [{(ring.zero_mono, i): mpq(1)} for i in range(rank_d)]
        if not kernel_gens:
            continue
        # image rows of the graded map into degree d
        image_rows = []
        if d - 1 in a._entries:
            prev_rank = a.rank(d - 1)
            prows = [dict() for _ in range(prev_rank)]
            for (i, j), _e in a._entries[d - 1].items():
                ge = a.gr_entry(d - 1, i, j)
                if ge is None or ge.is_zero():
                    continue
                for m, c in ge.terms.items():
                    prows[i][(m, j)] = prows[i].get((m, j), mpq(0)) + c
            image_rows = [r for r in prows if r]
        # present K/im on the kernel generators
        kbasis = _gb.buchberger(kernel_gens, ring, order, track_repr=True)
        rel_gens = list(_gb.syzygies(kbasis))
        # lift each image row through the kernel generators
        for row in image_rows:
            rem, cof = _gb.normal_form(row, kbasis, track=True)
            if rem:
                raise AssertionError("graded image escapes the graded kernel")
            vec: dict = {}
            for bidx, opd in (cof or {}).items():
                for mono, c in opd.items():
                    key = (mono, bidx)
                    vec[key] = vec.get(key, mpq(0)) + c
            if vec:
                rel_gens.append(vec)
        # generator shifts: weight degree of each kernel basis vector
        shifts_d = a.shifts[d]
        minpolys = []
        for gidx, kvec in enumerate(kbasis.basis):
            wdegs = {ring.vweight(m) + shifts_d[pos] for (m, pos) in kvec}
            if len(wdegs) != 1:
                raise AssertionError("kernel generator is not weight homogeneous")
            sigma = wdegs.pop()
            eps = -E - WeylElement.const(ring, n - sigma)
            gen_vec = {(ring.zero_mono, gidx): mpq(1)}
            minpolys.append(
                _module_minimal_poly(rel_gens, ring, len(kbasis.basis), gen_vec, eps)
            )
        bd = Poly(("s",), {(0,): 1})
        for mp in minpolys:
            bd = poly_lcm(bd, mp)
        if bd.degree() > 0:
            per_degree[d] = bd
    total = Poly(("s",), {(0,): 1})
    for bd in per_degree.values():
        total = poly_lcm(total, bd)
    from derham.dmod import rational_roots

    try:
        roots = rational_roots(total)
    except ValueError:
        roots = []
        # irrational factors carry no integral roots; strip by scanning
        # integer candidates of the integer-cleared polynomial
        dense = {e[0]: c for e, c in total.terms.items()}
        deg = max(dense)
        den = 1
        for c in dense.values():
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [int(dense.get(i, 0) * den) for i in range(deg + 1)]
        a0 = ints[0]
        if a0 == 0:
            roots.append(mpq(0))
            while ints and ints[0] == 0:
                ints = ints[1:]
            a0 = ints[0]
        for cand in range(-abs(a0), abs(a0) + 1):
            if cand == 0:
                continue
            if a0 % cand == 0:
                val = sum(ints[i] * cand ** i for i in range(len(ints)))
                if val == 0:
                    roots.append(mpq(cand))
    int_roots = [int(r) for r in roots if r.denominator == 1]
    k1 = max(int_roots) if int_roots else None
    return IntegrationBData(per_degree, total, k1)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---- truncated polynomial complex ----------------------------------------------


def _omega_action_mono(gamma, mono, n):
    """Class of x^gamma * x^a d^b in D/dD: (-1)^|b| d^b(x^(gamma+a))."""
    a = mono[:n]
    b = mono[n : 2 * n]
    c = 1
    out = []
    for i in range(n):
        e = gamma[i] + a[i]
        if e < b[i]:
            return None
        for k in range(b[i]):
            c *= e - k
        out.append(e - b[i])
    sign = -1 if sum(b) % 2 else 1
    return tuple(out), sign * c


class OmegaClass:
    """Cohomology class of the truncated polynomial complex."""

    def __init__(self, degree: int, vector: dict, level: int):
        self.degree = degree  # de Rham degree
        self.vector = vector  # {(gamma, position): coefficient}
        self.level = level

    def __repr__(self):
        return f"OmegaClass(deg={self.degree}, level={self.level})"


class TruncatedComplex:
    """F^k of the polynomial complex Omega tensor A, as exact matrices."""

    def __init__(self, a: ShiftedFreeComplex, k: int):
        self.a = a
        self.k = k
        ring = a.ring
        n = ring.n
        self.bases: dict[int, list] = {}
        self.index: dict[int, dict] = {}
        for d in a.degrees + [a.degrees[-1] + 1] if a.degrees else []:
            basis = []
            for pos, shift in enumerate(a.shifts.get(d, [])):
                cap = k - shift
                if cap < 0:
                    continue
                for gamma in _monomials_up_to(n, cap):
                    basis.append((gamma, pos))
            basis.sort()
            self.bases[d] = basis
            self.index[d] = {b: i for i, b in enumerate(basis)}
        self.mats: dict[int, RatMatrix] = {}
        for d in a.degrees:
            if d + 1 not in self.bases:
                continue
            src = self.bases.get(d, [])
            tgt = self.bases.get(d + 1, [])
            entries = {}
            for si, (gamma, pos) in enumerate(src):
                for (i, j), e in a._entries[d].items():
                    if i != pos or e.is_zero():
                        continue
                    for m, c in e.terms.items():
                        act = _omega_action_mono(gamma, m, n)
                        if act is None:
                            continue
                        g2, coef = act
                        if coef == 0:
                            continue
                        ti = self.index[d + 1].get((g2, j))
                        if ti is None:
                            raise AssertionError(
                                "truncation is not stable under the differential"
                            )
                        key = (ti, si)
                        entries[key] = entries.get(key, mpq(0)) + c * coef
            self.mats[d] = RatMatrix(len(tgt), len(src),
                                     {k2: v for k2, v in entries.items() if v != 0})

    def degree_range(self):
        return sorted(self.bases)

    def cohomology(self):
        degs = self.degree_range()
        dims = [len(self.bases[d]) for d in degs]
        mats = []
        for i, d in enumerate(degs[:-1]):
            m = self.mats.get(d)
            if m is None:
                m = RatMatrix(dims[i + 1], dims[i])
            mats.append(m)
        sq = complex_cohomology(dims, mats)
        return {d: sq[i] for i, d in enumerate(degs)}


def _monomials_up_to(n, cap):
    for total in range(cap + 1):
        for gamma in _monomials_of_degree(n, total):
            yield gamma


def _monomials_of_degree(n, total):
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _monomials_of_degree(n - 1, total - first):
            yield (first,) + rest


def v_strict_complex(c: CechDComplex) -> ShiftedFreeComplex:
    return ShiftedFreeComplex(c)


def integrate_cohomology(a: ShiftedFreeComplex, bd: IntegrationBData):
    """Per-degree dimensions and representative classes.

    Returns (dims, classes, trunc): dims maps de Rham degree to
    dimension, classes lists OmegaClass objects.
    """
    n = a.ring.n
    if bd.k1 is None:
        return {}, [], None
    trunc = TruncatedComplex(a, bd.k1)
    cohom = trunc.cohomology()
    dims: dict[int, int] = {}
    classes: list[OmegaClass] = []
    for d, sq in sorted(cohom.items()):
        if sq.dim == 0:
            continue
        dims[d + n] = sq.dim
        for rep in sq.representatives:
            vec = {trunc.bases[d][i]: c for i, c in rep.items()}
            level = max(sum(g) + a.shifts[d][pos] for (g, pos) in vec)
            classes.append(OmegaClass(d + n, vec, level))
    return dims, classes, trunc


def truncation_dims(a: ShiftedFreeComplex, k: int) -> dict[int, int]:
    """Cohomology dimensions of the k-truncation, keyed by de Rham
    degree (degree + n)."""
    n = a.ring.n
    trunc = TruncatedComplex(a, k)
    return {d + n: sq.dim for d, sq in trunc.cohomology().items() if sq.dim}


def truncation_stable(a: ShiftedFreeComplex, bd: IntegrationBData, extra: int = 2) -> bool:
    """The stated consequence of the root bound: enlarging the
    truncation level does not change cohomology dimensions."""
    if bd.k1 is None:
        return True
    base = truncation_dims(a, bd.k1)
    for j in range(1, extra + 1):
        if truncation_dims(a, bd.k1 + j) != base:
            return False
    return True
