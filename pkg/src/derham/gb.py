"""Left Groebner bases and syzygies in free modules over a Weyl algebra.

Vectors are sparse dicts ``{(monomial, position): coefficient}``.
Buchberger with normal selection (smallest lcm first) and the chain
criterion; the product criterion is not valid in the Weyl algebra and
is not used.  New basis elements are kept integer-primitive and, on a
homogenized ring, h-primitive (progressive h-saturation).

Schreyer syzygies are computed separately on a finished basis: every
S-pair of a Groebner basis reduces to zero and the recorded cofactors
give the syzygy generators.
"""

from __future__ import annotations

import heapq

from gmpy2 import mpq

from derham.rat import content_normalize
from derham.weyl import WeylAlgebra, TermOrder

Vec = dict


def vec_is_zero(v: Vec) -> bool:
    return not v


def vec_scale(v: Vec, c) -> Vec:
    if c == 0:
        return {}
    return {k: x * c for k, x in v.items()}


def vec_add_scaled(acc: Vec, other: Vec, c) -> None:
    """acc += c * other, in place."""
    if c == 0:
        return
    for k, x in other.items():
        w = acc.get(k)
        if w is None:
            acc[k] = x * c
        else:
            w = w + x * c
            if w == 0:
                del acc[k]
            else:
                acc[k] = w


def vec_mono_mul(ring: WeylAlgebra, mono, v: Vec, c=1) -> Vec:
    """c * mono * v (left multiplication by a monomial)."""
    out: Vec = {}
    mul = ring.mono_mul
    for (m, pos), x in v.items():
        cx = x * c
        for mm, k in mul(mono, m):
            key = (mm, pos)
            w = out.get(key)
            if w is None:
                out[key] = cx * k
            else:
                w = w + cx * k
                if w == 0:
                    del out[key]
                else:
                    out[key] = w
    return out


def vec_lead(v: Vec, key):
    return max(v, key=lambda t: key(t[0], t[1]))


def vec_content_normalize(v: Vec) -> Vec:
    if not v:
        return v
    keys = sorted(v)
    coeffs = content_normalize([v[k] for k in keys])
    return dict(zip(keys, coeffs))


def vec_strip_h(v: Vec, ring: WeylAlgebra) -> Vec:
    """Divide out the h-content (homogenized rings only)."""
    if not ring.homogenized or not v:
        return v
    hmin = min(m[-1] for (m, _pos) in v)
    if hmin == 0:
        return v
    return {(m[:-1] + (m[-1] - hmin,), pos): c for (m, pos), c in v.items()}


def _divides(m1, m2) -> bool:
    for a, b in zip(m1, m2):
        if a > b:
            return False
    return True


def _quot(m2, m1):
    return tuple(b - a for a, b in zip(m1, m2))


class GroebnerBasis:
    """Finished basis plus lead data; optionally expressions of the
    basis in the original generators."""

    def __init__(self, ring, order, basis, leads, reprs=None):
        self.ring = ring
        self.order = order
        self.basis = basis
        self.leads = leads  # [(mono, pos)]
        self.reprs = reprs  # Vec over original generator indices

    def __len__(self):
        return len(self.basis)


def normal_form(vec: Vec, gb: GroebnerBasis, track: bool = False):
    """Full normal form; returns (remainder, cofactors).

    cofactors[i] is an operator dict {mono: coef} with
    vec = sum_i cofactors[i] * basis[i] + remainder.
    """
    ring = gb.ring
    key = gb.order.key
    work = dict(vec)
    rem: Vec = {}
    cof: dict[int, dict] = {} if track else None
    basis = gb.basis
    leads = gb.leads
    while work:
        t = vec_lead(work, key)
        mono, pos = t
        hit = -1
        for i, (lm, lp) in enumerate(leads):
            if lp == pos and _divides(lm, mono):
                hit = i
                break
        if hit < 0:
            rem[t] = work.pop(t)
            continue
        g = basis[hit]
        lm, lp = leads[hit]
        q = _quot(mono, lm)
        c = work[t] / g[(lm, lp)]
        # leading coefficient of q*g at (mono,pos) is lc(g): subtract
        vec_add_scaled(work, vec_mono_mul(ring, q, g), -c)
        if track:
            d = cof.setdefault(hit, {})
            w = d.get(q, mpq(0)) + c
            if w == 0:
                d.pop(q, None)
            else:
                d[q] = w
    return rem, cof


def _spair_parts(fi: Vec, fj: Vec, li, lj, ring):
    (mi, pos) = li
    (mj, _) = lj
    lcm = tuple(max(a, b) for a, b in zip(mi, mj))
    ui = _quot(lcm, mi)
    uj = _quot(lcm, mj)
    ci = fi[li]
    cj = fj[lj]
    a = vec_mono_mul(ring, ui, fi, cj)
    vec_add_scaled(a, vec_mono_mul(ring, uj, fj), -ci)
    return a, lcm, ui, uj, ci, cj


def buchberger(gens: list[Vec], ring: WeylAlgebra, order: TermOrder,
               track_repr=False) -> GroebnerBasis:
    """Left Groebner basis of the module generated by gens.

    track_repr=True records for each basis element its expression in
    the original generators; track_repr=<int> records only the
    component over that single generator (cheaper, enough for witness
    cofactors).
    """
    key = order.key
    proj = track_repr if track_repr is not True and track_repr is not False else None
    basis: list[Vec] = []
    leads: list[tuple] = []
    reprs: list[Vec] | None = [] if track_repr is not False else None
    track_repr = track_repr is not False

    def interreduce_add(vec, rep):
        gb_now = GroebnerBasis(ring, order, basis, leads, None)
        while True:
            if track_repr:
                rem, cof = normal_form(vec, gb_now, track=True)
                for i, op in (cof or {}).items():
                    for mono, c in op.items():
                        vec_add_scaled(rep, vec_mono_mul(ring, mono, reprs[i]), -c)
            else:
                rem, _ = normal_form(vec, gb_now)
            if not rem:
                return None
            stripped = vec_strip_h(rem, ring)
            if stripped is rem or stripped == rem:
                break
            vec = stripped
            # h-stripping invalidates the certificate scale
            if track_repr:
                raise ValueError("representation tracking unsupported with homogenization")
        if track_repr:
            keys = sorted(rem)
            allc = [rem[k] for k in keys]
            rkeys = sorted(rep)
            norm = content_normalize(allc + [rep[k] for k in rkeys])
            rem = dict(zip(keys, norm[: len(keys)]))
            rep = dict(zip(rkeys, norm[len(keys):]))
        else:
            rem = vec_content_normalize(rem)
        lead = vec_lead(rem, key)
        if rem[lead] < 0:
            rem = {k: -c for k, c in rem.items()}
            if track_repr:
                rep = {k: -c for k, c in rep.items()}
        if track_repr:
            reprs.append(rep)
        basis.append(rem)
        leads.append(lead)
        return len(basis) - 1

    pairs: list = []
    done: set = set()

    def push_pairs(k):
        mk, pk = leads[k]
        for i in range(k):
            mi, pi = leads[i]
            if pi != pk:
                continue
            lcm = tuple(max(a, b) for a, b in zip(mi, mk))
            heapq.heappush(pairs, (key(lcm, pk), i, k, lcm))

    for idx, g in enumerate(gens):
        if not g:
            continue
        if track_repr:
            rep = {} if (proj is not None and idx != proj) else {(ring.zero_mono, idx): mpq(1)}
        else:
            rep = None
        k = interreduce_add(dict(g), rep)
        if k is not None:
            push_pairs(k)

    while pairs:
        _, i, j, lcm = heapq.heappop(pairs)
        if (i, j) in done:
            continue
        done.add((i, j))
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k == i or k == j:
                continue
            mk, pk = leads[k]
            if pk != leads[i][1] or not _divides(mk, lcm):
                continue
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a in done and b in done:
                skip = True
                break
        if skip:
            continue
        fi, fj = basis[i], basis[j]
        li, lj = leads[i], leads[j]
        sp, lcm, ui, uj, ci, cj = _spair_parts(fi, fj, li, lj, ring)
        rep = None
        if track_repr:
            rep = {}
            for mono, c in {ui: cj}.items():
                vec_add_scaled(rep, vec_mono_mul(ring, mono, reprs[i]), c)
            vec_add_scaled(rep, vec_mono_mul(ring, uj, reprs[j]), -ci)
        k = interreduce_add(sp, rep)
        if k is not None:
            push_pairs(k)

    gb = GroebnerBasis(ring, order, basis, leads, reprs)
    return autoreduce(gb)


def autoreduce(gb: GroebnerBasis) -> GroebnerBasis:
    """Minimal reduced basis, sorted by leading monomial."""
    ring, order = gb.ring, gb.order
    key = order.key
    items = list(zip(gb.basis, gb.leads, gb.reprs if gb.reprs else [None] * len(gb.basis)))
    # drop elements whose lead is divisible by another lead
    keep = []
    for i, (f, (lm, lp), rep) in enumerate(items):
        drop = False
        for j, (g, (lm2, lp2), _) in enumerate(items):
            if i == j or lp != lp2:
                continue
            if _divides(lm2, lm) and (lm2 != lm or j < i):
                drop = True
                break
        if not drop:
            keep.append((f, (lm, lp), rep))
    keep.sort(key=lambda t: key(t[1][0], t[1][1]))
    # tail reduce each against the others
    out, out_leads, out_reprs = [], [], []
    for i, (f, ld, rep) in enumerate(keep):
        others = GroebnerBasis(
            ring, order,
            [g for j, (g, _, _) in enumerate(keep) if j != i],
            [l for j, (_, l, _) in enumerate(keep) if j != i],
        )
        rem, cof = normal_form(f, others, track=rep is not None)
        if not rem:
            continue
        if rep is not None:
            rep = dict(rep)
            idx_map = [j for j in range(len(keep)) if j != i]
            for k2, op in (cof or {}).items():
                orig_rep = keep[idx_map[k2]][2]
                for mono, c in op.items():
                    vec_add_scaled(rep, vec_mono_mul(ring, mono, orig_rep), -c)
            keys = sorted(rem)
            rkeys = sorted(rep)
            norm = content_normalize([rem[k] for k in keys] + [rep[k] for k in rkeys])
            rem = dict(zip(keys, norm[: len(keys)]))
            rep = dict(zip(rkeys, norm[len(keys):]))
        else:
            rem = vec_content_normalize(rem)
        lead = vec_lead(rem, key)
        if rem[lead] < 0:
            rem = {k: -c for k, c in rem.items()}
            if rep is not None:
                rep = {k: -c for k, c in rep.items()}
        out.append(rem)
        out_leads.append(lead)
        out_reprs.append(rep)
    return GroebnerBasis(ring, order, out, out_leads,
                         out_reprs if any(r is not None for r in out_reprs) else None)


def syzygies(gb: GroebnerBasis) -> list[Vec]:
    """Schreyer generators of the syzygy module of a Groebner basis.

    Each output vector lives in the free module with one position per
    basis element.  Raises if some S-pair fails to reduce to zero.
    """
    ring = gb.ring
    out: list[Vec] = []
    order_pairs = []
    key = gb.order.key
    for j in range(len(gb.basis)):
        for i in range(j):
            if gb.leads[i][1] != gb.leads[j][1]:
                continue
            mi = gb.leads[i][0]
            mj = gb.leads[j][0]
            lcm = tuple(max(a, b) for a, b in zip(mi, mj))
            order_pairs.append((key(lcm, gb.leads[i][1]), i, j))
    order_pairs.sort()
    for _, i, j in order_pairs:
        fi, fj = gb.basis[i], gb.basis[j]
        li, lj = gb.leads[i], gb.leads[j]
        sp, lcm, ui, uj, ci, cj = _spair_parts(fi, fj, li, lj, ring)
        rem, cof = normal_form(sp, gb, track=True)
        if rem:
            raise ValueError("input to syzygies is not a Groebner basis")
        syz: Vec = {(ui, i): mpq(cj)}
        vec_add_scaled(syz, {(uj, j): mpq(1)}, -ci)
        for k, op in (cof or {}).items():
            for mono, c in op.items():
                kk = (mono, k)
                w = syz.get(kk, mpq(0)) - c
                if w == 0:
                    syz.pop(kk, None)
                else:
                    syz[kk] = w
        syz = vec_content_normalize(syz)
        if syz:
            out.append(syz)
    return out


def is_member(vec: Vec, gb: GroebnerBasis) -> bool:
    rem, _ = normal_form(vec, gb)
    return not rem


def syzygies_of(vectors: list[Vec], ring: WeylAlgebra, order: TermOrder) -> list[Vec]:
    """Generators of the syzygy module of arbitrary vectors.

    Combines the Schreyer syzygies of a tracked Groebner basis with the
    reduction relations e_i - (expression of vectors[i] over the
    basis); both families are needed when the input is not already a
    basis.
    """
    vectors = [v for v in vectors if v]
    if not vectors:
        return []
    gbt = buchberger(vectors, ring, order, track_repr=True)
    out: list[Vec] = []
    for s in syzygies(gbt):
        vec: Vec = {}
        for (mono, bidx), c in s.items():
            vec_add_scaled(vec, vec_mono_mul(ring, mono, gbt.reprs[bidx]), c)
        if vec:
            out.append(vec_content_normalize(vec))
    for i, v in enumerate(vectors):
        rem, cof = normal_form(v, gbt, track=True)
        if rem:
            raise AssertionError("generator fails to reduce against its own basis")
        rel: Vec = {(ring.zero_mono, i): mpq(1)}
        for bidx, opd in (cof or {}).items():
            for mono, c in opd.items():
                vec_add_scaled(rel, vec_mono_mul(ring, mono, gbt.reprs[bidx]), -c)
        if rel:
            out.append(vec_content_normalize(rel))
    return out
