"""Ideal-level helpers on top of the module Groebner engine.

Wraps element lists into rank-1 module vectors, handles the
homogenize / compute / dehomogenize cycle for weight orders with
negative entries, and exposes initial forms for the weight grading
x_i -> 1, d_i -> -1.
"""

from __future__ import annotations

from gmpy2 import mpq

from derham import gb as _gb
from derham.weyl import (
    TermOrder,
    WeylAlgebra,
    WeylElement,
    dehomogenize_element,
    grevlex_order,
    homogenize_element,
    homogenized_ring,
    normalize_content,
    weight_order,
)


def elems_to_vecs(elems: list[WeylElement]) -> list[dict]:
    return [{(m, 0): c for m, c in e.terms.items()} for e in elems]


def vecs_to_elems(vecs: list[dict], ring: WeylAlgebra) -> list[WeylElement]:
    out = []
    for v in vecs:
        terms = {}
        for (m, pos), c in v.items():
            if pos != 0:
                raise ValueError("vector is not rank 1")
            terms[m] = c
        out.append(WeylElement(ring, terms))
    return out


def groebner(gens: list[WeylElement], order: TermOrder | None = None):
    """Reduced left Groebner basis of the ideal generated by gens.

    With no order given, graded reverse lexicographic is used.  The
    basis is content-normalized and sorted by leading monomial.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("empty generator list")
    ring = gens[0].ring
    if order is None:
        order = grevlex_order(ring)
    basis = _gb.buchberger(elems_to_vecs(gens), ring, order)
    return vecs_to_elems(basis.basis, ring), basis


def reduce_element(e: WeylElement, basis: _gb.GroebnerBasis) -> WeylElement:
    rem, _ = _gb.normal_form({(m, 0): c for m, c in e.terms.items()}, basis)
    return WeylElement(e.ring, {m: c for (m, pos), c in rem.items()})


def in_ideal(e: WeylElement, basis: _gb.GroebnerBasis) -> bool:
    return reduce_element(e, basis).is_zero()


def weighted_ideal_gb(gens: list[WeylElement], u=None, v=None):
    """Groebner basis adapted to the weight (u, v) via homogenization.

    Returns (basis, initial_forms): the dehomogenized basis elements
    and their top weight forms, which generate the associated graded
    ideal.  u defaults to (1..1) and v to (-1..-1).
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("empty generator list")
    ring = gens[0].ring
    if ring.homogenized:
        raise ValueError("pass plain-ring generators")
    u = tuple(u) if u is not None else (1,) * ring.n
    v = tuple(v) if v is not None else (-1,) * ring.n
    hring = homogenized_ring(ring)
    horder = weight_order(hring, u, v)
    hgens = [{(m, 0): c for m, c in homogenize_element(g, hring).terms.items()} for g in gens]
    hbasis = _gb.buchberger(hgens, hring, horder)
    basis = [
        normalize_content(dehomogenize_element(WeylElement(hring, {m: c for (m, _p), c in vec.items()}), ring))
        for vec in hbasis.basis
    ]
    initials = [top_weight_form(b, u, v) for b in basis]
    return basis, initials


def weight_of(elem: WeylElement, u, v):
    n = elem.ring.n
    best = None
    for m in elem.terms:
        w = sum(ui * e for ui, e in zip(u, m[:n])) + sum(
            vi * e for vi, e in zip(v, m[n : 2 * n])
        )
        if best is None or w > best:
            best = w
    return best


def top_weight_form(elem: WeylElement, u, v) -> WeylElement:
    """Sum of the terms of maximal (u, v) weight."""
    if elem.is_zero():
        return elem
    n = elem.ring.n
    top = weight_of(elem, u, v)
    terms = {}
    for m, c in elem.terms.items():
        w = sum(ui * e for ui, e in zip(u, m[:n])) + sum(
            vi * e for vi, e in zip(v, m[n : 2 * n])
        )
        if w == top:
            terms[m] = c
    return WeylElement(elem.ring, terms)
