"""Tests for polynomial arithmetic, charts and localized fractions."""

import random

import pytest
from gmpy2 import mpq

from derham.poly import (
    LocalFraction,
    Poly,
    PolyParseError,
    chart_vars,
    dehomogenize,
    parse_poly,
    rehomogenize,
)

XYZ = ("x", "y", "z")


def p(s, vars=XYZ):
    return parse_poly(s, vars)


def test_parse_basic():
    f = p("x^2 + y*z")
    assert f.degree() == 2
    assert f.is_homogeneous()
    assert f == p("(x)*(x) + z*y")


def test_parse_rational_coefficients():
    f = p("1/2*x - 3*y")
    assert f.terms[(1, 0, 0)] == mpq(1, 2)
    assert f.terms[(0, 1, 0)] == -3


def test_parse_errors_have_positions():
    with pytest.raises(PolyParseError):
        p("x +")
    with pytest.raises(PolyParseError):
        p("w + x")
    with pytest.raises(PolyParseError):
        p("x ^ y")


def test_dehomogenize_conic_chart_z():
    f = p("x^2 + y*z")
    g = dehomogenize(f, 2)
    assert g.vars == ("x/z", "y/z")
    assert g == parse_poly("s^2 + t", ("s", "t")).rename(("x/z", "y/z"))


def test_dehomogenize_conic_chart_x():
    f = p("x^2 + y*z")
    g = dehomogenize(f, 0)
    assert g.vars == ("y/x", "z/x")
    assert g == parse_poly("1 + s*t", ("s", "t")).rename(("y/x", "z/x"))


def test_dehomogenize_coordinate():
    f = p("x")
    g = dehomogenize(f, 0)
    assert g.is_constant() and g.constant_value() == 1


def test_dehomogenize_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        dehomogenize(p("x^2 + y"), 0)


def random_homogeneous(rng, deg):
    terms = {}
    for a in range(deg + 1):
        for b in range(deg + 1 - a):
            c = deg - a - b
            v = rng.randrange(-2, 3)
            if v:
                terms[(a, b, c)] = v
    return Poly(XYZ, terms)


def test_dehomogenize_is_ring_homomorphism():
    rng = random.Random(1)
    for _ in range(10):
        f = random_homogeneous(rng, rng.randrange(1, 4))
        g = random_homogeneous(rng, rng.randrange(1, 4))
        for j in range(3):
            assert dehomogenize(f * g, j) == dehomogenize(f, j) * dehomogenize(g, j)


def test_rehomogenize_grading_roundtrip():
    rng = random.Random(2)
    for _ in range(10):
        f = random_homogeneous(rng, rng.randrange(1, 4))
        if f.is_zero():
            continue
        d = f.degree()
        for j in range(3):
            g = dehomogenize(f, j)
            assert rehomogenize(g, XYZ, j, d) == f


def test_chart_vars_names():
    assert chart_vars(XYZ, 2) == ("x/z", "y/z")
    assert chart_vars(XYZ, 0) == ("y/x", "z/x")


X = ("x",)


def test_fraction_add_power_drop():
    x = parse_poly("x", X)
    one = parse_poly("1", X)
    a = LocalFraction(one, x, 1)  # 1/x
    b = LocalFraction(x - one, x, 1)  # (x-1)/x
    s = a + b
    assert s.denom_power == 0
    assert s.numerator == one


def test_fraction_mul():
    x = parse_poly("x", X)
    one = parse_poly("1", X)
    a = LocalFraction(one, x, 1)
    sq = a * a
    assert sq.denom_power == 2
    assert sq.numerator == one


def test_fraction_identity_embedding():
    x = parse_poly("x", X)
    g = parse_poly("x^2 - 3", X)
    f = LocalFraction(g, x, 0)
    assert f.denom_power == 0
    assert f.numerator == g


def test_fraction_canonical_idempotent():
    x = parse_poly("x", X)
    g = parse_poly("x^3", X)
    f = LocalFraction(g, x, 2)
    assert f.denom_power == 0 and f.numerator == parse_poly("x", X)
    again = LocalFraction(f.numerator, x, f.denom_power)
    assert again == f


def test_fraction_diff():
    x = parse_poly("x", X)
    one = parse_poly("1", X)
    f = LocalFraction(one, x, 2)  # x^-2
    df = f.diff(0)  # -2 x^-3
    assert df.denom_power == 3
    assert df.numerator == parse_poly("-2", X)


def test_fraction_rebase():
    vars = ("x", "y")
    x = parse_poly("x", vars)
    xy = parse_poly("x*y", vars)
    one = parse_poly("1", vars)
    f = LocalFraction(one, x, 2)
    g = f.rebase(xy)
    assert g.denom_base == xy
    assert g.numerator == parse_poly("y^2", vars)
