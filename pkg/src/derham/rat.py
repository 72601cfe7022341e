"""Exact rational coefficients.

gmpy2.mpq is used throughout; it is substantially faster than
fractions.Fraction on the Groebner-basis inner loops.
"""

from gmpy2 import mpq, mpz

QQ = mpq
ZERO = mpq(0)
ONE = mpq(1)


def qq(num, den=1):
    """Rational from ints (or strings like '3/2')."""
    return mpq(num, den) if den != 1 else mpq(num)


def is_zero(c) -> bool:
    return c == 0


def content_normalize(coeffs):
    """Scale a list of rationals so they become coprime integers.

    Returns the scaled list; the first nonzero entry keeps its sign.
    The scaling factor is positive, so signs are preserved.
    """
    if not coeffs:
        return coeffs
    den_lcm = mpz(1)
    for c in coeffs:
        d = c.denominator
        den_lcm = den_lcm * d // gcd_mpz(den_lcm, d)
    nums = [mpz(c.numerator * (den_lcm // c.denominator)) for c in coeffs]
    g = mpz(0)
    for v in nums:
        g = gcd_mpz(g, v)
        if g == 1:
            break
    if g == 0:
        return [mpq(0) for _ in coeffs]
    return [mpq(v, g) for v in nums]


def gcd_mpz(a, b):
    from gmpy2 import gcd

    return gcd(a, b)
