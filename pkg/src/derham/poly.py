"""Multivariate polynomials over Q and localized fractions g/F^k.

Polynomials are kept as sparse dicts from dense exponent tuples to
gmpy2 rationals.  Chart variables of projective space are named by the
quotient they stand for, e.g. ``x/z`` for the coordinate x_i/x_j on the
chart x_j != 0.
"""

from __future__ import annotations

import re

from gmpy2 import mpq


class Poly:
    """Polynomial in an ordered list of named variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...], terms: dict | None = None):
        self.vars = tuple(vars)
        self.terms = {}
        if terms:
            for e, c in terms.items():
                c = mpq(c)
                if c != 0:
                    self.terms[tuple(e)] = c

    # ---- constructors -------------------------------------------------
    @classmethod
    def zero(cls, vars) -> "Poly":
        return cls(vars)

    @classmethod
    def const(cls, vars, c) -> "Poly":
        return cls(vars, {(0,) * len(vars): mpq(c)})

    @classmethod
    def var(cls, vars, name) -> "Poly":
        i = tuple(vars).index(name)
        e = [0] * len(vars)
        e[i] = 1
        return cls(vars, {tuple(e): mpq(1)})

    @classmethod
    def monomial(cls, vars, exps, c=1) -> "Poly":
        return cls(vars, {tuple(exps): mpq(c)})

    # ---- ring structure ------------------------------------------------
    def _check(self, other: "Poly"):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, (int, type(mpq(0)))):
            other = Poly.const(self.vars, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, mpq(0)) + c
            if v == 0:
                terms.pop(e, None)
            else:
                terms[e] = v
        return Poly(self.vars, terms)

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, type(mpq(0)))):
            other = Poly.const(self.vars, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, type(mpq(0)))):
            return Poly(self.vars, {e: c * mpq(other) for e, c in self.terms.items()})
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e, mpq(0)) + c1 * c2
                if v == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = v
        return Poly(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.vars), mpq(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to variable i."""
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            terms[tuple(e2)] = c * e[i]
        return Poly(self.vars, terms)

    # ---- division ------------------------------------------------------
    def _grevlex_key(self, e):
        return (sum(e), tuple(-x for x in reversed(e)))

    def lead(self):
        e = max(self.terms, key=self._grevlex_key)
        return e, self.terms[e]

    def divmod_single(self, g: "Poly") -> tuple["Poly", "Poly"]:
        """Divide by a single polynomial; remainder has no term
        divisible by the leading monomial of g (grevlex)."""
        self._check(g)
        if g.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        ge, gc = g.lead()
        q: dict = {}
        r: dict = {}
        work = dict(self.terms)
        while work:
            e = max(work, key=self._grevlex_key)
            c = work.pop(e)
            if all(a >= b for a, b in zip(e, ge)):
                de = tuple(a - b for a, b in zip(e, ge))
                f = c / gc
                q[de] = q.get(de, mpq(0)) + f
                for e2, c2 in g.terms.items():
                    if e2 == ge:
                        continue
                    ee = tuple(a + b for a, b in zip(de, e2))
                    v = work.get(ee, mpq(0)) - f * c2
                    if v == 0:
                        work.pop(ee, None)
                    else:
                        work[ee] = v
            else:
                r[e] = c
        return Poly(self.vars, q), Poly(self.vars, r)

    def divisible_by(self, g: "Poly") -> bool:
        _, r = self.divmod_single(g)
        return r.is_zero()

    def exact_div(self, g: "Poly") -> "Poly":
        q, r = self.divmod_single(g)
        if not r.is_zero():
            raise ValueError("not exactly divisible")
        return q

    # ---- substitution / charts ------------------------------------------
    def subs_one(self, i: int) -> "Poly":
        """Set variable i to 1 and drop it from the ring."""
        new_vars = self.vars[:i] + self.vars[i + 1 :]
        terms: dict = {}
        for e, c in self.terms.items():
            e2 = e[:i] + e[i + 1 :]
            v = terms.get(e2, mpq(0)) + c
            if v == 0:
                terms.pop(e2, None)
            else:
                terms[e2] = v
        return Poly(new_vars, terms)

    def rename(self, new_vars) -> "Poly":
        if len(new_vars) != len(self.vars):
            raise ValueError("arity mismatch")
        return Poly(tuple(new_vars), dict(self.terms))

    def __repr__(self):
        return poly_to_string(self)


def chart_vars(vars: tuple[str, ...], j: int) -> tuple[str, ...]:
    """Names of the affine coordinates x_i/x_j on the chart x_j != 0."""
    return tuple(f"{v}/{vars[j]}" for i, v in enumerate(vars) if i != j)


def dehomogenize(f: Poly, j: int) -> Poly:
    """Restrict a homogeneous polynomial to the chart x_j != 0.

    The result lives in the chart variables x_i/x_j (i != j); setting
    x_j = 1 after dividing by x_j^deg(f).
    """
    if not f.is_homogeneous():
        raise ValueError("dehomogenize requires homogeneous input")
    g = f.subs_one(j)
    return g.rename(chart_vars(f.vars, j))


def rehomogenize(p: Poly, vars: tuple[str, ...], j: int, degree: int) -> Poly:
    """Inverse of dehomogenize for polynomials of degree <= degree."""
    terms = {}
    for e, c in p.terms.items():
        d = sum(e)
        if d > degree:
            raise ValueError("degree too small to rehomogenize")
        e2 = list(e[:j]) + [degree - d] + list(e[j:])
        terms[tuple(e2)] = c
    return Poly(vars, terms)


def poly_to_string(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for e in sorted(p.terms, key=p._grevlex_key, reverse=True):
        c = p.terms[e]
        factors = []
        for name, k in zip(p.vars, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        body = "*".join(factors)
        if not body:
            frag = str(c)
        elif c == 1:
            frag = body
        elif c == -1:
            frag = f"-{body}"
        else:
            frag = f"{c}*{body}"
        if parts and not frag.startswith("-"):
            parts.append("+" + frag)
        else:
            parts.append(frag)
    return "".join(parts)


# ---- parser -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*(?:/[A-Za-z_][A-Za-z_0-9]*)?)"
    r"|(?P<op>[-+*^()/]))"
)


class PolyParseError(ValueError):
    """Parse failure with the offending position."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _tokenize(s: str):
    out = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            if s[pos:].strip():
                raise PolyParseError(f"unexpected character {s[pos]!r}", pos)
            break
        if m.group("num"):
            out.append(("num", int(m.group("num")), m.start()))
        elif m.group("name"):
            out.append(("name", m.group("name"), m.start()))
        else:
            out.append(("op", m.group("op"), m.start()))
        pos = m.end()
    out.append(("end", None, len(s)))
    return out


def parse_poly(s: str, vars) -> Poly:
    """Parse '+ - * ^ ( )' expressions with integer or rational
    coefficients over the given variables."""
    vars = tuple(vars)
    toks = _tokenize(s)
    idx = 0

    def peek():
        return toks[idx]

    def take():
        nonlocal idx
        t = toks[idx]
        idx += 1
        return t

    def parse_expr() -> Poly:
        kind, val, pos = peek()
        neg = False
        while kind == "op" and val in "+-":
            take()
            if val == "-":
                neg = not neg
            kind, val, pos = peek()
        p = parse_term()
        if neg:
            p = -p
        while True:
            kind, val, pos = peek()
            if kind == "op" and val in "+-":
                take()
                q = parse_term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def parse_term() -> Poly:
        p = parse_power()
        while True:
            kind, val, pos = peek()
            if kind == "op" and val == "*":
                take()
                p = p * parse_power()
            elif kind == "op" and val == "/":
                take()
                q = parse_power()
                if not q.is_constant() or q.is_zero():
                    raise PolyParseError("division only by nonzero constants", pos)
                p = p * (1 / q.constant_value())
            else:
                return p

    def parse_power() -> Poly:
        p = parse_atom()
        kind, val, pos = peek()
        if kind == "op" and val == "^":
            take()
            kind, val, pos = take()
            if kind != "num":
                raise PolyParseError("exponent must be a nonnegative integer", pos)
            return p ** val
        return p

    def parse_atom() -> Poly:
        kind, val, pos = take()
        if kind == "num":
            return Poly.const(vars, val)
        if kind == "name":
            if val not in vars:
                raise PolyParseError(f"unknown variable {val!r}", pos)
            return Poly.var(vars, val)
        if kind == "op" and val == "(":
            p = parse_expr()
            kind, val, pos = take()
            if not (kind == "op" and val == ")"):
                raise PolyParseError("expected ')'", pos)
            return p
        if kind == "op" and val == "-":
            return -parse_atom()
        raise PolyParseError("expected a term", pos)

    p = parse_expr()
    kind, _, pos = peek()
    if kind != "end":
        raise PolyParseError("trailing input", pos)
    return p


# ---- localized fractions -----------------------------------------------


class LocalFraction:
    """numerator / denom_base**denom_power, kept in canonical form.

    Canonical: zero numerator has power 0; otherwise the numerator is
    not divisible by denom_base while the power is positive.
    """

    __slots__ = ("numerator", "denom_base", "denom_power")

    def __init__(self, numerator: Poly, denom_base: Poly, denom_power: int = 0):
        if denom_base.is_zero():
            raise ZeroDivisionError("zero denominator base")
        if denom_power < 0:
            numerator = numerator * denom_base ** (-denom_power)
            denom_power = 0
        self.numerator = numerator
        self.denom_base = denom_base
        self.denom_power = denom_power
        self._canonicalize()

    def _canonicalize(self):
        if self.numerator.is_zero():
            self.denom_power = 0
            return
        if self.denom_base.is_constant():
            c = self.denom_base.constant_value()
            self.numerator = self.numerator * (1 / c) ** self.denom_power
            self.denom_power = 0
            return
        while self.denom_power > 0:
            q, r = self.numerator.divmod_single(self.denom_base)
            if not r.is_zero():
                break
            self.numerator = q
            self.denom_power -= 1

    @classmethod
    def from_poly(cls, p: Poly, base: Poly) -> "LocalFraction":
        return cls(p, base, 0)

    def _check(self, other: "LocalFraction"):
        if self.denom_base != other.denom_base:
            raise ValueError("incompatible denominator bases")

    def __add__(self, other):
        if isinstance(other, Poly):
            other = LocalFraction(other, self.denom_base, 0)
        self._check(other)
        k = max(self.denom_power, other.denom_power)
        a = self.numerator * self.denom_base ** (k - self.denom_power)
        b = other.numerator * other.denom_base ** (k - other.denom_power)
        return LocalFraction(a + b, self.denom_base, k)

    def __neg__(self):
        return LocalFraction(-self.numerator, self.denom_base, self.denom_power)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, type(mpq(0)))):
            return LocalFraction(self.numerator * other, self.denom_base, self.denom_power)
        if isinstance(other, Poly):
            return LocalFraction(self.numerator * other, self.denom_base, self.denom_power)
        self._check(other)
        return LocalFraction(
            self.numerator * other.numerator,
            self.denom_base,
            self.denom_power + other.denom_power,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LocalFraction):
            return NotImplemented
        # cross multiplication at a common power; exact
        if self.denom_base == other.denom_base:
            k = max(self.denom_power, other.denom_power)
            a = self.numerator * self.denom_base ** (k - self.denom_power)
            b = other.numerator * other.denom_base ** (k - other.denom_power)
            return a == b
        return NotImplemented

    def __hash__(self):
        return hash((self.numerator, self.denom_base, self.denom_power))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def diff(self, i: int) -> "LocalFraction":
        """d/dx_i of g/F^k = (g' F - k g F')/F^(k+1)."""
        g = self.numerator
        f = self.denom_base
        k = self.denom_power
        num = g.diff(i) * f - k * g * f.diff(i)
        return LocalFraction(num, f, k + 1)

    def rebase(self, new_base: Poly) -> "LocalFraction":
        """Rewrite over a new denominator base that the current base
        divides (as it does when passing to a larger chart divisor)."""
        if self.denom_power == 0:
            return LocalFraction(self.numerator, new_base, 0)
        cof = new_base.exact_div(self.denom_base)
        return LocalFraction(self.numerator * cof ** self.denom_power, new_base, self.denom_power)

    def __repr__(self):
        if self.denom_power == 0:
            return f"({self.numerator})"
        return f"({self.numerator})/({self.denom_base})^{self.denom_power}"
