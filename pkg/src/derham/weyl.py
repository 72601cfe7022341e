"""The Weyl algebra D_n and its homogenization.

Elements are kept in normal order: every monomial is x^alpha d^beta
(all x factors left of all differentials).  A ring may carry extra
central commutative variables (used for elimination constructions) and
an optional central homogenizing variable h with d_i x_i = x_i d_i +
h^2, which makes Groebner runs with mixed-sign weight vectors
terminate.

Monomials are flat integer tuples
``(a_1..a_n, b_1..b_n, c_1..c_m[, h])`` for x-, d-, commutative and
homogenization exponents.
"""

from __future__ import annotations

from gmpy2 import mpq

from derham.rat import content_normalize

NEG_INF = float("-inf")


class WeylAlgebra:
    """Ring descriptor: n x/d pairs, extra commutative variables,
    optional homogenization."""

    def __init__(self, n: int, comm: tuple[str, ...] = (), homogenized: bool = False,
                 xnames: tuple[str, ...] | None = None):
        self.n = n
        self.comm = tuple(comm)
        self.homogenized = homogenized
        self.width = 2 * n + len(comm) + (1 if homogenized else 0)
        self.xnames = tuple(xnames) if xnames else tuple(f"x{i+1}" for i in range(n))
        self.zero_mono = (0,) * self.width
        self._mul_cache: dict = {}

    # ---- monomial helpers ------------------------------------------------
    def xexp(self, m):
        return m[: self.n]

    def dexp(self, m):
        return m[self.n : 2 * self.n]

    def hexp(self, m) -> int:
        return m[-1] if self.homogenized else 0

    def tdeg(self, m) -> int:
        return sum(m)

    def vweight(self, m) -> int:
        """Weight of a monomial under x -> +1, d -> -1."""
        n = self.n
        return sum(m[:n]) - sum(m[n : 2 * n])

    def mono(self, xexp=(), dexp=(), comm=(), h: int = 0):
        a = tuple(xexp) if xexp else (0,) * self.n
        b = tuple(dexp) if dexp else (0,) * self.n
        c = tuple(comm) if comm else (0,) * len(self.comm)
        m = a + b + c
        if self.homogenized:
            m = m + (h,)
        assert len(m) == self.width
        return m

    def mono_mul(self, m1, m2):
        """Product of two monomials as a list of (monomial, integer
        coefficient); the leading entry is the componentwise sum."""
        key = (m1, m2)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        base = tuple(u + v for u, v in zip(m1, m2))
        # correction terms from d_i^b x_i^c, coordinate by coordinate
        expansions = []  # per coordinate: list of (k, coef)
        for i in range(n):
            b = m1[n + i]
            c = m2[i]
            if b and c:
                opts = [(0, 1)]
                t = 1
                top = min(b, c)
                for k in range(1, top + 1):
                    t = t * (b - k + 1) * (c - k + 1) // k
                    opts.append((k, t))
                expansions.append((i, opts))
        if not expansions:
            out = [(base, 1)]
            self._mul_cache[key] = out
            return out
        terms = [(base, 1)]
        hslot = self.width - 1 if self.homogenized else None
        for i, opts in expansions:
            new_terms = []
            for mono, coef in terms:
                for k, ck in opts:
                    if k == 0:
                        new_terms.append((mono, coef))
                        continue
                    lst = list(mono)
                    lst[i] -= k
                    lst[n + i] -= k
                    if hslot is not None:
                        lst[hslot] += 2 * k
                    new_terms.append((tuple(lst), coef * ck))
            terms = new_terms
        # merge duplicates
        acc: dict = {}
        for mono, coef in terms:
            acc[mono] = acc.get(mono, 0) + coef
        out = [(m, c) for m, c in acc.items() if c != 0]
        self._mul_cache[key] = out
        return out

    def __repr__(self):
        tag = "H" if self.homogenized else ""
        return f"{tag}WeylAlgebra(n={self.n}, comm={self.comm})"


# ---- elements ------------------------------------------------------------


class WeylElement:
    """Element of a Weyl algebra: dict monomial -> rational."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: WeylAlgebra, terms: dict | None = None):
        self.ring = ring
        self.terms = {}
        if terms:
            for m, c in terms.items():
                c = mpq(c)
                if c != 0:
                    self.terms[tuple(m)] = c

    @classmethod
    def zero(cls, ring):
        return cls(ring)

    @classmethod
    def const(cls, ring, c):
        return cls(ring, {ring.zero_mono: mpq(c)})

    @classmethod
    def from_mono(cls, ring, mono, c=1):
        return cls(ring, {tuple(mono): mpq(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, mpq(0)) + c
            if v == 0:
                terms.pop(m, None)
            else:
                terms[m] = v
        return WeylElement(self.ring, terms)

    def __neg__(self):
        return WeylElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, type(mpq(0)))):
            return WeylElement(self.ring, {m: c * mpq(other) for m, c in self.terms.items()})
        ring = self.ring
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c12 = c1 * c2
                for m, k in ring.mono_mul(m1, m2):
                    v = acc.get(m, mpq(0)) + c12 * k
                    if v == 0:
                        acc.pop(m, None)
                    else:
                        acc[m] = v
        return WeylElement(ring, acc)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, WeylElement)
            and self.ring is other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def v_degree(self):
        """Max weight |alpha| - |beta| over terms; -inf for zero."""
        if not self.terms:
            return NEG_INF
        vw = self.ring.vweight
        return max(vw(m) for m in self.terms)

    def v_part(self, d: int) -> "WeylElement":
        """Sum of the terms of weight exactly d."""
        vw = self.ring.vweight
        return WeylElement(self.ring, {m: c for m, c in self.terms.items() if vw(m) == d})

    def map_monomials(self, fn, new_ring) -> "WeylElement":
        terms: dict = {}
        for m, c in self.terms.items():
            m2 = fn(m)
            if m2 is None:
                continue
            v = terms.get(m2, mpq(0)) + c
            if v == 0:
                terms.pop(m2, None)
            else:
                terms[m2] = v
        return WeylElement(new_ring, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        ring = self.ring
        n = ring.n
        bits = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            factors = []
            for i in range(n):
                if m[i] == 1:
                    factors.append(ring.xnames[i])
                elif m[i] > 1:
                    factors.append(f"{ring.xnames[i]}^{m[i]}")
            for i in range(n):
                e = m[n + i]
                if e == 1:
                    factors.append(f"d{ring.xnames[i]}")
                elif e > 1:
                    factors.append(f"d{ring.xnames[i]}^{e}")
            for j, name in enumerate(ring.comm):
                e = m[2 * n + j]
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if ring.homogenized and m[-1]:
                factors.append(f"h^{m[-1]}" if m[-1] > 1 else "h")
            body = "*".join(factors)
            if not body:
                bits.append(str(c))
            elif c == 1:
                bits.append(body)
            elif c == -1:
                bits.append(f"-{body}")
            else:
                bits.append(f"{c}*{body}")
        return " + ".join(bits).replace("+ -", "- ")


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    """Normally ordered product in the Weyl algebra."""
    if a.ring is not b.ring and a.ring.width != b.ring.width:
        raise ValueError("ring mismatch")
    return a * b


def v_degree(a: WeylElement):
    return a.v_degree()


def normalize_content(elem: WeylElement) -> WeylElement:
    """Scale so the coefficients are coprime integers."""
    if not elem.terms:
        return elem
    monos = sorted(elem.terms)
    coeffs = content_normalize([elem.terms[m] for m in monos])
    return WeylElement(elem.ring, dict(zip(monos, coeffs)))


# ---- building blocks ------------------------------------------------------


def x_var(ring: WeylAlgebra, i: int) -> WeylElement:
    e = [0] * ring.width
    e[i] = 1
    return WeylElement.from_mono(ring, e)


def d_var(ring: WeylAlgebra, i: int) -> WeylElement:
    e = [0] * ring.width
    e[ring.n + i] = 1
    return WeylElement.from_mono(ring, e)


def comm_var(ring: WeylAlgebra, j: int) -> WeylElement:
    e = [0] * ring.width
    e[2 * ring.n + j] = 1
    return WeylElement.from_mono(ring, e)


def euler_operator(ring: WeylAlgebra) -> WeylElement:
    """E = x_1 d_1 + ... + x_n d_n."""
    terms = {}
    for i in range(ring.n):
        e = [0] * ring.width
        e[i] = 1
        e[ring.n + i] = 1
        terms[tuple(e)] = mpq(1)
    return WeylElement(ring, terms)


def poly_to_weyl(p, ring: WeylAlgebra) -> WeylElement:
    """Embed a commutative polynomial in the x-variables."""
    if len(p.vars) != ring.n:
        raise ValueError("variable count mismatch")
    terms = {}
    for e, c in p.terms.items():
        terms[ring.mono(xexp=e)] = c
    return WeylElement(ring, terms)


def to_antinormal(elem: WeylElement) -> dict:
    """Rewrite with all differentials on the left.

    Returns a dict (dexp, xexp) -> coefficient using
    x^a d^b = sum_k (-1)^k C(a,k) C(b,k) k! d^(b-k) x^(a-k).
    """
    ring = elem.ring
    n = ring.n
    out: dict = {}
    for m, c in elem.terms.items():
        a = m[:n]
        b = m[n : 2 * n]
        rest = m[2 * n :]
        if any(rest):
            raise ValueError("anti-normal form only for plain Weyl elements")
        pieces = [((), (), 1)]
        for i in range(n):
            new_pieces = []
            top = min(a[i], b[i])
            t = 1
            opts = [(0, 1)]
            for k in range(1, top + 1):
                t = t * (a[i] - k + 1) * (b[i] - k + 1) // k
                opts.append((k, t))
            for bb, aa, coef in pieces:
                for k, tk in opts:
                    new_pieces.append((bb + (b[i] - k,), aa + (a[i] - k,), coef * tk * (-1) ** k))
            pieces = new_pieces
        for bb, aa, coef in pieces:
            key = (bb, aa)
            v = out.get(key, mpq(0)) + c * coef
            if v == 0:
                out.pop(key, None)
            else:
                out[key] = v
    return out


# ---- homogenization --------------------------------------------------------


def homogenized_ring(ring: WeylAlgebra) -> WeylAlgebra:
    if ring.homogenized:
        return ring
    return WeylAlgebra(ring.n, ring.comm, homogenized=True, xnames=ring.xnames)


def homogenize_element(elem: WeylElement, hring: WeylAlgebra, degree: int | None = None) -> WeylElement:
    """Pad every term with h so all terms reach the same total degree."""
    if not elem.terms:
        return WeylElement(hring)
    d = max(sum(m) for m in elem.terms)
    if degree is not None:
        if degree < d:
            raise ValueError("degree too small")
        d = degree
    terms = {}
    for m, c in elem.terms.items():
        terms[m + (d - sum(m),)] = c
    return WeylElement(hring, terms)


def dehomogenize_element(elem: WeylElement, ring: WeylAlgebra) -> WeylElement:
    """Set h = 1."""
    terms: dict = {}
    for m, c in elem.terms.items():
        m2 = m[:-1]
        v = terms.get(m2, mpq(0)) + c
        if v == 0:
            terms.pop(m2, None)
        else:
            terms[m2] = v
    return WeylElement(ring, terms)


# ---- term orders -----------------------------------------------------------


class TermOrder:
    """Monomial order given by a key function on (monomial, position).

    kind is one of 'total-degree', 'weight-refined', 'elimination'.
    Keys compare lexicographically; larger key = larger monomial.
    """

    def __init__(self, kind: str, key, weights=None):
        self.kind = kind
        self.key = key
        self.weights = weights

    def __repr__(self):
        return f"TermOrder({self.kind})"


def _grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def grevlex_order(ring: WeylAlgebra) -> TermOrder:
    """Graded reverse lexicographic order (position breaks last).

    On a homogenized ring, h counts toward the leading total degree
    but loses against any core monomial of the same degree.
    """
    core = m_core_slicer(ring)

    def key(m, pos=0):
        return (sum(m),) + _grevlex_key(core(m)) + (-pos,)

    return TermOrder("total-degree", key)


def m_core_slicer(ring: WeylAlgebra):
    """Monomial part without the homogenization slot."""
    if ring.homogenized:
        w = ring.width - 1
        return lambda m: m[:w]
    return lambda m: m


def weight_order(ring: WeylAlgebra, u, v, shifts=None, dshifts=None) -> TermOrder:
    """Order refining the (u, v) weight (x_i -> u_i, d_i -> v_i).

    Total degree (offset by dshifts per position) is compared first so
    the order is usable on the homogenized ring; within homogeneous
    elements it refines the weight.  shifts maps positions to weight
    offsets, dshifts to degree offsets (Schreyer levels).
    """
    n = ring.n
    u = tuple(u)
    v = tuple(v)
    core = m_core_slicer(ring)
    shifts = shifts or {}
    dshifts = dshifts or {}

    def wt(m):
        return sum(ui * e for ui, e in zip(u, m[:n])) + sum(
            vi * e for vi, e in zip(v, m[n : 2 * n])
        )

    def key(m, pos=0):
        return (
            sum(m) + dshifts.get(pos, 0),
            wt(m) + shifts.get(pos, 0),
            _grevlex_key(core(m)),
            -pos,
        )

    order = TermOrder("weight-refined", key, weights=(u, v))
    order.weight_of = wt
    return order


def weight_term_order(ring: WeylAlgebra, u, v) -> TermOrder:
    """Weight-first order for componentwise nonnegative u, v.

    A genuine term order (no homogenization needed) because the
    commutation corrections never raise the weight.
    """
    n = ring.n
    u = tuple(u)
    v = tuple(v)
    if any(x < 0 for x in u) or any(x < 0 for x in v):
        raise ValueError("weight_term_order needs nonnegative weights")
    core = m_core_slicer(ring)

    def wt(m):
        return sum(ui * e for ui, e in zip(u, m[:n])) + sum(
            vi * e for vi, e in zip(v, m[n : 2 * n])
        )

    def key(m, pos=0):
        return (wt(m), sum(m), _grevlex_key(core(m)), -pos)

    order = TermOrder("weight-refined", key, weights=(u, v))
    order.weight_of = wt
    return order


def elimination_order(ring: WeylAlgebra, elim_slots) -> TermOrder:
    """Block order: monomials containing the given slots dominate."""
    elim = tuple(sorted(elim_slots))
    core = m_core_slicer(ring)

    def key(m, pos=0):
        block = tuple(m[i] for i in elim)
        return (
            _grevlex_key(block),
            sum(m),
            _grevlex_key(core(m)),
            -pos,
        )

    return TermOrder("elimination", key)
