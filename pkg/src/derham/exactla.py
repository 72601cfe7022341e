"""Exact linear algebra over the rationals.

Sparse matrices with gmpy2 rationals; fraction-free Gaussian
elimination (cross-multiplication with integer content stripping,
Bareiss-style) so that Betti numbers come out as exact integers.
Pivoting is deterministic: first nonzero entry in column order, so all
derived bases are reproducible.

Vectors are sparse dicts ``{index: coefficient}`` with no explicit
zeros.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

from derham.rat import gcd_mpz


class RatMatrix:
    """Sparse matrix over the rationals.

    Entries are stored in a dict ``(row, col) -> mpq``; absent entries
    are zero and stored entries are nonzero.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (r, c), v in entries.items():
                v = mpq(v)
                if v != 0:
                    if not (0 <= r < rows and 0 <= c < cols):
                        raise IndexError(f"entry {(r, c)} outside {rows}x{cols}")
                    self.entries[(r, c)] = v

    @classmethod
    def from_rows(cls, rows_list, cols: int | None = None) -> "RatMatrix":
        """Build from a list of sparse row dicts (or dense lists)."""
        rows_norm = []
        width = 0 if cols is None else cols
        for row in rows_list:
            if isinstance(row, dict):
                d = {c: mpq(v) for c, v in row.items() if v != 0}
            else:
                d = {c: mpq(v) for c, v in enumerate(row) if v != 0}
            rows_norm.append(d)
            if cols is None and d:
                width = max(width, max(d) + 1)
        m = cls(len(rows_norm), width)
        for r, d in enumerate(rows_norm):
            for c, v in d.items():
                m.entries[(r, c)] = v
        return m

    def row(self, r: int) -> dict:
        return {c: v for (rr, c), v in self.entries.items() if rr == r}

    def row_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "RatMatrix":
        m = RatMatrix(self.cols, self.rows)
        m.entries = {(c, r): v for (r, c), v in self.entries.items()}
        return m

    def apply(self, vec: dict) -> dict:
        """Matrix times column vector (vec indexed by columns)."""
        out: dict = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x is not None:
                out[r] = out.get(r, mpq(0)) + v * x
        return {k: v for k, v in out.items() if v != 0}

    def __eq__(self, other):
        return (
            isinstance(other, RatMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"


def _strip_content(row: dict) -> dict:
    """Scale a sparse row to coprime integer entries (sign preserving)."""
    if not row:
        return row
    den = mpz(1)
    for v in row.values():
        d = v.denominator
        den = den * d // gcd_mpz(den, d)
    g = mpz(0)
    for v in row.values():
        g = gcd_mpz(g, v.numerator * (den // v.denominator))
        if g == 1:
            break
    if g == 0:
        return {}
    return {c: mpq(v.numerator * (den // v.denominator), g) for c, v in row.items()}


def _echelon_rows(rows: list[dict]) -> list[tuple[int, dict]]:
    """Fraction-free row echelon form.

    Returns a list of (pivot_col, row) sorted by pivot column.  Rows
    are integer-primitive; pivot choice is first nonzero in column
    order.
    """
    pivots: list[tuple[int, dict]] = []  # kept sorted by pivot col
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            hit = None
            for pc, prow in pivots:
                if pc == lead:
                    hit = prow
                    break
                if pc > lead:
                    break
            if hit is None:
                row = _strip_content(row)
                pivots.append((lead, row))
                pivots.sort(key=lambda t: t[0])
                break
            # cross-multiplied elimination keeps entries integral
            a = row[lead]
            b = hit[lead]
            new = {}
            for c, v in row.items():
                w = v * b
                u = hit.get(c)
                if u is not None:
                    w -= a * u
                if w != 0:
                    new[c] = w
            for c, u in hit.items():
                if c not in row:
                    w = -a * u
                    if w != 0:
                        new[c] = w
            row = _strip_content(new)
    return pivots


def rank_kernel(m: RatMatrix) -> tuple[int, list[dict]]:
    """Rank and a kernel basis for ``m`` acting on column vectors.

    rank + len(kernel) == cols; kernel vectors are sparse dicts over
    column indices, integer-primitive, ordered by their free column.
    """
    pivots = _echelon_rows(m.row_dicts())
    rank = len(pivots)
    pivot_cols = [pc for pc, _ in pivots]
    pivot_set = set(pivot_cols)
    kernel: list[dict] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        # back substitution: vec[free] = 1, solve pivot entries
        vec = {free: mpq(1)}
        for pc, prow in reversed(pivots):
            s = mpq(0)
            for c, v in prow.items():
                if c == pc:
                    continue
                x = vec.get(c)
                if x is not None:
                    s += v * x
            if s != 0:
                vec[pc] = -s / prow[pc]
        kernel.append(_strip_content(vec))
    return rank, kernel


def rank(m: RatMatrix) -> int:
    return len(_echelon_rows(m.row_dicts()))


class Echelon:
    """Incremental row space with optional expression tracking.

    Rows may carry a tag; reduce() then reports the coefficient of
    every tagged row used.  Used for span membership, subquotient
    coordinates and the deterministic enlargement searches.
    """

    def __init__(self, tracked: bool = False):
        self.tracked = tracked
        self._rows: list[tuple[int, dict, dict | None]] = []  # (pivot, row, combo)

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: dict) -> tuple[dict, dict]:
        """Reduce vec against the span; returns (remainder, combo).

        remainder is vec minus a linear combination of stored rows;
        combo maps tags to coefficients (empty when untracked).
        """
        rem = {c: mpq(v) for c, v in vec.items() if v != 0}
        combo: dict = {}
        for pivot, row, rcombo in self._rows:
            x = rem.get(pivot)
            if x is None:
                continue
            f = x / row[pivot]
            for c, v in row.items():
                w = rem.get(c, mpq(0)) - f * v
                if w == 0:
                    rem.pop(c, None)
                else:
                    rem[c] = w
            if self.tracked and rcombo:
                for t, v in rcombo.items():
                    w = combo.get(t, mpq(0)) + f * v
                    if w == 0:
                        combo.pop(t, None)
                    else:
                        combo[t] = w
        return rem, combo

    def add(self, vec: dict, tag=None) -> bool:
        """Insert vec into the span; returns True if it was new."""
        rem, combo = self.reduce(vec)
        if not rem:
            return False
        if self.tracked:
            # stored row = vec - sum(combo * earlier rows), so its
            # expression in original tagged vectors is tag - combo
            rcombo = {t: -v for t, v in combo.items()}
            if tag is not None:
                rcombo[tag] = rcombo.get(tag, mpq(0)) + mpq(1)
                if rcombo[tag] == 0:
                    del rcombo[tag]
        else:
            rcombo = None
        pivot = min(rem)
        self._rows.append((pivot, rem, rcombo))
        self._rows.sort(key=lambda t: t[0])
        return True

    def contains(self, vec: dict) -> bool:
        rem, _ = self.reduce(vec)
        return not rem


class Subquotient:
    """Basis data for span(cycles)/span(boundaries).

    representatives are original cycle vectors completing the
    boundaries to a basis of the cycle space; reduce() expresses any
    cycle in those representatives modulo boundaries.
    """

    def __init__(self, ambient_dim: int, cycles: list[dict], boundaries: list[dict]):
        self.ambient_dim = ambient_dim
        cyc_ech = Echelon()
        for v in cycles:
            cyc_ech.add(v)
        for b in boundaries:
            if not cyc_ech.contains(b):
                raise ValueError("boundary vector outside cycle space: inconsistent complex")
        self._ech = Echelon(tracked=True)
        nb = 0
        for b in boundaries:
            if self._ech.add(b, tag=None):
                nb += 1
        self.boundary_rank = nb
        self.representatives: list[dict] = []
        for v in cycles:
            tag = len(self.representatives)
            if self._ech.add(v, tag=tag):
                self.representatives.append(dict(v))
        self.dim = len(self.representatives)

    def reduce(self, vec: dict) -> dict:
        """Coordinates of a cycle modulo boundaries, as {index: mpq}.

        Raises ValueError if vec is not in the cycle space.
        """
        rem, combo = self._ech.reduce(vec)
        if rem:
            raise ValueError("vector not in cycle space")
        return {t: v for t, v in combo.items() if t is not None and v != 0}


def subquotient_basis(cycles: list[dict], boundaries: list[dict], ambient_dim: int) -> Subquotient:
    return Subquotient(ambient_dim, cycles, boundaries)


def complex_cohomology(dims: list[int], matrices: list[RatMatrix]):
    """Cohomology of a finite complex of Q-vector spaces.

    dims[i] is the dimension in degree i; matrices[i] maps degree i to
    degree i+1 (acting on column vectors).  Returns a list of
    Subquotient objects, one per degree.
    """
    out = []
    for i, d in enumerate(dims):
        if i < len(matrices) and matrices[i] is not None and dims[i] > 0:
            _, kernel = rank_kernel(matrices[i])
        else:
            kernel = [{j: mpq(1)} for j in range(d)]
        if i > 0 and matrices[i - 1] is not None:
            prev = matrices[i - 1]
            image = []
            for c in range(prev.cols):
                col = {r: v for (r, cc), v in prev.entries.items() if cc == c}
                if col:
                    image.append(col)
        else:
            image = []
        out.append(Subquotient(d, kernel, image))
    return out
