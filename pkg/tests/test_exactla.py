"""Tests for the exact linear algebra kernel."""

import itertools
import random

from gmpy2 import mpq

import pytest

from derham.exactla import (
    Echelon,
    RatMatrix,
    complex_cohomology,
    rank,
    rank_kernel,
    subquotient_basis,
)


def dense(m, rows, cols):
    return RatMatrix(rows, cols, {(r, c): v for r, row in enumerate(m) for c, v in enumerate(row)})


def minor_rank(m: RatMatrix) -> int:
    """Rank via minor expansion; oracle for matrices up to 4x4."""

    def det(rows, cols):
        if len(rows) == 1:
            return m.entries.get((rows[0], cols[0]), mpq(0))
        total = mpq(0)
        r0 = rows[0]
        for j, c in enumerate(cols):
            a = m.entries.get((r0, c), mpq(0))
            if a == 0:
                continue
            sub = det(rows[1:], cols[:j] + cols[j + 1 :])
            total += (-1) ** j * a * sub
        return total

    best = 0
    for k in range(1, min(m.rows, m.cols) + 1):
        found = False
        for rows in itertools.combinations(range(m.rows), k):
            for cols in itertools.combinations(range(m.cols), k):
                if det(list(rows), list(cols)) != 0:
                    found = True
                    break
            if found:
                break
        if found:
            best = k
    return best


def test_identity_full_rank():
    m = dense([[1, 0], [0, 1]], 2, 2)
    r, ker = rank_kernel(m)
    assert r == 2
    assert ker == []


def test_zero_matrix():
    m = RatMatrix(2, 3)
    r, ker = rank_kernel(m)
    assert r == 0
    assert len(ker) == 3


def test_proportional_rows():
    m = dense([[1, 2], [2, 4]], 2, 2)
    r, ker = rank_kernel(m)
    assert r == 1
    assert len(ker) == 1
    v = ker[0]
    # kernel spanned by (2, -1)
    assert v[0] * (-1) == v[1] * 2
    assert m.apply(v) == {}


def test_rank_transpose_invariant():
    rng = random.Random(7)
    for _ in range(25):
        rows = rng.randrange(1, 5)
        cols = rng.randrange(1, 5)
        m = RatMatrix(
            rows,
            cols,
            {
                (r, c): rng.randrange(-3, 4)
                for r in range(rows)
                for c in range(cols)
            },
        )
        assert rank(m) == rank(m.transpose())


def test_rank_matches_minor_expansion():
    rng = random.Random(11)
    for _ in range(20):
        rows = rng.randrange(1, 5)
        cols = rng.randrange(1, 5)
        m = RatMatrix(
            rows,
            cols,
            {
                (r, c): rng.randrange(-2, 3)
                for r in range(rows)
                for c in range(cols)
            },
        )
        assert rank(m) == minor_rank(m)


def test_kernel_vectors_map_to_zero_and_count():
    rng = random.Random(3)
    for _ in range(15):
        rows = rng.randrange(1, 6)
        cols = rng.randrange(1, 6)
        m = RatMatrix(
            rows,
            cols,
            {
                (r, c): rng.randrange(-3, 4)
                for r in range(rows)
                for c in range(cols)
            },
        )
        r, ker = rank_kernel(m)
        assert r + len(ker) == cols
        for v in ker:
            assert m.apply(v) == {}
        # independence
        e = Echelon()
        for v in ker:
            assert e.add(v)


def test_subquotient_basic():
    e1 = {0: mpq(1)}
    e2 = {1: mpq(1)}
    sq = subquotient_basis([e1, e2], [e1], 2)
    assert sq.dim == 1
    assert sq.representatives == [e2]
    assert sq.reduce(e2) == {0: mpq(1)}
    assert sq.reduce(e1) == {}


def test_subquotient_cycles_equal_boundaries():
    e1 = {0: mpq(1)}
    sq = subquotient_basis([e1], [e1], 1)
    assert sq.dim == 0


def test_subquotient_rejects_nonboundary():
    e1 = {0: mpq(1)}
    e2 = {1: mpq(1)}
    with pytest.raises(ValueError):
        subquotient_basis([e1], [e2], 2)


def test_subquotient_reduce_is_unit_on_representatives():
    rng = random.Random(5)
    for _ in range(10):
        amb = rng.randrange(2, 6)
        cycles = [
            {c: mpq(rng.randrange(-2, 3)) for c in range(amb)}
            for _ in range(rng.randrange(1, 5))
        ]
        cycles = [{c: v for c, v in vec.items() if v != 0} for vec in cycles]
        bnd = []
        if cycles:
            bnd = [cycles[0]]
        sq = subquotient_basis(cycles, bnd, amb)
        for i, rep in enumerate(sq.representatives):
            assert sq.reduce(rep) == {i: mpq(1)}


def test_complex_cohomology_two_step():
    # 0 -> Q^2 -> Q -> 0 with map (a,b) -> a+b: H^0 = 1, H^1 = 0
    m = dense([[1, 1]], 1, 2)
    sq = complex_cohomology([2, 1], [m])
    assert [s.dim for s in sq] == [1, 0]
