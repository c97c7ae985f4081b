from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patoms.arith import INF, FpPolynomial, LocalInt
from patoms.blocks import BlockMatrix, em0, fn0
from patoms.bunch import BunchSpec, parse_letter, parse_word
from patoms.canon import BandDatum, Indecomposable
from patoms.errors import InadmissibleMove, LinkageBroken
from patoms.reduce import (
    ChangMatrix,
    Transformation,
    apply_transformation,
    chang_sum,
    decompose,
    decompose_chang,
    diagonalize_zp,
    enumerate_indecomposables,
    scramble,
    scramble_chang,
    sum_of,
)

B6 = BunchSpec(3, 6)
B8 = BunchSpec(3, 8)
L = parse_letter


def test_diagonalize_zp_valuations():
    d = diagonalize_zp([[9, 3], [6, 0]], 3)
    assert d.s_values == (1, 1)  # det = -18 has valuation 2
    assert diagonalize_zp([[3, 0], [0, 9]], 3).s_values == (1, 2)
    d = diagonalize_zp([[1, 2], [2, 4]], 5)
    assert d.s_values == (0, INF)
    d = diagonalize_zp([[Fraction(3, 2), 0], [0, 0]], 3)
    assert d.s_values == (1, INF)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=2, max_size=3))
def test_diagonalize_zp_transforms(rows):
    p = 3
    d = diagonalize_zp(rows, p)
    A = [[LocalInt.of(v, p) for v in r] for r in rows]
    P, Q = d.P, d.Q
    h, w = len(A), len(A[0])
    for i in range(h):
        for j in range(w):
            acc = LocalInt.of(0, p)
            for a in range(h):
                for b in range(w):
                    acc = acc + P[i][a] * A[a][b] * Q[b][j]
            expect = p ** d.s_values[i] if i == j and i < len(d.s_values) and d.s_values[i] != INF else 0
            assert acc.fraction == expect


def test_moves_respect_order_and_links():
    x = Indecomposable.from_word(parse_word("e6_0 f6*_1", B6), B6).matrix()
    big = sum_of([Indecomposable.from_word(parse_word(w, B6), B6) for w in ("e6_0 f6*_1", "e6*_1 f7_0")], B6)
    with pytest.raises(InadmissibleMove):
        apply_transformation(big, Transformation("RowAdd", L("e6_0"), np.ones((1, 1)), source=L("e6*_1")), B6)
    apply_transformation(big, Transformation("RowAdd", L("e6*_1"), np.ones((1, 1)), source=L("e6_0")), B6)
    with pytest.raises(InadmissibleMove):
        apply_transformation(x, Transformation("RowBasis", L("e6_0"), np.zeros((1, 1))), B6)
    with pytest.raises(LinkageBroken):
        apply_transformation(
            x, Transformation("ColBasis", L("f6*_1"), np.array([[1]]), partner_matrix=np.array([[2]])), B6
        )


def test_linked_basis_change_moves_both_stripes():
    m = Indecomposable.from_word(parse_word("e6*_1 f7_0", B6), B6).matrix()
    out = apply_transformation(m, Transformation("RowBasis", L("e6*_1"), np.array([[2]])), B6)
    assert out.mat.sum() % 3 == 2  # the e7_1 row was scaled too


def test_decompose_single_indecomposables():
    for x in enumerate_indecomposables(3, 6, 1, 4, 2):
        assert decompose(x.matrix(), B6) == [x]


def test_decompose_zero_matrix():
    bm = BlockMatrix(3, 6, [(L("e7_0"), 2)], [(L("f7_0"), 1)], np.zeros((2, 1), dtype=np.int64))
    out = decompose(bm, B6)
    assert [str(x) for x in out] == ["Sphere(e7_0)", "Sphere(e7_0)", "Sphere(f7_0)"]


def test_zp_block_preprocessing_n8():
    b = B8
    rows = [(em0(b), 2), (L("e8_0"), 1)]
    cols = [(fn0(b), 2), (L("f11_0"), 1)]
    mat = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]])
    zp = [[LocalInt.of(3, 3), LocalInt.of(0, 3)], [LocalInt.of(0, 3), LocalInt.of(1, 3)]]
    out = decompose(BlockMatrix(3, 8, rows, cols, mat, zp), b)
    assert [str(x) for x in out] == ["String(e8_0 - f8,1_0 ~ e11,1_0 - f11_0)"]


def test_zp_block_below_top_gives_spheres():
    b = B6
    rows = [(em0(b), 1)]
    cols = [(fn0(b), 2)]
    zp = [[LocalInt.of(0, 3), LocalInt.of(9, 3)]]
    out = decompose(BlockMatrix(3, 6, rows, cols, np.zeros((1, 2), dtype=np.int64), zp), b)
    assert sorted(str(x) for x in out) == ["Moore(f6,2_0)", "Sphere(f6,inf_0)"]


def test_enumeration_example_n8():
    items = {str(x) for x in enumerate_indecomposables(3, 8, 0, 5)}
    assert "String(e8_0 - f8,1_0 ~ e11,1_0 - f11_0)" in items


def test_enumeration_is_deterministic():
    a = enumerate_indecomposables(3, 7, 1, 5, 1)
    b = enumerate_indecomposables(3, 7, 1, 5, 1)
    assert [x.sort_key for x in a] == [x.sort_key for x in b]


@pytest.mark.parametrize("seed", range(5))
def test_scrambled_sum_with_bands(seed):
    rng = np.random.default_rng(seed)
    items = enumerate_indecomposables(3, 7, 1, 6, 2)
    bands = [x for x in items if x.variant == "Band"]
    pick = [items[i] for i in rng.choice(len(items), 3)] + [bands[i] for i in rng.choice(len(bands), 2)]
    S = scramble(sum_of(pick, BunchSpec(3, 7)), BunchSpec(3, 7), rng)
    assert decompose(S, BunchSpec(3, 7)) == sorted(pick)


def test_decompose_chang_basic():
    cm = ChangMatrix(3, [(0, 1), (1, 1)], [(0, 1), (2, 1)], np.array([[1, 1], [1, 0]]))
    out = decompose_chang(cm)
    assert all(x.variant == "Chang" for x in out)
    # pivot on the minimal row (k=0) at its maximal column (l=0); the
    # remaining entry moves to (k=1, l=2)
    assert sorted((x.k, x.l) for x in out) == [(0, 0), (1, 2)]


def test_decompose_chang_zp_part():
    cm = ChangMatrix(3, [], [], np.zeros((0, 0)), np.array([[3, 0, 0], [0, 1, 0]], dtype=object))
    out = [str(x) for x in decompose_chang(cm)]
    assert sorted(out) == ["Moore(M^8_1)", "Sphere(S^8)"]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 10 ** 6))
def test_chang_roundtrip_property(p, seed):
    rng = np.random.default_rng(seed)
    rows = [(k, int(rng.integers(0, 3))) for k in (0, 1, 2)]
    cols = [(l, int(rng.integers(0, 3))) for l in (0, 1, 3)]
    h, w = sum(s for _, s in rows), sum(s for _, s in cols)
    zp = rng.integers(-9, 10, (int(rng.integers(0, 3)), int(rng.integers(0, 3)))).astype(object)
    cm = ChangMatrix(p, rows, cols, rng.integers(0, p, (h, w)), zp)
    out = decompose_chang(cm)
    assert decompose_chang(scramble_chang(chang_sum(out, p), rng)) == out
