import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spir.codes import (
    DecodeStatus,
    GrsSpec,
    Matrix,
    encode,
    grs_generator,
    mat_mul,
    matmul_mod,
    rs_decode,
    solve_square,
    vstack,
)
from spir.errors import DimensionMismatch, DimensionTooLarge, FieldMismatch, Singular
from spir.gf import PrimeField, default_locators


def det_mod(m, q):
    """Cofactor-expansion determinant; independent of the elimination code."""
    m = [list(r) for r in m]
    if len(m) == 1:
        return m[0][0] % q
    return sum((-1) ** j * m[0][j] * det_mod([r[:j] + r[j + 1:] for r in m[1:]], q)
               for j in range(len(m))) % q


def test_grs_examples():
    g = grs_generator(GrsSpec(default_locators(PrimeField(5), 3), 2))
    assert g.tolist() == [[1, 1, 1], [1, 2, 3]]
    g = grs_generator(GrsSpec(default_locators(PrimeField(7), 4), 2, first_power=1))
    assert g.tolist() == [[1, 2, 3, 4], [1, 4, 2, 2]]


def test_grs_multipliers_equal_shifted_powers():
    f = PrimeField(11)
    loc = default_locators(f, 6)
    t = 2
    mult = tuple(pow(lam, t, 11) for lam in loc)
    assert grs_generator(GrsSpec(loc, 3, multipliers=mult)) == grs_generator(GrsSpec(loc, 3, first_power=t))


def test_grs_too_large():
    with pytest.raises(DimensionTooLarge):
        grs_generator(GrsSpec(default_locators(PrimeField(7), 3), 4))


@pytest.mark.parametrize("n,q", [(3, 5), (4, 5), (5, 7), (6, 7), (7, 11), (8, 11)])
def test_mds_every_column_subset_invertible(n, q):
    loc = default_locators(PrimeField(q), n)
    for k_dim in range(1, n + 1):
        for first_power in (0, 2):
            g = grs_generator(GrsSpec(loc, k_dim, first_power=first_power))
            for cols in itertools.combinations(range(n), k_dim):
                assert det_mod(g.data[:, cols].tolist(), q) != 0
                assert g.columns(cols).is_invertible()


@pytest.mark.parametrize("n,b,t", [(4, 1, 1), (5, 1, 2), (7, 2, 1), (6, 0, 3)])
def test_stacked_generators_equal_combined(n, b, t):
    loc = default_locators(PrimeField(11), n)
    g_u = grs_generator(GrsSpec(loc, t))
    g_e = grs_generator(GrsSpec(loc, n - 2 * b - t, first_power=t))
    assert vstack(g_u, g_e) == grs_generator(GrsSpec(loc, n - 2 * b))


def test_mat_mul_examples():
    f = PrimeField(5)
    m = Matrix(f, [[1, 2], [3, 4]])
    assert mat_mul(m, Matrix(f, [[1], [1]])).tolist() == [[3], [2]]
    assert mat_mul(Matrix.identity(f, 2), m) == m
    assert mat_mul(Matrix.zeros(f, 3, 2), m) == Matrix.zeros(f, 3, 2)
    with pytest.raises(DimensionMismatch):
        mat_mul(m, Matrix(f, [[1, 2, 3]]))
    with pytest.raises(FieldMismatch):
        mat_mul(m, Matrix(PrimeField(7), [[1], [1]]))


def test_matmul_mod_large_modulus_exact():
    q = 2147483647
    rng = np.random.default_rng(0)
    a = rng.integers(0, q, (3, 40), dtype=np.int64)
    b = rng.integers(0, q, (40, 2), dtype=np.int64)
    expected = [[sum(int(a[i, j]) * int(b[j, c]) for j in range(40)) % q for c in range(2)]
                for i in range(3)]
    assert matmul_mod(a, b, q).tolist() == expected


def test_solve_square_examples():
    f5 = PrimeField(5)
    rhs = [1, 2, 4]
    assert solve_square(Matrix.identity(f5, 3), rhs).tolist() == rhs
    two = Matrix(f5, 2 * np.eye(3, dtype=np.int64))
    assert solve_square(two, rhs).tolist() == [(3 * v) % 5 for v in rhs]
    with pytest.raises(Singular):
        solve_square(Matrix(f5, [[1, 2], [2, 4]]), [1, 1])


def test_solve_square_random_round_trip():
    f = PrimeField(7)
    rng = np.random.default_rng(3)
    solved = 0
    while solved < 50:
        m = Matrix(f, rng.integers(0, 7, (4, 4)))
        x = rng.integers(0, 7, 4)
        rhs = matmul_mod(x, m.data, 7)
        if det_mod(m.tolist(), 7) == 0:
            with pytest.raises(Singular):
                solve_square(m, rhs)
            continue
        assert solve_square(m, rhs).tolist() == x.tolist()
        solved += 1


def test_rs_decode_no_errors():
    spec = GrsSpec(default_locators(PrimeField(7), 4), 4)
    msg = [3, 1, 4, 1]
    out = rs_decode(encode(msg, spec), spec, 0)
    assert out.status is DecodeStatus.RECOVERED
    assert out.message.tolist() == msg
    assert out.error_positions == frozenset()


def test_rs_decode_exhaustive_single_errors_n4_q7():
    # every message x every position x every nonzero error value
    spec = GrsSpec(default_locators(PrimeField(7), 4), 2)
    for msg in itertools.product(range(7), repeat=2):
        cw = encode(msg, spec)
        for pos in range(4):
            for err in range(1, 7):
                r = cw.copy()
                r[pos] = (r[pos] + err) % 7
                out = rs_decode(r, spec, 1)
                assert out.ok and out.message.tolist() == list(msg)
                assert out.error_positions == {pos}


@pytest.mark.parametrize("n,q,b", [(3, 5, 1), (4, 5, 1), (5, 7, 1), (5, 7, 2), (4, 7, 0)])
def test_rs_decode_exhaustive_small(n, q, b):
    """All messages, all error patterns of weight <= b (exhaustive, N <= 5)."""
    k = n - 2 * b
    spec = GrsSpec(default_locators(PrimeField(q), n), k, multipliers=tuple(range(n, 0, -1)))
    patterns = [(pos, vals) for w in range(b + 1) for pos in itertools.combinations(range(n), w)
                for vals in itertools.product(range(1, q), repeat=w)]
    for msg in itertools.product(range(q), repeat=k):
        cw = encode(msg, spec)
        for pos, vals in patterns:
            r = cw.copy()
            for p_, v in zip(pos, vals):
                r[p_] = (r[p_] + v) % q
            out = rs_decode(r, spec, b)
            assert out.ok and out.message.tolist() == list(msg) and out.error_positions == set(pos)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_rs_decode_random_larger(data):
    n = data.draw(st.integers(3, 10))
    b = data.draw(st.integers(0, min(3, (n - 1) // 2)))
    q = data.draw(st.sampled_from([11, 13, 101]))
    k = n - 2 * b
    loc = default_locators(PrimeField(q), n)
    first_power = data.draw(st.integers(0, 3))
    spec = GrsSpec(loc, k, first_power=first_power)
    msg = data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k))
    cw = encode(msg, spec)
    pos = data.draw(st.lists(st.integers(0, n - 1), max_size=b, unique=True))
    r = cw.copy()
    for p_ in pos:
        r[p_] = (r[p_] + data.draw(st.integers(1, q - 1))) % q
    out = rs_decode(r, spec, b)
    assert out.ok and out.message.tolist() == msg and out.error_positions == set(pos)


def test_rs_decode_beyond_radius_never_claims_far_codeword():
    """Two errors with B = 1: a RECOVERED result must still be within distance 1."""
    q = 7
    spec = GrsSpec(default_locators(PrimeField(q), 4), 2)
    seen_unrecoverable = False
    for msg in itertools.product(range(q), repeat=2):
        cw = encode(msg, spec)
        for pos in itertools.combinations(range(4), 2):
            r = cw.copy()
            for p_ in pos:
                r[p_] = (r[p_] + 1) % q
            out = rs_decode(r, spec, 1)
            if out.ok:
                assert np.count_nonzero(encode(out.message, spec) != r) <= 1
            else:
                seen_unrecoverable = True
    assert seen_unrecoverable


def test_rs_decode_rejects_bad_radius():
    spec = GrsSpec(default_locators(PrimeField(7), 4), 3)
    with pytest.raises(DimensionTooLarge):
        rs_decode([0, 0, 0, 0], spec, 1)
    with pytest.raises(DimensionMismatch):
        rs_decode([0, 0, 0], spec, 0)
