import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spir.codes import DecodeStatus, matmul_mod
from spir.errors import BadIndex, DimensionMismatch, InvalidParams, NotPrime
from spir.schemes import (
    AnswerVector,
    CommonRandomness,
    Database,
    SchemeKind,
    SchemeParams,
    achieved_rate,
    answer_all,
    answer_gen,
    answers_batch,
    capacity,
    decode,
    decode_bspir,
    decode_espir,
    honest_round,
    query_gen,
    query_gen_bspir,
    query_gen_espir,
    secrecy_rate,
    validity_violation,
)

TB, TE, TBE = SchemeKind.TBSPIR, SchemeKind.TESPIR, SchemeKind.TBESPIR


def valid_box(n_max, q_max, k=2):
    """Every valid (kind, N, T, B, E, q) with q prime, N+1 <= q <= q_max."""
    for kind in SchemeKind:
        for n in range(2, n_max + 1):
            for q in (p for p in (3, 5, 7, 11, 13) if n + 1 <= p <= q_max):
                for t in range(1, n):
                    for b in range(0, n):
                        for e in range(0, n):
                            if validity_violation(kind, n, k, t, b, e, q) is None:
                                yield SchemeParams.create(kind, n, k, t, b, e, q)


# --- parameters ------------------------------------------------------------


def test_derived_sizes():
    p = SchemeParams.create(TB, 5, 2, 1, 1)
    assert (p.q, p.randomness_count, p.file_length, p.db_length) == (7, 1, 2, 4)
    p = SchemeParams.create(TE, 4, 2, 2, 0, 1)
    assert (p.randomness_count, p.file_length) == (2, 2)
    p = SchemeParams.create(TBE, 7, 2, 1, 1, 2)
    assert (p.randomness_count, p.file_length) == (2, 3)


@pytest.mark.parametrize("args,msg", [
    ((TB, 3, 2, 1, 1), "N > 2B+T"),
    ((TB, 4, 1, 1, 0), "K >= 2"),
    ((TB, 4, 2, 1, 0, 1), "E = 0"),
    ((TE, 4, 2, 1, 1, 1), "B = 0"),
    ((TE, 3, 2, 3, 0, 1), "N > max(T,E)"),
    ((TBE, 5, 2, 1, 1, 3), "N > 2B+max(T,E)"),
    ((TB, 4, 2, 0, 0), "T >= 1"),
])
def test_invalid_params_name_the_inequality(args, msg):
    with pytest.raises(InvalidParams, match=msg.replace("(", r"\(").replace(")", r"\)").replace("+", r"\+")):
        SchemeParams.create(*args)


def test_field_too_small_rejected():
    with pytest.raises(InvalidParams, match="q >= N"):
        SchemeParams.create(TB, 5, 2, 1, 1, q=5)
    with pytest.raises(NotPrime):
        SchemeParams.create(TB, 5, 2, 1, 1, q=9)


def test_bad_file_index():
    p = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    for k in (0, 3):
        with pytest.raises(BadIndex):
            query_gen(p, k, np.random.default_rng(0))


# --- queries ---------------------------------------------------------------


def test_bspir_zero_randomness_example():
    p = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    qs = query_gen_bspir(p, 1, u=np.zeros((2, 1)))
    # rows: file-1 symbol, file-2 symbol; columns: nodes
    assert qs.vectors.tolist() == [[1, 2, 3, 4], [0, 0, 0, 0]]


def test_bspir_zero_randomness_general():
    p = SchemeParams.create(TBE, 7, 2, 1, 1, 2, q=11)
    m, l = p.randomness_count, p.file_length
    qs = query_gen_bspir(p, 2, u=np.zeros((p.db_length, m)))
    assert not qs.vectors[:l].any()
    for n in range(1, 8):
        assert qs.node(n)[l:].tolist() == [pow(n, m + i, 11) for i in range(l)]


def test_espir_zero_randomness_example():
    p = SchemeParams.create(TE, 3, 2, 1, 0, 1, q=5)
    qs = query_gen_espir(p, 2, u=np.zeros((4, 1)))
    assert qs.node(1).tolist() == [0, 0, 0, 0]
    assert qs.node(2).tolist() == [0, 0, 1, 0]
    assert qs.node(3).tolist() == [0, 0, 0, 1]


def test_query_gen_kind_guard():
    te = SchemeParams.create(TE, 3, 2, 1, 0, 1, q=5)
    tb = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    with pytest.raises(ValueError):
        query_gen_bspir(te, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        query_gen_espir(tb, 1, np.random.default_rng(0))


def test_query_reconstruction_from_u():
    rng = np.random.default_rng(5)
    for p in [SchemeParams.create(TB, 6, 2, 2, 1), SchemeParams.create(TE, 5, 3, 2, 0, 3),
              SchemeParams.create(TBE, 7, 2, 1, 1, 2)]:
        qs = query_gen(p, 2, rng)
        g_u = p.mask_generator.data
        e = np.zeros((p.db_length, p.file_length), dtype=np.int64)
        e[p.file_length + np.arange(p.file_length), np.arange(p.file_length)] = 1
        if p.kind is TE:
            offset = np.hstack([np.zeros((p.db_length, p.randomness_count), dtype=np.int64), e])
        else:
            offset = matmul_mod(e, p.file_generator.data, p.q)
        assert np.array_equal(qs.vectors, (matmul_mod(qs.u, g_u, p.q) + offset) % p.q)
        assert qs == query_gen(p, 2, u=qs.u)


def test_query_determinism():
    p = SchemeParams.create(TBE, 6, 2, 2, 1, 1)
    a = query_gen(p, 1, np.random.default_rng(42))
    b = query_gen(p, 1, np.random.default_rng(42))
    assert a == b


def test_single_query_marginal_uniform():
    """Every single node's query is uniform over F_q^(KL), enumerating all U."""
    for p in [SchemeParams.create(TE, 3, 2, 1, 0, 1, q=5), SchemeParams.create(TB, 2, 2, 1, 0, q=3),
              SchemeParams.create(TE, 2, 2, 1, 0, 1, q=3)]:
        q, kl, m = p.q, p.db_length, p.randomness_count
        for k in (1, 2):
            for n in range(1, p.n_nodes + 1):
                counts = {}
                for flat in itertools.product(range(q), repeat=kl * m):
                    v = tuple(query_gen(p, k, u=np.array(flat).reshape(kl, m)).node(n))
                    counts[v] = counts.get(v, 0) + 1
                assert len(counts) == q**kl
                assert set(counts.values()) == {q ** (kl * m - kl)}


# --- answers ---------------------------------------------------------------


def test_answer_example():
    # L = 2 with T = 1 needs N - 2B = 3; the mask is 2 * lambda_n^0
    p = SchemeParams.create(TB, 3, 2, 1, 0, q=5)
    db = Database(np.array([[3, 1], [2, 4]]))
    qs = query_gen(p, 1, u=np.zeros((4, 1)))
    s = CommonRandomness(np.array([2]))
    for n in range(1, 4):
        assert answer_gen(p, n, qs.node(n), db, s) == (n * 3 + n * n * 1 + 2) % 5


def test_answer_example_with_byzantine_margin():
    p = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    db = Database(np.array([[3], [2]]))
    qs = query_gen(p, 1, u=np.zeros((2, 1)))
    s = CommonRandomness(np.array([2]))
    for n in range(1, 5):
        assert answer_gen(p, n, qs.node(n), db, s) == (n * 3 + 2) % 5


def test_answer_trivial_cases():
    p = SchemeParams.create(TB, 5, 2, 2, 1, q=7)
    db = Database.random(p, np.random.default_rng(1))
    s = CommonRandomness(np.array([4, 6]))
    unit = np.zeros(p.db_length, dtype=np.int64)
    unit[p.file_length] = 1
    zero_s = CommonRandomness.zeros(p)
    assert answer_gen(p, 3, unit, db, zero_s) == db.file(2)[0]
    zero_db = Database(np.zeros((2, p.file_length), dtype=np.int64))
    for n in range(1, 6):
        assert answer_gen(p, n, unit, zero_db, s) == (4 + 6 * n) % 7
    with pytest.raises(DimensionMismatch):
        answer_gen(p, 1, unit[:-1], db, s)
    with pytest.raises(BadIndex):
        answer_gen(p, 6, unit, db, s)


def test_answer_all_matches_answer_gen():
    p = SchemeParams.create(TBE, 7, 3, 1, 1, 2)
    rng = np.random.default_rng(2)
    db = Database.random(p, rng)
    t = honest_round(p, 3, db, rng)
    assert [answer_gen(p, n, t.queries.node(n), db, t.randomness) for n in range(1, 8)] == t.answers.a.tolist()


# --- decoding --------------------------------------------------------------


def test_espir_decode_matrix_example():
    p = SchemeParams.create(TE, 3, 2, 1, 0, 1, q=5)
    assert p.espir_decode_matrix.tolist() == [[1, 1, 1], [0, 1, 0], [0, 0, 1]]
    assert p.espir_decode_matrix.is_invertible()


def _all_databases(p):
    return itertools.product(range(p.q), repeat=p.db_length)


def test_round_trip_exhaustive_box():
    """Every valid config with N <= 5, q <= 7, K = 2: every k decodes exactly.

    All databases when q^(KL) <= 1000, otherwise 150 random ones.
    """
    rng = np.random.default_rng(11)
    configs = list(valid_box(5, 7))
    assert len(configs) > 40
    for p in configs:
        if p.q**p.db_length <= 1000:
            dbs = np.array(list(_all_databases(p)), dtype=np.int64)
        else:
            dbs = p.field.random(rng, (150, p.db_length))
        for k in (1, 2):
            qs = query_gen(p, k, rng)
            s = CommonRandomness.random(p, rng)
            answers = answers_batch(p, qs.vectors, dbs, s.s)
            for flat, a in zip(dbs, answers):
                r = decode(p, AnswerVector(a))
                assert r.ok
                assert r.file.tolist() == Database.from_flat(p, flat).file(k).tolist()
                assert r.located_errors == frozenset()


def test_aliases_match_hidden_state():
    rng = np.random.default_rng(8)
    for p in [SchemeParams.create(TE, 5, 2, 2, 0, 3), SchemeParams.create(TBE, 7, 2, 2, 1, 1)]:
        db = Database.random(p, rng)
        t = honest_round(p, 1, db, rng)
        r = decode(p, t.answers)
        expected = (matmul_mod(db.flat, t.queries.u, p.q) + t.randomness.s) % p.q
        assert r.aliases.tolist() == expected.tolist()


def test_bspir_exhaustive_single_corruption():
    """N=4, T=1, B=1, K=2, q=5: all databases, k, nodes and corruption values."""
    p = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    rng = np.random.default_rng(0)
    for flat in _all_databases(p):
        db = Database.from_flat(p, flat)
        for k in (1, 2):
            t = honest_round(p, k, db, rng)
            for node in range(1, 5):
                for delta in range(1, 5):
                    a = t.answers.a.copy()
                    a[node - 1] = (a[node - 1] + delta) % 5
                    r = decode_bspir(p, AnswerVector(a, frozenset({node})))
                    assert r.ok and r.file.tolist() == db.file(k).tolist()
                    assert r.located_errors == {node}


def test_bspir_over_budget_never_silent_within_contract():
    p = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    rng = np.random.default_rng(1)
    db = Database.random(p, rng)
    t = honest_round(p, 1, db, rng)
    statuses = set()
    for d1, d2 in itertools.product(range(1, 5), repeat=2):
        a = t.answers.a.copy()
        a[0] = (a[0] + d1) % 5
        a[1] = (a[1] + d2) % 5
        statuses.add(decode_bspir(p, AnswerVector(a)).status)
    assert DecodeStatus.UNRECOVERABLE in statuses


def test_decode_kind_guard():
    with pytest.raises(ValueError):
        decode_espir(SchemeParams.create(TB, 4, 2, 1, 1, q=5), AnswerVector(np.zeros(4, dtype=np.int64)))
    with pytest.raises(ValueError):
        decode_bspir(SchemeParams.create(TE, 3, 2, 1, 0, 1, q=5), AnswerVector(np.zeros(3, dtype=np.int64)))


# --- rates -----------------------------------------------------------------


@pytest.mark.parametrize("args,cap", [
    ((TB, 5, 2, 1, 1), Fraction(2, 5)),
    ((TE, 4, 2, 2, 0, 1), Fraction(1, 2)),
    ((TBE, 7, 2, 1, 1, 2), Fraction(3, 7)),
])
def test_capacity_examples(args, cap):
    assert capacity(SchemeParams.create(*args)) == cap


@pytest.mark.parametrize("args,rho", [
    ((TB, 5, 2, 1, 1), Fraction(1, 2)),
    ((TE, 4, 2, 2, 0, 1), Fraction(1)),
    ((TBE, 7, 2, 2, 1, 1), Fraction(2, 3)),
])
def test_secrecy_rate_examples(args, rho):
    assert secrecy_rate(SchemeParams.create(*args)) == rho


def test_rate_and_randomness_accounting():
    rng = np.random.default_rng(3)
    for p in valid_box(6, 7):
        db = Database.random(p, rng)
        t = honest_round(p, 1, db, rng)
        assert len(t.answers) == p.n_nodes
        assert Fraction(len(decode(p, t.answers).file), len(t.answers)) == achieved_rate(p) == capacity(p)
        assert Fraction(len(t.randomness), p.file_length) == secrecy_rate(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 9), st.integers(1, 4), st.integers(0, 3), st.integers(0, 2**32))
def test_tbespir_without_eavesdropper_matches_tbspir(n, t, b, seed):
    if validity_violation(TB, n, 2, t, b, 0) is not None:
        return
    tb = SchemeParams.create(TB, n, 2, t, b)
    tbe = SchemeParams.create(TBE, n, 2, t, b, 0)
    db_tb = Database.random(tb, np.random.default_rng(seed))
    db_tbe = Database.random(tbe, np.random.default_rng(seed))
    assert db_tb == db_tbe
    r1 = honest_round(tb, 2, db_tb, np.random.default_rng(seed + 1))
    r2 = honest_round(tbe, 2, db_tbe, np.random.default_rng(seed + 1))
    assert r1.queries == r2.queries
    assert r1.answers == r2.answers
    assert r1.answers.a.tobytes() == r2.answers.a.tobytes()


def test_transcript_determinism():
    p = SchemeParams.create(TE, 5, 3, 2, 0, 3)
    db = Database.random(p, np.random.default_rng(9))
    a = honest_round(p, 3, db, np.random.default_rng(10))
    b = honest_round(p, 3, db, np.random.default_rng(10))
    assert a.queries == b.queries and a.answers == b.answers
    assert np.array_equal(a.randomness.s, b.randomness.s)


def test_answer_all_rejects_wrong_database_shape():
    p = SchemeParams.create(TB, 4, 2, 1, 1, q=5)
    qs = query_gen(p, 1, np.random.default_rng(0))
    with pytest.raises(DimensionMismatch):
        answer_all(p, qs, Database(np.zeros((3, 1), dtype=np.int64)), CommonRandomness.zeros(p))
