import numpy as np
import pytest

from cafqpsk.channels import degraded_llr
from cafqpsk.ldpc import (
    ConstructionError,
    bp_decode,
    construct_regular,
    encode,
    from_alist,
    ml_decode_degraded,
    to_alist,
)
from cafqpsk.model import ChannelParams, bipolar


def dense_h(code):
    h = np.zeros((code.m, code.n), dtype=np.uint8)
    for v, c in zip(code.edge_var, code.edge_check):
        h[c, v] ^= 1
    return h


def gf2_rank(mat):
    """Independent dense GF(2) elimination."""
    a = mat.copy().astype(np.uint8)
    rank = 0
    for col in range(a.shape[1]):
        rows = np.flatnonzero(a[rank:, col]) + rank
        if len(rows) == 0:
            continue
        a[[rank, rows[0]]] = a[[rows[0], rank]]
        others = np.flatnonzero(a[:, col])
        others = others[others != rank]
        a[others] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank


def test_construct_smallest_instance():
    code = construct_regular(6, 1, 2, seed=0)
    assert code.m == 3 and code.design_rate == 0.5
    h = dense_h(code)
    assert np.array_equal(h.sum(axis=0), np.ones(6))
    assert np.array_equal(h.sum(axis=1), np.full(3, 2))


def test_construct_regular_1200():
    code = construct_regular(1200, 3, 6, seed=1)
    assert code.m == 600 and code.design_rate == 0.5
    h = dense_h(code)
    assert np.array_equal(h.sum(axis=0), np.full(1200, 3))
    assert np.array_equal(h.sum(axis=1), np.full(600, 6))
    # girth >= 6: no two checks share more than one variable
    overlap = (h.astype(np.int32) @ h.T.astype(np.int32))
    np.fill_diagonal(overlap, 0)
    assert overlap.max() <= 1


def test_construct_single_check_ensemble():
    code = construct_regular(9, 3, 9, seed=2)
    assert code.m == 3
    h = dense_h(code)
    assert np.array_equal(h.sum(axis=1), np.full(3, 9))


def test_construct_infeasible():
    with pytest.raises(ConstructionError):
        construct_regular(10, 3, 7, seed=0)


def test_construct_deterministic():
    a = construct_regular(120, 3, 6, seed=5)
    b = construct_regular(120, 3, 6, seed=5)
    assert np.array_equal(a.edge_var, b.edge_var)


def test_encode_basics_and_linearity():
    code = construct_regular(120, 3, 6, seed=3)
    assert np.array_equal(encode(code, np.zeros(code.k, dtype=np.uint8)),
                          np.zeros(code.n, dtype=np.uint8))
    rng = np.random.default_rng(0)
    for _ in range(100):
        m1 = rng.integers(0, 2, code.k).astype(np.uint8)
        m2 = rng.integers(0, 2, code.k).astype(np.uint8)
        assert np.array_equal(encode(code, m1) ^ encode(code, m2),
                              encode(code, m1 ^ m2))
        assert code.is_codeword(encode(code, m1))
    with pytest.raises(ValueError):
        encode(code, np.zeros(code.k + 1, dtype=np.uint8))


def test_rank_deficiency_handled():
    # dv=2: every column has even weight, so rows sum to zero -> rank < m
    code = construct_regular(8, 2, 4, seed=1)
    h = dense_h(code)
    rank = gf2_rank(h)
    assert rank < code.m
    assert code.k == code.n - rank
    rng = np.random.default_rng(1)
    for _ in range(20):
        msg = rng.integers(0, 2, code.k).astype(np.uint8)
        assert code.is_codeword(encode(code, msg))


def test_rank_matches_oracle_regular():
    code = construct_regular(60, 3, 6, seed=9)
    assert code.n - code.k == gf2_rank(dense_h(code))


def test_caf_xor_linearity():
    code = construct_regular(240, 3, 6, seed=4)
    rng = np.random.default_rng(2)
    xa = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
    xb = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
    assert code.is_codeword(xa ^ xb)


def test_bp_noiseless_converges_fast():
    code = construct_regular(120, 3, 6, seed=3)
    cw = encode(code, np.random.default_rng(1).integers(0, 2, code.k).astype(np.uint8))
    llr = np.where(cw == 0, 50.0, -50.0)
    res = bp_decode(code, llr, 100)
    assert res.converged and res.iterations_used <= 1
    assert np.array_equal(res.hard_bits, cw)


def test_bp_zero_llr_contract():
    code = construct_regular(24, 3, 6, seed=3)
    res = bp_decode(code, np.zeros(code.n), 0)
    assert not res.converged
    assert res.iterations_used == 0
    assert not res.hard_bits.any()  # ties decide bit 0


def test_bp_corrects_single_flip_and_agrees_with_ml():
    code = construct_regular(12, 3, 6, seed=8)
    p = ChannelParams(1.0, 1.0, 0.6)
    cw = encode(code, np.ones(code.k, dtype=np.uint8))
    # place the codeword at its most likely degraded output and flip one symbol
    y = np.where(cw == 0, 2.0, 0.0)
    y[3] = 2.0 - y[3]
    res = bp_decode(code, degraded_llr(y, p), 50)
    ml = ml_decode_degraded(code, y, p)
    assert res.converged
    assert np.array_equal(res.hard_bits, cw)
    assert np.array_equal(ml, cw)


def test_bp_syndrome_soundness():
    code = construct_regular(120, 3, 6, seed=6)
    p = ChannelParams(1.0, 1.0, 0.75)
    rng = np.random.default_rng(7)
    seen_fail = False
    for _ in range(60):
        xa = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
        xb = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
        y = bipolar(xa) + bipolar(xb) + rng.normal(scale=p.sigma, size=code.n)
        res = bp_decode(code, degraded_llr(y, p), 30)
        assert res.converged == code.is_codeword(res.hard_bits)
        seen_fail |= not res.converged
    assert seen_fail  # the noise level must exercise both branches


def test_ml_degraded_noiseless_and_budget():
    code = construct_regular(12, 3, 6, seed=8)
    p = ChannelParams(1.0, 0.6, 0.5)
    cw = encode(code, (np.arange(code.k) % 2).astype(np.uint8))
    # most likely degraded output: mean of the positive component per symbol
    y = np.where(cw == 0, p.h_a + p.h_b, p.h_a - p.h_b)
    assert np.array_equal(ml_decode_degraded(code, y, p), cw)
    big = construct_regular(30, 3, 6, seed=8)
    with pytest.raises(ValueError):
        ml_decode_degraded(big, np.zeros(30), p)


def test_ml_two_codeword_code_agrees_with_llr_sum():
    # dv=1, dc=2 gives disjoint pair checks; compare against the analytic
    # two-hypothesis rule on the subcode {all-zero, all-one} when it exists
    code = construct_regular(12, 3, 6, seed=13)
    p = ChannelParams(1.0, 1.0, 0.8)
    rng = np.random.default_rng(3)
    ones = np.ones(code.n, dtype=np.uint8)
    has_all_ones = code.is_codeword(ones)
    for _ in range(10):
        y = rng.normal(scale=2.0, size=code.n)
        ml = ml_decode_degraded(code, y, p)
        assert code.is_codeword(ml)
        if has_all_ones:
            # restricted two-codeword rule must never beat the full ML
            from cafqpsk.channels import degraded_pdf
            s0 = degraded_pdf(0, p).logpdf(y).sum()
            s1 = degraded_pdf(1, p).logpdf(y).sum()
            full = np.where(ml == 0, degraded_pdf(0, p).logpdf(y),
                            degraded_pdf(1, p).logpdf(y)).sum()
            assert full >= max(s0, s1) - 1e-9


def test_bp_vs_ml_block_error_dominance():
    code = construct_regular(12, 3, 6, seed=8)
    p = ChannelParams(1.0, 1.0, 1.1)
    rng = np.random.default_rng(9)
    bp_errors = 0
    ml_errors = 0
    for _ in range(200):
        xa = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
        xb = encode(code, rng.integers(0, 2, code.k).astype(np.uint8))
        z = xa ^ xb
        y = bipolar(xa) + bipolar(xb) + rng.normal(scale=p.sigma, size=code.n)
        bp = bp_decode(code, degraded_llr(y, p), 50)
        ml = ml_decode_degraded(code, y, p)
        bp_errors += int(not np.array_equal(bp.hard_bits, z))
        ml_errors += int(not np.array_equal(ml, z))
    assert ml_errors <= bp_errors
    assert ml_errors > 0  # noise level chosen to exercise real errors


def test_alist_round_trip():
    code = construct_regular(48, 3, 6, seed=10)
    text = to_alist(code)
    back = from_alist(text)
    assert np.array_equal(dense_h(code), dense_h(back))
    assert back.k == code.k
    msg = np.random.default_rng(0).integers(0, 2, back.k).astype(np.uint8)
    assert back.is_codeword(encode(back, msg))
