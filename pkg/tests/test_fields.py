"""Extension-field tower: axioms, Frobenius maps, square roots."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from quadfe.group import fields as F
from quadfe.group.curve import R

fp = st.integers(min_value=0, max_value=int(F.P) - 1)
fp2 = st.tuples(fp, fp)
fp6 = st.tuples(fp2, fp2, fp2)
fp12 = st.tuples(fp6, fp6)

FAST = settings(max_examples=15, deadline=None)


@FAST
@given(fp2, fp2, fp2)
def test_fp2_ring_axioms(a, b, c):
    assert F.f2_mul(a, b) == F.f2_mul(b, a)
    assert F.f2_mul(a, F.f2_mul(b, c)) == F.f2_mul(F.f2_mul(a, b), c)
    assert F.f2_mul(a, F.f2_add(b, c)) == F.f2_add(F.f2_mul(a, b), F.f2_mul(a, c))
    assert F.f2_sqr(a) == F.f2_mul(a, a)


@FAST
@given(fp2)
def test_fp2_inverse_and_sqrt(a):
    if a != F.F2_ZERO:
        assert F.f2_mul(a, F.f2_inv(a)) == F.F2_ONE
    sq = F.f2_sqr(a)
    root = F.f2_sqrt(sq)
    assert root in (tuple(x % F.P for x in a), F.f2_neg(a))


@FAST
@given(fp6, fp6)
def test_fp6_mul_sqr_inv(a, b):
    assert F.f6_mul(a, b) == F.f6_mul(b, a)
    assert F.f6_sqr(a) == F.f6_mul(a, a)
    if a != F.F6_ZERO:
        assert F.f6_mul(a, F.f6_inv(a)) == F.F6_ONE


@FAST
@given(fp12, fp12)
def test_fp12_mul_sqr_inv(a, b):
    assert F.f12_mul(a, b) == F.f12_mul(b, a)
    assert F.f12_sqr(a) == F.f12_mul(a, a)
    if a != F.F12_ZERO:
        assert F.f12_mul(a, F.f12_inv(a)) == F.F12_ONE


@FAST
@given(fp12)
def test_frobenius_matches_pow_oracle(a):
    assert F.f12_frobenius(a) == F.f12_pow(a, F.P)
    assert F.f12_frobenius_p2(a) == F.f12_pow(a, F.P * F.P)
    assert F.f12_conj(a) == F.f12_pow(a, F.P ** 6)


@FAST
@given(fp12, fp2, fp2, fp)
def test_sparse_line_multiplication(f, a2, b2, c):
    line = ((a2, b2, F.F2_ZERO), (F.F2_ZERO, (c, 0), F.F2_ZERO))
    assert F.f12_sparse_mul(f, a2, b2, c) == F.f12_mul(f, line)


def test_cyclotomic_square_on_cyclotomic_elements():
    rnd = random.Random(9)
    for _ in range(5):
        raw = (
            tuple(tuple((rnd.randrange(F.P), rnd.randrange(F.P))) for _ in range(3)),
            tuple(tuple((rnd.randrange(F.P), rnd.randrange(F.P))) for _ in range(3)),
        )
        # Project into the cyclotomic subgroup via the easy exponent.
        m = F.f12_pow(raw, (F.P ** 6 - 1) * (F.P ** 2 + 1))
        assert F.f12_cyclotomic_sqr(m) == F.f12_sqr(m)


def test_batch_inversion_matches_single():
    rnd = random.Random(10)
    elems = [(rnd.randrange(1, F.P), rnd.randrange(F.P)) for _ in range(9)]
    assert F.f2_batch_inv(elems) == [F.f2_inv(e) for e in elems]


def test_fp_sqrt_rejects_non_residue():
    # -1 is a non-residue (P = 3 mod 4).
    with pytest.raises(ValueError):
        F.fp_sqrt(F.P - 1)


def test_modulus_and_order_are_prime_sized():
    assert int(F.P).bit_length() == 381
    assert int(R).bit_length() == 255
    assert (F.P ** 12 - 1) % R == 0
