"""Multiplication tables, the layered filtration, and the membership decision."""

import random
from fractions import Fraction

import pytest

from crqmult.elements import AmbientElement, basis_element, element_d, in_G
from crqmult.groups import CRQGroupSpec, CriticalTypeData, IdempotentType
from crqmult.numth import PrimeSet
from crqmult.tables import (
    MultTable,
    border_scaling_check,
    build_product,
    closure_oracle,
    decide_membership,
    generator_x,
    in_M1,
    in_M2,
    random_r_fraction,
    rescale_slot0_coords,
    sample_broken_corner_table,
    sample_m2_table,
    sample_member_table,
    sample_unscaled_border_table,
    table_from_dict,
    table_to_dict,
)


def make_type(tid, primes, rank, m, s=1):
    return CriticalTypeData(IdempotentType(tid, PrimeSet.of(primes)), rank, m, s)


def two_block_spec():
    return CRQGroupSpec.of(
        [make_type("t1", [5], 2, 7, 2), make_type("t2", [2], 1, 7, 3)]
    )


def corner_table(spec, blocks):
    """Table with the given (0, 0) vectors and zeros elsewhere."""
    data = {}
    for tid, vec in blocks.items():
        rank = spec.rank_of(tid)
        mat = [[[Fraction(0)] * rank for _ in range(rank)] for _ in range(rank)]
        mat[0][0] = [Fraction(v) for v in vec]
        data[tid] = mat
    return MultTable.of(data)


def test_table_arithmetic():
    spec = two_block_spec()
    a = corner_table(spec, {"t1": [1, 2]})
    b = corner_table(spec, {"t1": [-1, 0], "t2": [3]})
    s = a + b
    assert s.matrix("t1", 2)[0][0] == (Fraction(0), Fraction(2))
    assert (a - a).is_zero
    assert (a * 3).matrix("t1", 2)[0][0] == (Fraction(3), Fraction(6))
    assert b.support == ("t1", "t2")
    assert MultTable.zero().support == ()


def test_table_shape_validation():
    with pytest.raises(ValueError):
        MultTable.of({"t1": [[[1, 2]], [[3]]]})  # ragged cube


def test_generator_x_form():
    spec = two_block_spec()
    x = generator_x(spec)
    # corner entry is m times the canonical inverse of s, on slot 0
    assert x.matrix("t1", 2)[0][0] == (Fraction(28), Fraction(0))  # inv(2) mod 7 = 4
    assert x.matrix("t2", 1)[0][0] == (Fraction(35),)  # inv(3) mod 7 wrt {2} = 5
    assert in_M1(spec, x)
    assert not in_M2(spec, x)


def test_generator_x_accepts_any_inverse_in_the_class():
    spec = two_block_spec()
    shifted = generator_x(spec, inverses={"t1": 11, "t2": 12})  # 4 + 7, 5 + 7
    assert decide_membership(spec, shifted).alpha == (1, 7)
    assert in_M2(spec, shifted - generator_x(spec))
    with pytest.raises(ValueError):
        generator_x(spec, inverses={"t1": 3, "t2": 5})  # 3 is not inverse to 2


def test_filtration_layers():
    spec = two_block_spec()
    rng = random.Random(5)
    for _ in range(20):
        t2 = sample_m2_table(spec, rng)
        assert in_M2(spec, t2)
        assert in_M1(spec, t2)
    # scaled borders without the corner congruence stay on the middle layer
    border_only = corner_table(spec, {"t1": [0, 7]})
    assert in_M1(spec, border_only)
    assert not in_M2(spec, border_only)
    loose = corner_table(spec, {"t1": [1, 0]})
    assert not in_M1(spec, loose)


def test_zero_table_is_the_trivial_multiplication():
    spec = two_block_spec()
    verdict = decide_membership(spec, MultTable.zero())
    assert verdict.member and verdict.alpha == (0, 7)
    assert closure_oracle(spec, MultTable.zero())


def test_decide_failure_codes():
    spec = two_block_spec()

    bad_entry = corner_table(spec, {"t1": [Fraction(1, 3), 0]})
    v = decide_membership(spec, bad_entry)
    assert not v.member and v.failure.code == "ENTRY_OUTSIDE_A"

    data = {"t1": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}
    v = decide_membership(spec, MultTable.of(data))
    assert not v.member and v.failure.code == "BORDER_NOT_SCALED"
    assert v.failure.type_id == "t1" and v.failure.entry == (0, 1)

    off_slot = corner_table(spec, {"t1": [0, 7]})  # second corner slot unmatched
    v = decide_membership(spec, off_slot)
    assert not v.member and v.failure.code == "CORNER_RESIDUE"

    # witnesses 1 and 3 cannot agree modulo 7
    split = corner_table(spec, {"t1": [28, 0], "t2": [7]})
    v = decide_membership(spec, split)
    assert not v.member and v.failure.code == "ALPHA_INCONSISTENT"


def test_decide_member_reconstruction():
    spec = two_block_spec()
    rng = random.Random(8)
    x = generator_x(spec)
    for _ in range(25):
        table, alpha = sample_member_table(spec, rng)
        verdict = decide_membership(spec, table)
        assert verdict.member and verdict.alpha == (alpha % 7, 7)
        assert in_M2(spec, table - x * alpha)


def test_decide_is_additive_in_the_witness():
    spec = two_block_spec()
    rng = random.Random(13)
    for _ in range(15):
        t1, a1 = sample_member_table(spec, rng)
        t2, a2 = sample_member_table(spec, rng)
        v = decide_membership(spec, t1 + t2)
        assert v.member and v.alpha == ((a1 + a2) % 7, 7)
        v = decide_membership(spec, t1 * 3)
        assert v.member and v.alpha == ((3 * a1) % 7, 7)


def test_sampled_strata_verdicts():
    spec = two_block_spec()
    rng = random.Random(21)
    for _ in range(20):
        broken = sample_broken_corner_table(spec, rng)
        assert broken is not None
        assert not decide_membership(spec, broken).member
        unscaled = sample_unscaled_border_table(spec, rng)
        assert unscaled is not None
        v = decide_membership(spec, unscaled)
        assert not v.member and v.failure.code == "BORDER_NOT_SCALED"


def test_strata_need_clipped_types():
    solo = CRQGroupSpec.of([make_type("t1", [5], 2, 1)])
    rng = random.Random(2)
    assert sample_broken_corner_table(solo, rng) is None
    assert sample_unscaled_border_table(solo, rng) is None
    # with a trivial quotient every integral table is a multiplication
    verdict = decide_membership(solo, corner_table(solo, {"t1": [3, -2]}))
    assert verdict.member and verdict.alpha == (0, 1)


def test_decision_matches_closure_oracle():
    spec = two_block_spec()
    rng = random.Random(34)
    tables = []
    for _ in range(12):
        tables.append(sample_member_table(spec, rng)[0])
        tables.append(sample_m2_table(spec, rng))
        tables.append(sample_broken_corner_table(spec, rng))
        tables.append(sample_unscaled_border_table(spec, rng))
    for table in tables:
        assert decide_membership(spec, table).member == closure_oracle(spec, table)


def test_member_square_of_d_lands_in_witness_coset():
    spec = two_block_spec()
    rng = random.Random(55)
    d = element_d(spec)
    for _ in range(10):
        table, alpha = sample_member_table(spec, rng)
        product = build_product(spec, table)
        hit = in_G(spec, product(d, d))
        assert hit is not None and hit.k == alpha % 7


def test_build_product_is_bilinear():
    spec = two_block_spec()
    rng = random.Random(77)
    table, _ = sample_member_table(spec, rng)
    product = build_product(spec, table)
    g = AmbientElement.of({"t1": [Fraction(1, 5), 2], "t2": [3]})
    h = AmbientElement.of({"t1": [2, Fraction(-1, 5)], "t2": [Fraction(1, 2)]})
    k = basis_element(spec, "t1", 1)
    assert product(g + k, h) == product(g, h) + product(k, h)
    assert product(g, h + k) == product(g, h) + product(g, k)
    assert product(g * 3, h) == product(g, h) * 3
    # cross-type products vanish: support never mixes
    e1 = basis_element(spec, "t1", 0)
    e2 = basis_element(spec, "t2", 0)
    assert product(e1, e2).is_zero


def test_border_scaling_check():
    spec = two_block_spec()
    assert border_scaling_check(spec, generator_x(spec))
    assert border_scaling_check(spec, MultTable.zero())
    rng = random.Random(91)
    unscaled = sample_unscaled_border_table(spec, rng)
    assert not border_scaling_check(spec, unscaled)
    # interior entries are unconstrained
    data = {"t1": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]}
    assert border_scaling_check(spec, MultTable.of(data))


def test_rescale_round_trip():
    spec = two_block_spec()
    rng = random.Random(3)
    table, _ = sample_member_table(spec, rng)
    units = {"t1": Fraction(5), "t2": Fraction(1, 2)}
    forward = rescale_slot0_coords(spec, table, units)
    back = rescale_slot0_coords(spec, forward, units, invert=True)
    assert back == table
    with pytest.raises(ValueError):
        rescale_slot0_coords(spec, table, {"t1": Fraction(3)})  # 3 not a unit there


def test_random_r_fraction_denominators():
    rng = random.Random(44)
    for _ in range(200):
        f = random_r_fraction(rng, (2, 5))
        assert all(p in (2, 5) for p in prime_factors_of(f.denominator))


def prime_factors_of(n):
    out = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def test_table_json_round_trip():
    spec = two_block_spec()
    table = generator_x(spec)
    data = table_to_dict(table)
    assert table_from_dict(data) == table
    assert table_from_dict({"blocks": {}}) == MultTable.zero()
    with pytest.raises(ValueError):
        table_from_dict({"blocks": {"t1": [[1]]}})
    with pytest.raises(ValueError):
        table_from_dict("nonsense")
