"""Structure of the group of all multiplications, and basis-change checks.

The multiplications on a group of this class again form a group of the same
class: same critical types, same invariants, ranks cubed, and coefficients
replaced by canonical inverses supported away from the infinite primes.  This
module materializes that description, iterates it symbolically, verifies the
coset relation between two presentations of the same group, and runs the
two-basis intersection construction for rank-(1, 1) pairs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .elements import AmbientElement, check_element_shape
from .groups import (
    CRQGroupSpec,
    CriticalTypeData,
    IdempotentType,
    MainDecomposition,
    ensure_valid,
    main_decomposition,
    validate_spec,
)
from .numth import (
    PrimeSet,
    gcd,
    has_factor_in,
    is_prime,
    mod_inverse,
    p0_inverse,
    prime_factors,
)
from .tables import (
    MultTable,
    decide_membership,
    generator_x,
    in_M2,
    closure_oracle,
    rescale_slot0_coords,
    sample_broken_corner_table,
    sample_m2_table,
    sample_member_table,
    sample_unscaled_border_table,
)

__all__ = [
    "RegulatorBlock",
    "MultGroupDescriptor",
    "RankLimitError",
    "compute_mult_group",
    "iterate_mult",
    "CosetRelation",
    "CosetReport",
    "coset_relation",
    "CrossBasisCase",
    "CrossBasisReport",
    "cross_basis_example",
]


class RankLimitError(RuntimeError):
    """Raised when iterated ranks exceed the configured bound."""


@dataclass(frozen=True)
class RegulatorBlock:
    """Shape of one regulator block of the multiplication group.

    The block consists of all square matrices over one type's regulator
    block whose borders are m-scaled and whose corner is m^2-scaled.
    """

    type_id: str
    rank: int
    corner_scale: int
    border_scale: int


@dataclass(frozen=True)
class MultGroupDescriptor:
    """Symbolic structure of the group of multiplications.

    `spec` describes it as a group of the same class; `basis` holds, per
    clipped type, the corner table generating the clipped summand, and
    `generator` is the distinguished coset generator in its standard form.
    Both are omitted for deep iterates, whose ranks are kept symbolic.
    """

    spec: CRQGroupSpec
    regulator: tuple[RegulatorBlock, ...]
    decomposition: MainDecomposition
    basis: Optional[tuple[tuple[str, MultTable], ...]]
    generator: Optional[MultTable]
    depth: int = 1

    def basis_table(self, tid: str) -> MultTable:
        if self.basis is None:
            raise ValueError("basis tables are not materialized at this depth")
        for t, table in self.basis:
            if t == tid:
                return table
        raise ValueError(f"no basis table for type {tid!r}")


def _iterated_coefficient(d: CriticalTypeData, power: int) -> int:
    # the canonical inverse depends only on the residue class, so the
    # sequence s, s', s'', ... alternates with period 2 after the first step
    if d.m == 1 or power == 0:
        return d.s
    first = p0_inverse(d.s, d.m, d.inf_primes)
    if power % 2 == 1:
        return first
    return p0_inverse(first, d.m, d.inf_primes)


def _rank_power(rank: int, exponent: int, max_rank: int) -> Optional[int]:
    """rank ** exponent when it does not exceed max_rank, else None."""
    if rank == 1:
        return 1
    if exponent * (rank.bit_length() - 1) > max_rank.bit_length():
        return None
    value = rank**exponent
    return value if value <= max_rank else None


def _mult_spec(spec: CRQGroupSpec, power: int) -> CRQGroupSpec:
    entries = []
    for d in spec.types:
        entries.append(
            CriticalTypeData(
                d.type, d.rank ** (3**power), d.m, _iterated_coefficient(d, power)
            )
        )
    return CRQGroupSpec.of(entries)


def compute_mult_group(spec: CRQGroupSpec) -> MultGroupDescriptor:
    """Full structure of the group of multiplications of a valid spec.

    Per type the rank is cubed and the coefficient becomes the smallest
    positive inverse of s modulo m with no factor among the infinite primes.
    The clipped basis element of each type is the corner table carrying m^2,
    and the coset generator scales those by the new coefficients over m.
    """
    ensure_valid(spec)
    new_spec = _mult_spec(spec, 1)
    regulator = tuple(
        RegulatorBlock(d.id, d.rank ** 3, d.m * d.m, d.m) for d in spec.types
    )
    basis = []
    inverses = {}
    for d in spec.types:
        if d.m == 1:
            continue
        mat = [[[Fraction(0)] * d.rank for _ in range(d.rank)] for _ in range(d.rank)]
        mat[0][0][0] = Fraction(d.m * d.m)
        basis.append((d.id, MultTable.of({d.id: mat})))
        inverses[d.id] = new_spec.data_for(d.id).s
    generator = generator_x(spec, inverses)
    return MultGroupDescriptor(
        spec=new_spec,
        regulator=regulator,
        decomposition=main_decomposition(new_spec),
        basis=tuple(basis),
        generator=generator,
        depth=1,
    )


def iterate_mult(
    spec: CRQGroupSpec, k: int, *, max_rank: int = 10**18
) -> MultGroupDescriptor:
    """Structure after k applications, with ranks computed symbolically.

    Only the first application materializes basis tables; deeper iterates
    report ranks, invariants and coefficients without building matrices.
    """
    if k < 1:
        raise ValueError(f"iteration depth must be at least 1, got {k}")
    ensure_valid(spec)
    exponent = 3**k
    for d in spec.types:
        if _rank_power(d.rank, exponent, max_rank) is None:
            raise RankLimitError(
                f"rank {d.rank}^(3^{k}) at type {d.id!r} exceeds the bound {max_rank}"
            )
    if k == 1:
        return compute_mult_group(spec)
    new_spec = _mult_spec(spec, k)
    regulator = tuple(
        RegulatorBlock(d.id, d.rank**exponent, d.m * d.m, d.m) for d in spec.types
    )
    return MultGroupDescriptor(
        spec=new_spec,
        regulator=regulator,
        decomposition=main_decomposition(new_spec),
        basis=None,
        generator=None,
        depth=k,
    )


@dataclass(frozen=True)
class CosetRelation:
    """Witness that two presentations generate the same membership coset."""

    gamma: int
    gamma_inverse: int
    witness: MultTable


@dataclass(frozen=True)
class CosetReport:
    """Outcome of comparing the presentations by d and by gamma*d + b."""

    applicable: bool
    reason: Optional[str] = None
    s_prime: Optional[tuple[tuple[str, int], ...]] = None
    relation: Optional[CosetRelation] = None
    witness_doubly_scaled: Optional[bool] = None
    samples_checked: int = 0
    verdicts_agree: Optional[bool] = None


def _strata_sample(spec: CRQGroupSpec, rng: random.Random) -> list[MultTable]:
    tables = [sample_m2_table(spec, rng)]
    member, _ = sample_member_table(spec, rng)
    tables.append(member)
    broken = sample_broken_corner_table(spec, rng)
    if broken is not None:
        tables.append(broken)
    unscaled = sample_unscaled_border_table(spec, rng)
    if unscaled is not None:
        tables.append(unscaled)
    return tables


def coset_relation(
    spec: CRQGroupSpec,
    gamma: int,
    b: AmbientElement,
    *,
    samples: int = 20,
    seed: int = 0,
) -> CosetReport:
    """Compare the membership structure under d and under gamma*d + b.

    Requires gamma coprime to the regulator index and b supported on the
    clipped slots.  When the shifted generator again has a standard
    representation over the same basis, the two corner generators differ by
    the inverse of gamma up to doubly scaled tables, and membership verdicts
    agree on sampled tables; otherwise the pair is reported not applicable.
    """
    ensure_valid(spec)
    check_element_shape(spec, b)
    if gcd(gamma, spec.n) != 1:
        raise ValueError(f"gamma = {gamma} is not coprime to the regulator index {spec.n}")
    t0 = set(spec.t0_ids)
    for tid, vec in b.blocks:
        if tid not in t0:
            raise ValueError(f"shift element touches unclipped type {tid!r}")
        if any(vec[1:]):
            raise ValueError(f"shift element touches a non-clipped slot of type {tid!r}")

    s_prime: dict[str, int] = {}
    for tid in spec.t0_ids:
        d = spec.data_for(tid)
        coeff = d.m * (b.block(tid)[0] if b.block(tid) else Fraction(0))
        shifted = gamma * d.s + coeff
        if shifted.denominator != 1:
            return CosetReport(
                applicable=False,
                reason=f"slot numerator {shifted} at type {tid!r} is not an integer",
            )
        value = int(shifted)
        if has_factor_in(value, d.inf_primes):
            return CosetReport(
                applicable=False,
                reason=(
                    f"slot numerator {value} at type {tid!r} has a factor among "
                    "the infinite primes"
                ),
            )
        s_prime[tid] = value

    shifted_spec = spec.with_coefficients(s_prime)
    x_shifted = generator_x(shifted_spec)
    x_original = generator_x(spec)
    gamma_inv = mod_inverse(gamma, spec.n)
    witness = x_shifted - gamma_inv * x_original
    relation = CosetRelation(gamma, gamma_inv, witness)
    witness_ok = in_M2(spec, witness)

    rng = random.Random(seed)
    agree = True
    checked = 0
    while checked < samples:
        for table in _strata_sample(spec, rng):
            original = decide_membership(spec, table)
            shifted = decide_membership(shifted_spec, table)
            if original.member != shifted.member:
                agree = False
            elif original.member:
                alpha = original.alpha[0]
                alpha_shifted = shifted.alpha[0]
                if (alpha_shifted - gamma * alpha) % spec.n != 0:
                    agree = False
            checked += 1
    return CosetReport(
        applicable=True,
        s_prime=tuple(sorted(s_prime.items())),
        relation=relation,
        witness_doubly_scaled=witness_ok,
        samples_checked=checked,
        verdicts_agree=agree,
    )


@dataclass(frozen=True)
class CrossBasisCase:
    """One tested witness value in the two-basis intersection construction."""

    alpha: int
    member_first: bool
    rejected_second: bool
    member_second: bool
    rejected_first: bool
    oracles_consistent: bool

    @property
    def ok(self) -> bool:
        return (
            self.member_first
            and self.rejected_second
            and self.member_second
            and self.rejected_first
            and self.oracles_consistent
        )


@dataclass(frozen=True)
class CrossBasisReport:
    """Result of intersecting the membership sets of two bases of one group."""

    s1: int
    s2: int
    m: int
    inf_primes_1: tuple[int, ...]
    inf_primes_2: tuple[int, ...]
    cases: tuple[CrossBasisCase, ...]
    doubly_scaled_member_both: bool

    @property
    def intersection_is_regulator(self) -> bool:
        return self.doubly_scaled_member_both and all(c.ok for c in self.cases)


def _fresh_primes(count: int, excluded: set[int]) -> list[int]:
    out: list[int] = []
    candidate = 2
    while len(out) < count:
        if is_prime(candidate) and candidate not in excluded:
            out.append(candidate)
            excluded.add(candidate)
        candidate += 1
    return out


def cross_basis_example(
    s1: int, s2: int, m: int, *, seed: int = 0, samples_per_case: int = 2
) -> CrossBasisReport:
    """Two rank-1 types sharing a prime invariant, probed through two bases.

    Requires s1, s2 > 1 coprime, m prime dividing neither s1, s2 nor
    s1^2 - s2^2.  The infinite primes of each type are the prime factors of
    s_i + m (plus a fresh distinguishing prime when the factor sets nest), so
    the vectors (s_i + m) e_i form a second basis of the regulator.  Every
    non-regulator member with respect to either basis is rejected with
    respect to the other, while doubly scaled tables pass both; the two
    membership sets therefore intersect exactly in the regulator
    multiplications.
    """
    if s1 <= 1 or s2 <= 1:
        raise ValueError("s1 and s2 must both exceed 1")
    if gcd(s1, s2) != 1:
        raise ValueError(f"s1 and s2 must be coprime, gcd is {gcd(s1, s2)}")
    if not is_prime(m):
        raise ValueError(f"m = {m} must be prime")
    if s1 % m == 0 or s2 % m == 0:
        raise ValueError(f"m = {m} must not divide s1 or s2")
    if (s1 * s1 - s2 * s2) % m == 0:
        raise ValueError(f"m = {m} must not divide s1^2 - s2^2")

    inf1 = set(prime_factors(s1 + m))
    inf2 = set(prime_factors(s2 + m))
    used = set(inf1) | set(inf2) | set(prime_factors(m * s1 * s2))
    if inf1 <= inf2:
        inf1.add(_fresh_primes(1, used)[0])
    if inf2 <= inf1:
        inf2.add(_fresh_primes(1, used)[0])

    first = CriticalTypeData(IdempotentType("t1", PrimeSet.of(inf1)), 1, m, s1)
    second = CriticalTypeData(IdempotentType("t2", PrimeSet.of(inf2)), 1, m, s2)
    spec_first = CRQGroupSpec.of([first, second])
    violations = validate_spec(spec_first)
    if violations:
        raise ValueError("construction produced an invalid spec: " + str(violations[0]))
    spec_second = spec_first.with_coefficients({"t1": 1, "t2": 1})
    units = {"t1": Fraction(s1 + m), "t2": Fraction(s2 + m)}

    rng = random.Random(seed)
    cases = []
    for alpha in range(1, m):
        outcomes = []
        for trial in range(samples_per_case):
            noise = (
                MultTable.zero() if trial == 0 else sample_m2_table(spec_first, rng)
            )
            table_first = alpha * generator_x(spec_first) + noise
            v_first = decide_membership(spec_first, table_first)
            table_as_second = rescale_slot0_coords(spec_first, table_first, units)
            v_cross = decide_membership(spec_second, table_as_second)

            noise_second = (
                MultTable.zero() if trial == 0 else sample_m2_table(spec_second, rng)
            )
            table_second = alpha * generator_x(spec_second) + noise_second
            v_second = decide_membership(spec_second, table_second)
            table_as_first = rescale_slot0_coords(
                spec_first, table_second, units, invert=True
            )
            v_back = decide_membership(spec_first, table_as_first)

            oracles = (
                closure_oracle(spec_first, table_first) == v_first.member
                and closure_oracle(spec_second, table_as_second) == v_cross.member
                and closure_oracle(spec_second, table_second) == v_second.member
                and closure_oracle(spec_first, table_as_first) == v_back.member
            )
            outcomes.append(
                CrossBasisCase(
                    alpha=alpha,
                    member_first=v_first.member and v_first.alpha[0] == alpha % m,
                    rejected_second=not v_cross.member,
                    member_second=v_second.member and v_second.alpha[0] == alpha % m,
                    rejected_first=not v_back.member,
                    oracles_consistent=oracles,
                )
            )
        merged = CrossBasisCase(
            alpha=alpha,
            member_first=all(o.member_first for o in outcomes),
            rejected_second=all(o.rejected_second for o in outcomes),
            member_second=all(o.member_second for o in outcomes),
            rejected_first=all(o.rejected_first for o in outcomes),
            oracles_consistent=all(o.oracles_consistent for o in outcomes),
        )
        cases.append(merged)

    regulator_table = sample_m2_table(spec_first, rng)
    v_reg_first = decide_membership(spec_first, regulator_table)
    reg_as_second = rescale_slot0_coords(spec_first, regulator_table, units)
    v_reg_second = decide_membership(spec_second, reg_as_second)
    doubly_ok = (
        v_reg_first.member
        and v_reg_first.alpha[0] == 0
        and v_reg_second.member
        and v_reg_second.alpha[0] == 0
    )

    return CrossBasisReport(
        s1=s1,
        s2=s2,
        m=m,
        inf_primes_1=tuple(sorted(inf1)),
        inf_primes_2=tuple(sorted(inf2)),
        cases=tuple(cases),
        doubly_scaled_member_both=doubly_ok,
    )
