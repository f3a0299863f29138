"""Symbolic data for reduced block-rigid groups with cyclic regulator quotient.

A group of ring type is recorded per critical type: the type itself (a finite
set of primes with infinite height), the free rank of its regulator block, the
near-isomorphism invariant m (the order of the generator's projection over the
regulator) and the coefficient s of the standard representation of that
generator.  The regulator quotient is cyclic of order n = lcm of the m values.

This module owns validation of such data, the main decomposition into the
clipped part and its complement, a seeded random generator, and the canonical
JSON form.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .numth import (
    PrimeSet,
    condition_m_check,
    gcd,
    has_factor_in,
    is_prime,
    lcm_all,
    p0_class_representative,
)

__all__ = [
    "IdempotentType",
    "CriticalTypeData",
    "CRQGroupSpec",
    "Violation",
    "validate_spec",
    "ensure_valid",
    "regulator_index",
    "MainDecomposition",
    "main_decomposition",
    "GenBounds",
    "GenerationError",
    "random_spec",
    "spec_to_dict",
    "spec_from_dict",
    "spec_to_json",
    "spec_from_json",
]


@dataclass(frozen=True)
class IdempotentType:
    """Critical type identified by its set of infinite primes.

    Two types are comparable when one prime set contains the other; a valid
    spec lists pairwise incomparable types.
    """

    id: str
    inf_primes: PrimeSet

    def comparable_with(self, other: "IdempotentType") -> bool:
        a, b = set(self.inf_primes), set(other.inf_primes)
        return a <= b or b <= a


@dataclass(frozen=True)
class CriticalTypeData:
    """Payload of one critical type: rank, invariant m, coefficient s.

    The coefficient is only meaningful when m > 1 and is normalised to 1
    otherwise.  Slot 0 of a type with m > 1 is the clipped basis slot.
    """

    type: IdempotentType
    rank: int
    m: int
    s: int = 1

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"invariant m must be positive, got {self.m}")
        if self.m == 1 and self.s != 1:
            object.__setattr__(self, "s", 1)

    @property
    def id(self) -> str:
        return self.type.id

    @property
    def inf_primes(self) -> PrimeSet:
        return self.type.inf_primes


@dataclass(frozen=True)
class CRQGroupSpec:
    """Full symbolic description of a group: one entry per critical type."""

    types: tuple[CriticalTypeData, ...]

    @classmethod
    def of(cls, types: Iterable[CriticalTypeData]) -> "CRQGroupSpec":
        """Canonical spec with entries sorted by type id."""
        return cls(tuple(sorted(types, key=lambda d: d.id)))

    @property
    def type_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.types)

    @property
    def t0_ids(self) -> tuple[str, ...]:
        """Ids of the types with m > 1 (the clipped types)."""
        return tuple(d.id for d in self.types if d.m > 1)

    @property
    def n(self) -> int:
        """Regulator index: the order of the cyclic regulator quotient."""
        return lcm_all(d.m for d in self.types)

    def data_for(self, tid: str) -> CriticalTypeData:
        for d in self.types:
            if d.id == tid:
                return d
        raise ValueError(f"unknown type id {tid!r}")

    def rank_of(self, tid: str) -> int:
        return self.data_for(tid).rank

    def with_coefficients(self, coefficients: Mapping[str, int]) -> "CRQGroupSpec":
        """Copy of the spec with the s of the listed types replaced."""
        out = []
        for d in self.types:
            if d.id in coefficients:
                out.append(CriticalTypeData(d.type, d.rank, d.m, coefficients[d.id]))
            else:
                out.append(d)
        return CRQGroupSpec.of(out)


@dataclass(frozen=True)
class Violation:
    """One validation failure with a machine-readable code."""

    code: str
    subjects: tuple[str, ...] = ()
    detail: str = ""

    def __str__(self) -> str:
        subjects = ", ".join(self.subjects)
        return f"{self.code}({subjects}): {self.detail}" if subjects else f"{self.code}: {self.detail}"


def validate_spec(spec: CRQGroupSpec) -> list[Violation]:
    """All rule violations of a candidate spec, empty when the spec is valid.

    Checks, in order: duplicate ids, positive ranks, m and s supported away
    from the infinite primes of their own type, s coprime to m, pairwise
    incomparable types, and the shared-prime-power condition on the m values.
    """
    violations: list[Violation] = []
    seen: set[str] = set()
    for d in spec.types:
        if d.id in seen:
            violations.append(Violation("DUPLICATE_TYPE", (d.id,), "type id appears twice"))
        seen.add(d.id)
    for d in spec.types:
        if d.rank < 1:
            violations.append(Violation("RANK_ZERO", (d.id,), f"rank {d.rank} is below 1"))
        if d.m > 1 and has_factor_in(d.m, d.inf_primes):
            violations.append(
                Violation("M_NOT_P0", (d.id,), f"m = {d.m} has a factor among the infinite primes")
            )
        if d.s != 0 and has_factor_in(d.s, d.inf_primes):
            violations.append(
                Violation("S_NOT_P0", (d.id,), f"s = {d.s} has a factor among the infinite primes")
            )
        if gcd(d.s, d.m) != 1:
            violations.append(
                Violation("S_M_NOT_COPRIME", (d.id,), f"gcd({d.s}, {d.m}) != 1")
            )
    for i, a in enumerate(spec.types):
        for b in spec.types[i + 1 :]:
            if a.id != b.id and a.type.comparable_with(b.type):
                violations.append(
                    Violation("COMPARABLE_TYPES", (a.id, b.id), "prime sets are nested")
                )
    if not condition_m_check({i: d.m for i, d in enumerate(spec.types)}):
        violations.append(
            Violation("CONDITION_M_FAILED", (), "some prime power divides only one m value")
        )
    return violations


def ensure_valid(spec: CRQGroupSpec) -> None:
    """Raise ValueError listing the violations of an invalid spec."""
    violations = validate_spec(spec)
    if violations:
        raise ValueError("invalid spec: " + "; ".join(str(v) for v in violations))


def regulator_index(spec: CRQGroupSpec) -> int:
    """Order of the regulator quotient, the lcm of the per-type invariants."""
    ensure_valid(spec)
    return spec.n


@dataclass(frozen=True)
class MainDecomposition:
    """Split into the clipped part (slot 0 of each type with m > 1) and its complement."""

    clipped: tuple[str, ...]
    complement: tuple[tuple[str, int], ...]

    def complement_rank(self, tid: str) -> int:
        for t, k in self.complement:
            if t == tid:
                return k
        raise ValueError(f"unknown type id {tid!r}")


def main_decomposition(spec: CRQGroupSpec) -> MainDecomposition:
    """Canonical main decomposition of a valid spec.

    The clipped summand keeps slot 0 of every type with m > 1 and carries all
    invariants m; the complement is completely decomposable with the remaining
    ranks.
    """
    ensure_valid(spec)
    clipped = spec.t0_ids
    complement = tuple(
        (d.id, d.rank - 1 if d.m > 1 else d.rank) for d in spec.types
    )
    return MainDecomposition(clipped=clipped, complement=complement)


class GenerationError(ValueError):
    """Raised when generator bounds cannot be satisfied."""


@dataclass(frozen=True)
class GenBounds:
    """Bounds for the random spec generator."""

    max_types: int = 3
    max_rank: int = 3
    max_m: int = 36
    prime_pool: tuple[int, ...] = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


_M_PRIMES = (2, 3, 5, 7, 11)


def random_spec(seed: int, bounds: GenBounds = GenBounds()) -> CRQGroupSpec:
    """Seeded random valid spec within the given bounds.

    Each type receives a distinguishing infinite prime, so the types are
    pairwise incomparable.  Every prime power placed into an m value is placed
    into at least two of them, which enforces the shared-prime-power
    condition.  The same seed always produces the same spec.
    """
    if bounds.max_types < 1 or bounds.max_rank < 1 or bounds.max_m < 1:
        raise GenerationError(f"bounds must be positive, got {bounds}")
    if bounds.max_types == 1 and bounds.max_m > 1:
        raise GenerationError("a single type cannot share its prime powers, need max_m == 1")
    pool = sorted(set(bounds.prime_pool))
    for p in pool:
        if not is_prime(p):
            raise GenerationError(f"prime pool member {p} is not prime")
    if len(pool) < bounds.max_types:
        raise GenerationError(
            f"prime pool of size {len(pool)} cannot distinguish {bounds.max_types} types"
        )

    rng = random.Random(seed)
    count = rng.randint(1, bounds.max_types)
    distinguishing = rng.sample(pool, count)
    shared_pool = [p for p in pool if p not in distinguishing]
    inf_sets: list[set[int]] = []
    for i in range(count):
        primes = {distinguishing[i]}
        if shared_pool and rng.random() < 0.3:
            primes.add(rng.choice(shared_pool))
        inf_sets.append(primes)

    ranks = [rng.randint(1, bounds.max_rank) for _ in range(count)]
    ms = [1] * count
    if count >= 2 and bounds.max_m > 1:
        usable = [p for p in _M_PRIMES if p <= bounds.max_m]
        for _ in range(rng.randint(1, 3)):
            p = rng.choice(usable)
            k_max = 1
            while p ** (k_max + 1) <= bounds.max_m:
                k_max += 1
            q = p ** rng.randint(1, k_max)
            eligible = [
                i
                for i in range(count)
                if p not in inf_sets[i] and ms[i] % p != 0 and ms[i] * q <= bounds.max_m
            ]
            if len(eligible) >= 2:
                chosen = rng.sample(eligible, rng.randint(2, len(eligible)))
                for i in chosen:
                    ms[i] *= q

    entries = []
    for i in range(count):
        inf = PrimeSet.of(inf_sets[i])
        if ms[i] == 1:
            s = 1
        else:
            residues = [r for r in range(1, ms[i]) if gcd(r, ms[i]) == 1]
            s = p0_class_representative(rng.choice(residues), ms[i], inf)
        entries.append(CriticalTypeData(IdempotentType(f"t{i + 1}", inf), ranks[i], ms[i], s))
    spec = CRQGroupSpec.of(entries)
    violations = validate_spec(spec)
    if violations:
        raise GenerationError("generator produced an invalid spec: " + str(violations[0]))
    return spec


def spec_to_dict(spec: CRQGroupSpec) -> dict:
    """Canonical JSON-ready form: types sorted by id, primes increasing."""
    return {
        "types": [
            {
                "id": d.id,
                "inf_primes": list(d.inf_primes),
                "rank": d.rank,
                "m": d.m,
                "s": d.s,
            }
            for d in sorted(spec.types, key=lambda d: d.id)
        ]
    }


def spec_from_dict(data: object) -> CRQGroupSpec:
    """Parse the JSON form, with shape errors reported as ValueError."""
    if not isinstance(data, dict) or set(data) != {"types"}:
        raise ValueError("spec document must be an object with a single 'types' key")
    raw = data["types"]
    if not isinstance(raw, list):
        raise ValueError("'types' must be a list")
    entries = []
    for item in raw:
        if not isinstance(item, dict):
            raise ValueError("each type must be an object")
        missing = {"id", "inf_primes", "rank", "m", "s"} - set(item)
        if missing:
            raise ValueError(f"type entry missing keys: {sorted(missing)}")
        if not isinstance(item["id"], str):
            raise ValueError("type id must be a string")
        primes = item["inf_primes"]
        if not isinstance(primes, list) or not all(isinstance(p, int) for p in primes):
            raise ValueError("inf_primes must be a list of integers")
        for key in ("rank", "m", "s"):
            if not isinstance(item[key], int) or isinstance(item[key], bool):
                raise ValueError(f"{key} must be an integer")
        entries.append(
            CriticalTypeData(
                IdempotentType(item["id"], PrimeSet.of(primes)),
                item["rank"],
                item["m"],
                item["s"],
            )
        )
    return CRQGroupSpec.of(entries)


def spec_to_json(spec: CRQGroupSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True) + "\n"


def spec_from_json(text: str) -> CRQGroupSpec:
    return spec_from_dict(json.loads(text))
