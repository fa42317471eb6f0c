"""
Quaternion oracle for space form groups.

Builds the finite group of unit quaternions from stored generators by
closure, takes its commutator subgroup by element enumeration and reads
the abelianization off an element-order census of the cosets. Shares no
code with the Smith normal form path.

Coordinates live in the cyclotomic field Q(zeta_N) and are stored doubled,
as integer coefficient vectors over 1, zeta, ..., zeta^(phi(N)-1), so every
quaternion coordinate used here is exact.
"""

import logging
from functools import lru_cache
from math import gcd
from typing import Dict, FrozenSet, List, Sequence, Tuple

from sympy import Poly, cyclotomic_poly, factorint, symbols, totient

from grs.config import settings
from grs.exceptions import ClosureError, InvariantViolation
from grs.models.algebra import ElementaryDivisors, FgAbelianGroup
from grs.models.space_form import SpaceFormFamily, SpaceFormGroup

logger = logging.getLogger(__name__)

Coord = Tuple[int, ...]
Quaternion = Tuple[Coord, Coord, Coord, Coord]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class CyclotomicField:
    """Z[zeta_N] in the power basis; reduction modulo the monic Phi_N."""

    def __init__(self, N: int):
        self.N = N
        self.degree = int(totient(N))
        x = symbols("x")
        coeffs = [int(c) for c in Poly(cyclotomic_poly(N, x), x).all_coeffs()]
        # Phi_N = x^d + c_{d-1} x^{d-1} + ... ; keep the low coefficients
        self._low = list(reversed(coeffs))[: self.degree]

    def reduce(self, raw: Sequence[int]) -> Coord:
        work = list(raw)
        d = self.degree
        for k in range(len(work) - 1, d - 1, -1):
            c = work[k]
            if c:
                work[k] = 0
                for i, low in enumerate(self._low):
                    work[k - d + i] -= c * low
        work = work[:d] + [0] * (d - len(work))
        return tuple(work)

    def const(self, value: int) -> Coord:
        return self.reduce([value])

    def zeta(self, k: int) -> Coord:
        raw = [0] * (k % self.N + 1)
        raw[k % self.N] = 1
        return self.reduce(raw)

    def add(self, a: Coord, b: Coord) -> Coord:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Coord, b: Coord) -> Coord:
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a: Coord, b: Coord) -> Coord:
        raw = [0] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        raw[i + j] += x * y
        return self.reduce(raw)

    def halve(self, a: Coord) -> Coord:
        if any(v % 2 for v in a):
            raise InvariantViolation(f"Coordinate {a} is not divisible by 2 in Z[zeta_{self.N}]")
        return tuple(v // 2 for v in a)

    def zero(self) -> Coord:
        return (0,) * self.degree


class QuaternionAlgebra:
    """Unit quaternions with doubled coordinates over a cyclotomic field."""

    def __init__(self, field: CyclotomicField):
        self.F = field

    def one(self) -> Quaternion:
        z = self.F.zero()
        return (self.F.const(2), z, z, z)

    def mul(self, p: Quaternion, q: Quaternion) -> Quaternion:
        F = self.F
        a1, b1, c1, d1 = p
        a2, b2, c2, d2 = q
        m = F.mul
        w = F.sub(F.sub(F.sub(m(a1, a2), m(b1, b2)), m(c1, c2)), m(d1, d2))
        x = F.sub(F.add(F.add(m(a1, b2), m(b1, a2)), m(c1, d2)), m(d1, c2))
        y = F.add(F.add(F.sub(m(a1, c2), m(b1, d2)), m(c1, a2)), m(d1, b2))
        z = F.add(F.sub(F.add(m(a1, d2), m(b1, c2)), m(c1, b2)), m(d1, a2))
        return tuple(F.halve(v) for v in (w, x, y, z))

    def conj(self, q: Quaternion) -> Quaternion:
        neg = lambda v: tuple(-c for c in v)
        return (q[0], neg(q[1]), neg(q[2]), neg(q[3]))

    def is_unit(self, q: Quaternion) -> bool:
        total = self.F.zero()
        for v in q:
            total = self.F.add(total, self.F.mul(v, v))
        return total == self.F.const(4)


def _rotation(F: CyclotomicField, n: int) -> Quaternion:
    """cos(2 pi / n) + sin(2 pi / n) i, doubled."""
    m = F.N // n
    quarter = F.N // 4
    zp, zm = F.zeta(m), F.zeta(-m)
    two_cos = F.add(zp, zm)
    two_sin = F.mul(F.zeta(3 * quarter), F.sub(zp, zm))
    z = F.zero()
    return (two_cos, two_sin, z, z)


def _field_for(group: SpaceFormGroup) -> int:
    family = group.family
    if family is SpaceFormFamily.CYCLIC:
        return _lcm(group.param, 4)
    if family is SpaceFormFamily.BINARY_DIHEDRAL:
        return _lcm(2 * group.param, 4)
    if family is SpaceFormFamily.BINARY_TETRAHEDRAL:
        return 4
    if family is SpaceFormFamily.BINARY_OCTAHEDRAL:
        return 8
    return 5


def quaternion_generators(group: SpaceFormGroup) -> Tuple[QuaternionAlgebra, List[Quaternion]]:
    """Stored generator pair of the family, in exact doubled coordinates."""
    F = CyclotomicField(_field_for(group))
    H = QuaternionAlgebra(F)
    z, one, two = F.zero(), F.const(1), F.const(2)
    family = group.family

    if family is SpaceFormFamily.CYCLIC:
        gens = [_rotation(F, group.param)]
    elif family is SpaceFormFamily.BINARY_DIHEDRAL:
        gens = [_rotation(F, 2 * group.param), (z, z, two, z)]
    elif family is SpaceFormFamily.BINARY_TETRAHEDRAL:
        gens = [(one, one, one, one), (z, two, z, z)]
    elif family is SpaceFormFamily.BINARY_OCTAHEDRAL:
        root2 = F.add(F.zeta(1), F.zeta(7))
        gens = [(root2, root2, z, z), (one, one, one, one)]
    else:
        # golden ratio phi = 1 + zeta + zeta^4 and 1/phi = zeta + zeta^4 in Q(zeta_5)
        inv_phi = F.add(F.zeta(1), F.zeta(4))
        phi = F.add(one, inv_phi)
        gens = [(one, one, one, one), (phi, inv_phi, one, z)]

    for g in gens:
        if not H.is_unit(g):
            raise InvariantViolation(f"Generator of {group.label} is not a unit quaternion")
    return H, gens


def mulclose(H: QuaternionAlgebra, gens: Sequence[Quaternion], limit: int) -> List[Quaternion]:
    """All products of the generators; raises once more than `limit` elements appear."""
    found = {H.one()}
    frontier = [H.one()]
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                b = H.mul(a, g)
                if b not in found:
                    found.add(b)
                    fresh.append(b)
                    if len(found) > limit:
                        raise ClosureError(f"Closure exceeded {limit} elements", element=limit)
        frontier = fresh
    return sorted(found)


def commutator_subgroup(H: QuaternionAlgebra, elements: Sequence[Quaternion],
                        gens: Sequence[Quaternion]) -> FrozenSet[Quaternion]:
    """Normal closure of the generator commutators, which is the derived subgroup."""
    inv = {g: H.conj(g) for g in gens}
    seeds = set()
    for a in gens:
        for b in gens:
            seeds.add(H.mul(H.mul(a, b), H.mul(inv[a], inv[b])))
    subgroup = {H.one()} | seeds
    frontier = list(subgroup)
    while frontier:
        fresh = []
        for x in frontier:
            candidates = [H.mul(x, s) for s in seeds]
            candidates += [H.mul(H.mul(g, x), inv[g]) for g in gens]
            for y in candidates:
                if y not in subgroup:
                    subgroup.add(y)
                    fresh.append(y)
        frontier = fresh
    if len(elements) % len(subgroup):
        raise InvariantViolation("Derived subgroup order does not divide the group order")
    return frozenset(subgroup)


def _power(H: QuaternionAlgebra, q: Quaternion, k: int) -> Quaternion:
    out = H.one()
    for _ in range(k):
        out = H.mul(out, q)
    return out


def coset_census(H: QuaternionAlgebra, elements: Sequence[Quaternion],
                 derived: FrozenSet[Quaternion]) -> FgAbelianGroup:
    """Abelian quotient G/G' from counts of cosets killed by p^e."""
    representatives: List[Quaternion] = []
    covered = set()
    for g in elements:
        if g in covered:
            continue
        representatives.append(g)
        covered.update(H.mul(g, h) for h in derived)

    m = len(representatives)
    powers = []
    for p, top in sorted(factorint(m).items()):
        killed_counts: Dict[int, int] = {0: 0}
        for e in range(1, top + 1):
            killed = sum(1 for r in representatives if _power(H, r, p ** e) in derived)
            killed_counts[e] = _log(killed, p)
        for e in range(1, top + 1):
            at_least = killed_counts[e] - killed_counts[e - 1]
            at_least_next = (killed_counts[e + 1] - killed_counts[e]) if e + 1 <= top else 0
            exactly = at_least - at_least_next
            if exactly:
                powers.append((p, e, exactly))
    return ElementaryDivisors(0, tuple(powers)).to_group()


def _log(value: int, p: int) -> int:
    k = 0
    while value % p == 0 and value > 1:
        value //= p
        k += 1
    if value != 1:
        raise InvariantViolation(f"Census count is not a power of {p}")
    return k


@lru_cache(maxsize=64)
def _oracle_cached(group: SpaceFormGroup) -> FgAbelianGroup:
    H, gens = quaternion_generators(group)
    limit = settings.CLOSURE_FACTOR * group.order
    elements = mulclose(H, gens, limit)
    if len(elements) != group.order:
        raise InvariantViolation(f"Closure of {group.label} has {len(elements)} elements, expected {group.order}")
    derived = commutator_subgroup(H, elements, gens)
    result = coset_census(H, elements, derived)
    logger.info(f"Quaternion oracle {group.label}: |G| = {len(elements)}, |G'| = {len(derived)}, G/G' = {result}")
    return result


def quaternion_oracle(group: SpaceFormGroup) -> FgAbelianGroup:
    """Abelianization of the group computed from its unit quaternions."""
    return _oracle_cached(group)


def closure_size(group: SpaceFormGroup) -> int:
    H, gens = quaternion_generators(group)
    return len(mulclose(H, gens, settings.CLOSURE_FACTOR * group.order))
