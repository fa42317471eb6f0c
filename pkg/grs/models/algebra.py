"""
Abelian group domain models.
Integer matrices and finitely generated abelian groups in canonical form.
"""

from collections import Counter
from dataclasses import dataclass
from itertools import zip_longest
from math import prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint

from grs.exceptions import InvalidParameterError, PresentationError


@dataclass(frozen=True)
class IntMatrix:
    """Exact rectangular integer matrix (arbitrary precision entries)."""
    rows: int
    cols: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InvalidParameterError(f"Negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InvalidParameterError(f"Entries do not form a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [tuple(int(v) for v in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "IntMatrix":
        r, c = array.shape
        return cls(r, c, tuple(tuple(int(v) for v in array[i]) for i in range(r)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple(
            tuple(int(values[i]) if i == j and i < len(values) else 0 for j in range(cols))
            for i in range(rows)
        ))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=object)
        for i, row in enumerate(self.entries):
            for j, v in enumerate(row):
                out[i, j] = v
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InvalidParameterError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = np.zeros((self.rows, other.cols), dtype=object)
        if self.cols:
            out = self.to_array().dot(other.to_array())
        return IntMatrix.from_array(out.reshape(self.rows, other.cols))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else ((),) * self.cols)

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def diagonal_entries(self) -> List[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, row in enumerate(self.entries) for j, v in enumerate(row) if i != j)

    def to_document(self) -> Dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [list(r) for r in self.entries]}


def _prime_powers(n: int) -> List[Tuple[int, int]]:
    return sorted(factorint(n).items())


@dataclass(frozen=True)
class ElementaryDivisors:
    """Free rank plus the multiset of prime powers p^e as (p, e, multiplicity)."""
    rank: int
    powers: Tuple[Tuple[int, int, int], ...]

    def primes(self) -> List[int]:
        return sorted({p for p, _, _ in self.powers})

    def exponents(self, p: int) -> List[int]:
        """Exponents of the cyclic p-factors, largest first."""
        out: List[int] = []
        for q, e, m in self.powers:
            if q == p:
                out.extend([e] * m)
        return sorted(out, reverse=True)

    def count_at_least(self, p: int, e: int) -> int:
        """Number of cyclic p-factors of order >= p^e."""
        return sum(m for q, k, m in self.powers if q == p and k >= e)

    def to_group(self) -> "FgAbelianGroup":
        """Recombine prime powers into invariant factors."""
        columns = [[p ** e for e in self.exponents(p)] for p in self.primes()]
        factors = [prod(col) for col in zip_longest(*columns, fillvalue=1)]
        return FgAbelianGroup(self.rank, tuple(sorted(factors)))

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"Z{p ** e}" for p, e, m in self.powers for _ in range(m)]
        return "+".join(parts) if parts else "0"


@dataclass(frozen=True, order=True)
class FgAbelianGroup:
    """
    Z^rank + Z_{d1} + ... + Z_{dk} with every d_i >= 2 and d_i | d_{i+1}.
    Two groups are isomorphic iff they compare equal.
    """
    rank: int = 0
    factors: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(d) for d in self.factors))
        if self.rank < 0:
            raise InvalidParameterError(f"Negative rank {self.rank}", element=self.rank)
        for d in self.factors:
            if d < 2:
                raise InvalidParameterError(f"Invariant factor {d} must be >= 2", element=d)
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise InvalidParameterError(f"Invariant factors break divisibility: {a} does not divide {b}", element=b)

    @classmethod
    def trivial(cls) -> "FgAbelianGroup":
        return cls()

    @classmethod
    def cyclic(cls, n: int) -> "FgAbelianGroup":
        """Z_n, with n = 0 meaning Z and n = 1 the trivial group."""
        return cls.from_cyclic_orders([n])

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> "FgAbelianGroup":
        """Canonical form of a direct sum of cyclic groups Z_n (0 -> Z)."""
        rank = 0
        counts: Counter = Counter()
        for n in orders:
            n = int(n)
            if n < 0:
                raise InvalidParameterError(f"Cyclic order {n} must be >= 0", element=n)
            if n == 0:
                rank += 1
                continue
            for p, e in _prime_powers(n):
                counts[(p, e)] += 1
        powers = tuple(sorted((p, e, m) for (p, e), m in counts.items()))
        return ElementaryDivisors(rank, powers).to_group()

    @property
    def generator_count(self) -> int:
        return self.rank + len(self.factors)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.factors

    def order(self) -> Optional[int]:
        """|G|, or None when the group is infinite."""
        return prod(self.factors) if self.rank == 0 else None

    def torsion(self) -> "FgAbelianGroup":
        return FgAbelianGroup(0, self.factors)

    def direct_sum(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_cyclic_orders([0] * (self.rank + other.rank) + list(self.factors + other.factors))

    def power(self, count: int) -> "FgAbelianGroup":
        return FgAbelianGroup.from_cyclic_orders(
            [0] * (self.rank * count) + list(self.factors) * count
        )

    def elementary_divisors(self) -> ElementaryDivisors:
        counts: Counter = Counter()
        for d in self.factors:
            for p, e in _prime_powers(d):
                counts[(p, e)] += 1
        return ElementaryDivisors(self.rank, tuple(sorted((p, e, m) for (p, e), m in counts.items())))

    def relation_matrix(self) -> IntMatrix:
        """Relations of the standard presentation: free generators first, then one per factor."""
        rows = []
        for i, d in enumerate(self.factors):
            row = [0] * self.generator_count
            row[self.rank + i] = d
            rows.append(row)
        return IntMatrix.from_rows(rows, cols=self.generator_count)

    def to_document(self) -> Dict:
        return {"rank": self.rank, "factors": list(self.factors)}

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z{d}" for d in self.factors)
        return "+".join(parts) if parts else "0"


@dataclass(frozen=True)
class PresentedMap:
    """
    Homomorphism between standard presentations: column j of `matrix` is
    the image of source generator j in target generator coordinates.
    """
    source: FgAbelianGroup
    target: FgAbelianGroup
    matrix: IntMatrix

    def __post_init__(self):
        expected = (self.target.generator_count, self.source.generator_count)
        if (self.matrix.rows, self.matrix.cols) != expected:
            raise PresentationError(
                f"Map {self.source} -> {self.target} needs a {expected[0]}x{expected[1]} matrix, "
                f"got {self.matrix.rows}x{self.matrix.cols}",
                element=f"{self.source} -> {self.target}",
            )


@dataclass(frozen=True)
class SequenceSpec:
    """groups[i] --maps[i]--> groups[i+1]."""
    groups: Tuple[FgAbelianGroup, ...]
    maps: Tuple[PresentedMap, ...]

    def __post_init__(self):
        if len(self.maps) != len(self.groups) - 1:
            raise PresentationError(f"{len(self.groups)} groups need {len(self.groups) - 1} maps, got {len(self.maps)}")
        for i, m in enumerate(self.maps):
            if m.source != self.groups[i] or m.target != self.groups[i + 1]:
                raise PresentationError(f"Map {i} does not run from term {i} to term {i + 1}", element=i)

    @classmethod
    def from_matrices(cls, groups: Sequence[FgAbelianGroup], matrices: Sequence[Sequence[Sequence[int]]]) -> "SequenceSpec":
        maps = []
        for i, entries in enumerate(matrices):
            src, tgt = groups[i], groups[i + 1]
            if not entries and tgt.generator_count:
                matrix = IntMatrix.zeros(tgt.generator_count, src.generator_count)
            else:
                matrix = IntMatrix.from_rows(entries, cols=src.generator_count)
            maps.append(PresentedMap(src, tgt, matrix))
        return cls(tuple(groups), tuple(maps))
