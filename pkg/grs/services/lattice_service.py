"""
Lattice helpers over Z^n built on the Smith normal form.
Vectors are integer tuples; a lattice is given by a list of generators.
"""

from typing import List, Optional, Sequence, Tuple

from grs.exceptions import InvariantViolation
from grs.models.algebra import FgAbelianGroup, IntMatrix
from grs.services.abelian_service import group_from_relations, smith_normal_form

Vector = Tuple[int, ...]


def _columns_matrix(vectors: Sequence[Vector], n: int) -> IntMatrix:
    return IntMatrix.from_rows([[v[i] for v in vectors] for i in range(n)], cols=len(vectors))


def _apply(m: IntMatrix, v: Sequence[int]) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m.entries)


def lattice_basis(vectors: Sequence[Vector], n: int) -> List[Vector]:
    """A Z-basis of the span of `vectors` in Z^n."""
    if not vectors:
        return []
    S = _columns_matrix(vectors, n)
    U, D, V = smith_normal_form(S)
    rank = sum(1 for d in D.diagonal_entries() if d)
    SV = S @ V
    return [SV.column(j) for j in range(rank)]


def coordinates(basis: Sequence[Vector], v: Sequence[int], n: int) -> Optional[Vector]:
    """Integer c with sum c_j basis_j = v, or None when v is outside the span."""
    if not basis:
        return () if all(x == 0 for x in v) else None
    B = _columns_matrix(basis, n)
    U, D, V = smith_normal_form(B)
    w = _apply(U, v)
    diag = D.diagonal_entries()
    y = []
    for i, wi in enumerate(w):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if wi != 0:
                return None
            if i < len(diag):
                y.append(0)
            continue
        if wi % d:
            return None
        y.append(wi // d)
    return _apply(V, y)


def in_lattice(v: Sequence[int], generators: Sequence[Vector], n: int) -> bool:
    return coordinates(lattice_basis(generators, n), v, n) is not None


def contains(outer: Sequence[Vector], inner: Sequence[Vector], n: int) -> bool:
    basis = lattice_basis(outer, n)
    return all(coordinates(basis, v, n) is not None for v in inner)


def kernel_basis(A: IntMatrix) -> List[Vector]:
    """Basis of { x in Z^cols : A x = 0 }."""
    U, D, V = smith_normal_form(A)
    rank = sum(1 for d in D.diagonal_entries() if d)
    return [V.column(j) for j in range(rank, A.cols)]


def preimage(A: IntMatrix, target: Sequence[Vector]) -> List[Vector]:
    """Generators of { x in Z^cols : A x in span(target) }."""
    n, m = A.cols, A.rows
    stacked = IntMatrix.from_rows(
        [list(A.entries[i]) + [-t[i] for t in target] for i in range(m)],
        cols=n + len(target),
    )
    if m == 0:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return [k[:n] for k in kernel_basis(stacked)]


def subquotient(outer: Sequence[Vector], inner: Sequence[Vector], n: int) -> FgAbelianGroup:
    """Structure of span(outer) / span(inner), assuming inner lies in outer."""
    basis = lattice_basis(outer, n)
    rows = []
    for v in inner:
        c = coordinates(basis, v, n)
        if c is None:
            raise InvariantViolation(f"{v} is not in the outer lattice")
        rows.append(list(c))
    return group_from_relations(IntMatrix.from_rows(rows, cols=len(basis)))
