"""
Abelian Service - exact arithmetic of finitely generated abelian groups.
Smith normal form, cokernels, coefficient functors, direct doubles,
embeddings of powers and quotient enumeration.
"""

import logging
from itertools import product
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, isprime

from grs.config import settings
from grs.exceptions import CapExceededError, InfiniteGroupError, InvalidParameterError, InvariantViolation, NotPrimeError
from grs.models.algebra import ElementaryDivisors, FgAbelianGroup, IntMatrix

logger = logging.getLogger(__name__)


class SmithForm(NamedTuple):
    """U @ m @ V == D with U, V unimodular."""
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix


def _pivot(D: np.ndarray, t: int) -> Optional[Tuple[int, int]]:
    """Smallest nonzero |entry| of D[t:, t:], ties broken by (row, col)."""
    best = None
    rows, cols = D.shape
    for i in range(t, rows):
        for j in range(t, cols):
            v = abs(D[i, j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
    return None if best is None else (best[1], best[2])


def _first_indivisible(D: np.ndarray, t: int, p: int) -> Optional[int]:
    rows, cols = D.shape
    for i in range(t + 1, rows):
        for j in range(t + 1, cols):
            if D[i, j] % p:
                return i
    return None


def _determinant(a: np.ndarray) -> int:
    if a.shape[0] == 0:
        return 1
    return int(Matrix(a.tolist()).det())


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """
    Smith normal form by unimodular row and column operations.

    Pivot rule: smallest nonzero absolute value, then lexicographic position.
    """
    D = m.to_array()
    U = IntMatrix.identity(m.rows).to_array()
    V = IntMatrix.identity(m.cols).to_array()
    rows, cols = m.rows, m.cols

    t = 0
    while t < min(rows, cols):
        pos = _pivot(D, t)
        if pos is None:
            break
        i, j = pos
        if i != t:
            D[[t, i]] = D[[i, t]]
            U[[t, i]] = U[[i, t]]
        if j != t:
            D[:, [t, j]] = D[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
        p = D[t, t]

        dirty = False
        for i in range(t + 1, rows):
            q = D[i, t] // p
            if q:
                D[i] = D[i] - q * D[t]
                U[i] = U[i] - q * U[t]
            dirty = dirty or D[i, t] != 0
        for j in range(t + 1, cols):
            q = D[t, j] // p
            if q:
                D[:, j] = D[:, j] - q * D[:, t]
                V[:, j] = V[:, j] - q * V[:, t]
            dirty = dirty or D[t, j] != 0
        if dirty:
            continue

        i = _first_indivisible(D, t, p)
        if i is not None:
            # pull the offending row up; the next pass finds a smaller pivot
            D[t] = D[t] + D[i]
            U[t] = U[t] + U[i]
            continue
        logger.debug(f"SNF pivot {t}: {p}")
        t += 1

    form = SmithForm(IntMatrix.from_array(U), IntMatrix.from_array(D), IntMatrix.from_array(V))
    _check_smith_form(m, form)
    return form


def _check_smith_form(m: IntMatrix, form: SmithForm) -> None:
    U, D, V = form
    if U @ m @ V != D:
        raise InvariantViolation("Smith form does not satisfy U m V = D")
    if not D.is_diagonal():
        raise InvariantViolation("Smith form D is not diagonal")
    diag = D.diagonal_entries()
    if any(d < 0 for d in diag):
        raise InvariantViolation(f"Smith form has a negative diagonal entry: {diag}")
    for a, b in zip(diag, diag[1:]):
        if (a == 0 and b != 0) or (a and b % a):
            raise InvariantViolation(f"Smith form breaks the divisibility chain: {diag}")
    for name, M in (("U", U), ("V", V)):
        if abs(_determinant(M.to_array())) != 1:
            raise InvariantViolation(f"Smith transform {name} is not unimodular")


def group_from_relations(rel: IntMatrix) -> FgAbelianGroup:
    """Cokernel Z^g / rowspace(rel), where g = rel.cols."""
    diag = smith_normal_form(rel).D.diagonal_entries()
    nonzero = [d for d in diag if d != 0]
    return FgAbelianGroup(rel.cols - len(nonzero), tuple(d for d in nonzero if d > 1))


def _require_prime(p: int) -> None:
    if not isprime(p):
        raise NotPrimeError(f"{p} is not prime", element=p)


def tensor_Zp(G: FgAbelianGroup, p: int) -> int:
    """dim over Z_p of G (x) Z_p."""
    _require_prime(p)
    return G.rank + sum(1 for d in G.factors if d % p == 0)


def tensor_Zpk_order(G: FgAbelianGroup, p: int, k: int) -> int:
    """|G (x) Z/p^k| for finite G."""
    _require_prime(p)
    if not G.is_finite:
        raise InfiniteGroupError(f"{G} is infinite", element=str(G))
    exponent = sum(min(e, k) for e in G.elementary_divisors().exponents(p))
    return p ** exponent


def ext1_torsion(G: FgAbelianGroup) -> FgAbelianGroup:
    """Ext^1(G, Z), which is the torsion subgroup of G."""
    return G.torsion()


def hom_ext_Zp(G: FgAbelianGroup, p: int) -> Tuple[int, int]:
    """(dim Hom(G, Z_p), dim Ext^1(G, Z_p))."""
    _require_prime(p)
    torsion_part = sum(1 for d in G.factors if d % p == 0)
    return G.rank + torsion_part, torsion_part


def order(G: FgAbelianGroup) -> Optional[int]:
    """|G|, or None for an unbounded (infinite) group."""
    return G.order()


def is_direct_double(G: FgAbelianGroup) -> Tuple[bool, Optional[FgAbelianGroup]]:
    """Whether G = A + A, with the canonical halving A when it is."""
    if G.rank % 2:
        return False, None
    ed = G.elementary_divisors()
    if any(m % 2 for _, _, m in ed.powers):
        return False, None
    half = ElementaryDivisors(G.rank // 2, tuple((p, e, m // 2) for p, e, m in ed.powers))
    return True, half.to_group()


def embeds_power(A: FgAbelianGroup, count: int, B: FgAbelianGroup) -> bool:
    """Whether A^count embeds in B, both finite."""
    for name, G in (("A", A), ("B", B)):
        if not G.is_finite:
            raise InfiniteGroupError(f"{name} = {G} is infinite", element=str(G))
    if count < 0:
        raise InvalidParameterError(f"Copy count must be >= 0, got {count}", element=count)
    a, b = A.elementary_divisors(), B.elementary_divisors()
    for p in a.primes():
        top = max(a.exponents(p))
        for e in range(1, top + 1):
            if count * a.count_at_least(p, e) > b.count_at_least(p, e):
                return False
    return True


def _subpartitions(shape: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Partitions mu (largest first) with mu_i <= shape_i, zeros stripped."""

    def extend(prefix: Tuple[int, ...], i: int) -> Iterator[Tuple[int, ...]]:
        if i == len(shape):
            yield tuple(x for x in prefix if x)
            return
        ceiling = min(shape[i], prefix[-1]) if prefix else shape[i]
        for value in range(ceiling, -1, -1):
            yield from extend(prefix + (value,), i + 1)

    yield from extend((), 0)


def enumerate_quotients(G: FgAbelianGroup, cap: Optional[int] = None) -> List[FgAbelianGroup]:
    """
    All quotients of a finite G up to isomorphism.

    For a p-group of type lambda the subgroup (equivalently quotient) types
    are exactly the partitions contained in lambda; types combine freely
    across primes.
    """
    cap = settings.QUOTIENT_CAP if cap is None else cap
    if not G.is_finite:
        raise InfiniteGroupError(f"{G} is infinite", element=str(G))
    if G.order() > cap:
        raise CapExceededError(f"Order {G.order()} exceeds the quotient cap {cap}", element=G.order())

    ed = G.elementary_divisors()
    per_prime = []
    for p in ed.primes():
        per_prime.append([(p, mu) for mu in set(_subpartitions(ed.exponents(p)))])

    quotients = set()
    for choice in product(*per_prime):
        orders = [p ** e for p, mu in choice for e in mu]
        quotients.add(FgAbelianGroup.from_cyclic_orders(orders))
    result = sorted(quotients, key=lambda q: (q.order(), q.factors))
    logger.debug(f"{G} has {len(result)} quotient types")
    return result


def group_from_presentation(generators: int, relations: Sequence[Sequence[int]]) -> FgAbelianGroup:
    return group_from_relations(IntMatrix.from_rows(relations, cols=generators))
