"""
Brute-force oracles and hypothesis strategies shared by the test modules.

Nothing here calls into grs.services: distances come from Floyd-Warshall
and group facts from element enumeration, so agreement with the services
is a real cross-check.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Sequence, Tuple

from hypothesis import strategies as st

from grs.models.algebra import FgAbelianGroup
from grs.models.metric import Edge

Element = Tuple[int, ...]


# Metric oracles

def floyd_warshall(points: Sequence[str], edges: Sequence[Edge]) -> Dict[Tuple[str, str], Fraction]:
    inf = None
    dist: Dict[Tuple[str, str], Fraction] = {}
    for a in points:
        for b in points:
            dist[a, b] = Fraction(0) if a == b else inf
    for e in edges:
        length = Fraction(e.length)
        for a, b in ((e.a, e.b), (e.b, e.a)):
            if dist[a, b] is None or length < dist[a, b]:
                dist[a, b] = length
    for k in points:
        for i in points:
            if dist[i, k] is None:
                continue
            for j in points:
                if dist[k, j] is None:
                    continue
                through = dist[i, k] + dist[k, j]
                if dist[i, j] is None or through < dist[i, j]:
                    dist[i, j] = through
    return dist


def path_edges(ids: Sequence[str], length=1) -> List[Edge]:
    return [Edge(a, b, Fraction(length)) for a, b in zip(ids, ids[1:])]


def path_document(values: Sequence, length=1, **extra) -> Dict:
    ids = [f"p{i}" for i in range(len(values))]
    document = {
        "nodes": [{"id": p, "rm": v} for p, v in zip(ids, values)],
        "edges": [{"a": a, "b": b, "len": length} for a, b in zip(ids, ids[1:])],
    }
    document.update(extra)
    return document


@st.composite
def weighted_spaces(draw, min_points: int = 1, max_points: int = 8, allow_zero: bool = True):
    """(points, edges, field values) for a connected graph with rational lengths."""
    n = draw(st.integers(min_points, max_points))
    points = [f"x{i}" for i in range(n)]
    lengths = st.builds(Fraction, st.integers(1, 8), st.integers(1, 4))
    edges = []
    for i in range(1, n):
        parent = draw(st.integers(0, i - 1))
        edges.append(Edge(points[parent], points[i], draw(lengths)))
    if n > 2:
        extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
        for i, j in extra:
            if i != j:
                edges.append(Edge(points[i], points[j], draw(lengths)))
    low = 0 if allow_zero else 1
    values = [Fraction(draw(st.integers(low, 400)), draw(st.integers(1, 3))) for _ in points]
    return points, edges, dict(zip(points, values))


# Finite abelian group oracles

def finite_groups(max_order: int) -> List[FgAbelianGroup]:
    """Every finite abelian group of order <= max_order, once, in canonical form."""
    found = []

    def extend(prefix: Tuple[int, ...], size: int) -> Iterator[Tuple[int, ...]]:
        yield prefix
        d = prefix[-1] if prefix else 2
        step = prefix[-1] if prefix else 1
        while size * d <= max_order:
            yield from extend(prefix + (d,), size * d)
            d += step

    for factors in extend((), 1):
        found.append(FgAbelianGroup(0, factors))
    return sorted(found, key=lambda g: (g.order(), g.factors))


def elements(G: FgAbelianGroup) -> List[Element]:
    assert G.is_finite
    return list(product(*(range(d) for d in G.factors)))


def add(G: FgAbelianGroup, x: Element, y: Element) -> Element:
    return tuple((a + b) % d for a, b, d in zip(x, y, G.factors))


def scale(G: FgAbelianGroup, k: int, x: Element) -> Element:
    return tuple((k * a) % d for a, d in zip(x, G.factors))


def zero(G: FgAbelianGroup) -> Element:
    return (0,) * len(G.factors)


def zp_dimension(G: FgAbelianGroup, p: int) -> int:
    """log_p |G / pG| by enumeration."""
    multiples = {scale(G, p, x) for x in elements(G)}
    index = G.order() // len(multiples)
    dim = 0
    while index > 1:
        index //= p
        dim += 1
    return dim


def hom_count(G: FgAbelianGroup, n: int) -> int:
    """|Hom(G, Z_n)|: generator images h_i in Z_n with d_i h_i = 0."""
    count = 0
    for images in product(range(n), repeat=len(G.factors)):
        if all((d * h) % n == 0 for d, h in zip(G.factors, images)):
            count += 1
    return count


def _divisors(n: int) -> List[int]:
    return [m for m in range(1, n + 1) if n % m == 0]


def signature(G: FgAbelianGroup, members: FrozenSet[Element]) -> Tuple[int, ...]:
    """#{x in members : m x = 0} for every m dividing |members|; determines a finite abelian group."""
    z = zero(G)
    return tuple(sum(1 for x in members if scale(G, m, x) == z) for m in _divisors(len(members)))


def group_signature(G: FgAbelianGroup) -> Tuple[int, ...]:
    return signature(G, frozenset(elements(G)))


def _join(G: FgAbelianGroup, S: FrozenSet[Element], x: Element) -> FrozenSet[Element]:
    out = set(S)
    step = x
    while True:
        shifted = {add(G, s, step) for s in S}
        if shifted <= out:
            return frozenset(out)
        out |= shifted
        step = add(G, step, x)


@lru_cache(maxsize=None)
def subgroups(G: FgAbelianGroup) -> Tuple[FrozenSet[Element], ...]:
    """All subgroups of a finite G, grown one generator at a time."""
    trivial = frozenset([zero(G)])
    seen = {trivial}
    frontier = [trivial]
    all_elements = elements(G)
    while frontier:
        fresh = []
        for S in frontier:
            for x in all_elements:
                if x in S:
                    continue
                T = _join(G, S, x)
                if T not in seen:
                    seen.add(T)
                    fresh.append(T)
        frontier = fresh
    return tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))


@lru_cache(maxsize=None)
def subgroup_signatures(G: FgAbelianGroup) -> FrozenSet[Tuple[int, ...]]:
    return frozenset(signature(G, S) for S in subgroups(G))


def quotient_signatures(G: FgAbelianGroup) -> FrozenSet[Tuple[int, ...]]:
    """Types of G/S over all subgroups S, by counting cosets killed by m."""
    out = set()
    all_elements = elements(G)
    for S in subgroups(G):
        index = G.order() // len(S)
        sig = tuple(
            sum(1 for x in all_elements if scale(G, m, x) in S) // len(S)
            for m in _divisors(index)
        )
        out.add(sig)
    return frozenset(out)


def power_embeds(A: FgAbelianGroup, count: int, B: FgAbelianGroup) -> bool:
    """Whether some subgroup of B has the type of A^count."""
    if A.order() ** count > B.order():
        return False
    return group_signature(A.power(count)) in subgroup_signatures(B)


def brute_copies(ambient: FgAbelianGroup, coker: FgAbelianGroup) -> int:
    count = 0
    while power_embeds(coker, count + 1, ambient):
        count += 1
    return count


def direct_double_by_halves(G: FgAbelianGroup, candidates: Sequence[FgAbelianGroup]) -> bool:
    return any(A.direct_sum(A) == G for A in candidates if A.order() ** 2 == G.order())
