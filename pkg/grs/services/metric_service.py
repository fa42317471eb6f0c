"""
Metric Service - builds shortest-path metrics and answers ball queries.
Balls are open: B_r(x) = { y : d(y, x) < r }.
"""

import logging
import math
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from grs.exceptions import EmptyBallError, InvalidParameterError, SpaceDocumentError
from grs.models.metric import Edge, MetricSpace, ScalarField
from grs.numeric import FLOAT_TOLERANCE, Number, lt

logger = logging.getLogger(__name__)

# Largest integer path length a float64 table holds exactly
EXACT_TICK_LIMIT = 2 ** 53


def build_graph(points: Iterable[str], edges: Iterable[Edge]) -> nx.Graph:
    """Undirected weighted graph; parallel edges keep the shortest length."""
    graph = nx.Graph()
    graph.add_nodes_from(points)
    for edge in edges:
        if graph.has_edge(edge.a, edge.b) and graph[edge.a][edge.b]["length"] <= edge.length:
            continue
        graph.add_edge(edge.a, edge.b, length=edge.length)
    return graph


def _tick_unit(edges: Sequence[Edge]) -> int:
    unit = 1
    for edge in edges:
        unit = math.lcm(unit, Fraction(edge.length).denominator)
    return unit


def build_space(points: Iterable[str], edges: Iterable[Edge], exact: bool = True) -> MetricSpace:
    """
    Compute the all-pairs shortest-path table of a connected weighted graph.
    Connectivity is checked by SpaceDocumentValidator before this runs.

    Exact mode scales rational lengths to integer ticks over their common
    denominator. When the ticks could exceed what float64 represents
    exactly the space falls back to floating point.
    """
    order = tuple(sorted(set(points)))
    edges = tuple(edges)
    graph = build_graph(order, edges)

    if not order:
        raise SpaceDocumentError("Space has no points", code="malformed-document")

    unit = 1
    if exact:
        if not all(isinstance(e.length, (int, Fraction)) for e in edges):
            exact = False
        else:
            unit = _tick_unit(edges)
            total = sum(Fraction(e.length) * unit for e in edges)
            if total >= EXACT_TICK_LIMIT:
                logger.warning(f"Exact distances need {total} ticks; falling back to floating point")
                exact = False
                unit = 1

    for a, b, data in graph.edges(data=True):
        data["weight"] = int(data["length"] * unit) if exact else float(data["length"])

    adjacency = nx.to_scipy_sparse_array(graph, nodelist=list(order), weight="weight", format="csr")
    table = shortest_path(adjacency, method="D", directed=False)
    if exact:
        table = np.rint(table).astype(np.int64)

    logger.debug(f"Built {'exact' if exact else 'float'} metric on {len(order)} points, {len(edges)} edges")
    return MetricSpace(
        points=order,
        edges=edges,
        table=table,
        unit=unit,
        exact=exact,
        index={p: i for i, p in enumerate(order)},
    )


def ball(space: MetricSpace, x: str, r: Number, tol: float = FLOAT_TOLERANCE) -> List[str]:
    """Open ball { y : d(y, x) < r }, sorted."""
    if r < 0:
        raise InvalidParameterError(f"Ball radius must be >= 0, got {r}", element=r)
    row = space.dist_row(x)
    return [p for p, d in zip(space.points, row) if lt(d, r, tol)]


def ball_squared(space: MetricSpace, x: str, radius_sq: Number, tol: float = FLOAT_TOLERANCE) -> List[str]:
    """Open ball given its squared radius: { y : d(y, x)^2 < radius_sq }."""
    if radius_sq < 0:
        raise InvalidParameterError(f"Squared radius must be >= 0, got {radius_sq}", element=radius_sq)
    row = space.dist_row(x)
    return [p for p, d in zip(space.points, row) if lt(d * d, radius_sq, tol)]


def sup_on_ball(
    space: MetricSpace, field: ScalarField, x: str, r: Number, tol: float = FLOAT_TOLERANCE
) -> Number:
    """Maximum of the field over the open ball B_r(x)."""
    members = ball(space, x, r, tol)
    if not members:
        raise EmptyBallError(f"Ball of radius {r} around '{x}' is empty", element=x)
    return max(field[p] for p in members)


def candidate_radii(space: MetricSpace) -> List[Number]:
    """Distinct positive pairwise distances together with their halves, sorted."""
    values = set()
    for d in space.distinct_distances():
        values.add(d)
        values.add(d / 2)
    return sorted(values)


def graph_of(space: MetricSpace) -> nx.Graph:
    return build_graph(space.points, space.edges)


def edge_pairs(space: MetricSpace) -> List[Tuple[str, str, Number]]:
    """Edges as (a, b, length) with the shortest length per pair, sorted."""
    graph = graph_of(space)
    return sorted((min(a, b), max(a, b), data["length"]) for a, b, data in graph.edges(data=True))
