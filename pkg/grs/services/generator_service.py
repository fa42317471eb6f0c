"""
Generator Service - synthesizes space documents for tests and sweeps.

Every document is a pure function of (kind, params, seed): ids are
zero-padded so lexicographic order matches construction order, and
random draws come from one seeded numpy Generator.
"""

import logging
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from grs.exceptions import InvalidParameterError
from grs.models.metric import Edge, SolitonKind
from grs.numeric import Number, format_number, parse_number
from grs.services.metric_service import build_space

logger = logging.getLogger(__name__)

KINDS = ("path", "grid2", "grid4", "random-geometric", "cone-field")

Layout = Tuple[List[str], List[Tuple[str, str, Any]]]


def _int_param(params: Dict[str, Any], name: str, default: int, minimum: int = 1) -> int:
    value = params.get(name, default)
    try:
        value = int(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"Parameter '{name}' must be an integer, got {value!r}", element=name)
    if value < minimum:
        raise InvalidParameterError(f"Parameter '{name}' must be >= {minimum}, got {value}", element=name)
    return value


def _num_param(params: Dict[str, Any], name: str, default: Any) -> Fraction:
    try:
        value = parse_number(params.get(name, default))
    except InvalidParameterError:
        raise InvalidParameterError(f"Parameter '{name}' must be a number", element=name)
    return value


def _path(params: Dict[str, Any]) -> Layout:
    n = _int_param(params, "n", 10)
    width = len(str(n - 1))
    ids = [f"p{i:0{width}d}" for i in range(n)]
    length = _num_param(params, "length", 1)
    return ids, [(ids[i], ids[i + 1], length) for i in range(n - 1)]


def _grid(shape: Tuple[int, ...], length: Fraction) -> Layout:
    width = len(str(max(shape) - 1))
    name = lambda c: "g" + "_".join(f"{x:0{width}d}" for x in c)
    cells = list(product(*(range(s) for s in shape)))
    edges = []
    for cell in cells:
        for axis in range(len(shape)):
            if cell[axis] + 1 < shape[axis]:
                nxt = cell[:axis] + (cell[axis] + 1,) + cell[axis + 1:]
                edges.append((name(cell), name(nxt), length))
    return [name(c) for c in cells], edges


def _grid2(params: Dict[str, Any]) -> Layout:
    rows = _int_param(params, "rows", 5)
    cols = _int_param(params, "cols", rows)
    return _grid((rows, cols), _num_param(params, "length", 1))


def _grid4(params: Dict[str, Any]) -> Layout:
    side = _int_param(params, "side", 3)
    return _grid((side,) * 4, _num_param(params, "length", 1))


def _random_geometric(params: Dict[str, Any], rng: np.random.Generator) -> Layout:
    """Unit-square geometric graph; lengths rounded to 3 decimals, components bridged."""
    n = _int_param(params, "n", 50)
    radius = float(_num_param(params, "radius", "0.3"))
    width = len(str(n - 1))
    ids = [f"v{i:0{width}d}" for i in range(n)]
    coords = rng.random((n, 2))

    pairs = cKDTree(coords).query_pairs(radius, output_type="ndarray").reshape(-1, 2)
    gaps = np.linalg.norm(coords[pairs[:, 0]] - coords[pairs[:, 1]], axis=1)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(pairs[gaps < radius].tolist())

    components = sorted(min(c) for c in nx.connected_components(graph))
    graph.add_edges_from(zip(components, components[1:]))

    ends = np.array(sorted(graph.edges()), dtype=np.int64).reshape(-1, 2)
    lengths = np.linalg.norm(coords[ends[:, 0]] - coords[ends[:, 1]], axis=1)
    edges = [(ids[i], ids[j], max(round(float(d), 3), 0.001)) for (i, j), d in zip(ends.tolist(), lengths)]
    return ids, edges


def _layout(kind: str, params: Dict[str, Any], rng: np.random.Generator) -> Layout:
    if kind == "path":
        return _path(params)
    if kind == "grid2":
        return _grid2(params)
    if kind == "grid4":
        return _grid4(params)
    if kind == "random-geometric":
        return _random_geometric(params, rng)
    raise InvalidParameterError(f"Unknown generator kind '{kind}' (expected one of {', '.join(KINDS)})", element=kind)


def _soliton_columns(kind: SolitonKind, d: Number) -> Dict[str, Number]:
    if kind is SolitonKind.STEADY:
        # |grad f| = d/(d+1), R = 1 - |grad f|^2
        gradf = d / (d + 1)
        return {"f": d, "r_scal": 1 - gradf * gradf, "gradf": gradf, "vol": 1}
    # f = (d/2 + 1)^2, |grad f| = d/2, R = d + 1, so |grad f|^2 + R = f
    return {"f": (d / 2 + 1) ** 2, "r_scal": d + 1, "gradf": d / 2, "vol": 1}


def generate_space(kind: str, params: Optional[Dict[str, Any]] = None, seed: int = 0) -> Dict[str, Any]:
    """
    Space document of the given kind.

    cone-field builds the layout named by params["shape"] (default path) and
    sets rm = c (d(x, o) + 1)^2. Other kinds take params["field"]:
    "random" (integers 1..100, default) or "constant" (value params["c"]).
    params["soliton"] = "steady" | "shrinking" adds exact soliton columns.
    """
    params = dict(params or {})
    rng = np.random.default_rng(seed)

    layout_kind = params.get("shape", "path") if kind == "cone-field" else kind
    if layout_kind == "cone-field":
        raise InvalidParameterError("cone-field cannot use itself as its shape", element="shape")
    ids, raw_edges = _layout(layout_kind, params, rng)
    base = params.get("base", ids[0])
    if base not in ids:
        raise InvalidParameterError(f"Base point '{base}' is not generated", element=base)

    soliton = params.get("soliton")
    soliton_kind = None
    if soliton is not None:
        try:
            soliton_kind = SolitonKind(soliton)
        except ValueError:
            raise InvalidParameterError(f"Unknown soliton kind '{soliton}'", element="soliton")
    needs_distances = kind == "cone-field" or soliton is not None
    dist: Dict[str, Number] = {}
    if needs_distances:
        space = build_space(ids, [Edge(a, b, parse_number(l)) for a, b, l in raw_edges])
        dist = {p: space.dist(base, p) for p in ids}

    if kind == "cone-field":
        c = _num_param(params, "c", 1)
        if c < 0:
            raise InvalidParameterError(f"Cone constant must be >= 0, got {c}", element="c")
        rm = {p: c * (dist[p] + 1) ** 2 for p in ids}
    elif params.get("field", "random") == "constant":
        c = _num_param(params, "c", 1)
        rm = {p: c for p in ids}
    elif params.get("field", "random") == "random":
        draws = rng.integers(1, 101, size=len(ids))
        rm = {p: int(v) for p, v in zip(ids, draws)}
    else:
        raise InvalidParameterError(f"Unknown field '{params['field']}'", element="field")

    nodes = []
    for p in ids:
        node = {"id": p, "rm": format_number(rm[p])}
        if soliton_kind is not None:
            node.update({k: format_number(v) for k, v in _soliton_columns(soliton_kind, dist[p]).items()})
        nodes.append(node)

    document: Dict[str, Any] = {
        "nodes": nodes,
        "edges": [{"a": a, "b": b, "len": format_number(l)} for a, b, l in raw_edges],
        "base": base,
    }
    if soliton is not None:
        document["kind"] = soliton
    logger.info(f"Generated {kind} space: {len(ids)} points, {len(raw_edges)} edges, seed={seed}")
    return document
