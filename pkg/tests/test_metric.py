"""
Metric space tests: document loading, shortest-path distances, open balls,
suprema over balls and the instance generator.
"""

import json
import logging
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from grs.etl.parsers.space_parser import load_space, load_space_file, serialize_space
from grs.etl.validators.validator import SpaceDocumentValidator
from grs.exceptions import EmptyBallError, InvalidParameterError, SpaceDocumentError, UnknownPointError
from grs.models.metric import Edge, PointedSpace, ScalarField
from grs.numeric import parse_number
from grs.schemas.documents import SpaceDocument
from grs.services.generator_service import generate_space
from grs.services.metric_service import EXACT_TICK_LIMIT, ball, build_space, candidate_radii, sup_on_ball
from tests.helpers import floyd_warshall, path_document, weighted_spaces


class TestLoadSpace:

    def test_path_distances_add_up(self):
        loaded = load_space(path_document([1, 1, 1]))
        assert loaded.space.dist("p0", "p2") == 2
        assert loaded.space.exact

    def test_decimal_lengths_stay_exact(self):
        loaded = load_space(path_document([1, 1, 1], length=0.1))
        assert loaded.space.dist("p0", "p2") == Fraction(1, 5)

    def test_rational_string_lengths(self):
        loaded = load_space(path_document([1, 1, 1], length="1/3"))
        assert loaded.space.dist("p0", "p2") == Fraction(2, 3)

    def test_zero_edge_length_rejected(self):
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(path_document([1, 1], length=0))
        assert exc.value.code == "nonpositive-edge-length"
        assert "nonpositive edge length" in exc.value.message
        assert exc.value.element == "p0-p1"

    def test_unknown_edge_endpoint(self):
        document = path_document([1, 1])
        document["edges"].append({"a": "p1", "b": "ghost", "len": 1})
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(document)
        assert exc.value.code == "unknown-point"
        assert exc.value.element == "ghost"

    def test_negative_field_value(self):
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(path_document([1, -2, 1]))
        assert exc.value.code == "negative-field-value"
        assert exc.value.element == "p1"

    def test_disconnected_graph(self):
        document = path_document([1, 1])
        document["nodes"].append({"id": "island", "rm": 1})
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(document)
        assert exc.value.code == "disconnected-graph"
        assert exc.value.element == "p0" or exc.value.element == "island"

    def test_validator_reports_disconnection_before_build(self):
        document = path_document([1, 1])
        document["nodes"].append({"id": "island", "rm": 1})
        result = SpaceDocumentValidator().validate(SpaceDocument.model_validate(document))
        assert not result.is_valid
        assert [e["code"] for e in result.errors] == ["disconnected-graph"]
        assert result.errors[0]["element"] == "p0"

    def test_duplicate_point(self):
        document = path_document([1, 1])
        document["nodes"].append({"id": "p0", "rm": 3})
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(document)
        assert exc.value.code == "duplicate-point"

    def test_optional_field_must_be_all_or_nothing(self):
        document = path_document([1, 1, 1])
        document["nodes"][0]["vol"] = 1
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(document)
        assert exc.value.code == "inconsistent-optional-field"
        assert exc.value.element == "p1"

    def test_unknown_key_is_malformed(self):
        document = path_document([1, 1])
        document["nodes"][0]["colour"] = "red"
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(document)
        assert exc.value.code == "malformed-document"

    def test_pointed_needs_base(self):
        loaded = load_space(path_document([1, 1]))
        with pytest.raises(SpaceDocumentError) as exc:
            loaded.pointed
        assert exc.value.code == "missing-base"

    def test_unknown_base(self):
        with pytest.raises(SpaceDocumentError) as exc:
            load_space(path_document([1, 1], base="nowhere"))
        assert exc.value.code == "unknown-point"

    def test_float_mode(self):
        loaded = load_space(path_document([1, 1, 1]), exact=False)
        assert not loaded.space.exact
        assert loaded.space.dist("p0", "p2") == 2.0

    def test_huge_lengths_fall_back_to_floats(self, caplog):
        edges = [Edge("a", "b", Fraction(EXACT_TICK_LIMIT)), Edge("b", "c", Fraction(1))]
        with caplog.at_level(logging.WARNING, logger="grs.services.metric_service"):
            space = build_space(["a", "b", "c"], edges)
        assert not space.exact
        assert "falling back to floating point" in caplog.text

    def test_random_geometric_matches_networkx(self):
        document = generate_space("random-geometric", {"n": 50}, seed=7)
        space = load_space(document).space

        graph = nx.Graph()
        for e in document["edges"]:
            graph.add_edge(e["a"], e["b"], weight=parse_number(e["len"]))
        expected = dict(nx.all_pairs_dijkstra_path_length(graph, weight="weight"))

        assert len(space) == 50
        for a in space.points:
            for b in space.points:
                assert space.dist(a, b) == expected[a][b]

    def test_serialize_then_load_is_identity(self):
        document = generate_space("grid2", {"rows": 3, "cols": 4, "soliton": "shrinking", "field": "random"}, seed=3)
        loaded = load_space(document)
        once = serialize_space(loaded.space, loaded.field, loaded.sample, loaded.base)
        again = load_space(once)
        twice = serialize_space(again.space, again.field, again.sample, again.base)

        assert once == twice
        assert again.base == loaded.base
        assert dict(again.field.items()) == dict(loaded.field.items())
        assert (again.space.table == loaded.space.table).all()

    def test_load_space_file(self, write_json):
        path = write_json("space.json", path_document([2, 3], base="p1"))
        loaded = load_space_file(path)
        assert loaded.pointed.dist_to_base("p0") == 1

    def test_load_space_file_missing(self, tmp_path):
        with pytest.raises(SpaceDocumentError):
            load_space_file(tmp_path / "absent.json")

    def test_load_space_file_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nodes: oops", encoding="utf-8")
        with pytest.raises(SpaceDocumentError) as exc:
            load_space_file(path)
        assert "not valid JSON" in exc.value.message

    def test_load_space_file_unsupported_format(self, tmp_path):
        path = tmp_path / "space.csv"
        path.write_text("a,b,len\np0,p1,1\n", encoding="utf-8")
        with pytest.raises(SpaceDocumentError) as exc:
            load_space_file(path)
        assert "unsupported document format" in exc.value.message

    @given(data=weighted_spaces(max_points=7))
    @settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
    def test_distances_match_floyd_warshall(self, data):
        points, edges, _ = data
        space = build_space(points, edges)
        expected = floyd_warshall(points, edges)
        for a in points:
            for b in points:
                assert space.dist(a, b) == expected[a, b]

    @given(data=weighted_spaces(max_points=6))
    @settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
    def test_metric_axioms(self, data):
        points, edges, _ = data
        space = build_space(points, edges)
        for x in points:
            assert space.dist(x, x) == 0
            for y in points:
                assert space.dist(x, y) == space.dist(y, x)
                for z in points:
                    assert space.dist(x, z) <= space.dist(x, y) + space.dist(y, z)


class TestBall:

    def test_zero_radius_is_empty(self, path3):
        assert ball(path3, "p0", 0) == []

    def test_open_ball(self, path3):
        assert ball(path3, "p0", Fraction(3, 2)) == ["p0", "p1"]
        assert ball(path3, "p0", 1) == ["p0"]

    def test_large_radius_covers_everything(self, path3):
        assert ball(path3, "p1", path3.diameter + 1) == ["p0", "p1", "p2"]

    def test_negative_radius(self, path3):
        with pytest.raises(InvalidParameterError):
            ball(path3, "p0", -1)

    def test_unknown_center(self, path3):
        with pytest.raises(UnknownPointError):
            ball(path3, "p9", 1)

    def test_candidate_radii(self, path3):
        assert candidate_radii(path3) == [Fraction(1, 2), 1, 2]

    @given(data=weighted_spaces(max_points=7), r1=st.fractions(0, 20), r2=st.fractions(0, 20))
    @settings(max_examples=80, suppress_health_check=[HealthCheck.too_slow])
    def test_balls_are_nested(self, data, r1, r2):
        points, edges, _ = data
        space = build_space(points, edges)
        small, large = sorted((r1, r2))
        for x in points:
            inner = ball(space, x, small)
            outer = ball(space, x, large)
            assert set(inner) <= set(outer)
            assert inner == sorted(y for y in points if space.dist(x, y) < small)
            if small > 0:
                assert x in inner


class TestSupOnBall:

    def test_constant_field(self, path3):
        field = ScalarField({p: Fraction(7) for p in path3.points})
        assert sup_on_ball(path3, field, "p1", 5) == 7

    def test_spike_outside_ball_is_ignored(self, path3, spike_field):
        assert sup_on_ball(path3, spike_field, "p0", Fraction(3, 2)) == 10
        assert sup_on_ball(path3, spike_field, "p0", Fraction(5, 2)) == 100

    def test_empty_ball(self, path3, spike_field):
        with pytest.raises(EmptyBallError) as exc:
            sup_on_ball(path3, spike_field, "p0", 0)
        assert exc.value.code == "empty-ball"

    @given(data=weighted_spaces(max_points=7), radii=st.lists(st.fractions(0, 20), min_size=2, max_size=5))
    @settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
    def test_exhaustive_and_monotone(self, data, radii):
        points, edges, values = data
        space = build_space(points, edges)
        field = ScalarField(values)
        x = points[0]
        previous = None
        for r in sorted(r for r in radii if r > 0):
            expected = max(values[y] for y in points if space.dist(x, y) < r)
            current = sup_on_ball(space, field, x, r)
            assert current == expected
            if previous is not None:
                assert current >= previous
            previous = current


class TestGenerateSpace:

    def test_small_path(self):
        document = generate_space("path", {"n": 3}, seed=0)
        assert [n["id"] for n in document["nodes"]] == ["p0", "p1", "p2"]
        assert [(e["a"], e["b"], e["len"]) for e in document["edges"]] == [("p0", "p1", 1), ("p1", "p2", 1)]
        assert document["base"] == "p0"

    def test_cone_field_value_at_base(self):
        document = generate_space("cone-field", {"c": 4}, seed=0)
        rm = {n["id"]: n["rm"] for n in document["nodes"]}
        assert rm[document["base"]] == 4
        assert rm["p3"] == 64

    def test_same_seed_same_bytes(self):
        first = json.dumps(generate_space("random-geometric", {"n": 30}, seed=11), sort_keys=True)
        second = json.dumps(generate_space("random-geometric", {"n": 30}, seed=11), sort_keys=True)
        assert first == second

    def test_grids(self):
        grid2 = generate_space("grid2", {"rows": 2, "cols": 3})
        assert len(grid2["nodes"]) == 6
        assert len(grid2["edges"]) == 7
        grid4 = generate_space("grid4", {"side": 2})
        assert len(grid4["nodes"]) == 16
        assert len(grid4["edges"]) == 32

    def test_random_geometric_is_connected(self):
        for seed in range(5):
            loaded = load_space(generate_space("random-geometric", {"n": 40, "radius": "0.1"}, seed=seed))
            assert len(loaded.space) == 40

    def test_random_geometric_matches_pairwise_scan(self):
        n, radius, seed = 60, 0.2, 4
        coords = np.random.default_rng(seed).random((n, 2))
        near = {
            (i, j) for i in range(n) for j in range(i + 1, n)
            if np.hypot(*(coords[i] - coords[j])) < radius
        }
        document = generate_space("random-geometric", {"n": n, "radius": "0.2"}, seed=seed)
        got = {(int(e["a"][1:]), int(e["b"][1:])) for e in document["edges"]}
        scan = nx.Graph(list(near))
        scan.add_nodes_from(range(n))
        assert near <= got
        assert len(got - near) == nx.number_connected_components(scan) - 1

    @pytest.mark.slow
    def test_large_random_geometric(self):
        loaded = load_space(generate_space("random-geometric", {"n": 2000, "radius": "0.06"}, seed=0))
        assert len(loaded.space) == 2000

    def test_soliton_columns(self):
        document = generate_space("path", {"n": 4, "soliton": "steady"})
        assert document["kind"] == "steady"
        assert document["nodes"][1]["gradf"] == "1/2"
        assert document["nodes"][1]["r_scal"] == "3/4"

    def test_constant_field(self):
        document = generate_space("path", {"n": 4, "field": "constant", "c": "5/2"})
        assert {n["rm"] for n in document["nodes"]} == {"5/2"}

    @pytest.mark.parametrize("kind, params", [
        ("torus", {}),
        ("path", {"n": 0}),
        ("path", {"n": "many"}),
        ("path", {"soliton": "expanding"}),
        ("path", {"field": "wild"}),
        ("cone-field", {"c": -1}),
        ("path", {"base": "q7"}),
    ])
    def test_invalid_params(self, kind, params):
        with pytest.raises(InvalidParameterError):
            generate_space(kind, params)

    def test_pointed_space_checks_base(self, path3):
        with pytest.raises(UnknownPointError):
            PointedSpace(path3, "p7")
