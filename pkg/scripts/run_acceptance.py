"""
Run the seeded acceptance sweeps.
Point selection soundness, lemma constants, the direct-double dichotomy,
oracle agreement, boundary feasibility, Smith forms, growth fits,
disjoint copies and pipeline verdicts. Exit status 0 when every sweep passes.
"""

import argparse
import logging
import os
import sys
import time
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

sys.path.append(os.getcwd())

from grs.etl.parsers.space_parser import load_space
from grs.models.algebra import FgAbelianGroup, IntMatrix
from grs.models.space_form import SpaceFormFamily
from grs.schemas.reports import Anchor, Verdict
from grs.services.abelian_service import embeds_power, is_direct_double, smith_normal_form
from grs.services.generator_service import generate_space
from grs.services.growth_service import fit_bounded, fit_quadratic
from grs.services.obstruction_service import ObstructionService, boundary_feasibility, max_disjoint_copies
from grs.services.quaternion_oracle import quaternion_oracle
from grs.services.selection_service import SelectionParams, iteration_bound, select_point, select_sequence, verify_certificate
from grs.services.space_form_service import abelianization, catalog, classify_direct_double, make_group, parse_space_form

logger = logging.getLogger("run_acceptance")


def finite_groups(max_order: int) -> List[FgAbelianGroup]:
    """Every finite abelian group of order <= max_order in canonical form."""

    def extend(prefix: Tuple[int, ...], size: int) -> Iterator[Tuple[int, ...]]:
        yield prefix
        d = prefix[-1] if prefix else 2
        step = prefix[-1] if prefix else 1
        while size * d <= max_order:
            yield from extend(prefix + (d,), size * d)
            d += step

    return [FgAbelianGroup(0, factors) for factors in extend((), 1)]


def sweep_selection(args) -> List[str]:
    failures = []
    rng = np.random.default_rng(args.seed)
    large = set(rng.choice(args.instances, size=min(args.large, args.instances), replace=False).tolist())
    for trial in range(args.instances):
        n = args.large_nodes if trial in large else int(rng.integers(2, args.max_nodes + 1))
        radius = "0.06" if n > 500 else "0.3"
        loaded = load_space(generate_space("random-geometric", {"n": n, "radius": radius}, seed=args.seed + trial))
        y0 = loaded.space.points[int(rng.integers(0, n))]
        params = SelectionParams.from_a0(y0, Fraction(int(rng.integers(1, 80)), 8))

        cert = select_point(loaded.space, loaded.field, params)
        report = verify_certificate(loaded.space, loaded.field, params, cert)
        if not report.passed:
            failures.append(f"trial {trial}: {report.failures}")
        if len(cert.chain) > iteration_bound(loaded.field[y0], loaded.field.max()):
            failures.append(f"trial {trial}: chain of {len(cert.chain)} exceeds the bound")
    return failures


def sweep_lemma_constants(args) -> List[str]:
    failures = []
    for trial in range(20):
        loaded = load_space(generate_space("random-geometric", {"n": 60}, seed=args.seed + trial))
        starts = list(loaded.space.points[:20])
        for start, cert in zip(starts, select_sequence(loaded.space, loaded.field, starts)):
            d = loaded.space.dist(cert.x0, start)
            if not (d * d < Fraction(4, 9) and cert.radius_sq <= Fraction(1, 9) and cert.guarantees.nested_ok):
                failures.append(f"trial {trial} start {start}: x0 = {cert.x0}")
    return failures


def sweep_dichotomy(args) -> List[str]:
    groups = [make_group(SpaceFormFamily.CYCLIC, n) for n in range(1, 101)]
    groups += [make_group(SpaceFormFamily.BINARY_DIHEDRAL, n) for n in range(1, 51)]
    groups += [parse_space_form(s) for s in ("2T", "2O", "2I")]
    positive = set(classify_direct_double(groups).positive)
    expected = {"Z:1", "2I"} | {f"Dstar:{n}" for n in range(2, 51, 2)}
    if positive == expected:
        return []
    return [f"unexpected positives {sorted(positive - expected)}, missing {sorted(expected - positive)}"]


def sweep_oracle(args) -> List[str]:
    failures = []
    specs = [f"Z:{n}" for n in range(1, 13)] + [f"Dstar:{n}" for n in range(1, 13)] + ["2T", "2O", "2I"]
    for spec in specs:
        group = parse_space_form(spec)
        oracle, presented = quaternion_oracle(group), abelianization(group)
        if oracle != presented:
            failures.append(f"{spec}: oracle {oracle} != presentation {presented}")
    return failures


def sweep_feasibility(args) -> List[str]:
    failures = []
    if boundary_feasibility(FgAbelianGroup(0, (2, 4))).feasible:
        failures.append("Z4+Z2 is feasible")
    for h in finite_groups(256):
        doubled, halving = is_direct_double(h)
        if boundary_feasibility(h).feasible != ([halving] if doubled else []):
            failures.append(f"{h}: feasibility disagrees with the direct-double test")
    return failures


def sweep_smith_forms(args) -> List[str]:
    failures = []
    rng = np.random.default_rng(args.seed)
    for trial in range(1000):
        rows, cols = (int(v) for v in rng.integers(1, 7, size=2))
        m = IntMatrix.from_rows(rng.integers(-9, 10, size=(rows, cols)).tolist(), cols=cols)
        U, D, V = smith_normal_form(m)
        if U @ m @ V != D:
            failures.append(f"trial {trial}: U m V != D")
    return failures


def sweep_growth(args) -> List[str]:
    failures = []
    for c in ("1/2", "1", "4"):
        for shape in ("path", "grid2"):
            loaded = load_space(generate_space("cone-field", {"c": c, "shape": shape}))
            if fit_quadratic(loaded.pointed, loaded.field).C != Fraction(c):
                failures.append(f"cone-field {shape} c={c}: quadratic fit missed")
        loaded = load_space(generate_space("grid2", {"field": "constant", "c": c}))
        if fit_bounded(loaded.field).C != Fraction(c):
            failures.append(f"constant field c={c}: bounded fit missed")
    return failures


def sweep_copies(args) -> List[str]:
    failures = []
    cokernels = [g for g in finite_groups(64) if not g.is_trivial]
    for ambient in finite_groups(64):
        for coker in cokernels:
            count = 0
            while embeds_power(coker, count + 1, ambient):
                count += 1
            if max_disjoint_copies(ambient, coker) != count:
                failures.append(f"({ambient}, {coker}): expected {count}")
    if max_disjoint_copies(FgAbelianGroup(0, (2,)), FgAbelianGroup()) is not None:
        failures.append("trivial cokernel is not unbounded")
    return failures


def sweep_pipeline(args) -> List[str]:
    failures = []
    service = ObstructionService()
    for gamma in catalog(max_param=24):
        verdict = service.run_pipeline(gamma)
        anchors = {s.anchor for s in verdict.steps}
        if gamma.order > 1 and verdict.verdict is not Verdict.BOUNDED_COPIES:
            failures.append(f"{gamma.label}: {verdict.verdict.value}")
        if gamma.label == "Dstar:4" and Anchor.B2_LOWER_BOUND not in anchors:
            failures.append("Dstar:4 trace lacks the b2 step")
        if gamma.label == "2I" and Anchor.ROCHLIN not in anchors:
            failures.append("2I trace lacks the Rochlin branch")
    return failures


SWEEPS: List[Tuple[str, Callable, Optional[float]]] = [
    ("point selection soundness", sweep_selection, 60.0),
    ("lemma constants", sweep_lemma_constants, None),
    ("direct-double dichotomy", sweep_dichotomy, None),
    ("quaternion oracle agreement", sweep_oracle, 10.0),
    ("boundary feasibility", sweep_feasibility, None),
    ("smith normal form", sweep_smith_forms, None),
    ("growth fits", sweep_growth, None),
    ("disjoint copies", sweep_copies, None),
    ("pipeline verdicts", sweep_pipeline, None),
]


def main() -> int:
    parser = argparse.ArgumentParser(description="Seeded acceptance sweeps")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--instances", type=int, default=500)
    parser.add_argument("--max-nodes", type=int, default=200)
    parser.add_argument("--large", type=int, default=2, help="instances drawn at --large-nodes")
    parser.add_argument("--large-nodes", type=int, default=2000)
    parser.add_argument("--only", help="run the sweeps whose name contains this text")
    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    failed = 0
    for name, sweep, budget in SWEEPS:
        if args.only and args.only not in name:
            continue
        logger.info(f"Running sweep: {name}")
        started = time.perf_counter()
        failures = sweep(args)
        elapsed = time.perf_counter() - started
        if budget is not None and elapsed > budget:
            failures.append(f"took {elapsed:.2f}s, budget {budget:.0f}s")
        status = "ok" if not failures else f"FAILED ({len(failures)})"
        print(f"{name:<32} {status:<12} {elapsed:7.2f}s")
        for line in failures[:10]:
            print(f"    {line}")
        failed += bool(failures)

    print("\nall sweeps passed" if not failed else f"\n{failed} sweeps failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
