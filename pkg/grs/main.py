"""
Command-line entry point.

Every subcommand loads its inputs, calls one service operation and writes a
CommandReport {command, result, anchors} as sorted JSON. Exit status: 0 on
success, 1 on invalid input or usage, 2 on an internal invariant violation.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from grs import __version__
from grs.config import RunConfig, load_run_config, settings
from grs.etl.parsers.algebra_parser import AlgebraParser, load_algebra_file, parse_group_spec
from grs.etl.parsers.space_parser import load_space_file
from grs.exceptions import GrsError, InvalidParameterError, InvariantViolation
from grs.numeric import parse_number
from grs.schemas.reports import Anchor, BlowupMode, CommandReport, GrowthModel, group_view
from grs.services import abelian_service as abelian
from grs.services.generator_service import KINDS, generate_space
from grs.services.growth_service import blowup_candidates, fit_bounded, fit_quadratic, shi_admissible_radius
from grs.services.obstruction_service import (
    ObstructionService,
    boundary_feasibility,
    check_exact,
    max_disjoint_copies,
)
from grs.services.quaternion_oracle import quaternion_oracle
from grs.services.selection_service import (
    SelectionParams,
    select_point,
    select_sequence,
    verify_certificate,
)
from grs.services.soliton_service import audit_soliton_identities, check_noncollapsing
from grs.services.space_form_service import (
    abelianization,
    catalog,
    classify_direct_double,
    describe,
    make_group,
    parse_family,
    parse_space_form,
)

logger = logging.getLogger(__name__)

Outcome = Tuple[Any, List[Anchor]]

UNBOUNDED = "unbounded"

_BLOWUP_MODES = {
    "scale": BlowupMode.SCALE_INVARIANT,
    "scale-invariant": BlowupMode.SCALE_INVARIANT,
    "abs": BlowupMode.ABSOLUTE,
    "absolute": BlowupMode.ABSOLUTE,
}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _number(text: str) -> Any:
    try:
        return parse_number(text)
    except InvalidParameterError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


# Selection

def cmd_select(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    start_value = loaded.field[args.start]
    if args.a0 is None:
        params = SelectionParams.lemma_choice(args.start, start_value)
    else:
        params = SelectionParams.from_a0(args.start, args.a0)
    cert = select_point(loaded.space, loaded.field, params, settings.FLOAT_TOLERANCE)
    anchors = [Anchor.POINT_SELECTION, Anchor.ITERATE_GROWTH]
    if cert.guarantees.nested_ok is not None:
        anchors.append(Anchor.LEMMA_CONSTANT)
    if not args.verify:
        return cert, anchors
    report = verify_certificate(loaded.space, loaded.field, params, cert, settings.FLOAT_TOLERANCE)
    return {"certificate": cert, "verification": report}, anchors


def cmd_sequence(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    starts = [s.strip() for s in args.starts.split(",") if s.strip()]
    if not starts:
        raise InvalidParameterError("--starts needs at least one point id", element=args.starts)
    certs = select_sequence(loaded.space, loaded.field, starts, config.max_workers, settings.FLOAT_TOLERANCE)
    return {"certificates": certs}, [Anchor.SEQUENCE_SELECTION, Anchor.POINT_SELECTION]


# Growth and soliton audits

def cmd_growth(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    if GrowthModel(args.model) is GrowthModel.BOUNDED:
        return fit_bounded(loaded.field), [Anchor.BOUNDED_CURVATURE]
    return fit_quadratic(loaded.pointed, loaded.field), [Anchor.QUADRATIC_GROWTH]


def cmd_blowup(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    mode = _BLOWUP_MODES[args.mode]
    result = blowup_candidates(
        loaded.pointed, loaded.field, mode, args.k,
        with_certificates=not args.no_certificates, max_workers=config.max_workers,
    )
    anchor = Anchor.BLOWUP_SCALE if mode is BlowupMode.SCALE_INVARIANT else Anchor.BLOWUP_ABSOLUTE
    anchors = [anchor]
    if not args.no_certificates:
        anchors.append(Anchor.SEQUENCE_SELECTION)
    return result, anchors


def _require_sample(loaded, command: str):
    if loaded.sample is None:
        raise InvalidParameterError(f"{command} needs a space document with soliton columns", element=command)
    return loaded.sample


def cmd_shi(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    sample = _require_sample(loaded, "shi")
    return shi_admissible_radius(sample, loaded.space, args.point, loaded.base), [Anchor.SHI_HYPOTHESIS]


def cmd_audit(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    sample = _require_sample(loaded, "audit")
    tol = args.tol if args.tol is not None else config.tolerance
    report = audit_soliton_identities(sample, loaded.space, tol, scale=args.scale)
    if report.kind == "steady":
        anchors = [Anchor.STEADY_IDENTITY]
    else:
        anchors = [Anchor.SHRINKING_BOUND, Anchor.NORMALIZATION, Anchor.LIPSCHITZ]
    return report, anchors


def cmd_kappa(args: argparse.Namespace, config: RunConfig) -> Outcome:
    loaded = load_space_file(args.space)
    sample = _require_sample(loaded, "kappa")
    report = check_noncollapsing(sample, loaded.space, loaded.field, args.kappa, settings.FLOAT_TOLERANCE)
    return report, [Anchor.NONCOLLAPSING, Anchor.VOLUME_GROWTH]


# Abelian groups

def cmd_snf(args: argparse.Namespace, config: RunConfig) -> Outcome:
    m = load_algebra_file(args.matrix, "matrix")
    U, D, V = abelian.smith_normal_form(m)
    result = {
        "U": U.to_document(),
        "D": D.to_document(),
        "V": V.to_document(),
        "diagonal": D.diagonal_entries(),
        "cokernel": group_view(abelian.group_from_relations(m.transpose())),
    }
    return result, [Anchor.SMITH_FORM]


def cmd_group(args: argparse.Namespace, config: RunConfig) -> Outcome:
    parsed = AlgebraParser().parse_file(args.relations)
    kind = parsed.metadata["kind"]
    if kind == "matrix":
        group = abelian.group_from_relations(parsed.records)
    elif kind == "group":
        group = parsed.records
    else:
        raise InvalidParameterError(f"{args.relations} holds a {kind} document, expected relations", element=args.relations)
    order = group.order()
    return {"group": group_view(group), "order": UNBOUNDED if order is None else order}, [Anchor.SMITH_FORM]


def cmd_double(args: argparse.Namespace, config: RunConfig) -> Outcome:
    group = parse_group_spec(args.group)
    doubled, halving = abelian.is_direct_double(group)
    result = {"group": group_view(group), "direct_double": doubled, "halving": group_view(halving)}
    return result, [Anchor.DIRECT_DOUBLE]


def cmd_tensor(args: argparse.Namespace, config: RunConfig) -> Outcome:
    group = parse_group_spec(args.group)
    dimension = abelian.tensor_Zp(group, args.p)
    hom_dim, ext_dim = abelian.hom_ext_Zp(group, args.p)
    result = {
        "group": group_view(group),
        "p": args.p,
        "tensor_dim": dimension,
        "hom_dim": hom_dim,
        "ext_dim": ext_dim,
        "torsion": group_view(abelian.ext1_torsion(group)),
    }
    return result, [Anchor.UCT_TENSOR]


# Space forms and obstruction

def cmd_spaceform(args: argparse.Namespace, config: RunConfig) -> Outcome:
    if args.classify:
        families = [parse_family(args.family)] if args.family else None
        return classify_direct_double(catalog(families, args.max_param)), [Anchor.DICHOTOMY]
    if not args.family:
        raise InvalidParameterError("spaceform needs --family (or --classify)", element="family")
    group = make_group(parse_family(args.family), args.n)
    report = describe(group)
    if not args.oracle:
        return report, [Anchor.BOUNDARY_DUALITY]
    oracle = quaternion_oracle(group)
    result = {"space_form": report, "oracle": group_view(oracle), "agrees": oracle == abelianization(group)}
    return result, [Anchor.BOUNDARY_DUALITY]


def cmd_obstruct(args: argparse.Namespace, config: RunConfig) -> Outcome:
    verdict = ObstructionService(config.quotient_cap).run_pipeline(parse_space_form(args.gamma))
    if args.trace:
        _write_json(Path(args.trace), verdict.model_dump(mode="json"))
    return verdict, [Anchor(a) for a in verdict.anchors()]


def cmd_feasible(args: argparse.Namespace, config: RunConfig) -> Outcome:
    report = boundary_feasibility(parse_group_spec(args.group), config.quotient_cap)
    anchors = [Anchor.CONNECTING_ONTO, Anchor.ORDER_IDENTITY, Anchor.ZP_DOUBLING, Anchor.PRIME_POWER_DOUBLING]
    return report, anchors


def cmd_exact(args: argparse.Namespace, config: RunConfig) -> Outcome:
    report = check_exact(load_algebra_file(args.sequence, "sequence"))
    return report, [Anchor.SMITH_FORM]


def cmd_copies(args: argparse.Namespace, config: RunConfig) -> Outcome:
    ambient, coker = parse_group_spec(args.ambient), parse_group_spec(args.coker)
    count = max_disjoint_copies(ambient, coker)
    result = {
        "ambient": group_view(ambient),
        "coker": group_view(coker),
        "copies": UNBOUNDED if count is None else count,
    }
    return result, [Anchor.COKERNEL_INJECTION, Anchor.BOUNDED_COPIES]


# Generation

def _param_pairs(pairs: Sequence[str]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise InvalidParameterError(f"--param expects key=value, got {pair!r}", element=pair)
        params[key.strip()] = value.strip()
    return params


def cmd_gen(args: argparse.Namespace, config: RunConfig) -> Outcome:
    params = _param_pairs(args.param)
    if args.n is not None:
        params["n"] = args.n
    if args.soliton:
        params["soliton"] = args.soliton
    return generate_space(args.kind, params, config.seed), []


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], Outcome]] = {
    "select": cmd_select,
    "sequence": cmd_sequence,
    "growth": cmd_growth,
    "blowup": cmd_blowup,
    "shi": cmd_shi,
    "audit": cmd_audit,
    "kappa": cmd_kappa,
    "snf": cmd_snf,
    "group": cmd_group,
    "double": cmd_double,
    "tensor": cmd_tensor,
    "spaceform": cmd_spaceform,
    "obstruct": cmd_obstruct,
    "feasible": cmd_feasible,
    "exact": cmd_exact,
    "copies": cmd_copies,
    "gen": cmd_gen,
}


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration file")
    common.add_argument("--tolerance", type=float, help="audit tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, help="generator seed")
    common.add_argument("--quotient-cap", type=int, help="largest group order for quotient enumeration")
    common.add_argument("--workers", type=int, help="worker threads for batch selection")
    common.add_argument("--out", type=Path, help="also write the report to this file")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = CliParser(prog="grs", description="Point selection certificates and homological obstructions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, help_text: str) -> CliParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("select", "run point selection from one start")
    p.add_argument("--space", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--a0", type=_number, help="scale A0 (default P0^1/2 / 3)")
    p.add_argument("--verify", action="store_true", help="re-check the certificate independently")

    p = add("sequence", "point selection with A_i = P_i^1/2 / 3 from several starts")
    p.add_argument("--space", required=True)
    p.add_argument("--starts", required=True, help="comma-separated point ids")

    p = add("growth", "fit a curvature growth constant")
    p.add_argument("--space", required=True)
    p.add_argument("--model", required=True, choices=[m.value for m in GrowthModel])

    p = add("blowup", "rank blow-up candidates")
    p.add_argument("--space", required=True)
    p.add_argument("--mode", required=True, choices=sorted(_BLOWUP_MODES))
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--no-certificates", action="store_true")

    p = add("shi", "largest local-derivative radius at a point")
    p.add_argument("--space", required=True)
    p.add_argument("--point", required=True)

    p = add("audit", "check soliton identities")
    p.add_argument("--space", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--scale", type=_number, default=1, help="rescaling factor Q for the normalization clause")

    p = add("kappa", "check volume noncollapsing")
    p.add_argument("--space", required=True)
    p.add_argument("--kappa", type=_number, required=True)

    p = add("snf", "Smith normal form of a matrix document")
    p.add_argument("--matrix", required=True)

    p = add("group", "group presented by relations")
    p.add_argument("--relations", required=True)

    p = add("double", "direct-double test")
    p.add_argument("--group", required=True)

    p = add("tensor", "dimensions of G (x) Z_p, Hom(G, Z_p), Ext(G, Z_p)")
    p.add_argument("--group", required=True)
    p.add_argument("-p", type=int, required=True)

    p = add("spaceform", "describe or classify spherical space form groups")
    p.add_argument("--family")
    p.add_argument("--n", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check with the quaternion oracle")
    p.add_argument("--classify", action="store_true", help="direct-double split of the catalog")
    p.add_argument("--max-param", type=int, default=12)

    p = add("obstruct", "bounded-copies pipeline for an end group")
    p.add_argument("--gamma", required=True)
    p.add_argument("--trace", help="write the step trace to this file")

    p = add("feasible", "candidates for H1(M) given H1 of the boundary")
    p.add_argument("--group", required=True)

    p = add("exact", "exactness of a sequence document")
    p.add_argument("--sequence", required=True)

    p = add("copies", "maximal number of disjoint copies")
    p.add_argument("--ambient", required=True)
    p.add_argument("--coker", required=True)

    p = add("gen", "generate a space document")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--soliton", choices=["steady", "shrinking"])
    p.add_argument("--param", action="append", default=[], help="key=value generator parameter")
    return parser


def _write_json(path: Path, document: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _emit(document: Any, out: Optional[Path]) -> None:
    text = json.dumps(document, sort_keys=True, indent=2)
    sys.stdout.write(text + "\n")
    if out is not None:
        _write_json(out, document)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.getLevelName((args.log_level or settings.LOG_LEVEL).upper())
    if not isinstance(level, int):
        parser.error(f"unknown log level: {args.log_level}")
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_run_config(
            args.config,
            {
                "tolerance": args.tolerance,
                "seed": args.seed,
                "quotient_cap": args.quotient_cap,
                "output_path": args.out,
                "max_workers": args.workers,
            },
        )
        result, anchors = COMMANDS[args.command](args, config)
        if args.command == "gen":
            document = result
        else:
            report = CommandReport(command=args.command, result=result, anchors=[a.value for a in anchors])
            document = report.model_dump(mode="json")
        _emit(document, config.output_path)
    except GrsError as e:
        logger.error(f"{args.command}: {e.message}")
        sys.stderr.write(json.dumps({"error": e.to_dict()}, sort_keys=True, default=str) + "\n")
        return 1
    except InvariantViolation as e:
        logger.critical(f"{args.command}: internal invariant violated: {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
