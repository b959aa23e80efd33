#!/usr/bin/env python3
"""Command-line front end for cone-surface length computations and inversion."""

import argparse
import csv
import io
import json
import logging
import math
import sys
from itertools import permutations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError

# Add src directory to Python path
src_dir = Path(__file__).parent.parent.parent
sys.path.append(str(src_dir))

from src.common.config import settings
from src.common.document import FamilyRecord, SpectrumRecord, SurfaceDocument, parse_spec, write_real
from src.common.errors import ConeLengthError, DomainError, SolverError
from src.common.models import BoundaryKind, CurveId, CurveKind, GeneralizedLength, RunConfig
from src.geometry import pants
from src.geometry.xpiece import TorusSpec, XPieceSpec, family_lengths, torus_family_lengths
from src.inversion.boundary import recover_cone_pair, recover_single_boundary, try_solve_bc_system
from src.inversion.surface import curve_budget, probe_rows, recover_surface
from src.inversion.twist import best_window, recover_twist
from src.teich.compare import comparison_constants, verify_length_bounds
from src.teich.families import FamilyKind, embedded_family, family_spec
from src.teich.metric import almost_isometry_gap, boundary_convergence, thurston_distance_lb
from src.teich.spectrum import curve_manifest, forward_spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_USAGE = 64

DEFAULT_TOLERANCE = settings.SOLVER_TOLERANCE

COMMANDS = (
    "eval", "pants-info", "family-lengths", "invert-twist", "invert-boundary",
    "invert-surface", "compare", "dist", "limit", "budget",
)

Result = Union[SurfaceDocument, List[Dict[str, Any]], int]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with EX_USAGE."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def setup_logging(level_name: str, verbose: bool = False):
    """Set up logging configuration from CONELENGTH_LOG (off, info, debug)."""
    levels = {"off": logging.CRITICAL + 10, "info": logging.INFO, "debug": logging.DEBUG}
    level = logging.DEBUG if verbose else levels.get(level_name.lower(), logging.CRITICAL + 10)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="Surface document (JSON)")
    common.add_argument("--output", default="-", help="Output path, '-' for stdout (default: -)")
    common.add_argument(
        "--format",
        choices=["table", "csv", "json"],
        default=settings.OUTPUT_FORMAT,
        help=f"Output format (default: {settings.OUTPUT_FORMAT})",
    )
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                        help="Residual tolerance of the one-dimensional solves")
    common.add_argument("--max-twist", type=int, default=settings.MAX_TWIST_INDEX,
                        help="Largest |twist index| enumerated by family commands")
    common.add_argument("--hex-floats", action="store_true", help="Write reals as hexadecimal floats")
    common.add_argument("--parallelism", type=int, default=settings.PARALLELISM,
                        help="Worker threads for curve evaluation")
    common.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")

    parser = _Parser(description="Lengths of curves on surfaces with cone points, cusps and geodesic boundaries")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    sub.add_parser("eval", parents=[common], help="Lengths of the curve manifest (or the document's curves)")

    p = sub.add_parser("pants-info", parents=[common], help="Traces, coefficients and perpendiculars of one pants")
    p.add_argument("--cuffs", type=float, nargs=3, required=True, metavar="LAMBDA")

    p = sub.add_parser("family-lengths", parents=[common], help="Twist family members -N..N")
    p.add_argument("--curve", type=int, default=0, help="Internal curve of the input surface (default: 0)")
    shape = p.add_mutually_exclusive_group()
    shape.add_argument("--xpiece", type=float, nargs=4, metavar=("TA", "CA", "TB", "CB"),
                       help="Targets and companions of a standalone X-piece")
    shape.add_argument("--torus", type=float, metavar="LAMBDA", help="Boundary of a standalone one-holed torus")
    p.add_argument("--waist", type=float, help="Waist length of the standalone piece")
    p.add_argument("--twist", type=float, default=0.0, help="Twist of the standalone piece")

    p = sub.add_parser("invert-twist", parents=[common], help="Twist from three consecutive family lengths")
    p.add_argument("--curve", type=int, default=0)

    p = sub.add_parser("invert-boundary", parents=[common], help="Companion boundaries of one probed X-piece")
    p.add_argument("--curve", type=int, required=True)
    p.add_argument("--targets", type=float, nargs=2, metavar=("TA", "TB"),
                   help="Target lengths (default: read from the input surface)")
    p.add_argument("--known-companion", type=float, metavar="LAMBDA",
                   help="Companion on side b when it is already known")

    sub.add_parser("invert-surface", parents=[common], help="Fenchel-Nielsen coordinates from a length spectrum")

    p = sub.add_parser("compare", parents=[common], help="Comparison constants and bound verification")
    p.add_argument("--lambda", dest="lambdas", type=float, nargs="+", metavar="LAMBDA")

    p = sub.add_parser("dist", parents=[common], help="Length-ratio distance between two surfaces")
    p.add_argument("--other", required=True, help="Second surface document")

    p = sub.add_parser("limit", parents=[common], help="Normalized lengths along a twist ray")
    p.add_argument("--curve", type=int, default=0)
    p.add_argument("--twists", type=float, nargs="+", required=True)

    p = sub.add_parser("budget", parents=[common], help="Curve budget 12g - 12 + 32n")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--boundaries", type=int, required=True)

    return parser.parse_args(argv)


def _document(args: argparse.Namespace) -> SurfaceDocument:
    if not args.input:
        raise DomainError(f"'{args.command}' needs --input", {"flag": "--input"})
    return parse_spec(args.input)


def _quantities(values: Dict[str, Any]) -> List[Dict[str, Any]]:
    return [{"quantity": k, "value": v} for k, v in values.items()]


def cmd_eval(args: argparse.Namespace, config: RunConfig) -> Result:
    doc = _document(args)
    surface = doc.surface()
    curves = [CurveId.parse(r.family, r.n) for r in doc.spectrum] or curve_manifest(surface)
    budget = curve_budget(surface.genus, len(surface.boundaries))
    if not doc.spectrum and len(curves) > budget:
        logger.warning(f"Manifest of {len(curves)} curves exceeds the budget {budget}")
    spectrum = forward_spectrum(surface, curves, config.parallelism)
    return SurfaceDocument.from_surface(surface, spectrum)


def cmd_pants_info(args: argparse.Namespace, config: RunConfig) -> Result:
    spec = pants.PantsSpec.of(*args.cuffs)
    cuffs, kinds = spec.cuffs, spec.kinds()
    values: Dict[str, Any] = {}
    for i, (g, m) in enumerate(zip(cuffs, spec.traces)):
        values[f"kind[{i}]"] = kinds[i].value
        values[f"trace[{i}]"] = m
        values[f"sine_trace[{i}]"] = pants.sine_trace(g)
    for t, c, w in permutations(range(3)):
        if kinds[w] != BoundaryKind.GEODESIC:
            continue
        coeff = pants.coefficients(cuffs[t], cuffs[c], cuffs[w].value)
        tag = f"[target={t},companion={c},waist={w}]"
        values[f"U{tag}"] = coeff.U
        values[f"V{tag}"] = coeff.V
        values[f"distance{tag}"] = pants.cone_distance(cuffs[t], cuffs[c], cuffs[w].value)
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        if kinds[i] == kinds[j] == BoundaryKind.GEODESIC:
            k = 3 - i - j
            values[f"perp[{i},{j}]"] = pants.perp_between(cuffs[i], cuffs[j], cuffs[k])
    for i, g in enumerate(cuffs):
        if kinds[i] == BoundaryKind.GEODESIC:
            others = [cuffs[k] for k in range(3) if k != i]
            values[f"self_perp_separating[{i}]"] = pants.self_perp_one(g, *others)
            values[f"self_perp_winding[{i}]"] = pants.self_perp_two(g, *others)
    return _quantities(values)


def cmd_family_lengths(args: argparse.Namespace, config: RunConfig) -> Result:
    n_max = config.max_twist_index
    indices = list(range(-n_max, n_max + 1))
    if args.xpiece or args.torus is not None:
        if args.waist is None:
            raise DomainError("A standalone piece needs --waist", {"flag": "--waist"})
        j = 0
        if args.xpiece:
            spec = XPieceSpec.of(*args.xpiece, waist=args.waist, twist=args.twist)
            kind, lengths = FamilyKind.XPIECE, family_lengths(spec, indices)
        else:
            spec = TorusSpec.of(args.waist, args.torus, args.twist)
            kind, lengths = FamilyKind.TORUS, torus_family_lengths(spec, indices)
        records = [SpectrumRecord(family=f"pants/{j}", n=0, length=args.waist)]
        records += [SpectrumRecord(family=f"twist/{j}", n=n, length=l) for n, l in zip(indices, lengths)]
        return SurfaceDocument(families=[FamilyRecord(curve=j, kind=kind.value)], spectrum=records)

    doc = _document(args)
    surface = doc.surface()
    j = args.curve
    family = embedded_family(surface.topology, j)
    curves = [CurveId(curve=j, kind=CurveKind.PANTS)]
    curves += [CurveId(curve=j, kind=CurveKind.TWIST, index=n) for n in indices]
    result = SurfaceDocument.from_surface(surface, forward_spectrum(surface, curves, config.parallelism))
    return result.model_copy(update={"families": [FamilyRecord(curve=j, kind=family.kind.value)]})


def cmd_invert_twist(args: argparse.Namespace, config: RunConfig) -> Result:
    doc = _document(args)
    spectrum = doc.length_spectrum()
    j = args.curve
    kind = doc.family_kind(j)
    if kind is None and doc.pants is not None:
        kind = embedded_family(doc.topology(), j).kind.value
    waist = spectrum[CurveId(curve=j, kind=CurveKind.PANTS)]
    sample = {n: spectrum[CurveId(curve=j, kind=CurveKind.TWIST, index=n)]
              for n in spectrum.indices(j, CurveKind.TWIST)}
    torus = kind == FamilyKind.TORUS.value
    twist = recover_twist(sample, waist, torus=torus)
    return _quantities({"curve": j, "family": kind or FamilyKind.XPIECE.value,
                        "window": best_window(sample), "twist": twist})


def cmd_invert_boundary(args: argparse.Namespace, config: RunConfig) -> Result:
    doc = _document(args)
    spectrum = doc.length_spectrum()
    j = args.curve
    if args.targets:
        target_a, target_b = (GeneralizedLength.of(v) for v in args.targets)
    else:
        spec = family_spec(doc.surface(), j)
        if not isinstance(spec, XPieceSpec):
            raise DomainError(f"Curve {j} spans a one-holed torus", {"curve": j})
        target_a, target_b = spec.target_a, spec.target_b
    m3, m3p = pants.trace(target_a), pants.trace(target_b)
    rows = probe_rows(spectrum, j)
    unknowns = try_solve_bc_system(rows)
    values: Dict[str, Any] = {"rows": len(rows), "linear_system": unknowns is not None}
    if unknowns is not None:
        values.update({"S": unknowns.S, "T": unknowns.T, "Q": unknowns.Q, "P": unknowns.P,
                       "condition": unknowns.condition})
    if args.known_companion is not None:
        known = pants.trace(GeneralizedLength.of(args.known_companion))
        values["lambda_a"] = recover_single_boundary(unknowns, m3, known, m3p, rows).value
    else:
        low, high = recover_cone_pair(unknowns, m3, m3p, rows)
        values["lambda_low"], values["lambda_high"] = low.value, high.value
    return _quantities(values)


def cmd_invert_surface(args: argparse.Namespace, config: RunConfig) -> Result:
    doc = _document(args)
    spectrum = doc.length_spectrum()
    topology = doc.topology()
    budget = curve_budget(topology.genus, topology.n_boundaries)
    logger.info(f"Reading {len(spectrum)} curves (budget {budget})")
    surface = recover_surface(topology, spectrum, parallelism=config.parallelism)
    return SurfaceDocument.from_surface(surface)


def cmd_compare(args: argparse.Namespace, config: RunConfig) -> Result:
    surface = _document(args).surface() if args.input else None
    if surface is not None and args.lambdas:
        surface = surface.with_boundaries(args.lambdas)
    lambdas = args.lambdas if surface is None else surface.boundaries
    if lambdas is None:
        raise DomainError("'compare' needs --lambda or --input", {"flag": "--lambda"})
    constants = comparison_constants(lambdas)
    values: Dict[str, Any] = {"C": constants.C, "D": constants.D}
    values.update({f"case_{k}": v for k, v in constants.cases.items()})
    if surface is not None:
        report = verify_length_bounds(surface, max_index=config.max_twist_index)
        values.update({
            "checked": report.checked,
            "worst_gap": report.worst_gap,
            "worst_additive_slack": report.worst_additive_slack,
            "worst_ratio": report.worst_ratio,
            "violations": len(report.violations),
        })
    return _quantities(values)


def cmd_dist(args: argparse.Namespace, config: RunConfig) -> Result:
    x1 = _document(args).surface()
    x2 = parse_spec(args.other).surface()
    n, workers = config.max_twist_index, config.parallelism
    constants = comparison_constants(x1.boundaries)
    return _quantities({
        "curves": x1.n_curves * (2 * n + 2),
        "distance_lb": thurston_distance_lb(x1, x2, n, workers),
        "reverse_distance_lb": thurston_distance_lb(x2, x1, n, workers),
        "cusp_gap": almost_isometry_gap(x1, x2, n, workers),
        "cusp_gap_bound": 2.0 * math.log(constants.C),
    })


def cmd_limit(args: argparse.Namespace, config: RunConfig) -> Result:
    surface = _document(args).surface()
    report = boundary_convergence(surface, args.curve, args.twists, config.max_twist_index, config.parallelism)
    return [
        {
            "twist": s.twist,
            "profile_error": s.profile_error,
            "waist_entry": s.waist_entry,
            "constant": s.constant,
            "expected_constant": s.expected_constant,
            "constant_error": s.constant_error,
        }
        for s in report.samples
    ]


def cmd_budget(args: argparse.Namespace, config: RunConfig) -> Result:
    return curve_budget(args.genus, args.boundaries)


HANDLERS = {
    "eval": cmd_eval,
    "pants-info": cmd_pants_info,
    "family-lengths": cmd_family_lengths,
    "invert-twist": cmd_invert_twist,
    "invert-boundary": cmd_invert_boundary,
    "invert-surface": cmd_invert_surface,
    "compare": cmd_compare,
    "dist": cmd_dist,
    "limit": cmd_limit,
    "budget": cmd_budget,
}


def _cell(value: Any, hex_floats: bool) -> Any:
    if isinstance(value, float):
        return write_real(value, hex_floats) if hex_floats else repr(value)
    return value


def render(result: Result, config: RunConfig) -> str:
    """Text of a command result in the configured format."""
    fmt, hex_floats = config.output_format.value, config.hex_floats
    if isinstance(result, SurfaceDocument):
        if fmt == "json":
            return result.dumps(hex_floats) + "\n"
        rows: List[Dict[str, Any]] = [
            {"family": r.family, "n": r.n, "length": r.length} for r in result.spectrum
        ] or _quantities(result.to_json(hex_floats))
    elif isinstance(result, int):
        if fmt == "json":
            return json.dumps({"value": result}) + "\n"
        return f"{result}\n"
    else:
        rows = result
    if fmt == "json":
        return json.dumps([{k: write_real(v, hex_floats) if isinstance(v, float) else v
                            for k, v in row.items()} for row in rows], indent=2) + "\n"
    if not rows:
        return ""
    fields = list(rows[0])
    cells = [[str(_cell(row.get(k), hex_floats)) for k in fields] for row in rows]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(fields)
        writer.writerows(cells)
        return buffer.getvalue()
    widths = [max(len(f), *(len(c[i]) for c in cells)) for i, f in enumerate(fields)]
    lines = ["  ".join(f.ljust(w) for f, w in zip(fields, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _write(text: str, output: str):
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _error_record(record: Dict[str, Any]):
    sys.stderr.write(json.dumps(record, default=str) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the exit status."""
    try:
        args = parse_args(argv)
    except UsageError as e:
        _error_record({"error": "UsageError", "message": str(e), "details": {"commands": list(COMMANDS)}})
        return EXIT_USAGE
    setup_logging(settings.CONELENGTH_LOG, args.verbose)

    try:
        config = RunConfig(
            tolerance=args.tolerance,
            max_twist_index=args.max_twist,
            output_format=args.format,
            parallelism=args.parallelism,
            hex_floats=args.hex_floats,
        )
    except ValidationError as e:
        _error_record({"error": "SchemaError", "message": "Invalid run options",
                       "details": {"violations": [{"field": ".".join(map(str, err["loc"])), "message": err["msg"]}
                                                  for err in e.errors()]}})
        return EXIT_VALIDATION
    settings.SOLVER_TOLERANCE = config.tolerance

    try:
        result = HANDLERS[args.command](args, config)
        _write(render(result, config), args.output)
    except DomainError as e:
        logger.error(f"{args.command}: {e.message}")
        _error_record(e.to_record())
        return EXIT_VALIDATION
    except SolverError as e:
        logger.error(f"{args.command}: {e.message}")
        _error_record(e.to_record())
        return EXIT_SOLVER
    except ConeLengthError as e:
        _error_record(e.to_record())
        return EXIT_SOLVER
    except Exception as e:
        logger.error(f"Error during {args.command}: {e}", exc_info=True)
        _error_record({"error": type(e).__name__, "message": str(e), "details": {}})
        return EXIT_UNEXPECTED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
