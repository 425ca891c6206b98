#!/usr/bin/env python3
"""
eh-certify command-line entry point.

Subcommands:
  dichotomy   certificate for a graph against a caterpillar pattern
  gen         seeded instance generator (with planted-answer sidecars)
  verify      re-check a certificate against a graph
  constants   exact constant schedule for a shape
  export-dot  Graphviz rendering of a graph, fern or junior caterpillar

Exit codes: 0 verified / success, 1 usage or parse error, 2 diagnostic failure.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from src.logging_setup import configure_logging, level_from_name, suppress_warnings

# Suppress warnings before the heavier imports
suppress_warnings()

from src.dot_export import parse_structure, structure_to_dot
from src.errors import DiagnosticFailure, EHCertifyError, InvariantViolation, ParameterError
from src.generators import GENERATORS, generate
from src.graph_core import CaterpillarShape, Graph, shape_for
from src.graph_io import read_graph, write_graph
from src.oracle import Certificate, verify_certificate
from src.pipeline import DichotomyOptions, constants, run_dichotomy
from src.rationals import FractionField, parse_fraction
from src.settings import Settings, get_settings

logger = logging.getLogger("eh_certify")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIAGNOSTIC = 2


class RunConfig(BaseModel):
    """Everything one subcommand invocation needs; the seed fixes all randomness"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    input: Optional[Path] = None
    pattern: Optional[Path] = None
    shape: Optional[CaterpillarShape] = None
    seed: int = 0
    ell: Optional[int] = None
    eps: Optional[FractionField] = None
    alpha: Optional[FractionField] = None
    budget: int = 200_000
    threads: int = 1
    guarantee: bool = False
    concurrent: bool = False
    out: Optional[Path] = None
    report: Optional[Path] = None
    certificate: Optional[Path] = None
    structure: Optional[Path] = None
    generator: Optional[str] = None
    n: Optional[int] = None
    p: FractionField = Fraction(1, 2)
    delta: int = 3
    size: Optional[int] = None
    sidecar: Optional[Path] = None
    verbose: bool = False


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out.write_text(text)
        logger.info(f"Wrote {out}")


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _pattern_graph(cfg: RunConfig) -> Graph:
    if cfg.pattern is None:
        raise ParameterError("pass either --shape h,d,t or --pattern FILE")
    return read_graph(cfg.pattern)


def cmd_dichotomy(cfg: RunConfig) -> int:
    g0 = read_graph(cfg.input)
    pattern = cfg.shape if cfg.shape is not None else _pattern_graph(cfg)
    options = DichotomyOptions(
        ell=cfg.ell, eps=cfg.eps, alpha=cfg.alpha, budget=cfg.budget, seed=cfg.seed,
        concurrent=cfg.concurrent, threads=cfg.threads, guarantee=cfg.guarantee,
    )
    run = run_dichotomy(g0, pattern, options)
    _emit(_dump(run.certificate.model_dump(mode="json")), cfg.out)
    if cfg.report is not None:
        cfg.report.write_text(_dump(run.report.model_dump(mode="json")))
    logger.info(f"{run.certificate.kind} certificate verified (stage {run.report.stage_reached})")
    return EXIT_OK


def cmd_gen(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise ParameterError("gen needs --n")
    instance = generate(cfg.generator, cfg.n, cfg.seed, p=cfg.p, delta=cfg.delta,
                        shape=cfg.shape, size=cfg.size)
    write_graph(instance.graph, cfg.out)
    logger.info(f"Generated {cfg.generator} instance {instance.graph!r} -> {cfg.out}")
    if cfg.sidecar is not None:
        if instance.sidecar is None:
            logger.warning(f"{cfg.generator} plants no certificate; no sidecar written")
        else:
            cfg.sidecar.write_text(_dump(instance.sidecar.model_dump(mode="json")))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    g0 = read_graph(cfg.input)
    try:
        cert = Certificate.model_validate_json(cfg.certificate.read_text())
    except OSError as e:
        raise ParameterError(f"cannot read certificate {cfg.certificate}: {e}") from e
    verdict = verify_certificate(g0, cert)
    _emit(_dump({"verified": verdict.ok, "kind": cert.kind, "reason": verdict.reason}), cfg.out)
    if not verdict:
        logger.error(f"Certificate rejected: {verdict.reason}")
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def cmd_constants(cfg: RunConfig) -> int:
    schedule = constants(cfg.shape if cfg.shape is not None else shape_for(_pattern_graph(cfg)))
    payload = schedule.as_report()
    payload["materialisable"] = schedule.materialisable
    _emit(_dump(payload), cfg.out)
    return EXIT_OK


def cmd_export_dot(cfg: RunConfig) -> int:
    g = read_graph(cfg.input)
    structure = None
    if cfg.structure is not None:
        try:
            structure = parse_structure(cfg.structure.read_text())
        except OSError as e:
            raise ParameterError(f"cannot read structure {cfg.structure}: {e}") from e
    _emit(structure_to_dot(g, structure), cfg.out)
    return EXIT_OK


COMMANDS = {
    "dichotomy": cmd_dichotomy,
    "gen": cmd_gen,
    "verify": cmd_verify,
    "constants": cmd_constants,
    "export-dot": cmd_export_dot,
}


def _shape_arg(text: str) -> CaterpillarShape:
    try:
        return CaterpillarShape.parse(text)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e))


def _fraction_arg(text: str):
    try:
        return parse_fraction(text)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging, including the search trace")

    parser = argparse.ArgumentParser(prog="eh-certify", description="Verified certificates for the caterpillar dichotomy")
    sub = parser.add_subparsers(dest="command", required=True)

    dic = sub.add_parser("dichotomy", parents=[common], help="pair or induced caterpillar certificate")
    dic.add_argument("--input", type=Path, required=True)
    pat = dic.add_mutually_exclusive_group(required=True)
    pat.add_argument("--pattern", type=Path)
    pat.add_argument("--shape", type=_shape_arg)
    dic.add_argument("--seed", type=int, default=0)
    dic.add_argument("--ell", type=int, default=None)
    dic.add_argument("--eps", type=_fraction_arg, default=None)
    dic.add_argument("--alpha", type=_fraction_arg, default=None)
    dic.add_argument("--budget", type=int, default=None)
    dic.add_argument("--guarantee", action="store_true", help="reject overrides violating 10*hdt*2^(hd)*ell*eps < alpha")
    dic.add_argument("--concurrent", action="store_true", help="probe both polarities concurrently")
    dic.add_argument("--out", type=Path, default=None)
    dic.add_argument("--report", type=Path, default=None)

    gen = sub.add_parser("gen", parents=[common], help="generate a seeded instance")
    gen.add_argument("generator", choices=sorted(GENERATORS))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=_fraction_arg, default=Fraction(1, 2))
    gen.add_argument("--delta", type=int, default=3)
    gen.add_argument("--shape", type=_shape_arg, default=None)
    gen.add_argument("--size", type=int, default=None)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--sidecar", type=Path, default=None)

    ver = sub.add_parser("verify", parents=[common], help="verify a certificate against a graph")
    ver.add_argument("--input", type=Path, required=True)
    ver.add_argument("--certificate", type=Path, required=True)
    ver.add_argument("--out", type=Path, default=None)

    con = sub.add_parser("constants", parents=[common], help="exact constant schedule")
    src_group = con.add_mutually_exclusive_group(required=True)
    src_group.add_argument("--shape", type=_shape_arg)
    src_group.add_argument("--pattern", type=Path)
    con.add_argument("--out", type=Path, default=None)

    dot = sub.add_parser("export-dot", parents=[common], help="Graphviz DOT rendering")
    dot.add_argument("--input", type=Path, required=True)
    dot.add_argument("--structure", type=Path, default=None)
    dot.add_argument("--out", type=Path, default=None)

    return parser


def config_from_args(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """Merge parsed flags over the environment settings"""
    values = {k: v for k, v in vars(args).items() if v is not None}
    values.setdefault("budget", settings.budget)
    values["threads"] = settings.threads
    return RunConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; the contract reserves 2 for diagnostics
        return EXIT_USAGE if e.code else EXIT_OK
    settings = get_settings()
    configure_logging(logging.DEBUG if args.verbose else level_from_name(settings.log_level))

    try:
        cfg = config_from_args(args, settings)
        return COMMANDS[cfg.command](cfg)
    except DiagnosticFailure as e:
        logger.error(f"No certificate: {e}")
        print(json.dumps({"error": str(e), "diagnostics": e.diagnostics}, indent=2, sort_keys=True, default=str), file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except InvariantViolation as e:
        logger.error(f"Internal invariant violated, nothing emitted: {e}")
        return EXIT_DIAGNOSTIC
    except (EHCertifyError, ValidationError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
