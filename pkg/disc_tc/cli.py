"""Command-line front end: one subcommand per pipeline, JSON on stdout."""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from . import __version__, config
from .config_spaces import PlanarConfig
from .errors import DiscTCError, ParseError
from .lattice import homog_lattice
from .morse import verify_signatures
from .planner import PlanOptions, build_catalog, plan
from .poly import parse_polynomial
from .reports import (
    create_bound_report,
    create_catalog_report,
    create_discriminants_report,
    create_lattice_report,
    create_plan_report,
    create_signature_report,
    render_svg,
    summarise,
    write_report,
)
from .torus import bound_report, parse_action_matrix, validate_action

logger = logging.getLogger(__name__)

COMMANDS = ("homog", "bound", "verify-hessian", "discriminants", "plan", "catalog")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Optional[Path] = None
    xi: Optional[Path] = None
    out: Optional[Path] = None
    seed: int = 0
    samples: int = 1000
    grad_tol: float = config.GRAD_TOL
    null_tol: float = config.NULL_TOL
    fd_tol: float = config.FD_TOL
    potential: str = "g"
    n: Optional[int] = None
    svg: Optional[Path] = None
    log_file: Optional[Path] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            input=args.input,
            xi=getattr(args, "xi", None),
            out=args.out,
            seed=args.seed,
            samples=getattr(args, "samples", 1000),
            grad_tol=args.grad_tol,
            null_tol=args.null_tol,
            fd_tol=args.fd_tol,
            potential=getattr(args, "potential", "g"),
            n=getattr(args, "n", None),
            svg=getattr(args, "svg", None),
            log_file=args.log_file,
        )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disc-tc",
        description="Topological complexity bounds and Morse numerics for discriminantal varieties",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="Input JSON file")
    common.add_argument("--out", type=Path, help="Also write the JSON report here")
    common.add_argument("--seed", type=int, default=0, help="Seed for all sampling (default: 0)")
    common.add_argument("--grad-tol", type=float, default=config.GRAD_TOL, help="Gradient-norm tolerance")
    common.add_argument("--null-tol", type=float, default=config.NULL_TOL, help="Relative eigenvalue tolerance")
    common.add_argument("--fd-tol", type=float, default=config.FD_TOL, help="Finite-difference tolerance")
    common.add_argument("--log-file", type=Path, help="Append log records to this file")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("homog", parents=[common], help="Lattice of homogeneisations of a polynomial")
    bound = sub.add_parser("bound", parents=[common], help="TC bound 2m - s + t for a torus action")
    bound.add_argument("--xi", type=Path, required=True, help="JSON action matrix")
    verify = sub.add_parser("verify-hessian", parents=[common], help="Sample Hessian signatures on V")
    verify.add_argument("--samples", type=int, default=1000, help="Number of sample points (default: 1000)")
    disc = sub.add_parser("discriminants", parents=[common], help="Configuration-space bounds for n points")
    disc.add_argument("--n", type=int, required=True, help="Number of points")
    plan_cmd = sub.add_parser("plan", parents=[common], help="Plan a path between two configurations")
    plan_cmd.add_argument("--potential", choices=config.POTENTIALS, default="g")
    plan_cmd.add_argument("--svg", type=Path, help="Render the path trails as SVG")
    catalog = sub.add_parser("catalog", parents=[common], help="Critical configuration catalog")
    catalog.add_argument("--n", type=int, required=True, help="Number of points")
    catalog.add_argument("--potential", choices=config.POTENTIALS, default="g")
    return parser


def setup_logging(log_file: Optional[Path] = None) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if config.debug_mode() else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def _require_input(run: RunConfig) -> Path:
    if run.input is None:
        raise ParseError(f"'{run.command}' needs --input", "--input")
    return run.input


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc


def _read_json(path: Path) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path} line {exc.lineno} column {exc.colno}") from exc


def cmd_homog(run: RunConfig) -> Dict[str, Any]:
    delta = parse_polynomial(_read_text(_require_input(run)))
    lattice = homog_lattice(delta)
    logger.info(f"Homog lattice has rank {lattice.rank} in Z^{lattice.dim}")
    return create_lattice_report(lattice)


def cmd_bound(run: RunConfig) -> Dict[str, Any]:
    delta = parse_polynomial(_read_text(_require_input(run)))
    assert run.xi is not None
    action = validate_action(delta, parse_action_matrix(_read_json(run.xi)))
    payload = create_bound_report(bound_report(delta, action))
    logger.info(f"Bound: {summarise(payload, ['m', 's', 't', 'bound'])}")
    return payload


def cmd_verify_hessian(run: RunConfig) -> Dict[str, Any]:
    delta = parse_polynomial(_read_text(_require_input(run)))
    report = verify_signatures(delta, run.samples, run.rng(), run.null_tol, fd_tol=run.fd_tol)
    logger.info(f"Signature check: {report.summary()}")
    return create_signature_report(report)


def cmd_discriminants(run: RunConfig) -> Dict[str, Any]:
    assert run.n is not None
    return create_discriminants_report(run.n)


def cmd_plan(run: RunConfig) -> Dict[str, Any]:
    payload = _read_json(_require_input(run))
    if not isinstance(payload, dict) or "start" not in payload or "end" not in payload:
        raise ParseError("a plan request needs 'start' and 'end' configurations", "request")
    start = PlanarConfig.from_json(payload["start"], "start")
    end = PlanarConfig.from_json(payload["end"], "end")
    options = PlanOptions(potential=run.potential, grad_tol=run.grad_tol)
    result = plan(start, end, options)
    logger.info(
        f"Planned path with {len(result.path)} samples, min margin {result.path.min_margin:.4f}"
    )
    if run.svg is not None:
        render_svg(result, run.svg)
    return create_plan_report(result)


def cmd_catalog(run: RunConfig) -> Dict[str, Any]:
    assert run.n is not None
    return create_catalog_report(build_catalog(run.n, run.potential))


HANDLERS: Dict[str, Callable[[RunConfig], Dict[str, Any]]] = {
    "homog": cmd_homog,
    "bound": cmd_bound,
    "verify-hessian": cmd_verify_hessian,
    "discriminants": cmd_discriminants,
    "plan": cmd_plan,
    "catalog": cmd_catalog,
}


def run_command(run: RunConfig) -> Dict[str, Any]:
    return HANDLERS[run.command](run)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    run = RunConfig.from_args(args)
    setup_logging(run.log_file)
    try:
        payload = run_command(run)
    except DiscTCError as exc:
        logger.error(f"{run.command} failed: {exc}")
        return exc.exit_code
    sys.stdout.write(write_report(payload, run.out))
    return config.EXIT_CODES["ok"]
