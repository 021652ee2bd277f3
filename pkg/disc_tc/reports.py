"""Report payloads and their rendering (JSON documents and optional SVG trails)."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config_spaces import bound_report_for_config_spaces
from .errors import SvgUnavailableError
from .lattice import HomogLattice
from .morse import SignatureReport
from .planner import CriticalCatalog, PlanResult
from .torus import BoundReport

logger = logging.getLogger(__name__)


def create_lattice_report(lattice: HomogLattice) -> Dict[str, Any]:
    payload = lattice.to_json()
    payload["dim"] = lattice.dim
    payload["reference_exponent"] = list(lattice.reference)
    return payload


def create_bound_report(report: BoundReport) -> Dict[str, Any]:
    return report.to_json()


def create_signature_report(report: SignatureReport) -> Dict[str, Any]:
    return {
        "m": report.dim,
        "records": [r.to_json() for r in report.records],
        "summary": report.summary(),
    }


def create_discriminants_report(n: int) -> Dict[str, Any]:
    """Both configuration-space routes for n points."""
    routes = {}
    for name, ordered in (("ordered", True), ("unordered", False)):
        routes[name] = bound_report_for_config_spaces(n, ordered).to_json()
    return {"n": n, "expected": 2 * n - 3, "routes": routes}


def create_plan_report(result: PlanResult) -> Dict[str, Any]:
    return result.to_json()


def create_catalog_report(catalog: CriticalCatalog) -> Dict[str, Any]:
    return catalog.to_json()


def dump_json(payload: Any) -> str:
    """Stable serialisation: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_report(payload: Any, out: Optional[Path]) -> str:
    text = dump_json(payload)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logger.debug(f"Wrote report to {out}")
    return text


def render_svg(result: PlanResult, out: Path) -> None:
    """Draw each point's trail; requires the `svg` extra."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise SvgUnavailableError("SVG output needs matplotlib (pip install disc-tc[svg])") from exc

    trail = result.path.trail
    plt.rcParams["svg.hashsalt"] = "disc-tc"
    fig, ax = plt.subplots(figsize=(5, 5))
    for k in range(trail.shape[1]):
        ax.plot(trail[:, k].real, trail[:, k].imag, linewidth=1.0)
        ax.plot([trail[0, k].real], [trail[0, k].imag], "o", color="black", markersize=3)
        ax.plot([trail[-1, k].real], [trail[-1, k].imag], "s", color="black", markersize=3)
    ax.set_aspect("equal")
    ax.set_title(f"n={result.path.n}, min margin {result.path.min_margin:.3f}")
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Rendered {len(result.path)} samples to {out}")


def summarise(payload: Dict[str, Any], keys: List[str]) -> str:
    """One-line `key=value` summary used in INFO logs."""
    return ", ".join(f"{k}={payload[k]}" for k in keys if k in payload)
