"""Equivariant motion planning on unordered planar configurations.

A plan from p to p' runs in three stages: both ends are retracted onto the
centred slice, both are flowed down the pair potential, and the two
near-critical configurations reached are joined either by a rotation (same
circle orbit) or through a catalog of critical configurations whose entries
carry explicit waypoint recipes to a common root entry.

Trails are arrays of shape (samples, n) with consistent point labels; they are
only turned into unordered PlanarConfig samples at the very end.
"""

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from . import config
from .config_spaces import (
    CoeffVector,
    PlanarConfig,
    coeffs_to_roots,
    matching_distance,
    orbit_alignment,
    retract_barycentre,
    roots_to_coeffs,
)
from .errors import (
    CatalogMissError,
    CatalogUnavailableError,
    CoincidentPointsError,
    DimensionMismatchError,
    DiscTCError,
    FlowNotConvergedError,
    RootFindingError,
)
from .morse import FlowProblem, FlowTrace, Inertia, descend, fd_hessian, inertia

logger = logging.getLogger(__name__)


def _points(x: np.ndarray) -> np.ndarray:
    return x[0::2] + 1j * x[1::2]


def _coords(w: np.ndarray) -> np.ndarray:
    out = np.empty(2 * w.size)
    out[0::2] = w.real
    out[1::2] = w.imag
    return out


def _margin(w: np.ndarray) -> float:
    i, j = np.triu_indices(w.size, k=1)
    return float(np.min(np.abs(w[i] - w[j])))


def _differences(w: np.ndarray) -> np.ndarray:
    """w_k − w_j with ones on the diagonal."""
    diffs = w[:, None] - w[None, :]
    np.fill_diagonal(diffs, 1.0)
    if np.any(diffs == 0):
        raise CoincidentPointsError(f"coincident points in {w.tolist()}")
    return diffs


class ConfigPotential(FlowProblem):
    """g or g' on the centred slice, written in root coordinates.

    g = Σ_{i≥2} |a_i|² + 1/|Π_{i<j} (w_i − w_j)²|², the pull-back of the
    discriminantal potential through the roots-to-coefficients map;
    g' = Σ |w_i|² + Σ_{i<j} 1/|w_i − w_j|. Gradients are projected onto
    Σ w_i = 0.
    """

    def __init__(self, kind: str = "g"):
        if kind not in config.POTENTIALS:
            raise DiscTCError(f"unknown potential {kind!r}; expected one of {config.POTENTIALS}")
        self.kind = kind

    def value_at(self, w: np.ndarray) -> float:
        diffs = _differences(w)
        i, j = np.triu_indices(w.size, k=1)
        if self.kind == "g":
            coeffs = np.poly(w)
            disc = np.prod(diffs[i, j] ** 2)
            return float(np.sum(np.abs(coeffs[2:]) ** 2) + 1.0 / abs(disc) ** 2)
        return float(np.sum(np.abs(w) ** 2) + np.sum(1.0 / np.abs(diffs[i, j])))

    def complex_gradient(self, w: np.ndarray) -> np.ndarray:
        """∂/∂x_k + i ∂/∂y_k for each point, projected onto the slice."""
        diffs = _differences(w)
        n = w.size
        if self.kind == "g":
            coeffs = np.poly(w)
            grad = np.empty(n, dtype=complex)
            for k in range(n):
                # ∂c_i/∂w_k = −(coefficient i−1 of Π_{j≠k} (z − w_j))
                d_coeffs = -np.poly(np.delete(w, k))
                grad[k] = 2.0 * np.sum(coeffs[2:] * np.conj(d_coeffs[1:]))
            i, j = np.triu_indices(n, k=1)
            eta2 = 1.0 / abs(np.prod(diffs[i, j] ** 2)) ** 2
            inverse = 1.0 / diffs
            np.fill_diagonal(inverse, 0.0)
            grad -= 4.0 * eta2 * np.conj(np.sum(inverse, axis=1))
        else:
            pull = diffs / np.abs(diffs) ** 3
            np.fill_diagonal(pull, 0.0)
            grad = 2.0 * w - np.sum(pull, axis=1)
        return grad - np.mean(grad)

    def value(self, x: np.ndarray) -> float:
        return self.value_at(_points(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return _coords(self.complex_gradient(_points(x)))

    def guard(self, x: np.ndarray) -> np.ndarray:
        w = _points(x)
        i, j = np.triu_indices(w.size, k=1)
        return np.abs(w[i] - w[j])


class ConfigPairProblem(FlowProblem):
    """f̃(q, q') = h(q) + h(q') for a configuration potential h."""

    def __init__(self, potential: ConfigPotential, n: int):
        self.potential = potential
        self.width = 2 * n

    def value(self, x: np.ndarray) -> float:
        return self.potential.value(x[: self.width]) + self.potential.value(x[self.width :])

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [self.potential.gradient(x[: self.width]), self.potential.gradient(x[self.width :])]
        )

    def guard(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [self.potential.guard(x[: self.width]), self.potential.guard(x[self.width :])]
        )


def potential_gprime(c: Any) -> float:
    w = c.points if isinstance(c, PlanarConfig) else np.asarray(c, dtype=complex)
    return ConfigPotential("gprime").value_at(w)


def grad_gprime(c: Any) -> np.ndarray:
    w = c.points if isinstance(c, PlanarConfig) else np.asarray(c, dtype=complex)
    return ConfigPotential("gprime").complex_gradient(w)


def slice_hessian(potential: ConfigPotential, c: PlanarConfig) -> np.ndarray:
    """Hessian restricted to the centred slice, from central differences of the exact gradient."""
    x = _coords(c.points)
    full = fd_hessian(potential.gradient, x)
    constraints = np.zeros((2, x.size))
    constraints[0, 0::2] = 1.0
    constraints[1, 1::2] = 1.0
    basis = null_space(constraints)
    return basis.T @ full @ basis


# Catalog


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    config: PlanarConfig
    value: float
    grad_norm: float
    index: Inertia
    recipe: Optional[np.ndarray] = None  # labelled trail from this entry to the root entry

    @property
    def shape_hash(self) -> str:
        w = self.config.points
        i, j = np.triu_indices(w.size, k=1)
        invariants = np.concatenate([np.sort(np.abs(w[i] - w[j])), np.sort(np.abs(w))])
        text = ",".join(f"{v:.6f}" for v in invariants)
        return hashlib.sha1(text.encode("utf-8")).hexdigest()[:16]

    def to_json(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_json(),
            "value": self.value,
            "grad_norm": self.grad_norm,
            "index": self.index.negative,
            "null": self.index.null,
            "shape_hash": self.shape_hash,
            "recipe_samples": None if self.recipe is None else int(self.recipe.shape[0]),
        }


@dataclass
class CriticalCatalog:
    n: int
    potential: str
    entries: List[CatalogEntry] = field(default_factory=list)

    @property
    def root(self) -> CatalogEntry:
        return self.entries[0]

    def nearest(self, q: PlanarConfig) -> Tuple[int, float, float, List[int]]:
        """(entry index, angle carrying the entry onto q, distance, tied indices)."""
        scored = []
        for k, entry in enumerate(self.entries):
            alignment = orbit_alignment(entry.config, q)
            scored.append((alignment.distance, k, alignment.angle))
        scored.sort()
        best_distance, best, angle = scored[0]
        ties = [k for d, k, _ in scored[1:] if d - best_distance <= 1e-9]
        return best, angle, best_distance, ties

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "potential": self.potential,
            "entries": [e.to_json() for e in self.entries],
        }


def _catalog_seeds(n: int, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    seeds = [
        np.exp(2j * np.pi * np.arange(n) / n),
        np.linspace(-1.0, 1.0, n).astype(complex),
    ]
    planar = max(0, (count - len(seeds)) // 2)
    for _ in range(planar):
        seeds.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    # the potentials commute with complex conjugation, so real seeds flow to
    # collinear critical configurations, saddles included
    for _ in range(max(0, count - len(seeds))):
        seeds.append(rng.standard_normal(n).astype(complex))
    return [s - np.mean(s) for s in seeds]


def _build_recipe(
    start: np.ndarray, root: np.ndarray, rng: np.random.Generator
) -> Optional[np.ndarray]:
    """Labelled trail from start to root, by interpolation in coefficient space.

    The straight segment between the two coefficient vectors is bent by
    t(1 − t)·u for a random complex u when it comes too close to Δ^C = 0.
    """
    a0 = roots_to_coeffs(PlanarConfig(start)).values
    a1 = roots_to_coeffs(PlanarConfig(root)).values
    scale = max(1.0, float(np.max(np.abs(a0))), float(np.max(np.abs(a1))))
    ts = np.linspace(0.0, 1.0, config.RECIPE_SAMPLES + 1)
    for attempt in range(config.RECIPE_ATTEMPTS):
        bump = np.zeros_like(a0)
        if attempt:
            bump = 0.5 * attempt * scale * (rng.standard_normal(a0.size) + 1j * rng.standard_normal(a0.size))
        trail = [start]
        for t in ts[1:]:
            try:
                roots = coeffs_to_roots(CoeffVector((1 - t) * a0 + t * a1 + t * (1 - t) * bump)).points
            except RootFindingError:
                break
            prev = trail[-1]
            match = matching_distance(prev, roots)
            nxt = roots[match.permutation]
            margin = _margin(nxt)
            if margin < config.RECIPE_MARGIN_FLOOR or match.distance > 0.5 * min(margin, _margin(prev)):
                break
            trail.append(nxt)
        else:
            end = trail[-1]
            trail[-1] = root[matching_distance(end, root).permutation]
            return np.array(trail)
        logger.debug(f"Recipe attempt {attempt} failed at t={t:.3f}")
    return None


@lru_cache(maxsize=None)
def build_catalog(n: int, potential: str = "g", seeds: int = config.CATALOG_SEEDS) -> CriticalCatalog:
    """Multi-start descent to near-critical configurations, deduplicated up to rotation and relabelling."""
    if n > config.MAX_PLANNER_N:
        raise CatalogUnavailableError(f"critical catalogs are only built for n <= {config.MAX_PLANNER_N}, got {n}")
    if n < 2:
        raise DiscTCError(f"catalogs need n >= 2, got {n}")
    problem = ConfigPotential(potential)
    rng = np.random.default_rng(1000 + n)
    starts = _catalog_seeds(n, seeds, rng)

    def run(start: np.ndarray) -> FlowTrace:
        return descend(problem, _coords(start), config.PLANNER_GRAD_TOL, config.MAX_STEPS)

    with ThreadPoolExecutor(max_workers=config.max_workers()) as pool:
        traces = list(pool.map(run, starts))

    found: List[CatalogEntry] = []
    for k, trace in enumerate(traces):
        if not trace.converged:
            logger.debug(f"Catalog seed {k} did not converge")
            continue
        w = _points(trace.terminal)
        c = PlanarConfig(w - np.mean(w))
        if any(orbit_alignment(e.config, c).distance < config.SHAPE_DEDUP_TOL for e in found):
            continue
        hessian = slice_hessian(problem, c)
        found.append(
            CatalogEntry(
                config=c,
                value=trace.samples[-1].value,
                grad_norm=trace.samples[-1].grad_norm,
                index=inertia(hessian, config.HESSIAN_LABEL_TOL),
            )
        )
    if not found:
        raise CatalogUnavailableError(f"no catalog seed converged for n={n}")
    found.sort(key=lambda e: (e.value, e.index.negative))

    root = found[0].config.points
    entries = [CatalogEntry(found[0].config, found[0].value, found[0].grad_norm, found[0].index, root[None, :])]
    recipe_rng = np.random.default_rng(2000 + n)
    for entry in found[1:]:
        recipe = _build_recipe(entry.config.points, root, recipe_rng)
        if recipe is None:
            logger.warning(f"No recipe from catalog entry {entry.shape_hash} to the root")
        entries.append(CatalogEntry(entry.config, entry.value, entry.grad_norm, entry.index, recipe))
    catalog = CriticalCatalog(n, potential, entries)
    logger.info(
        f"Catalog for n={n} ({potential}): {len(entries)} entries with indices "
        f"{[e.index.negative for e in entries]}"
    )
    return catalog


# Paths


@dataclass(eq=False)
class PathPolyline:
    n: int
    trail: np.ndarray  # (samples, n), consistent labels
    min_margin: float

    @property
    def samples(self) -> List[PlanarConfig]:
        return [PlanarConfig(row) for row in self.trail]

    def __len__(self) -> int:
        return int(self.trail.shape[0])

    def max_step(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.trail, axis=0))))

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "samples": [[[float(w.real), float(w.imag)] for w in row] for row in self.trail],
            "min_margin": self.min_margin,
        }


def densify(trail: np.ndarray, step: float) -> np.ndarray:
    """Subdivide so that no point moves by `step` or more between samples."""
    rows = [trail[0]]
    for a, b in zip(trail[:-1], trail[1:]):
        # whole multiples of `step` get one extra piece
        pieces = int(np.floor(np.max(np.abs(b - a)) / step * (1 + 1e-9))) + 1
        for k in range(1, pieces + 1):
            rows.append(a + (b - a) * (k / pieces))
    return np.array(rows)


@dataclass(frozen=True)
class Audit:
    min_margin: float
    max_step: float

    @property
    def collision_free(self) -> bool:
        return self.min_margin > 0


def audit_path(path: PathPolyline, density: int = config.AUDIT_DENSITY) -> Audit:
    """Re-sample every segment `density` times and recheck separation."""
    trail = path.trail
    i, j = np.triu_indices(path.n, k=1)
    ts = np.linspace(0.0, 1.0, density + 1)[:, None]
    worst = float(np.min(np.abs(trail[:, i] - trail[:, j])))
    for a, b in zip(trail[:-1], trail[1:]):
        fine = a[None, :] + ts * (b - a)[None, :]
        worst = min(worst, float(np.min(np.abs(fine[:, i] - fine[:, j]))))
    return Audit(worst, path.max_step())


@dataclass(frozen=True)
class PlanOptions:
    potential: str = "g"
    grad_tol: float = config.PLANNER_GRAD_TOL
    max_steps: int = config.MAX_STEPS
    step: float = config.CONTINUITY_STEP
    match_tol: float = config.MATCH_TOL


@dataclass(eq=False)
class PlanResult:
    path: PathPolyline
    connection: str
    flow: Optional[FlowTrace] = None
    legs: List[Tuple[str, int]] = field(default_factory=list)
    catalog_entries: List[int] = field(default_factory=list)
    ambiguities: List[str] = field(default_factory=list)

    def metadata(self) -> Dict[str, Any]:
        return {
            "connection": self.connection,
            "legs": [{"name": name, "samples": count} for name, count in self.legs],
            "catalog_entries": list(self.catalog_entries),
            "ambiguities": list(self.ambiguities),
            "flow_steps": 0 if self.flow is None else len(self.flow) - 1,
        }

    def to_json(self) -> Dict[str, Any]:
        payload = self.path.to_json()
        payload["metadata"] = self.metadata()
        return payload


def _retraction_leg(p: PlanarConfig) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, config.RETRACTION_SAMPLES + 1)
    return np.array([retract_barycentre(p, t).points for t in ts])


def _rotation_leg(start: np.ndarray, angle: float) -> np.ndarray:
    steps = int(abs(angle) // config.ROTATION_STEP) + 1
    return np.array([np.exp(1j * angle * k / steps) * start for k in range(steps + 1)])


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2.0 * np.pi) - np.pi)


def _correction(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Two-sample straight leg from a to b, with b relabelled to follow a."""
    return np.array([a, b[matching_distance(a, b).permutation]])


def _join(legs: List[Tuple[str, np.ndarray]]) -> np.ndarray:
    """Concatenate labelled legs, relabelling each one to continue the previous."""
    rows = [legs[0][1]]
    for _, leg in legs[1:]:
        end = rows[-1][-1]
        leg = leg[:, matching_distance(end, leg[0]).permutation]
        if np.max(np.abs(leg[0] - end)) < 1e-12:
            leg = leg[1:]
        if leg.size:
            rows.append(leg)
    return np.concatenate(rows, axis=0)


def _connect_via_catalog(
    q: np.ndarray, target: np.ndarray, n: int, options: PlanOptions, result: PlanResult
) -> List[Tuple[str, np.ndarray]]:
    catalog = build_catalog(n, options.potential)
    picks = []
    for label, w in (("start", q), ("end", target)):
        index, angle, distance, ties = catalog.nearest(PlanarConfig(w))
        if distance > options.match_tol:
            logger.warning(f"Catalog miss for the {label} configuration (distance {distance:.3e})")
            raise CatalogMissError(
                f"no catalog entry within {options.match_tol} of the {label} configuration "
                f"(nearest at {distance:.3e})"
            )
        if ties:
            result.ambiguities.append(f"{label}: entries {[index] + ties} tie at distance {distance:.3e}")
        entry = catalog.entries[index]
        if entry.recipe is None:
            raise CatalogMissError(f"catalog entry {index} has no recipe to the root entry")
        picks.append((index, angle, entry))
    result.catalog_entries = [index for index, _, _ in picks]
    (_, angle_a, entry_a), (_, angle_b, entry_b) = picks
    rot_a, rot_b = np.exp(1j * angle_a), np.exp(1j * angle_b)
    root = catalog.root.config.points
    # the root end of each recipe is labelled like `root`
    recipe_a = rot_a * entry_a.recipe
    recipe_b = rot_b * entry_b.recipe[::-1]
    return [
        ("correct-start", _correction(q, recipe_a[0])),
        ("recipe-start", recipe_a),
        ("root-rotation", _rotation_leg(rot_a * root, _wrap(angle_b - angle_a))),
        ("recipe-end", recipe_b),
        ("correct-end", _correction(recipe_b[-1], target)),
    ]


def plan(p: PlanarConfig, target: PlanarConfig, options: Optional[PlanOptions] = None) -> PlanResult:
    """Plan a collision-free path of unordered configurations from p to target."""
    options = options or PlanOptions()
    if p.n != target.n:
        raise DimensionMismatchError(f"cannot plan from {p.n} points to {target.n} points")
    n = p.n
    if n > config.MAX_PLANNER_N:
        raise CatalogUnavailableError(
            f"catalog unavailable: planning is supported for n <= {config.MAX_PLANNER_N}, got {n}"
        )
    p = PlanarConfig(p.points, ordered=False)
    target = PlanarConfig(target.points, ordered=False)

    same = matching_distance(p, target)
    if same.distance < config.ENDPOINT_TOL:
        trail = np.array([p.points, target.points[same.permutation]])
        path = PathPolyline(n, trail, min(p.margin, target.margin))
        return PlanResult(path, "constant", legs=[("constant", 2)])

    start_leg = _retraction_leg(p)
    end_leg = _retraction_leg(target)
    problem = ConfigPairProblem(ConfigPotential(options.potential), n)
    x0 = np.concatenate([_coords(start_leg[-1]), _coords(end_leg[-1])])
    trace = descend(problem, x0, options.grad_tol, options.max_steps)
    if not trace.converged:
        raise FlowNotConvergedError(
            f"pair flow did not reach |grad| < {options.grad_tol} in {options.max_steps} steps "
            f"(stopped on {trace.reason} at |grad| = {trace.samples[-1].grad_norm:.3e})"
        )
    flow_start = np.array([_points(s.point[: 2 * n]) for s in trace.samples])
    flow_end = np.array([_points(s.point[2 * n :]) for s in trace.samples])
    q, q_target = flow_start[-1], flow_end[-1]

    result = PlanResult(PathPolyline(n, np.empty((0, n), dtype=complex), 0.0), "rotation", flow=trace)
    alignment = orbit_alignment(PlanarConfig(q), PlanarConfig(q_target))
    if alignment.distance < options.match_tol:
        rotation = _rotation_leg(q, _wrap(alignment.angle))
        middle = [("rotation", rotation), ("correct", _correction(rotation[-1], q_target))]
    else:
        result.connection = "catalog"
        middle = _connect_via_catalog(q, q_target, n, options, result)

    legs = [("retract-start", start_leg), ("flow-start", flow_start)]
    legs += middle
    legs += [("flow-end", flow_end[::-1]), ("retract-end", end_leg[::-1])]
    result.legs = [(name, int(leg.shape[0])) for name, leg in legs]

    trail = densify(_join(legs), options.step)
    path = PathPolyline(n, trail, 0.0)
    audit = audit_path(path)
    if not audit.collision_free:
        raise CoincidentPointsError(f"planned path collides (audited margin {audit.min_margin:.3e})")
    path.min_margin = float(min(_margin(row) for row in trail))
    result.path = path
    logger.debug(
        f"Planned n={n} path: {len(path)} samples, connection {result.connection}, "
        f"min margin {path.min_margin:.4f}"
    )
    return result


@dataclass
class SuiteReport:
    n: int
    attempted: int
    planned: int = 0
    misses: int = 0
    failures: List[str] = field(default_factory=list)
    min_margin: float = float("inf")
    max_endpoint_error: float = 0.0
    max_step: float = 0.0

    @property
    def miss_rate(self) -> float:
        return self.misses / self.attempted if self.attempted else 0.0

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "attempted": self.attempted,
            "planned": self.planned,
            "misses": self.misses,
            "miss_rate": self.miss_rate,
            "failures": list(self.failures),
            "min_margin": self.min_margin,
            "max_endpoint_error": self.max_endpoint_error,
            "max_step": self.max_step,
        }


def random_config(n: int, rng: np.random.Generator) -> PlanarConfig:
    return PlanarConfig(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def run_planner_suite(
    n: int, pairs: int, rng: np.random.Generator, options: Optional[PlanOptions] = None
) -> SuiteReport:
    """Plan between seeded random pairs and audit every produced path."""
    options = options or PlanOptions()
    build_catalog(n, options.potential)
    queries = [(random_config(n, rng), random_config(n, rng)) for _ in range(pairs)]

    def attempt(query: Tuple[PlanarConfig, PlanarConfig]) -> Any:
        try:
            result = plan(query[0], query[1], options)
            return result, audit_path(result.path)
        except DiscTCError as exc:
            return exc

    with ThreadPoolExecutor(max_workers=config.max_workers()) as pool:
        outcomes = list(pool.map(attempt, queries))

    report = SuiteReport(n, pairs)
    for (p, target), outcome in zip(queries, outcomes):
        if isinstance(outcome, CatalogMissError):
            report.misses += 1
            continue
        if isinstance(outcome, Exception):
            report.failures.append(f"{type(outcome).__name__}: {outcome}")
            continue
        report.planned += 1
        result, audit = outcome
        path = result.path
        report.min_margin = min(report.min_margin, audit.min_margin)
        report.max_step = max(report.max_step, audit.max_step)
        endpoint = max(
            matching_distance(path.trail[0], p.points).distance,
            matching_distance(path.trail[-1], target.points).distance,
        )
        report.max_endpoint_error = max(report.max_endpoint_error, endpoint)
    logger.info(
        f"Planner suite n={n}: {report.planned}/{pairs} planned, miss rate {report.miss_rate:.2%}"
    )
    return report
