"""Scalar torus actions on discriminantal varieties and the bound 2m − s + t."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import config
from .errors import (
    DimensionMismatchError,
    InvalidActionRowError,
    ParseError,
    PatternCapExceededError,
    UnachievablePatternError,
)
from .lattice import bareiss_rank, homog_lattice, is_homogeneisation
from .poly import SparsePoly, restrict_to_zero

logger = logging.getLogger(__name__)

Achievability = Callable[[FrozenSet[int]], bool]


@dataclass(frozen=True)
class TorusAction:
    """T^s acting by z_j -> θ_1^{ξ_1j} ⋯ θ_s^{ξ_sj} z_j."""

    dim: int
    xi: Tuple[Tuple[int, ...], ...]
    row_degrees: Tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.xi)

    def matrix(self) -> np.ndarray:
        return np.array(self.xi, dtype=float).reshape(self.s, self.dim)

    def phases(self, angles: Sequence[float]) -> np.ndarray:
        """Unit multipliers e^{i Σ_r φ_r ξ_rj} for each coordinate j."""
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (self.s,):
            raise DimensionMismatchError(f"expected {self.s} angles, got {angles.shape}")
        return np.exp(1j * (angles @ self.matrix()))

    def act(self, angles: Sequence[float], z: Sequence[complex]) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.dim,):
            raise DimensionMismatchError(f"point has shape {z.shape}, expected ({self.dim},)")
        return self.phases(angles) * z

    def character(self, angles: Sequence[float]) -> complex:
        """Π θ_r^{N_r}, the factor by which Δ is multiplied."""
        angles = np.asarray(angles, dtype=float)
        return complex(np.exp(1j * float(angles @ np.array(self.row_degrees, dtype=float))))

    def to_json(self) -> Dict[str, Any]:
        return {"dim": self.dim, "xi": [list(r) for r in self.xi], "degrees": list(self.row_degrees)}


@dataclass(frozen=True)
class ZeroPattern:
    """Coordinates forced to vanish (1-based) and whether Δ survives the restriction."""

    indices: FrozenSet[int]
    achievable: bool

    def sorted_indices(self) -> List[int]:
        return sorted(self.indices)


def zero_pattern(delta: SparsePoly, indices: Iterable[int]) -> ZeroPattern:
    indices = frozenset(indices)
    return ZeroPattern(indices, not restrict_to_zero(delta, indices).is_zero)


def _check_rows(xi: Sequence[Sequence[int]], dim: int) -> Tuple[Tuple[int, ...], ...]:
    rows = []
    for r, row in enumerate(xi, start=1):
        if len(row) != dim:
            raise DimensionMismatchError(f"row {r} of the action matrix has {len(row)} entries, expected {dim}")
        rows.append(tuple(int(v) for v in row))
    return tuple(rows)


def validate_action(delta: SparsePoly, xi: Sequence[Sequence[int]]) -> TorusAction:
    """Check that every row of Ξ lies in Homog(Δ) and record the row degrees."""
    rows = _check_rows(xi, delta.dim)
    degrees = []
    for r, row in enumerate(rows, start=1):
        n = is_homogeneisation(delta, row)
        if n is None:
            raise InvalidActionRowError(r, f"{list(row)} gives different degrees on the support")
        degrees.append(n)
    logger.debug(f"Validated action with s={len(rows)} and degrees {degrees}")
    return TorusAction(delta.dim, rows, tuple(degrees))


def validate_action_numeric(
    evaluate: Callable[[np.ndarray], complex],
    dim: int,
    xi: Sequence[Sequence[int]],
    degrees: Sequence[int],
    rng: np.random.Generator,
    trials: int = config.SCALING_TRIALS,
    tol: float = config.SCALING_TOL,
) -> TorusAction:
    """Check Δ(θ·z) = θ^N Δ(z) at random points, for discriminants that are never expanded."""
    rows = _check_rows(xi, dim)
    if len(degrees) != len(rows):
        raise DimensionMismatchError("one degree per row of the action matrix is required")
    for r, (row, degree) in enumerate(zip(rows, degrees), start=1):
        xi_row = np.array(row, dtype=float)
        for _ in range(trials):
            z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            phi = rng.uniform(0.0, 2.0 * np.pi)
            before = evaluate(z)
            after = evaluate(np.exp(1j * phi * xi_row) * z)
            expected = np.exp(1j * phi * degree) * before
            if abs(after - expected) > tol * max(abs(before), 1e-300):
                raise InvalidActionRowError(r, f"scaling identity fails with degree {degree}")
    return TorusAction(dim, rows, tuple(int(d) for d in degrees))


def stabiliser_dim(action: TorusAction, pattern: ZeroPattern) -> int:
    """s − rank_Q of Ξ restricted to the columns outside the pattern."""
    if not pattern.achievable:
        raise UnachievablePatternError(f"pattern {pattern.sorted_indices()} is not achievable")
    if action.s == 0:
        return 0
    kept = [j for j in range(action.dim) if (j + 1) not in pattern.indices]
    sub = [[row[j] for j in kept] for row in action.xi]
    return action.s - (bareiss_rank(sub) if kept else 0)


@dataclass(frozen=True)
class StabiliserScan:
    t: int
    witness: ZeroPattern
    achievable_count: int


def _enumerate_achievable(dim: int, achievable: Achievability) -> List[FrozenSet[int]]:
    """All achievable patterns, level by level; a set is only tested if all its
    one-smaller subsets were achievable."""
    level: List[FrozenSet[int]] = [frozenset()] if achievable(frozenset()) else []
    found = list(level)
    with ThreadPoolExecutor(max_workers=config.max_workers()) as pool:
        while level:
            known = set(level)
            candidates = []
            for s_set in level:
                top = max(s_set, default=0)
                for j in range(top + 1, dim + 1):
                    cand = s_set | {j}
                    if all(cand - {k} in known for k in cand):
                        candidates.append(cand)
            flags = list(pool.map(achievable, candidates))
            level = [c for c, ok in zip(candidates, flags) if ok]
            found.extend(level)
    return found


def stabiliser_scan(
    action: TorusAction,
    delta: Optional[SparsePoly] = None,
    achievable: Optional[Achievability] = None,
    patterns: Optional[Sequence[Iterable[int]]] = None,
) -> StabiliserScan:
    """Maximise stabiliser_dim over achievable zero-patterns.

    Achievability comes from ``delta`` (exact restriction test) or from an
    oracle; ``patterns`` replaces full enumeration when m is above the cap.
    """
    if achievable is not None:
        oracle = achievable
    elif delta is not None:
        poly = delta

        def oracle(indices: FrozenSet[int]) -> bool:
            return not restrict_to_zero(poly, indices).is_zero

    else:
        raise ValueError("either a polynomial or an achievability oracle is required")

    if patterns is not None:
        sets = [frozenset(p) for p in patterns]
        live = [s_set for s_set in sets if oracle(s_set)]
        if not live:
            raise UnachievablePatternError("none of the supplied patterns is achievable")
    else:
        if action.dim > config.MAX_PATTERN_DIM:
            raise PatternCapExceededError(
                f"m={action.dim} exceeds the enumeration cap {config.MAX_PATTERN_DIM}; supply patterns"
            )
        live = _enumerate_achievable(action.dim, oracle)

    best: Optional[Tuple[int, ZeroPattern]] = None
    for s_set in live:
        pattern = ZeroPattern(s_set, True)
        dim = stabiliser_dim(action, pattern)
        logger.debug(f"pattern {sorted(s_set)}: stabiliser dimension {dim}")
        if best is None or dim > best[0]:
            best = (dim, pattern)
    assert best is not None
    return StabiliserScan(best[0], best[1], len(live))


def max_stabiliser_dim(
    delta: Optional[SparsePoly],
    action: TorusAction,
    patterns: Optional[Sequence[Iterable[int]]] = None,
    achievable: Optional[Achievability] = None,
) -> int:
    return stabiliser_scan(action, delta, achievable, patterns).t


@dataclass(frozen=True)
class BoundReport:
    m: int
    s: int
    t: int
    bound: int
    witness_pattern: Tuple[int, ...]
    lattice_rank: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "m": self.m,
            "s": self.s,
            "t": self.t,
            "bound": self.bound,
            "witness_pattern": list(self.witness_pattern),
        }
        if self.lattice_rank is not None:
            payload["lattice_rank"] = self.lattice_rank
        return payload


def bound_report(
    delta: Optional[SparsePoly],
    action: TorusAction,
    patterns: Optional[Sequence[Iterable[int]]] = None,
    achievable: Optional[Achievability] = None,
) -> BoundReport:
    scan = stabiliser_scan(action, delta, achievable, patterns)
    rank = homog_lattice(delta).rank if delta is not None else None
    report = BoundReport(
        m=action.dim,
        s=action.s,
        t=scan.t,
        bound=2 * action.dim - action.s + scan.t,
        witness_pattern=tuple(scan.witness.sorted_indices()),
        lattice_rank=rank,
    )
    logger.info(
        f"TC bound {report.bound} (m={report.m}, s={report.s}, t={report.t}, "
        f"{scan.achievable_count} achievable patterns)"
    )
    return report


def tc_upper_bound(
    delta: Optional[SparsePoly],
    action: TorusAction,
    patterns: Optional[Sequence[Iterable[int]]] = None,
    achievable: Optional[Achievability] = None,
) -> int:
    """2m − s + t for a validated action."""
    return bound_report(delta, action, patterns, achievable).bound


def parse_action_matrix(payload: Any) -> List[List[int]]:
    """Accept either a bare list of rows or {"xi": rows}."""
    rows = payload.get("xi") if isinstance(payload, dict) else payload
    if not isinstance(rows, list):
        raise ParseError("action matrix must be a list of integer rows", "xi")
    out = []
    for r, row in enumerate(rows):
        if not isinstance(row, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in row
        ):
            raise ParseError("rows must be lists of integers", f"xi[{r}]")
        out.append(row)
    return out

