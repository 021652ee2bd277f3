"""The potential g(z) = Σ|z_j|² + |1/Δ(z)|², its pair sum f̃, exact derivatives and flows.

Real coordinates are interleaved, (x_1, y_1, …, x_m, y_m). Derivatives are
assembled from holomorphic (Wirtinger) data of η = 1/Δ; finite differences
are only provided as an oracle for tests and reports.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from . import config
from .errors import DimensionMismatchError, ZeroLocusError
from .poly import SparsePoly, evaluate, gradient_polys, hessian_polys

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RealPoint:
    """A point of R^{2m} identified with (z_1, …, z_m) ∈ C^m."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float).ravel()
        if coords.size % 2 or coords.size == 0:
            raise DimensionMismatchError(f"a point of R^(2m) needs an even length, got {coords.size}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("point coordinates must be finite")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_complex(cls, z: Sequence[complex]) -> "RealPoint":
        z = np.asarray(z, dtype=complex).ravel()
        coords = np.empty(2 * z.size)
        coords[0::2] = z.real
        coords[1::2] = z.imag
        return cls(coords)

    @property
    def dim(self) -> int:
        return self.coords.size // 2

    @property
    def z(self) -> np.ndarray:
        return self.coords[0::2] + 1j * self.coords[1::2]

    def to_json(self) -> List[List[float]]:
        return [[float(v.real), float(v.imag)] for v in self.z]


def _as_point(z: Any) -> RealPoint:
    return z if isinstance(z, RealPoint) else RealPoint(z)


def _delta_at(delta: SparsePoly, point: RealPoint) -> complex:
    if point.dim != delta.dim:
        raise DimensionMismatchError(f"point has {point.dim} complex coordinates, Δ has {delta.dim}")
    value = evaluate(delta, point.z)
    if value == 0:
        raise ZeroLocusError(f"Δ vanishes at {point.to_json()}")
    return value


def in_variety(delta: SparsePoly, z: Any) -> RealPoint:
    """Return z as a RealPoint after checking |Δ(z)| > 0."""
    point = _as_point(z)
    _delta_at(delta, point)
    return point


@dataclass(frozen=True)
class Inertia:
    positive: int
    negative: int
    null: int

    def to_json(self) -> List[int]:
        return [self.positive, self.negative, self.null]


class EtaData(NamedTuple):
    """Value, holomorphic gradient and holomorphic Hessian of η at a point."""

    value: complex
    first: np.ndarray
    second: np.ndarray


def eta_data(delta: SparsePoly, z: Any) -> EtaData:
    """Wirtinger data of η = 1/Δ."""
    point = _as_point(z)
    d = _delta_at(delta, point)
    zs = point.z
    d1 = np.array([evaluate(p, zs) for p in gradient_polys(delta)], dtype=complex)
    d2 = np.array([[evaluate(p, zs) for p in row] for row in hessian_polys(delta)], dtype=complex)
    eta = 1.0 / d
    first = -d1 / d**2
    second = -d2 / d**2 + 2.0 * np.outer(d1, d1) / d**3
    return EtaData(eta, first, second)


def potential_g(delta: SparsePoly, z: Any) -> float:
    point = _as_point(z)
    d = _delta_at(delta, point)
    return float(np.dot(point.coords, point.coords) + 1.0 / abs(d) ** 2)


def grad_abs2(data: EtaData) -> np.ndarray:
    """Real gradient of |η|²: (2 Re(η̄ η_j), −2 Im(η̄ η_j)) per coordinate."""
    w = np.conj(data.value) * data.first
    out = np.empty(2 * w.size)
    out[0::2] = 2.0 * w.real
    out[1::2] = -2.0 * w.imag
    return out


def grad_g(delta: SparsePoly, z: Any) -> np.ndarray:
    point = _as_point(z)
    return 2.0 * point.coords + grad_abs2(eta_data(delta, point))


def hessian_abs2(data: EtaData) -> np.ndarray:
    """Euclidean Hessian of |η|².

    The Hermitian part η_i conj(η_j) realises to a positive semidefinite block;
    the complex-symmetric part conj(η) η_ij realises to an indefinite one whose
    negative directions number at most m.
    """
    first = np.asarray(data.first, dtype=complex)
    second = np.asarray(data.second, dtype=complex)
    m = first.size
    if second.shape != (m, m):
        raise DimensionMismatchError(f"second derivatives have shape {second.shape}, expected {(m, m)}")
    herm = np.outer(first, np.conj(first))
    sym = np.conj(data.value) * second
    h = np.empty((2 * m, 2 * m))
    h[0::2, 0::2] = 2.0 * sym.real + 2.0 * herm.real
    h[0::2, 1::2] = -2.0 * sym.imag + 2.0 * herm.imag
    h[1::2, 0::2] = -2.0 * sym.imag - 2.0 * herm.imag
    h[1::2, 1::2] = -2.0 * sym.real + 2.0 * herm.real
    return 0.5 * (h + h.T)


def hessian_g(delta: SparsePoly, z: Any) -> np.ndarray:
    point = _as_point(z)
    return 2.0 * np.eye(2 * point.dim) + hessian_abs2(eta_data(delta, point))


def inertia(matrix: np.ndarray, null_tol: float = config.NULL_TOL) -> Inertia:
    """Eigenvalue sign counts; |λ| ≤ null_tol · max|λ| counts as null."""
    m = np.asarray(matrix, dtype=float)
    m = 0.5 * (m + m.T)
    eig = np.linalg.eigvalsh(m)
    scale = float(np.max(np.abs(eig))) if eig.size else 0.0
    if scale == 0.0:
        return Inertia(0, 0, int(eig.size))
    threshold = null_tol * scale
    positive = int(np.sum(eig > threshold))
    negative = int(np.sum(eig < -threshold))
    return Inertia(positive, negative, int(eig.size) - positive - negative)


def pair_potential(delta: SparsePoly, pair: Tuple[Any, Any]) -> float:
    return potential_g(delta, pair[0]) + potential_g(delta, pair[1])


def pair_grad(delta: SparsePoly, pair: Tuple[Any, Any]) -> np.ndarray:
    return np.concatenate([grad_g(delta, pair[0]), grad_g(delta, pair[1])])


def pair_hessian(delta: SparsePoly, pair: Tuple[Any, Any]) -> np.ndarray:
    h1, h2 = hessian_g(delta, pair[0]), hessian_g(delta, pair[1])
    k = h1.shape[0]
    out = np.zeros((2 * k, 2 * k))
    out[:k, :k] = h1
    out[k:, k:] = h2
    return out


def fd_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = config.FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (f(x + e) - f(x - e)) / (2.0 * h)
    return out


def fd_hessian(
    grad: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = config.FD_STEP
) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty((x.size, x.size))
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[:, k] = (grad(x + e) - grad(x - e)) / (2.0 * h)
    return 0.5 * (out + out.T)


def properness_witness(delta: SparsePoly, z: Any, level: float) -> bool:
    """On {g ≤ λ}: ‖z‖ ≤ √λ and |Δ(z)| ≥ 1/√λ. Vacuously true above the level."""
    point = _as_point(z)
    if potential_g(delta, point) > level:
        return True
    root = np.sqrt(level)
    return bool(np.linalg.norm(point.coords) <= root and abs(evaluate(delta, point.z)) >= 1.0 / root)


def sample_points(
    delta: SparsePoly,
    count: int,
    rng: np.random.Generator,
    floor: float = config.SAMPLE_DELTA_FLOOR,
) -> Tuple[List[RealPoint], int]:
    """Seeded Gaussian points of V with |Δ| ≥ floor; returns (points, rejected)."""
    points: List[RealPoint] = []
    rejected = 0
    budget = max(count, 1) * config.MAX_SAMPLE_ATTEMPTS_FACTOR
    while len(points) < count:
        if rejected >= budget:
            rate = rejected / (rejected + len(points))
            raise ZeroLocusError(
                f"only {len(points)}/{count} samples landed in V (rejection rate {rate:.3f})"
            )
        coords = rng.standard_normal(2 * delta.dim)
        point = RealPoint(coords)
        if abs(evaluate(delta, point.z)) >= floor:
            points.append(point)
        else:
            rejected += 1
    if rejected:
        logger.debug(f"Rejected {rejected} samples below |Δ| = {floor}")
    return points, rejected


@dataclass(frozen=True)
class SignatureRecord:
    point: RealPoint
    abs_delta: float
    eta_inertia: Inertia
    g_inertia: Inertia
    pair_inertia: Inertia
    fd_error_g: float = 0.0

    def to_json(self) -> Dict[str, Any]:
        return {
            "point": self.point.to_json(),
            "abs_delta": self.abs_delta,
            "inertia_abs2": self.eta_inertia.to_json(),
            "inertia_g": self.g_inertia.to_json(),
            "inertia_pair": self.pair_inertia.to_json(),
            "fd_error_g": self.fd_error_g,
        }


@dataclass
class SignatureReport:
    dim: int
    records: List[SignatureRecord] = field(default_factory=list)
    rejected: int = 0
    fd_tol: float = config.FD_TOL

    @property
    def violations(self) -> int:
        m = self.dim
        return sum(
            1
            for r in self.records
            if r.eta_inertia.negative > m or r.g_inertia.positive < m or r.pair_inertia.positive < 2 * m
        )

    @property
    def fd_violations(self) -> int:
        return sum(1 for r in self.records if r.fd_error_g >= self.fd_tol)

    def summary(self) -> Dict[str, Any]:
        if not self.records:
            return {"samples": 0, "rejected": self.rejected, "violations": 0, "fd_violations": 0}
        return {
            "samples": len(self.records),
            "rejected": self.rejected,
            "max_negativity_abs2": max(r.eta_inertia.negative for r in self.records),
            "min_positivity_g": min(r.g_inertia.positive for r in self.records),
            "min_positivity_pair": min(r.pair_inertia.positive for r in self.records),
            "violations": self.violations,
            "max_fd_error_g": max(r.fd_error_g for r in self.records),
            "fd_violations": self.fd_violations,
        }


def verify_signatures(
    delta: SparsePoly,
    samples: int,
    rng: np.random.Generator,
    null_tol: float = config.NULL_TOL,
    floor: float = config.SAMPLE_DELTA_FLOOR,
    fd_tol: float = config.FD_TOL,
) -> SignatureReport:
    """Sample V and record the inertia of H(|1/Δ|²), H(g) and H(f̃) at consecutive pairs.

    Each record also carries the relative error between H(g) and a central
    difference of grad g; errors at or above `fd_tol` are counted separately
    from the signature violations.
    """
    points, rejected = sample_points(delta, samples, rng, floor)
    report = SignatureReport(delta.dim, rejected=rejected, fd_tol=fd_tol)
    if not points:
        return report

    def record(k: int) -> SignatureRecord:
        p = points[k]
        q = points[(k + 1) % len(points)]
        h_g = hessian_g(delta, p)
        fd = fd_hessian(lambda x: grad_g(delta, RealPoint(x)), p.coords)
        return SignatureRecord(
            point=p,
            abs_delta=abs(evaluate(delta, p.z)),
            eta_inertia=inertia(hessian_abs2(eta_data(delta, p)), null_tol),
            g_inertia=inertia(h_g, null_tol),
            pair_inertia=inertia(pair_hessian(delta, (p, q)), null_tol),
            fd_error_g=max_relative_error(h_g, fd),
        )

    with ThreadPoolExecutor(max_workers=config.max_workers()) as pool:
        report.records = list(pool.map(record, range(len(points))))
    if report.violations:
        logger.warning(f"{report.violations} signature violations in {len(points)} samples")
    if report.fd_violations:
        logger.warning(f"{report.fd_violations} Hessian FD mismatches above {fd_tol:g}")
    return report


# Descending flows


class FlowProblem:
    """Smooth potential on R^k with a positive guard that must not collapse along a step."""

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def guard(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class PolynomialPairProblem(FlowProblem):
    """f̃(p, p') = g(p) + g(p') on V × V, flattened as (p, p') ∈ R^{4m}."""

    def __init__(self, delta: SparsePoly):
        self.delta = delta
        self.width = 2 * delta.dim

    def split(self, x: np.ndarray) -> Tuple[RealPoint, RealPoint]:
        return RealPoint(x[: self.width]), RealPoint(x[self.width :])

    def value(self, x: np.ndarray) -> float:
        return pair_potential(self.delta, self.split(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return pair_grad(self.delta, self.split(x))

    def guard(self, x: np.ndarray) -> np.ndarray:
        p, q = self.split(x)
        return np.array([abs(evaluate(self.delta, p.z)), abs(evaluate(self.delta, q.z))])


@dataclass(frozen=True, eq=False)
class FlowSample:
    point: np.ndarray
    value: float
    grad_norm: float


@dataclass(eq=False)
class FlowTrace:
    samples: List[FlowSample]
    converged: bool
    # one of "converged", "plateau", "stalled", "max_steps"
    reason: str = "converged"

    @property
    def terminal(self) -> np.ndarray:
        return self.samples[-1].point

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])

    def __len__(self) -> int:
        return len(self.samples)


def descend(
    problem: FlowProblem,
    start: np.ndarray,
    grad_tol: float = config.GRAD_TOL,
    max_steps: int = config.MAX_STEPS,
) -> FlowTrace:
    """Gradient descent with a Barzilai–Borwein trial step and backtracking by halving.

    A trial point is rejected when any guard value drops below SAFETY_FACTOR
    times its current value, so the trace never leaves the open set the guard
    describes. Accepted steps never increase the potential.

    The run ends early on a plateau: PLATEAU_STEPS accepted steps in which f
    never drops below its best value by more than PLATEAU_RTOL (relative) and
    |grad| never drops below PLATEAU_GRAD_RATIO times its best value. A plateau
    counts as converged when |grad| < PLATEAU_GRAD_FACTOR * grad_tol.
    """
    x = np.array(start, dtype=float)
    f = problem.value(x)
    g = problem.gradient(x)
    gn = float(np.linalg.norm(g))
    samples = [FlowSample(x.copy(), f, gn)]
    trial = min(config.MAX_TRIAL_STEP, 1.0 / max(gn, 1.0))
    best_f, best_gn, idle = f, gn, 0
    for step in range(max_steps):
        if gn < grad_tol:
            return FlowTrace(samples, True, "converged")
        guard = problem.guard(x)
        rate = trial
        accepted = None
        for _ in range(config.MAX_BACKTRACKS):
            x_new = x - rate * g
            guard_new = problem.guard(x_new)
            if np.all(np.isfinite(x_new)) and np.all(guard_new >= config.SAFETY_FACTOR * guard):
                f_new = problem.value(x_new)
                if f_new <= f - config.ARMIJO_C * rate * gn * gn:
                    accepted = (x_new, f_new, problem.gradient(x_new))
                    break
                if f_new <= f:
                    g_new = problem.gradient(x_new)
                    if np.linalg.norm(g_new) < gn:
                        accepted = (x_new, f_new, g_new)
                        break
            rate *= 0.5
        if accepted is None:
            logger.debug(f"Flow stalled after {step} steps at |grad| = {gn:.3e}")
            return FlowTrace(samples, False, "stalled")
        x_new, f_new, g_new = accepted
        s_vec, y_vec = x_new - x, g_new - g
        sy = float(np.dot(s_vec, y_vec))
        trial = float(np.dot(s_vec, s_vec)) / sy if sy > 0 else 2.0 * rate
        trial = min(trial, config.MAX_TRIAL_STEP)
        x, f, g = x_new, f_new, g_new
        gn = float(np.linalg.norm(g))
        samples.append(FlowSample(x.copy(), f, gn))

        idle += 1
        if f < best_f - config.PLATEAU_RTOL * max(1.0, abs(best_f)):
            best_f, idle = f, 0
        if gn < config.PLATEAU_GRAD_RATIO * best_gn:
            best_gn, idle = gn, 0
        if idle >= config.PLATEAU_STEPS and gn >= grad_tol:
            converged = gn < config.PLATEAU_GRAD_FACTOR * grad_tol
            logger.debug(
                f"Flow reached a plateau after {step + 1} steps at |grad| = {gn:.3e}, f = {f:.14g} "
                f"(converged={converged})"
            )
            return FlowTrace(samples, converged, "plateau")
    if gn < grad_tol:
        return FlowTrace(samples, True, "converged")
    logger.warning(f"Flow did not converge in {max_steps} steps (|grad| = {gn:.3e})")
    return FlowTrace(samples, False, "max_steps")


def gradient_flow(
    delta: SparsePoly,
    start: Tuple[Any, Any],
    grad_tol: float = config.GRAD_TOL,
    max_steps: int = config.MAX_STEPS,
) -> FlowTrace:
    """Descend f̃ from a pair of points of V."""
    p, q = in_variety(delta, start[0]), in_variety(delta, start[1])
    problem = PolynomialPairProblem(delta)
    trace = descend(problem, np.concatenate([p.coords, q.coords]), grad_tol, max_steps)
    logger.debug(
        f"Pair flow: {len(trace)} samples, f̃ {trace.samples[0].value:.6g} -> "
        f"{trace.samples[-1].value:.6g}, converged={trace.converged}"
    )
    return trace


def split_pair(trace_point: np.ndarray) -> Tuple[RealPoint, RealPoint]:
    half = trace_point.size // 2
    return RealPoint(trace_point[:half]), RealPoint(trace_point[half:])


def max_relative_error(exact: np.ndarray, approx: np.ndarray) -> float:
    """max|exact − approx| / max(1, max|exact|), the comparison used by the FD oracles."""
    exact, approx = np.asarray(exact), np.asarray(approx)
    return float(np.max(np.abs(exact - approx)) / max(1.0, float(np.max(np.abs(exact)))))
