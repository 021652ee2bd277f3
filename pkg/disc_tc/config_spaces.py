"""Planar configuration spaces and their two discriminants.

C⁰_n (unordered, barycentre zero) is identified with V^C through the monic
polynomial P(w) = wⁿ + Σ_{i≥2} (−1)ⁱ a_i w^{n−i} whose roots are the points;
a_i is stored as the literal i-th elementary symmetric value. F⁰_n (ordered)
is parametrised by the first n − 1 points, the last being minus their sum.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, NamedTuple, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import config
from .errors import (
    BoundMismatchError,
    CoincidentPointsError,
    DiscTCError,
    ExpansionCapError,
    NotCentredError,
    ParseError,
    RootFindingError,
)
from .lattice import bareiss_determinant
from .poly import SparsePoly
from .torus import BoundReport, bound_report, validate_action, validate_action_numeric

logger = logging.getLogger(__name__)


def _pairwise_margin(points: np.ndarray) -> float:
    if points.size < 2:
        return float("inf")
    i, j = np.triu_indices(points.size, k=1)
    return float(np.min(np.abs(points[i] - points[j])))


@dataclass(frozen=True, eq=False)
class PlanarConfig:
    """n distinct points of the plane, stored as complex numbers."""

    points: np.ndarray
    ordered: bool = False

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=complex).ravel()
        if points.size < 2:
            raise DiscTCError(f"a configuration needs at least two points, got {points.size}")
        if not np.all(np.isfinite(points)):
            raise DiscTCError("configuration points must be finite")
        margin = _pairwise_margin(points)
        if margin <= 0:
            raise CoincidentPointsError(f"configuration has coincident points: {points.tolist()}")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "_margin", margin)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def margin(self) -> float:
        """Smallest pairwise distance."""
        return self._margin  # type: ignore[attr-defined, no-any-return]

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.points))))

    @property
    def barycentre(self) -> complex:
        return complex(np.mean(self.points))

    def is_centred(self, tol: float = config.CENTRED_TOL) -> bool:
        return abs(complex(np.sum(self.points))) < tol * self.scale

    def rotate(self, angle: float) -> "PlanarConfig":
        return PlanarConfig(np.exp(1j * angle) * self.points, self.ordered)

    def canonical(self) -> "PlanarConfig":
        """Unordered configurations sorted lexicographically by (Re, Im)."""
        if self.ordered:
            return self
        order = np.lexsort((self.points.imag, self.points.real))
        return PlanarConfig(self.points[order], False)

    def to_json(self) -> Dict[str, Any]:
        c = self.canonical()
        return {
            "n": c.n,
            "ordered": c.ordered,
            "points": [[float(w.real), float(w.imag)] for w in c.points],
        }

    @classmethod
    def from_json(cls, payload: Any, where: str = "config") -> "PlanarConfig":
        if not isinstance(payload, dict):
            raise ParseError("configuration must be a JSON object", where)
        points = _parse_complex_list(payload.get("points"), f"{where}.points")
        n = payload.get("n", len(points))
        if n != len(points):
            raise ParseError(f"'n' is {n} but {len(points)} points were given", where)
        ordered = payload.get("ordered", False)
        if not isinstance(ordered, bool):
            raise ParseError("'ordered' must be a boolean", where)
        return cls(np.array(points, dtype=complex), ordered)


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """(a_2, …, a_n), the elementary symmetric values of a centred configuration."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex).ravel()
        if values.size < 1:
            raise DiscTCError("a coefficient vector needs at least a_2")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size + 1

    def polynomial(self) -> np.ndarray:
        """Coefficients of P, highest degree first."""
        signs = np.array([(-1) ** i for i in range(2, self.n + 1)])
        return np.concatenate([[1.0, 0.0], signs * self.values]).astype(complex)

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "a": [[float(v.real), float(v.imag)] for v in self.values]}

    @classmethod
    def from_json(cls, payload: Any) -> "CoeffVector":
        if not isinstance(payload, dict):
            raise ParseError("coefficient vector must be a JSON object", "coefficients")
        values = _parse_complex_list(payload.get("a"), "a")
        n = payload.get("n", len(values) + 1)
        if n != len(values) + 1:
            raise ParseError(f"'n' is {n} but {len(values)} coefficients were given", "coefficients")
        return cls(np.array(values, dtype=complex))


def _parse_complex_list(raw: Any, where: str) -> List[complex]:
    if not isinstance(raw, list):
        raise ParseError("expected a list of [re, im] pairs", where)
    out = []
    for k, pair in enumerate(raw):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise ParseError("expected [re, im]", f"{where}[{k}]")
        out.append(complex(pair[0], pair[1]))
    return out


def retract_barycentre(c: PlanarConfig, t: float) -> PlanarConfig:
    """ρ(c, t): translate by −t times the barycentre."""
    if not 0.0 <= t <= 1.0:
        raise DiscTCError(f"retraction time must lie in [0, 1], got {t}")
    return PlanarConfig(c.points - t * np.mean(c.points), c.ordered)


def roots_to_coeffs(c: PlanarConfig) -> CoeffVector:
    if not c.is_centred():
        raise NotCentredError(f"barycentre {c.barycentre} is not zero")
    monic = np.poly(c.points)
    signs = np.array([(-1) ** i for i in range(monic.size)])
    return CoeffVector((signs * monic)[2:])


def _aberth(coeffs: np.ndarray) -> np.ndarray:
    degree = coeffs.size - 1
    derivative = np.polyder(coeffs)
    magnitudes = [abs(coeffs[k]) ** (1.0 / k) for k in range(1, degree + 1) if coeffs[k] != 0]
    radius = 2.0 * max(magnitudes, default=1.0)
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(degree) / degree + 0.4))
    for _ in range(config.ROOT_MAX_ITER):
        val = np.polyval(coeffs, z)
        der = np.polyval(derivative, z)
        der[der == 0] = 1e-300
        ratio = val / der
        diffs = z[:, None] - z[None, :]
        np.fill_diagonal(diffs, np.inf)
        repulsion = np.sum(1.0 / diffs, axis=1)
        step = ratio / (1.0 - ratio * repulsion)
        z = z - step
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, float(np.max(np.abs(z)))):
            break
    return z


def coeffs_to_roots(a: CoeffVector) -> PlanarConfig:
    """Roots of P by Aberth iteration, accepted on residual and separation."""
    coeffs = a.polynomial()
    if np.all(coeffs[1:] == 0):
        raise RootFindingError(f"P(w) = w^{a.n} has a single root of multiplicity {a.n}")
    roots = _aberth(coeffs)
    margin = _pairwise_margin(roots)
    if margin < config.ROOT_MARGIN_MIN:
        raise RootFindingError(f"roots are numerically multiple (margin {margin:.3e})")
    magnitude = np.abs(roots)[:, None] ** np.arange(a.n, -1, -1)[None, :]
    scale = np.maximum(1.0, magnitude @ np.abs(coeffs))
    residual = np.abs(np.polyval(coeffs, roots)) / scale
    if np.max(residual) >= config.ROOT_RESIDUAL_TOL:
        raise RootFindingError(f"root residual {np.max(residual):.3e} above tolerance")
    return PlanarConfig(roots - np.mean(roots), ordered=False)


def _product_discriminant(points: np.ndarray) -> complex:
    i, j = np.triu_indices(points.size, k=1)
    return complex(np.prod((points[i] - points[j]) ** 2))


def disc_C(x: Union[PlanarConfig, CoeffVector]) -> complex:
    """Π_{i<j} (w_i − w_j)², from the roots or through them from the coefficients."""
    c = coeffs_to_roots(x) if isinstance(x, CoeffVector) else x
    return _product_discriminant(c.points)


def sylvester_matrix(p: Sequence[int], q: Sequence[int]) -> List[List[int]]:
    """Sylvester matrix of two integer polynomials given highest degree first."""
    deg_p, deg_q = len(p) - 1, len(q) - 1
    size = deg_p + deg_q
    rows = []
    for k in range(deg_q):
        rows.append([0] * k + list(p) + [0] * (size - k - len(p)))
    for k in range(deg_p):
        rows.append([0] * k + list(q) + [0] * (size - k - len(q)))
    return rows


def disc_C_exact(a: Sequence[int]) -> int:
    """Exact Δ^C at integer (a_2, …, a_n) as (−1)^{n(n−1)/2} Res(P, P′)."""
    a = [int(v) for v in a]
    n = len(a) + 1
    p = [1, 0] + [(-1) ** i * a_i for i, a_i in zip(range(2, n + 1), a)]
    dp = [(n - k) * c for k, c in enumerate(p[:-1])]
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * bareiss_determinant(sylvester_matrix(p, dp))


def disc_C_achievable(n: int, zero_set: Iterable[int]) -> bool:
    """Whether Δ^C stays nonzero on {a_{j+1} = 0 : j ∈ zero_set} (coordinate j is a_{j+1}).

    Decided by evaluating at random integer points; a nonzero value is a
    certificate, and repeated zeros bound the chance of a false negative by
    (degree / range) per trial.
    """
    indices = frozenset(zero_set)
    rng = np.random.default_rng([n, *sorted(indices)])
    for _ in range(config.ACHIEVABILITY_TRIALS):
        draw = rng.integers(-config.ACHIEVABILITY_RANGE, config.ACHIEVABILITY_RANGE + 1, size=n - 1)
        a = [0 if (j + 1) in indices else int(v) for j, v in enumerate(draw)]
        if disc_C_exact(a) != 0:
            return True
    return False


def disc_F(w: Sequence[complex]) -> complex:
    """(Π_{i<j} (w_i − w_j)) · Π_i (w_i + Σ_k w_k) on n − 1 coordinates."""
    w = np.asarray(w, dtype=complex).ravel()
    if w.size < 1:
        raise DiscTCError("Δ^F needs at least one coordinate")
    i, j = np.triu_indices(w.size, k=1)
    return complex(np.prod(w[i] - w[j]) * np.prod(w + np.sum(w)))


@lru_cache(maxsize=None)
def disc_F_poly(n: int) -> SparsePoly:
    """Δ^F expanded as a polynomial in n − 1 variables."""
    if n < 2:
        raise DiscTCError(f"Δ^F needs n >= 2, got {n}")
    if n > config.MAX_DISC_F_N:
        raise ExpansionCapError(f"expanding Δ^F is capped at n = {config.MAX_DISC_F_N}, got {n}")
    m = n - 1
    w = [SparsePoly.variable(m, j) for j in range(1, m + 1)]
    total = sum(w[1:], w[0])
    product = SparsePoly.constant(m, 1)
    for i in range(m):
        for j in range(i + 1, m):
            product = product * (w[i] - w[j])
    for i in range(m):
        product = product * (w[i] + total)
    logger.debug(f"Expanded Δ^F for n={n}: {len(product)} terms, degree {product.degree()}")
    return product


class Matching(NamedTuple):
    distance: float
    permutation: np.ndarray


def matching_distance(a: Any, b: Any) -> Matching:
    """Largest displacement under the optimal assignment of a's points to b's.

    Two ordered configurations are compared index by index.
    """
    pa = a.points if isinstance(a, PlanarConfig) else np.asarray(a, dtype=complex)
    pb = b.points if isinstance(b, PlanarConfig) else np.asarray(b, dtype=complex)
    if pa.size != pb.size:
        raise DiscTCError(f"cannot match {pa.size} points against {pb.size}")
    if isinstance(a, PlanarConfig) and isinstance(b, PlanarConfig) and a.ordered and b.ordered:
        perm = np.arange(pa.size)
    else:
        cost = np.abs(pa[:, None] - pb[None, :]) ** 2
        _, perm = linear_sum_assignment(cost)
    return Matching(float(np.max(np.abs(pa - pb[perm]))), perm)


class Alignment(NamedTuple):
    angle: float
    distance: float


def orbit_alignment(q: PlanarConfig, target: PlanarConfig) -> Alignment:
    """Best rotation angle carrying q onto target, tried over the angles that
    map q's outermost point onto one of target's points."""
    anchor = q.points[int(np.argmax(np.abs(q.points)))]
    if anchor == 0:
        return Alignment(0.0, matching_distance(q, target).distance)
    best = Alignment(0.0, np.inf)
    for w in target.points:
        if w == 0:
            continue
        angle = float(np.angle(w / anchor))
        distance = matching_distance(np.exp(1j * angle) * q.points, target.points).distance
        if distance < best.distance:
            best = Alignment(angle, distance)
    return best


def bound_report_for_config_spaces(n: int, ordered: bool) -> BoundReport:
    """Run the torus-action pipeline on Δ^F (ordered) or Δ^C (unordered)."""
    if n < 2:
        raise DiscTCError(f"configuration spaces need n >= 2, got {n}")
    if ordered:
        delta = disc_F_poly(n)
        action = validate_action(delta, [[1] * (n - 1)])
        report = bound_report(delta, action)
    else:

        def evaluate(a: np.ndarray) -> complex:
            return disc_C(CoeffVector(a))

        def achievable(indices: FrozenSet[int]) -> bool:
            return disc_C_achievable(n, indices)

        action = validate_action_numeric(
            evaluate,
            n - 1,
            [list(range(2, n + 1))],
            [n * (n - 1)],
            np.random.default_rng(n),
        )
        report = bound_report(None, action, achievable=achievable)
    if report.t != 0:
        raise BoundMismatchError(
            f"stabiliser scan gave t={report.t} for {'F' if ordered else 'C'}_{n}; "
            "no point of the centred slice is fixed by the whole circle"
        )
    logger.info(f"{'F' if ordered else 'C'}_{n}: TC bound {report.bound}")
    return report


def bound_for_config_spaces(n: int, ordered: bool) -> int:
    return bound_report_for_config_spaces(n, ordered).bound
