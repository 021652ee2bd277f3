"""Homogeneisations of a polynomial and the exact integer linear algebra behind them.

Homog(Δ) is the integer kernel of the matrix whose rows are the differences
ī_k − ī_0 of support exponents against the lexicographically smallest one.
The kernel is computed with unimodular column operations, so the basis spans
the whole solution module and not a finite-index sublattice of it.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import DimensionMismatchError, ZeroPolynomialError
from .poly import SparsePoly

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]


def _as_int_rows(matrix: Sequence[Sequence[Any]]) -> List[List[int]]:
    rows = [[int(v) for v in row] for row in matrix]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise DimensionMismatchError("ragged integer matrix")
    return rows


def bareiss_rank(matrix: Sequence[Sequence[Any]]) -> int:
    """Rank over Q of an integer matrix, by fraction-free elimination."""
    rows = _as_int_rows(matrix)
    if not rows or not rows[0]:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    rank, prev = 0, 1
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, n_rows):
            lead = rows[r][col]
            for c in range(col + 1, n_cols):
                rows[r][c] = (p * rows[r][c] - lead * rows[rank][c]) // prev
            rows[r][col] = 0
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def bareiss_determinant(matrix: Sequence[Sequence[Any]]) -> int:
    """Exact determinant of a square integer matrix."""
    rows = _as_int_rows(matrix)
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise DimensionMismatchError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if rows[r][k] != 0), None)
            if swap is None:
                return 0
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        p = rows[k][k]
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                rows[r][c] = (p * rows[r][c] - rows[r][k] * rows[k][c]) // prev
            rows[r][k] = 0
        prev = p
    return sign * rows[n - 1][n - 1]


def _exgcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def integer_kernel(matrix: Sequence[Sequence[Any]], dim: int) -> List[IntVector]:
    """Lattice basis of {d in Z^dim : M d = 0}.

    Columns of M are combined pairwise with determinant-one extended-gcd moves
    while the same moves are applied to the identity; the tracked columns whose
    image vanishes form a basis of the kernel.
    """
    rows = _as_int_rows(matrix)
    if rows and len(rows[0]) != dim:
        raise DimensionMismatchError(f"matrix has {len(rows[0])} columns, expected {dim}")
    # image[k] = M @ unimodular[k]
    unimodular = [[1 if i == k else 0 for i in range(dim)] for k in range(dim)]
    image = [[row[k] for row in rows] for k in range(dim)]
    pivot = 0
    for i in range(len(rows)):
        if pivot == dim:
            break
        for k in range(pivot + 1, dim):
            b = image[k][i]
            if b == 0:
                continue
            a = image[pivot][i]
            g, x, y = _exgcd(a, b)
            ag, bg = a // g, b // g
            new_p = [x * u + y * v for u, v in zip(unimodular[pivot], unimodular[k])]
            new_k = [-bg * u + ag * v for u, v in zip(unimodular[pivot], unimodular[k])]
            img_p = [x * u + y * v for u, v in zip(image[pivot], image[k])]
            img_k = [-bg * u + ag * v for u, v in zip(image[pivot], image[k])]
            unimodular[pivot], unimodular[k] = new_p, new_k
            image[pivot], image[k] = img_p, img_k
        if image[pivot][i] != 0:
            pivot += 1
    return [tuple(unimodular[k]) for k in range(pivot, dim)]


def hermite_rows(vectors: Sequence[Sequence[int]]) -> List[IntVector]:
    """Row Hermite normal form of a list of integer vectors (same Z-span)."""
    rows = [list(v) for v in vectors]
    if not rows:
        return []
    width = len(rows[0])
    r = 0
    for col in range(width):
        if r == len(rows):
            break
        for i in range(r + 1, len(rows)):
            while rows[i][col] != 0:
                q = rows[r][col] // rows[i][col]
                rows[r] = [a - q * b for a, b in zip(rows[r], rows[i])]
                rows[r], rows[i] = rows[i], rows[r]
        if rows[r][col] == 0:
            continue
        if rows[r][col] < 0:
            rows[r] = [-a for a in rows[r]]
        for i in range(r):
            q = rows[i][col] // rows[r][col]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return [tuple(row) for row in rows[:r]]


@dataclass(frozen=True)
class HomogLattice:
    """Basis of Homog(Δ) together with the reference monomial defining N."""

    dim: int
    basis: Tuple[IntVector, ...]
    reference: IntVector
    difference_rank: int

    @property
    def rank(self) -> int:
        return len(self.basis)

    def degree(self, d: Sequence[int]) -> int:
        """N(d) = ī_0 · d; meaningful for members of the lattice."""
        if len(d) != self.dim:
            raise DimensionMismatchError(f"vector has length {len(d)}, expected {self.dim}")
        return sum(i * x for i, x in zip(self.reference, d))

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(self.degree(b) for b in self.basis)

    def contains(self, v: Sequence[int]) -> bool:
        """Whether v is an integer combination of the basis (echelon solve)."""
        if len(v) != self.dim:
            raise DimensionMismatchError(f"vector has length {len(v)}, expected {self.dim}")
        residual = [int(x) for x in v]
        for row in self.basis:
            col = next(c for c, x in enumerate(row) if x != 0)
            if residual[col] % row[col] != 0:
                return False
            q = residual[col] // row[col]
            residual = [a - q * b for a, b in zip(residual, row)]
        return not any(residual)

    def to_json(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "basis": [list(b) for b in self.basis],
            "degrees": list(self.degrees),
        }


def homog_lattice(delta: SparsePoly) -> HomogLattice:
    """Compute Homog(Δ) ⊂ Z^m."""
    if delta.is_zero:
        raise ZeroPolynomialError("Homog(Δ) is undefined for the zero polynomial")
    support = delta.support()
    reference = support[0]
    differences = [[a - b for a, b in zip(exp, reference)] for exp in support[1:]]
    kernel = integer_kernel(differences, delta.dim)
    basis = tuple(hermite_rows(kernel))
    diff_rank = bareiss_rank(differences) if differences else 0
    assert len(basis) == delta.dim - diff_rank, "kernel rank disagrees with Bareiss rank"
    logger.debug(f"Homog lattice of rank {len(basis)} from {len(support)} support monomials")
    return HomogLattice(delta.dim, basis, reference, diff_rank)


def is_homogeneisation(delta: SparsePoly, d: Sequence[int]) -> Optional[int]:
    """Return the degree N if ī·d is constant over the support of Δ, otherwise None."""
    if len(d) != delta.dim:
        raise DimensionMismatchError(f"vector has length {len(d)}, expected {delta.dim}")
    if delta.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no support")
    degrees = {sum(i * int(x) for i, x in zip(exp, d)) for exp in delta.support()}
    if len(degrees) != 1:
        return None
    return degrees.pop()
