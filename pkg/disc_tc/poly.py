"""Sparse multivariate polynomials with complex coefficients.

A polynomial is stored in canonical form: a lexicographically sorted tuple of
``(exponent, coefficient)`` pairs with no zero coefficient. Integral
coefficients are kept as Python ``int`` so products of integer polynomials
(the discriminants of configuration spaces) are expanded exactly.
"""

import json
import logging
import math
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DimensionMismatchError, IndexOutOfRangeError, ParseError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Coefficient = Union[int, complex]

_EXACT_INT_LIMIT = 2**53


def _normalise(value: Any) -> Optional[Coefficient]:
    """Return the canonical coefficient for ``value``, or None when it is zero."""
    if isinstance(value, bool):
        raise TypeError("boolean coefficients are not allowed")
    if isinstance(value, int):
        return value if value != 0 else None
    c = complex(value)
    if c == 0:
        return None
    if c.imag == 0 and c.real.is_integer() and abs(c.real) < _EXACT_INT_LIMIT:
        return int(c.real)
    return c


def _check_exponent(exp: Sequence[Any], dim: int) -> Exponent:
    if len(exp) != dim:
        raise DimensionMismatchError(f"exponent {tuple(exp)} has length {len(exp)}, expected {dim}")
    out = []
    for e in exp:
        if isinstance(e, bool) or not isinstance(e, int) or e < 0:
            raise ValueError(f"exponent entries must be nonnegative integers, got {tuple(exp)}")
        out.append(e)
    return tuple(out)


class SparsePoly:
    """Immutable sparse polynomial in ``dim`` complex variables."""

    __slots__ = ("dim", "_items", "_hash")

    def __init__(self, dim: int, terms: Optional[Mapping[Sequence[int], Any]] = None):
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {dim!r}")
        self.dim = dim
        accumulated: Dict[Exponent, Any] = {}
        for exp, coeff in (terms or {}).items():
            key = _check_exponent(exp, dim)
            accumulated[key] = accumulated.get(key, 0) + coeff
        items = []
        for key in sorted(accumulated):
            c = _normalise(accumulated[key])
            if c is not None:
                items.append((key, c))
        self._items: Tuple[Tuple[Exponent, Coefficient], ...] = tuple(items)
        self._hash: Optional[int] = None

    # Constructors

    @classmethod
    def zero(cls, dim: int) -> "SparsePoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value: Any) -> "SparsePoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, j: int) -> "SparsePoly":
        """The coordinate function z_j (1-based)."""
        _check_index(j, dim)
        exp = [0] * dim
        exp[j - 1] = 1
        return cls(dim, {tuple(exp): 1})

    # Introspection

    def items(self) -> Tuple[Tuple[Exponent, Coefficient], ...]:
        return self._items

    @property
    def terms(self) -> Dict[Exponent, Coefficient]:
        return dict(self._items)

    @property
    def is_zero(self) -> bool:
        return not self._items

    def support(self) -> List[Exponent]:
        return [exp for exp, _ in self._items]

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(exp) for exp, _ in self._items), default=-1)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.dim == other.dim and self._items == other._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, self._items))
        return self._hash

    def __repr__(self) -> str:
        if self.is_zero:
            return f"SparsePoly({self.dim}, 0)"
        parts = []
        for exp, c in self._items:
            mono = "*".join(
                f"z{j + 1}" if e == 1 else f"z{j + 1}^{e}" for j, e in enumerate(exp) if e
            )
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return f"SparsePoly({self.dim}, {' + '.join(parts)})"

    # Arithmetic

    def _coerce(self, other: Any) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.dim != self.dim:
                raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")
            return other
        return SparsePoly.constant(self.dim, other)

    def __add__(self, other: Any) -> "SparsePoly":
        other = self._coerce(other)
        merged: Dict[Exponent, Any] = dict(self._items)
        for exp, c in other._items:
            merged[exp] = merged.get(exp, 0) + c
        return SparsePoly(self.dim, merged)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.dim, {exp: -c for exp, c in self._items})

    def __sub__(self, other: Any) -> "SparsePoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "SparsePoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return SparsePoly(self.dim, {exp: c * other for exp, c in self._items})
        other = self._coerce(other)
        product: Dict[Exponent, Any] = {}
        for e1, c1 in self._items:
            for e2, c2 in other._items:
                key = tuple(a + b for a, b in zip(e1, e2))
                product[key] = product.get(key, 0) + c1 * c2
        return SparsePoly(self.dim, product)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SparsePoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = SparsePoly.constant(self.dim, 1)
        for _ in range(k):
            result = result * self
        return result

    def __call__(self, z: Sequence[complex]) -> complex:
        return evaluate(self, z)

    # JSON

    def to_json(self) -> Dict[str, Any]:
        terms = []
        for exp, c in self._items:
            if isinstance(c, int):
                terms.append({"exp": list(exp), "re": c, "im": 0})
            else:
                terms.append({"exp": list(exp), "re": c.real, "im": c.imag})
        return {"dim": self.dim, "terms": terms}

    @classmethod
    def from_json(cls, payload: Any) -> "SparsePoly":
        if not isinstance(payload, dict):
            raise ParseError("polynomial must be a JSON object", "polynomial")
        dim = payload.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ParseError(f"'dim' must be a positive integer, got {dim!r}", "dim")
        raw_terms = payload.get("terms")
        if not isinstance(raw_terms, list):
            raise ParseError("'terms' must be a list", "terms")
        pairs = {}
        for k, term in enumerate(raw_terms):
            where = f"terms[{k}]"
            if not isinstance(term, dict) or "exp" not in term:
                raise ParseError("each term needs an 'exp' field", where)
            exp = term["exp"]
            if not isinstance(exp, list):
                raise ParseError("'exp' must be a list of integers", where)
            try:
                key = _check_exponent(exp, dim)
            except (DimensionMismatchError, ValueError) as exc:
                raise ParseError(str(exc), where) from exc
            if key in pairs:
                raise ParseError(f"duplicate exponent vector {list(key)}", where)
            re, im = term.get("re", 0), term.get("im", 0)
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
                raise ParseError("'re' and 'im' must be numbers", where)
            pairs[key] = re if im == 0 else complex(re, im)
        return cls(dim, pairs)


def _check_index(j: int, dim: int) -> None:
    if isinstance(j, bool) or not isinstance(j, int) or not 1 <= j <= dim:
        raise IndexOutOfRangeError(f"coordinate index {j!r} outside 1..{dim}")


def evaluate(p: SparsePoly, z: Sequence[complex]) -> complex:
    """Σ α_ī Π z_j^{i_j}, summed with ``math.fsum`` in sorted exponent order."""
    if len(z) != p.dim:
        raise DimensionMismatchError(f"point has {len(z)} coordinates, polynomial has {p.dim}")
    zs = [complex(v) for v in z]
    re_parts = []
    im_parts = []
    for exp, c in p.items():
        value = complex(c)
        for zj, e in zip(zs, exp):
            if e:
                value *= zj**e
        re_parts.append(value.real)
        im_parts.append(value.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def partial(p: SparsePoly, j: int) -> SparsePoly:
    """Holomorphic partial derivative ∂p/∂z_j (1-based j)."""
    _check_index(j, p.dim)
    k = j - 1
    out: Dict[Exponent, Coefficient] = {}
    for exp, c in p.items():
        if exp[k] == 0:
            continue
        lowered = exp[:k] + (exp[k] - 1,) + exp[k + 1 :]
        out[lowered] = c * exp[k]
    return SparsePoly(p.dim, out)


def restrict_to_zero(p: SparsePoly, zero_set: Iterable[int]) -> SparsePoly:
    """Substitute z_j = 0 for every j in ``zero_set`` (1-based); the dimension is kept."""
    indices = set(zero_set)
    for j in indices:
        _check_index(j, p.dim)
    kept = {exp: c for exp, c in p.items() if all(exp[j - 1] == 0 for j in indices)}
    return SparsePoly(p.dim, kept)


@lru_cache(maxsize=64)
def gradient_polys(p: SparsePoly) -> Tuple[SparsePoly, ...]:
    return tuple(partial(p, j) for j in range(1, p.dim + 1))


@lru_cache(maxsize=64)
def hessian_polys(p: SparsePoly) -> Tuple[Tuple[SparsePoly, ...], ...]:
    first = gradient_polys(p)
    return tuple(tuple(partial(first[i], j) for j in range(1, p.dim + 1)) for i in range(p.dim))


def parse_polynomial(text: str) -> SparsePoly:
    """Parse the JSON polynomial format, reporting the failing line on bad JSON."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    poly = SparsePoly.from_json(payload)
    logger.debug(f"Parsed polynomial in {poly.dim} variables with {len(poly)} terms")
    return poly
