"""
Tests for sparse polynomial arithmetic, evaluation, derivatives and the JSON format.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from disc_tc.errors import DimensionMismatchError, IndexOutOfRangeError, ParseError
from disc_tc.poly import (
    SparsePoly,
    evaluate,
    gradient_polys,
    hessian_polys,
    parse_polynomial,
    partial,
    restrict_to_zero,
)


def quadric() -> SparsePoly:
    """z1^2 - z2 z3"""
    return SparsePoly(3, {(2, 0, 0): 1, (0, 1, 1): -1})


def test_canonical_form_drops_zeros_and_sorts():
    p = SparsePoly(2, {(1, 0): 3, (0, 1): 0, (0, 0): 1})
    assert len(p) == 2
    assert p.support() == [(0, 0), (1, 0)]
    assert SparsePoly(2, {(1, 0): 1}) - SparsePoly(2, {(1, 0): 1}) == SparsePoly.zero(2)


def test_integral_coefficients_stay_exact():
    z1 = SparsePoly.variable(2, 1)
    z2 = SparsePoly.variable(2, 2)
    square = (z1 + z2) ** 2
    assert square.terms == {(0, 2): 1, (1, 1): 2, (2, 0): 1}
    assert all(isinstance(c, int) for c in square.terms.values())
    assert square.degree() == 2


def test_evaluate_quadric():
    p = quadric()
    assert evaluate(p, [1, 1, 1]) == 0
    assert evaluate(p, [2, 1, 1]) == 3
    assert p([1j, 1, 1]) == -2


def test_evaluate_rejects_wrong_dimension():
    with pytest.raises(DimensionMismatchError):
        evaluate(quadric(), [1, 2])


def test_partial_derivatives():
    p = quadric()
    assert partial(p, 1) == SparsePoly(3, {(1, 0, 0): 2})
    assert partial(p, 2) == SparsePoly(3, {(0, 0, 1): -1})
    first = gradient_polys(p)
    assert len(first) == 3
    second = hessian_polys(p)
    for i in range(3):
        for j in range(3):
            assert second[i][j] == second[j][i]


@pytest.mark.parametrize("j", [0, 4, -1])
def test_partial_index_out_of_range(j):
    with pytest.raises(IndexOutOfRangeError):
        partial(quadric(), j)


def test_restrict_to_zero_keeps_surviving_terms():
    p = SparsePoly(2, {(1, 0): 1, (2, 0): 1, (0, 2): 1, (0, 3): 1})
    restricted = restrict_to_zero(p, {1})
    assert restricted == SparsePoly(2, {(0, 2): 1, (0, 3): 1})
    assert restrict_to_zero(p, {1, 2}).is_zero


def test_json_roundtrip_preserves_polynomial():
    p = SparsePoly(2, {(1, 0): 1.5 - 2j, (0, 3): 4})
    assert SparsePoly.from_json(p.to_json()) == p


def test_duplicate_exponent_is_a_parse_error():
    payload = {"dim": 2, "terms": [{"exp": [1, 0], "re": 1}, {"exp": [1, 0], "re": 2}]}
    with pytest.raises(ParseError) as info:
        SparsePoly.from_json(payload)
    assert info.value.location == "terms[1]"


def test_ragged_exponent_is_a_parse_error():
    payload = {"dim": 2, "terms": [{"exp": [1, 0, 0], "re": 1}]}
    with pytest.raises(ParseError):
        SparsePoly.from_json(payload)


def test_malformed_json_reports_line():
    with pytest.raises(ParseError) as info:
        parse_polynomial('{"dim": 2,\n "terms": [}')
    assert "line 2" in str(info.value)


def random_poly(dim, rng, terms=6, max_degree=3) -> SparsePoly:
    return SparsePoly(
        dim,
        {
            tuple(int(e) for e in rng.integers(0, max_degree + 1, size=dim)): int(rng.integers(-5, 6))
            for _ in range(terms)
        },
    )


def test_evaluation_is_linear():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p, q = random_poly(3, rng), random_poly(3, rng)
        z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        expected = evaluate(p, z) + 3 * evaluate(q, z)
        assert evaluate(p + 3 * q, z) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_partial_commutes_with_restriction_away_from_the_zero_set():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = random_poly(4, rng, terms=8)
        zero_set = {int(j) for j in rng.choice([1, 2, 3, 4], size=2, replace=False)}
        for j in {1, 2, 3, 4} - zero_set:
            assert partial(restrict_to_zero(p, zero_set), j) == restrict_to_zero(partial(p, j), zero_set)


def test_restriction_evaluates_like_substituting_zeros():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = random_poly(4, rng, terms=8)
        zero_set = {int(j) for j in rng.choice([1, 2, 3, 4], size=2, replace=False)}
        z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        substituted = np.array([0 if j + 1 in zero_set else v for j, v in enumerate(z)], dtype=complex)
        assert evaluate(restrict_to_zero(p, zero_set), z) == pytest.approx(
            evaluate(p, substituted), rel=1e-12, abs=1e-12
        )
