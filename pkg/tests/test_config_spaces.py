"""
Tests for planar configurations, the roots/coefficients correspondence and the discriminants.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from disc_tc.config_spaces import (
    CoeffVector,
    PlanarConfig,
    bound_for_config_spaces,
    bound_report_for_config_spaces,
    coeffs_to_roots,
    disc_C,
    disc_C_achievable,
    disc_C_exact,
    disc_F,
    disc_F_poly,
    matching_distance,
    orbit_alignment,
    retract_barycentre,
    roots_to_coeffs,
)
from disc_tc.errors import (
    CoincidentPointsError,
    ExpansionCapError,
    NotCentredError,
    ParseError,
    RootFindingError,
)
from disc_tc.lattice import is_homogeneisation
from disc_tc.poly import SparsePoly, evaluate

CUBE_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


def random_centred(n: int, rng: np.random.Generator) -> PlanarConfig:
    w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PlanarConfig(w - np.mean(w))


def test_retraction_centres_and_fixes_centred_configs():
    c = retract_barycentre(PlanarConfig([0, 2]), 1.0)
    assert matching_distance(c, PlanarConfig([-1, 1])).distance == 0
    centred = PlanarConfig([1, -1, 2j, -2j])
    assert np.array_equal(retract_barycentre(centred, 0.4).points, centred.points)


def test_retraction_commutes_with_rotation():
    rng = np.random.default_rng(1)
    c = PlanarConfig(rng.standard_normal(4) + 1j * rng.standard_normal(4))
    for t in (0.0, 0.3, 1.0):
        lhs = retract_barycentre(c.rotate(0.9), t).points
        rhs = retract_barycentre(c, t).rotate(0.9).points
        assert np.allclose(lhs, rhs, atol=1e-14)


def test_coincident_points_are_rejected():
    with pytest.raises(CoincidentPointsError):
        PlanarConfig([1, 1, 0])


def test_roots_to_coeffs_examples():
    a = roots_to_coeffs(PlanarConfig([1, -1]))
    assert np.allclose(a.values, [-1])
    assert np.allclose(a.polynomial(), [1, 0, -1])
    cube = roots_to_coeffs(PlanarConfig(CUBE_ROOTS))
    assert np.allclose(cube.polynomial(), [1, 0, 0, -1], atol=1e-12)


def test_roots_to_coeffs_needs_a_centred_config():
    with pytest.raises(NotCentredError):
        roots_to_coeffs(PlanarConfig([0, 2]))


def test_coeffs_to_roots_examples():
    assert matching_distance(coeffs_to_roots(CoeffVector([-1])), np.array([1, -1])).distance < 1e-12
    roots = coeffs_to_roots(CoeffVector([0, 1]))
    assert matching_distance(roots, CUBE_ROOTS).distance < 1e-12


def test_multiple_root_is_a_root_finding_error():
    with pytest.raises(RootFindingError):
        coeffs_to_roots(CoeffVector([0, 0]))


def test_roots_coefficients_roundtrip():
    rng = np.random.default_rng(2)
    for k in range(100):
        c = random_centred(2 + k % 7, rng)
        back = coeffs_to_roots(roots_to_coeffs(c))
        assert matching_distance(back, c).distance < 1e-8


def test_random_coefficients_have_small_residuals():
    rng = np.random.default_rng(3)
    for n in range(2, 8):
        a = CoeffVector(rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1))
        roots = coeffs_to_roots(a).points
        coeffs = a.polynomial()
        scale = np.abs(roots)[:, None] ** np.arange(n, -1, -1)[None, :] @ np.abs(coeffs)
        assert np.all(np.abs(np.polyval(coeffs, roots)) < 1e-9 * np.maximum(1.0, scale))


def test_two_point_discriminant_is_minus_four_c():
    rng = np.random.default_rng(4)
    for _ in range(100):
        c = random_centred(2, rng)
        constant = roots_to_coeffs(c).polynomial()[2]
        assert disc_C(c) == pytest.approx(-4 * constant, rel=1e-9)


def test_three_point_discriminant_matches_the_cubic_formula():
    rng = np.random.default_rng(5)
    for _ in range(100):
        c = random_centred(3, rng)
        _, _, p, q = roots_to_coeffs(c).polynomial()
        assert disc_C(c) == pytest.approx(-4 * p**3 - 27 * q**2, rel=1e-9)


def test_coefficient_and_root_paths_agree():
    rng = np.random.default_rng(6)
    for k in range(50):
        c = random_centred(2 + k % 7, rng)
        assert disc_C(roots_to_coeffs(c)) == pytest.approx(disc_C(c), rel=1e-9)


def test_coefficient_discriminant_is_weighted_homogeneous():
    rng = np.random.default_rng(7)
    for k in range(100):
        n = 2 + k % 5
        a = CoeffVector(rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1))
        theta = np.exp(1j * rng.uniform(0, 2 * np.pi))
        scaled = CoeffVector(a.values * theta ** np.arange(2, n + 1))
        assert disc_C(scaled) == pytest.approx(theta ** (n * (n - 1)) * disc_C(a), rel=1e-9)


def test_discriminant_modulus_is_rotation_invariant():
    rng = np.random.default_rng(8)
    for _ in range(20):
        c = random_centred(5, rng)
        assert abs(disc_C(c.rotate(1.3))) == pytest.approx(abs(disc_C(c)), rel=1e-10)


def test_no_centred_config_is_fixed_by_all_rotations():
    rng = np.random.default_rng(9)
    for n in range(2, 7):
        c = random_centred(n, rng)
        assert matching_distance(c.rotate(np.pi / (n + 1)), c).distance > 0


def test_exact_discriminant_at_integer_points():
    assert disc_C_exact([5]) == -20
    assert disc_C_exact([2, 3]) == -4 * 2**3 - 27 * 3**2
    rng = np.random.default_rng(10)
    for _ in range(10):
        a = [int(v) for v in rng.integers(-5, 6, size=3)]
        exact = disc_C_exact(a)
        if exact == 0:
            continue
        assert disc_C(CoeffVector(a)) == pytest.approx(exact, rel=1e-9)


def test_exact_achievability():
    assert disc_C_achievable(3, {1})
    assert disc_C_achievable(3, {2})
    assert not disc_C_achievable(3, {1, 2})
    assert disc_C_achievable(4, set())


def test_ordered_discriminant_small_cases():
    assert disc_F([1.5 + 2j]) == 3 + 4j
    w1, w2 = SparsePoly.variable(2, 1), SparsePoly.variable(2, 2)
    expected = (w1 - w2) * (2 * w1 + w2) * (w1 + 2 * w2)
    assert disc_F_poly(3) == expected


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_expanded_ordered_discriminant(n):
    delta = disc_F_poly(n)
    assert is_homogeneisation(delta, [1] * (n - 1)) == n * (n - 1) // 2
    rng = np.random.default_rng(n)
    for _ in range(10):
        w = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        assert evaluate(delta, w) == pytest.approx(disc_F(w), rel=1e-10)


def test_expansion_cap():
    with pytest.raises(ExpansionCapError):
        disc_F_poly(7)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("ordered", [True, False])
def test_configuration_space_bounds(n, ordered):
    report = bound_report_for_config_spaces(n, ordered)
    assert report.t == 0
    assert report.bound == 2 * n - 3
    assert bound_for_config_spaces(n, ordered) == 2 * n - 3


def test_matching_and_orbit_alignment():
    c = PlanarConfig([1, -0.5 + 0.2j, -0.5 - 0.2j])
    shuffled = PlanarConfig(c.points[[2, 0, 1]])
    assert matching_distance(c, shuffled).distance == 0
    alignment = orbit_alignment(c, c.rotate(0.8))
    assert alignment.distance < 1e-12
    assert alignment.angle == pytest.approx(0.8)


def test_config_json():
    c = PlanarConfig([1j, -1j, 0.5])
    payload = c.to_json()
    assert payload["n"] == 3
    assert payload["points"][0] == [0.0, -1.0]
    assert matching_distance(PlanarConfig.from_json(payload), c).distance == 0
    with pytest.raises(ParseError):
        PlanarConfig.from_json({"points": [[1, 2], [3]]})
    with pytest.raises(ParseError):
        PlanarConfig.from_json({"n": 3, "points": [[1, 2], [3, 4]]})


def test_coefficient_json():
    a = roots_to_coeffs(PlanarConfig(CUBE_ROOTS))
    back = CoeffVector.from_json(a.to_json())
    assert back.n == 3
    assert np.allclose(back.values, a.values)
    with pytest.raises(ParseError):
        CoeffVector.from_json({"n": 4, "a": [[0, 0], [1, 0]]})
