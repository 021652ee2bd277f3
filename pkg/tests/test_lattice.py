"""
Tests for homogeneisation lattices and the exact integer linear algebra behind them.
"""

import itertools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from disc_tc.config_spaces import disc_F_poly
from disc_tc.errors import ZeroPolynomialError
from disc_tc.lattice import (
    bareiss_determinant,
    bareiss_rank,
    hermite_rows,
    homog_lattice,
    integer_kernel,
    is_homogeneisation,
)
from disc_tc.poly import SparsePoly


def quadric() -> SparsePoly:
    return SparsePoly(3, {(2, 0, 0): 1, (0, 1, 1): -1})


def test_quadric_lattice_members_and_degrees():
    lattice = homog_lattice(quadric())
    assert lattice.rank == 2
    assert lattice.contains((1, 1, 1))
    assert lattice.contains((2, 4, 0))
    assert lattice.degree((1, 1, 1)) == 2
    assert lattice.degree((2, 4, 0)) == 4
    assert not lattice.contains((1, 0, 0))


def test_lattice_of_mixed_degrees_is_zero():
    delta = SparsePoly(2, {(1, 0): 1, (2, 0): 1, (0, 2): 1, (0, 3): 1})
    lattice = homog_lattice(delta)
    assert lattice.rank == 0
    assert lattice.to_json() == {"rank": 0, "basis": [], "degrees": []}


def test_zero_polynomial_has_no_lattice():
    with pytest.raises(ZeroPolynomialError):
        homog_lattice(SparsePoly.zero(3))


def test_is_homogeneisation():
    assert is_homogeneisation(quadric(), (1, 1, 1)) == 2
    assert is_homogeneisation(quadric(), (0, 2, -2)) == 0
    assert is_homogeneisation(quadric(), (1, 0, 0)) is None


def test_membership_matches_brute_force_in_a_box():
    """Every vector of the box is in the lattice exactly when it homogenises."""
    for delta in (quadric(), disc_F_poly(3), SparsePoly(3, {(1, 1, 0): 2, (0, 0, 2): 1, (0, 2, 0): 1})):
        lattice = homog_lattice(delta)
        for d in itertools.product(range(-10, 11), repeat=delta.dim):
            assert lattice.contains(d) == (is_homogeneisation(delta, d) is not None), d


def test_disc_f_lattice_contains_all_ones():
    lattice = homog_lattice(disc_F_poly(4))
    assert lattice.contains((1, 1, 1))
    assert lattice.degree((1, 1, 1)) == 6


def test_bareiss_rank_and_determinant():
    assert bareiss_rank([[1, 2], [2, 4]]) == 1
    assert bareiss_rank([[0, 0], [0, 0]]) == 0
    assert bareiss_rank([[2, -1, -1]]) == 1
    assert bareiss_determinant([[2, 1], [1, 3]]) == 5
    assert bareiss_determinant([[0, 1], [1, 0]]) == -1
    assert bareiss_determinant([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3


def test_integer_kernel_is_saturated():
    kernel = integer_kernel([[2, 2]], 2)
    assert len(kernel) == 1
    assert kernel[0] in ((1, -1), (-1, 1))
    kernel = integer_kernel([[2, -1, -1]], 3)
    assert len(kernel) == 2
    for v in kernel:
        assert 2 * v[0] - v[1] - v[2] == 0


def test_hermite_rows_spans_same_lattice():
    rows = hermite_rows([(2, 4, 0), (1, 1, 1)])
    assert len(rows) == 2
    assert rows[0][0] > 0
    assert rows[1][0] == 0


def combination(lattice, rng):
    coeffs = [int(c) for c in rng.integers(-4, 5, size=lattice.rank)]
    return [sum(c * b[k] for c, b in zip(coeffs, lattice.basis)) for k in range(lattice.dim)]


def test_lattice_is_closed_and_degree_is_additive():
    for delta in (quadric(), disc_F_poly(4)):
        lattice = homog_lattice(delta)
        rng = np.random.default_rng(delta.dim)
        for _ in range(50):
            u, v = combination(lattice, rng), combination(lattice, rng)
            total = [a + b for a, b in zip(u, v)]
            assert lattice.contains(u) and lattice.contains(v)
            assert lattice.contains(total)
            assert lattice.contains([-a for a in u])
            assert lattice.degree(total) == lattice.degree(u) + lattice.degree(v)
            assert lattice.degree(total) == is_homogeneisation(delta, total)
