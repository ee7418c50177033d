#!/usr/bin/env python3
"""
Tests for modules/Algebra/Polynomial.py
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the path so the modules import without installation
root_dir = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(root_dir))

from modules.Algebra.Polynomial import (
    Poly, poly_arith, poly_gcd, poly_roots, render_poly, snap_rational, square_free_factors,
)
from tests.support import run_suite


def test_trailing_zeros_trimmed():
    """Canonical coefficient lists have no trailing zeros"""
    assert Poly((1, 2, 0, 0)) == Poly((1, 2))
    assert Poly((0, 0)).is_zero()
    assert Poly(()).degree == -1


def test_arithmetic_is_exact():
    """Sum, product and divmod stay on Fractions"""
    p = Poly((1, 1))            # s + 1
    q = Poly((Fraction(-1, 2), 1))  # s - 1/2
    product = poly_arith(p, q, 'mul')
    assert product == Poly((Fraction(-1, 2), Fraction(1, 2), 1))
    quotient, remainder = poly_arith(product, q, 'divmod')
    assert quotient == p and remainder.is_zero()
    assert poly_arith(p, q, 'sub') == Poly((Fraction(3, 2),))
    assert all(isinstance(c, Fraction) for c in product.coeffs)


def test_divmod_by_zero_raises():
    """Division by the zero polynomial is an error"""
    with pytest.raises(ZeroDivisionError):
        divmod(Poly((1, 2)), Poly(()))


def test_evaluation_and_shift():
    """Horner evaluation and Taylor shift agree"""
    p = Poly((1, 2, 1))
    assert p(Fraction(-1)) == 0
    assert p(2) == 9
    shifted = p.shift(-1)          # p(u - 1) = u^2
    assert shifted == Poly((0, 0, 1))


def test_gcd_and_square_free():
    """Yun factorization recovers multiplicities exactly"""
    p = Poly.from_roots([Fraction(-1), Fraction(-1), Fraction(2)])
    factors = dict((m, f) for f, m in square_free_factors(p))
    assert factors[2] == Poly((1, 1))
    assert factors[1] == Poly((-2, 1))
    assert poly_gcd(p, p.derivative()) == Poly((1, 1))


def test_roots_repeated_rational():
    """(s+1)^2 gives the exact root -1 with multiplicity 2"""
    roots = poly_roots(Poly((1, 2, 1)))
    assert len(roots) == 1
    value, mult = roots.roots[0]
    assert value == Fraction(-1) and isinstance(value, Fraction)
    assert mult == 2


def test_roots_near_double_stay_distinct():
    """(s+1)(s+1+10^-9) keeps two exact simple roots instead of one double root"""
    shift = Fraction(1, 10**9)
    roots = poly_roots(Poly.from_roots([Fraction(-1), -1 - shift]))
    assert roots.roots == ((-1 - shift, 1), (Fraction(-1), 1))
    mixed = poly_roots(Poly.from_roots([Fraction(-2), Fraction(-2), Fraction(-2) + Fraction(1, 10**6), Fraction(3, 7)]))
    assert mixed.roots == ((Fraction(-2), 2), (Fraction(-1999999, 10**6), 1), (Fraction(3, 7), 1))


def test_roots_irrational_not_snapped():
    """s^2 - 2 has no rational roots, so both stay floats"""
    roots = poly_roots(Poly((-2, 0, 1)))
    assert all(isinstance(value, float) for value in roots.values())
    assert roots.values()[1] == pytest.approx(np.sqrt(2))


def test_roots_complex_pair_conjugate():
    """s^2 + 2s + 5 gives an exact conjugate pair"""
    roots = poly_roots(Poly((5, 2, 1)))
    values = sorted(roots.values(), key=lambda z: complex(z).imag)
    assert abs(values[0] - complex(-1, -2)) < 1e-12
    assert values[0] == complex(values[1]).conjugate()
    assert roots.total_multiplicity == 2


def test_roots_float_clustering():
    """A float polynomial with a double root clusters it"""
    p = Poly.from_roots([0.5, 0.5, -3.0])
    roots = poly_roots(p.to_float())
    multiplicities = sorted(m for _, m in roots)
    assert multiplicities == [1, 2]


def test_roots_degree_zero_raises():
    """Root finding needs degree >= 1"""
    with pytest.raises(ValueError):
        poly_roots(Poly((3,)))


def test_random_root_multiplicities_sum_to_degree():
    """Multiplicities always sum to the degree"""
    rng = np.random.default_rng(11)
    for _ in range(50):
        degree = int(rng.integers(1, 7))
        coeffs = [Fraction(int(rng.integers(-9, 10)), int(rng.choice((1, 2, 3)))) for _ in range(degree)]
        p = Poly(tuple(coeffs) + (Fraction(1),))
        assert poly_roots(p).total_multiplicity == degree


def test_snap_rational():
    """Near-rational floats snap, irrational ones do not"""
    assert snap_rational(0.3333333333333333) == Fraction(1, 3)
    assert snap_rational(np.sqrt(2)) is None
    assert snap_rational(np.pi) is None
    assert snap_rational(-2.5) == Fraction(-5, 2)


def test_render_poly():
    """Highest degree first, unit coefficients dropped"""
    assert render_poly(Poly((0, 2))) == "2s"
    assert render_poly(Poly((1, 2, 1))) == "s^2+2s+1"
    assert render_poly(Poly(())) == "0"


def run_tests():
    """Run all tests"""
    return run_suite([
        test_trailing_zeros_trimmed,
        test_arithmetic_is_exact,
        test_divmod_by_zero_raises,
        test_evaluation_and_shift,
        test_gcd_and_square_free,
        test_roots_repeated_rational,
        test_roots_near_double_stay_distinct,
        test_roots_irrational_not_snapped,
        test_roots_complex_pair_conjugate,
        test_roots_float_clustering,
        test_roots_degree_zero_raises,
        test_random_root_multiplicities_sum_to_degree,
        test_snap_rational,
        test_render_poly,
    ])


if __name__ == "__main__":
    run_tests()
