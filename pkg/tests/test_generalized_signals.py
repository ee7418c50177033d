#!/usr/bin/env python3
"""
Tests for modules/Signals/Generalized_Signals.py
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the path so the modules import without installation
root_dir = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(root_dir))

from modules.Algebra.Polynomial import Poly
from modules.Algebra.Rational_Function import RatFn
from modules.Signals.Generalized_Signals import (
    Atom, GenSignal, RegSig, SingDist, exponential, impulse, input_singular_of_derivative, merge_close_atoms,
    reg_derivative, reg_derivative_at_zero_plus, reg_eval, reg_eval_grid, reg_laplace, regular_jumps,
    render_regular, render_singular, sing_antiderivative, sing_derivative, sing_integral_total, sinusoid, step,
    validate_singular_order,
)
from tests.support import random_nonzero_rational, random_rational, run_suite
from utils.common import ProblemInputError

# 2 e^{-t} - 2 t e^{-t}
MANOMETER_RESPONSE = RegSig((Atom(2, 0, -1), Atom(-2, 1, -1)))


def test_sing_derivative():
    """Derivatives shift the delta train"""
    assert sing_derivative(SingDist.delta(0), 1) == SingDist((0, 1))
    assert sing_derivative(SingDist(), 3).is_zero()
    assert sing_derivative(SingDist((2, -1)), 2) == SingDist((0, 0, 2, -1))
    with pytest.raises(ValueError):
        sing_derivative(SingDist.delta(0), -1)


def test_sing_antiderivative():
    """Integrating from 0- lowers every delta order and drops the delta itself into the regular part"""
    assert sing_antiderivative(SingDist((1,)), 1).is_zero()
    assert sing_antiderivative(SingDist((-2, 1)), 1) == SingDist((1,))
    assert sing_antiderivative(SingDist((0, 0, 3)), 2) == SingDist((3,))
    assert sing_antiderivative(SingDist((4, 5)), 0) == SingDist((4, 5))
    d = SingDist((1, -2, 7))
    assert sing_antiderivative(sing_derivative(d, 2), 2) == d
    with pytest.raises(ValueError):
        sing_antiderivative(SingDist.delta(0), -1)


def test_sing_integral_total():
    """Only the delta coefficient integrates to a nonzero value"""
    assert sing_integral_total(SingDist.delta(0)) == 1
    assert sing_integral_total(SingDist((-2, 1))) == -2
    assert sing_integral_total(SingDist()) == 0


def test_derivative_has_zero_integral():
    """The integral of any distributional derivative vanishes"""
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = SingDist(tuple(random_rational(rng) for _ in range(int(rng.integers(0, 5)))))
        assert sing_integral_total(sing_derivative(d, 1)) == 0


def test_render_singular():
    """Primes up to the second derivative, then ^(k)"""
    assert render_singular(SingDist((-2, 1))) == "-2 delta + delta'"
    assert render_singular(SingDist((0, 0, 0, 3))) == "3 delta^(3)"
    assert render_singular(SingDist()) == "0"


def test_reg_eval_manometer_response():
    """2e^{-t} - 2te^{-t} is 2 at 0 and 0 at 1"""
    assert reg_eval(MANOMETER_RESPONSE, 0.0) == pytest.approx(2.0)
    assert reg_eval(MANOMETER_RESPONSE, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert reg_eval(RegSig.zero(), 3.0) == 0.0
    with pytest.raises(ValueError):
        reg_eval(MANOMETER_RESPONSE, -0.1)


def test_reg_eval_grid_matches_pointwise():
    """Vectorized sampling agrees with pointwise evaluation"""
    g = MANOMETER_RESPONSE + sinusoid(3, 2, "cos", decay=-0.5).regular
    times = np.linspace(0.0, 5.0, 11)
    grid = reg_eval_grid(g, times)
    for t, value in zip(times, grid):
        assert value == pytest.approx(reg_eval(g, t), abs=1e-12)


def test_sinusoid_values():
    """Conjugate pairs evaluate to real sinusoids"""
    g = sinusoid(2, 3, "sin").regular
    assert reg_eval(g, 0.4) == pytest.approx(2 * math.sin(1.2))
    with pytest.raises(ValueError):
        sinusoid(1, 1, "tan")


def test_unpaired_complex_rate_rejected():
    """A lone complex rate would make the signal complex"""
    with pytest.raises(ValueError):
        RegSig((Atom(1, 0, complex(0, 1)),))


def test_derivatives_at_zero_plus():
    """y(0+) = 2 and y'(0+) = -4 for the manometer response"""
    assert reg_derivative_at_zero_plus(MANOMETER_RESPONSE, 0) == 2
    assert reg_derivative_at_zero_plus(MANOMETER_RESPONSE, 1) == -4
    assert reg_derivative_at_zero_plus(RegSig.zero(), 3) == 0
    derivative = reg_derivative(MANOMETER_RESPONSE, 1)
    assert reg_derivative_at_zero_plus(derivative, 0) == -4


def test_reg_laplace_table():
    """Transform table entries"""
    assert reg_laplace(RegSig((Atom(1, 0, -1),))) == RatFn(Poly((1,)), Poly((1, 1)))
    assert reg_laplace(RegSig((Atom(1, 1, -1),))) == RatFn(Poly((1,)), Poly((1, 2, 1)))
    assert reg_laplace(step().regular) == RatFn(Poly((1,)), Poly((0, 1)))
    assert reg_laplace(MANOMETER_RESPONSE) == RatFn(Poly((0, 2)), Poly((1, 2, 1)))


def test_reg_laplace_pair_is_exact():
    """e^{-t} cos(2t) -> (s+1)/((s+1)^2+4) with exact coefficients"""
    pair = RegSig((Atom(complex(0.5, 0), 0, complex(-1, 2)), Atom(complex(0.5, 0), 0, complex(-1, -2))))
    transform = reg_laplace(pair)
    assert transform == RatFn(Poly((1, 1)), Poly((5, 2, 1)))
    assert transform.is_exact()


def test_reg_laplace_linear():
    """Transform of a linear combination is the combination of transforms"""
    rng = np.random.default_rng(17)
    for _ in range(25):
        def random_signal():
            atoms = tuple(Atom(random_nonzero_rational(rng), int(rng.integers(0, 3)), random_rational(rng, -4, 2))
                          for _ in range(int(rng.integers(1, 4))))
            return RegSig(atoms)
        g1, g2 = random_signal(), random_signal()
        alpha, beta = random_rational(rng), random_rational(rng)
        combined = reg_laplace(g1.scale(alpha) + g2.scale(beta))
        assert combined == reg_laplace(g1).scale(alpha) + reg_laplace(g2).scale(beta)


def test_render_regular():
    """Terms are ordered by power, then by rate"""
    assert render_regular(MANOMETER_RESPONSE) == "2 e^{-1 t} - 2 t e^{-1 t}"
    assert render_regular(RegSig((Atom(1, 0, 0), Atom(-1, 0, -1)))) == "-e^{-1 t} + 1"
    assert render_regular(RegSig.zero()) == "0"


def test_merge_close_atoms():
    """Float rates next to exact ones cancel"""
    g = RegSig((Atom(Fraction(1), 0, Fraction(-1)), Atom(-1.0, 0, -1.0000000000000002)))
    assert merge_close_atoms(g).is_zero()


def test_exponential_constructor():
    """t e^{-2t} switched on at the origin"""
    g = exponential(3, -2, power=1).regular
    assert g.atoms == (Atom(Fraction(3), 1, Fraction(-2)),)
    assert reg_eval(g, 0.5) == pytest.approx(1.5 * math.exp(-1.0))
    assert reg_laplace(g) == RatFn(Poly((3,)), Poly((4, 4, 1)))


def test_regular_jumps_of_step():
    """A step from a nonzero baseline jumps by the difference"""
    x = step(3, pre_value=1).regular
    assert regular_jumps(x, 2) == [2, 0]


def test_singular_of_input_derivatives():
    """Steps and deltas both feed the singular part of derivatives"""
    signal = step(2) + impulse(1)
    assert input_singular_of_derivative(signal, 0) == SingDist((1,))
    assert input_singular_of_derivative(signal, 1) == SingDist((2, 1))
    ramp_on = GenSignal(RegSig((Atom(1, 0, -1),)), SingDist())   # e^{-t}: jump 1, slope jump -1
    assert input_singular_of_derivative(ramp_on, 2) == SingDist((-1, 1))


def test_validate_singular_order():
    """Delta trains beyond the input order are rejected"""
    validate_singular_order(impulse(1, 1), 1)
    with pytest.raises(ProblemInputError, match="exceeds input order m=0"):
        validate_singular_order(impulse(1, 1), 0)


def run_tests():
    """Run all tests"""
    return run_suite([
        test_sing_derivative,
        test_sing_antiderivative,
        test_sing_integral_total,
        test_derivative_has_zero_integral,
        test_render_singular,
        test_reg_eval_manometer_response,
        test_reg_eval_grid_matches_pointwise,
        test_sinusoid_values,
        test_unpaired_complex_rate_rejected,
        test_derivatives_at_zero_plus,
        test_reg_laplace_table,
        test_reg_laplace_pair_is_exact,
        test_reg_laplace_linear,
        test_render_regular,
        test_merge_close_atoms,
        test_exponential_constructor,
        test_regular_jumps_of_step,
        test_singular_of_input_derivatives,
        test_validate_singular_order,
    ])


if __name__ == "__main__":
    run_tests()
