#!/usr/bin/env python3
"""
Tests for modules/Decomposition/Singular_Decomposition.py
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the path so the modules import without installation
root_dir = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(root_dir))

from modules.Decomposition.Singular_Decomposition import (
    SingularSolution, SysSpec, build_singular_system, decompose, manometer_system,
    singular_residual, solve_singular_backward, verify_singular_solution,
)
from modules.Signals.Generalized_Signals import GenSignal, RegSig, SingDist, impulse, step
from tests.support import random_nonzero_rational, random_rational, random_system, run_suite
from utils.common import ProblemInputError


def _solve(sys_spec: SysSpec) -> SingularSolution:
    return solve_singular_backward(build_singular_system(sys_spec), sys_spec)


def test_manometer_equations():
    """The most integrated equation has no input; the next one reads y' + 2y + int y = delta"""
    equations = build_singular_system(manometer_system())
    assert len(equations) == 3
    assert equations[2].lhs == ((0, 1), (-1, 2), (-2, 1))
    assert equations[2].rhs.is_zero()
    assert equations[1].lhs == ((1, 1), (0, 2), (-1, 1))
    assert equations[1].rhs == SingDist.delta(0)


def test_manometer_parts():
    """y_s = 0, y_s' = delta, y_s'' = -2 delta + delta'"""
    solution = _solve(manometer_system())
    assert solution.part(0).is_zero()
    assert solution.part(1) == SingDist((1,))
    assert solution.part(2) == SingDist((-2, 1))
    assert verify_singular_solution(solution, manometer_system())


def test_manometer_doublet_input():
    """x = delta': the integrated input keeps a delta, so y_s = delta"""
    sys_spec = manometer_system().with_pre_initial((0, 0)).with_input(impulse(1, 1))
    equations = build_singular_system(sys_spec)
    assert equations[2].rhs == SingDist((1,))
    assert equations[1].rhs == SingDist((0, 1))
    solution = _solve(sys_spec)
    assert solution.part(0) == SingDist((1,))
    assert solution.part(1) == SingDist((-2, 1))
    assert solution.part(2) == SingDist((3, -2, 1))
    assert verify_singular_solution(solution, sys_spec)


def test_biproper_doublet_input():
    """y' + y = x' + x with x = delta' gives y = delta' exactly, so no jump"""
    sys_spec = SysSpec((1, 1), (1, 1), (0,), impulse(1, 1))
    solution = _solve(sys_spec)
    assert solution.output == SingDist((0, 1))
    assert solution.part(1) == SingDist((0, 0, 1))
    assert verify_singular_solution(solution, sys_spec)


def test_first_order_impulse():
    """y' + y = delta: no delta in y, a unit delta in y'"""
    sys_spec = SysSpec((1, 1), (1,), (0,), impulse())
    solution = _solve(sys_spec)
    assert solution.output.is_zero()
    assert solution.part(1) == SingDist((1,))


def test_biproper_impulse():
    """y' + y = x' + x with x = delta gives y_s = delta"""
    sys_spec = SysSpec((1, 1), (1, 1), (0,), impulse())
    solution = _solve(sys_spec)
    assert solution.output == SingDist((1,))
    assert solution.part(1) == SingDist((0, 1))
    assert verify_singular_solution(solution, sys_spec)


def test_zero_singular_input():
    """No delta and no jump in the input: every part vanishes"""
    sys_spec = SysSpec((1, 3, 2), (1, 1), (1, 0))
    assert _solve(sys_spec).is_zero()
    assert all(e.rhs.is_zero() for e in build_singular_system(sys_spec))


def test_decompose_projections():
    """Each projection keeps its own part of a mixed input"""
    signal = step(2) + impulse(3)
    sys_spec = SysSpec((1, 2, 1), (1, 0), (0, 0), signal)
    singular, regular = decompose(sys_spec)
    assert regular.forcing == signal.regular
    assert singular.input_derivative(0) == SingDist((3,))
    # the step contributes 2 delta once the input is differentiated
    assert singular.input_derivative(1) == SingDist((2, 3))
    manometer_regular = decompose(manometer_system())[1]
    assert manometer_regular.forcing.is_zero()


def test_random_residual_suite():
    """200 random problems: the singular equation balances exactly"""
    rng = np.random.default_rng(20240101)
    for _ in range(200):
        sys_spec = random_system(rng)
        solution = _solve(sys_spec)
        assert singular_residual(solution, sys_spec).is_zero()
        assert verify_singular_solution(solution, sys_spec)


def test_relative_degree_structure():
    """With x = delta, y_s^(k) vanishes below r and equals b0/a0 delta at r"""
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(0, n + 1))
        a = (random_nonzero_rational(rng),) + tuple(random_rational(rng) for _ in range(n))
        b = (random_nonzero_rational(rng),) + tuple(random_rational(rng) for _ in range(m))
        sys_spec = SysSpec(a, b, (0,) * n, impulse())
        solution = _solve(sys_spec)
        r = n - m
        for k in range(r):
            assert solution.part(k).is_zero()
        assert solution.part(r) == SingDist((b[0] / a[0],))


def test_highest_order_bound():
    """No part carries a delta derivative beyond k - r + order of the input"""
    rng = np.random.default_rng(99)
    for _ in range(50):
        sys_spec = random_system(rng, with_step=False)
        solution = _solve(sys_spec)
        input_order = sys_spec.input.singular.order
        for k in range(sys_spec.n + 1):
            assert solution.part(k).order <= max(k - sys_spec.relative_degree + input_order, -1)


def test_validation_errors():
    """Invalid coefficient lists are rejected with their field path"""
    with pytest.raises(ProblemInputError, match="n ≥ m violated"):
        SysSpec((1, 1), (1, 1, 1), (0,))
    with pytest.raises(ProblemInputError, match="a0 must be nonzero"):
        SysSpec((0, 1), (1,), (0,))
    with pytest.raises(ProblemInputError, match="pre_initial"):
        SysSpec((1, 2, 1), (1,), (0,))
    with pytest.raises(ProblemInputError, match="exceeds input order"):
        SysSpec((1, 1), (1,), (0,), impulse(1, 1))


def test_normalization():
    """Coefficients are divided by a0 and kept as entered"""
    sys_spec = SysSpec((2, 4, 2), (2, 0), (1, -2), impulse())
    assert sys_spec.a == (1, 2, 1)
    assert sys_spec.b == (1, 0)
    assert sys_spec.a_raw == (2, 4, 2)
    assert _solve(sys_spec).part(2) == SingDist((-2, 1))
    assert sys_spec.relative_degree == 1


def test_system_with_pre_initial_and_input():
    """Replacing parts of a problem keeps the coefficients"""
    base = manometer_system()
    changed = base.with_pre_initial((Fraction(5), 0)).with_input(GenSignal(RegSig.zero(), SingDist()))
    assert changed.a == base.a and changed.y_pre == (5, 0)
    assert _solve(changed).is_zero()


def run_tests():
    """Run all tests"""
    return run_suite([
        test_manometer_equations,
        test_manometer_parts,
        test_manometer_doublet_input,
        test_biproper_doublet_input,
        test_first_order_impulse,
        test_biproper_impulse,
        test_zero_singular_input,
        test_decompose_projections,
        test_random_residual_suite,
        test_relative_degree_structure,
        test_highest_order_bound,
        test_validation_errors,
        test_normalization,
        test_system_with_pre_initial_and_input,
    ])


if __name__ == "__main__":
    run_tests()
