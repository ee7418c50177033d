#!/usr/bin/env python3
"""
Singular Decomposition Module
-----------------------------

Stage one of the consistent-initialization method. A linear ODE with constant
coefficients

    a_0 y^(n) + a_1 y^(n-1) + ... + a_n y = b_0 x^(m) + ... + b_m x,   n >= m

is split into a singular subproblem (delta content only) and a regular
subproblem (piecewise smooth content only). Integrating the equation j times
and keeping only its singular part gives a triangular family of equations
whose unknowns are the singular parts y_s^(k) of every output derivative.
Solving it backward from the most integrated equation yields the delta train
carried by y and each of its derivatives.

All arithmetic in this module is exact on Fraction data.
"""

import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Sequence, Tuple

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Algebra.Polynomial import Poly, is_exact
from modules.Signals.Generalized_Signals import (
    Atom, GenSignal, RegSig, SingDist, input_singular_of_derivative, render_singular,
    sing_antiderivative, sing_derivative, validate_singular_order,
)
from utils.common import ProblemInputError, Scalar, format_number, setup_logging

logger = setup_logging("Singular_Decomposition")


def _coefficient(value, field_path: str) -> Scalar:
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise ProblemInputError(f"{field_path}: expected a real number, got {value!r}")
    return Fraction(value) if isinstance(value, int) else value


@dataclass(frozen=True)
class SysSpec:
    """
    One ODE problem: coefficients, pre-initial output values and the input.

    a_raw and b_raw keep the coefficients as entered (highest derivative
    first); a and b are the same lists divided by a_0.

    Raises:
        ProblemInputError: empty coefficient lists, a_0 == 0, m > n, a
            pre-initial list of the wrong length or an input whose delta
            order exceeds m
    """
    a_raw: Tuple[Scalar, ...]
    b_raw: Tuple[Scalar, ...]
    y_pre: Tuple[Scalar, ...] = ()
    input: GenSignal = field(default_factory=GenSignal)
    a: Tuple[Scalar, ...] = field(init=False, repr=False, compare=False)
    b: Tuple[Scalar, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a_raw = tuple(_coefficient(c, f"system.a[{i}]") for i, c in enumerate(self.a_raw))
        b_raw = tuple(_coefficient(c, f"system.b[{i}]") for i, c in enumerate(self.b_raw))
        y_pre = tuple(_coefficient(c, f"pre_initial[{i}]") for i, c in enumerate(self.y_pre))
        if not a_raw:
            raise ProblemInputError("system.a: at least one coefficient is required")
        if not b_raw:
            raise ProblemInputError("system.b: at least one coefficient is required")
        if a_raw[0] == 0:
            raise ProblemInputError("system.a[0]: leading coefficient a0 must be nonzero")
        n, m = len(a_raw) - 1, len(b_raw) - 1
        if m > n:
            raise ProblemInputError(f"n ≥ m violated (n={n}, m={m})")
        if len(y_pre) != n:
            raise ProblemInputError(f"pre_initial: expected {n} values, got {len(y_pre)}")
        validate_singular_order(self.input, m)

        lead = a_raw[0]
        object.__setattr__(self, 'a_raw', a_raw)
        object.__setattr__(self, 'b_raw', b_raw)
        object.__setattr__(self, 'y_pre', y_pre)
        object.__setattr__(self, 'a', tuple(c / lead for c in a_raw))
        object.__setattr__(self, 'b', tuple(c / lead for c in b_raw))

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def m(self) -> int:
        return len(self.b) - 1

    @property
    def relative_degree(self) -> int:
        return self.n - self.m

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.a + self.b + self.y_pre) and self.input.regular.is_exact()

    def denominator(self) -> Poly:
        """sum_i a_i s^(n-i), the characteristic polynomial (monic)."""
        return Poly(tuple(reversed(self.a)))

    def numerator(self) -> Poly:
        """sum_j b_j s^(m-j)."""
        return Poly(tuple(reversed(self.b)))

    def with_input(self, signal: GenSignal) -> "SysSpec":
        return SysSpec(self.a_raw, self.b_raw, self.y_pre, signal)

    def with_pre_initial(self, y_pre: Sequence[Scalar]) -> "SysSpec":
        return SysSpec(self.a_raw, self.b_raw, tuple(y_pre), self.input)


@dataclass(frozen=True)
class SingularSubproblem:
    """Singular projection: the system driven by the delta content of its input."""
    system: SysSpec

    def input_derivative(self, k: int) -> SingDist:
        """Singular part of x^(k), including delta content from regular-part jumps."""
        return input_singular_of_derivative(self.system.input, k)


@dataclass(frozen=True)
class RegularSubproblem:
    """Regular projection: same coefficients, input replaced by its regular part."""
    system: SysSpec

    @property
    def forcing(self) -> RegSig:
        return self.system.input.regular


def decompose(sys_spec: SysSpec) -> Tuple[SingularSubproblem, RegularSubproblem]:
    """Split a problem into its singular and regular projections."""
    return SingularSubproblem(sys_spec), RegularSubproblem(sys_spec)


class SingularEquation(NamedTuple):
    """
    Singular part of the j-times integrated equation.

    lhs holds (derivative order, coefficient) pairs, highest order first, so
    the equation reads sum coefficient * y_s^(order) = rhs. A negative order
    stands for a repeated integral of y from 0-.
    """
    index: int
    lhs: Tuple[Tuple[int, Scalar], ...]
    rhs: SingDist


@dataclass(frozen=True)
class SingularSolution:
    """Singular parts [y_s, y_s', ..., y_s^(n)] of the output and its derivatives."""
    derivative_parts: Tuple[SingDist, ...]

    def part(self, k: int) -> SingDist:
        return self.derivative_parts[k]

    @property
    def output(self) -> SingDist:
        return self.derivative_parts[0]

    def is_zero(self) -> bool:
        return all(d.is_zero() for d in self.derivative_parts)


def _rhs(sub: SingularSubproblem, j: int) -> SingDist:
    sys_spec = sub.system
    total = SingDist()
    for j_prime, b in enumerate(sys_spec.b):
        if b == 0:
            continue
        order = sys_spec.m - j - j_prime
        if order >= 0:
            total = total + sub.input_derivative(order).scale(b)
        else:
            total = total + sing_antiderivative(sub.input_derivative(0), -order).scale(b)
    return total


def build_singular_system(sys_spec: SysSpec) -> List[SingularEquation]:
    """
    Build the n+1 singular equations of the integrated ODE family.

    Equation j holds a_i y^(n-j-i) for every i; terms with n-j-i < 0 are
    repeated integrals whose singular part is the shifted delta train of y_s.
    Integration constants carry no singularity and are left out.
    """
    sub, _ = decompose(sys_spec)
    n = sys_spec.n
    equations = []
    for j in range(n + 1):
        lhs = tuple((n - j - i, sys_spec.a[i]) for i in range(n + 1))
        equations.append(SingularEquation(j, lhs, _rhs(sub, j)))
    return equations


def _solve_output_part(equation: SingularEquation) -> SingDist:
    """
    Solve y_s + sum_{i>=1} a_i (i-fold integral of y_s) = rhs.

    The integral of order i shifts delta^(p+i) down to delta^(p), so the
    coefficients follow from the top order downward.
    """
    top = equation.rhs.order
    coeffs: List[Scalar] = [Fraction(0)] * (top + 1)
    for p in range(top, -1, -1):
        value = equation.rhs.coeff(p)
        for order, coefficient in equation.lhs:
            if order < 0 and p - order <= top:
                value -= coefficient * coeffs[p - order]
        coeffs[p] = value
    return SingDist(tuple(coeffs))


def solve_singular_backward(system: Sequence[SingularEquation], sys_spec: SysSpec) -> SingularSolution:
    """
    Solve the triangular singular system from the most integrated equation.

    Equation n gives y_s (a_0 = 1), then equation j gives
    y_s^(n-j) = rhs_j - sum_{i>=1} a_i y_s^(n-j-i), where the integrated
    terms are read off the already known y_s.
    """
    n = sys_spec.n
    if len(system) != n + 1:
        raise ValueError(f"Singular system has {len(system)} equations, expected {n + 1}")
    parts: List[SingDist] = [SingDist()] * (n + 1)
    for equation in sorted(system, key=lambda e: -e.index):
        target = n - equation.index
        if target == 0:
            value = _solve_output_part(equation)
        else:
            value = equation.rhs
            for order, coefficient in equation.lhs:
                if order == target or coefficient == 0:
                    continue
                known = parts[order] if order >= 0 else sing_antiderivative(parts[0], -order)
                value = value - known.scale(coefficient)
        parts[target] = value
        logger.debug(f"y_s^({target}) = {render_singular(value)}")
    return SingularSolution(tuple(parts))


def singular_residual(solution: SingularSolution, sys_spec: SysSpec) -> SingDist:
    """sum a_i y_s^(n-i) minus the singular part of the right-hand side."""
    sub, _ = decompose(sys_spec)
    n = sys_spec.n
    lhs = SingDist()
    for i, a in enumerate(sys_spec.a):
        lhs = lhs + solution.part(n - i).scale(a)
    return lhs - _rhs(sub, 0)


def verify_singular_solution(solution: SingularSolution, sys_spec: SysSpec) -> bool:
    """
    Exact check of a singular solution.

    The original equation must balance, and consecutive parts must differ by
    a pure delta: y_s^(k+1) - (y_s^(k))' is the jump of y^(k) times delta.
    """
    if len(solution.derivative_parts) != sys_spec.n + 1:
        return False
    if not singular_residual(solution, sys_spec).is_zero():
        return False
    for k in range(sys_spec.n):
        difference = solution.part(k + 1) - sing_derivative(solution.part(k), 1)
        if difference.order > 0:
            return False
    return True


def manometer_system(mass=1, friction=2, stiffness=1, area=1, magnitude=1,
                     v_pre=1, vdot_pre=-2, p_pre=0) -> SysSpec:
    """
    U-tube manometer m v'' + l v' + k v = A p' hit by p = p(0-) + M delta.

    Defaults give the worked example with A*M = 1.
    """
    p_pre = Fraction(p_pre) if isinstance(p_pre, int) else p_pre
    regular = RegSig((Atom(p_pre, 0, 0),), p_pre) if p_pre != 0 else RegSig.zero()
    signal = GenSignal(regular, SingDist.delta(0, magnitude))
    return SysSpec((mass, friction, stiffness), (area, 0), (v_pre, vdot_pre), signal)


def main():
    """Solve the manometer's singular subproblem and print the parts"""
    sys_spec = manometer_system()
    solution = solve_singular_backward(build_singular_system(sys_spec), sys_spec)
    for k, part in enumerate(solution.derivative_parts):
        print(f"y_s^({k}) = {render_singular(part)}")
    print(f"verified: {verify_singular_solution(solution, sys_spec)}")
    print(f"a = {[format_number(c) for c in sys_spec.a]}")


if __name__ == "__main__":
    main()
