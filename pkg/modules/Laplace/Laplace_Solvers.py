#!/usr/bin/env python3
"""
Laplace Solvers Module
----------------------

Stage three of the consistent-initialization method plus two reference
methods used for comparison:

- modified L+ : singular solve, jumps, then the L+ transform of the regular
                subproblem seeded with the consistent 0+ values
- L-          : one-step transform from 0- data with the full input; the
                polynomial part of an improper result is the output's delta content
- naive L+    : L+ applied to the original equation with 0- values and the
                delta transforms set to zero; kept to show the inconsistency it causes

Every solver returns a Solution with the regular part in closed form.
"""

import os
import sys
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Algebra.Polynomial import Poly
from modules.Algebra.Rational_Function import RatFn, partial_fractions, ratfn_eval, series_quotient
from modules.Decomposition.Singular_Decomposition import SysSpec, manometer_system, verify_singular_solution
from modules.Initialization.Jump_Analysis import (
    JumpReport, analyze, derivative_label, post_initial_conditions,
)
from modules.Signals.Generalized_Signals import (
    Atom, RegSig, SingDist, derivative_magnitude_at_zero, is_zero_signal, merge_close_atoms,
    reg_derivative, reg_derivative_at_zero_plus, reg_eval, reg_laplace, render_regular, render_singular,
)
from utils.common import (
    ConsistencyCheckError, Scalar, exact_to_json, format_number, load_config, setup_logging,
)

logger = setup_logging("Laplace_Solvers")

TOLERANCES = load_config("solver")["tolerances"]

METHOD_MODIFIED_LPLUS = "modified_lplus"
METHOD_LMINUS = "lminus"
METHOD_NAIVE_LPLUS = "naive_lplus"

NAIVE_WARNING = ("naive L+ uses 0- values and drops delta transforms; "
                 "its result is not consistent with the post-initial conditions")


def _close(value, expected, tol: float, scale: float = 0.0) -> bool:
    return abs(value - expected) <= tol * (1 + abs(expected) + scale)


@dataclass(frozen=True)
class Solution:
    """
    Generalized solution y = y_r + y_s of one problem.

    transform is the L+ transform of the regular part only; singular holds
    the delta content of y itself.
    """
    regular: RegSig
    singular: SingDist
    transform: RatFn
    report: JumpReport
    method: str
    warnings: Tuple[str, ...] = ()

    def evaluate(self, t: float) -> float:
        """Regular part at t >= 0; the delta content is not pointwise-evaluable."""
        return reg_eval(self.regular, t)

    def zero_plus_values(self, count: int) -> List[Scalar]:
        return [reg_derivative_at_zero_plus(self.regular, k) for k in range(count)]

    def is_identically_zero(self) -> bool:
        return self.regular.is_zero() and self.singular.is_zero()

    def closed_form(self) -> str:
        if self.singular.is_zero():
            return f"y(t) = {render_regular(self.regular)}"
        if self.regular.is_zero():
            return f"y = {render_singular(self.singular)}"
        return f"y(t) = {render_regular(self.regular)} + [{render_singular(self.singular)}]"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'closed_form': self.closed_form(),
            'regular': render_regular(self.regular),
            'singular': render_singular(self.singular),
            'transform': str(self.transform),
            'atoms': [{
                'coeff': exact_to_json(a.coefficient),
                'power': a.power,
                'rate': exact_to_json(a.rate),
            } for a in self.regular.atoms],
            'jumps': self.report.to_dict(),
            'warnings': list(self.warnings),
        }


def _initial_value_poly(coeffs: Sequence[Scalar], order: int, values: Sequence[Scalar]) -> Poly:
    """
    P(s) such that the transform of sum_i coeffs[i] f^(order-i) is C(s) F(s) - P(s).

    Each derivative contributes sum_{l<k} s^(k-1-l) f^(l)(0) through the
    derivative rule; values holds f(0), f'(0), ... at the chosen side of 0.
    """
    result = Poly(())
    for i, c in enumerate(coeffs):
        k = order - i
        for l in range(k):
            if c != 0 and values[l] != 0:
                result = result + Poly.monomial(k - 1 - l, c * values[l])
    return result


def inverse_laplace(f: RatFn, pre_value: Scalar = Fraction(0)) -> RegSig:
    """
    Closed-form inverse of a strictly proper rational function.

    A term c/(s - p)^k becomes the atom c t^(k-1) e^(p t) / (k-1)!; conjugate
    pole pairs stay as conjugate atom pairs.

    Raises:
        ValueError: f is not strictly proper
        ConsistencyCheckError: the atoms do not transform back to f
    """
    if not f.is_strictly_proper():
        raise ValueError("Inverse transform needs a strictly proper rational function")
    if f.is_zero():
        return RegSig.zero(pre_value)
    expansion = partial_fractions(f)
    atoms = [Atom(term.residue / math.factorial(term.order - 1), term.order - 1, term.pole)
             for term in expansion.terms]
    result = RegSig(tuple(atoms), pre_value)
    _check_reconstruction(f, result)
    return result


def _check_reconstruction(f: RatFn, g: RegSig) -> None:
    """Residue balance: the inverted atoms must transform back to f."""
    back = reg_laplace(g)
    if f.is_exact() and back.is_exact():
        if back != f:
            raise ConsistencyCheckError(f"Inverse transform does not reproduce {f}")
        return
    radius = 2.0 * (1.0 + max(abs(complex(c)) for c in f.den.coeffs))
    tol = TOLERANCES["transform_match"]
    for angle in (0.3, 1.1, 2.0, 2.9, -1.7):
        s0 = radius * complex(math.cos(angle), math.sin(angle))
        expected = ratfn_eval(f, s0)
        value = ratfn_eval(back, s0)
        if abs(value - expected) > tol * max(abs(expected), 1e-3):
            raise ConsistencyCheckError(
                f"Inverse transform mismatch at s={format_number(s0)}: {abs(value - expected):.3e}")


def lplus_solve_regular(sys_spec: SysSpec, post: Sequence[Scalar]) -> Solution:
    """
    L+ solve of the regular subproblem from the given 0+ values.

    The input side uses the 0+ values of the known regular input, taken
    analytically from its atoms.

    Raises:
        ValueError: post does not hold n values
    """
    n, m = sys_spec.n, sys_spec.m
    if len(post) != n:
        raise ValueError(f"Expected {n} post-initial values, got {len(post)}")
    forcing = sys_spec.input.regular
    input_values = [reg_derivative_at_zero_plus(forcing, k) for k in range(m)]

    right = reg_laplace(forcing) * sys_spec.numerator() \
        - RatFn.from_poly(_initial_value_poly(sys_spec.b, m, input_values))
    transform = (right + RatFn.from_poly(_initial_value_poly(sys_spec.a, n, post))) / sys_spec.denominator()
    logger.debug(f"Y_r(s) = {transform}")

    regular = inverse_laplace(transform, _output_baseline(sys_spec))
    return Solution(regular, SingDist(), transform,
                    JumpReport.from_values(sys_spec.y_pre, list(post)), METHOD_MODIFIED_LPLUS)


def _output_baseline(sys_spec: SysSpec) -> Scalar:
    """y(0-): the first pre-initial value, or b0 * x(0-) for a pure gain."""
    if sys_spec.n > 0:
        return sys_spec.y_pre[0]
    return sys_spec.b[0] * sys_spec.input.regular.pre_value


def combine_solution(regular: RegSig, singular: SingDist, base: Optional[Solution] = None) -> Solution:
    """
    Pair a regular and a singular part into one Solution.

    Without a base solution the transform is recomputed and the jump report
    is left empty.
    """
    if base is None:
        return Solution(regular, singular, reg_laplace(regular), JumpReport(()), METHOD_MODIFIED_LPLUS)
    return replace(base, regular=regular, singular=singular)


def initial_values_from_transform(transform: RatFn, count: int) -> List[Scalar]:
    """
    y(0+), y'(0+), ... read off the expansion of Y(s) at infinity.

    For strictly proper Y, Y(s) = sum_k y^(k)(0+) / s^(k+1).
    """
    if not transform.is_strictly_proper():
        raise ConsistencyCheckError(
            f"Transform {transform} is not strictly proper: singular content leaked into the regular part")
    d = transform.den.degree
    numerator = Poly(tuple(transform.num.coeff(d - i) for i in range(d + 1)))
    denominator = Poly(tuple(transform.den.coeff(d - i) for i in range(d + 1)))
    return series_quotient(numerator, denominator, count + 1)[1:]


def ivt_check(transform: RatFn, expected_post: Scalar, tol: Optional[float] = None) -> Tuple[Scalar, bool]:
    """
    Initial value theorem: lim s Y(s) against the expected y(0+).

    Raises:
        ConsistencyCheckError: Y is improper
    """
    if transform.num.degree > transform.den.degree:
        raise ConsistencyCheckError(
            f"Transform {transform} is improper: singular content leaked into the regular part")
    tol = TOLERANCES["ivt"] if tol is None else tol
    d = transform.den.degree
    value = transform.num.coeff(d - 1) / transform.den.leading if d >= 1 else Fraction(0)
    return value, _close(value, expected_post, tol)


def regular_residual(sys_spec: SysSpec, regular: RegSig) -> RegSig:
    """sum a_i y_r^(n-i) - sum b_j x_r^(m-j) on t > 0, with near-equal rates merged."""
    n, m = sys_spec.n, sys_spec.m
    atoms = []
    for i, a in enumerate(sys_spec.a):
        atoms.extend(Atom(a * c, p, r) for c, p, r in reg_derivative(regular, n - i).atoms)
    for j, b in enumerate(sys_spec.b):
        atoms.extend(Atom(-b * c, p, r) for c, p, r in reg_derivative(sys_spec.input.regular, m - j).atoms)
    return merge_close_atoms(RegSig(tuple(atoms)))


def _residual_scale(sys_spec: SysSpec, regular: RegSig) -> float:
    coefficients = [abs(complex(a.coefficient)) for a in regular.atoms + sys_spec.input.regular.atoms]
    rates = [abs(complex(a.rate)) for a in regular.atoms + sys_spec.input.regular.atoms]
    weight = max([float(abs(c)) for c in sys_spec.a + sys_spec.b] + [1.0])
    growth = (1.0 + max(rates + [0.0])) ** sys_spec.n
    return max(coefficients + [1.0]) * weight * growth


def consistency_violations(solution: Solution, sys_spec: SysSpec, post: Sequence[Scalar]) -> List[str]:
    """
    Self-checks of a solution against the consistent post-initial values.

    Returns one message per failed check: 0+ values of the regular part,
    the initial value theorem (and its first-derivative form), and the ODE
    residual of the regular part.
    """
    problems = []
    tol = TOLERANCES["consistency"]
    for k in range(sys_spec.n):
        value = reg_derivative_at_zero_plus(solution.regular, k)
        scale = derivative_magnitude_at_zero(solution.regular, k)
        if not _close(value, post[k], tol, scale):
            problems.append(f"{derivative_label(k, '0+')} = {format_number(value)} "
                            f"but the post-initial value is {format_number(post[k])}")
    if sys_spec.n >= 1:
        value, passed = ivt_check(solution.transform, post[0])
        if not passed:
            problems.append(f"IVT gives {format_number(value)}, expected {format_number(post[0])}")
    if sys_spec.n >= 2:
        value = initial_values_from_transform(solution.transform, 2)[1]
        scale = derivative_magnitude_at_zero(solution.regular, 1)
        if not _close(value, post[1], tol, scale):
            problems.append(f"lim s(sY - y(0+)) = {format_number(value)}, expected {format_number(post[1])}")
    residual = regular_residual(sys_spec, solution.regular)
    if not is_zero_signal(residual, TOLERANCES["residual"], _residual_scale(sys_spec, solution.regular)):
        problems.append(f"regular part leaves the ODE residual {render_regular(residual)}")
    return problems


def solve_modified_lplus(sys_spec: SysSpec, check: bool = True) -> Solution:
    """
    Full pipeline: decompose, singular solve, jumps, L+ regular solve, combine.

    Raises:
        ConsistencyCheckError: with check=True, any self-check failure
    """
    singular_solution, report = analyze(sys_spec)
    if not verify_singular_solution(singular_solution, sys_spec):
        raise ConsistencyCheckError("Singular solution does not balance the singular equation")
    post = post_initial_conditions(report)
    partial = lplus_solve_regular(sys_spec, post)
    solution = combine_solution(partial.regular, singular_solution.output, replace(partial, report=report))
    if check:
        problems = consistency_violations(solution, sys_spec, post)
        if problems:
            for problem in problems:
                logger.error(problem)
            raise ConsistencyCheckError("; ".join(problems))
    logger.info(f"Modified L+ solve done: {solution.closed_form()}")
    return solution


def lminus_solve(sys_spec: SysSpec) -> Solution:
    """
    L- solve from 0- data, full input included.

    Deltas transform to powers of s. An improper Y(s) is split: its
    polynomial part is the delta content of y, the proper part inverts to
    the regular part.
    """
    n, m = sys_spec.n, sys_spec.m
    signal = sys_spec.input
    input_pre = ([signal.regular.pre_value] + [Fraction(0)] * m)[:m]
    full_input = reg_laplace(signal.regular) + RatFn.from_poly(signal.singular.to_poly())

    right = full_input * sys_spec.numerator() \
        - RatFn.from_poly(_initial_value_poly(sys_spec.b, m, input_pre))
    transform = (right + RatFn.from_poly(_initial_value_poly(sys_spec.a, n, sys_spec.y_pre))) \
        / sys_spec.denominator()
    polynomial_part, proper = transform.split_polynomial()
    logger.debug(f"L- transform {transform}, polynomial part {polynomial_part}")

    regular = inverse_laplace(proper, _output_baseline(sys_spec))
    post = [reg_derivative_at_zero_plus(regular, k) for k in range(n)]
    return Solution(regular, SingDist(polynomial_part.coeffs), proper,
                    JumpReport.from_values(sys_spec.y_pre, post), METHOD_LMINUS)


def naive_lplus_solve(sys_spec: SysSpec) -> Solution:
    """
    Conventional misuse of L+: 0- output values, delta transforms set to zero.

    The input side still uses the 0+ values of the regular input. The result
    demonstrates the discrepancy and must not be used as a solution.
    """
    logger.warning(NAIVE_WARNING)
    n, m = sys_spec.n, sys_spec.m
    forcing = sys_spec.input.regular
    input_values = [reg_derivative_at_zero_plus(forcing, k) for k in range(m)]

    right = reg_laplace(forcing) * sys_spec.numerator() \
        - RatFn.from_poly(_initial_value_poly(sys_spec.b, m, input_values))
    transform = (right + RatFn.from_poly(_initial_value_poly(sys_spec.a, n, sys_spec.y_pre))) \
        / sys_spec.denominator()

    regular = inverse_laplace(transform, _output_baseline(sys_spec))
    post = [reg_derivative_at_zero_plus(regular, k) for k in range(n)]
    return Solution(regular, SingDist(), transform, JumpReport.from_values(sys_spec.y_pre, post),
                    METHOD_NAIVE_LPLUS, (NAIVE_WARNING,))


class TransformMethod(ABC):
    """Common interface of the three transform solvers."""

    tag: str = ""
    description: str = ""

    @abstractmethod
    def solve(self, sys_spec: SysSpec) -> Solution:
        """Solve one problem"""
        pass

    def summary(self, sys_spec: SysSpec) -> Dict[str, Any]:
        """Solve and report the closed form together with its 0+ values"""
        solution = self.solve(sys_spec)
        result = solution.to_dict()
        result['zero_plus'] = [exact_to_json(v) for v in solution.zero_plus_values(sys_spec.n)]
        return result


class ModifiedLPlus(TransformMethod):
    tag = METHOD_MODIFIED_LPLUS
    description = "singular/regular decomposition, L+ with consistent 0+ values"

    def __init__(self, check: bool = True):
        self.check = check

    def solve(self, sys_spec: SysSpec) -> Solution:
        return solve_modified_lplus(sys_spec, check=self.check)


class LMinus(TransformMethod):
    tag = METHOD_LMINUS
    description = "L- transform from 0- values"

    def solve(self, sys_spec: SysSpec) -> Solution:
        return lminus_solve(sys_spec)


class NaiveLPlus(TransformMethod):
    tag = METHOD_NAIVE_LPLUS
    description = "L+ with 0- values and zeroed delta transforms (inconsistent)"

    def solve(self, sys_spec: SysSpec) -> Solution:
        return naive_lplus_solve(sys_spec)


METHODS: Dict[str, Type[TransformMethod]] = {
    cls.tag: cls for cls in (ModifiedLPlus, LMinus, NaiveLPlus)
}


def get_method(name: str, **kwargs) -> TransformMethod:
    """Method instance by tag; CLI spellings like 'modified-lplus' are accepted."""
    key = name.strip().lower().replace('-', '_')
    if key not in METHODS:
        raise ValueError(f"Unknown method '{name}'. Choose from {', '.join(METHODS)}")
    return METHODS[key](**kwargs)


def main():
    """Solve the manometer with all three methods"""
    sys_spec = manometer_system()
    for tag in METHODS:
        solution = get_method(tag).solve(sys_spec)
        print(f"[{tag}] Y_r(s) = {solution.transform}")
        print(f"[{tag}] {solution.closed_form()}")


if __name__ == "__main__":
    main()
