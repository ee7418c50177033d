#!/usr/bin/env python3
"""
Method Comparison Module
------------------------

Runs the three transform methods on one problem and reports, per method, the
closed form, the 0+ values of the regular part, the initial value theorem
result and the largest pointwise deviation from the modified L+ solution on
a fixed sample grid.

Grid rule: 400 points on [0, T] with T = 10 / min |Re(root)| over the roots
of the characteristic polynomial, clamped to [1, 100].
"""

import os
import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tabulate import tabulate

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Algebra.Polynomial import poly_roots
from modules.Decomposition.Singular_Decomposition import SysSpec, manometer_system
from modules.Laplace.Laplace_Solvers import (
    METHOD_MODIFIED_LPLUS, METHODS, Solution, get_method, ivt_check,
)
from modules.Initialization.Jump_Analysis import post_initial_conditions
from modules.Signals.Generalized_Signals import (
    derivative_magnitude_at_zero, reg_derivative_at_zero_plus, reg_eval_grid, render_singular,
)
from utils.common import Scalar, exact_to_json, format_number, load_config, setup_logging

logger = setup_logging("Method_Comparison")

SETTINGS = load_config("solver")
GRID = SETTINGS["grid"]
TOLERANCES = SETTINGS["tolerances"]


def grid_horizon(sys_spec: SysSpec) -> float:
    """
    T = decay_multiple / min |Re(root)| clamped to [t_min, t_max].

    Growing modes additionally bound T by max_growth_exponent / max Re(root)
    so that sampled values stay finite.
    """
    t_min, t_max = float(GRID["t_min"]), float(GRID["t_max"])
    if sys_spec.n == 0:
        return t_min
    real_parts = [complex(root).real for root in poly_roots(sys_spec.denominator()).values()]
    decay = min(abs(re) for re in real_parts)
    horizon = t_max if decay == 0 else float(min(max(GRID["decay_multiple"] / decay, t_min), t_max))
    growth = max(real_parts)
    if growth > 0:
        horizon = min(horizon, float(GRID["max_growth_exponent"]) / growth)
    return horizon


def comparison_grid(sys_spec: SysSpec, points: Optional[int] = None) -> np.ndarray:
    points = GRID["points"] if points is None else points
    return np.linspace(0.0, grid_horizon(sys_spec), points)


@dataclass(frozen=True)
class MethodResult:
    """One method's row of the comparison."""
    method: str
    solution: Solution
    zero_plus: Tuple[Scalar, ...]
    ivt_value: Optional[Scalar]
    consistent: bool
    singular_matches: bool
    max_deviation: float

    @property
    def identically_zero(self) -> bool:
        return self.solution.is_identically_zero()


@dataclass(frozen=True)
class ComparisonReport:
    """All methods on one problem, with the modified L+ solution as reference."""
    post: Tuple[Scalar, ...]
    horizon: float
    results: Tuple[MethodResult, ...]

    def result(self, method: str) -> MethodResult:
        for item in self.results:
            if item.method == method:
                return item
        raise KeyError(method)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for item in self.results:
            rows.append({
                'method': item.method,
                'closed form': item.solution.closed_form(),
                '0+ values': ", ".join(format_number(v) for v in item.zero_plus),
                'IVT': "-" if item.ivt_value is None else format_number(item.ivt_value),
                'consistent': "yes" if item.consistent else "NO",
                'max deviation': format_number(item.max_deviation, 6),
            })
        return pd.DataFrame(rows)

    def to_table(self) -> str:
        return tabulate(self.to_frame(), headers='keys', tablefmt='pretty', showindex=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'post_initial': [exact_to_json(v) for v in self.post],
            'horizon': self.horizon,
            'methods': [{
                'method': item.method,
                'closed_form': item.solution.closed_form(),
                'transform': str(item.solution.transform),
                'singular': render_singular(item.solution.singular),
                'zero_plus': [exact_to_json(v) for v in item.zero_plus],
                'ivt_value': None if item.ivt_value is None else exact_to_json(item.ivt_value),
                'consistent': item.consistent,
                'singular_matches': item.singular_matches,
                'max_deviation': item.max_deviation if math.isfinite(item.max_deviation) else None,
                'identically_zero': item.identically_zero,
                'warnings': list(item.solution.warnings),
            } for item in self.results],
        }


def _is_consistent(solution: Solution, post: List[Scalar]) -> bool:
    tol = TOLERANCES["consistency"]
    for k, expected in enumerate(post):
        value = reg_derivative_at_zero_plus(solution.regular, k)
        scale = derivative_magnitude_at_zero(solution.regular, k)
        if abs(value - expected) > tol * (1 + abs(expected) + scale):
            return False
    return True


def compare_methods(sys_spec: SysSpec, points: Optional[int] = None) -> ComparisonReport:
    """
    Solve with every method and compare against modified L+.

    The reference keeps its self-checks on; the other methods are only
    measured, never rejected.
    """
    reference = get_method(METHOD_MODIFIED_LPLUS).solve(sys_spec)
    post = post_initial_conditions(reference.report)
    times = comparison_grid(sys_spec, points)
    reference_values = reg_eval_grid(reference.regular, times)

    results = []
    for tag in METHODS:
        solution = reference if tag == METHOD_MODIFIED_LPLUS else get_method(tag).solve(sys_spec)
        values = reg_eval_grid(solution.regular, times)
        deviation = float(np.max(np.abs(values - reference_values))) if len(times) else 0.0
        if not math.isfinite(deviation):
            logger.warning(f"{tag}: samples overflow on [0, {format_number(times[-1], 6)}]")
            deviation = math.inf
        ivt_value = ivt_check(solution.transform, post[0])[0] if sys_spec.n >= 1 else None
        zero_plus = tuple(solution.zero_plus_values(sys_spec.n))
        consistent = _is_consistent(solution, post)
        results.append(MethodResult(tag, solution, zero_plus, ivt_value, consistent,
                                    solution.singular == reference.singular, deviation))
        if not consistent:
            logger.warning(f"{tag}: 0+ values {[format_number(v) for v in zero_plus]} "
                           f"differ from post-initial {[format_number(v) for v in post]}")
        if solution.is_identically_zero() and not reference.is_identically_zero():
            logger.warning(f"{tag}: identically zero solution")

    return ComparisonReport(tuple(post), float(times[-1]) if len(times) else 0.0, tuple(results))


def main():
    """Comparison table for the manometer"""
    print(compare_methods(manometer_system()).to_table())


if __name__ == "__main__":
    main()
