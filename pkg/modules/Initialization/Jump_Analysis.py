#!/usr/bin/env python3
"""
Jump Analysis Module
--------------------

Stage two: turns the singular solution into jump discontinuities of the
output derivatives and the consistent post-initial (0+) conditions.

The jump of y^(k) at the origin is the delta coefficient of y_s^(k+1); higher
delta derivatives in y_s^(k+1) come from differentiating y's own singular
content and integrate to zero.
"""

import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Sequence, Tuple

import pandas as pd
from tabulate import tabulate

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Decomposition.Singular_Decomposition import (
    SingularSolution, SysSpec, build_singular_system, manometer_system, solve_singular_backward,
)
from modules.Signals.Generalized_Signals import sing_integral_total
from utils.common import Scalar, exact_to_json, format_number, setup_logging

logger = setup_logging("Jump_Analysis")


class JumpRow(NamedTuple):
    order: int
    pre: Scalar
    jump: Scalar
    post: Scalar


def derivative_label(k: int, at: str = "") -> str:
    """y, y', y'', y^(3), ... optionally evaluated at a point."""
    name = "y" + ("'" * k if k <= 2 else f"^({k})")
    return f"{name}({at})" if at else name


@dataclass(frozen=True)
class JumpReport:
    """Per-order pre-initial values, jumps and post-initial values."""
    rows: Tuple[JumpRow, ...]

    @classmethod
    def from_values(cls, pre: Sequence[Scalar], post: Sequence[Scalar]) -> "JumpReport":
        """Report whose jumps are implied by given 0- and 0+ values."""
        if len(pre) != len(post):
            raise ValueError(f"{len(pre)} pre-initial values but {len(post)} post-initial values")
        return cls(tuple(JumpRow(k, p, q - p, q) for k, (p, q) in enumerate(zip(pre, post))))

    @property
    def jumps(self) -> List[Scalar]:
        return [row.jump for row in self.rows]

    def has_discontinuity(self) -> bool:
        return any(row.jump != 0 for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{
                'derivative': derivative_label(row.order),
                'pre (0-)': format_number(row.pre),
                'jump': format_number(row.jump),
                'post (0+)': format_number(row.post),
            } for row in self.rows],
            columns=['derivative', 'pre (0-)', 'jump', 'post (0+)'],
        )

    def to_dict(self) -> List[Dict[str, Any]]:
        return [{
            'order': row.order,
            'pre': exact_to_json(row.pre),
            'jump': exact_to_json(row.jump),
            'post': exact_to_json(row.post),
        } for row in self.rows]


def compute_jumps(ss: SingularSolution, sys_spec: SysSpec) -> JumpReport:
    """
    Jumps and post-initial values from a singular solution.

    Raises:
        ValueError: the solution does not have n+1 parts
    """
    n = sys_spec.n
    if len(ss.derivative_parts) != n + 1:
        raise ValueError(f"Singular solution has {len(ss.derivative_parts)} parts, expected {n + 1}")
    rows = []
    for k in range(n):
        jump = sing_integral_total(ss.derivative_parts[k + 1])
        pre = sys_spec.y_pre[k]
        rows.append(JumpRow(k, pre, jump, pre + jump))
    report = JumpReport(tuple(rows))
    logger.debug(f"Jumps: {[format_number(j) for j in report.jumps]}")
    return report


def post_initial_conditions(report: JumpReport) -> List[Scalar]:
    """[y(0+), y'(0+), ..., y^(n-1)(0+)]."""
    return [row.post for row in report.rows]


def analyze(sys_spec: SysSpec) -> Tuple[SingularSolution, JumpReport]:
    """Stages one and two in one call."""
    solution = solve_singular_backward(build_singular_system(sys_spec), sys_spec)
    return solution, compute_jumps(solution, sys_spec)


def main():
    """Jump report of the manometer example"""
    _, report = analyze(manometer_system())
    print(tabulate(report.to_frame(), headers='keys', tablefmt='pretty', showindex=False))


if __name__ == "__main__":
    main()
