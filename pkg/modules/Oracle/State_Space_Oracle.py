#!/usr/bin/env python3
"""
State Space Oracle Module
-------------------------

Independent numerical check of the analytic pipeline. The ODE is realized in
observer canonical form, every delta^(k) in the input is replaced by the k-th
derivative of a unit-area polynomial bump of width epsilon, and the system is
integrated with fixed-step RK4 from the 0- state.

Jump estimates are output-derivative values at t = 5 epsilon minus their 0-
values, extrapolated to epsilon -> 0 across a ladder of widths.
"""

import os
import sys
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Decomposition.Singular_Decomposition import SysSpec, manometer_system
from modules.Initialization.Jump_Analysis import derivative_label
from modules.Laplace.Laplace_Solvers import Solution, solve_modified_lplus
from modules.Signals.Generalized_Signals import GenSignal, reg_derivative, reg_eval, reg_eval_grid
from utils.common import Scalar, exact_to_json, format_number, load_config, setup_logging

logger = setup_logging("State_Space_Oracle")

ORACLE = load_config("solver")["oracle"]

CHAR_POLY_TOL = 1e-9


class OracleError(RuntimeError):
    """Invalid oracle run: step-size violation, unsupported input or divergence."""

    def __init__(self, message: str, time: Optional[float] = None):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class StateSpace:
    """
    Observer canonical realization x' = A x + B u, y = C x + D u.

    beta holds the coefficients b_0 ... b_n of the realization recurrence and
    x0 the 0- state recovered from the pre-initial data.
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float
    beta: Tuple[float, ...]
    x0: np.ndarray
    input_pre: float = 0.0

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """Sampled output of one oracle run."""
    times: np.ndarray
    values: np.ndarray
    epsilon: float

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.times, 'y': self.values})


def observer_betas(sys_spec: SysSpec) -> List[Scalar]:
    """beta_0 = b'_0, beta_k = b'_k - sum_{i=1..k} a_i beta_(k-i), b' padded to length n+1."""
    n = sys_spec.n
    padded = [Fraction(0)] * (n - sys_spec.m) + list(sys_spec.b)
    betas: List[Scalar] = []
    for k in range(n + 1):
        value = padded[k]
        for i in range(1, k + 1):
            value = value - sys_spec.a[i] * betas[k - i]
        betas.append(value)
    return betas


def realize_state_space(sys_spec: SysSpec) -> StateSpace:
    """
    Observer canonical form of the ODE with its 0- state.

    Raises:
        OracleError: n == 0 (pure gain), or a realization whose characteristic
            polynomial does not match the denominator
    """
    n = sys_spec.n
    if n == 0:
        raise OracleError("State-space realization needs n >= 1; pure gains are solved algebraically")
    betas = observer_betas(sys_spec)

    A = np.zeros((n, n))
    A[np.arange(n - 1), np.arange(1, n)] = 1.0
    A[-1, :] = [-float(sys_spec.a[n - j]) for j in range(n)]
    B = np.array([float(beta) for beta in betas[1:]])
    C = np.zeros(n)
    C[0] = 1.0

    expected = np.array([float(c) for c in sys_spec.a])
    actual = np.poly(A)
    if not np.allclose(actual, expected, rtol=0.0, atol=CHAR_POLY_TOL * (1 + np.max(np.abs(expected)))):
        raise OracleError(f"Characteristic polynomial {actual} does not match {expected}")

    # Triangular solve of y^(k)(0-) = x_(k+1) + sum_i beta_i u^(k-i)(0-); only u(0-) is nonzero
    input_pre = float(sys_spec.input.regular.pre_value)
    x0 = np.array([float(sys_spec.y_pre[k]) - float(betas[k]) * input_pre for k in range(n)])
    logger.debug(f"beta = {[format_number(b) for b in betas]}, x(0-) = {x0}")
    return StateSpace(A, B, C, float(betas[0]), tuple(float(b) for b in betas), x0, input_pre)


def transfer_function(ss: StateSpace, s0: complex) -> complex:
    """C (s I - A)^-1 B + D."""
    resolvent = np.linalg.solve(s0 * np.eye(ss.n) - ss.A, ss.B.astype(complex))
    return complex(ss.C @ resolvent + ss.D)


@dataclass(frozen=True)
class Mollifier:
    """
    phi(t) = K (1 - tau^2)^3 on [0, epsilon], tau = (2t - epsilon)/epsilon.

    K = 35 / (16 epsilon) gives unit area; phi is twice continuously
    differentiable and its first two derivatives are analytic.
    """
    epsilon: float

    def derivative(self, times, k: int = 0) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        eps = self.epsilon
        tau = (2.0 * times - eps) / eps
        inside = (times >= 0.0) & (times <= eps)
        scale = 35.0 / (16.0 * eps)
        base = 1.0 - tau ** 2
        if k == 0:
            shape = base ** 3
        elif k == 1:
            shape = -6.0 * tau * base ** 2 * (2.0 / eps)
        elif k == 2:
            shape = base * (30.0 * tau ** 2 - 6.0) * (2.0 / eps) ** 2
        else:
            raise OracleError(f"Mollified delta derivatives above order 2 are not supported (got {k})")
        return np.where(inside, scale * shape, 0.0)


def _input_function(signal: GenSignal, mollifier: Mollifier) -> Callable[[np.ndarray], np.ndarray]:
    regular = signal.regular
    singular = signal.singular

    def evaluate(times: np.ndarray) -> np.ndarray:
        values = reg_eval_grid(regular, times)
        for k, coefficient in enumerate(singular.delta_coeffs):
            if coefficient != 0:
                values = values + float(coefficient) * mollifier.derivative(times, k)
        return values

    return evaluate


def _check_delta_order(signal: GenSignal, max_delta_order: Optional[int]) -> None:
    limit = ORACLE["max_delta_order"] if max_delta_order is None else max_delta_order
    if signal.singular.order > limit:
        raise OracleError(f"Input delta order {signal.singular.order} exceeds the oracle limit {limit}")


def _integrate(ss: StateSpace, u: Callable, epsilon: float, t_end: float, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """RK4 with substeps of at most epsilon/fine_steps inside [0, 2 epsilon]; states sampled every dt."""
    count = int(round(t_end / dt))
    fine_h = epsilon / ORACLE["fine_steps_per_epsilon"]
    starts, sizes, sampled = [], [], []
    for i in range(count):
        t0 = i * dt
        substeps = max(1, math.ceil(dt / fine_h - 1e-9)) if t0 < 2 * epsilon else 1
        h = dt / substeps
        for j in range(substeps):
            starts.append(t0 + j * h)
            sizes.append(h)
            sampled.append(j == substeps - 1)
    starts = np.array(starts)
    sizes = np.array(sizes)
    u_start, u_mid, u_end = u(starts), u(starts + sizes / 2), u(starts + sizes)

    A, B = ss.A, ss.B
    x = ss.x0.astype(float).copy()
    states = np.empty((count + 1, ss.n))
    states[0] = x
    row = 1
    for index in range(len(starts)):
        h = sizes[index]
        k1 = A @ x + B * u_start[index]
        k2 = A @ (x + 0.5 * h * k1) + B * u_mid[index]
        k3 = A @ (x + 0.5 * h * k2) + B * u_mid[index]
        k4 = A @ (x + h * k3) + B * u_end[index]
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            blow_up = starts[index] + h
            raise OracleError(f"State diverged at t={blow_up:.6g}", blow_up)
        if sampled[index]:
            states[row] = x
            row += 1
    return dt * np.arange(count + 1), states


def integrate_mollified(ss: StateSpace, signal: GenSignal, epsilon: float, t_end: float, dt: float,
                        max_delta_order: Optional[int] = None) -> Trajectory:
    """
    Output trajectory with each delta^(k) replaced by the bump derivative.

    Raises:
        OracleError: dt > epsilon/20, t_end <= 10 epsilon, unsupported delta
            order or divergence
    """
    if epsilon <= 0:
        raise OracleError("epsilon must be positive")
    if dt > epsilon / 20 * (1 + 1e-12):
        raise OracleError(f"Step-size violation: dt={dt:g} exceeds epsilon/20={epsilon / 20:g}")
    if t_end <= 10 * epsilon:
        raise OracleError(f"t_end={t_end:g} must exceed 10 epsilon={10 * epsilon:g}")
    _check_delta_order(signal, max_delta_order)

    u = _input_function(signal, Mollifier(epsilon))
    times, states = _integrate(ss, u, epsilon, t_end, dt)
    values = states @ ss.C + ss.D * u(times)
    return Trajectory(times, values, epsilon)


def _output_derivatives(ss: StateSpace, signal: GenSignal, state: np.ndarray, t: float) -> List[float]:
    """y^(k)(t) = x_(k+1) + sum_i beta_i u^(k-i)(t) for t past the bump."""
    regular = signal.regular
    input_derivatives = [reg_eval(reg_derivative(regular, j), t) for j in range(ss.n)]
    outputs = []
    for k in range(ss.n):
        value = state[k] + sum(ss.beta[i] * input_derivatives[k - i] for i in range(k + 1))
        outputs.append(float(value))
    return outputs


def _pre_outputs(ss: StateSpace) -> List[float]:
    return [float(ss.x0[k] + ss.beta[k] * ss.input_pre) for k in range(ss.n)]


def extrapolate_to_zero(widths: Sequence[float], values: Sequence[float]) -> float:
    """Neville evaluation at width 0 of the interpolating polynomial through (width, value)."""
    xs = list(widths)
    p = list(values)
    for level in range(1, len(xs)):
        for i in range(len(xs) - level):
            p[i] = (xs[i] * p[i + 1] - xs[i + level] * p[i]) / (xs[i] - xs[i + level])
    return p[0]


def _check_widths(epsilons: Sequence[float]) -> List[float]:
    widths = sorted((float(e) for e in epsilons), reverse=True)
    if len(widths) < 2:
        raise OracleError("At least two mollifier widths are required")
    for wide, narrow in zip(widths, widths[1:]):
        if narrow <= 0 or wide / narrow < 2 - 1e-12:
            raise OracleError(f"Consecutive widths need a ratio >= 2, got {wide:g}/{narrow:g}")
    return widths


@dataclass(frozen=True)
class JumpEstimate:
    """Raw per-width jump estimates and their extrapolation to zero width."""
    epsilons: Tuple[float, ...]
    raw: Tuple[Tuple[float, ...], ...]
    extrapolated: Tuple[float, ...]
    converged: Tuple[bool, ...]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for eps, values in zip(self.epsilons, self.raw):
            row = {'epsilon': eps}
            row.update({f"jump {derivative_label(k)}": v for k, v in enumerate(values)})
            rows.append(row)
        row = {'epsilon': 0.0}
        row.update({f"jump {derivative_label(k)}": v for k, v in enumerate(self.extrapolated)})
        rows.append(row)
        return pd.DataFrame(rows)


def estimate_jumps(ss: StateSpace, signal: GenSignal, epsilons: Sequence[float],
                   max_delta_order: Optional[int] = None, progress: bool = False) -> JumpEstimate:
    """
    Jump estimates y^(k)(settle * eps) - y^(k)(0-) for each width, extrapolated to eps -> 0.

    A sequence counts as converged when the extrapolation through all widths
    and the one through the two narrowest agree within the convergence
    tolerance; non-convergence is logged, not raised.
    """
    widths = _check_widths(epsilons)
    _check_delta_order(signal, max_delta_order)
    settle = ORACLE["settle_multiple"]
    fine_steps = ORACLE["fine_steps_per_epsilon"]
    pre = _pre_outputs(ss)

    raw = []
    for eps in tqdm(widths, desc="jump estimates", disable=not progress):
        u = _input_function(signal, Mollifier(eps))
        step = eps / fine_steps
        times, states = _integrate(ss, u, eps, settle * eps, step)
        derivatives = _output_derivatives(ss, signal, states[-1], times[-1])
        raw.append(tuple(value - before for value, before in zip(derivatives, pre)))

    tol = ORACLE["convergence_tolerance"]
    extrapolated, converged = [], []
    for k in range(ss.n):
        column = [values[k] for values in raw]
        full = extrapolate_to_zero(widths, column)
        narrow = extrapolate_to_zero(widths[-2:], column[-2:])
        ok = abs(full - narrow) <= tol * (1 + abs(full))
        if not ok:
            logger.warning(f"Jump estimates of {derivative_label(k)} are not converging: {column}")
        extrapolated.append(full)
        converged.append(ok)
    return JumpEstimate(tuple(widths), tuple(raw), tuple(extrapolated), tuple(converged))


def convergence_slope(epsilons: Sequence[float], errors: Sequence[float]) -> float:
    """Slope of log(error) against log(epsilon); inf when the errors are already negligible."""
    pairs = [(e, err) for e, err in zip(epsilons, errors) if err > 1e-13]
    if len(pairs) < 2:
        return math.inf
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class VerificationReport:
    """Oracle runs against the analytic solution over a width ladder."""
    epsilons: Tuple[float, ...]
    analytic_jumps: Tuple[Scalar, ...]
    estimate: JumpEstimate
    slopes: Tuple[float, ...]
    max_errors: Tuple[float, ...]
    error_constant: float
    errors_decreasing: bool
    jumps_match: bool

    @property
    def passed(self) -> bool:
        slopes_ok = all(slope >= 0.9 for slope in self.slopes)
        return self.jumps_match and slopes_ok and self.errors_decreasing

    def to_frame(self) -> pd.DataFrame:
        frame = self.estimate.to_frame()
        frame['max error (t >= 10 eps)'] = list(self.max_errors) + [float('nan')]
        return frame

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epsilons': list(self.epsilons),
            'analytic_jumps': [exact_to_json(j) for j in self.analytic_jumps],
            'raw_jumps': [list(values) for values in self.estimate.raw],
            'extrapolated_jumps': list(self.estimate.extrapolated),
            'converged': list(self.estimate.converged),
            'slopes': [None if math.isinf(s) else s for s in self.slopes],
            'max_errors': list(self.max_errors),
            'error_constant': self.error_constant,
            'errors_decreasing': self.errors_decreasing,
            'jumps_match': self.jumps_match,
            'passed': self.passed,
        }


def verify_against_analytic(sys_spec: SysSpec, epsilons: Optional[Sequence[float]] = None,
                            dt: Optional[float] = None, t_end: Optional[float] = None,
                            solution: Optional[Solution] = None, max_delta_order: Optional[int] = None,
                            progress: bool = True) -> VerificationReport:
    """
    Compare oracle runs with the modified L+ solution.

    Checks: extrapolated jumps against the analytic jumps, first-order (or
    better) convergence of the raw estimates, and a post-transient trajectory
    error that strictly decreases down the ladder.
    """
    epsilons = _check_widths(ORACLE["epsilons"] if epsilons is None else epsilons)
    dt = ORACLE["dt"] if dt is None else dt
    t_end = ORACLE["t_end"] if t_end is None else t_end
    solution = solve_modified_lplus(sys_spec) if solution is None else solution
    ss = realize_state_space(sys_spec)
    analytic = solution.report.jumps

    estimate = estimate_jumps(ss, sys_spec.input, epsilons, max_delta_order)
    slopes = []
    for k, jump in enumerate(analytic):
        errors = [abs(values[k] - float(jump)) for values in estimate.raw]
        slopes.append(convergence_slope(epsilons, errors))
    jump_tol = ORACLE["jump_tolerance"]
    jumps_match = all(abs(value - float(jump)) <= jump_tol * (1 + abs(float(jump)))
                      for value, jump in zip(estimate.extrapolated, analytic))

    max_errors = []
    for eps in tqdm(epsilons, desc="oracle widths", disable=not progress):
        trajectory = integrate_mollified(ss, sys_spec.input, eps, t_end, min(dt, eps / 20), max_delta_order)
        mask = trajectory.times >= ORACLE["transient_multiple"] * eps
        reference = reg_eval_grid(solution.regular, trajectory.times[mask])
        max_errors.append(float(np.max(np.abs(trajectory.values[mask] - reference))))
        logger.info(f"epsilon={eps:g}: max post-transient error {max_errors[-1]:.3e}")

    decreasing = all(later < earlier for earlier, later in zip(max_errors, max_errors[1:]))
    constant = max(err / eps for err, eps in zip(max_errors, epsilons))
    return VerificationReport(tuple(epsilons), tuple(analytic), estimate, tuple(slopes),
                              tuple(max_errors), constant, decreasing, jumps_match)


def main():
    """Oracle verification of the manometer"""
    report = verify_against_analytic(manometer_system())
    print(report.to_frame().to_string(index=False))
    print(f"passed: {report.passed}")


if __name__ == "__main__":
    main()
