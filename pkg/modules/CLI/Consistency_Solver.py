#!/usr/bin/env python3
"""
Consistency Solver CLI
----------------------

Command-line front end for the toolkit.

Commands:
    solve    full pipeline: jumps, Y_r(s), closed form, IVT and 0+ checks
    jumps    singular solve and jump report only
    compare  all three transform methods side by side
    sample   CSV of t, y_regular(t) on a uniform grid
    verify   numerical oracle runs against the analytic solution

Exit codes: 0 success, 1 input error, 2 failed consistency check or verification.

Usage:
    python -m modules.CLI.Consistency_Solver solve problems/manometer.json
    python -m modules.CLI.Consistency_Solver sample problems/manometer.json --t-end 8 --dt 0.02
"""

import os
import sys
import json
import logging
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tabulate import tabulate

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.CLI.Problem_File import ProblemFile, parse_problem
from modules.Initialization.Jump_Analysis import analyze, derivative_label, post_initial_conditions
from modules.Laplace.Laplace_Solvers import (
    METHOD_MODIFIED_LPLUS, ModifiedLPlus, consistency_violations, get_method, ivt_check,
)
from modules.Laplace.Method_Comparison import compare_methods
from modules.Oracle.State_Space_Oracle import OracleError, verify_against_analytic
from modules.Signals.Generalized_Signals import reg_eval_grid, render_singular
from utils.common import (
    ConsistencyCheckError, ProblemInputError, exact_to_json, format_number, load_config,
    set_project_log_level, setup_logging,
)

logger = setup_logging("Consistency_Solver")

COMMANDS = ('solve', 'jumps', 'compare', 'sample', 'verify')
METHOD_CHOICES = ('modified-lplus', 'lminus', 'naive-lplus')

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CHECK_FAILED = 2


def default_settings() -> Dict[str, Any]:
    """Run settings from config/solver_config.json."""
    config = load_config("solver")
    return {
        'method': METHOD_MODIFIED_LPLUS,
        't_end': float(config['sample']['t_end']),
        'dt': float(config['sample']['dt']),
        'epsilons': [float(e) for e in config['oracle']['epsilons']],
        'oracle_dt': float(config['oracle']['dt']),
        'oracle_t_end': float(config['oracle']['t_end']),
        'points': int(config['grid']['points']),
        'out': None,
        'progress': True,
    }


def _settings(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """Configuration, then problem options, then command-line flags."""
    settings = default_settings()
    settings.update(problem.options)
    flags = {
        'method': args.method,
        't_end': args.t_end,
        'dt': args.dt,
        'epsilons': args.epsilon,
        'out': args.out,
    }
    settings.update({key: value for key, value in flags.items() if value is not None})
    settings['progress'] = not args.quiet
    return settings


def _header(problem: ProblemFile, method: str) -> str:
    sys_spec = problem.system
    name = problem.name or "problem"
    return f"Problem: {name} (n={sys_spec.n}, m={sys_spec.m}, method={method})"


def _solve(problem: ProblemFile, settings: Dict[str, Any], as_json: bool) -> Tuple[int, str]:
    sys_spec = problem.system
    method = get_method(settings['method'])
    if isinstance(method, ModifiedLPlus):
        method = ModifiedLPlus(check=False)
    _, report = analyze(sys_spec)
    post = post_initial_conditions(report)
    solution = method.solve(sys_spec)
    problems = consistency_violations(solution, sys_spec, post)
    ivt = ivt_check(solution.transform, post[0]) if sys_spec.n >= 1 else None
    for problem_text in problems:
        logger.error(problem_text)
    code = EXIT_CHECK_FAILED if problems else EXIT_OK

    if as_json:
        data = {
            'problem': problem.name,
            'method': solution.method,
            'jumps': report.to_dict(),
            'post_initial': [exact_to_json(v) for v in post],
            'transform': str(solution.transform),
            'closed_form': solution.closed_form(),
            'regular': solution.to_dict()['regular'],
            'singular': render_singular(solution.singular),
            'ivt': None if ivt is None else {
                'value': exact_to_json(ivt[0]), 'expected': exact_to_json(post[0]), 'pass': ivt[1]},
            'consistent': not problems,
            'problems': problems,
            'warnings': list(solution.warnings),
        }
        return code, json.dumps(data, indent=2)

    lines = [_header(problem, solution.method), ""]
    if report.rows:
        lines.append(tabulate(report.to_frame(), headers='keys', tablefmt='pretty', showindex=False))
        lines.append("")
    lines.extend(f"{derivative_label(k, '0+')} = {format_number(v)}" for k, v in enumerate(post))
    lines.append(f"Y_r(s) = {solution.transform}")
    lines.append(solution.closed_form())
    if ivt is not None:
        verdict = "pass" if ivt[1] else "FAIL"
        lines.append(f"IVT: lim s Y_r(s) = {format_number(ivt[0])} (expected {format_number(post[0])}) {verdict}")
    lines.extend(f"warning: {w}" for w in solution.warnings)
    lines.append("Consistency: ok" if not problems else "Consistency: FAILED")
    lines.extend(f"  {p}" for p in problems)
    return code, "\n".join(lines) + "\n"


def _jumps(problem: ProblemFile, settings: Dict[str, Any], as_json: bool) -> Tuple[int, str]:
    singular_solution, report = analyze(problem.system)
    post = post_initial_conditions(report)
    if as_json:
        data = {
            'problem': problem.name,
            'singular_parts': [render_singular(d) for d in singular_solution.derivative_parts],
            'jumps': report.to_dict(),
            'post_initial': [exact_to_json(v) for v in post],
        }
        return EXIT_OK, json.dumps(data, indent=2)

    lines = [_header(problem, "jumps"), ""]
    for k, part in enumerate(singular_solution.derivative_parts):
        lines.append(f"singular part of {derivative_label(k)}: {render_singular(part)}")
    if report.rows:
        lines.append("")
        lines.append(tabulate(report.to_frame(), headers='keys', tablefmt='pretty', showindex=False))
    lines.extend(f"{derivative_label(k, '0+')} = {format_number(v)}" for k, v in enumerate(post))
    return EXIT_OK, "\n".join(lines) + "\n"


def _compare(problem: ProblemFile, settings: Dict[str, Any], as_json: bool) -> Tuple[int, str]:
    report = compare_methods(problem.system, settings['points'])
    if as_json:
        return EXIT_OK, json.dumps(report.to_dict(), indent=2)
    expected = ", ".join(f"{derivative_label(k, '0+')} = {format_number(v)}" for k, v in enumerate(report.post))
    lines = [
        _header(problem, "compare"),
        f"Consistent post-initial values: {expected or '-'}",
        f"Deviation grid: {settings['points']} points on [0, {format_number(report.horizon, 6)}]",
        "",
        report.to_table(),
    ]
    for item in report.results:
        if item.identically_zero and not report.result(METHOD_MODIFIED_LPLUS).identically_zero:
            lines.append(f"{item.method}: identically zero solution")
    return EXIT_OK, "\n".join(lines) + "\n"


def sample_frame(problem: ProblemFile, settings: Dict[str, Any]) -> Tuple[pd.DataFrame, str]:
    """Uniform samples of the regular part and the rendered singular part."""
    t_end, dt = float(settings['t_end']), float(settings['dt'])
    if t_end <= 0 or dt <= 0:
        raise ProblemInputError("t_end and dt must be positive")
    solution = get_method(settings['method']).solve(problem.system)
    count = int(round(t_end / dt))
    times = np.linspace(0.0, t_end, count + 1)
    frame = pd.DataFrame({'t': times, 'y_regular': reg_eval_grid(solution.regular, times)})
    return frame, render_singular(solution.singular)


def _sample(problem: ProblemFile, settings: Dict[str, Any], as_json: bool) -> Tuple[int, str]:
    frame, singular = sample_frame(problem, settings)
    text = f"# singular: {singular}\n"
    text += frame.to_csv(index=False, float_format="%.12g", lineterminator="\n")
    return EXIT_OK, text


def _verify(problem: ProblemFile, settings: Dict[str, Any], as_json: bool) -> Tuple[int, str]:
    report = verify_against_analytic(problem.system, settings['epsilons'], settings['oracle_dt'],
                                     settings['oracle_t_end'], progress=settings.get('progress', True))
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    if as_json:
        return code, json.dumps(report.to_dict(), indent=2)
    slopes = ", ".join("inf" if np.isinf(s) else f"{s:.3f}" for s in report.slopes)
    lines = [
        _header(problem, "verify"),
        "",
        tabulate(report.to_frame(), headers='keys', tablefmt='pretty', showindex=False, floatfmt='.6g'),
        f"analytic jumps: {', '.join(format_number(j) for j in report.analytic_jumps)}",
        f"extrapolated jumps: {', '.join(format_number(j, 6) for j in report.estimate.extrapolated)}",
        f"log-log slopes: {slopes}",
        f"error constant C (max error <= C eps): {report.error_constant:.4g}",
        f"errors decreasing: {'yes' if report.errors_decreasing else 'NO'}",
        f"Verification: {'passed' if report.passed else 'FAILED'}",
    ]
    return code, "\n".join(lines) + "\n"


HANDLERS = {
    'solve': _solve,
    'jumps': _jumps,
    'compare': _compare,
    'sample': _sample,
    'verify': _verify,
}


def run(command: str, problem: ProblemFile, settings: Optional[Dict[str, Any]] = None,
        as_json: bool = False) -> Tuple[int, str]:
    """
    Run one command on a parsed problem.

    Returns:
        (exit code, report text); errors are logged and mapped to exit codes
    """
    if command not in HANDLERS:
        raise ValueError(f"Unknown command '{command}'")
    settings = {**default_settings(), **problem.options, **(settings or {})}
    try:
        return HANDLERS[command](problem, settings, as_json)
    except (ProblemInputError, OracleError) as error:
        logger.error(f"{command}: {error}")
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INPUT_ERROR, ""
    except ConsistencyCheckError as error:
        logger.error(f"{command}: consistency check failed: {error}")
        print(f"consistency check failed: {error}", file=sys.stderr)
        return EXIT_CHECK_FAILED, ""


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('problem', help='Problem file (JSON)')
    common.add_argument('--method', choices=METHOD_CHOICES, help='Transform method (default modified-lplus)')
    common.add_argument('--t-end', dest='t_end', type=float, help='Sample horizon')
    common.add_argument('--dt', type=float, help='Sample step')
    common.add_argument('--epsilon', action='append', type=float,
                        help='Mollifier width for verify (repeat for a ladder)')
    common.add_argument('--out', help='Write the output to this path instead of standard out')
    common.add_argument('--json', action='store_true', help='Machine-readable report')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Warnings and errors only')

    parser = argparse.ArgumentParser(
        description='Consistent 0+ initial conditions and closed-form solutions for LTI ODEs '
                    'with impulsive inputs')
    subparsers = parser.add_subparsers(dest='command', required=True)
    descriptions = {
        'solve': 'Full pipeline with self-checks',
        'jumps': 'Singular solve and jump report',
        'compare': 'Modified L+, L- and naive L+ side by side',
        'sample': 'CSV samples of the regular part',
        'verify': 'Numerical oracle against the analytic solution',
    }
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=descriptions[command])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        set_project_log_level(logging.DEBUG)
    elif args.quiet:
        set_project_log_level(logging.WARNING)

    try:
        problem = parse_problem(args.problem)
    except ProblemInputError as error:
        logger.error(str(error))
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    settings = _settings(problem, args)
    code, text = run(args.command, problem, settings, as_json=args.json)
    if text:
        if settings.get('out'):
            path = Path(settings['out'])
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text if text.endswith("\n") else text + "\n", encoding='utf-8')
            logger.info(f"Output written to {path}")
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
