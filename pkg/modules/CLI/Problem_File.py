#!/usr/bin/env python3
"""
Problem File Module
-------------------

Reads and writes problem files (UTF-8 JSON):

    {
      "system": {"a": [num, ...], "b": [num, ...]},
      "pre_initial": [num, ...],
      "input": {
        "singular": [{"order": int, "coeff": num}, ...],
        "regular": [{"coeff": num, "power": int, "rate_re": num, "rate_im": num}, ...],
        "pre_value": num
      },
      "options": {...}
    }

Numbers may be integers, decimals or "p/q" strings and are read as exact
rationals. A regular entry with rate_im > 0 stands for a conjugate pair: its
partner with the conjugate rate and coefficient is added automatically.
"""

import os
import sys
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Decomposition.Singular_Decomposition import SysSpec
from modules.Signals.Generalized_Signals import Atom, GenSignal, RegSig, SingDist
from utils.common import ProblemInputError, format_number, parse_exact_number, setup_logging

logger = setup_logging("Problem_File")

OPTION_KEYS = {
    'method': str,
    't_end': float,
    'dt': float,
    'epsilons': list,
    'oracle_dt': float,
    'oracle_t_end': float,
    'points': int,
    'out': str,
}


@dataclass(frozen=True)
class ProblemFile:
    """A validated problem plus its run options."""
    system: SysSpec
    options: Dict[str, Any] = field(default_factory=dict)
    name: str = ""
    source: Optional[Path] = None


def _require(data: Dict[str, Any], key: str, path: str):
    if not isinstance(data, dict):
        raise ProblemInputError(f"{path}: expected an object")
    if key not in data:
        raise ProblemInputError(f"{path}.{key}: missing" if path else f"{key}: missing")
    return data[key]


def _number_list(value, path: str) -> List[Fraction]:
    if not isinstance(value, list):
        raise ProblemInputError(f"{path}: expected a list of numbers")
    return [parse_exact_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _integer(value, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ProblemInputError(f"{path}: expected an integer >= {minimum}")
    return value


def _parse_singular(entries, path: str) -> SingDist:
    if not isinstance(entries, list):
        raise ProblemInputError(f"{path}: expected a list")
    total = SingDist()
    for i, entry in enumerate(entries):
        where = f"{path}[{i}]"
        order = _integer(_require(entry, 'order', where), f"{where}.order")
        coeff = parse_exact_number(_require(entry, 'coeff', where), f"{where}.coeff")
        if 'at' in entry and parse_exact_number(entry['at'], f"{where}.at") != 0:
            raise ProblemInputError(f"{where}.at: delayed singularities unsupported")
        total = total + SingDist.delta(order, coeff)
    return total


def _parse_regular(entries, path: str) -> List[Atom]:
    if not isinstance(entries, list):
        raise ProblemInputError(f"{path}: expected a list")
    atoms = []
    for i, entry in enumerate(entries):
        where = f"{path}[{i}]"
        coeff = parse_exact_number(_require(entry, 'coeff', where), f"{where}.coeff")
        power = _integer(entry.get('power', 0), f"{where}.power")
        rate_re = parse_exact_number(entry.get('rate_re', 0), f"{where}.rate_re")
        rate_im = parse_exact_number(entry.get('rate_im', 0), f"{where}.rate_im")
        coeff_im = parse_exact_number(entry.get('coeff_im', 0), f"{where}.coeff_im")
        if rate_im == 0:
            if coeff_im != 0:
                raise ProblemInputError(f"{where}.coeff_im: a real rate needs a real coefficient")
            atoms.append(Atom(coeff, power, rate_re))
            continue
        if rate_im < 0:
            raise ProblemInputError(f"{where}.rate_im: list each conjugate pair once, with rate_im > 0")
        c = complex(float(coeff), float(coeff_im))
        rate = complex(float(rate_re), float(rate_im))
        atoms.append(Atom(c, power, rate))
        atoms.append(Atom(c.conjugate(), power, rate.conjugate()))
    return atoms


def _parse_options(options, path: str) -> Dict[str, Any]:
    if not isinstance(options, dict):
        raise ProblemInputError(f"{path}: expected an object")
    parsed = {}
    for key, value in options.items():
        if key not in OPTION_KEYS:
            logger.warning(f"{path}.{key}: unknown option ignored")
            continue
        kind = OPTION_KEYS[key]
        if kind is float:
            parsed[key] = float(parse_exact_number(value, f"{path}.{key}"))
        elif kind is int:
            parsed[key] = _integer(value, f"{path}.{key}", minimum=2)
        elif kind is list:
            parsed[key] = [float(v) for v in _number_list(value, f"{path}.{key}")]
        elif not isinstance(value, str):
            raise ProblemInputError(f"{path}.{key}: expected a string")
        else:
            parsed[key] = value
    return parsed


def parse_problem_dict(data: Dict[str, Any], source: Optional[Path] = None) -> ProblemFile:
    """
    Validate a decoded problem document.

    Raises:
        ProblemInputError: schema or invariant violation, with the field path
    """
    if not isinstance(data, dict):
        raise ProblemInputError("problem: expected a JSON object")
    system = _require(data, 'system', '')
    a = _number_list(_require(system, 'a', 'system'), 'system.a')
    b = _number_list(_require(system, 'b', 'system'), 'system.b')
    pre = _number_list(data.get('pre_initial', []), 'pre_initial')

    raw_input = data.get('input', {})
    if not isinstance(raw_input, dict):
        raise ProblemInputError("input: expected an object")
    singular = _parse_singular(raw_input.get('singular', []), 'input.singular')
    atoms = _parse_regular(raw_input.get('regular', []), 'input.regular')
    pre_value = parse_exact_number(raw_input.get('pre_value', 0), 'input.pre_value')
    try:
        signal = GenSignal(RegSig(tuple(atoms), pre_value), singular)
    except ValueError as error:
        raise ProblemInputError(f"input.regular: {error}")

    sys_spec = SysSpec(tuple(a), tuple(b), tuple(pre), signal)
    options = _parse_options(data.get('options', {}), 'options')
    name = data.get('name', source.stem if source else "")
    logger.info(f"Loaded problem '{name}': n={sys_spec.n}, m={sys_spec.m}")
    return ProblemFile(sys_spec, options, str(name), source)


def _reject_constant(name: str):
    raise ProblemInputError(f"{name} is not a valid number in a problem file")


def parse_problem(path) -> ProblemFile:
    """
    Read and validate a problem file.

    Raises:
        ProblemInputError: unreadable file, malformed JSON, schema or invariant violation
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f, parse_float=Fraction, parse_constant=_reject_constant)
    except FileNotFoundError:
        raise ProblemInputError(f"{path}: file not found")
    except UnicodeDecodeError as error:
        raise ProblemInputError(f"{path}: not valid UTF-8 ({error.reason} at byte {error.start})")
    except json.JSONDecodeError as error:
        raise ProblemInputError(f"{path}: invalid JSON ({error})")
    return parse_problem_dict(data, path)


def _exact_json(value):
    """Integers stay integers, other rationals become "p/q", floats stay floats."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else format_number(value)
    return value


def problem_to_dict(problem: ProblemFile) -> Dict[str, Any]:
    """Serialize back to the problem-file schema."""
    sys_spec = problem.system
    signal = sys_spec.input
    regular = []
    for coefficient, power, rate in signal.regular.atoms:
        if isinstance(rate, complex):
            if rate.imag < 0:
                continue
            c = complex(coefficient)
            regular.append({'coeff': c.real, 'coeff_im': c.imag, 'power': power,
                            'rate_re': rate.real, 'rate_im': rate.imag})
        else:
            regular.append({'coeff': _exact_json(coefficient), 'power': power, 'rate_re': _exact_json(rate)})
    data = {
        'system': {
            'a': [_exact_json(c) for c in sys_spec.a_raw],
            'b': [_exact_json(c) for c in sys_spec.b_raw],
        },
        'pre_initial': [_exact_json(c) for c in sys_spec.y_pre],
        'input': {
            'singular': [{'order': k, 'coeff': _exact_json(c)}
                         for k, c in enumerate(signal.singular.delta_coeffs) if c != 0],
            'regular': regular,
            'pre_value': _exact_json(signal.regular.pre_value),
        },
        'options': dict(problem.options),
    }
    if problem.name:
        data['name'] = problem.name
    return data


def write_problem(problem: ProblemFile, path) -> Path:
    """Write a problem file that parse_problem reads back to the same system."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(problem_to_dict(problem), f, indent=2)
        f.write("\n")
    logger.info(f"Problem written to {path}")
    return path


def main():
    """Parse a problem file given on the command line and echo it"""
    if len(sys.argv) < 2:
        print("usage: Problem_File.py <problem.json>")
        return
    problem = parse_problem(sys.argv[1])
    print(json.dumps(problem_to_dict(problem), indent=2))


if __name__ == "__main__":
    main()
