#!/usr/bin/env python3
"""
Tests for modules/CLI/Consistency_Solver.py
"""

import io
import json
import sys
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pandas as pd
import pytest

# Add the project root to the path so the modules import without installation
root_dir = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(root_dir))

from modules.CLI.Consistency_Solver import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK, build_parser, main, run
from modules.CLI.Problem_File import parse_problem, parse_problem_dict
from tests.support import run_suite

MANOMETER_FILE = root_dir / "problems" / "manometer.json"


def test_solve_manometer():
    """The report shows the jump, the transform, the closed form and the IVT"""
    code, text = run('solve', parse_problem(MANOMETER_FILE))
    assert code == EXIT_OK
    assert "y(0+) = 2" in text
    assert "y'(0+) = -4" in text
    assert "Y_r(s) = 2s/(s+1)^2" in text
    assert "y(t) = 2 e^{-1 t} - 2 t e^{-1 t}" in text
    assert "IVT: lim s Y_r(s) = 2 (expected 2) pass" in text
    assert "Consistency: ok" in text


def test_solve_naive_fails_check():
    """The naive method is reported and exits with code 2"""
    code, text = run('solve', parse_problem(MANOMETER_FILE), {'method': 'naive-lplus'})
    assert code == EXIT_CHECK_FAILED
    assert "Consistency: FAILED" in text
    assert "(expected 2) FAIL" in text


def test_jumps_command():
    """Stages one and two only"""
    code, text = run('jumps', parse_problem(MANOMETER_FILE))
    assert code == EXIT_OK
    assert "singular part of y'': -2 delta + delta'" in text
    assert "y'(0+) = -4" in text


def test_compare_command():
    """L- deviates by zero, naive L+ starts at 1"""
    code, text = run('compare', parse_problem(MANOMETER_FILE), as_json=True)
    assert code == EXIT_OK
    methods = {m['method']: m for m in json.loads(text)['methods']}
    assert methods['lminus']['max_deviation'] == 0.0
    assert methods['naive_lplus']['ivt_value'] == "1"
    assert not methods['naive_lplus']['consistent']


def test_sample_command():
    """CSV with a singular header; y(1) = 0 for the manometer"""
    code, text = run('sample', parse_problem(MANOMETER_FILE))
    assert code == EXIT_OK
    header, body = text.split("\n", 1)
    assert header == "# singular: 0"
    frame = pd.read_csv(io.StringIO(body))
    assert list(frame.columns) == ['t', 'y_regular']
    assert len(frame) == 401
    row = frame.iloc[(frame['t'] - 1.0).abs().idxmin()]
    assert abs(row['y_regular']) <= 1e-9
    assert frame['y_regular'].iloc[0] == pytest.approx(2.0)


def test_sample_rejects_bad_grid():
    """Non-positive steps are input errors"""
    code, text = run('sample', parse_problem(MANOMETER_FILE), {'dt': 0.0})
    assert code == EXIT_INPUT_ERROR and text == ""


def test_verify_pure_gain_is_input_error():
    """The oracle has no state for n = 0"""
    problem = parse_problem_dict({"system": {"a": [1], "b": [2]}, "input": {"singular": [{"order": 0, "coeff": 1}]}})
    code, _ = run('verify', problem, {'progress': False})
    assert code == EXIT_INPUT_ERROR


def test_main_writes_json_file():
    """--json --out writes a machine-readable report"""
    with tempfile.TemporaryDirectory() as folder:
        out = Path(folder) / "report.json"
        code = main(['solve', str(MANOMETER_FILE), '--json', '--out', str(out), '-q'])
        data = json.loads(out.read_text(encoding='utf-8'))
    assert code == EXIT_OK
    assert data['post_initial'] == ["2", "-4"]
    assert data['ivt']['pass'] is True
    assert data['consistent'] is True


def test_main_stdout_and_flags():
    """Flags override the problem options"""
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(['sample', str(MANOMETER_FILE), '--t-end', '2', '--dt', '0.5', '-q'])
    assert code == EXIT_OK
    lines = buffer.getvalue().strip().splitlines()
    assert lines[1] == "t,y_regular"
    assert len(lines) == 2 + 5


def test_main_bad_file():
    """A missing problem file exits with code 1"""
    assert main(['solve', str(root_dir / "problems" / "does_not_exist.json")]) == EXIT_INPUT_ERROR


def test_main_rejects_non_finite_numbers():
    """NaN in a problem file is an input error with a message, not a traceback"""
    with tempfile.TemporaryDirectory() as folder:
        path = Path(folder) / "nan.json"
        text = MANOMETER_FILE.read_text(encoding='utf-8').replace('"pre_initial": [1, -2]', '"pre_initial": [NaN, -2]')
        assert "NaN" in text
        path.write_text(text, encoding='utf-8')
        errors = io.StringIO()
        with redirect_stderr(errors):
            code = main(['solve', str(path), '-q'])
    assert code == EXIT_INPUT_ERROR
    assert "NaN is not a valid number" in errors.getvalue()


def test_main_rejects_invalid_utf8():
    """Undecodable bytes are an input error with a message"""
    with tempfile.TemporaryDirectory() as folder:
        path = Path(folder) / "latin1.json"
        path.write_bytes(b'{"name": "Man\xf6meter"}')
        errors = io.StringIO()
        with redirect_stderr(errors):
            code = main(['jumps', str(path), '-q'])
    assert code == EXIT_INPUT_ERROR
    assert "not valid UTF-8" in errors.getvalue()


def test_parser_rejects_unknown_method():
    """Only the three method spellings are accepted"""
    with pytest.raises(SystemExit):
        build_parser().parse_args(['solve', 'p.json', '--method', 'laplace'])
    args = build_parser().parse_args(['verify', 'p.json', '--epsilon', '0.01', '--epsilon', '0.005'])
    assert args.epsilon == [0.01, 0.005]


def test_unknown_command():
    """run() refuses commands it does not know"""
    with pytest.raises(ValueError):
        run('plot', parse_problem(MANOMETER_FILE))


def run_tests():
    """Run all tests"""
    return run_suite([
        test_solve_manometer,
        test_solve_naive_fails_check,
        test_jumps_command,
        test_compare_command,
        test_sample_command,
        test_sample_rejects_bad_grid,
        test_verify_pure_gain_is_input_error,
        test_main_writes_json_file,
        test_main_stdout_and_flags,
        test_main_bad_file,
        test_main_rejects_non_finite_numbers,
        test_main_rejects_invalid_utf8,
        test_parser_rejects_unknown_method,
        test_unknown_command,
    ])


if __name__ == "__main__":
    run_tests()
