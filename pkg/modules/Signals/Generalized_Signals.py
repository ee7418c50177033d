#!/usr/bin/env python3
"""
Generalized Signals Module
--------------------------

Generalized functions on [0, inf) as used by the solver:

- SingDist: a finite delta train sum c_k * delta^(k)(t) supported at t = 0
- RegSig:   the regular part, a finite sum of atoms c * t^p * e^(rate*t) on
            t >= 0 plus the constant pre-initial (0-) baseline
- GenSignal: regular + singular parts of one signal

Trigonometric signals are stored as conjugate complex-rate atom pairs. All
transforms follow the 0+ convention: the regular part is integrated from 0+,
the singular part never enters a regular transform.
"""

import os
import sys
import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Algebra.Polynomial import Poly, is_exact, snap_rational
from modules.Algebra.Rational_Function import RatFn
from utils.common import ProblemInputError, Scalar, format_number, setup_logging

logger = setup_logging("Generalized_Signals")

IMAG_DISCARD_TOL = 1e-9
CONJUGATE_TOL = 1e-9
PAIR_SNAP_DENOMINATOR = 10**6


def _scalar(value) -> Scalar:
    if isinstance(value, bool):
        raise TypeError("Boolean is not a signal value")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, complex) and value.imag == 0:
        return value.real
    return value


# ---------------------------------------------------------------------------
# Singular part
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingDist:
    """Delta train sum_k delta_coeffs[k] * delta^(k)(t) at the origin."""
    delta_coeffs: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        values = [_scalar(c) for c in self.delta_coeffs]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, 'delta_coeffs', tuple(values))

    @classmethod
    def delta(cls, order: int = 0, coeff=1) -> "SingDist":
        return cls((0,) * order + (coeff,))

    @property
    def order(self) -> int:
        """Highest delta-derivative order, -1 for the zero distribution."""
        return len(self.delta_coeffs) - 1

    def is_zero(self) -> bool:
        return not self.delta_coeffs

    def coeff(self, k: int) -> Scalar:
        if 0 <= k < len(self.delta_coeffs):
            return self.delta_coeffs[k]
        return Fraction(0)

    def __add__(self, other: "SingDist") -> "SingDist":
        size = max(len(self.delta_coeffs), len(other.delta_coeffs))
        return SingDist(tuple(self.coeff(k) + other.coeff(k) for k in range(size)))

    def __neg__(self) -> "SingDist":
        return SingDist(tuple(-c for c in self.delta_coeffs))

    def __sub__(self, other: "SingDist") -> "SingDist":
        return self + (-other)

    def scale(self, factor) -> "SingDist":
        factor = _scalar(factor)
        return SingDist(tuple(factor * c for c in self.delta_coeffs))

    def to_poly(self) -> Poly:
        """L- transform: delta^(k) -> s^k."""
        return Poly(self.delta_coeffs)

    def __str__(self) -> str:
        return render_singular(self)


def sing_derivative(d: SingDist, k: int) -> SingDist:
    """k-th distributional derivative: delta^(p) -> delta^(p+k)."""
    if k < 0:
        raise ValueError("Derivative order must be non-negative")
    if d.is_zero():
        return d
    return SingDist((Fraction(0),) * k + d.delta_coeffs)


def sing_antiderivative(d: SingDist, k: int) -> SingDist:
    """
    Singular part of the k-fold integral from 0-: delta^(p) -> delta^(p-k).

    Integrating delta itself gives a step, which is regular, so the lowest k
    coefficients drop out.
    """
    if k < 0:
        raise ValueError("Integration order must be non-negative")
    return SingDist(d.delta_coeffs[k:])


def sing_integral_total(d: SingDist) -> Scalar:
    """Integral over [0-, inf): only the delta^(0) coefficient survives."""
    return d.coeff(0)


def render_singular(d: SingDist) -> str:
    """Text such as '2 delta - delta''."""
    if d.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(d.delta_coeffs):
        if c == 0:
            continue
        name = "delta" + ("'" * k if k <= 2 else f"^({k})")
        parts.append(_signed_term(c, name))
    return _join_terms(parts)


# ---------------------------------------------------------------------------
# Regular part
# ---------------------------------------------------------------------------

class Atom(NamedTuple):
    """coefficient * t^power * e^(rate*t) on t >= 0."""
    coefficient: Scalar
    power: int
    rate: Scalar


def _atom_key(atom: Atom):
    rate = complex(atom.rate)
    return (atom.power, rate.real, rate.imag)


def _normalize_atoms(atoms: Iterable[Atom]) -> Tuple[Atom, ...]:
    merged: Dict[Tuple[int, Scalar], Scalar] = {}
    for coefficient, power, rate in atoms:
        if power < 0:
            raise ValueError("Atom powers must be non-negative")
        rate = _scalar(rate)
        coefficient = _scalar(coefficient)
        key = (power, rate)
        merged[key] = merged.get(key, Fraction(0)) + coefficient

    result = []
    for (power, rate), coefficient in merged.items():
        if coefficient == 0:
            continue
        if not isinstance(rate, complex) and isinstance(coefficient, complex):
            # Real rate: the coefficient must be real for a real signal
            if abs(coefficient.imag) > IMAG_DISCARD_TOL * max(1.0, abs(coefficient)):
                raise ValueError(f"Real-rate atom with complex coefficient {coefficient}")
            coefficient = coefficient.real
        result.append(Atom(coefficient, power, rate))
    result.sort(key=_atom_key)
    return tuple(result)


def _check_conjugate_pairs(atoms: Tuple[Atom, ...]) -> None:
    complex_atoms = [a for a in atoms if isinstance(a.rate, complex)]
    for atom in complex_atoms:
        target_rate = atom.rate.conjugate()
        target_coeff = complex(atom.coefficient).conjugate()
        partner = [a for a in complex_atoms
                   if a.power == atom.power and abs(a.rate - target_rate) <= CONJUGATE_TOL * (1 + abs(target_rate))]
        if not partner or abs(complex(partner[0].coefficient) - target_coeff) > CONJUGATE_TOL * (1 + abs(target_coeff)):
            raise ValueError(f"Complex atom with rate {atom.rate} has no conjugate partner")


@dataclass(frozen=True)
class RegSig:
    """
    Regular signal: atoms on t >= 0 and a constant baseline on t < 0.

    Atoms with identical (power, rate) are merged, zero atoms dropped, and
    complex rates must come in conjugate pairs so the signal is real.
    """
    atoms: Tuple[Atom, ...] = ()
    pre_value: Scalar = Fraction(0)

    def __post_init__(self):
        atoms = _normalize_atoms(Atom(*a) for a in self.atoms)
        _check_conjugate_pairs(atoms)
        object.__setattr__(self, 'atoms', atoms)
        object.__setattr__(self, 'pre_value', _scalar(self.pre_value))

    @classmethod
    def zero(cls, pre_value=Fraction(0)) -> "RegSig":
        return cls((), pre_value)

    def is_zero(self) -> bool:
        return not self.atoms

    def is_exact(self) -> bool:
        return all(is_exact(a.coefficient) and is_exact(a.rate) for a in self.atoms)

    def __add__(self, other: "RegSig") -> "RegSig":
        return RegSig(self.atoms + other.atoms, self.pre_value + other.pre_value)

    def __neg__(self) -> "RegSig":
        return self.scale(-1)

    def __sub__(self, other: "RegSig") -> "RegSig":
        return self + (-other)

    def scale(self, factor) -> "RegSig":
        factor = _scalar(factor)
        return RegSig(tuple(Atom(factor * a.coefficient, a.power, a.rate) for a in self.atoms),
                      factor * self.pre_value)

    def rates(self) -> List[Scalar]:
        return sorted({a.rate for a in self.atoms}, key=lambda r: (complex(r).real, complex(r).imag))

    def __str__(self) -> str:
        return render_regular(self)


def _real_value(total: complex, scale: float) -> float:
    if abs(total.imag) > IMAG_DISCARD_TOL * max(1.0, scale):
        raise ValueError(f"Signal value has imaginary part {total.imag:.3e}; conjugate pairing is broken")
    return total.real


def reg_eval(g: RegSig, t: float) -> float:
    """
    Value of the regular signal at t >= 0.

    Raises:
        ValueError: negative time, or a non-negligible imaginary residue
    """
    if t < 0:
        raise ValueError("Regular signals are evaluated on t >= 0 only")
    total = 0j
    scale = 0.0
    for coefficient, power, rate in g.atoms:
        term = complex(coefficient) * (t ** power) * cmath.exp(complex(rate) * t)
        total += term
        scale = max(scale, abs(term))
    return _real_value(total, scale)


def reg_eval_grid(g: RegSig, times) -> np.ndarray:
    """Vectorized reg_eval over an array of non-negative times."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("Regular signals are evaluated on t >= 0 only")
    total = np.zeros(times.shape, dtype=complex)
    scale = np.ones(times.shape)
    for coefficient, power, rate in g.atoms:
        term = complex(coefficient) * times ** power * np.exp(complex(rate) * times)
        total += term
        scale = np.maximum(scale, np.abs(term))
    if np.any(np.abs(total.imag) > IMAG_DISCARD_TOL * scale):
        raise ValueError("Sampled signal has a non-negligible imaginary part")
    return total.real


def reg_derivative(g: RegSig, k: int = 1) -> RegSig:
    """k-th derivative on t > 0, computed atom-wise."""
    if k < 0:
        raise ValueError("Derivative order must be non-negative")
    atoms = list(g.atoms)
    for _ in range(k):
        differentiated = []
        for coefficient, power, rate in atoms:
            differentiated.append(Atom(coefficient * rate, power, rate))
            if power > 0:
                differentiated.append(Atom(coefficient * power, power - 1, rate))
        atoms = differentiated
    pre_value = g.pre_value if k == 0 else Fraction(0)
    return RegSig(tuple(atoms), pre_value)


def reg_derivative_at_zero_plus(g: RegSig, k: int) -> Scalar:
    """
    k-th derivative at t = 0+.

    d^k/dt^k [t^p e^(rate t)] at 0 equals C(k, p) * p! * rate^(k-p) for k >= p
    and zero otherwise. Exact data gives an exact result.
    """
    if k < 0:
        raise ValueError("Derivative order must be non-negative")
    total: Scalar = Fraction(0)
    scale = 0.0
    for coefficient, power, rate in g.atoms:
        if k < power:
            continue
        term = coefficient * math.comb(k, power) * math.factorial(power) * rate ** (k - power)
        total = total + term
        scale = max(scale, abs(term))
    if isinstance(total, complex):
        return _real_value(total, scale)
    return total


def derivative_magnitude_at_zero(g: RegSig, k: int) -> float:
    """Sum of the term magnitudes behind reg_derivative_at_zero_plus, a scale for tolerances."""
    total = 0.0
    for coefficient, power, rate in g.atoms:
        if k >= power:
            total += abs(complex(coefficient)) * math.comb(k, power) * math.factorial(power) \
                * abs(complex(rate)) ** (k - power)
    return total


def merge_close_atoms(g: RegSig, tol: float = 1e-9) -> RegSig:
    """
    Merge atoms whose rates agree within tol (relative) for equal powers.

    Float root finding returns rates like -1.0000000000000002 that should
    cancel against an exact -1 from the input side. Two exact rates are
    never merged unless equal.
    """
    groups: List[List] = []
    for coefficient, power, rate in g.atoms:
        for group in groups:
            if group[1] != power:
                continue
            if is_exact(rate) and is_exact(group[2]):
                close = rate == group[2]
            else:
                close = abs(complex(rate) - complex(group[2])) <= tol * (1 + abs(complex(rate)))
            if close:
                group[0] = group[0] + coefficient
                break
        else:
            groups.append([coefficient, power, rate])
    return RegSig(tuple(Atom(c, p, r) for c, p, r in groups), g.pre_value)


def _snap_complex(value) -> Optional[Tuple[Fraction, Fraction]]:
    z = complex(value)
    re = snap_rational(z.real, max_denominator=PAIR_SNAP_DENOMINATOR, tol=1e-15)
    im = snap_rational(z.imag, max_denominator=PAIR_SNAP_DENOMINATOR, tol=1e-15)
    if re is None or im is None:
        return None
    return re, im


def _pair_transform(coefficient, power: int, rate) -> RatFn:
    """Transform of a conjugate pair c t^p e^(rate t) + conj, as a real RatFn."""
    snapped_c = _snap_complex(coefficient)
    snapped_r = _snap_complex(rate)
    if snapped_c is not None and snapped_r is not None:
        # Gaussian-rational data: use exact arithmetic on real and imaginary parts
        c_re, c_im = snapped_c
        r_re, r_im = snapped_r
        # c (s - conj(rate))^(p+1) + conj(c) (s - rate)^(p+1) = 2 Re[c (s - conj(rate))^(p+1)]
        re_part = Poly((1,))
        im_part = Poly(())
        base_re = Poly((-r_re, 1))
        base_im = Poly((r_im,))
        for _ in range(power + 1):
            re_part, im_part = re_part * base_re - im_part * base_im, re_part * base_im + im_part * base_re
        numerator = (re_part.scale(c_re) - im_part.scale(c_im)).scale(2 * math.factorial(power))
        quadratic = Poly((r_re * r_re + r_im * r_im, -2 * r_re, 1))
        return RatFn(numerator, quadratic ** (power + 1))

    c = complex(coefficient)
    r = complex(rate)
    numerator = (Poly((-r.conjugate(), 1)) ** (power + 1)).scale(c)
    numerator = Poly(tuple(2 * complex(x).real for x in numerator.coeffs)).scale(float(math.factorial(power)))
    quadratic = Poly((abs(r) ** 2, -2 * r.real, 1.0))
    return RatFn(numerator, quadratic ** (power + 1))


def reg_laplace(g: RegSig) -> RatFn:
    """
    0+ Laplace transform sum_i c_i p_i! / (s - rate_i)^(p_i + 1).

    Real-rate atoms with exact data give an exact result; conjugate pairs are
    combined into real quadratic factors first (exact when their parts are
    Gaussian rationals).
    """
    result = RatFn(Poly(()))
    for coefficient, power, rate in g.atoms:
        if isinstance(rate, complex):
            if rate.imag < 0:
                continue
            result = result + _pair_transform(coefficient, power, rate)
            continue
        term = RatFn(Poly.constant(coefficient * math.factorial(power)),
                     Poly((-rate, 1)) ** (power + 1))
        result = result + term
    return result


def is_zero_signal(g: RegSig, tol: float = 1e-9, scale: float = 1.0) -> bool:
    """True when every atom coefficient is negligible against scale."""
    return all(abs(a.coefficient) <= tol * max(1.0, scale) for a in g.atoms)


def _signed_term(coefficient, body: str) -> Tuple[str, str]:
    """Split a coefficient into sign and text, dropping a unit factor."""
    if isinstance(coefficient, complex):
        return ('+', f"{format_number(coefficient)} {body}".strip())
    sign = '-' if coefficient < 0 else '+'
    magnitude = -coefficient if coefficient < 0 else coefficient
    if magnitude == 1 and body:
        return (sign, body)
    return (sign, f"{format_number(magnitude)} {body}".strip())


def _join_terms(parts: List[Tuple[str, str]]) -> str:
    if not parts:
        return "0"
    sign, text = parts[0]
    rendered = ("-" if sign == '-' else "") + text
    for sign, text in parts[1:]:
        rendered += f" {sign} {text}"
    return rendered


def _time_factor(power: int, rate) -> str:
    pieces = []
    if power == 1:
        pieces.append("t")
    elif power > 1:
        pieces.append(f"t^{power}")
    if rate != 0:
        pieces.append(f"e^{{{format_number(rate)} t}}")
    return " ".join(pieces)


def render_regular(g: RegSig) -> str:
    """
    Closed form such as '2 e^{-1 t} - 2 t e^{-1 t}'.

    Conjugate pairs collapse to e^{a t}(c1 cos(b t) + c2 sin(b t)).
    """
    parts: List[Tuple[str, str]] = []
    for coefficient, power, rate in g.atoms:
        if isinstance(rate, complex):
            if rate.imag < 0:
                continue
            c = complex(coefficient)
            omega = format_number(rate.imag)
            cos_part = _signed_term(2 * c.real, f"cos({omega} t)")
            sin_part = _signed_term(-2 * c.imag, f"sin({omega} t)")
            inner = _join_terms([p for p, v in ((cos_part, c.real), (sin_part, c.imag)) if v != 0])
            prefix = _time_factor(power, rate.real)
            parts.append(('+', f"{prefix}({inner})".strip() if prefix else f"({inner})"))
            continue
        parts.append(_signed_term(coefficient, _time_factor(power, rate)))
    return _join_terms(parts)


# ---------------------------------------------------------------------------
# Generalized signal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenSignal:
    """Regular part plus singular part of one generalized function."""
    regular: RegSig = field(default_factory=RegSig)
    singular: SingDist = field(default_factory=SingDist)

    def __add__(self, other: "GenSignal") -> "GenSignal":
        return GenSignal(self.regular + other.regular, self.singular + other.singular)

    def scale(self, factor) -> "GenSignal":
        return GenSignal(self.regular.scale(factor), self.singular.scale(factor))

    def is_zero(self) -> bool:
        return self.regular.is_zero() and self.singular.is_zero() and self.regular.pre_value == 0


def impulse(coeff=1, order: int = 0) -> GenSignal:
    """coeff * delta^(order)(t)."""
    return GenSignal(RegSig.zero(), SingDist.delta(order, coeff))


def step(height=1, pre_value=0) -> GenSignal:
    """Signal equal to pre_value before 0 and height after."""
    return GenSignal(RegSig((Atom(height, 0, 0),), pre_value), SingDist())


def exponential(coeff=1, rate=-1, power: int = 0) -> GenSignal:
    """coeff * t^power * e^(rate t) switched on at 0."""
    return GenSignal(RegSig((Atom(coeff, power, rate),)), SingDist())


def sinusoid(amplitude=1, omega=1, kind: str = "sin", decay=0) -> GenSignal:
    """amplitude * e^(decay t) * sin(omega t) or cos(omega t), as a conjugate pair."""
    omega = float(omega)
    decay = float(decay)
    amplitude = float(amplitude)
    if kind == "sin":
        c = complex(0.0, -amplitude / 2)
    elif kind == "cos":
        c = complex(amplitude / 2, 0.0)
    else:
        raise ValueError(f"Unknown sinusoid kind: {kind}")
    rate = complex(decay, omega)
    atoms = (Atom(c, 0, rate), Atom(c.conjugate(), 0, rate.conjugate()))
    return GenSignal(RegSig(atoms), SingDist())


def regular_jumps(g: RegSig, count: int) -> List[Scalar]:
    """x_r^(i)(0+) - x_r^(i)(0-) for i < count, with a constant 0- baseline."""
    jumps = []
    for i in range(count):
        before = g.pre_value if i == 0 else Fraction(0)
        jumps.append(reg_derivative_at_zero_plus(g, i) - before)
    return jumps


def input_singular_of_derivative(signal: GenSignal, k: int) -> SingDist:
    """
    Singular part of the k-th derivative of a generalized input.

    Besides the shifted delta train, every jump of the regular part at the
    origin (including the step away from the 0- baseline) contributes
    jump_i * delta^(k-1-i).
    """
    result = sing_derivative(signal.singular, k)
    jumps = regular_jumps(signal.regular, k)
    for i, jump in enumerate(jumps):
        if jump != 0:
            result = result + SingDist.delta(k - 1 - i, jump)
    return result


def validate_singular_order(signal: GenSignal, max_order: int) -> None:
    """Reject delta trains beyond the input-side order m of the system."""
    if signal.singular.order > max_order:
        raise ProblemInputError(
            f"singular order {signal.singular.order} exceeds input order m={max_order}")


def main():
    """Small demonstration when run directly"""
    g = RegSig((Atom(2, 0, -1), Atom(-2, 1, -1)))
    print(f"y_r(t) = {render_regular(g)}")
    print(f"Y_r(s) = {reg_laplace(g)}")
    print(f"y_r(0+) = {format_number(reg_derivative_at_zero_plus(g, 0))}, "
          f"y_r'(0+) = {format_number(reg_derivative_at_zero_plus(g, 1))}")


if __name__ == "__main__":
    main()
