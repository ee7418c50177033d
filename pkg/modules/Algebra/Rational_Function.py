#!/usr/bin/env python3
"""
Rational_Function.py - Rational functions in s and partial-fraction expansion

This module holds the canonical rational function used for every transform in
the toolkit, point evaluation, and the partial-fraction decomposition that
bridges transforms back to closed-form time signals.

Functions:
    ratfn_eval(f, s0): value of f at a non-pole point
    partial_fractions(f): pole terms residue/(s-pole)^order plus polynomial part
    render_ratfn(f): compact text with a factored denominator, e.g. 2s/(s+1)^2
"""
import os
import sys
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from modules.Algebra.Polynomial import Poly, RootSet, poly_gcd, poly_roots, render_poly, is_exact
from utils.common import Scalar, format_number, setup_logging

logger = setup_logging("Rational_Function")

POLE_EVAL_TOL = 1e-12
REAL_RESIDUE_TOL = 1e-9


def _to_poly(value) -> Poly:
    if isinstance(value, Poly):
        return value
    if isinstance(value, (tuple, list)):
        return Poly(tuple(value))
    return Poly.constant(value)


@dataclass(frozen=True)
class RatFn:
    """
    Rational function num(s)/den(s) in canonical form.

    The denominator is monic; exact inputs are additionally reduced by their
    polynomial gcd, so two equal exact rational functions compare equal.
    """
    num: Poly
    den: Poly = Poly((1,))

    def __post_init__(self):
        num = _to_poly(self.num)
        den = _to_poly(self.den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly((1,))
        elif num.is_exact() and den.is_exact() and den.degree > 0:
            common = poly_gcd(num, den)
            if common.degree > 0:
                num = num // common
                den = den // common
        lead = den.leading
        if lead != 1:
            num = Poly(tuple(c / lead for c in num.coeffs))
            den = Poly(tuple(c / lead for c in den.coeffs))
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)

    @classmethod
    def from_poly(cls, p) -> "RatFn":
        return cls(_to_poly(p), Poly((1,)))

    def is_exact(self) -> bool:
        return self.num.is_exact() and self.den.is_exact()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_proper(self) -> bool:
        return self.num.degree <= self.den.degree

    def is_strictly_proper(self) -> bool:
        return self.num.degree < self.den.degree

    def split_polynomial(self) -> Tuple[Poly, "RatFn"]:
        """Polynomial part and strictly proper remainder."""
        quotient, remainder = divmod(self.num, self.den)
        return quotient, RatFn(remainder, self.den)

    def __add__(self, other) -> "RatFn":
        other = _coerce(other)
        if self.den == other.den:
            return RatFn(self.num + other.num, self.den)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFn":
        return RatFn(-self.num, self.den)

    def __sub__(self, other) -> "RatFn":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RatFn":
        return _coerce(other) - self

    def __mul__(self, other) -> "RatFn":
        other = _coerce(other)
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFn":
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFn(self.num * other.den, self.den * other.num)

    def scale(self, factor) -> "RatFn":
        return RatFn(self.num.scale(factor), self.den)

    def __call__(self, s0):
        return ratfn_eval(self, s0)

    def to_float(self) -> "RatFn":
        return RatFn(self.num.to_float(), self.den.to_float())

    def real_part(self) -> "RatFn":
        return RatFn(self.num.real_part(), self.den.real_part())

    def __str__(self) -> str:
        return render_ratfn(self)


def _coerce(value) -> RatFn:
    if isinstance(value, RatFn):
        return value
    return RatFn.from_poly(value)


def ratfn_eval(f: RatFn, s0):
    """
    Evaluate f at s0.

    Raises:
        ZeroDivisionError: s0 is a pole (exactly, or within tolerance for floats)
    """
    den_value = f.den(s0)
    if f.is_exact() and is_exact(s0):
        if den_value == 0:
            raise ZeroDivisionError(f"evaluation at pole s={format_number(s0)}")
        return f.num(s0) / den_value
    scale = sum(abs(c) * abs(s0) ** k for k, c in enumerate(f.den.coeffs))
    if abs(den_value) <= POLE_EVAL_TOL * max(scale, 1.0):
        raise ZeroDivisionError(f"evaluation at pole s={format_number(complex(s0))}")
    return f.num(s0) / den_value


class PoleTerm(NamedTuple):
    """One term residue/(s - pole)^order."""
    pole: Scalar
    order: int
    residue: Scalar


@dataclass(frozen=True)
class PartialFractionForm:
    """Sum of pole terms plus a polynomial part."""
    terms: Tuple[PoleTerm, ...]
    polynomial_part: Poly

    def evaluate(self, s0):
        total = self.polynomial_part(s0)
        for term in self.terms:
            total = total + term.residue / (s0 - term.pole) ** term.order
        return total

    def to_ratfn(self) -> RatFn:
        """Recombine over a common denominator."""
        result = RatFn.from_poly(self.polynomial_part)
        for term in self.terms:
            factor = Poly((-term.pole, 1)) ** term.order
            result = result + RatFn(Poly.constant(term.residue), factor)
        return result


def series_quotient(numerator: Poly, denominator: Poly, count: int) -> List[Scalar]:
    """First `count` Taylor coefficients of numerator/denominator around 0."""
    b0 = denominator.coeff(0)
    if b0 == 0:
        raise ArithmeticError("deflated denominator vanishes at its own pole")
    series: List[Scalar] = []
    for k in range(count):
        value = numerator.coeff(k)
        for i in range(1, k + 1):
            value = value - denominator.coeff(i) * series[k - i]
        series.append(value / b0)
    return series


def _deflated(den: Poly, roots: RootSet, pole, multiplicity: int) -> Poly:
    """den with the factor (s - pole)^multiplicity removed."""
    if is_exact(pole) and den.is_exact():
        quotient, remainder = divmod(den, Poly((-pole, 1)) ** multiplicity)
        if remainder.is_zero():
            return quotient
    others = []
    for value, mult in roots:
        if value is pole or value == pole:
            continue
        others.extend([value] * mult)
    return Poly.from_roots(others, leading=den.leading)


def _clean_residue(value, pole):
    """Real poles of real data carry real residues; drop rounding noise."""
    if isinstance(value, complex) and not isinstance(pole, complex):
        if abs(value.imag) <= REAL_RESIDUE_TOL * max(1.0, abs(value)):
            return value.real
    return value


def partial_fractions(f: RatFn) -> PartialFractionForm:
    """
    Partial-fraction expansion of f.

    Improper inputs are split by polynomial division first. Residues at a pole
    of order k come from the Taylor expansion of the deflated function
    remainder(s)/q(s), q = den/(s - pole)^k, around the pole. For real data the
    residues at lower half-plane poles are the conjugates of the upper ones.

    Args:
        f: Rational function

    Returns:
        PartialFractionForm whose recombination reproduces f
    """
    quotient, remainder = divmod(f.num, f.den)
    if remainder.is_zero():
        return PartialFractionForm((), quotient)

    roots = poly_roots(f.den)
    real_data = f.den.is_real() and remainder.is_real()
    terms: List[PoleTerm] = []
    for pole, mult in roots:
        mirrored = real_data and isinstance(pole, complex)
        if mirrored and pole.imag < 0:
            continue
        deflated = _deflated(f.den, roots, pole, mult)
        series = series_quotient(remainder.shift(pole), deflated.shift(pole), mult)
        for j, coefficient in enumerate(series):
            order = mult - j
            residue = _clean_residue(coefficient, pole)
            if residue == 0:
                continue
            terms.append(PoleTerm(pole, order, residue))
            if mirrored:
                terms.append(PoleTerm(pole.conjugate(), order, complex(residue).conjugate()))

    terms.sort(key=lambda t: (complex(t.pole).real, complex(t.pole).imag, t.order))
    logger.debug(f"Partial fractions: {len(terms)} pole terms, polynomial part {render_poly(quotient)}")
    return PartialFractionForm(tuple(terms), quotient)


def _root_factor(value) -> str:
    """Text of (s - value) for a real root."""
    if value == 0:
        return "s"
    magnitude = format_number(abs(value))
    return f"(s+{magnitude})" if value < 0 else f"(s-{magnitude})"


def render_ratfn(f: RatFn) -> str:
    """Render with the numerator expanded and the denominator factored."""
    numerator = render_poly(f.num)
    if f.den.degree <= 0:
        return numerator
    if sum(1 for c in f.num.coeffs if c != 0) > 1:
        numerator = f"({numerator})"

    if not f.den.is_real():
        return f"{numerator}/({render_poly(f.den)})"

    factors = []
    for value, mult in poly_roots(f.den):
        if isinstance(value, complex):
            if value.imag < 0:
                continue
            quadratic = Poly((abs(value) ** 2, -2 * value.real, 1))
            text = f"({render_poly(quadratic)})"
        else:
            text = _root_factor(value)
        factors.append(text if mult == 1 else f"{text}^{mult}")
    return f"{numerator}/{''.join(factors)}"


def main():
    """Small demonstration when run directly"""
    f = RatFn(Poly((0, 2)), Poly((1, 2, 1)))
    print(f"F(s) = {render_ratfn(f)}")
    for term in partial_fractions(f).terms:
        print(f"  {format_number(term.residue)}/(s-({format_number(term.pole)}))^{term.order}")


if __name__ == "__main__":
    main()
