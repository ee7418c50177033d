#!/usr/bin/env python3
"""
Polynomial.py - Polynomials in the transform variable s

This module provides the polynomial substrate of the Laplace work: an immutable
polynomial with either exact rational (Fraction) or double-precision
(float/complex) coefficients, long division, exact gcd and square-free
factorization, and root finding with multiplicities.

Functions:
    poly_arith(p, q, op): add, sub, mul or divmod of two polynomials
    poly_gcd(p, q): monic greatest common divisor (exact coefficients)
    square_free_factors(p): Yun factorization into (factor, multiplicity) pairs
    poly_roots(p): all complex roots with multiplicities as a RootSet
    snap_rational(x): nearby small-denominator rational for a float, if any
"""
import os
import sys
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

# Add project root to path if running as script
if __name__ == "__main__":
    script_path = os.path.abspath(__file__)
    project_root = os.path.dirname(os.path.dirname(os.path.dirname(script_path)))
    sys.path.insert(0, project_root)

from utils.common import Scalar, format_number, setup_logging

logger = setup_logging("Polynomial")

# Constants
ROOT_CLUSTER_TOL = 1e-7      # relative distance under which roots merge
REAL_ROOT_TOL = 1e-9         # imaginary part (relative) treated as zero
SNAP_MAX_DENOMINATOR = 10**4
SNAP_TOL = 1e-12             # relative, for unverified snapping
EXACT_SNAP_TOL = 1e-7        # candidates checked by exact evaluation
NEWTON_POLISH_STEPS = 3


def _as_scalar(value) -> Scalar:
    """Normalize a coefficient: ints become Fraction, floats and complex stay."""
    if isinstance(value, bool):
        raise TypeError("Boolean is not a polynomial coefficient")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (float, complex)):
        return value
    if isinstance(value, np.generic):
        return _as_scalar(value.item())
    if isinstance(value, Number):
        return complex(value) if isinstance(value, complex) else float(value)
    raise TypeError(f"Unsupported coefficient type: {type(value).__name__}")


def is_exact(value) -> bool:
    """True for exact rational scalars."""
    return isinstance(value, Fraction)


@dataclass(frozen=True)
class Poly:
    """
    Polynomial c0 + c1*s + ... + cd*s^d, coefficients lowest degree first.

    Trailing zero coefficients are trimmed, so the zero polynomial has an empty
    coefficient tuple and degree -1.
    """
    coeffs: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        values = [_as_scalar(c) for c in self.coeffs]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, 'coeffs', tuple(values))

    # Construction
    @classmethod
    def constant(cls, value) -> "Poly":
        return cls((value,))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Poly":
        return cls((0,) * degree + (coeff,))

    @classmethod
    def s(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar], leading=1) -> "Poly":
        result = cls.constant(leading)
        for root in roots:
            result = result * cls((-_as_scalar(root), 1))
        return result

    # Properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def is_real(self) -> bool:
        return all(not isinstance(c, complex) for c in self.coeffs)

    def coeff(self, k: int) -> Scalar:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    # Arithmetic
    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coeff(k) + other.coeff(k) for k in range(size)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        product = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                product[i + j] = product[i + j] + a * b
        return Poly(tuple(product))

    __rmul__ = __mul__

    def scale(self, factor) -> "Poly":
        factor = _as_scalar(factor)
        return Poly(tuple(factor * c for c in self.coeffs))

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("Negative polynomial powers are not polynomials")
        result = Poly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __divmod__(self, other) -> Tuple["Poly", "Poly"]:
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        remainder = list(self.coeffs)
        if len(remainder) < len(other.coeffs):
            return Poly(), self
        quotient = [Fraction(0)] * (len(remainder) - len(other.coeffs) + 1)
        lead = other.leading
        for k in range(len(quotient) - 1, -1, -1):
            factor = remainder[k + other.degree] / lead
            quotient[k] = factor
            if factor == 0:
                continue
            for i, c in enumerate(other.coeffs):
                remainder[k + i] = remainder[k + i] - factor * c
            # Leading term cancels by construction
            remainder[k + other.degree] = Fraction(0) if is_exact(factor) else 0.0
        return Poly(tuple(quotient)), Poly(tuple(remainder[:other.degree]))

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    # Calculus and evaluation
    def __call__(self, x):
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def shift(self, center) -> "Poly":
        """Coefficients of p(center + h) as a polynomial in h (Taylor shift)."""
        center = _as_scalar(center)
        shifted = []
        for k in range(len(self.coeffs)):
            total = Fraction(0)
            for i in range(k, len(self.coeffs)):
                c = self.coeffs[i]
                if c != 0:
                    total = total + c * math.comb(i, k) * center ** (i - k)
            shifted.append(total)
        return Poly(tuple(shifted))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.leading
        return Poly(tuple(c / lead for c in self.coeffs))

    # Conversion
    def to_float(self) -> "Poly":
        return Poly(tuple(c if isinstance(c, complex) else float(c) for c in self.coeffs))

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def real_part(self, tol: float = REAL_ROOT_TOL) -> "Poly":
        """Drop negligible imaginary parts; raise if any is not negligible."""
        scale = max((abs(c) for c in self.coeffs), default=0.0)
        values = []
        for c in self.coeffs:
            if isinstance(c, complex):
                if abs(c.imag) > tol * max(1.0, scale):
                    raise ValueError(f"Coefficient {c} has a non-negligible imaginary part")
                c = c.real
            values.append(c)
        return Poly(tuple(values))

    def __str__(self) -> str:
        return render_poly(self)


def _coerce(value) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.constant(value)


def render_poly(p: Poly, var: str = "s") -> str:
    """Render highest degree first, e.g. 's^2+2s+1'."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeff(k)
        if c == 0:
            continue
        if isinstance(c, complex) and c.imag != 0:
            text = format_number(c)
            sign = '+'
        else:
            real = c.real if isinstance(c, complex) else c
            sign = '-' if real < 0 else '+'
            magnitude = -real if real < 0 else real
            text = format_number(magnitude)
            if k > 0 and magnitude == 1:
                text = ""
        power = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        parts.append((sign, f"{text}{power}"))
    head_sign, head = parts[0]
    rendered = ("-" if head_sign == '-' else "") + head
    for sign, body in parts[1:]:
        rendered += f"{sign}{body}"
    return rendered


def poly_arith(p: Poly, q: Poly, op: str):
    """
    Polynomial arithmetic dispatcher

    Args:
        p, q: Operands
        op: One of 'add', 'sub', 'mul', 'divmod'

    Returns:
        Poly, or (quotient, remainder) for 'divmod'
    """
    if op == 'add':
        return p + q
    if op == 'sub':
        return p - q
    if op == 'mul':
        return p * q
    if op == 'divmod':
        return divmod(p, q)
    raise ValueError(f"Unknown polynomial operation: {op}")


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm; intended for exact coefficients."""
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def square_free_factors(p: Poly) -> List[Tuple[Poly, int]]:
    """
    Yun's square-free factorization of an exact polynomial.

    Returns:
        List of (monic square-free factor, multiplicity), factors pairwise coprime
    """
    if p.degree < 1:
        return []
    f = p.monic()
    df = f.derivative()
    b = poly_gcd(f, df)
    c = f // b
    d = df // b - c.derivative()
    factors = []
    multiplicity = 1
    while c.degree > 0:
        a = poly_gcd(c, d)
        if a.degree > 0:
            factors.append((a, multiplicity))
        c = c // a
        d = d // a - c.derivative()
        multiplicity += 1
    return factors


def snap_rational(x: float, max_denominator: int = SNAP_MAX_DENOMINATOR,
                  tol: float = SNAP_TOL) -> Optional[Fraction]:
    """
    Closest small-denominator rational to x when it lies within tol (relative).

    The default bound pairs a denominator limit of 10^4 with a tolerance far
    below 1/q^2, so irrational values are not mistaken for their convergents.
    """
    if not math.isfinite(x):
        return None
    candidate = Fraction(x).limit_denominator(max_denominator)
    if abs(float(candidate) - x) <= tol * (1.0 + abs(x)):
        return candidate
    return None


@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial as (value, multiplicity) pairs."""
    roots: Tuple[Tuple[Scalar, int], ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def values(self) -> List[Scalar]:
        return [r for r, _ in self.roots]

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def _numeric_roots(p: Poly) -> np.ndarray:
    """Companion-matrix eigenvalues, Newton-polished on p itself."""
    coeffs = p.to_numpy()
    roots = np.polynomial.polynomial.polyroots(coeffs)
    dcoeffs = np.polynomial.polynomial.polyder(coeffs)
    polished = []
    for r in np.atleast_1d(roots):
        z = complex(r)
        for _ in range(NEWTON_POLISH_STEPS):
            fz = np.polynomial.polynomial.polyval(z, coeffs)
            dfz = np.polynomial.polynomial.polyval(z, dcoeffs)
            if dfz == 0:
                break
            step = fz / dfz
            z_next = z - step
            # Keep the eigenvalue when polishing does not improve the residual
            if abs(np.polynomial.polynomial.polyval(z_next, coeffs)) >= abs(fz):
                break
            z = z_next
        polished.append(z)
    return np.array(polished, dtype=complex)


def _cluster(values: Sequence[complex], multiplicities: Sequence[int],
             tol: float) -> List[Tuple[complex, int]]:
    """Merge roots closer than tol*(1+|root|); value is the weighted centroid."""
    clusters: List[List] = []
    for value, mult in zip(values, multiplicities):
        for cluster in clusters:
            centre = cluster[0] / cluster[1]
            if abs(value - centre) <= tol * (1.0 + abs(centre)):
                cluster[0] += value * mult
                cluster[1] += mult
                cluster[2] += 1
                break
        else:
            clusters.append([value * mult, mult, 1])
    merged = [(c[0] / c[1], c[1]) for c in clusters]
    if any(c[2] > 1 for c in clusters):
        logger.debug(f"Clustered roots into {len(merged)} distinct values")
    return merged


def _enforce_conjugates(roots: List[Tuple[complex, int]]) -> List[Tuple[complex, int]]:
    """Pair every upper half-plane root with an exact conjugate partner."""
    real_roots = []
    upper = []
    for value, mult in roots:
        if abs(value.imag) <= REAL_ROOT_TOL * (1.0 + abs(value)):
            real_roots.append((complex(value.real, 0.0), mult))
        elif value.imag > 0:
            upper.append((value, mult))
    lower = [(v, m) for v, m in roots if v.imag < 0 and abs(v.imag) > REAL_ROOT_TOL * (1.0 + abs(v))]
    paired = []
    unused = list(lower)
    for value, mult in upper:
        partner = min(unused, key=lambda item: abs(item[0] - value.conjugate()), default=None)
        if partner is not None:
            unused.remove(partner)
            value = (value + partner[0].conjugate()) / 2
        paired.append((value, mult))
        paired.append((value.conjugate(), mult))
    if unused:
        logger.warning(f"{len(unused)} roots without conjugate partner kept as computed")
        paired.extend(unused)
    return real_roots + paired


def _split_rational_roots(factor: Poly) -> Tuple[List[Fraction], Poly]:
    """
    Peel exact rational roots off a square-free exact factor.

    A float root is accepted only when its snapped value is an exact root;
    the factor is then deflated exactly and the search repeats on the
    quotient. A remaining linear factor yields its root directly.
    """
    found: List[Fraction] = []
    rest = factor
    while rest.degree >= 1:
        if rest.degree == 1:
            found.append(-rest.coeffs[0] / rest.coeffs[1])
            return found, Poly((1,))
        accepted = None
        for value in _numeric_roots(rest):
            if abs(value.imag) > EXACT_SNAP_TOL * (1.0 + abs(value)):
                continue
            snapped = snap_rational(value.real, tol=EXACT_SNAP_TOL)
            if snapped is not None and rest(snapped) == 0:
                accepted = snapped
                break
        if accepted is None:
            break
        quotient, remainder = divmod(rest, Poly((-accepted, 1)))
        if not remainder.is_zero():
            break
        found.append(accepted)
        rest = quotient
    return found, rest


def poly_roots(p: Poly, cluster_tol: float = ROOT_CLUSTER_TOL) -> RootSet:
    """
    Find all roots of p with multiplicities.

    Exact inputs are first split into square-free factors, so repeated roots
    get their multiplicity exactly; rational roots of exact inputs are
    verified by exact division and come back as Fraction values. Float
    inputs rely on clustering.

    Args:
        p: Nonzero polynomial of degree >= 1
        cluster_tol: Relative distance below which roots are merged

    Returns:
        RootSet ordered by real part, then imaginary part
    """
    if p.is_zero() or p.degree < 1:
        raise ValueError("Root finding needs a polynomial of degree >= 1")

    exact = p.is_exact()
    if exact:
        pieces = square_free_factors(p)
    else:
        pieces = [(p, 1)]

    found: List[Tuple[Scalar, int]] = []
    for factor, multiplicity in pieces:
        if exact:
            rational, factor = _split_rational_roots(factor)
            found.extend((root, multiplicity) for root in rational)
            if factor.degree < 1:
                continue
        values = _numeric_roots(factor)
        merged = _cluster(values, [multiplicity] * len(values), cluster_tol)
        if factor.is_real():
            merged = _enforce_conjugates(merged)
        for value, mult in merged:
            found.append((value.real if value.imag == 0 else value, mult))

    found.sort(key=lambda item: (complex(item[0]).real, complex(item[0]).imag))
    total = sum(m for _, m in found)
    if total != p.degree:
        raise ArithmeticError(f"Root multiplicities sum to {total}, expected {p.degree}")
    return RootSet(tuple(found))


def main():
    """Small demonstration when run directly"""
    p = Poly((1, 2, 1))
    print(f"p(s) = {p}")
    for value, mult in poly_roots(p):
        print(f"  root {format_number(value)} (multiplicity {mult})")


if __name__ == "__main__":
    main()
