"""
Shared helpers for the test files: random problem generators and the
summary runner used when a test file is executed directly.
"""

import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Sequence

import numpy as np

root_dir = Path(__file__).resolve().parents[1]
if str(root_dir) not in sys.path:
    sys.path.insert(0, str(root_dir))

from modules.Algebra.Polynomial import Poly
from modules.Decomposition.Singular_Decomposition import SysSpec
from modules.Signals.Generalized_Signals import Atom, GenSignal, RegSig, SingDist

MIN_ROOT_SEPARATION = 0.05


def random_rational(rng: np.random.Generator, low: int = -5, high: int = 5,
                    denominators: Sequence[int] = (1, 2, 3, 4)) -> Fraction:
    """Rational in [low, high] with a small denominator."""
    den = int(rng.choice(denominators))
    return Fraction(int(rng.integers(low * den, high * den + 1)), den)


def random_nonzero_rational(rng: np.random.Generator, low: int = -5, high: int = 5) -> Fraction:
    while True:
        value = random_rational(rng, low, high)
        if value != 0:
            return value


def well_separated(coefficients: Sequence[Fraction]) -> bool:
    """Distinct roots at least MIN_ROOT_SEPARATION apart (float check)."""
    if len(coefficients) < 3:
        return True
    roots = np.roots([float(c) for c in coefficients])
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < MIN_ROOT_SEPARATION:
                return False
    return True


def clustered_root_system(rng: np.random.Generator, max_order: int = 5) -> SysSpec:
    """
    System with a repeated rational root and a second root 10^-k next to it
    (k in 6..9), padded with further distinct rational roots.
    """
    n = int(rng.integers(2, max_order + 1))
    base = Fraction(int(rng.integers(-8, 1)), int(rng.choice((1, 2))))
    roots = [base, base + Fraction(1, 10 ** int(rng.integers(6, 10)))]
    if n >= 3 and rng.random() < 0.5:
        roots.append(base)
    while len(roots) < n:
        candidate = Fraction(int(rng.integers(-12, 3)), int(rng.choice((1, 3))))
        if candidate not in roots:
            roots.append(candidate)
    a = Poly.from_roots(roots).coeffs[::-1]
    m = int(rng.integers(0, n + 1))
    b = [random_nonzero_rational(rng)] + [random_rational(rng) for _ in range(m)]
    y_pre = [random_rational(rng) for _ in range(n)]
    singular = SingDist(tuple(random_rational(rng) for _ in range(int(rng.integers(0, m + 2)))))
    return SysSpec(tuple(a), tuple(b), tuple(y_pre), GenSignal(RegSig.zero(), singular))


def random_system(rng: np.random.Generator, max_order: int = 5, with_step: bool = True) -> SysSpec:
    """
    Random problem: n <= max_order, m <= n, rational coefficients in [-5, 5],
    a delta train of order <= m, random pre-initial values and, optionally,
    a step in the regular input. One draw in four is a clustered-root system.
    """
    if max_order >= 2 and rng.random() < 0.25:
        return clustered_root_system(rng, max_order)
    while True:
        n = int(rng.integers(1, max_order + 1))
        m = int(rng.integers(0, n + 1))
        a = [random_nonzero_rational(rng)] + [random_rational(rng) for _ in range(n)]
        if well_separated(a):
            break
    b = [random_nonzero_rational(rng)] + [random_rational(rng) for _ in range(m)]
    y_pre = [random_rational(rng) for _ in range(n)]
    singular = SingDist(tuple(random_rational(rng) for _ in range(int(rng.integers(0, m + 2)))))
    if with_step and rng.random() < 0.5:
        height = random_rational(rng)
        regular = RegSig((Atom(height, 0, 0),), random_rational(rng))
    else:
        regular = RegSig.zero()
    return SysSpec(tuple(a), tuple(b), tuple(y_pre), GenSignal(regular, singular))


def rational_root_system(rng: np.random.Generator, n: int, m: int) -> SysSpec:
    """System whose characteristic polynomial has distinct small rational roots."""
    roots: List[Fraction] = []
    while len(roots) < n:
        candidate = Fraction(int(rng.integers(-12, 1)), int(rng.choice((1, 2))))
        if candidate not in roots:
            roots.append(candidate)
    poly = [Fraction(1)]
    for root in roots:
        shifted = poly + [Fraction(0)]
        poly = [shifted[i] - root * (poly[i - 1] if i > 0 else 0) for i in range(len(shifted))]
    b = [random_nonzero_rational(rng)] + [random_rational(rng) for _ in range(m)]
    y_pre = [random_rational(rng) for _ in range(n)]
    singular = SingDist(tuple(random_rational(rng) for _ in range(m + 1)))
    return SysSpec(tuple(poly), tuple(b), tuple(y_pre), GenSignal(RegSig.zero(), singular))


def run_suite(tests: Sequence[Callable[[], None]]) -> bool:
    """Run test functions outside pytest and print a summary."""
    results = []
    for test in tests:
        try:
            test()
            results.append(True)
        except Exception as error:
            print(f"❌ {test.__name__}: {type(error).__name__}: {error}")
            results.append(False)

    print("\n=== Test results ===")
    for i, (test, result) in enumerate(zip(tests, results)):
        status = "✅ passed" if result else "❌ failed"
        print(f"{i + 1}. {test.__name__}: {status}")

    success_rate = sum(results) / len(results) * 100 if results else 100.0
    print(f"\nSuccess rate: {success_rate:.1f}% ({sum(results)}/{len(results)})")
    return all(results)
