"""Small truncated-power-series helpers over exact rational coefficients.

Series are plain lists indexed by power, length N+1 for truncation order N.
Division requires an invertible constant term.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial


def series_mul(a, b, N: int) -> list:
    out = [Fraction(0)] * (N + 1)
    for i, ca in enumerate(a[: N + 1]):
        if ca:
            for j, cb in enumerate(b[: N + 1 - i]):
                if cb:
                    out[i + j] += ca * cb
    return out


def series_div(num, den, N: int) -> list:
    """Coefficients of num/den up to order N; den[0] must be nonzero."""
    if not den or den[0] == 0:
        raise ZeroDivisionError("division by a series with zero constant term")
    inv0 = Fraction(1) / den[0]
    out = []
    for k in range(N + 1):
        acc = num[k] if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            if den[j]:
                acc -= den[j] * out[k - j]
        out.append(acc * inv0)
    return out


def series_exp_linear(c, N: int) -> list:
    """Coefficients of exp(c*x): c^k / k!."""
    out = [Fraction(1)]
    for k in range(1, N + 1):
        out.append(out[-1] * c / k)
    return out


def factorial_fraction(n: int, *ds: int) -> Fraction:
    """n! divided by the product of the factorials of ds."""
    v = Fraction(factorial(n))
    for d in ds:
        v /= factorial(d)
    return v
