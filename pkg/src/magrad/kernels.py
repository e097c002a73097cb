"""Resolvent estimating kernels as explicit polynomials on [0, 1].

The reduced kernel of degree p-1 is

    Ktilde(t) = sum_{a+b=p-1} p_ab(t) * Theta_ab

with p_ab the binomial configuration density; the two-sided kernel on [-1, 1]
is lam*Ktilde(t) for t >= 0 and (1-lam)*Ktilde(t+1) for t < 0, used as a
Toeplitz kernel K(t0, tp) = K(tp - t0) on the unit square.  The two branches
agree at t = 0 for p-1 >= 1 (both equal lam*(1-lam)*Theta_{p-1}); the wrapped
one-sided kernel, by contrast, genuinely jumps at 0, which is why t = 0 is
assigned to the lam branch and the quadrature in `specrad` samples cell
midpoints only.

The plain (ell^1) case has generating-function oracles: Theta_p is the
x^(p-1) coefficient of G(lam*x, (1-lam)*x) and Ktilde_{p-1}(t) the x^(p-1)
coefficient of Gt(lam*x, (1-lam)*x | t), both computed by exact series
division (the shared factor 2*lam-1 of numerator and denominator is divided
out symbolically first, so lam = 1/2 needs no special casing).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .series import factorial_fraction, series_div, series_exp_linear
from .umqnorm import ConvexityClass, theta_ab

Number = Union[Fraction, float]


def p_ab(a: int, b: int, t):
    """Binomial configuration density (a+b)!/(a! b!) * (1-t)^a * t^b."""
    if a < 0 or b < 0:
        raise ValueError("a, b must be nonnegative")
    return factorial_fraction(a + b, a, b) * (1 - t) ** a * t ** b


def _poly_eval(coeffs, t):
    acc = t * 0
    for c in reversed(coeffs):
        acc = acc * t + (c if isinstance(t, Fraction) else float(c))
    return acc


@dataclass(frozen=True)
class ReducedKernel:
    """One-variable kernel polynomial on [0, 1] plus its two-sided assembly."""

    coeffs: tuple          # t-polynomial, lowest power first
    lam: Number
    p_minus_1: int
    exact: bool = True

    def __call__(self, t):
        return _poly_eval(self.coeffs, t)

    def integral01(self):
        """Exact integral over [0, 1] (the convolution-type spectral radius)."""
        return sum((c / Fraction(i + 1) if isinstance(c, Fraction) else c / (i + 1))
                   for i, c in enumerate(self.coeffs))

    def max01(self) -> float:
        """Maximum over [0, 1] via the derivative's real roots."""
        import numpy as np

        cs = [float(c) for c in self.coeffs]
        cand = [0.0, 1.0]
        if len(cs) > 1:
            dp = [i * cs[i] for i in range(1, len(cs))]
            roots = np.roots(list(reversed(dp))) if any(dp) else []
            for r in roots:
                if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0:
                    cand.append(float(r.real))
        return max(_poly_eval(cs, t) for t in cand)

    def two_sided(self) -> "TwoSidedKernel":
        return TwoSidedKernel(self)


@dataclass(frozen=True)
class TwoSidedKernel:
    """Toeplitz kernel K(t0, tp) = K(tp - t0) assembled from a reduced kernel."""

    reduced: ReducedKernel

    @property
    def lam(self):
        return self.reduced.lam

    def __call__(self, t):
        if t >= 0:          # t = 0 goes to the lam branch by convention
            return self.lam * self.reduced(t)
        return (1 - self.lam) * self.reduced(t + 1)

    def kernel(self, t0, tp):
        return self(tp - t0)

    @property
    def is_convolution(self) -> bool:
        return float(self.lam) == 0.5


def reduced_kernel(p_minus_1: int, lam, cls: ConvexityClass,
                   exact_cap: int = 5) -> ReducedKernel:
    """Assemble the reduced kernel from the universal-norm Theta_ab values.

    Exact rational coefficients when lam is rational and the class cost is
    exact (plain or q=1); otherwise float coefficients built from enclosure
    midpoints (enclosure widths are ~1e-25, far below every numeric
    tolerance used downstream).
    """
    if p_minus_1 < 0:
        raise ValueError("p-1 must be >= 0")
    if p_minus_1 == 0:
        return ReducedKernel(coeffs=(Fraction(1),), lam=lam, p_minus_1=0,
                             exact=isinstance(lam, (Fraction, int)))
    if p_minus_1 > exact_cap:
        raise ValueError(f"exact kernel mode capped at p-1 = {exact_cap}")
    lamf = Fraction(lam)
    exact = cls.exact
    thetas = []
    for a in range(p_minus_1 + 1):
        b = p_minus_1 - a
        tv = theta_ab(a, b, lamf, cls)
        thetas.append(tv.value if exact else tv.mid)
    # expand sum_a thetas[a] * (p-1)!/(a! b!) (1-t)^a t^b into powers of t
    zero = Fraction(0) if exact else 0.0
    coeffs = [zero] * (p_minus_1 + 1)
    for a in range(p_minus_1 + 1):
        b = p_minus_1 - a
        base = factorial_fraction(p_minus_1, a, b)
        base = base if exact else float(base)
        # (1-t)^a = sum_i C(a,i) (-1)^i t^i
        for i in range(a + 1):
            binom = factorial_fraction(a, i, a - i)
            term = thetas[a] * base * (binom if exact else float(binom)) * (-1) ** i
            coeffs[b + i] += term
    return ReducedKernel(coeffs=tuple(coeffs), lam=lamf if exact else float(lamf),
                         p_minus_1=p_minus_1, exact=exact)


# ---------------------------------------------------------------------------
# plain-case generating functions


def _denominator_series(lam: Fraction, N: int) -> list:
    """(lam*exp((1-lam)x) - (1-lam)*exp(lam*x)) / ((2*lam-1)*x), exactly.

    Every coefficient of the bracket is divisible by 2*lam-1 via the
    geometric-sum identity, so the quotient below is polynomial in lam and
    evaluates cleanly at lam = 1/2.
    """
    out = [Fraction(1)]
    mu = lam * (1 - lam)
    for k in range(1, N + 1):
        s = sum(((1 - lam) ** i) * (lam ** (k - 2 - i)) for i in range(k - 1))
        out.append(-mu * s / factorial_fraction(k))
    return out


def g_series(lam, N: int) -> list:
    """Plain characteristic coefficients Theta_k for k = 0..N (Theta_0 = 0).

    Theta_k is the x^(k-1) coefficient of (e^u - e^v)/(u e^v - v e^u) at
    u = lam*x, v = (1-lam)*x; computed as an exact rational series quotient.
    Cross-checked elsewhere against the Euler recursion, which is the ground
    truth for the plain case.
    """
    if N > 30:
        raise ValueError("series order capped at 30")
    lam = Fraction(lam)
    # numerator/(x*(2 lam - 1)): coefficient k is sum_i lam^i (1-lam)^(k-i)/(k+1)!
    num = [sum((lam ** i) * ((1 - lam) ** (k - i)) for i in range(k + 1))
           / factorial_fraction(k + 1) for k in range(N)]
    den = _denominator_series(lam, N)
    g = series_div(num, den, N - 1) if N >= 1 else []
    return [Fraction(0)] + g


def g_tilde_series(lam, t, N: int) -> list:
    """Plain reduced-kernel values Ktilde_{p-1}(t) for p-1 = 0..N.

    Entry p-1 is the x^(p-1) coefficient of
    (u - v)/(u e^v - v e^u) * e^(t*u + (1-t)*v) at u = lam*x, v = (1-lam)*x.
    """
    if N > 30:
        raise ValueError("series order capped at 30")
    lam, t = Fraction(lam), Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    num = series_exp_linear(t * lam + (1 - t) * (1 - lam), N)
    den = _denominator_series(lam, N)
    return series_div(num, den, N)


def plain_reduced_kernel(p_minus_1: int, lam) -> ReducedKernel:
    """Exact plain-case reduced kernel (ell^1 Theta_ab route)."""
    from .umqnorm import PLAIN

    return reduced_kernel(p_minus_1, lam, PLAIN, exact_cap=8)


# ---------------------------------------------------------------------------
# the degree-4 correction polynomial


def b_correction(lam, t):
    """Piecewise-cubic correction B(lam, t) on [-1, 1].

    The degree-4 kernel of the cross-cost model satisfies
    K4_cls(t) = K4_plain(t) - (1 - kappa) * B(lam, t) exactly on each side.
    Vanishes identically at lam in {0, 1} and is continuous in lam.
    """
    if not -1 <= t <= 1:
        raise ValueError("t must lie in [-1, 1]")
    m = min(lam, 1 - lam)
    third = Fraction(1, 3) if isinstance(t, Fraction) and isinstance(lam, Fraction) \
        else 1.0 / 3.0
    if t >= 0:
        poly = (1 - lam - 3 * t ** 2 + 2 * t ** 3
                + 6 * lam * t ** 2 - 4 * lam * t ** 3)
        return third * lam ** 2 * (1 - lam) * m * poly
    poly = (lam + 3 * t ** 2 + 2 * t ** 3
            - 6 * lam * t ** 2 - 4 * lam * t ** 3)
    return third * lam * (1 - lam) ** 2 * m * poly


def kernel_csv_rows(k: ReducedKernel, samples: int = 101):
    """(t, Ktilde(t)) sample table for export."""
    rows = []
    for i in range(samples):
        t = i / (samples - 1)
        rows.append((t, float(k(t))))
    return rows
