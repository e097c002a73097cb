"""Certified convergence-radius bounds for Magnus and BCH expansions
in uniformly mean convex Banach algebras.

Submodules: freealg (exact noncommutative polynomials and permutation sums),
umqnorm (LP-backed universal norm), kernels (estimating kernels and
generating-function oracles), specrad (nonnegative-kernel spectral radius),
magnus (radius bounds), bch (two-variable thresholds), convexity (sampled
operator-inequality checks), verify (golden-constant suite), cli.
"""

from .umqnorm import PLAIN, ConvexityClass, fa_norm_exact, theta_ab, theta_k

__version__ = "0.1.0"

__all__ = [
    "PLAIN",
    "ConvexityClass",
    "fa_norm_exact",
    "theta_ab",
    "theta_k",
    "__version__",
]
