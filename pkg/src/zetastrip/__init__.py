"""Numerical laboratory for the mean square of zeta times a Dirichlet
polynomial on vertical lines in the strip 1/4 < sigma < 1/2.

Subpackages by role: :mod:`zetastrip.special` (zeta/gamma/arcsinh/Bessel
kernels), :mod:`zetastrip.arithmetic` (divisor sums, coprime pair data,
Dirichlet polynomials), :mod:`zetastrip.quadrature` (adaptive oscillatory
integration), :mod:`zetastrip.meansquare` (the mean-square integral and its
main term), :mod:`zetastrip.explicit` (the window identity's oscillatory
blocks and the dyadic reconstruction), :mod:`zetastrip.voronoi`
(twisted-divisor remainder machinery), :mod:`zetastrip.saddle`
(stationary-phase benches), :mod:`zetastrip.scenarios` and
:mod:`zetastrip.cli` (scenario runs, reports, baselines).
"""

__version__ = "0.1.0"
