"""Numerical laboratory for rough singular integrals on the plane.

Modules: ``kernel`` (kernels on the circle), ``conditions`` (log
integrability and index ranges), ``multiplier`` (dyadic Fourier symbols),
``transform`` (grid operators), ``counterexample`` (the spike kernel outside
H^1), ``cli``.
"""

__version__ = "0.1.0"
