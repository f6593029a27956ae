"""zetalab: a high-precision numerical laboratory around the completed
Riemann zeta function, its Laplace-transform densities, zero-table derived
series, Dirichlet/Ramanujan analogues and torus-approximation searches."""

__version__ = "0.1.0"

from .numerics import (  # noqa: F401
    DEFAULT_CTX,
    PrecisionContext,
    Strip,
    ValueWithBound,
)
