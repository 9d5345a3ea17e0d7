"""pcgeom: a verification workbench for five-dimensional weakly
para-cosymplectic manifolds.

The package materializes explicit model charts (eta-Einstein, contact
Ricci potential, locally flat, the transitive flat example, and the
three-dimensional family), computes their curvature through a truncated-jet
coordinate oracle, and checks the adopted-frame calculus, gauge theory and
left-invariant structure classification against it.
"""

from .jets import BACKEND, Jet, jet_arith, jet_lift

__version__ = "0.1.0"

__all__ = ["BACKEND", "Jet", "jet_arith", "jet_lift", "__version__"]
