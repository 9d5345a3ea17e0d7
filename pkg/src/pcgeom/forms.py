"""Exterior calculus on a coordinate chart.

Forms store only strictly increasing index tuples, so antisymmetry is
structural.  Coefficients may be scalar expressions (symbolic mode), jets or
plain numbers (pointwise mode); the algebraic operations are generic over the
coefficient type.  Conventions are the standard factorial-free ones:

    (a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)          for 1-forms,
    (i_v a)(X1, ..., X_{k-1}) = a(v, X1, ...),
    d f = sum_i (d f / d x_i) dx^i.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from . import expr as ex
from .errors import ChartMismatchError, DomainError
from .jets import Jet, jet_lift


def _merge_sign(I, J):
    """Shuffle sign merging two disjoint increasing tuples, or (None, 0)."""
    if set(I) & set(J):
        return None, 0
    merged = tuple(sorted(I + J))
    seq = list(I + J)
    sign = 1
    # parity of the permutation sorting seq
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return merged, sign


class DifferentialForm:
    """Exterior form of fixed degree with sparse sorted-index components."""

    __slots__ = ("nvars", "degree", "comp")

    def __init__(self, nvars, degree, comp=None):
        self.nvars = nvars
        self.degree = degree
        self.comp = dict(comp) if comp else {}

    @classmethod
    def from_components(cls, nvars, degree, comp):
        out = cls(nvars, degree)
        for I, c in comp.items():
            out._add(tuple(I), c)
        return out

    def _add(self, I, c):
        if len(I) != self.degree:
            raise ValueError("index tuple length does not match the degree")
        if any(I[k] >= I[k + 1] for k in range(len(I) - 1)):
            raise ValueError("index tuples must be strictly increasing")
        if I in self.comp:
            self.comp[I] = self.comp[I] + c
        else:
            self.comp[I] = c

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ChartMismatchError("forms live on different charts")

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        out = DifferentialForm(self.nvars, self.degree, self.comp)
        for I, c in other.comp.items():
            out.comp[I] = out.comp.get(I, 0.0) + c
        return out

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __mul__(self, scalar):
        return DifferentialForm(
            self.nvars, self.degree, {I: c * scalar for I, c in self.comp.items()}
        )

    __rmul__ = __mul__

    def __repr__(self):
        return f"DifferentialForm(deg={self.degree}, comp={self.comp})"

    # -- pointwise conversion ------------------------------------------------

    def at(self, names, point, order=0):
        """Evaluate symbolic components, returning a numeric/jet form."""
        comp = {}
        for I, c in self.comp.items():
            if isinstance(c, ex.ScalarExpr):
                v = jet_lift(c, names, point, order)
                comp[I] = v if order > 0 else v.value
            else:
                comp[I] = c
        return DifferentialForm(self.nvars, self.degree, comp)

    def values(self):
        """Component dict with jets collapsed to their point values."""
        return {
            I: (c.value if isinstance(c, Jet) else float(c))
            for I, c in self.comp.items()
        }

    def to_array(self):
        """Dense antisymmetric array of point values (numeric forms)."""
        shape = (self.nvars,) * self.degree
        T = np.zeros(shape)
        for I, c in self.values().items():
            for perm in permutations(range(self.degree)):
                sign = _perm_sign(perm)
                T[tuple(I[p] for p in perm)] = sign * c
        return T

    def norm(self):
        return max((abs(v) for v in self.values().values()), default=0.0)

    def __call__(self, *vectors):
        """Evaluate on coordinate vectors (numeric components)."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of vector arguments")
        vals = self.values()
        if self.degree == 0:
            return sum(vals.values())
        total = 0.0
        for I, c in vals.items():
            M = np.array([[vectors[j][i] for j in range(self.degree)] for i in I])
            total += c * np.linalg.det(M)
        return total


def _perm_sign(perm):
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


class VectorField:
    """Chart vector field with expression or numeric components."""

    __slots__ = ("nvars", "comp")

    def __init__(self, nvars, comp):
        self.nvars = nvars
        self.comp = tuple(comp)

    def at(self, names, point, order=0):
        out = []
        for c in self.comp:
            if isinstance(c, ex.ScalarExpr):
                v = jet_lift(c, names, point, order)
                out.append(v if order > 0 else v.value)
            else:
                out.append(c)
        return out

    def values(self):
        return np.array(
            [c.value if isinstance(c, Jet) else float(c) for c in self.comp]
        )


# -- core operations ------------------------------------------------------------


def wedge(a, b):
    """Exterior product; degree above the chart dimension gives zero."""
    a._check(b)
    deg = a.degree + b.degree
    out = DifferentialForm(a.nvars, deg)
    if deg > a.nvars:
        return out  # structurally zero
    for I, ci in a.comp.items():
        for J, cj in b.comp.items():
            K, sign = _merge_sign(I, J)
            if K is None:
                continue
            term = ci * cj if sign > 0 else ci * cj * -1.0
            if K in out.comp:
                out.comp[K] = out.comp[K] + term
            else:
                out.comp[K] = term
    return out


def wedge_all(*forms):
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def exterior_d_symbolic(a, names):
    """Exterior derivative of a form with expression components."""
    out = DifferentialForm(a.nvars, a.degree + 1)
    if a.degree + 1 > a.nvars:
        return out
    for I, c in a.comp.items():
        if not isinstance(c, ex.ScalarExpr):
            c = ex.const(c)
        for v, name in enumerate(names):
            dc = c.diff(name)
            if dc == ex.ZERO:
                continue
            K, sign = _merge_sign((v,), I)
            if K is None:
                continue
            term = dc if sign > 0 else ex.neg(dc)
            if K in out.comp:
                out.comp[K] = out.comp[K] + term
            else:
                out.comp[K] = term
    return out


def exterior_d_at(a, names, point, order=1):
    """Exterior derivative evaluated at a point.

    Symbolic components are jet-lifted; jet components must have order >= 1.
    Returns a numeric form when order == 1, a jet-component form otherwise.
    """
    out = DifferentialForm(a.nvars, a.degree + 1)
    if a.degree + 1 > a.nvars:
        return out
    for I, c in a.comp.items():
        if isinstance(c, ex.ScalarExpr):
            c = jet_lift(c, names, point, order)
        elif not isinstance(c, Jet):
            raise DomainError("cannot differentiate a plain-number component")
        for v in range(a.nvars):
            dc = c.partial(v)
            val = dc.value if dc.order == 0 else dc
            K, sign = _merge_sign((v,), I)
            if K is None:
                continue
            term = val if sign > 0 else -val if isinstance(val, float) else val * -1.0
            if K in out.comp:
                out.comp[K] = out.comp[K] + term
            else:
                out.comp[K] = term
    return out


def interior_product(v, a):
    """Contraction (i_v a)(X...) = a(v, X...) for a vector field/array ``v``."""
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    comps = v.comp if isinstance(v, VectorField) else tuple(v)
    out = DifferentialForm(a.nvars, a.degree - 1)
    for I, c in a.comp.items():
        for p, m in enumerate(I):
            J = I[:p] + I[p + 1 :]
            term = c * comps[m] if p % 2 == 0 else c * comps[m] * -1.0
            if J in out.comp:
                out.comp[J] = out.comp[J] + term
            else:
                out.comp[J] = term
    return out


def pullback_endomorphism(a, P):
    """(phi a)(X1, ..., Xk) = a(phi X1, ..., phi Xk) for a matrix ``P``.

    Numeric components only; ``P`` acts on tangent vectors.
    """
    if a.degree == 0:
        return a
    T = a.to_array()
    for _ in range(a.degree):
        # rotate slots while contracting each with P
        T = np.tensordot(T, P, axes=([0], [0]))
    out = DifferentialForm(a.nvars, a.degree)
    for I in combinations(range(a.nvars), a.degree):
        val = float(T[I])
        if val != 0.0:
            out.comp[I] = val
    return out


def phi_decompose(a, P, xi, eta):
    """Split a numeric form into phi-invariant / anti-invariant / null parts.

    Returns (plus, minus, null) with  a = plus + minus + null,
    phi(plus) = plus, phi(minus) = -minus, phi(null) = 0, where
    null = eta ^ (i_xi a).
    """
    eta_form = DifferentialForm(
        a.nvars, 1, {(i,): float(eta[i]) for i in range(a.nvars) if eta[i] != 0.0}
    )
    null = wedge(eta_form, interior_product(xi, a)) if a.degree >= 1 else a * 0.0
    phi_a = pullback_endomorphism(a, P)
    plus = (a + phi_a - null) * 0.5
    minus = (a - phi_a - null) * 0.5
    return plus, minus, null


def form_from_covector(cov, nvars=None):
    """1-form from a coefficient sequence (numbers or jets)."""
    cov = list(cov)
    n = nvars or len(cov)
    comp = {}
    for i, c in enumerate(cov):
        comp[(i,)] = c
    return DifferentialForm(n, 1, comp)
