"""Truncated multivariate Taylor arithmetic (jets).

A jet stores all Taylor coefficients (partial derivatives divided by the
factorial of the multi-index) of a scalar function at a point, up to a fixed
order <= 3.  Arithmetic is exact truncation, so for polynomial inputs of
degree <= order the coefficients are the analytic ones to machine precision.
Every curvature quantity in the workbench is obtained from jets of the metric
components; no symbolic or numeric differentiation happens anywhere else.

The inner product kernel is compiled (``pcgeom._jetcore``) when available and
falls back to a numpy implementation otherwise; set ``PCGEOM_PURE_PYTHON=1``
to force the fallback.
"""

from __future__ import annotations

import math
import os
from functools import lru_cache

import numpy as np

from .errors import ArityError, DomainError, JetMismatchError

if os.environ.get("PCGEOM_PURE_PYTHON"):
    from . import _jetcore_py as _kernel
else:
    try:
        from . import _jetcore as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _jetcore_py as _kernel

BACKEND = _kernel.BACKEND

MAX_ORDER = 3


def _multi_indices(nvars, order):
    """All exponent tuples of total degree <= order, graded lexicographic."""
    out = []
    for deg in range(order + 1):
        level = []

        def rec(prefix, remaining, slots):
            if slots == 1:
                level.append(prefix + (remaining,))
                return
            for e in range(remaining, -1, -1):
                rec(prefix + (e,), remaining - e, slots - 1)

        rec((), deg, nvars)
        out.extend(sorted(level, reverse=True))
    return out


class _Space:
    """Shared tables for jets with a given variable count and order."""

    def __init__(self, nvars, order):
        self.nvars = nvars
        self.order = order
        self.indices = _multi_indices(nvars, order)
        self.ncoeff = len(self.indices)
        self.pos = {alpha: i for i, alpha in enumerate(self.indices)}
        ti, tj, tk = [], [], []
        for i, a in enumerate(self.indices):
            for j, b in enumerate(self.indices):
                if sum(a) + sum(b) <= order:
                    ti.append(i)
                    tj.append(j)
                    tk.append(self.pos[tuple(x + y for x, y in zip(a, b))])
        self.table = (
            np.asarray(ti, dtype=np.int32),
            np.asarray(tj, dtype=np.int32),
            np.asarray(tk, dtype=np.int32),
        )
        # partial derivative: source index and scale factor per target slot
        if order > 0:
            lower = space(nvars, order - 1)
            self.deriv = []
            for v in range(nvars):
                src = np.empty(lower.ncoeff, dtype=np.intp)
                scl = np.empty(lower.ncoeff)
                for t, beta in enumerate(lower.indices):
                    up = tuple(b + (1 if k == v else 0) for k, b in enumerate(beta))
                    src[t] = self.pos[up]
                    scl[t] = beta[v] + 1
                self.deriv.append((src, scl))
            self.trunc_sel = np.asarray(
                [self.pos[a] for a in lower.indices], dtype=np.intp
            )


@lru_cache(maxsize=None)
def space(nvars, order):
    return _Space(nvars, order)


def _factorials(order):
    return [math.factorial(k) for k in range(order + 1)]


class Jet:
    """Immutable truncated Taylor expansion at a point."""

    __slots__ = ("nvars", "order", "center", "coeffs")

    def __init__(self, nvars, order, center, coeffs):
        self.nvars = nvars
        self.order = order
        self.center = tuple(center)
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, nvars, order, center, value):
        sp = space(nvars, order)
        c = np.zeros(sp.ncoeff)
        c[0] = value
        return cls(nvars, order, center, c)

    @classmethod
    def variable(cls, nvars, order, center, i):
        sp = space(nvars, order)
        c = np.zeros(sp.ncoeff)
        c[0] = center[i]
        if order >= 1:
            unit = tuple(1 if k == i else 0 for k in range(nvars))
            c[sp.pos[unit]] = 1.0
        return cls(nvars, order, center, c)

    # -- basic queries -----------------------------------------------------

    @property
    def value(self):
        return float(self.coeffs[0])

    def coefficient(self, alpha):
        """Taylor coefficient for the multi-index ``alpha`` (= d^a f / a!)."""
        return float(self.coeffs[space(self.nvars, self.order).pos[tuple(alpha)]])

    def derivative(self, alpha):
        """Partial derivative value d^alpha f at the center."""
        scale = 1
        for e in alpha:
            scale *= math.factorial(e)
        return self.coefficient(alpha) * scale

    def gradient(self):
        return np.array(
            [
                self.coefficient(tuple(1 if k == i else 0 for k in range(self.nvars)))
                for i in range(self.nvars)
            ]
        )

    def __repr__(self):
        return f"Jet(n={self.nvars}, order={self.order}, value={self.value:.6g})"

    # -- helpers -----------------------------------------------------------

    def _check(self, other):
        if (
            self.nvars != other.nvars
            or self.order != other.order
            or self.center != other.center
        ):
            raise JetMismatchError(
                f"incompatible jets: ({self.nvars},{self.order},{self.center}) "
                f"vs ({other.nvars},{other.order},{other.center})"
            )

    def _wrap(self, coeffs):
        return Jet(self.nvars, self.order, self.center, coeffs)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return self._wrap(self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += other
        return self._wrap(c)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return self._wrap(self.coeffs - other.coeffs)
        c = self.coeffs.copy()
        c[0] -= other
        return self._wrap(c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            sp = space(self.nvars, self.order)
            out = np.zeros(sp.ncoeff)
            _kernel.mul_into(self.coeffs, other.coeffs, out, *sp.table)
            return self._wrap(out)
        return self._wrap(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.recip()
        return self._wrap(self.coeffs / other)

    def __rtruediv__(self, other):
        return self.recip() * other

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("jet powers take a non-negative integer exponent")
        result = Jet.constant(self.nvars, self.order, self.center, 1.0)
        for _ in range(k):
            result = result * self
        return result

    # -- truncation and derivatives ----------------------------------------

    def truncate(self, order):
        if order == self.order:
            return self
        if order > self.order:
            raise JetMismatchError("cannot raise the order of a jet")
        cur = self
        while cur.order > order:
            spc = space(cur.nvars, cur.order)
            cur = Jet(cur.nvars, cur.order - 1, cur.center, cur.coeffs[spc.trunc_sel])
        return cur

    def partial(self, v):
        """d/dx_v as a jet of one lower order."""
        if self.order == 0:
            raise JetMismatchError("order-0 jet holds no derivative data")
        sp = space(self.nvars, self.order)
        src, scl = sp.deriv[v]
        return Jet(self.nvars, self.order - 1, self.center, self.coeffs[src] * scl)

    # -- analytic primitives -------------------------------------------------

    def _compose(self, ders):
        """Truncated composition with a scalar function given by its
        derivatives [f(c), f'(c), f''(c), ...] at c = self.value."""
        u = self.coeffs.copy()
        u[0] = 0.0  # nilpotent part
        u = self._wrap(u)
        fact = _factorials(self.order)
        result = Jet.constant(self.nvars, self.order, self.center, ders[0])
        upow = Jet.constant(self.nvars, self.order, self.center, 1.0)
        for k in range(1, self.order + 1):
            upow = upow * u
            result = result + upow * (ders[k] / fact[k])
        return result

    def recip(self):
        c = self.value
        if c == 0.0:
            raise DomainError("reciprocal of a jet with zero value")
        return self._compose(
            [(-1.0) ** k * math.factorial(k) / c ** (k + 1) for k in range(self.order + 1)]
        )

    def exp(self):
        e = math.exp(self.value)
        return self._compose([e] * (self.order + 1))

    def sin(self):
        c = self.value
        cyc = [math.sin(c), math.cos(c), -math.sin(c), -math.cos(c)]
        return self._compose([cyc[k % 4] for k in range(self.order + 1)])

    def cos(self):
        c = self.value
        cyc = [math.cos(c), -math.sin(c), -math.cos(c), math.sin(c)]
        return self._compose([cyc[k % 4] for k in range(self.order + 1)])

    def sqrt(self):
        c = self.value
        if c <= 0.0:
            raise DomainError("sqrt of a jet with non-positive value")
        r = math.sqrt(c)
        ders = [r]
        coef = 0.5
        for k in range(1, self.order + 1):
            r = r / c
            ders.append(coef * r)
            coef *= 0.5 - k
        return self._compose(ders)


def jet_arith(a, b, op):
    """Named binary operations, mirroring the jet contract.

    ``op`` is one of add, sub, mul, div; ``compose-<prim>`` applies an
    analytic primitive of ``a`` (``b`` ignored).
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op.startswith("compose-"):
        return getattr(a, op.split("-", 1)[1])()
    raise ValueError(f"unknown jet operation {op!r}")


def variables(names, point, order):
    """Jets of the chart coordinate functions at ``point``."""
    n = len(names)
    if len(point) != n:
        raise ArityError(f"point has {len(point)} coordinates, chart has {n}")
    return {
        name: Jet.variable(n, order, point, i) for i, name in enumerate(names)
    }


def jet_lift(expr, names, point, order):
    """Jet of a scalar expression at ``point`` on the chart ``names``."""
    if order < 0 or order > MAX_ORDER:
        raise DomainError(f"jet order must lie in 0..{MAX_ORDER}")
    env = variables(names, point, order)
    value = expr.evaluate(env) if hasattr(expr, "evaluate") else expr
    if isinstance(value, Jet):
        return value
    return Jet.constant(len(names), order, point, float(value))
