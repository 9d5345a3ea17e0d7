"""Scalar expression trees: the function language for model parameters.

Node kinds: const, var, add, mul, neg, recip, pow (non-negative integer
exponent), exp, sin, cos.  The set is closed under formal partial
differentiation, and evaluation is generic over the scalar type (floats or
jets), so the same tree serves plain evaluation and jet lifting.

JSON encoding (bit-exact round trip for binary-representable rationals):

    {"op": "const", "value": 0.5}
    {"op": "var", "name": "x1"}
    {"op": "pow", "args": [child], "exp": 3}
    {"op": "add"|"mul"|"neg"|"recip"|"exp"|"sin"|"cos", "args": [children...]}
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ArityError, ConfigError, DomainError

_UNARY = {"neg", "recip", "exp", "sin", "cos"}
_NARY = {"add", "mul"}
KNOWN_VARS = ("t", "x1", "x2", "y1", "y2", "x", "y", "z")


def _coerce(v):
    if isinstance(v, ScalarExpr):
        return v
    if isinstance(v, (int, float, Fraction)):
        return const(v)
    raise TypeError(f"cannot use {type(v).__name__} as a scalar expression")


class ScalarExpr:
    __slots__ = ("op", "args", "name", "value", "exp")

    def __init__(self, op, args=(), name=None, value=None, exp=None):
        self.op = op
        self.args = tuple(args)
        self.name = name
        self.value = value
        self.exp = exp

    # -- construction sugar --------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, neg(_coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), neg(self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __truediv__(self, other):
        return mul(self, recip(_coerce(other)))

    def __rtruediv__(self, other):
        return mul(_coerce(other), recip(self))

    def __pow__(self, k):
        return pow_(self, k)

    def __eq__(self, other):
        return (
            isinstance(other, ScalarExpr)
            and self.op == other.op
            and self.name == other.name
            and self.value == other.value
            and self.exp == other.exp
            and self.args == other.args
        )

    def __hash__(self):
        return hash((self.op, self.name, self.value, self.exp, self.args))

    def __repr__(self):
        if self.op == "const":
            return f"{self.value!r}"
        if self.op == "var":
            return self.name
        if self.op == "pow":
            return f"pow({self.args[0]!r}, {self.exp})"
        inner = ", ".join(repr(a) for a in self.args)
        return f"{self.op}({inner})"

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, env):
        """Evaluate over any scalar type supporting arithmetic.

        ``env`` maps variable names to scalars (floats or jets).  Floats go
        through ``math`` for the analytic primitives; objects are expected to
        provide ``recip/exp/sin/cos`` methods (jets do).
        """
        op = self.op
        if op == "const":
            return self.value
        if op == "var":
            if self.name not in env:
                raise ArityError(f"unknown variable {self.name!r}")
            return env[self.name]
        if op == "add":
            total = self.args[0].evaluate(env)
            for a in self.args[1:]:
                total = total + a.evaluate(env)
            return total
        if op == "mul":
            total = self.args[0].evaluate(env)
            for a in self.args[1:]:
                total = total * a.evaluate(env)
            return total
        if op == "neg":
            return -self.args[0].evaluate(env)
        if op == "pow":
            base = self.args[0].evaluate(env)
            if isinstance(base, (int, float)):
                return base ** self.exp
            return base ** self.exp
        v = self.args[0].evaluate(env)
        if isinstance(v, (int, float)):
            if op == "recip":
                if v == 0:
                    raise DomainError("reciprocal of zero")
                return 1.0 / v
            return getattr(math, op)(v)
        return getattr(v, op)()

    # -- differentiation -----------------------------------------------------

    def diff(self, varname):
        op = self.op
        if op == "const":
            return ZERO
        if op == "var":
            return ONE if self.name == varname else ZERO
        if op == "add":
            return add(*[a.diff(varname) for a in self.args])
        if op == "mul":
            terms = []
            for i, a in enumerate(self.args):
                rest = list(self.args)
                rest[i] = a.diff(varname)
                terms.append(mul(*rest))
            return add(*terms)
        if op == "neg":
            return neg(self.args[0].diff(varname))
        if op == "pow":
            a = self.args[0]
            if self.exp == 0:
                return ZERO
            return mul(const(self.exp), pow_(a, self.exp - 1), a.diff(varname))
        a = self.args[0]
        da = a.diff(varname)
        if op == "recip":
            return neg(mul(da, pow_(recip(a), 2)))
        if op == "exp":
            return mul(exp(a), da)
        if op == "sin":
            return mul(cos(a), da)
        if op == "cos":
            return neg(mul(sin(a), da))
        raise ValueError(f"unknown node {op!r}")

    def variables(self):
        if self.op == "var":
            return {self.name}
        out = set()
        for a in self.args:
            out |= a.variables()
        return out

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        if self.op == "const":
            return {"op": "const", "value": self.value}
        if self.op == "var":
            return {"op": "var", "name": self.name}
        if self.op == "pow":
            return {"op": "pow", "args": [self.args[0].to_json()], "exp": self.exp}
        return {"op": self.op, "args": [a.to_json() for a in self.args]}


def from_json(data):
    if not isinstance(data, dict) or "op" not in data:
        raise ConfigError(f"not an expression node: {data!r}")
    op = data["op"]
    if op == "const":
        return const(data["value"])
    if op == "var":
        name = data.get("name")
        if name not in KNOWN_VARS:
            raise ConfigError(f"unknown chart variable {name!r}")
        return var(name)
    args = [from_json(a) for a in data.get("args", ())]
    if op == "pow":
        if len(args) != 1 or not isinstance(data.get("exp"), int) or data["exp"] < 0:
            raise ConfigError("pow takes one argument and a non-negative integer exp")
        return pow_(args[0], data["exp"])
    if op in _UNARY:
        if len(args) != 1:
            raise ConfigError(f"{op} takes exactly one argument")
        return ScalarExpr(op, args)
    if op in _NARY:
        if not args:
            raise ConfigError(f"{op} needs at least one argument")
        return ScalarExpr(op, args)
    raise ConfigError(f"unknown expression op {op!r}")


# -- constructors with light constant folding ---------------------------------


def const(v):
    if isinstance(v, Fraction):
        v = float(v)
    return ScalarExpr("const", value=float(v))


def var(name):
    return ScalarExpr("var", name=name)


def _is_const(e, v=None):
    return e.op == "const" and (v is None or e.value == v)


def add(*args):
    flat = []
    acc = 0.0
    for a in args:
        if a.op == "add":
            flat.extend(a.args)
        else:
            flat.append(a)
    terms = []
    for a in flat:
        if _is_const(a):
            acc += a.value
        else:
            terms.append(a)
    if acc != 0.0 or not terms:
        terms.append(const(acc))
    if len(terms) == 1:
        return terms[0]
    return ScalarExpr("add", terms)


def mul(*args):
    flat = []
    acc = 1.0
    for a in args:
        if a.op == "mul":
            flat.extend(a.args)
        else:
            flat.append(a)
    terms = []
    for a in flat:
        if _is_const(a):
            acc *= a.value
        else:
            terms.append(a)
    if acc == 0.0:
        return ZERO
    if acc != 1.0 or not terms:
        terms.insert(0, const(acc))
    if len(terms) == 1:
        return terms[0]
    return ScalarExpr("mul", terms)


def neg(a):
    if _is_const(a):
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    return ScalarExpr("neg", (a,))


def recip(a):
    if _is_const(a):
        if a.value == 0:
            raise DomainError("reciprocal of constant zero")
        return const(1.0 / a.value)
    return ScalarExpr("recip", (a,))


def pow_(a, k):
    if not isinstance(k, int) or k < 0:
        raise DomainError("pow exponent must be a non-negative integer")
    if k == 0:
        return ONE
    if k == 1:
        return a
    if _is_const(a):
        return const(a.value ** k)
    return ScalarExpr("pow", (a,), exp=k)


def exp(a):
    return ScalarExpr("exp", (_coerce(a),))


def sin(a):
    return ScalarExpr("sin", (_coerce(a),))


def cos(a):
    return ScalarExpr("cos", (_coerce(a),))


ZERO = ScalarExpr("const", value=0.0)
ONE = ScalarExpr("const", value=1.0)


# -- polynomial views ----------------------------------------------------------


def poly_in(e, varname):
    """Coefficients [c0, c1, ...] of ``e`` as a polynomial in ``varname``.

    Coefficients are expressions free of ``varname``.  Raises DomainError if
    the variable sits under a non-polynomial node.
    """
    if varname not in e.variables():
        return [e]
    op = e.op
    if op == "var":
        return [ZERO, ONE]
    if op == "add":
        cols = [poly_in(a, varname) for a in e.args]
        deg = max(len(c) for c in cols)
        out = []
        for k in range(deg):
            out.append(add(*[c[k] for c in cols if k < len(c)]))
        return out
    if op == "mul":
        acc = [ONE]
        for a in e.args:
            cur = poly_in(a, varname)
            nxt = [ZERO] * (len(acc) + len(cur) - 1)
            for i, ai in enumerate(acc):
                for j, cj in enumerate(cur):
                    nxt[i + j] = add(nxt[i + j], mul(ai, cj))
            acc = nxt
        return acc
    if op == "neg":
        return [neg(c) for c in poly_in(e.args[0], varname)]
    if op == "pow":
        acc = [ONE]
        base = poly_in(e.args[0], varname)
        for _ in range(e.exp):
            nxt = [ZERO] * (len(acc) + len(base) - 1)
            for i, ai in enumerate(acc):
                for j, cj in enumerate(base):
                    nxt[i + j] = add(nxt[i + j], mul(ai, cj))
            acc = nxt
        return acc
    raise DomainError(f"{varname} appears under non-polynomial node {op!r}")


def poly_dict(e, names):
    """Exact monomial map {exponent tuple: Fraction} of a polynomial tree.

    Constants must be binary-representable; non-polynomial nodes raise.
    """
    n = len(names)
    idx = {name: i for i, name in enumerate(names)}
    op = e.op
    if op == "const":
        d = {}
        f = Fraction(e.value)
        if f:
            d[(0,) * n] = f
        return d
    if op == "var":
        if e.name not in idx:
            raise ArityError(f"unknown variable {e.name!r}")
        key = tuple(1 if i == idx[e.name] else 0 for i in range(n))
        return {key: Fraction(1)}
    if op == "add":
        out = {}
        for a in e.args:
            for k, v in poly_dict(a, names).items():
                out[k] = out.get(k, Fraction(0)) + v
        return {k: v for k, v in out.items() if v}
    if op == "mul":
        acc = {(0,) * n: Fraction(1)}
        for a in e.args:
            cur = poly_dict(a, names)
            nxt = {}
            for ka, va in acc.items():
                for kb, vb in cur.items():
                    key = tuple(x + y for x, y in zip(ka, kb))
                    nxt[key] = nxt.get(key, Fraction(0)) + va * vb
            acc = {k: v for k, v in nxt.items() if v}
        return acc
    if op == "neg":
        return {k: -v for k, v in poly_dict(e.args[0], names).items()}
    if op == "pow":
        acc = {(0,) * n: Fraction(1)}
        base = poly_dict(e.args[0], names)
        for _ in range(e.exp):
            nxt = {}
            for ka, va in acc.items():
                for kb, vb in base.items():
                    key = tuple(x + y for x, y in zip(ka, kb))
                    nxt[key] = nxt.get(key, Fraction(0)) + va * vb
            acc = {k: v for k, v in nxt.items() if v}
        return acc
    raise DomainError(f"non-polynomial node {op!r}")


def poly_equal(a, b, names):
    """Exact equality of two polynomial expressions."""
    return poly_dict(a, names) == poly_dict(b, names)


def antiderivative(e, varname):
    """Antiderivative in ``varname`` with zero constant term (polynomials)."""
    coeffs = poly_in(e, varname)
    x = var(varname)
    terms = [mul(const(1.0 / (k + 1)), c, pow_(x, k + 1)) for k, c in enumerate(coeffs)]
    return add(*terms) if terms else ZERO
