"""Left-invariant structures: exact structure-constant algebra.

Five-dimensional Lie algebras carrying an invariant adopted frame
(xi, V1..V4) with the metric pattern g(xi,xi) = g(V1,V3) = g(V2,V4) = 1 and
phi = diag(0, -1, +1, +1, -1).  Four parameter families (A), (B), (C1), (C2)
solve the integrability constraints of the invariant connection form

    omega = a0 g0 + a3 g1 + a4 g2 + b1 g3 + b2 g4   (g^i the Kronecker-dual
    coframe), subject to
        a0 (a1 + a4) = -a3,    a0 (a2 - a3) = -sigma a4,
        a3 (a2 - a3) = 0,      a4 (a1 + a4) = 0,      a3 a4 = 0.

All arithmetic in this module is exact (fractions.Fraction): Jacobi,
Chevalley-Eilenberg consistency, the Koszul connection and its curvature.
Floating point appears only when Killing candidates are checked against a
chart model through the jet oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import expr as ex
from .errors import ConfigError, ConstraintError, DomainError
from .forms import VectorField
from .riemann import (
    lie_derivative_covector,
    lie_derivative_endo,
    lie_derivative_metric,
    values,
)

F = Fraction

PHI_DIAG = (F(0), F(-1), F(1), F(1), F(-1))

METRIC = [[F(0)] * 5 for _ in range(5)]
METRIC[0][0] = F(1)
METRIC[1][3] = METRIC[3][1] = F(1)
METRIC[2][4] = METRIC[4][2] = F(1)
# the pattern is its own inverse
METRIC_INV = METRIC


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return F(x)
    if isinstance(x, float):
        return F(x)  # exact: every float is a dyadic rational
    raise ConfigError(f"not an exact rational: {x!r}")


@dataclass
class FamilyParams:
    """Constants of the invariant connection data."""

    alpha1: Fraction = F(0)
    alpha2: Fraction = F(0)
    beta1: Fraction = F(0)
    beta2: Fraction = F(0)
    alpha0: Fraction = F(0)
    alpha3: Fraction = F(0)
    alpha4: Fraction = F(0)
    sigma: int = 1

    def __post_init__(self):
        for name in ("alpha0", "alpha1", "alpha2", "alpha3", "alpha4",
                     "beta1", "beta2"):
            setattr(self, name, _frac(getattr(self, name)))


@dataclass
class LieAlgebra5:
    """Structure constants [V_i, V_j] = sum_k c[k][i][j] V_k (exact)."""

    c: list  # c[k][i][j] Fractions, antisymmetric in (i, j)
    sigma: int = 1
    family: str = "custom"
    params: FamilyParams = None
    meta: dict = field(default_factory=dict)

    def bracket(self, i, j):
        return [self.c[k][i][j] for k in range(5)]

    def bracket_vec(self, x, y):
        """Bracket of coefficient vectors (exact)."""
        out = [F(0)] * 5
        for i in range(5):
            if not x[i]:
                continue
            for j in range(5):
                if not y[j]:
                    continue
                for k in range(5):
                    out[k] += x[i] * y[j] * self.c[k][i][j]
        return out

    def to_json(self):
        entries = []
        for k in range(5):
            for i in range(5):
                for j in range(i + 1, 5):
                    v = self.c[k][i][j]
                    if v:
                        entries.append(
                            {"i": i, "j": j, "k": k, "value": str(v)}
                        )
        return {"c": entries, "sigma": self.sigma}


def algebra_from_json(data):
    if not isinstance(data, dict) or "c" not in data:
        raise ConfigError("structure-constant JSON needs a 'c' list")
    c = _zero_c()
    for e in data["c"]:
        i, j, k = int(e["i"]), int(e["j"]), int(e["k"])
        v = _frac(e["value"])
        c[k][i][j] = v
        c[k][j][i] = -v
    return LieAlgebra5(c=c, sigma=int(data.get("sigma", 1)))


def _zero_c():
    return [[[F(0)] * 5 for _ in range(5)] for _ in range(5)]


def _set(c, i, j, coeffs):
    """[V_i, V_j] = coeffs (dict k -> value)."""
    for k, v in coeffs.items():
        c[k][i][j] = v
        c[k][j][i] = -v


def jacobi_residual(alg):
    """Exact max |[[X,[Y,Z]] + cyc| over basis triples (zero iff Lie)."""
    worst = F(0)
    basis = [[F(1) if m == a else F(0) for m in range(5)] for a in range(5)]
    for i in range(5):
        for j in range(i + 1, 5):
            for k in range(j + 1, 5):
                s = [F(0)] * 5
                for (a, b, cc) in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = alg.bracket(b, cc)
                    outer = alg.bracket_vec(basis[a], inner)
                    s = [x + y for x, y in zip(s, outer)]
                worst = max(worst, max(abs(x) for x in s))
    return worst


# -- families -------------------------------------------------------------------


def derive_params(family, alpha1=0, alpha2=0, beta1=0, beta2=0, alpha0=0,
                  sigma=1):
    """Fill in the dependent constants of the connection form per family."""
    a1, a2 = _frac(alpha1), _frac(alpha2)
    b1, b2 = _frac(beta1), _frac(beta2)
    a0 = _frac(alpha0)
    if family == "A":
        if a2 == 0:
            raise ConstraintError("family (A) requires alpha2 != 0")
        return FamilyParams(alpha1=a1, alpha2=a2, beta1=b1, beta2=b2,
                            alpha0=sigma * a1 / a2, alpha3=F(0), alpha4=-a1,
                            sigma=sigma)
    if family == "B":
        if a1 == 0:
            raise ConstraintError("family (B) requires alpha1 != 0")
        return FamilyParams(alpha1=a1, alpha2=a2, beta1=b1, beta2=b2,
                            alpha0=-a2 / a1, alpha3=a2, alpha4=F(0),
                            sigma=sigma)
    if family == "C1":
        if a0 == 0:
            raise ConstraintError("family (C1) requires alpha0 != 0")
        if a1 != 0 or a2 != 0:
            raise ConstraintError("family (C1) forces alpha1 = alpha2 = 0")
        return FamilyParams(alpha1=F(0), alpha2=F(0), beta1=b1, beta2=b2,
                            alpha0=a0, alpha3=F(0), alpha4=F(0), sigma=sigma)
    if family == "C2":
        return FamilyParams(alpha1=a1, alpha2=a2, beta1=b1, beta2=b2,
                            alpha0=F(0), alpha3=F(0), alpha4=F(0), sigma=sigma)
    raise ConfigError(f"unknown family {family!r}")


def constraint_residuals(p):
    """The five exact integrability relations (all must vanish)."""
    s = F(p.sigma)
    return {
        "a0(a1+a4)+a3": p.alpha0 * (p.alpha1 + p.alpha4) + p.alpha3,
        "a0(a2-a3)+sigma*a4": p.alpha0 * (p.alpha2 - p.alpha3) + s * p.alpha4,
        "a3(a2-a3)": p.alpha3 * (p.alpha2 - p.alpha3),
        "a4(a1+a4)": p.alpha4 * (p.alpha1 + p.alpha4),
        "a3*a4": p.alpha3 * p.alpha4,
    }


def check_constraints(p):
    """Branch classification of exact parameters, or 'none'."""
    res = constraint_residuals(p)
    if any(res.values()):
        return "none", res
    if p.alpha3 == 0 and p.alpha4 != 0:
        return "A", res
    if p.alpha3 != 0 and p.alpha4 == 0:
        return "B", res
    if p.alpha3 == 0 and p.alpha4 == 0 and p.alpha0 != 0:
        return "C1", res
    if p.alpha0 == 0 and p.alpha3 == 0 and p.alpha4 == 0:
        return "C2", res
    return "none", res


def family_algebra(family, params=None, **kwargs):
    """Structure constants of one of the four families (exact)."""
    p = params or derive_params(family, **kwargs)
    s = F(p.sigma)
    a1, a2, b1, b2 = p.alpha1, p.alpha2, p.beta1, p.beta2
    c = _zero_c()
    if family == "A":
        q = s * a1 / a2
        _set(c, 0, 3, {1: F(1), 2: q})
        _set(c, 1, 3, {1: -a1})
        _set(c, 2, 3, {2: -a1})
        _set(c, 0, 4, {1: -q, 2: s})
        _set(c, 2, 4, {1: a1, 2: -a2})
        _set(c, 3, 4, {1: -b1, 2: -b2})
    elif family == "B":
        q = a2 / a1
        _set(c, 0, 3, {1: F(1), 2: -q})
        _set(c, 1, 3, {1: -a1, 2: a2})
        _set(c, 3, 4, {1: -b1, 2: -b2})
        _set(c, 0, 4, {1: q, 2: s})
        _set(c, 1, 4, {1: -a2})
        _set(c, 2, 4, {2: -a2})
    elif family == "C1":
        _set(c, 0, 3, {1: F(1), 2: p.alpha0})
        _set(c, 0, 4, {1: -p.alpha0, 2: s})
        _set(c, 3, 4, {1: -b1, 2: -b2})
    elif family == "C2":
        _set(c, 0, 3, {1: F(1)})
        _set(c, 1, 3, {1: -a1})
        _set(c, 0, 4, {2: s})
        _set(c, 2, 4, {2: -a2})
        _set(c, 3, 4, {1: -b1, 2: -b2})
    else:
        raise ConfigError(f"unknown family {family!r}")
    alg = LieAlgebra5(c=c, sigma=p.sigma, family=family, params=p,
                      meta={"paper_label": {"A": "g1", "B": "g2",
                                            "C1": "g4", "C2": "g3"}[family]})
    bad = jacobi_residual(alg)
    if bad:
        raise ConstraintError(
            f"family {family} table violates the Jacobi identity ({bad});"
            " transcription error"
        )
    return alg


def dual_structure_residuals(alg, p):
    """Chevalley-Eilenberg check of the invariant structure equations.

    With the Kronecker-dual coframe g^k the differentials must satisfy
    d g^0 = d g^3 = d g^4 = 0,
    d g^1 = g^3 ^ g^0 - a1 g^3 ^ g^1 + omega ^ g^4,
    d g^2 = sigma g^4 ^ g^0 - a2 g^4 ^ g^2 - omega ^ g^3,
    where d g^k(X, Y) = -g^k([X, Y]).
    """
    s = F(p.sigma)
    w = [p.alpha0, p.alpha3, p.alpha4, p.beta1, p.beta2]  # omega components

    def wedge(u, v, i, j):
        return u[i] * v[j] - u[j] * v[i]

    g = [[F(1) if m == a else F(0) for m in range(5)] for a in range(5)]
    worst = F(0)
    for i in range(5):
        for j in range(i + 1, 5):
            lhs = [-alg.c[k][i][j] for k in range(5)]  # d g^k (V_i, V_j)
            rhs = [F(0)] * 5
            rhs[1] = (
                wedge(g[3], g[0], i, j)
                - p.alpha1 * wedge(g[3], g[1], i, j)
                + wedge(w, g[4], i, j)
            )
            rhs[2] = (
                s * wedge(g[4], g[0], i, j)
                - p.alpha2 * wedge(g[4], g[2], i, j)
                - wedge(w, g[3], i, j)
            )
            for k in range(5):
                worst = max(worst, abs(lhs[k] - rhs[k]))
    return worst


def classify_algebra(alg):
    """Theorem-9 style decision: recover connection constants from a custom
    structure-constant table in an adopted basis and classify the branch.

    Returns (branch, FamilyParams); raises ConstraintError when the table
    does not fit the invariant structure equations for any omega.
    """
    c = alg.c
    for k in (0, 3, 4):
        for i in range(5):
            for j in range(5):
                if c[k][i][j]:
                    raise ConstraintError(
                        f"c^{k}_{{{i}{j}}} != 0: the closed part of the "
                        "coframe is not closed"
                    )
    sigma = c[2][0][4]
    if sigma not in (F(1), F(-1)):
        raise ConstraintError(f"c^2_04 = {sigma} must be +-1 (it is sigma)")
    if c[1][0][3] != 1:
        raise ConstraintError(f"c^1_03 = {c[1][0][3]} must equal 1")
    pairs = {
        "alpha0": (-c[1][0][4], c[2][0][3]),
        "alpha3": (-c[1][1][4], c[2][1][3]),
        "alpha4": (-c[1][2][4], c[2][2][3]),
    }
    vals = {}
    for name, (u, v) in pairs.items():
        if u != v:
            raise ConstraintError(
                f"{name} is overdetermined inconsistently ({u} vs {v})"
            )
        vals[name] = u
    must_vanish = [
        c[1][0][1], c[1][0][2], c[1][1][2], c[1][2][3],
        c[2][0][1], c[2][0][2], c[2][1][2], c[2][1][4],
    ]
    if any(must_vanish):
        raise ConstraintError("bracket table has entries outside the "
                              "invariant structure-equation pattern")
    p = FamilyParams(
        alpha1=-c[1][1][3],
        alpha2=-c[2][2][4],
        beta1=-c[1][3][4],
        beta2=-c[2][3][4],
        alpha0=vals["alpha0"],
        alpha3=vals["alpha3"],
        alpha4=vals["alpha4"],
        sigma=int(sigma),
    )
    if dual_structure_residuals(alg, p):
        raise ConstraintError("structure equations fail for the recovered "
                              "connection constants")
    branch, res = check_constraints(p)
    if branch == "none":
        raise ConstraintError(
            f"connection constants violate the integrability relations: {res}"
        )
    return branch, p


# -- Koszul connection and curvature (exact) ---------------------------------------


def koszul_connection(alg):
    """Gamma[i][j][k]: nabla_{V_i} V_j = sum_k Gamma[i][j][k] V_k (exact)."""
    G = METRIC
    Gi = METRIC_INV
    gam = [[[F(0)] * 5 for _ in range(5)] for _ in range(5)]
    for i in range(5):
        xi = [F(1) if m == i else F(0) for m in range(5)]
        for j in range(5):
            xj = [F(1) if m == j else F(0) for m in range(5)]
            rhs = [F(0)] * 5
            bij = alg.bracket(i, j)
            for k in range(5):
                xk = [F(1) if m == k else F(0) for m in range(5)]
                bjk = alg.bracket(j, k)
                bki = alg.bracket(k, i)
                term = (
                    _g(bij, xk) - _g(bjk, xi) + _g(bki, xj)
                )
                rhs[k] = term / 2
            for k in range(5):
                gam[i][j][k] = sum(Gi[k][m] * rhs[m] for m in range(5))
    return gam


def _g(x, y):
    return sum(
        METRIC[a][b] * x[a] * y[b] for a in range(5) for b in range(5)
    )


def koszul_curvature(alg, gam=None):
    """R[i][j][k][l]: R(V_i, V_j) V_k = sum_l R[i][j][k][l] V_l (exact)."""
    gam = gam or koszul_connection(alg)
    R = [[[[F(0)] * 5 for _ in range(5)] for _ in range(5)] for _ in range(5)]
    for i in range(5):
        for j in range(5):
            for k in range(5):
                for l in range(5):
                    s = F(0)
                    for m in range(5):
                        s += gam[j][k][m] * gam[i][m][l]
                        s -= gam[i][k][m] * gam[j][m][l]
                        s -= alg.c[m][i][j] * gam[m][k][l]
                    R[i][j][k][l] = s
    return R


def koszul_checks(alg):
    """Exact structural checks of the invariant connection and curvature."""
    gam = koszul_connection(alg)
    R = koszul_curvature(alg, gam)
    s = F(alg.sigma)
    out = {}
    # nabla xi = -A: nabla_{V_i} xi = -g(V_i,V1) V1 - sigma g(V_i,V2) V2
    worst = F(0)
    for i in range(5):
        expected = [F(0)] * 5
        expected[1] = -METRIC[i][1]
        expected[2] = -s * METRIC[i][2]
        for k in range(5):
            worst = max(worst, abs(gam[i][0][k] - expected[k]))
    out["nabla-xi-is-minus-A"] = worst
    # recurrence of V1 and V2: nabla_{V_i} V1 = alpha1 * delta_{i,3} V1 etc.
    p = alg.params
    worst = F(0)
    if p is not None:
        for i in range(5):
            e1 = [F(0)] * 5
            e1[1] = p.alpha1 if i == 3 else F(0)
            e2 = [F(0)] * 5
            e2[2] = p.alpha2 if i == 4 else F(0)
            for k in range(5):
                worst = max(worst, abs(gam[i][1][k] - e1[k]))
                worst = max(worst, abs(gam[i][2][k] - e2[k]))
        out["recurrent-V1-V2"] = worst
    # curvature kills xi, commutes with phi, has the pair symmetries
    worst = F(0)
    for i in range(5):
        for j in range(5):
            for l in range(5):
                worst = max(worst, abs(R[i][j][0][l]))
    out["R-kills-xi"] = worst
    worst = F(0)
    for i in range(5):
        for j in range(5):
            for k in range(5):
                for l in range(5):
                    worst = max(
                        worst, abs((PHI_DIAG[l] - PHI_DIAG[k]) * R[i][j][k][l])
                    )
    out["phi-R-commute"] = worst
    # lowered tensor and its symmetries
    RL = [[[[sum(R[i][j][k][m] * METRIC[m][l] for m in range(5))
             for l in range(5)] for k in range(5)] for j in range(5)]
          for i in range(5)]
    worst = F(0)
    for i in range(5):
        for j in range(5):
            for k in range(5):
                for l in range(5):
                    worst = max(worst, abs(RL[i][j][k][l] + RL[j][i][k][l]))
                    worst = max(worst, abs(RL[i][j][k][l] + RL[i][j][l][k]))
                    worst = max(worst, abs(RL[i][j][k][l] - RL[k][l][i][j]))
                    bianchi = (
                        RL[i][j][k][l] + RL[j][k][i][l] + RL[k][i][j][l]
                    )
                    worst = max(worst, abs(bianchi))
    out["riemann-symmetries"] = worst
    return out, gam, R


def invariant_frame_coeffs(alg):
    """The connection-form expansion coefficients of an invariant structure.

    Left-invariance forces d tau1 = d tau2 = 0 exactly (tau_i are constant
    multiples of closed coframe elements), so a1 = a2 = b1 = b2 = 0 and only
    gamma = D omega(V3, V4) survives.  Returns (coeffs dict, residual) where
    the residual collects all other D omega components.
    """
    p = alg.params
    if p is None:
        raise DomainError("connection coefficients need family parameters")
    w = [p.alpha0, p.alpha3, p.alpha4, p.beta1, p.beta2]
    t1 = [F(0), F(0), F(0), p.alpha1, F(0)]  # tau1 = alpha1 g^3
    t2 = [F(0), F(0), F(0), F(0), p.alpha2]
    tsum = [a + b for a, b in zip(t1, t2)]
    Dw = [[F(0)] * 5 for _ in range(5)]
    for i in range(5):
        for j in range(5):
            dw = -sum(w[k] * alg.c[k][i][j] for k in range(5))
            Dw[i][j] = dw - (w[i] * tsum[j] - w[j] * tsum[i])
    gamma = Dw[3][4]  # theta^1 ^ theta^2 = g^3 ^ g^4 component
    residual = F(0)
    for i in range(5):
        for j in range(5):
            if (i, j) not in ((3, 4), (4, 3)):
                residual = max(residual, abs(Dw[i][j]))
    coeffs = {"a1": F(0), "a2": F(0), "b1": F(0), "b2": F(0), "gamma": gamma,
              "sigma": alg.sigma}
    return coeffs, residual


def ricci_exact(alg, R=None):
    """Exact Ricci matrix Ric_ij = Tr{Z -> R(Z, V_i) V_j} and scalar."""
    R = R or koszul_curvature(alg)
    ric = [[F(0)] * 5 for _ in range(5)]
    for i in range(5):
        for j in range(5):
            ric[i][j] = sum(R[m][i][j][m] for m in range(5))
    r = sum(
        METRIC_INV[a][b] * ric[a][b] for a in range(5) for b in range(5)
    )
    return ric, r


def is_flat(alg):
    R = koszul_curvature(alg)
    return all(
        not R[i][j][k][l]
        for i in range(5) for j in range(5) for k in range(5) for l in range(5)
    )


def lower_central_series(brackets, dim):
    """Dimensions of the lower central series of an abstract bracket table.

    ``brackets[(i, j)]`` maps to coefficient vectors; returns the list of
    subalgebra dimensions g = g^0 > g^1 = [g, g] > g^2 = [g, g^1] > ...
    """
    from fractions import Fraction as Fr

    def rank(vectors):
        if not vectors:
            return 0, []
        M = [list(map(Fr, v)) for v in vectors]
        rows = []
        for v in M:
            v = v[:]
            for r in rows:
                piv = next(i for i, x in enumerate(r) if x)
                if v[piv]:
                    f = v[piv] / r[piv]
                    v = [a - f * b for a, b in zip(v, r)]
            if any(v):
                rows.append(v)
        return len(rows), rows

    basis = [[Fr(1) if m == a else Fr(0) for m in range(dim)]
             for a in range(dim)]
    current = basis
    dims = [dim]
    while True:
        new = []
        for x in basis:
            for y in current:
                z = _abstract_bracket(brackets, x, y, dim)
                if any(z):
                    new.append(z)
        r, rows = rank(new)
        dims.append(r)
        if r == 0 or r == dims[-2]:
            break
        current = rows
    return dims


def _abstract_bracket(brackets, x, y, dim):
    out = [F(0)] * dim
    for i in range(dim):
        if not x[i]:
            continue
        for j in range(dim):
            if not y[j]:
                continue
            key = (i, j) if i < j else (j, i)
            sgn = 1 if i < j else -1
            if i == j:
                continue
            vec = brackets.get(key)
            if vec:
                for k in range(dim):
                    out[k] += sgn * x[i] * y[j] * vec[k]
    return out


def nilpotency_step(brackets, dim):
    """Length of the lower central series (None when not nilpotent)."""
    dims = lower_central_series(brackets, dim)
    if dims[-1] != 0:
        return None
    return len(dims) - 1


# -- Killing fields and isotropy -----------------------------------------------------


def killing_residuals(model, K, points, order=2):
    """max |L_K g|, |L_K phi|, |L_K eta| over sample points.

    ``K`` is a VectorField (symbolic components) or a callable
    point -> list of jets.
    """
    worst = {"lie-g": 0.0, "lie-phi": 0.0, "lie-eta": 0.0}
    for pt in points:
        if isinstance(K, VectorField):
            Kj = K.at(model.names, pt, order)
        else:
            Kj = K(pt, order)
        Kj = np.asarray(Kj, dtype=object)
        g = np.asarray(model.metric_jets(pt, order), dtype=object)
        phi = np.asarray(model.phi_jets(pt, order), dtype=object)
        eta = np.asarray(model.eta_jets(pt, order), dtype=object)
        worst["lie-g"] = max(
            worst["lie-g"], np.abs(values(lie_derivative_metric(g, Kj))).max()
        )
        worst["lie-phi"] = max(
            worst["lie-phi"], np.abs(values(lie_derivative_endo(phi, Kj))).max()
        )
        worst["lie-eta"] = max(
            worst["lie-eta"],
            np.abs(values(lie_derivative_covector(eta, Kj))).max(),
        )
    return worst


def _gauss_legendre(fn, a, b, n=24):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.sum(w * np.asarray([fn(mid + half * t) for t in x])))


class IsotropyGenerator:
    """The normalized infinitesimal automorphism of a flat chart model
    vanishing at the origin: K = k1 d_y1 + k2 d_y2 with

        k1 =  exp(-A1(x1)) * int_0^{x2} exp(-A2(s)) ds,
        k2 = -exp(-A2(x2)) * int_0^{x1} exp(-A1(s)) ds,

    A_i' = alpha_i, A_i(0) = 0.  For constant alpha the integrals close in
    the expression language; otherwise values come from quadrature, with the
    error estimated by comparing two quadrature orders, and the jet
    derivatives come from the defining one-dimensional relations.
    """

    def __init__(self, model):
        if model.family != "flat":
            raise DomainError("isotropy generator is defined for flat models")
        self.model = model
        self.alpha1 = model.params["alpha1"]
        self.alpha2 = model.params["alpha2"]
        self.closed_form = not (self.alpha1.variables()
                                | self.alpha2.variables())
        self.quadrature_error = 0.0
        if self.closed_form:
            self.expr = self._closed_expr()

    def _closed_expr(self):
        a1 = self.alpha1.evaluate({})
        a2 = self.alpha2.evaluate({})
        x1, x2 = ex.var("x1"), ex.var("x2")

        def primitive(a, x):
            # int_0^x exp(-a s) ds
            if a == 0:
                return x
            return ex.const(1.0 / a) * (ex.const(1.0) - ex.exp(ex.const(-a) * x))

        k1 = ex.exp(ex.const(-a1) * x1) * primitive(a2, x2)
        k2 = ex.neg(ex.exp(ex.const(-a2) * x2) * primitive(a1, x1))
        return VectorField(5, (ex.ZERO, ex.ZERO, ex.ZERO, k1, k2))

    def components(self, point, order=2):
        """Jets of the generator at a point."""
        from .jets import Jet

        if self.closed_form:
            return self.expr.at(self.model.names, point, order)
        t, x1, x2, y1, y2 = point
        A1j = self._primitive_jet(self.alpha1, "x1", x1, point, order)
        A2j = self._primitive_jet(self.alpha2, "x2", x2, point, order)
        I2 = self._exp_primitive_jet(self.alpha2, "x2", x2, point, order)
        I1 = self._exp_primitive_jet(self.alpha1, "x1", x1, point, order)
        k1 = (A1j * -1.0).exp() * I2
        k2 = (A2j * -1.0).exp() * I1 * -1.0
        zero = Jet.constant(5, order, point, 0.0)
        return [zero, zero, zero, k1, k2]

    def _quad(self, fn, b):
        lo = _gauss_legendre(fn, 0.0, b, 24)
        hi = _gauss_legendre(fn, 0.0, b, 48)
        self.quadrature_error = max(self.quadrature_error, abs(hi - lo))
        return hi

    def _primitive_jet(self, alpha, name, x, point, order):
        """Jet of A(x) = int_0^x alpha, with derivatives from alpha."""
        from .jets import Jet, jet_lift

        val = self._quad(lambda s: alpha.evaluate({name: s}), x)
        aj = jet_lift(alpha, self.model.names, point, max(order - 1, 0))
        return _univariate_jet(val, aj, self.model.names.index(name), point,
                               order)

    def _exp_primitive_jet(self, alpha, name, x, point, order):
        """Jet of I(x) = int_0^x exp(-A(s)) ds."""
        from .jets import jet_lift

        def integrand(s):
            inner = self._quad(lambda u: alpha.evaluate({name: u}), s)
            return float(np.exp(-inner))

        val = _gauss_legendre(integrand, 0.0, x, 24)
        val_hi = _gauss_legendre(integrand, 0.0, x, 32)
        self.quadrature_error = max(self.quadrature_error, abs(val_hi - val))
        Aj = self._primitive_jet(alpha, name, x, point, order)
        dI = (Aj * -1.0).exp()  # I'(x) = exp(-A(x))
        aj = jet_lift(alpha, self.model.names, point, max(order - 1, 0))
        return _univariate_from_derivative(val_hi, dI,
                                           self.model.names.index(name),
                                           point, order)


def _univariate_jet(value, deriv_jet, axis, point, order):
    """Jet of F with F(point) = value and dF/dx_axis given by ``deriv_jet``
    (a jet of order >= order-1); F depends on x_axis only."""
    from .jets import Jet, space

    sp = space(5, order)
    coeffs = np.zeros(sp.ncoeff)
    coeffs[0] = value
    for k in range(1, order + 1):
        alpha = tuple(k if m == axis else 0 for m in range(5))
        # Taylor coefficient of F at degree k = (d^{k-1} F')/(k-1)! / k
        beta = tuple(k - 1 if m == axis else 0 for m in range(5))
        coeffs[sp.pos[alpha]] = deriv_jet.coefficient(beta) / k
    return Jet(5, order, point, coeffs)


def _univariate_from_derivative(value, deriv_jet, axis, point, order):
    return _univariate_jet(value, deriv_jet, axis, point, order)


# -- the six-dimensional isotropy algebra of the transitive flat example -------------


def isotropy_algebra_s():
    """The six affine infinitesimal automorphisms of the flat transitive
    example, in its normal-flat coordinates (x1..x5), with their exact
    bracket table and nilpotency data.

    Returns dict with 'fields' (expression VectorFields), 'brackets'
    (exact coefficient table over the K basis), 'series' (lower central
    series dimensions) and 'fields_chart' (the same fields pushed to the
    model chart (z, u1, u2, v1, v2))."""
    Z = ex.ZERO
    O = ex.ONE
    # components over the normal-flat coordinates (x1, ..., x5), which carry
    # g = dx1^2 + 2 dx2 dx4 + 2 dx3 dx5; the chart slots stand in for them
    names = ("t", "x1", "x2", "y1", "y2")
    v1, v2, v3, v4, v5 = (ex.var(n) for n in names)
    K = [
        (O, Z, Z, Z, Z),
        (Z, O, Z, Z, Z),
        (Z, Z, O, Z, Z),
        (v4, ex.neg(v1), Z, O, Z),
        (v5, Z, ex.neg(v1), Z, O),
        (Z, v5, ex.neg(v4), Z, Z),
    ]
    fields = [VectorField(5, comps) for comps in K]
    brackets = {}
    for i in range(6):
        for j in range(i + 1, 6):
            comp = _vf_bracket(K[i], K[j], names)
            vec = _match_combination(comp, K, names)
            if any(vec):
                brackets[(i, j)] = vec
    series = lower_central_series(brackets, 6)
    # push to the example chart: x1 = z, x2 = v2/sqrt2, x3 = v1/sqrt2,
    # x4 = sqrt2 u2, x5 = sqrt2 u1
    s2 = np.sqrt(2.0)
    zc, u1c, u2c = ex.var("z"), ex.var("u1"), ex.var("u2")
    subs = {
        "t": zc,                      # x1 = z
        "x1": ex.const(1 / s2) * ex.var("v2"),
        "x2": ex.const(1 / s2) * ex.var("v1"),
        "y1": ex.const(s2) * u2c,
        "y2": ex.const(s2) * u1c,
    }
    # d/dx1 = d_z, d/dx2 = sqrt2 d_v2, d/dx3 = sqrt2 d_v1,
    # d/dx4 = (1/sqrt2) d_u2, d/dx5 = (1/sqrt2) d_u1
    jac = [
        (0, 1.0),   # d/dx1 -> slot 0 (z)
        (4, s2),    # d/dx2 -> slot 4 (v2)
        (3, s2),    # d/dx3 -> slot 3 (v1)
        (2, 1 / s2),  # d/dx4 -> slot 2 (u2)
        (1, 1 / s2),  # d/dx5 -> slot 1 (u1)
    ]
    fields_chart = []
    for comps in K:
        out = [ex.ZERO] * 5
        for src, comp in enumerate(comps):
            slot, fac = jac[src]
            out[slot] = out[slot] + ex.const(fac) * _substitute(comp, subs)
        fields_chart.append(VectorField(5, tuple(out)))
    return {
        "fields": fields,
        "brackets": brackets,
        "series": series,
        "step": nilpotency_step(brackets, 6),
        "fields_chart": fields_chart,
    }


def example1_affine_map(p1=0.0, p2=0.0, p3=0.0, p4=0.0, p5=0.0, a52=0.0):
    """An identity-component affine structure automorphism of the flat
    transitive example, returned as (M, b) acting on the chart coordinates
    (z, u1, u2, v1, v2) by p -> M p + b.

    In the normal-flat coordinates the family reads
        x1' = x1 + p4 x4 + p5 x5 + p1,
        x2' = -p4 x1 + x2 - p4^2 x4 / 2 + a52 x5 + p2,
        x3' = -p5 x1 + x3 - (p4 p5 + a52) x4 - p5^2 x5 / 2 + p3,
        x4' = x4 + p4,    x5' = x5 + p5.
    """
    A = np.array(
        [
            [1.0, 0.0, 0.0, p4, p5],
            [-p4, 1.0, 0.0, -p4 * p4 / 2.0, a52],
            [-p5, 0.0, 1.0, -(p4 * p5 + a52), -p5 * p5 / 2.0],
            [0.0, 0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0],
        ]
    )
    t = np.array([p1, p2, p3, p4, p5])
    s2 = np.sqrt(2.0)
    # E1 coords from normal-flat ones: z = x1, u1 = x5/sqrt2, u2 = x4/sqrt2,
    # v1 = sqrt2 x3, v2 = sqrt2 x2
    C = np.zeros((5, 5))
    C[0, 0] = 1.0
    C[1, 4] = 1.0 / s2
    C[2, 3] = 1.0 / s2
    C[3, 2] = s2
    C[4, 1] = s2
    M = C @ A @ np.linalg.inv(C)
    b = C @ t
    return M, b


def affine_automorphism_checks(model, M, b, points, frame_fn=None):
    """Residuals of structure invariance under an affine map, and the
    pushforward shape of an adopted frame:

        f_* V1 = e1 V1,            f_* V2 = e2 V2,
        f_* V3 = c e2 V2 + e1 V3,  f_* V4 = -c e1 V1 + e2 V4.

    Returns (residuals, shape_data) where shape_data lists (e1, e2, c) and
    the residual of everything outside that pattern.
    """
    out = {"g": 0.0, "phi": 0.0, "eta": 0.0, "xi": 0.0}
    shape_worst = 0.0
    eps = None
    for pt in points:
        img = tuple(M @ np.asarray(pt) + b)
        g_p = model.metric_values(pt)
        g_i = model.metric_values(img)
        out["g"] = max(out["g"], np.abs(M.T @ g_i @ M - g_p).max())
        phi_p = values(np.asarray(model.phi_jets(pt, 0), dtype=object))
        phi_i = values(np.asarray(model.phi_jets(img, 0), dtype=object))
        out["phi"] = max(out["phi"], np.abs(M @ phi_p - phi_i @ M).max())
        eta_p = values(np.asarray(model.eta_jets(pt, 0), dtype=object))
        eta_i = values(np.asarray(model.eta_jets(img, 0), dtype=object))
        out["eta"] = max(out["eta"], np.abs(eta_i @ M - eta_p).max())
        xi_p = values(np.asarray(model.xi_jets(pt, 0), dtype=object))
        xi_i = values(np.asarray(model.xi_jets(img, 0), dtype=object))
        out["xi"] = max(out["xi"], np.abs(M @ xi_p - xi_i).max())
        if frame_fn is None:
            continue
        Vp = frame_fn(pt)
        Vi = frame_fn(img)
        gi = g_i
        # coefficients of f_* V_j over the frame at the image point
        dual = (0, 3, 4, 1, 2)
        coef = np.empty((5, 5))
        for j in range(5):
            push = M @ Vp[j]
            for k in range(5):
                coef[k, j] = float(Vi[dual[k]] @ gi @ push)
        e1, e2 = coef[1, 1], coef[2, 2]
        c = coef[2, 3] / e2
        expected = np.zeros((5, 5))
        expected[0, 0] = 1.0
        expected[1, 1] = e1
        expected[2, 2] = e2
        expected[3, 3] = e1
        expected[4, 4] = e2
        expected[2, 3] = c * e2
        expected[1, 4] = -c * e1
        shape_worst = max(shape_worst, np.abs(coef - expected).max())
        eps = (e1, e2)
    return out, {"shape-residual": shape_worst, "eps": eps}


def _substitute(e, subs):
    if e.op == "var":
        return subs[e.name]
    if e.op in ("const",):
        return e
    if e.op == "pow":
        return ex.pow_(_substitute(e.args[0], subs), e.exp)
    return ex.ScalarExpr(e.op, tuple(_substitute(a, subs) for a in e.args),
                         name=e.name, value=e.value, exp=e.exp)


def _vf_bracket(Xc, Yc, names):
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i, symbolically."""
    out = []
    for i in range(len(names)):
        term = ex.ZERO
        for j, nj in enumerate(names):
            term = term + Xc[j] * Yc[i].diff(nj) - Yc[j] * Xc[i].diff(nj)
        out.append(term)
    return out


def _match_combination(comp, K, names):
    """Exact coefficients expressing ``comp`` over the fields ``K``.

    The matching is by polynomial identity; works because the fields have
    polynomial components of degree <= 1 with constant independent parts.
    """
    targets = [ex.poly_dict(cm, names) for cm in comp]
    result = [F(0)] * len(K)
    # subtract multiples of K fields greedily using their constant slots
    residue = [dict(t) for t in targets]
    const_key = (0,) * len(names)
    # K_1..K_3 are pure constants in slots 0..2; K_4, K_5 have unit constant
    # parts in slots 3, 4; K_6 is linear only.  Solve by matching the
    # constant parts first, then the linear remainder against K_6.
    for idx, slot in ((3, 3), (4, 4), (0, 0), (1, 1), (2, 2)):
        coeff = residue[slot].get(const_key, F(0))
        if coeff:
            result[idx] = coeff
            kpolys = [ex.poly_dict(cm, names) for cm in K[idx]]
            for s in range(len(residue)):
                for mono, v in kpolys[s].items():
                    residue[s][mono] = residue[s].get(mono, F(0)) - coeff * v
    k6 = [ex.poly_dict(cm, names) for cm in K[5]]
    # K_6 = x5 d_2 - x4 d_3: match on its leading monomial
    lead_slot, lead_mono = 1, tuple(
        1 if names[m] == "y2" else 0 for m in range(len(names))
    )
    coeff = residue[lead_slot].get(lead_mono, F(0))
    if coeff:
        result[5] = coeff
        for s in range(len(residue)):
            for mono, v in k6[s].items():
                residue[s][mono] = residue[s].get(mono, F(0)) - coeff * v
    leftover = max(
        (abs(v) for d in residue for v in d.values()), default=F(0)
    )
    if leftover:
        raise ConstraintError("bracket does not close over the isotropy "
                              f"fields (leftover {leftover})")
    return result
