"""Coordinate-based curvature oracle.

Everything here is computed from jets of the metric components alone:
Levi-Civita connection, Riemann / Ricci / scalar / Weyl curvature and
covariant and Lie derivatives.  Frame-based formulas elsewhere in the package
are always validated against this module.

Sign conventions, fixed once for the whole workbench:

    R(X, Y)Z   = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    R(X,Y,Z,W) = g(R(X, Y)Z, W)
    Ric(X, Y)  = Tr{Z -> R(Z, X)Y}
    r          = g^{ab} Ric_ab

and the Kulkarni-Nomizu product carries no 1/2 factor:

    (u ^ v)(X,Y,Z,W) = u(Y,Z)v(X,W) - u(Y,W)v(X,Z)
                     + v(Y,Z)u(X,W) - v(Y,W)u(X,Z).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .jets import Jet


def jet_matrix_inverse(g):
    """Inverse of a square matrix of jets (Gauss-Jordan, value pivoting)."""
    n = len(g)
    order = g[0][0].order
    nvars = g[0][0].nvars
    center = g[0][0].center
    one = Jet.constant(nvars, order, center, 1.0)
    zero = Jet.constant(nvars, order, center, 0.0)
    A = [[g[i][j] for j in range(n)] + [one if i == j else zero for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col].value))
        if abs(A[piv][col].value) < 1e-14:
            raise DomainError("singular metric: jet matrix inversion failed")
        A[col], A[piv] = A[piv], A[col]
        inv_piv = A[col][col].recip()
        A[col] = [x * inv_piv for x in A[col]]
        for r in range(n):
            if r == col:
                continue
            f = A[r][col]
            if f.value == 0.0 and not f.coeffs.any():
                continue
            A[r] = [A[r][j] - f * A[col][j] for j in range(2 * n)]
    return [[A[i][n + j] for j in range(n)] for i in range(n)]


def values(M):
    """Point values of a nested list/array of jets as an ndarray."""
    arr = np.asarray(M, dtype=object)
    out = np.empty(arr.shape)
    for idx in np.ndindex(arr.shape):
        v = arr[idx]
        out[idx] = v.value if isinstance(v, Jet) else float(v)
    return out


@dataclass
class CurvatureAtPoint:
    """All oracle data at one chart point."""

    n: int
    point: tuple
    order: int
    g: list  # n x n jets
    ginv: list  # n x n jets
    gamma: list  # Gamma^a_{bc} jets, order-1
    riem_up: list  # R^a_{bcd} jets: component a of R(e_c, e_d) e_b
    g0: np.ndarray = field(repr=False, default=None)
    ginv0: np.ndarray = field(repr=False, default=None)
    rm_low: np.ndarray = field(repr=False, default=None)  # R(e_a,e_b,e_c,e_d)
    ricci_jets: list = field(repr=False, default=None)
    ricci: np.ndarray = field(repr=False, default=None)
    scalar_jet: Jet = field(repr=False, default=None)
    scalar: float = 0.0
    weyl: np.ndarray = field(repr=False, default=None)  # C_{abcd}, dim 5 only
    signature: tuple = (0, 0)

    def riemann_values(self):
        return values(self.riem_up)


def curvature_from_metric(metric_jets_fn, n, point, order=3):
    """Oracle pipeline from a callable returning the metric jets."""
    if order < 2:
        raise DomainError("curvature needs metric jets of order >= 2")
    g = metric_jets_fn(point, order)
    ginv = jet_matrix_inverse(g)
    g0 = values(g)
    ginv0 = values(ginv)
    eigs = np.linalg.eigvalsh(g0)
    signature = (int(np.sum(eigs > 0)), int(np.sum(eigs < 0)))

    dg = [[[g[a][b].partial(c) for c in range(n)] for b in range(n)] for a in range(n)]
    ginv_t = [[ginv[a][b].truncate(order - 1) for b in range(n)] for a in range(n)]
    gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(b, n):
                s = None
                for d in range(n):
                    term = ginv_t[a][d] * (dg[d][c][b] + dg[b][d][c] - dg[b][c][d])
                    s = term if s is None else s + term
                s = s * 0.5
                gamma[a][b][c] = s
                gamma[a][c][b] = s

    # R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
    #           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    gam_t = [
        [[gamma[a][b][c].truncate(order - 2) for c in range(n)] for b in range(n)]
        for a in range(n)
    ]
    dgam = [
        [[[gamma[a][b][c].partial(d) for d in range(n)] for c in range(n)]
         for b in range(n)]
        for a in range(n)
    ]
    riem = [
        [[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)
    ]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    s = dgam[a][d][b][c] - dgam[a][c][b][d]
                    for e in range(n):
                        s = s + gam_t[a][c][e] * gam_t[e][d][b]
                        s = s - gam_t[a][d][e] * gam_t[e][c][b]
                    riem[a][b][c][d] = s
                    riem[a][b][d][c] = s * -1.0
                zero = gamma[0][0][0].truncate(order - 2) * 0.0
                riem[a][b][c][c] = zero

    riem0 = values(riem)
    rm_low = np.einsum("azxy,aw->xyzw", riem0, g0)

    ricci_jets = [[None] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            s = None
            for z in range(n):
                term = riem[z][y][z][x]
                s = term if s is None else s + term
            ricci_jets[x][y] = s
    ricci = values(ricci_jets)

    ginv_t2 = [[ginv[a][b].truncate(order - 2) for b in range(n)] for a in range(n)]
    scalar_jet = None
    for x in range(n):
        for y in range(n):
            term = ginv_t2[x][y] * ricci_jets[x][y]
            scalar_jet = term if scalar_jet is None else scalar_jet + term
    scalar = scalar_jet.value

    weyl = None
    if n >= 4:
        S = ricci - (scalar / (2.0 * (n - 1))) * g0
        weyl = rm_low - kulkarni_nomizu(S, g0) / (n - 2.0)

    return CurvatureAtPoint(
        n=n,
        point=tuple(point),
        order=order,
        g=g,
        ginv=ginv,
        gamma=gamma,
        riem_up=riem,
        g0=g0,
        ginv0=ginv0,
        rm_low=rm_low,
        ricci_jets=ricci_jets,
        ricci=ricci,
        scalar_jet=scalar_jet,
        scalar=scalar,
        weyl=weyl,
        signature=signature,
    )


def curvature_at(model, point, order=3):
    """Oracle curvature of a chart model at a point."""
    return curvature_from_metric(model.metric_jets, model.dim, point, order)


def kulkarni_nomizu(u, v):
    """Kulkarni-Nomizu product of two symmetric matrices (no 1/2 factor)."""
    a = np.einsum("yz,xw->xyzw", u, v)
    b = np.einsum("yw,xz->xyzw", u, v)
    c = np.einsum("yz,xw->xyzw", v, u)
    d = np.einsum("yw,xz->xyzw", v, u)
    return a - b + c - d


def covariant_derivative(curv, T, variance):
    """Levi-Civita covariant derivative of a jet tensor.

    ``T`` is a nested object array with one axis per slot, ``variance`` a
    string of 'u'/'d' flags per slot.  The derivative direction is appended
    as the FIRST index of the result: out[a][...] = (nabla_a T)[...].
    Output jets have one order less than the input.
    """
    n = curv.n
    T = np.asarray(T, dtype=object)
    if T.ndim != len(variance):
        raise ValueError("variance string does not match tensor rank")
    t_order = T.flat[0].order
    if t_order < 1:
        raise DomainError("insufficient jet order for a covariant derivative")
    gam = [
        [[curv.gamma[a][b][c].truncate(t_order - 1) for c in range(n)]
         for b in range(n)]
        for a in range(n)
    ]
    out = np.empty((n,) + T.shape, dtype=object)
    for a in range(n):
        for idx in np.ndindex(T.shape):
            s = T[idx].partial(a)
            for slot, flag in enumerate(variance):
                i = idx[slot]
                for m in range(n):
                    jdx = idx[:slot] + (m,) + idx[slot + 1 :]
                    Tm = T[jdx].truncate(t_order - 1)
                    if flag == "u":
                        s = s + gam[i][a][m] * Tm
                    else:
                        s = s - gam[m][a][i] * Tm
            out[(a,) + idx] = s
    return out


def nabla_xi(curv, xi_jets):
    """(nabla xi) as the matrix N[a][b] = (nabla_b xi)^a; A = -N."""
    n = curv.n
    grad = covariant_derivative(curv, np.asarray(xi_jets, dtype=object), "u")
    N = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            N[a][b] = grad[b][a]
    return N


# -- Lie derivatives (plain partials; no connection needed) ---------------------


def lie_derivative_metric(g, K):
    """(L_K g)_ab for jet arrays g (order >= 1) and K."""
    n = len(K)
    q = K[0].order
    out = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            s = None
            for m in range(n):
                t = (
                    K[m].truncate(q - 1) * g[a][b].partial(m)
                    + g[m][b].truncate(q - 1) * K[m].partial(a)
                    + g[a][m].truncate(q - 1) * K[m].partial(b)
                )
                s = t if s is None else s + t
            out[a][b] = s
    return out


def lie_derivative_endo(P, K):
    """(L_K P)^a_b for a (1,1) tensor P."""
    n = len(K)
    q = K[0].order
    out = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            s = None
            for m in range(n):
                t = (
                    K[m].truncate(q - 1) * P[a][b].partial(m)
                    - P[m][b].truncate(q - 1) * K[a].partial(m)
                    + P[a][m].truncate(q - 1) * K[m].partial(b)
                )
                s = t if s is None else s + t
            out[a][b] = s
    return out


def lie_derivative_covector(eta, K):
    """(L_K eta)_a."""
    n = len(K)
    q = K[0].order
    out = np.empty(n, dtype=object)
    for a in range(n):
        s = None
        for m in range(n):
            t = K[m].truncate(q - 1) * eta[a].partial(m) + eta[m].truncate(
                q - 1
            ) * K[m].partial(a)
            s = t if s is None else s + t
        out[a] = s
    return out


def lie_derivative_vector(X, K):
    """[K, X]^a = K^m d_m X^a - X^m d_m K^a."""
    n = len(K)
    q = K[0].order
    out = np.empty(n, dtype=object)
    for a in range(n):
        s = None
        for m in range(n):
            t = K[m].truncate(q - 1) * X[a].partial(m) - X[m].truncate(
                q - 1
            ) * K[a].partial(m)
            s = t if s is None else s + t
        out[a] = s
    return out


# -- independent finite-difference route (oracle for the oracle) ----------------


def christoffel_fd(metric_value_fn, n, point, h=0.25):
    """Christoffel symbols from central finite differences of the metric.

    ``metric_value_fn(point) -> (n, n) array``.  The five-point stencil is
    exact for polynomial metrics of degree <= 4 apart from roundoff, which is
    the use this function is put to.
    """
    point = np.asarray(point, dtype=float)
    g0 = metric_value_fn(point)
    dg = np.empty((n, n, n))
    for c in range(n):
        samples = []
        for step in (-2, -1, 1, 2):
            p = point.copy()
            p[c] += step * h
            samples.append(metric_value_fn(p))
        m2, m1, p1, p2 = samples
        dg[:, :, c] = (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h)
    ginv = np.linalg.inv(g0)
    gam = np.empty((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                s = 0.0
                for d in range(n):
                    s += ginv[a, d] * (dg[d, c, b] + dg[b, d, c] - dg[b, c, d])
                gam[a, b, c] = 0.5 * s
    return gam


def fd_derivative(f, point, alpha, h=0.25):
    """Finite-difference mixed partial d^alpha f at ``point``.

    Built from repeated five-point first-derivative stencils, so it is exact
    (to roundoff) for polynomials of degree <= 4.
    """
    point = np.asarray(point, dtype=float)
    for v, k in enumerate(alpha):
        for _ in range(k):
            f = _single_central(f, v, h)
    return f(point)


def _single_central(f, v, h):
    def df(p):
        vals = []
        for step in (-2, -1, 1, 2):
            q = np.array(p, dtype=float)
            q[v] += step * h
            vals.append(f(q))
        m2, m1, p1, p2 = vals
        return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h)

    return df
