"""Almost para-contact structure layer.

Pointwise structure data, the axiom suite, the shape tensor A = -nabla(xi)
with its parabolic/elliptic/hyperbolic classification, the inductive adopted
frame construction, and the curvature identity suites that every model must
satisfy.  All scalars are jets (order 0 when only values are needed), so the
same code yields both point values and the derivative data that the frame
calculus consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameError
from .forms import DifferentialForm
from .jets import Jet
from .riemann import (
    covariant_derivative,
    curvature_at,
    jet_matrix_inverse,
    nabla_xi,
    values,
)

RANK_REL_TOL = 1e-7
BOUNDARY_REL_TOL = 1e-10


@dataclass
class StructureAtPoint:
    """Structure tensors at one point, as jets of a common order."""

    names: tuple
    point: tuple
    phi: np.ndarray  # (n, n) object array
    xi: np.ndarray  # (n,) object
    eta: np.ndarray  # (n,) object
    g: np.ndarray  # (n, n) object
    ginv: np.ndarray

    @property
    def n(self):
        return len(self.xi)


def structure_at(model, point, order=0):
    g = model.metric_jets(point, order)
    return StructureAtPoint(
        names=model.names,
        point=tuple(point),
        phi=np.asarray(model.phi_jets(point, order), dtype=object),
        xi=np.asarray(model.xi_jets(point, order), dtype=object),
        eta=np.asarray(model.eta_jets(point, order), dtype=object),
        g=np.asarray(g, dtype=object),
        ginv=np.asarray(jet_matrix_inverse(g), dtype=object),
    )


def check_axioms(s):
    """Residuals of the defining para-contact metric axioms."""
    n = s.n
    phi = values(s.phi)
    xi = values(s.xi)
    eta = values(s.eta)
    g = values(s.g)
    out = {}
    out["phi-squared"] = np.abs(
        phi @ phi - (np.eye(n) - np.outer(xi, eta))
    ).max()
    out["eta-of-xi"] = abs(float(eta @ xi) - 1.0)
    out["metric-compat"] = np.abs(
        phi.T @ g @ phi + g - np.outer(eta, eta)
    ).max()
    out["eta-is-metric-dual"] = np.abs(eta - g @ xi).max()
    return out


def closedness_residuals(model, point):
    """|d eta| and |d Phi| at a point (the almost para-cosymplectic axioms)."""
    n = model.dim
    eta = model.eta_jets(point, 1)
    Phi = model.fundamental_form_jets(point, 1)
    deta = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            deta = max(deta, abs(eta[b].partial(a).value - eta[a].partial(b).value))
    dphi = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                v = (
                    Phi[b][c].partial(a).value
                    - Phi[a][c].partial(b).value
                    + Phi[a][b].partial(c).value
                )
                dphi = max(dphi, abs(v))
    return {"d-eta": deta, "d-fundamental": dphi}


def shape_tensor(model, point, curv=None, order=3):
    """A = -nabla(xi) as a matrix of jets A[a][b] = (A e_b)^a.

    The result keeps jets of order curv.order - 1 so that the vectors
    extracted from A still carry first-derivative data downstream.
    """
    curv = curv or curvature_at(model, point, order)
    xi = model.xi_jets(point, curv.order)
    N = nabla_xi(curv, xi)
    n = curv.n
    A = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            A[a][b] = N[a][b] * -1.0
    return A


def common_order(*arrays):
    """Lowest jet order appearing across nested object arrays."""
    q = None
    for arr in arrays:
        for x in np.asarray(arr, dtype=object).flat:
            if isinstance(x, Jet):
                q = x.order if q is None else min(q, x.order)
    return q


def truncate_all(arr, q):
    arr = np.asarray(arr, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = arr[idx].truncate(q)
    return out


def shape_preconditions(s, A):
    """Residuals of the algebraic properties classify_A assumes."""
    g = values(s.g)
    phi = values(s.phi)
    xi = values(s.xi)
    A0 = values(A)
    c = g @ A0  # the symmetric form g(A., .)
    return {
        "A-self-adjoint": np.abs(c - c.T).max(),
        "A-phi-anticommute": np.abs(A0 @ phi + phi @ A0).max(),
        "A-squared": np.abs(A0 @ A0).max(),
        "A-kills-xi": np.abs(A0 @ xi).max(),
    }


def _zero_like(j):
    return j * 0.0


def _pairings(g, v, w):
    s = None
    n = len(v)
    for a in range(n):
        for b in range(n):
            t = v[a] * g[a][b] * w[b]
            s = t if s is None else s + t
    return s


def build_adopted_frame(s):
    """Inductive frame (E_0 = xi, E_1..E_m, E_{m+1}..E_{2m}) with
    phi E_i = E_i, phi E_{i+m} = -E_{i+m} and g(E_i, E_{i+m}) = 1.

    Works over jets of any order; branch decisions use point values only.
    At each step a non-null vector is taken from the orthogonal complement of
    the span built so far, normalized, and split into phi-eigenvectors.
    """
    n = s.n
    m = (n - 1) // 2
    g = s.g
    phi = s.phi
    basis = [
        np.asarray([_zero_like(s.xi[0]) + (1.0 if k == a else 0.0) for k in range(n)],
                   dtype=object)
        for a in range(n)
    ]
    # single coordinate directions can all be null (isotropic-pair metrics);
    # pairwise sums then cover a non-null direction of any nondegenerate
    # complement
    for a in range(n):
        for b in range(a + 1, n):
            basis.append(
                np.asarray([basis[a][k] + basis[b][k] for k in range(n)],
                           dtype=object)
            )
    frame = [np.asarray(s.xi, dtype=object)]
    plus, minus = [], []
    for _ in range(m):
        span = frame + plus + minus
        k = len(span)
        gram = [[_pairings(g, span[i], span[j]) for j in range(k)] for i in range(k)]
        gram_inv = jet_matrix_inverse(gram)
        best = None
        best_norm = 0.0
        for w in basis:
            pair_w = [_pairings(g, span[j], w) for j in range(k)]
            v = w
            for i in range(k):
                coef = None
                for j in range(k):
                    t = gram_inv[i][j] * pair_w[j]
                    coef = t if coef is None else coef + t
                v = np.asarray([v[a] - coef * span[i][a] for a in range(n)],
                               dtype=object)
            norm = _pairings(g, v, v)
            if abs(norm.value) > abs(best_norm):
                best = v
                best_norm = norm.value
                best_sq = norm
        if best is None or abs(best_norm) < 1e-9:
            raise FrameError("no non-null vector in the orthogonal complement")
        eps = 1.0 if best_norm > 0 else -1.0
        scale = (best_sq * eps).sqrt().recip()
        v = np.asarray([best[a] * scale for a in range(n)], dtype=object)
        phiv = _matvec(phi, v)
        c_plus = 1.0 / (eps * np.sqrt(2.0))
        c_minus = 1.0 / np.sqrt(2.0)
        plus.append(
            np.asarray([(v[a] + phiv[a]) * c_plus for a in range(n)], dtype=object)
        )
        minus.append(
            np.asarray([(v[a] - phiv[a]) * c_minus for a in range(n)], dtype=object)
        )
    return frame + plus + minus


def _matvec(M, v):
    n = len(v)
    out = []
    for a in range(n):
        s = None
        for b in range(n):
            t = M[a][b] * v[b]
            s = t if s is None else s + t
        out.append(s)
    return np.asarray(out, dtype=object)


@dataclass
class ShapeClassification:
    """Pointwise type of the shape tensor A."""

    rank: int
    kind: str  # para-cosymplectic-point | parabolic | parabolic/boundary | ...
    V1: np.ndarray = None  # jets; phi V1 = -V1 when rank = 2
    V2: np.ndarray = None  # jets; phi V2 = +V2
    epsilon: int = 1
    sigma: int = 1
    recon_residual: float = 0.0


def _factor_rank1(block, scale):
    """eps, coefficient jets for a symmetric rank<=1 block, or None if zero."""
    k = len(block)
    diag = [abs(block[i][i].value) for i in range(k)]
    p = int(np.argmax(diag))
    mag = max(abs(block[i][j].value) for i in range(k) for j in range(k))
    if mag <= RANK_REL_TOL * scale:
        return None, None, mag
    if diag[p] <= RANK_REL_TOL * scale:
        raise FrameError("symmetric block has rank > 1 (zero diagonal, "
                         "nonzero off-diagonal): not a weakly para-cosymplectic shape")
    eps = 1.0 if block[p][p].value > 0 else -1.0
    root = (block[p][p] * eps).sqrt().recip()
    d = [block[i][p] * root for i in range(k)]
    # residual of the rank-1 factorization
    res = 0.0
    for i in range(k):
        for j in range(k):
            res = max(res, abs(block[i][j].value - eps * d[i].value * d[j].value))
    if res > 1e-5 * max(scale, 1.0):
        raise FrameError(f"block is not rank 1 (factorization residual {res:.2e})")
    return eps, d, mag


def _sign_normalize(v):
    vals = values(v)
    scale = np.abs(vals).max()
    for x in vals:
        if abs(x) > 1e-9 * max(scale, 1e-30):
            if x < 0:
                return np.asarray([c * -1.0 for c in v], dtype=object)
            return v
    return v


def classify_A(s, A, frame=None):
    """Pointwise classification of A via rank-1 factorization of its
    symmetric-form blocks in an adopted frame.

    Returns vectors V1, V2 (determined up to sign; the first nonzero chart
    component is normalized positive) with

        A X = eps ( g(X, V1) V1 + sigma g(X, V2) V2 ),
        phi V1 = -V1,  phi V2 = +V2,  sigma = +1 elliptic / -1 hyperbolic.
    """
    n = s.n
    m = (n - 1) // 2
    E = frame or build_adopted_frame(s)
    q = common_order(A, *E, s.g)
    A = truncate_all(A, q)
    E = [truncate_all(Ei, q) for Ei in E]
    g = truncate_all(s.g, q)
    AE = [_matvec(A, E[i]) for i in range(2 * m + 1)]
    plus_block = [
        [_pairings(g, AE[1 + i], E[1 + j]) for j in range(m)] for i in range(m)
    ]
    minus_block = [
        [_pairings(g, AE[1 + m + i], E[1 + m + j]) for j in range(m)]
        for i in range(m)
    ]
    scale = max(np.abs(values(A)).max(), 1e-30)
    eps1, d, mag_p = _factor_rank1(plus_block, scale)
    eps2, h, mag_m = _factor_rank1(minus_block, scale)

    V1 = V2 = None
    if d is not None:
        V1 = np.asarray(
            [sum(d[i] * E[1 + m + i][a] for i in range(m)) for a in range(n)],
            dtype=object,
        )
        V1 = _sign_normalize(V1)
    if h is not None:
        V2 = np.asarray(
            [sum(h[i] * E[1 + i][a] for i in range(m)) for a in range(n)],
            dtype=object,
        )
        V2 = _sign_normalize(V2)

    rank = (d is not None) + (h is not None)
    if rank == 0:
        return ShapeClassification(rank=0, kind="para-cosymplectic-point")
    if rank == 1:
        boundary = max(mag_p if d is None else 0.0, mag_m if h is None else 0.0)
        kind = "parabolic"
        if boundary > BOUNDARY_REL_TOL * scale:
            kind = "parabolic/boundary"
        eps = eps1 if d is not None else eps2
        single = V1 if V1 is not None else V2
        res = _recon_residual_rank1(s, A, single, eps)
        return ShapeClassification(
            rank=1, kind=kind, V1=single, epsilon=int(eps), recon_residual=res
        )
    sigma = int(eps1 * eps2)
    kind = "elliptic" if sigma == 1 else "hyperbolic"
    res = _recon_residual_rank2(s, A, V1, V2, eps1, sigma)
    return ShapeClassification(
        rank=2,
        kind=kind,
        V1=V1,
        V2=V2,
        epsilon=int(eps1),
        sigma=sigma,
        recon_residual=res,
    )


def _recon_residual_rank1(s, A, V, eps):
    g0 = values(s.g)
    v0 = values(V)
    rec = eps * np.outer(v0, g0 @ v0)
    return np.abs(values(A) - rec).max()


def _recon_residual_rank2(s, A, V1, V2, eps1, sigma):
    g0 = values(s.g)
    v1 = values(V1)
    v2 = values(V2)
    rec = eps1 * (np.outer(v1, g0 @ v1) + sigma * np.outer(v2, g0 @ v2))
    return np.abs(values(A) - rec).max()


# -- identity suites -------------------------------------------------------------


def check_curvature_phi_identities(model, point, curv=None):
    """Residuals of the curvature/phi commutation identities and the
    xi-degeneracy of the curvature and Ricci tensors, evaluated on the
    coordinate basis."""
    curv = curv or curvature_at(model, point, 3)
    n = curv.n
    phi = values(np.asarray(model.phi_jets(point, 0), dtype=object))
    xi = values(np.asarray(model.xi_jets(point, 0), dtype=object))
    R = curv.riemann_values()  # R[a][z][x][y]: component a of R(e_x,e_y) e_z
    RL = curv.rm_low  # R(e_x, e_y, e_z, e_w)
    ric = curv.ricci
    out = {}
    # operator identities
    phiR = np.einsum("am,mzxy->azxy", phi, R)
    Rphi = np.einsum("amxy,mz->azxy", R, phi)  # R(X,Y) phi Z
    out["phi-R-commute"] = np.abs(phiR - Rphi).max()
    RphiXphiY = np.einsum("azxy,xm,yk->azmk", R, phi, phi)
    out["R-phiX-phiY"] = np.abs(RphiXphiY + R).max()
    RphiX = np.einsum("azxy,xm->azmy", R, phi)
    RphiY = np.einsum("azxy,ym->azxm", R, phi)
    out["R-phiX-skew"] = np.abs(RphiX + RphiY).max()
    out["R-kills-xi"] = np.abs(np.einsum("azxy,z->axy", R, xi)).max()
    out["R-xi-first-slot"] = np.abs(np.einsum("azxy,x->azy", R, xi)).max()
    # Riemann-Christoffel slides.  Sliding phi to the other slot of the same
    # antisymmetric pair flips the sign (a consequence of the antisymmetry of
    # g(phi ., .)); no single-sign relation ties the two pairs together.
    s1 = np.einsum("xyzw,xm->myzw", RL, phi)  # R(phi X, Y, Z, W)
    s2 = np.einsum("xyzw,ym->xmzw", RL, phi)  # R(X, phi Y, Z, W)
    s3 = np.einsum("xyzw,zm->xymw", RL, phi)  # R(X, Y, phi Z, W)
    s4 = np.einsum("xyzw,wm->xyzm", RL, phi)  # R(X, Y, Z, phi W)
    out["RC-slide-12"] = np.abs(s1 + s2).max()
    out["RC-slide-34"] = np.abs(s3 + s4).max()
    ss = np.einsum("xyzw,xm,yk->mkzw", RL, phi, phi)
    out["RC-phiphi"] = np.abs(ss + RL).max()
    zz = np.einsum("xyzw,zm,wk->xymk", RL, phi, phi)
    out["RC-phiphi-34"] = np.abs(zz + RL).max()
    for slot, name in enumerate("xyzw"):
        out[f"RC-xi-slot-{name}"] = np.abs(
            np.tensordot(RL, xi, axes=([slot], [0]))
        ).max()
    # Ricci identities
    out["ric-phi-skew"] = np.abs(phi.T @ ric + ric @ phi).max()
    out["ric-phiphi"] = np.abs(phi.T @ ric @ phi + ric).max()
    out["ric-kills-xi"] = np.abs(ric @ xi).max()
    return out


def ricci_form(model, point, curv=None):
    """The 2-form rho(X, Y) = Ric(phi X, Y) with antisymmetry and
    closedness residuals (needs order-3 jets)."""
    curv = curv or curvature_at(model, point, 3)
    n = curv.n
    phi = model.phi_jets(point, curv.order - 2)
    ric = curv.ricci_jets
    rho = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            s = None
            for m in range(n):
                t = phi[m][a] * ric[m][b]
                s = t if s is None else s + t
            rho[a][b] = s
    rho0 = values(rho)
    antisym = np.abs(rho0 + rho0.T).max()
    drho = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                v = (
                    rho[b][c].partial(a).value
                    - rho[a][c].partial(b).value
                    + rho[a][b].partial(c).value
                )
                drho = max(drho, abs(v))
    form = DifferentialForm(
        n, 2, {(a, b): rho0[a][b] for a in range(n) for b in range(a + 1, n)}
    )
    return form, {"rho-antisymmetry": antisym, "d-rho": drho}


def check_para_kahler_leaves(model, point, curv=None):
    """Residuals of the leaf-structure identity for nabla(phi), the Codazzi
    property of A, and the three degeneracy identities of nabla(A)."""
    curv = curv or curvature_at(model, point, 3)
    n = curv.n
    order = curv.order
    phi = np.asarray(model.phi_jets(point, order - 1), dtype=object)
    xi0 = values(np.asarray(model.xi_jets(point, 0), dtype=object))
    eta0 = values(np.asarray(model.eta_jets(point, 0), dtype=object))
    A = shape_tensor(model, point, curv)  # jets order-1
    A0 = values(A)
    g0 = curv.g0
    phi0 = values(phi)

    nabla_phi = covariant_derivative(curv, phi, "ud")  # [x][a][b]
    nphi0 = values(nabla_phi)
    # (nabla_X phi) Y = g(A phi X, Y) xi - eta(Y) A phi X
    Aphi = A0 @ phi0
    expected = np.einsum("bx,a->xab", g0 @ Aphi, xi0) - np.einsum(
        "b,ax->xab", eta0, Aphi
    )
    leaves = np.abs(nphi0 - expected).max()

    nabla_A = covariant_derivative(curv, A, "ud")  # [x][a][b] = (nabla_x A)^a_b
    nA0 = values(nabla_A)
    codazzi = np.abs(nA0 - nA0.transpose(2, 1, 0)).max()
    a_nabla_a = np.abs(np.einsum("am,xmb->xab", A0, nA0)).max()
    nabla_a_a = np.abs(np.einsum("xam,mb->xab", nA0, A0)).max()
    nabla_ay_a = np.abs(np.einsum("xab,xm->mab", nA0, A0)).max()
    return {
        "leaf-nabla-phi": leaves,
        "A-codazzi": codazzi,
        "A-nablaA": a_nabla_a,
        "nablaA-A": nabla_a_a,
        "nabla-AY-A": nabla_ay_a,
    }


def scalar_gradient(model, point, curv=None):
    """|dr| at a point (order-3 jets), for constant-curvature checks."""
    curv = curv or curvature_at(model, point, 3)
    return float(np.abs(curv.scalar_jet.gradient()).max())


def theta_duals_closed(cls, s, names, point):
    """Closedness residuals of g(., V1) and g(., V2) for extracted vectors."""
    out = {}
    n = s.n
    for tag, V in (("theta1", cls.V1), ("theta2", cls.V2)):
        if V is None:
            continue
        q = common_order(V, s.g)
        V = truncate_all(V, q)
        g = truncate_all(s.g, q)
        theta = []
        for b in range(n):
            acc = None
            for a in range(n):
                t = V[a] * g[a][b]
                acc = t if acc is None else acc + t
            theta.append(acc)
        worst = 0.0
        for a in range(n):
            for b in range(a + 1, n):
                worst = max(
                    worst, abs(theta[b].partial(a).value - theta[a].partial(b).value)
                )
        out[f"d-{tag}"] = worst
    return out
