"""Constructors for the explicit manifold families of the workbench.

Every model is a coordinate chart carrying an almost para-contact metric
structure (phi, xi, eta, g).  The five-dimensional families are built from an
adopted coframe (theta^0 .. theta^4) with

    g = theta^0 . theta^0 + 2 theta^1 . theta^3 + 2 theta^2 . theta^4,
    theta(phi X) = (0, +theta^1, -theta^2, -theta^3, +theta^4)(X),
    xi = d/dt,  eta = theta^0 = dt,

so the metric-dual frame carries the eigenvalue pattern
phi(V1, V2, V3, V4) = (-V1, +V2, +V3, -V4).

while the flat five-manifold with transitive automorphisms ("example1") and
the three-dimensional chart store their tensors explicitly.  Constraints are
enforced by construction (closed-form antidifferentiation for polynomial
data) or verified on a sample grid at build time.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .errors import ConfigError, ConstraintError, DomainError
from .forms import DifferentialForm, VectorField
from .jets import jet_lift
from .riemann import jet_matrix_inverse, values

CHART5 = ("t", "x1", "x2", "y1", "y2")
CHART3 = ("x", "y", "z")
CHART_E1 = ("z", "u1", "u2", "v1", "v2")

# theta^i(phi X) = sign_i * theta^i(X), and the frame metric pattern
COFRAME_PHI_SIGNS = (0.0, 1.0, -1.0, -1.0, 1.0)
FRAME_METRIC5 = np.zeros((5, 5))
FRAME_METRIC5[0, 0] = 1.0
FRAME_METRIC5[1, 3] = FRAME_METRIC5[3, 1] = 1.0
FRAME_METRIC5[2, 4] = FRAME_METRIC5[4, 2] = 1.0

# metric-dual index pairing for the pattern above: 0<->0, 1<->3, 2<->4
DUAL_INDEX = (0, 3, 4, 1, 2)

DEFAULT_BOX = (-0.9, 0.9)
DEFAULT_SEED = 42
DEFAULT_POINTS = 100
GUARD_MARGIN = 1e-3

_T, _X1, _X2, _Y1, _Y2 = (ex.var(n) for n in CHART5)


class ChartModel:
    """A chart with structure tensors, either coframe-built or explicit."""

    def __init__(
        self,
        names,
        family,
        sigma=1,
        params=None,
        coframe_rows=None,
        g_exprs=None,
        phi_exprs=None,
        xi_exprs=None,
        eta_exprs=None,
        guards=(),
        frame_exprs=None,
        tau_omega=None,
        domain=None,
        xi_flipped=False,
    ):
        self.names = tuple(names)
        self.dim = len(names)
        self.family = family
        self.sigma = int(sigma)
        self.params = dict(params or {})
        self.coframe_rows = coframe_rows
        self.g_exprs = g_exprs
        self.phi_exprs = phi_exprs
        self.xi_exprs = tuple(xi_exprs)
        self.eta_exprs = tuple(eta_exprs)
        self.guards = tuple(guards)
        self.frame_exprs = frame_exprs  # optional adopted frame metadata
        self.tau_omega = tau_omega  # optional (tau1, tau2, omega) 1-form exprs
        self.domain = dict(domain or {})
        self.domain.setdefault("box", list(DEFAULT_BOX))
        self.domain.setdefault("seed", DEFAULT_SEED)
        self.domain.setdefault("points", DEFAULT_POINTS)
        self.xi_flipped = bool(xi_flipped)

    # -- tensors as jets -----------------------------------------------------

    def _lift_matrix(self, rows, point, order):
        return [
            [jet_lift(c, self.names, point, order) for c in row] for row in rows
        ]

    def coframe_jets(self, point, order):
        if self.coframe_rows is None:
            raise DomainError(f"{self.family} model carries no adopted coframe")
        M = self._lift_matrix(self.coframe_rows, point, order)
        if self.xi_flipped:
            # theta^0 = eta flips with the orientation deformation; the
            # metric and phi are untouched by the sign of row zero
            M[0] = [c * -1.0 for c in M[0]]
        return M

    def metric_jets(self, point, order):
        if self.coframe_rows is not None:
            M = self.coframe_jets(point, order)
            n = self.dim
            g = [[None] * n for _ in range(n)]
            for a in range(n):
                for b in range(a, n):
                    s = (
                        M[0][a] * M[0][b]
                        + M[1][a] * M[3][b]
                        + M[3][a] * M[1][b]
                        + M[2][a] * M[4][b]
                        + M[4][a] * M[2][b]
                    )
                    g[a][b] = s
                    g[b][a] = s
            return g
        return self._lift_matrix(self.g_exprs, point, order)

    def phi_jets(self, point, order):
        if self.coframe_rows is not None:
            M = self.coframe_jets(point, order)
            Minv = jet_matrix_inverse(M)
            n = self.dim
            EM = [
                [M[i][j] * COFRAME_PHI_SIGNS[i] for j in range(n)] for i in range(n)
            ]
            P = [[None] * n for _ in range(n)]
            for a in range(n):
                for b in range(n):
                    s = None
                    for k in range(n):
                        t = Minv[a][k] * EM[k][b]
                        s = t if s is None else s + t
                    P[a][b] = s
            return P
        return self._lift_matrix(self.phi_exprs, point, order)

    def xi_jets(self, point, order):
        sign = -1.0 if self.xi_flipped else 1.0
        return [
            jet_lift(c, self.names, point, order) * sign for c in self.xi_exprs
        ]

    def eta_jets(self, point, order):
        sign = -1.0 if self.xi_flipped else 1.0
        return [
            jet_lift(c, self.names, point, order) * sign for c in self.eta_exprs
        ]

    def metric_values(self, point):
        return values(self.metric_jets(point, 0))

    def fundamental_form_jets(self, point, order):
        """Phi_ab = g(phi e_a, e_b) as jets."""
        g = self.metric_jets(point, order)
        P = self.phi_jets(point, order)
        n = self.dim
        out = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                s = None
                for m in range(n):
                    t = P[m][a] * g[m][b]
                    s = t if s is None else s + t
                out[a][b] = s
        return out

    def eta_form(self, point, order=0):
        return DifferentialForm(
            self.dim,
            1,
            {
                (i,): c
                for i, c in enumerate(self.eta_jets(point, order))
            },
        )

    def with_flipped_xi(self):
        """The deformation xi -> -xi, eta -> -eta (phi and g unchanged)."""
        import copy

        clone = copy.copy(self)
        clone.xi_flipped = not self.xi_flipped
        return clone

    # -- sampling -------------------------------------------------------------

    def sample_points(self, count=None, seed=None, box=None):
        """Seeded uniform samples, rejecting near-singular points."""
        count = count or self.domain["points"]
        seed = self.domain["seed"] if seed is None else seed
        lo, hi = box or self.domain["box"]
        rng = np.random.default_rng(seed)
        out = []
        tries = 0
        while len(out) < count:
            tries += 1
            if tries > 100 * count + 100:
                raise DomainError("sampling box is dominated by singular loci")
            p = tuple(rng.uniform(lo, hi, size=self.dim))
            ok = True
            for gexpr in self.guards:
                if abs(gexpr.evaluate(dict(zip(self.names, p)))) < GUARD_MARGIN:
                    ok = False
                    break
            if ok:
                out.append(p)
        return out

    # -- serialization ---------------------------------------------------------

    def to_config(self):
        params = {}
        for k, v in self.params.items():
            params[k] = v.to_json() if isinstance(v, ex.ScalarExpr) else v
        return {
            "family": self.family,
            "sigma": self.sigma,
            "params": params,
            "domain": dict(self.domain),
        }

    def __repr__(self):
        return f"ChartModel(family={self.family!r}, dim={self.dim}, sigma={self.sigma})"


def _grid2(box, k=5):
    lo, hi = box
    pts = np.linspace(lo, hi, k)
    return [(a, b) for a in pts for b in pts]


def _check_depends_only(e, allowed, what):
    extra = e.variables() - set(allowed)
    if extra:
        raise ConstraintError(
            f"{what} may depend only on {allowed}, found {sorted(extra)}"
        )


def _check_nonvanishing(e, names, what, box=DEFAULT_BOX):
    """Grid check that an expression stays away from zero (the nine-point
    grid contains the box center, where odd functions vanish)."""
    grid = np.linspace(box[0], box[1], 9)
    free = sorted(e.variables())
    if not free:
        v = e.evaluate({})
        if abs(v) < GUARD_MARGIN:
            raise ConstraintError(f"{what} vanishes (value {v})")
        return
    import itertools

    for combo in itertools.product(grid, repeat=len(free)):
        env = dict(zip(free, combo))
        if abs(e.evaluate(env)) < GUARD_MARGIN:
            raise ConstraintError(
                f"{what} vanishes on the sampling box near {env}"
            )


def _coframe5(theta3_row, theta4_row):
    z, o = ex.ZERO, ex.ONE
    return [
        [o, z, z, z, z],
        [z, o, z, z, z],
        [z, z, o, z, z],
        theta3_row,
        theta4_row,
    ]


def _xi_eta_5():
    return ((ex.ONE, ex.ZERO, ex.ZERO, ex.ZERO, ex.ZERO),
            (ex.ONE, ex.ZERO, ex.ZERO, ex.ZERO, ex.ZERO))


# -- family constructors ---------------------------------------------------------


def build_eta_einstein(f0=None, u0=None, h0=None, v0=None, r0=4.0, sigma=1,
                       domain=None):
    """Family with Ric = (r0/4)(g - eta (x) eta), r0 a nonzero constant.

    Coframe:
        theta^3 = df + u dx1,  f = f0(x1) - y1,  u = u0 - t + (r0/8) y1^2,
        theta^4 = dh + v dx2,  h = h0(x2) + y2,  v = v0 - sigma t + (r0/8) y2^2.
    """
    if r0 == 0:
        raise ConstraintError("r0 must be nonzero; use build_flat for r = 0")
    f0 = f0 or ex.ZERO
    u0 = u0 or ex.ZERO
    h0 = h0 or ex.ZERO
    v0 = v0 or ex.ZERO
    _check_depends_only(f0, {"x1"}, "f0")
    _check_depends_only(h0, {"x2"}, "h0")
    _check_depends_only(u0, {"x1", "x2"}, "u0")
    _check_depends_only(v0, {"x1", "x2"}, "v0")
    c8 = ex.const(r0 / 8.0)
    u = u0 - _T + c8 * ex.pow_(_Y1, 2)
    v = v0 - ex.const(float(sigma)) * _T + c8 * ex.pow_(_Y2, 2)
    theta3 = [ex.ZERO, f0.diff("x1") + u, ex.ZERO, ex.const(-1.0), ex.ZERO]
    theta4 = [ex.ZERO, ex.ZERO, h0.diff("x2") + v, ex.ZERO, ex.ONE]
    xi, eta = _xi_eta_5()
    r4 = ex.const(r0 / 4.0)
    tau_omega = (
        DifferentialForm(5, 1, {(1,): ex.neg(r4 * _Y1)}),
        DifferentialForm(5, 1, {(2,): r4 * _Y2}),
        DifferentialForm(5, 1, {(1,): ex.neg(u0.diff("x2")), (2,): v0.diff("x1")}),
    )
    return ChartModel(
        CHART5,
        "eta_einstein",
        sigma=sigma,
        params={"f0": f0, "u0": u0, "h0": h0, "v0": v0, "r0": float(r0)},
        coframe_rows=_coframe5(theta3, theta4),
        xi_exprs=xi,
        eta_exprs=eta,
        tau_omega=tau_omega,
        domain=domain,
    )


def build_contact_potential(f1, f2, f3=None, u_free=None, v_free=None, sigma=1,
                            domain=None):
    """Family whose Ricci form has the contact potential dt + y1 dx1 + y2 dx2.

    f1 = f1(x1, x2, y1) with nonvanishing df1/dy1, f2 = f2(x1, x2, y2) with
    nonvanishing df2/dy2; u and v are produced by closed-form
    antidifferentiation so that du/dy1 + y1 df1/dy1 = 0 and
    dv/dy2 - y2 df2/dy2 = 0 hold identically.
    """
    f3 = f3 or ex.ZERO
    u_free = u_free or ex.ZERO
    v_free = v_free or ex.ZERO
    _check_depends_only(f1, {"x1", "x2", "y1"}, "f1")
    _check_depends_only(f2, {"x1", "x2", "y2"}, "f2")
    _check_depends_only(u_free, {"x1", "x2"}, "u_free")
    _check_depends_only(v_free, {"x1", "x2"}, "v_free")
    f1y = f1.diff("y1")
    f2y = f2.diff("y2")
    box = (domain or {}).get("box", DEFAULT_BOX)
    _check_nonvanishing(f1y, CHART5, "df1/dy1", box)
    _check_nonvanishing(f2y, CHART5, "df2/dy2", box)
    u = u_free - ex.antiderivative(_Y1 * f1y, "y1")
    v = v_free + ex.antiderivative(_Y2 * f2y, "y2")
    theta3 = [
        ex.ZERO,
        u - _T + f1.diff("x1"),
        f3 + f1.diff("x2"),
        f1y,
        ex.ZERO,
    ]
    theta4 = [
        ex.ZERO,
        ex.neg(f3) + f2.diff("x1"),
        v - ex.const(float(sigma)) * _T + f2.diff("x2"),
        ex.ZERO,
        f2y,
    ]
    xi, eta = _xi_eta_5()
    u3 = ex.neg(u.diff("x2")) - _Y1 * (f3 + f1.diff("x2"))
    v3 = v.diff("x1") - _Y2 * (ex.neg(f3) + f2.diff("x1"))
    tau_omega = (
        DifferentialForm(5, 1, {(1,): ex.neg(_Y1)}),
        DifferentialForm(5, 1, {(2,): _Y2}),
        DifferentialForm(
            5,
            1,
            {
                (1,): f3.diff("x1") + u3,
                (2,): f3.diff("x2") + v3,
                (3,): f3.diff("y1"),
                (4,): f3.diff("y2"),
            },
        ),
    )
    return ChartModel(
        CHART5,
        "contact_potential",
        sigma=sigma,
        params={"f1": f1, "f2": f2, "f3": f3, "u_free": u_free, "v_free": v_free},
        coframe_rows=_coframe5(theta3, theta4),
        xi_exprs=xi,
        eta_exprs=eta,
        guards=(f1y, f2y),
        tau_omega=tau_omega,
        domain=domain,
    )


def build_generalized_eta_einstein(A1=None, C1=None, A2=None, C2=None, B=None,
                                   sigma=1, domain=None):
    """Contact-potential family specialization with r = -4/B and the
    trace-free Ricci part supported on theta^1 . theta^2 only:

        f1 = A1 + B y1,  u = C1 - B y1^2/2,
        f2 = A2 - B y2,  v = C2 - B y2^2/2,   B nonvanishing.
    """
    A1 = A1 or ex.ZERO
    C1 = C1 or ex.ZERO
    A2 = A2 or ex.ZERO
    C2 = C2 or ex.ZERO
    if B is None:
        raise ConstraintError("B is required and must be nonvanishing")
    for e, nm in ((A1, "A1"), (C1, "C1"), (A2, "A2"), (C2, "C2"), (B, "B")):
        _check_depends_only(e, {"x1", "x2"}, nm)
    box = (domain or {}).get("box", DEFAULT_BOX)
    _check_nonvanishing(B, CHART5, "B", box)
    f1 = A1 + B * _Y1
    f2 = A2 - B * _Y2
    model = build_contact_potential(
        f1, f2, f3=None, u_free=C1, v_free=C2, sigma=sigma, domain=domain
    )
    model.family = "generalized_ee"
    model.params = {"A1": A1, "C1": C1, "A2": A2, "C2": C2, "B": B}
    return model


def build_flat(alpha1=None, alpha2=None, A=None, B=None, sigma=1,
               mode="verify", domain=None):
    """Locally flat family.

    Coframe theta^3 = u dx1 + dy1, theta^4 = v dx2 + dy2 with

        u = alpha1(x1) y1 - t + A(x1, x2),
        v = alpha2(x2) y2 - sigma t + B(x1, x2),

    subject to  A_x2x2 + B_x1x1 + alpha2 A_x2 + alpha1 B_x1 = -sigma.
    ``verify`` checks the constraint residually on a grid;
    ``preset-zero-alpha`` takes alpha1 = alpha2 = 0 and manufactures
    A = -sigma x2^2/2 + A0 with A0_x2x2 = -B_x1x1 by antidifferentiation.
    """
    alpha1 = alpha1 or ex.ZERO
    alpha2 = alpha2 or ex.ZERO
    A = A or ex.ZERO
    B = B or ex.ZERO
    _check_depends_only(alpha1, {"x1"}, "alpha1")
    _check_depends_only(alpha2, {"x2"}, "alpha2")
    _check_depends_only(A, {"x1", "x2"}, "A")
    _check_depends_only(B, {"x1", "x2"}, "B")
    if mode == "preset-zero-alpha":
        alpha1 = ex.ZERO
        alpha2 = ex.ZERO
        A0 = ex.neg(
            ex.antiderivative(ex.antiderivative(B.diff("x1").diff("x1"), "x2"), "x2")
        )
        A = ex.const(-0.5 * sigma) * ex.pow_(_X2, 2) + A0
    elif mode != "verify":
        raise ConfigError(f"unknown flat-family mode {mode!r}")
    residual = (
        A.diff("x2").diff("x2")
        + B.diff("x1").diff("x1")
        + alpha2 * A.diff("x2")
        + alpha1 * B.diff("x1")
        + ex.const(float(sigma))
    )
    box = (domain or {}).get("box", DEFAULT_BOX)
    worst = 0.0
    for x1v, x2v in _grid2(box):
        env = {"x1": x1v, "x2": x2v, "t": 0.0, "y1": 0.0, "y2": 0.0}
        worst = max(worst, abs(residual.evaluate(env)))
    if worst > 1e-10:
        raise ConstraintError(
            "flatness constraint A_x2x2 + B_x1x1 + alpha2 A_x2 + alpha1 B_x1 "
            f"= -sigma violated (max residual {worst:.3e})"
        )
    u = alpha1 * _Y1 - _T + A
    v = alpha2 * _Y2 - ex.const(float(sigma)) * _T + B
    theta3 = [ex.ZERO, u, ex.ZERO, ex.ONE, ex.ZERO]
    theta4 = [ex.ZERO, ex.ZERO, v, ex.ZERO, ex.ONE]
    xi, eta = _xi_eta_5()
    tau_omega = (
        DifferentialForm(5, 1, {(1,): alpha1}),
        DifferentialForm(5, 1, {(2,): alpha2}),
        DifferentialForm(5, 1, {(1,): ex.neg(A.diff("x2")), (2,): B.diff("x1")}),
    )
    return ChartModel(
        CHART5,
        "flat",
        sigma=sigma,
        params={"alpha1": alpha1, "alpha2": alpha2, "A": A, "B": B, "mode": mode},
        coframe_rows=_coframe5(theta3, theta4),
        xi_exprs=xi,
        eta_exprs=eta,
        tau_omega=tau_omega,
        domain=domain,
    )


def build_example1(domain=None):
    """The flat elliptic five-manifold with a transitive automorphism group.

    Explicit structure on coordinates (z, u1, u2, v1, v2):
        g = dz^2 + 2 du1 dv1 + 2 du2 dv2,
        xi = d_z - 2 u1 d_v1 - 2 u2 d_v2,  eta = dz - 2 u1 du1 - 2 u2 du2,
    with phi fixed by its action on the coordinate fields.
    """
    z_, u1, u2 = ex.var("z"), ex.var("u1"), ex.var("u2")
    Z = ex.ZERO
    two_u1 = ex.const(2.0) * u1
    two_u2 = ex.const(2.0) * u2
    four_u1u2 = ex.const(4.0) * u1 * u2
    phi = [
        [Z, ex.neg(two_u1), two_u2, Z, Z],
        [Z, ex.const(-1.0), Z, Z, Z],
        [Z, Z, ex.ONE, Z, Z],
        [two_u1, Z, ex.neg(four_u1u2), ex.ONE, Z],
        [ex.neg(two_u2), four_u1u2, Z, Z, ex.const(-1.0)],
    ]
    g = [
        [ex.ONE, Z, Z, Z, Z],
        [Z, Z, Z, ex.ONE, Z],
        [Z, Z, Z, Z, ex.ONE],
        [Z, ex.ONE, Z, Z, Z],
        [Z, Z, ex.ONE, Z, Z],
    ]
    xi = (ex.ONE, Z, Z, ex.neg(two_u1), ex.neg(two_u2))
    eta = (ex.ONE, ex.neg(two_u1), ex.neg(two_u2), Z, Z)
    s2 = ex.const(np.sqrt(2.0))
    inv_s2 = ex.const(1.0 / np.sqrt(2.0))
    frame = (
        VectorField(5, xi),
        VectorField(5, (Z, Z, Z, Z, s2)),
        VectorField(5, (Z, Z, Z, s2, Z)),
        VectorField(5, (s2 * u2, Z, inv_s2, Z, ex.neg(s2 * u2 * u2))),
        VectorField(5, (s2 * u1, inv_s2, Z, ex.neg(s2 * u1 * u1), Z)),
    )
    return ChartModel(
        CHART_E1,
        "example1",
        sigma=1,
        params={},
        g_exprs=g,
        phi_exprs=phi,
        xi_exprs=xi,
        eta_exprs=eta,
        frame_exprs=frame,
        domain=domain,
    )


def build_dim3(b, eps1=1, eps2=1, domain=None):
    """Three-dimensional chart: scalar curvature r = 2 d^2b/dx^2.

    Coordinates (x, y, z); the single structure function is b(x, y):
        g_xy = 1,  g_yy = 2(b - eps1 z),  g_zz = 1,
        phi d_x = eps2 d_x,
        phi d_y = 2 eps2 (b - eps1 z) d_x - eps2 d_y,
        xi = d_z,  eta = dz.
    """
    _check_depends_only(b, {"x", "y"}, "b")
    if eps1 not in (1, -1) or eps2 not in (1, -1):
        raise ConstraintError("eps1 and eps2 must be +1 or -1")
    Z = ex.ZERO
    w = b - ex.const(float(eps1)) * ex.var("z")
    e2 = ex.const(float(eps2))
    g = [
        [Z, ex.ONE, Z],
        [ex.ONE, ex.const(2.0) * w, Z],
        [Z, Z, ex.ONE],
    ]
    phi = [
        [e2, ex.const(2.0) * e2 * w, Z],
        [Z, ex.neg(e2), Z],
        [Z, Z, Z],
    ]
    xi = (Z, Z, ex.ONE)
    eta = (Z, Z, ex.ONE)
    return ChartModel(
        CHART3,
        "dim3",
        sigma=1,
        params={"b": b, "eps1": int(eps1), "eps2": int(eps2)},
        g_exprs=g,
        phi_exprs=phi,
        xi_exprs=xi,
        eta_exprs=eta,
        domain=domain,
    )


# -- config round trip ------------------------------------------------------------


def _expr_param(params, key, default=None):
    if key not in params or params[key] is None:
        return default
    v = params[key]
    if isinstance(v, dict):
        return ex.from_json(v)
    if isinstance(v, (int, float)):
        return ex.const(v)
    raise ConfigError(f"parameter {key!r} is not an expression")


def from_config(cfg):
    """Build a model from its JSON config."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise ConfigError("config must be an object with a 'family' key")
    family = cfg["family"]
    sigma = int(cfg.get("sigma", 1))
    if sigma not in (1, -1):
        raise ConfigError("sigma must be +1 or -1")
    params = cfg.get("params", {})
    domain = cfg.get("domain")
    try:
        if family == "eta_einstein":
            return build_eta_einstein(
                f0=_expr_param(params, "f0"),
                u0=_expr_param(params, "u0"),
                h0=_expr_param(params, "h0"),
                v0=_expr_param(params, "v0"),
                r0=float(params.get("r0", 4.0)),
                sigma=sigma,
                domain=domain,
            )
        if family == "contact_potential":
            return build_contact_potential(
                f1=_expr_param(params, "f1", ex.var("y1")),
                f2=_expr_param(params, "f2", ex.var("y2")),
                f3=_expr_param(params, "f3"),
                u_free=_expr_param(params, "u_free"),
                v_free=_expr_param(params, "v_free"),
                sigma=sigma,
                domain=domain,
            )
        if family == "generalized_ee":
            return build_generalized_eta_einstein(
                A1=_expr_param(params, "A1"),
                C1=_expr_param(params, "C1"),
                A2=_expr_param(params, "A2"),
                C2=_expr_param(params, "C2"),
                B=_expr_param(params, "B", ex.ONE),
                sigma=sigma,
                domain=domain,
            )
        if family == "flat":
            return build_flat(
                alpha1=_expr_param(params, "alpha1"),
                alpha2=_expr_param(params, "alpha2"),
                A=_expr_param(params, "A"),
                B=_expr_param(params, "B"),
                sigma=sigma,
                mode=params.get("mode", "verify"),
                domain=domain,
            )
        if family == "example1":
            return build_example1(domain=domain)
        if family == "dim3":
            return build_dim3(
                b=_expr_param(params, "b", ex.ZERO),
                eps1=int(params.get("eps1", 1)),
                eps2=int(params.get("eps2", 1)),
                domain=domain,
            )
    except (ConstraintError, DomainError):
        raise
    raise ConfigError(f"unknown model family {family!r}")
