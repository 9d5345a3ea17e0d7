"""Command-line front end: config ingestion, check suites, reports.

Commands: verify, classify, frame, gauge, weyl, lie, report-diff.
Reports are deterministic JSON (identical for a fixed config/seed apart from
the timestamp); a human-readable table goes to stdout.  The environment
variable PCG_SEED overrides --seed.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import expr as ex
from . import frame as fr
from . import jets, lie, models, pac, riemann
from .errors import PcgeomError

DEFAULTS = {"points": 100, "seed": 42, "tol": 1e-8, "order": 3}


class _PointBag:
    """Per-point cache of everything the checks share."""

    def __init__(self, model, pts, order):
        self.model = model
        self.pts = pts
        self.order = order
        self._curv = {}
        self._struct = {}
        self._frames = {}
        self._coeffs = {}

    def curv(self, i):
        if i not in self._curv:
            self._curv[i] = riemann.curvature_at(self.model, self.pts[i], self.order)
        return self._curv[i]

    def struct(self, i):
        if i not in self._struct:
            self._struct[i] = pac.structure_at(self.model, self.pts[i], self.order)
        return self._struct[i]

    def frame(self, i, source="chart"):
        key = (i, source)
        if key not in self._frames:
            self._frames[key] = fr.frame_from_model(
                self.model, self.pts[i], self.curv(i), source=source
            )
        return self._frames[key]

    def coeffs(self, i, source="chart"):
        key = (i, source)
        if key not in self._coeffs:
            self._coeffs[key] = fr.extract_coeffs(self.frame(i, source))
        return self._coeffs[key]


def _check(report, name, anchor, residual, tol, npts):
    entry = {
        "name": name,
        "anchor": anchor,
        "max_residual": float(residual),
        "tolerance": float(tol),
        "points_sampled": int(npts),
        "pass": bool(residual <= tol),
    }
    report["checks"].append(entry)
    return entry["pass"]


def _finding(report, name, value):
    report["findings"].append({"name": name, "value": value})


def run_suite(model, points=None, seed=None, tol=None, order=None,
              normalize_xi=False):
    """Run every applicable check on a model; returns the report dict."""
    points = points or DEFAULTS["points"]
    seed = DEFAULTS["seed"] if seed is None else seed
    tol = tol or DEFAULTS["tol"]
    order = order or DEFAULTS["order"]
    if normalize_xi:
        model = model.with_flipped_xi()
    report = {
        "model": model.to_config(),
        "environment": {
            "seed": int(seed),
            "box": list(model.domain["box"]),
            "points": int(points),
            "jet_order": int(order),
            "tolerance": float(tol),
            "normalize_xi": bool(normalize_xi),
            "kernel": jets.BACKEND,
        },
        "checks": [],
        "findings": [],
    }
    pts = model.sample_points(points, seed=seed)
    n_heavy = min(20, points)
    n_mid = min(50, points)
    bag = _PointBag(model, pts, order)

    _axiom_checks(report, model, pts, bag)
    _oracle_checks(report, model, bag, n_heavy, tol)
    _identity_checks(report, model, bag, n_heavy, n_mid, tol)
    if model.dim == 5:
        try:
            _frame_checks(report, model, bag, n_heavy, tol, seed)
        except PcgeomError as exc:
            _check(report, "frame-pipeline", "adopted-frame calculus",
                   float("inf"), tol, n_heavy)
            _finding(report, "frame-error", str(exc))
    try:
        _family_checks(report, model, bag, n_mid, tol, seed)
    except PcgeomError as exc:
        _check(report, "family-checks", "family-specific claims",
               float("inf"), tol, n_mid)
        _finding(report, "family-check-error", str(exc))
    report["pass"] = all(c["pass"] for c in report["checks"])
    report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return report


def _axiom_checks(report, model, pts, bag):
    worst = {"phi-squared": 0.0, "eta-of-xi": 0.0, "metric-compat": 0.0,
             "eta-is-metric-dual": 0.0}
    closed = {"d-eta": 0.0, "d-fundamental": 0.0}
    for pt in pts:
        s = pac.structure_at(model, pt, 1)
        for k, v in pac.check_axioms(s).items():
            worst[k] = max(worst[k], v)
        for k, v in pac.closedness_residuals(model, pt).items():
            closed[k] = max(closed[k], v)
    for k, v in worst.items():
        _check(report, f"axiom-{k}", "para-contact metric axioms", v, 1e-10,
               len(pts))
    for k, v in closed.items():
        _check(report, f"axiom-{k}", "closedness of eta and the fundamental form",
               v, 1e-10, len(pts))


def _oracle_checks(report, model, bag, n, tol):
    sym = bianchi = nabla_g = a_sq = weyl_tr = 0.0
    for i in range(min(n, 10)):
        curv = bag.curv(i)
        R = curv.rm_low
        sym = max(
            sym,
            np.abs(R + R.transpose(1, 0, 2, 3)).max(),
            np.abs(R + R.transpose(0, 1, 3, 2)).max(),
            np.abs(R - R.transpose(2, 3, 0, 1)).max(),
        )
        bianchi = max(
            bianchi,
            np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max(),
        )
        gj = np.asarray(curv.g, dtype=object)
        ng = riemann.values(riemann.covariant_derivative(curv, gj, "dd"))
        nabla_g = max(nabla_g, np.abs(ng).max())
        A = riemann.values(pac.shape_tensor(model, bag.pts[i], curv))
        a_sq = max(a_sq, np.abs(A @ A).max())
        if curv.weyl is not None:
            tr = np.einsum("xyzw,xw->yz", curv.weyl, curv.ginv0)
            weyl_tr = max(weyl_tr, np.abs(tr).max())
    _check(report, "oracle-riemann-symmetries", "curvature tensor symmetries",
           sym, 1e-10, min(n, 10))
    _check(report, "oracle-first-bianchi", "first Bianchi identity", bianchi,
           1e-10, min(n, 10))
    _check(report, "oracle-metric-compatibility", "nabla g = 0", nabla_g,
           1e-10, min(n, 10))
    _check(report, "shape-tensor-squares-to-zero", "A^2 = 0", a_sq, 1e-10,
           min(n, 10))
    if model.dim == 5:
        _check(report, "oracle-weyl-trace-free", "vanishing Weyl traces",
               weyl_tr, 1e-9, min(n, 10))


def _identity_checks(report, model, bag, n_heavy, n_mid, tol):
    worst_ids = {}
    worst_leaves = {}
    for i in range(n_heavy):
        curv = bag.curv(i)
        for k, v in pac.check_curvature_phi_identities(
            model, bag.pts[i], curv
        ).items():
            worst_ids[k] = max(worst_ids.get(k, 0.0), v)
        for k, v in pac.check_para_kahler_leaves(model, bag.pts[i], curv).items():
            worst_leaves[k] = max(worst_leaves.get(k, 0.0), v)
    _check(report, "curvature-phi-identities",
           "curvature/phi commutation suite", max(worst_ids.values()), tol,
           n_heavy)
    _check(report, "para-kahler-leaf-identities",
           "nabla(phi) / Codazzi / nabla(A) degeneracies",
           max(worst_leaves.values()), tol, n_heavy)
    anti = closed = 0.0
    for i in range(n_mid):
        _, res = pac.ricci_form(model, bag.pts[i], bag.curv(i))
        anti = max(anti, res["rho-antisymmetry"])
        closed = max(closed, res["d-rho"])
    _check(report, "ricci-form-antisymmetry", "rho(X,Y) = Ric(phi X, Y)",
           anti, 1e-9, n_mid)
    _check(report, "ricci-form-closed", "d rho = 0", closed, tol, n_mid)
    # conformal-flatness implication: Weyl ~ 0 at all points forces R ~ 0
    if model.dim == 5:
        wmax = rmax = 0.0
        for i in range(n_heavy):
            curv = bag.curv(i)
            wmax = max(wmax, np.abs(curv.weyl).max())
            rmax = max(rmax, np.abs(curv.rm_low).max())
        if wmax < 1e-9:
            _check(report, "conformally-flat-implies-flat",
                   "vanishing Weyl forces vanishing curvature", rmax, 1e-8,
                   n_heavy)
        else:
            _finding(report, "weyl-nonzero", wmax)


def _frame_checks(report, model, bag, n, tol, seed):
    rng = np.random.default_rng(seed + 1)
    worst = {}
    fit_values = []
    eq37 = 0.0
    gauge_worst = 0.0
    pot_worst = 0.0
    n_frame = min(n, 12)
    degenerate = False
    for i in range(n_frame):
        try:
            fs = bag.frame(i, "chart") if model.coframe_rows is not None \
                else bag.frame(i, "classify")
        except PcgeomError as exc:
            if "rank" in str(exc):
                degenerate = True  # the calculus does not apply; skip cleanly
                break
            raise
        coeffs = fr.extract_coeffs(fs)
        for k, v in fr.frame_invariants(fs).items():
            worst[f"frame-{k}"] = max(worst.get(f"frame-{k}", 0.0), v)
        _, conn_res = fr.connection_matrix(fs)
        for k, v in conn_res.items():
            worst[f"connection-{k}"] = max(worst.get(f"connection-{k}", 0.0), v)
        for k, v in fr.cartan_residuals(fs).items():
            worst[f"cartan-{k}"] = max(worst.get(f"cartan-{k}", 0.0), v)
        for k, v in fr.bianchi_wedge_residuals(fs).items():
            worst[f"bianchi-{k}"] = max(worst.get(f"bianchi-{k}", 0.0), v)
        worst["coefficient-expansion"] = max(
            worst.get("coefficient-expansion", 0.0), coeffs.expansion_residual
        )
        _, dev, fit = fr.reconstruct_curvature(coeffs, fs)
        worst["curvature-reconstruction"] = max(
            worst.get("curvature-reconstruction", 0.0), dev
        )
        worst["curvature-support"] = max(
            worst.get("curvature-support", 0.0), fit["off-support-residual"]
        )
        if fit["gamma-factor-fit"] is not None:
            fit_values.append(fit["gamma-factor-fit"])
        _, _, rres = fr.ricci_from_coeffs(coeffs, fs)
        worst["ricci-formula"] = max(
            worst.get("ricci-formula", 0.0), rres["ricci-vs-oracle"]
        )
        worst["scalar-formula"] = max(
            worst.get("scalar-formula", 0.0), rres["scalar-vs-oracle"]
        )
        eq37 = max(eq37, fr.shape_quadratic_identity(fs))
        rp = fr.ricci_potential(fs)
        pot_worst = max(pot_worst, rp["exactness-residual"])
        # gauge laws under random polynomial gauge functions
        if i < 5:
            v1, v2, v3, v4 = (ex.var(nm) for nm in model.names[1:])
            basis = [ex.ONE, v1, v2, v3, v4, v1 * v2, v3 * v4]
            for _ in range(2):
                cs = rng.uniform(-1, 1, size=len(basis))
                alpha = ex.add(*[ex.const(c) * b for c, b in zip(cs, basis)])
                fs2 = fr.gauge_transform(fs, alpha)
                for k, v in fr.gauge_checks(fs, fs2, alpha).items():
                    gauge_worst = max(gauge_worst, v)
        # weyl expansion against the derived labels
        W = fr.weyl_frame_components(fs, coeffs)
        exp = W["expected"]
        lab = 0.0
        for nm, key in (
            ("edge-01-02", ((0, 1), (0, 2))),
            ("edge-01-03", ((0, 1), (0, 3))),
            ("edge-02-04", ((0, 2), (0, 4))),
            ("edge-12-34", ((1, 2), (3, 4))),
            ("edge-14-23", ((1, 4), (2, 3))),
            ("edge-12-13", ((1, 2), (1, 3))),
            ("edge-12-24", ((1, 2), (2, 4))),
        ):
            lab = max(lab, abs(W["edges"].get(key, 0.0) - exp[nm]))
        for nm, key in (("loop-13", (1, 3)), ("loop-24", (2, 4)),
                        ("loop-12", (1, 2))):
            lab = max(lab, abs(W["loops"].get(key, 0.0) - exp[nm]))
        worst["weyl-labels"] = max(worst.get("weyl-labels", 0.0), lab)
        worst["weyl-support"] = max(
            worst.get("weyl-support", 0.0), W["off-support"]
        )
        if W["phi-commutator"] < 1e-9:
            worst["commutator-implies-ricci-flat"] = max(
                worst.get("commutator-implies-ricci-flat", 0.0),
                W["ricci-norm"],
            )
    if degenerate:
        _finding(report, "frame-skipped", "shape tensor rank < 2")
        return
    for k, v in sorted(worst.items()):
        tolk = 1e-7 if "support" in k or "reconstruction" in k or \
            "expansion" in k or "weyl" in k else tol
        _check(report, k, "adopted-frame calculus", v, tolk, n_frame)
    _check(report, "shape-quadratic-identity",
           "A-form product is sigma (t12 x t12)", eq37, tol, n_frame)
    _check(report, "ricci-potential-exact", "rho = d(-tau1 + tau2)",
           pot_worst, tol, n_frame)
    _check(report, "gauge-transformation-laws",
           "tau invariance and the omega law", gauge_worst, tol,
           min(n_frame, 5))
    if fit_values:
        _finding(report, "gamma-factor-fit", float(np.median(fit_values)))
    # invariants of the coefficient action over random draws
    drift = 0.0
    for _ in range(100):
        c = fr.CurvatureCoeffs(*rng.uniform(-2, 2, size=5), sigma=1)
        alpha = float(rng.uniform(-2, 2))
        i0 = fr.invariants(c)
        i1 = fr.invariants(fr.gauge_action(c, alpha))
        drift = max(
            drift,
            abs(i0["I1"] - i1["I1"]),
            abs(i0["I2"] - i1["I2"]),
            abs(i0["detRbar"] - i1["detRbar"]),
        )
    _check(report, "gauge-invariants", "I1, I2 and det preserved", drift,
           1e-12, 100)


def _family_checks(report, model, bag, n, tol, seed):
    fam = model.family
    if fam in ("eta_einstein", "contact_potential", "generalized_ee", "flat",
               "example1"):
        kinds = set()
        for i in range(min(n, 10)):
            s = bag.struct(i)
            A = pac.shape_tensor(model, bag.pts[i], bag.curv(i))
            kinds.add(pac.classify_A(s, A).kind)
        expected_kind = {"example1": "elliptic"}.get(
            fam, "elliptic" if model.sigma == 1 else "hyperbolic"
        )
        ok = kinds == {expected_kind}
        _check(report, "pointwise-classification",
               f"shape type is {expected_kind}", 0.0 if ok else 1.0, 0.5,
               min(n, 10))
    if fam == "eta_einstein":
        r0 = model.params["r0"]
        worst = dr = rho_dev = theta_cons = 0.0
        for i in range(n):
            curv = bag.curv(i)
            eta = riemann.values(
                np.asarray(model.eta_jets(bag.pts[i], 0), dtype=object)
            )
            target = (r0 / 4.0) * (curv.g0 - np.outer(eta, eta))
            worst = max(worst, np.abs(curv.ricci - target).max())
            dr = max(dr, pac.scalar_gradient(model, bag.pts[i], curv))
            phi0 = riemann.values(
                np.asarray(model.phi_jets(bag.pts[i], 0), dtype=object)
            )
            rho = phi0.T @ curv.ricci
            Phi = phi0.T @ curv.g0
            rho_dev = max(rho_dev, np.abs(rho - (r0 / 4.0) * Phi).max())
        _check(report, "eta-einstein-ricci", "Ric = (r0/4)(g - eta x eta)",
               worst, tol, n)
        _check(report, "scalar-curvature-constant", "dr = 0", dr, tol, n)
        _check(report, "ricci-form-proportional",
               "rho = (r0/4) Phi", rho_dev, tol, n)
        # normalized-frame existence: a gauge removing the t12 part of dtau1
        fs = bag.frame(0, "chart")
        coeffs = bag.coeffs(0, "chart")
        if abs(coeffs.a2) > 1e-9:
            alpha = coeffs.a1 / coeffs.a2
            moved = fr.gauge_action(coeffs, alpha)
            _check(report, "normalized-frame-exists",
                   "gauge removes the mixing coefficient", abs(moved.a1),
                   1e-10, 1)
        theta13 = theta24 = 0.0
        th = fs.theta_values()
        d3 = fr.d_covector(fs.theta[3])
        d4 = fr.d_covector(fs.theta[4])
        from .forms import DifferentialForm, form_from_covector, wedge

        f3 = DifferentialForm(5, 2, {(a, b): d3[a, b] for a in range(5)
                                     for b in range(a + 1, 5)})
        f4 = DifferentialForm(5, 2, {(a, b): d4[a, b] for a in range(5)
                                     for b in range(a + 1, 5)})
        theta13 = wedge(form_from_covector(th[1]), f3).norm()
        theta24 = wedge(form_from_covector(th[2]), f4).norm()
        _check(report, "coframe-wedge-consequences",
               "theta^1 ^ d theta^3 = 0 = theta^2 ^ d theta^4",
               max(theta13, theta24), tol, 1)
    if fam in ("contact_potential", "generalized_ee"):
        pot_dev = eig_dev = 0.0
        contact_needed = 0.0
        for i in range(n):
            pt = bag.pts[i]
            fs = bag.frame(i, "chart")
            coeffs = bag.coeffs(i, "chart")
            rp = fr.ricci_potential(fs)
            expected = np.zeros(5)
            expected[0] = 1.0
            expected[1] = pt[3]  # y1
            expected[2] = pt[4]  # y2
            pot_dev = max(pot_dev, np.abs(rp["potential"] - expected).max())
            env = dict(zip(model.names, pt))
            if fam == "contact_potential":
                a_exp = 1.0 / model.params["f1"].diff("y1").evaluate(env)
                b_exp = -1.0 / model.params["f2"].diff("y2").evaluate(env)
            else:
                B = model.params["B"].evaluate(env)
                a_exp, b_exp = 1.0 / B, 1.0 / B
            eig_dev = max(eig_dev, abs(coeffs.a2 - a_exp),
                          abs(coeffs.b2 - b_exp))
            if abs(coeffs.a2 * coeffs.b2) > 1e-3:
                contact_needed = max(
                    contact_needed, 0.0 if rp["is-contact"] else 1.0
                )
        _check(report, "contact-ricci-potential",
               "eta - tau1 + tau2 = dt + y1 dx1 + y2 dx2", pot_dev, tol, n)
        _check(report, "ricci-eigenvalue-pair",
               "a2 = 1/f1_y1 and b2 = -1/f2_y2", eig_dev, tol, n)
        _check(report, "contact-condition",
               "eta ^ rho ^ rho nonzero where a2 b2 != 0", contact_needed,
               0.5, n)
        # the model's stored connection forms match the frame extraction
        tau_dev = 0.0
        for i in range(min(n, 10)):
            fs = bag.frame(i, "chart")
            pt = bag.pts[i]
            for stored, extracted in zip(model.tau_omega,
                                         (fs.tau1, fs.tau2, fs.omega)):
                sv = np.array([
                    c.evaluate(dict(zip(model.names, pt)))
                    if isinstance(c, ex.ScalarExpr) else float(c)
                    for c in (stored.comp.get((a,), ex.ZERO) for a in range(5))
                ])
                tau_dev = max(tau_dev,
                              np.abs(sv - riemann.values(extracted)).max())
        _check(report, "connection-form-closed-forms",
               "stored tau1, tau2, omega match the extraction", tau_dev, tol,
               min(n, 10))
    if fam == "generalized_ee":
        worst_r = ric0_dev = 0.0
        for i in range(n):
            pt = bag.pts[i]
            curv = bag.curv(i)
            env = dict(zip(model.names, pt))
            B = model.params["B"].evaluate(env)
            worst_r = max(worst_r, abs(curv.scalar + 4.0 / B))
            eta = riemann.values(
                np.asarray(model.eta_jets(pt, 0), dtype=object)
            )
            ric0 = curv.ricci - (curv.scalar / 4.0) * (
                curv.g0 - np.outer(eta, eta)
            )
            fs = bag.frame(i, "chart")
            th = fs.theta_values()
            f12 = model.params["A1"].diff("x2").evaluate(env) \
                + model.params["A2"].diff("x1").evaluate(env)
            expected = (2.0 * f12 / B) * 0.5 * (
                np.outer(th[1], th[2]) + np.outer(th[2], th[1])
            )
            ric0_dev = max(ric0_dev, np.abs(ric0 - expected).max())
        _check(report, "generalized-ee-scalar", "r = -4/B (sign from the "
               "eigenvalue formulas; the printed 4/B contradicts them)",
               worst_r, tol, n)
        _check(report, "generalized-ee-trace-free-part",
               "Ric0 = (2/B)(f1_x2 + f2_x1) theta1 . theta2", ric0_dev, tol, n)
    if fam in ("flat", "example1"):
        rmax = 0.0
        for i in range(n):
            rmax = max(rmax, np.abs(bag.curv(i).rm_low).max())
        _check(report, "flatness", "curvature vanishes identically", rmax,
               1e-9, n)
    if fam == "flat":
        gen = lie.IsotropyGenerator(model)
        pts = bag.pts[: min(n, 20)]
        if gen.closed_form:
            res = lie.killing_residuals(model, gen.expr, pts)
        else:
            res = lie.killing_residuals(
                model, lambda p, o: gen.components(p, o), pts
            )
            _finding(report, "isotropy-quadrature-error",
                     gen.quadrature_error)
        _check(report, "isotropy-generator-killing",
               "normalized generator preserves (g, phi, eta)",
               max(res.values()), 1e-9, len(pts))
    if fam == "example1":
        A_dev = 0.0
        comm_dev = 0.0
        for i in range(min(n, 10)):
            pt = bag.pts[i]
            curv = bag.curv(i)
            A = riemann.values(pac.shape_tensor(model, pt, curv))
            expected = np.zeros((5, 5))
            expected[3, 1] = 2.0  # 2 du1 (x) d_v1
            expected[4, 2] = 2.0  # 2 du2 (x) d_v2
            A_dev = max(A_dev, np.abs(A - expected).max())
            # frame commutators: [xi, V3] = V1, [xi, V4] = V2, rest zero
            Vj = [np.asarray(v.at(model.names, pt, 1), dtype=object)
                  for v in model.frame_exprs]
            for a in range(5):
                for b in range(a + 1, 5):
                    br = riemann.values(
                        riemann.lie_derivative_vector(Vj[b], Vj[a])
                    )
                    want = np.zeros(5)
                    if (a, b) == (0, 3):
                        want = riemann.values(Vj[1])
                    elif (a, b) == (0, 4):
                        want = riemann.values(Vj[2])
                    comm_dev = max(comm_dev, np.abs(br - want).max())
        _check(report, "shape-tensor-value",
               "A = 2 du1 x d_v1 + 2 du2 x d_v2", A_dev, tol, min(n, 10))
        _check(report, "frame-bracket-table",
               "[xi, V3] = V1 and [xi, V4] = V2 only", comm_dev, 1e-12,
               min(n, 10))
        S = lie.isotropy_algebra_s()
        kill = 0.0
        for K in S["fields_chart"]:
            res = lie.killing_residuals(model, K, bag.pts[: min(n, 20)])
            kill = max(kill, max(res.values()))
        _check(report, "isotropy-algebra-killing",
               "all six affine generators preserve the structure", kill,
               1e-9, min(n, 20))
        M, b = lie.example1_affine_map(p1=0.1, p2=0.2, p3=-0.1, p4=0.2,
                                       p5=-0.15, a52=0.3)

        def frame_fn(pt):
            return fr.frame_from_model(
                model, pt, riemann.curvature_at(model, pt, 3)
            ).vector_values()

        res, shape = lie.affine_automorphism_checks(
            model, M, b, bag.pts[:3], frame_fn
        )
        _check(report, "affine-automorphism-invariance",
               "affine maps preserve (g, phi, eta, xi)", max(res.values()),
               tol, 3)
        _check(report, "frame-pushforward-shape",
               "pushforward matrix has the gauge-triangular shape",
               shape["shape-residual"], tol, 3)
    if fam == "dim3":
        b_expr = model.params["b"]
        r_dev = op_dev = ric_dev = 0.0
        kinds = set()
        for i in range(n):
            pt = bag.pts[i]
            curv = bag.curv(i)
            env = dict(zip(model.names, pt))
            r_expected = 2.0 * b_expr.diff("x").diff("x").evaluate(env)
            r_dev = max(r_dev, abs(curv.scalar - r_expected))
            phi0 = riemann.values(
                np.asarray(model.phi_jets(pt, 0), dtype=object)
            )
            Phi = phi0.T @ curv.g0  # Phi_ab = g(phi e_a, e_b)
            R = curv.riemann_values()  # R[a][z][x][y]
            expected = 0.5 * curv.scalar * np.einsum("xy,az->azxy", Phi, phi0)
            op_dev = max(op_dev, np.abs(R - expected).max())
            eta = riemann.values(
                np.asarray(model.eta_jets(pt, 0), dtype=object)
            )
            target = 0.5 * curv.scalar * (curv.g0 - np.outer(eta, eta))
            ric_dev = max(ric_dev, np.abs(curv.ricci - target).max())
            s = bag.struct(i)
            A = pac.shape_tensor(model, pt, curv)
            kinds.add(pac.classify_A(s, A).kind.split("/")[0])
        _check(report, "dim3-scalar-curvature", "r = 2 b_xx", r_dev, 1e-9, n)
        _check(report, "dim3-curvature-operator",
               "R(X,Y) = (r/2) Phi(X,Y) phi", op_dev, tol, n)
        _check(report, "dim3-ricci", "Ric = (r/2)(g - eta x eta)", ric_dev,
               tol, n)
        ok = kinds <= {"parabolic", "para-cosymplectic-point"}
        _check(report, "dim3-classification", "no elliptic or hyperbolic "
               "points in dimension three", 0.0 if ok else 1.0, 0.5, n)


# -- report I/O ---------------------------------------------------------------------


def _print_table(report):
    width = max(len(c["name"]) for c in report["checks"]) + 2
    for c in report["checks"]:
        status = "pass" if c["pass"] else "FAIL"
        print(f"{c['name']:<{width}} {c['max_residual']:>12.3e}  "
              f"(tol {c['tolerance']:.0e}, {c['points_sampled']} pts)  {status}")
    for f in report["findings"]:
        print(f"finding: {f['name']} = {f['value']}")
    print("overall:", "pass" if report["pass"] else "FAIL")


def write_report(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PcgeomError(f"cannot read config {path}: {exc}") from None


def _seed(args):
    env = os.environ.get("PCG_SEED")
    if env is not None:
        return int(env)
    return args.seed


# -- subcommands ---------------------------------------------------------------------


def cmd_verify(args):
    cfg = load_config(args.config)
    model = models.from_config(cfg)
    report = run_suite(
        model,
        points=args.points,
        seed=_seed(args),
        tol=args.tol,
        normalize_xi=args.normalize_xi,
    )
    _print_table(report)
    if args.report:
        write_report(report, args.report)
    return 0 if report["pass"] else 1


def cmd_classify(args):
    cfg = load_config(args.config)
    model = models.from_config(cfg)
    if args.normalize_xi:
        model = model.with_flipped_xi()
    if args.point:
        pt = tuple(float(x) for x in args.point.split(","))
    else:
        pt = model.sample_points(1, seed=_seed(args))[0]
    curv = riemann.curvature_at(model, pt, 3)
    s = pac.structure_at(model, pt, 3)
    A = pac.shape_tensor(model, pt, curv)
    cls = pac.classify_A(s, A)
    out = {
        "point": list(pt),
        "kind": cls.kind,
        "rank": cls.rank,
        "epsilon": cls.epsilon,
        "reconstruction_residual": cls.recon_residual,
    }
    if cls.V1 is not None:
        out["V1"] = [v.value for v in cls.V1]
    if cls.V2 is not None:
        out["V2"] = [v.value for v in cls.V2]
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_frame(args):
    cfg = load_config(args.config)
    model = models.from_config(cfg)
    pt = (tuple(float(x) for x in args.point.split(","))
          if args.point else model.sample_points(1, seed=_seed(args))[0])
    fs = fr.frame_from_model(model, pt, source=args.source)
    coeffs = fr.extract_coeffs(fs)
    out = {
        "point": list(pt),
        "sigma": fs.sigma,
        "vectors": [[float(x) for x in v] for v in fs.vector_values()],
        "tau1": [float(x) for x in riemann.values(fs.tau1)],
        "tau2": [float(x) for x in riemann.values(fs.tau2)],
        "omega": [float(x) for x in riemann.values(fs.omega)],
        "coefficients": {
            "a1": coeffs.a1, "a2": coeffs.a2, "b1": coeffs.b1,
            "b2": coeffs.b2, "gamma": coeffs.gamma,
        },
        "invariants": {k: float(v) for k, v in fr.invariants(coeffs).items()},
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_gauge(args):
    cfg = load_config(args.config)
    model = models.from_config(cfg)
    pt = (tuple(float(x) for x in args.point.split(","))
          if args.point else model.sample_points(1, seed=_seed(args))[0])
    fs = fr.frame_from_model(model, pt)
    alpha = float(args.alpha)
    fs2 = fr.gauge_transform(fs, alpha)
    out = {
        "point": list(pt),
        "alpha": alpha,
        "laws": fr.gauge_checks(fs, fs2, alpha),
        "coefficients-before": vars(fr.extract_coeffs(fs)),
        "coefficients-after": vars(fr.extract_coeffs(fs2)),
    }
    print(json.dumps(out, indent=2, sort_keys=True, default=float))
    return 0


def cmd_weyl(args):
    cfg = load_config(args.config)
    model = models.from_config(cfg)
    pt = (tuple(float(x) for x in args.point.split(","))
          if args.point else model.sample_points(1, seed=_seed(args))[0])
    fs = fr.frame_from_model(model, pt)
    coeffs = fr.extract_coeffs(fs)
    W = fr.weyl_frame_components(fs, coeffs)
    out = {
        "point": list(pt),
        "loops": {f"{k}": v for k, v in W["loops"].items()},
        "edges": {f"{k}": v for k, v in W["edges"].items()},
        "expected": W["expected"],
        "off_support": W["off-support"],
        "phi_commutator": W["phi-commutator"],
        "ricci_norm": W["ricci-norm"],
    }
    print(json.dumps(out, indent=2, sort_keys=True, default=float))
    return 0


def _family_params(args):
    kwargs = {}
    for nm in ("alpha0", "alpha1", "alpha2", "beta1", "beta2"):
        v = getattr(args, nm)
        if v is not None:
            kwargs[nm] = Fraction(v)
    kwargs["sigma"] = args.sigma
    return kwargs


def cmd_lie(args):
    if args.constants:
        alg = lie.algebra_from_json(load_config(args.constants))
    elif args.example1:
        alg = lie.family_algebra("C2")
    elif args.family:
        alg = lie.family_algebra(args.family, **_family_params(args))
    else:
        print("lie: need --family, --constants or --example1", file=sys.stderr)
        return 2
    if args.lie_cmd == "check":
        res = lie.jacobi_residual(alg)
        out = {"jacobi-residual": str(res), "pass": res == 0}
        if alg.params is not None:
            out["dual-structure-residual"] = str(
                lie.dual_structure_residuals(alg, alg.params)
            )
        print(json.dumps(out, indent=2, sort_keys=True))
        return 0 if res == 0 else 1
    if args.lie_cmd == "classify":
        branch, p = lie.classify_algebra(alg)
        print(json.dumps({
            "branch": branch,
            "params": {k: str(getattr(p, k)) for k in
                       ("alpha0", "alpha1", "alpha2", "alpha3", "alpha4",
                        "beta1", "beta2")},
            "sigma": p.sigma,
        }, indent=2, sort_keys=True))
        return 0
    if args.lie_cmd == "curvature":
        checks, gam, R = lie.koszul_checks(alg)
        ric, r = lie.ricci_exact(alg, R)
        flat = lie.is_flat(alg)
        nonzero = [
            (i, j, k, l, str(R[i][j][k][l]))
            for i in range(5) for j in range(5)
            for k in range(5) for l in range(5)
            if R[i][j][k][l] and i < j
        ]
        print(json.dumps({
            "flat": flat,
            "scalar-curvature": str(r),
            "structural-checks": {k: str(v) for k, v in checks.items()},
            "nonzero-curvature-entries": nonzero[:20],
        }, indent=2, sort_keys=True))
        return 0
    print(f"lie: unknown subcommand {args.lie_cmd}", file=sys.stderr)
    return 2


def cmd_report_diff(args):
    a = load_config(args.a)
    b = load_config(args.b)
    a.pop("timestamp", None)
    b.pop("timestamp", None)
    if a == b:
        print("reports match")
        return 0
    print("reports differ")
    return 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="pcgeom",
        description="verification workbench for weakly para-cosymplectic "
                    "five-manifolds",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, point=True):
        sp.add_argument("config", help="model config JSON")
        sp.add_argument("--seed", type=int, default=DEFAULTS["seed"])
        if point:
            sp.add_argument("--point", help="comma-separated coordinates")

    sp = sub.add_parser("verify", help="run the full check suite")
    common(sp, point=False)
    sp.add_argument("--points", type=int, default=DEFAULTS["points"])
    sp.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    sp.add_argument("--report", help="write the JSON report here")
    sp.add_argument("--normalize-xi", action="store_true",
                    help="apply the orientation deformation xi -> -xi")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("classify", help="pointwise shape classification")
    common(sp)
    sp.add_argument("--normalize-xi", action="store_true")
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("frame", help="adopted frame and coefficients")
    common(sp)
    sp.add_argument("--source", choices=("classify", "chart"),
                    default="classify")
    sp.set_defaults(fn=cmd_frame)

    sp = sub.add_parser("gauge", help="apply a constant gauge parameter")
    common(sp)
    sp.add_argument("--alpha", default="0.5")
    sp.set_defaults(fn=cmd_gauge)

    sp = sub.add_parser("weyl", help="Weyl components in the frame")
    common(sp)
    sp.set_defaults(fn=cmd_weyl)

    sp = sub.add_parser("lie", help="exact left-invariant structure tools")
    sp.add_argument("lie_cmd", choices=("check", "classify", "curvature"))
    sp.add_argument("--family", choices=("A", "B", "C1", "C2"))
    sp.add_argument("--constants", help="structure-constant JSON file")
    sp.add_argument("--example1", action="store_true",
                    help="use the transitive flat example's constants")
    for nm in ("alpha0", "alpha1", "alpha2", "beta1", "beta2"):
        sp.add_argument(f"--{nm}", help="rational, e.g. 2/3")
    sp.add_argument("--sigma", type=int, default=1, choices=(1, -1))
    sp.set_defaults(fn=cmd_lie)

    sp = sub.add_parser("report-diff", help="compare two reports "
                        "(timestamp ignored)")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(fn=cmd_report_diff)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PcgeomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
