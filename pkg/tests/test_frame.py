"""Adopted-frame calculus: extraction, reconstruction, gauge theory, Weyl."""

from fractions import Fraction

import numpy as np
import pytest

from pcgeom import expr as ex
from pcgeom import frame as fr
from pcgeom import models, riemann
from pcgeom.errors import FrameError

PT = (0.0, 0.1, 0.2, 0.3, 0.4)
X1, X2, Y1, Y2 = (ex.var(n) for n in ("x1", "x2", "y1", "y2"))


def nondegenerate_models():
    return [
        models.build_eta_einstein(r0=4.0),
        models.build_eta_einstein(r0=-2.0, u0=X1 * X2),
        models.build_eta_einstein(r0=4.0, sigma=-1),
        models.build_contact_potential(Y1, Y2),
        models.build_contact_potential(Y1, 2.0 * Y2, f3=X1 * X2),
        models.build_generalized_eta_einstein(A1=X2, A2=X1, B=ex.ONE),
        models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(X1)),
        models.build_example1(),
    ]


def test_tau1_value_on_eta_einstein():
    m = models.build_eta_einstein(r0=4.0)
    fs = fr.frame_from_model(m, PT)
    tau1 = riemann.values(fs.tau1)
    expected = np.zeros(5)
    expected[1] = -PT[3]  # -(r0/4) y1 dx1 with r0 = 4
    assert np.abs(tau1 - expected).max() < 1e-12
    # the proportionality scalar is sign-canonical on the chart frame
    fs_h = fr.frame_from_model(m, PT, source="chart")
    assert fs_h.alpha1_fn == pytest.approx(-PT[3], abs=1e-12)
    assert abs(fs.alpha1_fn) == pytest.approx(PT[3], abs=1e-12)


def test_example1_frame_matches_listed_one():
    m = models.build_example1()
    pt = (0.1, 0.25, -0.3, 0.4, 0.5)
    fs = fr.frame_from_model(m, pt)
    listed = [np.array([float(x) for x in vf.at(m.names, pt, 0)])
              for vf in m.frame_exprs]
    got = fs.vector_values()
    # V1 and V2 agree up to sign; V3, V4 up to sign and a gauge multiple
    for mine, theirs in ((got[1], listed[1]), (got[2], listed[2])):
        assert min(np.abs(mine - theirs).max(),
                   np.abs(mine + theirs).max()) < 1e-10
    # tau forms are frame-choice independent; here both vanish
    assert np.abs(riemann.values(fs.tau1)).max() < 1e-12


def test_degenerate_model_rejected():
    from tests_helpers import flat_para_cosymplectic_chart

    m = flat_para_cosymplectic_chart()
    with pytest.raises(FrameError):
        fr.frame_from_model(m, (0.0,) * 5)


def test_flipped_xi_needs_normalization():
    m = models.build_eta_einstein(r0=4.0).with_flipped_xi()
    with pytest.raises(FrameError):
        fr.frame_from_model(m, PT)


def test_frame_invariants_and_sources_agree():
    for m in nondegenerate_models():
        pt = m.sample_points(1, seed=23)[0]
        curv = riemann.curvature_at(m, pt, 3)
        fs_c = fr.frame_from_model(m, pt, curv)
        assert max(fr.frame_invariants(fs_c).values()) < 1e-8
        if m.coframe_rows is None:
            continue
        fs_h = fr.frame_from_model(m, pt, curv, source="chart")
        assert max(fr.frame_invariants(fs_h).values()) < 1e-8
        # tau forms are gauge/sign independent
        assert np.abs(
            riemann.values(fs_c.tau1) - riemann.values(fs_h.tau1)
        ).max() < 1e-10
        assert np.abs(
            riemann.values(fs_c.tau2) - riemann.values(fs_h.tau2)
        ).max() < 1e-10


def test_connection_matrix_pattern():
    m = models.build_contact_potential(Y1, Y2)
    fs = fr.frame_from_model(m, PT, source="chart")
    Om, res = fr.connection_matrix(fs)
    assert max(res.values()) < 1e-10
    expected_tau1 = np.zeros(5)
    expected_tau1[1] = -PT[3]  # tau1 = -y1 dx1
    assert np.abs(Om[1][1] - expected_tau1).max() < 1e-12
    expected_tau2 = np.zeros(5)
    expected_tau2[2] = PT[4]  # tau2 = y2 dx2
    assert np.abs(Om[2][2] - expected_tau2).max() < 1e-12
    # zero pattern of the first column: nabla xi has no xi, V3, V4 parts
    assert np.abs(Om[0][0]).max() < 1e-12
    assert np.abs(Om[3][0]).max() < 1e-12
    assert np.abs(Om[4][0]).max() < 1e-12


def test_coefficients_on_reference_models():
    m = models.build_eta_einstein(r0=4.0)
    c = fr.extract_coeffs(fr.frame_from_model(m, PT, source="chart"))
    assert (c.a1, c.b1) == (pytest.approx(0.0, abs=1e-12),) * 2
    assert c.a2 == pytest.approx(-1.0, abs=1e-12)
    assert c.b2 == pytest.approx(-1.0, abs=1e-12)
    mc = models.build_contact_potential(Y1, 2.0 * Y2)
    cc = fr.extract_coeffs(fr.frame_from_model(mc, PT, source="chart"))
    assert cc.a2 == pytest.approx(1.0, abs=1e-12)  # 1/f1_y1
    assert cc.b2 == pytest.approx(-0.5, abs=1e-12)  # -1/f2_y2
    mf = models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(X1))
    cf = fr.extract_coeffs(fr.frame_from_model(mf, PT, source="chart"))
    assert max(abs(cf.a1), abs(cf.a2), abs(cf.b1), abs(cf.b2)) < 1e-12
    assert cf.gamma == pytest.approx(-1.0, abs=1e-12)  # gamma = -sigma


def test_reconstruction_and_ricci_formulas_match_oracle():
    for m in nondegenerate_models():
        for pt in m.sample_points(20, seed=29):
            curv = riemann.curvature_at(m, pt, 3)
            fs = fr.frame_from_model(m, pt, curv)
            coeffs = fr.extract_coeffs(fs)
            _, dev, fit = fr.reconstruct_curvature(coeffs, fs)
            assert dev < 1e-7, m.family
            assert fit["off-support-residual"] < 1e-7
            _, r, res = fr.ricci_from_coeffs(coeffs, fs)
            assert res["ricci-vs-oracle"] < 1e-8
            assert res["scalar-vs-oracle"] < 1e-8


def test_scalar_curvature_worked_example():
    # f1 = y1, f2 = 2 y2: r = 2(f1_y1 - f2_y2)/(f1_y1 f2_y2) = -1
    m = models.build_contact_potential(Y1, 2.0 * Y2)
    curv = riemann.curvature_at(m, PT, 3)
    fs = fr.frame_from_model(m, PT, curv)
    c = fr.extract_coeffs(fs)
    assert -2.0 * (c.a2 + c.b2) == pytest.approx(-1.0, abs=1e-12)
    assert curv.scalar == pytest.approx(-1.0, abs=1e-12)


def test_gamma_factor_fit_is_one():
    """The doubled-product curvature template carries (sigma + gamma), not
    (sigma + 2 gamma): the fitted factor lands at 1 wherever gamma != 0."""
    cases = [
        models.build_eta_einstein(r0=-2.0, u0=X1 * X2),
        models.build_generalized_eta_einstein(A1=X2, A2=X1, B=ex.ONE),
        models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(X1)),
    ]
    for m in cases:
        pt = m.sample_points(1, seed=31)[0]
        fs = fr.frame_from_model(m, pt)
        coeffs = fr.extract_coeffs(fs)
        if abs(coeffs.gamma) < 1e-6:
            continue
        _, _, fit = fr.reconstruct_curvature(coeffs, fs)
        assert fit["gamma-factor-fit"] == pytest.approx(1.0, abs=1e-6)


def test_shape_quadratic_identity():
    for m in nondegenerate_models()[:4]:
        fs = fr.frame_from_model(m, m.sample_points(1, seed=33)[0])
        assert fr.shape_quadratic_identity(fs) < 1e-10


def test_ricci_potential_contact_family():
    m = models.build_contact_potential(Y1, Y2, f3=X1 * X2)
    for pt in m.sample_points(10, seed=35):
        fs = fr.frame_from_model(m, pt)
        rp = fr.ricci_potential(fs)
        assert rp["exactness-residual"] < 1e-8
        expected = np.array([1.0, pt[3], pt[4], 0.0, 0.0])
        assert np.abs(rp["potential"] - expected).max() < 1e-8
        assert rp["is-contact"]


def test_ricci_potential_symbolic_form():
    # eta - tau1 + tau2 assembled from the stored closed forms equals
    # dt + y1 dx1 + y2 dx2 exactly as polynomials
    m = models.build_contact_potential(Y1, 2.0 * Y2, f3=X1 * X2)
    tau1, tau2, _ = m.tau_omega
    pot = {
        (0,): ex.ONE,
        (1,): ex.neg(tau1.comp.get((1,), ex.ZERO)) + tau2.comp.get((1,), ex.ZERO),
        (2,): ex.neg(tau1.comp.get((2,), ex.ZERO)) + tau2.comp.get((2,), ex.ZERO),
    }
    names = ("t", "x1", "x2", "y1", "y2")
    assert ex.poly_equal(pot[(0,)], ex.ONE, names)
    assert ex.poly_equal(pot[(1,)], Y1, names)
    assert ex.poly_equal(pot[(2,)], Y2, names)


def test_eta_einstein_potential_and_contact_volume():
    # rho = d(-tau1+tau2) with eta^rho^rho nonzero iff r0 != 0
    m = models.build_eta_einstein(r0=4.0)
    fs = fr.frame_from_model(m, PT)
    rp = fr.ricci_potential(fs)
    assert rp["exactness-residual"] < 1e-8
    assert rp["eta-rho-rho"] > 1e-3
    mf = models.build_flat(A=ex.const(-0.5) * ex.pow_(X2, 2))
    fsf = fr.frame_from_model(mf, PT)
    rpf = fr.ricci_potential(fsf)
    assert rpf["exactness-residual"] < 1e-10
    assert rpf["eta-rho-rho"] < 1e-10


def test_gauge_identity_and_worked_example():
    m = models.build_eta_einstein(r0=4.0)
    fs = fr.frame_from_model(m, PT)
    fs0 = fr.gauge_transform(fs, 0.0)
    assert np.abs(
        riemann.values(fs0.omega) - riemann.values(fs.omega)
    ).max() < 1e-12
    c = fr.CurvatureCoeffs(a1=1.0, a2=2.0, b1=3.0, b2=4.0, gamma=5.0, sigma=1)
    c2 = fr.gauge_action(c, 0.5)
    assert (c2.a1, c2.a2, c2.b1, c2.b2, c2.gamma) == (0.0, 2.0, 1.0, 4.0, 7.5)
    i1, i2 = fr.invariants(c), fr.invariants(c2)
    assert i1["I2"] == -2.0 and i2["I2"] == -2.0
    assert i1["I1"] == 52.0 and i2["I1"] == 52.0


def test_gauge_laws_under_random_functions():
    m = models.build_contact_potential(Y1, 2.0 * Y2, f3=X1 * X2)
    rng = np.random.default_rng(37)
    fs = fr.frame_from_model(m, PT)
    basis = [ex.ONE, X1, X2, Y1, Y2, X1 * X2, Y1 * Y2, ex.pow_(X1, 2)]
    for _ in range(10):
        cs = rng.uniform(-1, 1, size=len(basis))
        alpha = ex.add(*[ex.const(c) * b for c, b in zip(cs, basis)])
        fs2 = fr.gauge_transform(fs, alpha)
        checks = fr.gauge_checks(fs, fs2, alpha)
        assert max(checks.values()) < 1e-8, checks
        assert max(fr.frame_invariants(fs2).values()) < 1e-8


def test_gauge_with_sign_flips_keeps_frame_valid():
    m = models.build_eta_einstein(r0=4.0)
    fs = fr.frame_from_model(m, PT)
    for f1, f2 in ((True, False), (False, True), (True, True)):
        fs2 = fr.gauge_transform(fs, 0.3, flip1=f1, flip2=f2)
        assert max(fr.frame_invariants(fs2).values()) < 1e-8
        c2 = fr.extract_coeffs(fs2)
        # eigenvalue coefficients are flip-independent
        c = fr.extract_coeffs(fs)
        assert c2.a2 == pytest.approx(c.a2, abs=1e-10)
        assert c2.b2 == pytest.approx(c.b2, abs=1e-10)


def test_gauge_action_matches_frame_measurement():
    m = models.build_eta_einstein(r0=-2.0, u0=X1 * X2)
    fs = fr.frame_from_model(m, PT)
    c0 = fr.extract_coeffs(fs)
    alpha = ex.const(0.4) * X1 + ex.const(0.2) * Y1 * Y2
    fs2 = fr.gauge_transform(fs, alpha)
    c2 = fr.extract_coeffs(fs2)
    a0 = alpha.evaluate(dict(zip(m.names, PT)))
    pred = fr.gauge_action(c0, a0)
    for f in ("a1", "a2", "b1", "b2", "gamma"):
        assert getattr(c2, f) == pytest.approx(getattr(pred, f), abs=1e-8)


def test_gauge_normalization_of_mixing_coefficient():
    # a gauge with alpha = a1/a2 removes the mixing coefficient, realizing
    # the normalized frame of the eta-Einstein classification
    m = models.build_eta_einstein(r0=4.0, u0=X1 * X2)
    fs = fr.frame_from_model(m, PT)
    seeded = fr.gauge_transform(fs, 0.7)  # create nonzero a1 first
    c = fr.extract_coeffs(seeded)
    assert abs(c.a1) > 1e-3
    fixed = fr.gauge_transform(seeded, c.a1 / c.a2)
    cf = fr.extract_coeffs(fixed)
    assert abs(cf.a1) < 1e-9
    # direction check: a1' = a1 - alpha a2 = a1 + alpha r0/4 for a2 = -r0/4
    stepped = fr.gauge_action(c, 0.5)
    assert stepped.a1 == pytest.approx(c.a1 - 0.5 * c.a2, abs=1e-12)


def test_group_law_exact_over_rationals():
    c = fr.CurvatureCoeffs(
        a1=Fraction(1, 3), a2=Fraction(2, 7), b1=Fraction(-3, 5),
        b2=Fraction(4, 9), gamma=Fraction(5, 11), sigma=1,
    )
    a, b = Fraction(7, 13), Fraction(-2, 3)
    lhs = fr.gauge_action(fr.gauge_action(c, a), b)
    rhs = fr.gauge_action(c, a + b)
    for f in ("a1", "a2", "b1", "b2", "gamma"):
        assert getattr(lhs, f) == getattr(rhs, f)


def test_invariants_preserved_over_draws():
    rng = np.random.default_rng(39)
    worst = 0.0
    alt_moves = 0
    for _ in range(100):
        c = fr.CurvatureCoeffs(*rng.uniform(-2, 2, size=5), sigma=1)
        alpha = float(rng.uniform(-2, 2))
        c2 = fr.gauge_action(c, alpha)
        i0, i1 = fr.invariants(c), fr.invariants(c2)
        worst = max(
            worst,
            abs(i0["I1"] - i1["I1"]),
            abs(i0["I2"] - i1["I2"]),
            abs(i0["detRbar"] - i1["detRbar"]),
        )
        if abs(i0["I1-alt-2gamma"] - i1["I1-alt-2gamma"]) > 1e-6:
            alt_moves += 1
    assert worst < 1e-12
    assert alt_moves > 50  # the (sigma + 2 gamma) variant is NOT invariant


def test_curvature_matrix_shape():
    c = fr.CurvatureCoeffs(a1=1.0, a2=2.0, b1=3.0, b2=4.0, gamma=5.0, sigma=1)
    Rbar = fr.curvature_matrix(c)
    assert Rbar[1, 2] == Rbar[2, 1] == 0.0
    assert np.abs(Rbar - Rbar.T).max() == 0.0


def test_weyl_labels_across_models():
    for m in nondegenerate_models():
        pt = m.sample_points(1, seed=41)[0]
        fs = fr.frame_from_model(m, pt)
        coeffs = fr.extract_coeffs(fs)
        W = fr.weyl_frame_components(fs, coeffs)
        assert W["off-support"] < 1e-7
        exp = W["expected"]
        r = -2.0 * (coeffs.a2 + coeffs.b2)
        got = W["edges"].get(((1, 4), (2, 3)), 0.0)
        assert got == pytest.approx(-r / 12.0, abs=1e-7)
        for nm, key in (
            ("edge-01-02", ((0, 1), (0, 2))),
            ("edge-01-03", ((0, 1), (0, 3))),
            ("edge-02-04", ((0, 2), (0, 4))),
            ("edge-12-34", ((1, 2), (3, 4))),
        ):
            assert W["edges"].get(key, 0.0) == pytest.approx(
                exp[nm], abs=1e-7
            )
        for nm, key in (("loop-13", (1, 3)), ("loop-24", (2, 4))):
            assert W["loops"].get(key, 0.0) == pytest.approx(
                exp[nm], abs=1e-7
            )


def test_eta_einstein_weyl_blocks_vanish():
    # equal eigenvalues and no mixing: all (b2-a2)- and (a1, b1)-labelled
    # entries vanish
    m = models.build_eta_einstein(r0=4.0)
    fs = fr.frame_from_model(m, PT)
    coeffs = fr.extract_coeffs(fs)
    W = fr.weyl_frame_components(fs, coeffs)
    for key in (((0, 1), (0, 2)), ((0, 1), (0, 3)), ((0, 2), (0, 4)),
                ((1, 2), (1, 3)), ((1, 2), (2, 4))):
        assert abs(W["edges"].get(key, 0.0)) < 1e-10


def test_weyl_commutator_implication():
    # across the bundled families: [C, phi] ~ 0 at a point forces Ric ~ 0
    for m in nondegenerate_models():
        pt = m.sample_points(1, seed=43)[0]
        fs = fr.frame_from_model(m, pt)
        W = fr.weyl_frame_components(fs)
        if W["phi-commutator"] < 1e-9:
            assert W["ricci-norm"] < 1e-8
