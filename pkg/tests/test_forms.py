"""Exterior calculus: wedge, d, contraction, phi action and decomposition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcgeom import expr as ex
from pcgeom import forms, models, pac, riemann

NAMES5 = ("t", "x1", "x2", "y1", "y2")
PT = (0.1, 0.2, -0.3, 0.4, 0.5)


def dx(i, n=5):
    return forms.DifferentialForm(n, 1, {(i,): 1.0})


def test_wedge_square_vanishes():
    a = dx(1)
    assert forms.wedge(a, a).norm() == 0.0


def test_wedge_antisymmetry_convention():
    a, b = dx(1), dx(2)
    ab = forms.wedge(a, b)
    X = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
    Y = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    assert ab(X, Y) == 1.0
    assert ab(Y, X) == -1.0


def test_wedge_beyond_dimension_is_zero():
    vol = forms.wedge_all(*[dx(i) for i in range(5)])
    assert vol.comp[(0, 1, 2, 3, 4)] == 1.0
    assert forms.wedge(vol, dx(0)).norm() == 0.0


def test_d_of_dt_vanishes():
    dt = forms.DifferentialForm(5, 1, {(0,): ex.ONE})
    assert forms.exterior_d_symbolic(dt, NAMES5).comp == {}


def test_d_of_x1_dx2():
    a = forms.DifferentialForm(5, 1, {(2,): ex.var("x1")})
    da = forms.exterior_d_symbolic(a, NAMES5)
    assert set(da.comp) == {(1, 2)}
    assert da.comp[(1, 2)].evaluate({}) == 1.0


def test_d_tau1_of_eta_einstein_frame():
    # tau1 = -(r0/4) y1 dx1 with r0 = 4: d tau1 = -(dy1 ^ dx1) = dx1 ^ dy1
    tau1 = forms.DifferentialForm(5, 1, {(1,): ex.neg(ex.var("y1"))})
    d = forms.exterior_d_symbolic(tau1, NAMES5)
    assert set(d.comp) == {(1, 3)}
    assert d.comp[(1, 3)].evaluate({}) == 1.0


def _random_symbolic_form(rng, degree):
    vars5 = [ex.var(n) for n in NAMES5]
    comp = {}
    from itertools import combinations

    for I in combinations(range(5), degree):
        if rng.uniform() < 0.6:
            e = ex.const(rng.uniform(-1, 1))
            for _ in range(rng.integers(0, 3)):
                e = e * vars5[rng.integers(0, 5)]
            comp[I] = e
    return forms.DifferentialForm(5, degree, comp)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_d_squared_vanishes(seed, degree):
    rng = np.random.default_rng(seed)
    a = _random_symbolic_form(rng, degree)
    dda = forms.exterior_d_symbolic(
        forms.exterior_d_symbolic(a, NAMES5), NAMES5
    )
    worst = 0.0
    for _ in range(5):
        p = tuple(rng.uniform(-0.9, 0.9, size=5))
        worst = max(worst, dda.at(NAMES5, p).norm())
    assert worst < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_graded_leibniz(seed):
    rng = np.random.default_rng(seed)
    a = _random_symbolic_form(rng, 1)
    b = _random_symbolic_form(rng, 2)
    lhs = forms.exterior_d_symbolic(forms.wedge(a, b), NAMES5)
    # deg a = 1: d(a ^ b) = da ^ b - a ^ db
    rhs = forms.wedge(forms.exterior_d_symbolic(a, NAMES5), b) - forms.wedge(
        a, forms.exterior_d_symbolic(b, NAMES5)
    )
    for _ in range(5):
        p = tuple(rng.uniform(-0.9, 0.9, size=5))
        assert (lhs.at(NAMES5, p) - rhs.at(NAMES5, p)).norm() < 1e-10


def test_symbolic_and_jet_derivatives_agree():
    rng = np.random.default_rng(7)
    a = _random_symbolic_form(rng, 2)
    for _ in range(5):
        p = tuple(rng.uniform(-0.9, 0.9, size=5))
        sym = forms.exterior_d_symbolic(a, NAMES5).at(NAMES5, p)
        num = forms.exterior_d_at(a, NAMES5, p)
        assert (sym - num).norm() < 1e-12


def test_interior_product_examples():
    m = models.build_eta_einstein(r0=4.0)
    xi = np.array([j.value for j in m.xi_jets(PT, 0)])
    eta = m.eta_form(PT)
    assert forms.interior_product(xi, eta)() == pytest.approx(1.0)
    # i_xi Phi = 0
    Phi = _fundamental_form(m, PT)
    assert forms.interior_product(xi, Phi).norm() < 1e-14


def _fundamental_form(m, pt):
    F = riemann.values(np.asarray(m.fundamental_form_jets(pt, 0), dtype=object))
    return forms.DifferentialForm(
        m.dim, 2,
        {(a, b): F[a, b] for a in range(m.dim) for b in range(a + 1, m.dim)},
    )


def test_interior_product_antiderivation():
    rng = np.random.default_rng(11)
    tau = forms.DifferentialForm(5, 1, {(i,): rng.uniform(-1, 1) for i in range(5)})
    om = forms.DifferentialForm(
        5, 2, {(a, b): rng.uniform(-1, 1) for a in range(5) for b in range(a + 1, 5)}
    )
    V = rng.uniform(-1, 1, size=5)
    lhs = forms.interior_product(V, forms.wedge(tau, om))
    tauV = forms.interior_product(V, tau)()
    rhs = om * tauV - forms.wedge(tau, forms.interior_product(V, om))
    assert (lhs - rhs).norm() < 1e-12


def test_phi_action_examples():
    m = models.build_contact_potential(ex.var("y1"), ex.var("y2"))
    rng = np.random.default_rng(13)
    for _ in range(20):
        p = tuple(rng.uniform(-0.9, 0.9, size=5))
        P = riemann.values(np.asarray(m.phi_jets(p, 0), dtype=object))
        eta = m.eta_form(p)
        assert forms.pullback_endomorphism(eta, P).norm() < 1e-13
        Phi = _fundamental_form(m, p)
        assert (forms.pullback_endomorphism(Phi, P) + Phi).norm() < 1e-12


def test_phi_null_part_is_annihilated():
    m = models.build_eta_einstein(r0=4.0)
    rng = np.random.default_rng(17)
    P = riemann.values(np.asarray(m.phi_jets(PT, 0), dtype=object))
    xi = np.array([j.value for j in m.xi_jets(PT, 0)])
    eta = np.array([j.value for j in m.eta_jets(PT, 0)])
    kappa = forms.DifferentialForm(
        5, 2, {(a, b): rng.uniform(-1, 1) for a in range(5) for b in range(a + 1, 5)}
    )
    eta_f = forms.form_from_covector(eta)
    null = forms.wedge(eta_f, forms.interior_product(xi, kappa))
    assert forms.pullback_endomorphism(null, P).norm() < 1e-12


def test_phi_decomposition():
    m = models.build_flat(A=ex.const(-0.5) * ex.pow_(ex.var("x2"), 2))
    rng = np.random.default_rng(19)
    P = riemann.values(np.asarray(m.phi_jets(PT, 0), dtype=object))
    xi = np.array([j.value for j in m.xi_jets(PT, 0)])
    eta = np.array([j.value for j in m.eta_jets(PT, 0)])
    # kappa = Phi decomposes as purely anti-invariant
    Phi = _fundamental_form(m, PT)
    plus, minus, null = forms.phi_decompose(Phi, P, xi, eta)
    assert plus.norm() < 1e-12 and null.norm() < 1e-12
    assert (minus - Phi).norm() < 1e-12
    # eta ^ dx1 is phi-null
    k0 = forms.wedge(forms.form_from_covector(eta), dx(1))
    p0, m0, n0 = forms.phi_decompose(k0, P, xi, eta)
    assert p0.norm() < 1e-12 and m0.norm() < 1e-12
    assert (n0 - k0).norm() < 1e-12
    # random 2-form reassembles, projections idempotent and annihilating
    kappa = forms.DifferentialForm(
        5, 2, {(a, b): rng.uniform(-1, 1) for a in range(5) for b in range(a + 1, 5)}
    )
    plus, minus, null = forms.phi_decompose(kappa, P, xi, eta)
    assert (plus + minus + null - kappa).norm() < 1e-12
    assert (forms.pullback_endomorphism(plus, P) - plus).norm() < 1e-11
    assert (forms.pullback_endomorphism(minus, P) + minus).norm() < 1e-11
    assert forms.pullback_endomorphism(null, P).norm() < 1e-11
    pp, pm, pn = forms.phi_decompose(plus, P, xi, eta)
    assert (pp - plus).norm() < 1e-11 and pm.norm() < 1e-11 and pn.norm() < 1e-11


def test_contact_volume_and_flat_volume():
    # eta ^ rho ^ rho is a nonzero 5-form on a contact-potential model
    mc = models.build_contact_potential(ex.var("y1"), ex.var("y2"))
    curv = riemann.curvature_at(mc, PT, 3)
    rho, _ = pac.ricci_form(mc, PT, curv)
    eta = forms.form_from_covector(
        np.array([j.value for j in mc.eta_jets(PT, 0)])
    )
    contact = forms.wedge_all(eta, rho, rho)
    assert contact.norm() > 1e-6
    # r Phi ^ Phi = 0 on a flat chart (r = 0)
    mf = models.build_flat(A=ex.const(-0.5) * ex.pow_(ex.var("x2"), 2))
    curvf = riemann.curvature_at(mf, PT, 3)
    Phi = _fundamental_form(mf, PT)
    assert (forms.wedge(Phi, Phi) * curvf.scalar).norm() < 1e-14


def test_closedness_of_structure_forms_on_all_models():
    x1, x2, y1, y2 = (ex.var(n) for n in ("x1", "x2", "y1", "y2"))
    cases = [
        models.build_eta_einstein(r0=4.0, u0=x1 * x2),
        models.build_contact_potential(y1, 2.0 * y2, f3=x1 * x2),
        models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(x1)),
        models.build_example1(),
        models.build_dim3(ex.var("x") * ex.var("y")),
    ]
    for m in cases:
        for pt in m.sample_points(100, seed=5):
            res = pac.closedness_residuals(m, pt)
            assert max(res.values()) < 1e-10, (m.family, pt, res)
