"""Model constructors: constraints, serialization, sampling."""

import json

import numpy as np
import pytest

from pcgeom import expr as ex
from pcgeom import models, riemann
from pcgeom.errors import ConfigError, ConstraintError

X1, X2, Y1, Y2 = (ex.var(n) for n in ("x1", "x2", "y1", "y2"))


def test_config_round_trip_reproduces_oracle_bit_for_bit():
    cases = [
        models.build_eta_einstein(r0=-2.0, u0=X1 * X2, f0=ex.pow_(X1, 2)),
        models.build_contact_potential(Y1, 2.0 * Y2, f3=X1 * X2),
        models.build_generalized_eta_einstein(A1=X2, A2=X1, B=ex.const(2.0)),
        models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(X1)),
        models.build_example1(),
        models.build_dim3(ex.pow_(ex.var("x"), 3)),
    ]
    for m in cases:
        blob = json.dumps(m.to_config(), sort_keys=True)
        m2 = models.from_config(json.loads(blob))
        assert json.dumps(m2.to_config(), sort_keys=True) == blob
        for pt in m.sample_points(3, seed=44):
            c1 = riemann.curvature_at(m, pt, 2)
            c2 = riemann.curvature_at(m2, pt, 2)
            assert np.array_equal(c1.rm_low, c2.rm_low)
            assert np.array_equal(c1.ricci, c2.ricci)
            assert c1.scalar == c2.scalar


def test_flat_constraint_negative_control():
    with pytest.raises(ConstraintError):
        models.build_flat(A=None, B=None, sigma=1)  # residual = sigma = 1


def test_flat_constraint_verified_cases():
    # alpha1 = alpha2 = 1, A = 0, B = -sigma x1 satisfies the balance
    m = models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(X1), sigma=1)
    for pt in m.sample_points(10, seed=45):
        assert np.abs(riemann.curvature_at(m, pt, 2).rm_low).max() < 1e-12


def test_flat_preset_mode_manufactures_solution():
    B = ex.const(0.5) * ex.pow_(X1, 2) * X2
    m = models.build_flat(B=B, mode="preset-zero-alpha", sigma=1)
    A = m.params["A"]
    resid = (
        A.diff("x2").diff("x2") + B.diff("x1").diff("x1") + ex.ONE
    )
    assert ex.poly_dict(resid, ("x1", "x2")) == {}
    for pt in m.sample_points(5, seed=46):
        assert np.abs(riemann.curvature_at(m, pt, 2).rm_low).max() < 1e-11


def test_flat_alpha_dependency_enforced():
    with pytest.raises(ConstraintError):
        models.build_flat(alpha1=X2, B=ex.neg(X1))  # alpha1 must depend on x1


def test_contact_guard_rejects_vanishing_derivative():
    with pytest.raises(ConstraintError):
        models.build_contact_potential(ex.pow_(Y1, 2), Y2)  # f1_y1 = 2 y1


def test_generalized_requires_nonvanishing_B():
    with pytest.raises(ConstraintError):
        models.build_generalized_eta_einstein(B=X1)


def test_eta_einstein_rejects_zero_r0():
    with pytest.raises(ConstraintError):
        models.build_eta_einstein(r0=0.0)


def test_dim3_sign_validation():
    with pytest.raises(ConstraintError):
        models.build_dim3(ex.ZERO, eps1=2)


def test_config_errors():
    with pytest.raises(ConfigError):
        models.from_config({"no": "family"})
    with pytest.raises(ConfigError):
        models.from_config({"family": "unknown"})
    with pytest.raises(ConfigError):
        models.from_config({"family": "flat", "sigma": 3})
    with pytest.raises(ConfigError):
        models.from_config(
            {"family": "dim3", "params": {"b": {"op": "nope"}}}
        )


def test_sampling_is_deterministic_and_guarded():
    m = models.build_contact_potential(
        Y1 + ex.const(0.2) * ex.pow_(Y1, 3), Y2
    )
    a = m.sample_points(25, seed=47)
    b = m.sample_points(25, seed=47)
    assert a == b
    env = lambda p: dict(zip(m.names, p))  # noqa: E731
    f1y = m.params["f1"].diff("y1")
    for pt in a:
        assert abs(f1y.evaluate(env(pt))) >= 1e-3


def test_constraint_identities_hold_symbolically():
    # du/dy1 + y1 df1/dy1 = 0 and dv/dy2 - y2 df2/dy2 = 0 by construction
    f1 = X1 * Y1 + ex.const(0.25) * ex.pow_(Y1, 3) + Y1
    f2 = Y2 + X2 * Y2
    m = models.build_contact_potential(f1, f2, u_free=X1 * X2)
    th3_x1 = m.coframe_rows[3][1]
    names = ("t", "x1", "x2", "y1", "y2")
    # recover u from the stored coframe: theta^3_x1 = u - t + f1_x1
    u = th3_x1 + ex.var("t") - f1.diff("x1")
    resid_u = u.diff("y1") + Y1 * f1.diff("y1")
    assert ex.poly_dict(resid_u, names) == {}
    th4_x2 = m.coframe_rows[4][2]
    v = th4_x2 + ex.var("t") - f2.diff("x2")  # sigma = 1
    resid_v = v.diff("y2") - Y2 * f2.diff("y2")
    assert ex.poly_dict(resid_v, names) == {}


def test_coframe_pointwise_independence():
    cases = [
        models.build_eta_einstein(r0=4.0, u0=X1 * X2),
        models.build_contact_potential(Y1, 2.0 * Y2, f3=X1 * X2),
        models.build_flat(alpha1=ex.ONE, alpha2=ex.ONE, B=ex.neg(X1)),
    ]
    for m in cases:
        for pt in m.sample_points(10, seed=48):
            M = riemann.values(np.asarray(m.coframe_jets(pt, 0), dtype=object))
            assert abs(np.linalg.det(M)) > 1e-6


def test_xi_flip_keeps_metric_and_phi():
    m = models.build_eta_einstein(r0=4.0)
    f = m.with_flipped_xi()
    pt = m.sample_points(1, seed=49)[0]
    assert np.array_equal(m.metric_values(pt), f.metric_values(pt))
    pm = riemann.values(np.asarray(m.phi_jets(pt, 0), dtype=object))
    pf = riemann.values(np.asarray(f.phi_jets(pt, 0), dtype=object))
    assert np.array_equal(pm, pf)
    xm = riemann.values(np.asarray(m.xi_jets(pt, 0), dtype=object))
    xf = riemann.values(np.asarray(f.xi_jets(pt, 0), dtype=object))
    assert np.array_equal(xm, -xf)


def test_bundled_configs_load():
    import pathlib

    cfg_dir = pathlib.Path(models.__file__).parent / "configs"
    files = sorted(cfg_dir.glob("*.json"))
    assert len(files) >= 12
    for f in files:
        m = models.from_config(json.loads(f.read_text()))
        assert m.dim in (3, 5)
