"""Grid gravity: Christoffels, curvature, actions, tetrads."""

import numpy as np
import pytest

from gaugebench.gravity import (
    DegenerateMetric,
    DegenerateTetrad,
    DimensionError,
    MetricGrid,
    TetradField,
    christoffel,
    composite_field,
    conformal_grid,
    curvature_tensors,
    eh_action,
    flat_grid,
    grid_gradient,
    interior_slice,
    levi_civita_spin_connection,
    metric_from_tetrad,
    palatini_action,
    rotate_tetrad,
    scalar_curvature,
    sphere_cross_flat_tetrad,
    sphere_grid,
    spin_curvature,
)

RADIUS = 1.7


def sphere_setup(n_theta, n_phi=8):
    m = sphere_grid(RADIUS, n_theta, n_phi)
    gamma = christoffel(m)
    return m, gamma


# --- Christoffel symbols ----------------------------------------------------


def test_flat_christoffels_vanish():
    assert np.max(np.abs(christoffel(flat_grid(2, 8)))) == 0.0
    assert np.max(np.abs(christoffel(flat_grid(3, 6)))) == 0.0


def test_sphere_christoffels_match_closed_form():
    m, gamma = sphere_setup(64)
    sl = interior_slice(m.extents, 1)
    th = m.axes[0][1:-1][:, None] * np.ones((1, m.extents[1] - 2))
    h = m.spacings[0]
    assert np.max(np.abs(gamma[sl][..., 0, 1, 1] + np.sin(th) * np.cos(th))) <= 5 * h ** 2
    assert np.max(np.abs(gamma[sl][..., 1, 0, 1] - 1.0 / np.tan(th))) <= 40 * h ** 2


def test_conformal_christoffels_match_closed_form():
    # g = exp(2 lam) delta with linear lam: G^r_mn = d_m lam d^r_n-pattern
    a, b = 0.2, -0.1
    m = conformal_grid((a, b), count=24)
    gamma = christoffel(m)
    sl = interior_slice(m.extents, 1)
    dlam = np.array([a, b])
    expected = np.zeros((2, 2, 2))
    for rho in range(2):
        for mu in range(2):
            for nu in range(2):
                expected[rho, mu, nu] = (
                    (rho == mu) * dlam[nu]
                    + (rho == nu) * dlam[mu]
                    - (mu == nu) * dlam[rho]
                )
    assert np.max(np.abs(gamma[sl] - expected)) <= 1e-4


def test_christoffel_symmetric_exactly():
    m, gamma = sphere_setup(24)
    assert np.array_equal(gamma, np.swapaxes(gamma, -1, -2))


def test_degenerate_metric_rejected():
    m = flat_grid(2, 8)
    g = m.g.copy()
    g[4, 4] = 0.0
    with pytest.raises(DegenerateMetric):
        christoffel(MetricGrid(m.axes, g))


# --- curvature ----------------------------------------------------------------


def test_flat_curvature_vanishes():
    m = flat_grid(3, 6)
    tens = curvature_tensors(christoffel(m), m)
    assert np.max(np.abs(tens.riemann)) <= 1e-12
    assert np.max(np.abs(tens.ricci)) <= 1e-12


def test_levi_civita_torsion_is_zero():
    m, gamma = sphere_setup(24)
    tens = curvature_tensors(gamma, m)
    assert np.max(np.abs(tens.torsion)) == 0.0


def test_hand_made_torsion():
    m = flat_grid(2, 8)
    gamma = np.zeros((*m.extents, 2, 2, 2))
    gamma[..., 1, 0, 1] = 0.7
    gamma[..., 1, 1, 0] = 0.2
    tens = curvature_tensors(gamma, m)
    assert np.allclose(tens.torsion[..., 1, 0, 1], 0.5)
    assert np.allclose(tens.torsion[..., 1, 1, 0], -0.5)


def test_sphere_scalar_curvature_and_order():
    errs = []
    for n in (48, 96, 192):
        m, gamma = sphere_setup(n)
        R = scalar_curvature(m, curvature_tensors(gamma, m).ricci)
        window = (m.axes[0] >= 0.6) & (m.axes[0] <= np.pi - 0.6)
        errs.append(
            np.max(np.abs(R[window][:, 2:-2] - 2 / RADIUS ** 2)) * RADIUS ** 2 / 2
        )
    assert errs[-1] <= 0.01
    order = np.log2(errs[0] / errs[1])
    assert order == pytest.approx(2.0, abs=0.35)
    # full interior at finest grid also meets the 1% bound
    m, gamma = sphere_setup(192)
    R = scalar_curvature(m, curvature_tensors(gamma, m).ricci)
    sl = interior_slice(m.extents, 2)
    assert np.max(np.abs(R[sl] - 2 / RADIUS ** 2)) * RADIUS ** 2 / 2 <= 0.01


def test_chart_point_independence():
    m, gamma = sphere_setup(192)
    R = scalar_curvature(m, curvature_tensors(gamma, m).ricci)
    inner = R[interior_slice(m.extents, 2)]
    assert (inner.max() - inner.min()) / inner.mean() <= 0.02


def test_metric_compatibility_is_algebraic():
    m, gamma = sphere_setup(32)
    dg = np.stack([grid_gradient(m.g, m, mu) for mu in range(2)], axis=-3)
    comp = dg - np.einsum("...srm,...sn->...rmn", gamma, m.g)
    comp = comp - np.einsum("...srn,...ms->...rmn", gamma, m.g)
    assert np.max(np.abs(comp)) <= 1e-12


def test_first_bianchi_for_levi_civita():
    m, gamma = sphere_setup(32)
    r = curvature_tensors(gamma, m).riemann
    cyc = r + np.einsum("...rsmn->...rmns", r) + np.einsum("...rsmn->...rnsm", r)
    assert np.max(np.abs(cyc[interior_slice(m.extents, 2)])) <= 1e-10


# --- curvature-scalar action -----------------------------------------------------


def test_flat_action_is_zero():
    res = eh_action(flat_grid(2, 8), 1.0)
    assert res.value == 0.0
    assert res.dimension_warning  # d = 2


def analytic_patch_action(m, margin=2):
    theta, phi = m.axes
    hth, hph = m.spacings
    th_lo = theta[margin] - hth / 2
    th_hi = theta[-margin - 1] + hth / 2
    width = (phi[-margin - 1] + hph / 2) - (phi[margin] - hph / 2)
    area = RADIUS ** 2 * (np.cos(th_lo) - np.cos(th_hi)) * width
    return -(2 / RADIUS ** 2) * area / (16 * np.pi)


def test_sphere_action_matches_analytic():
    m = sphere_grid(RADIUS, 96, 10)
    res = eh_action(m, 1.0)
    assert res.value == pytest.approx(analytic_patch_action(m), rel=0.02)


def test_sphere_action_refinement_order():
    # scaled margins keep the integration window fixed across refinements
    errs = []
    for n, margin in ((33, 4), (65, 8), (129, 16)):
        m = sphere_grid(RADIUS, n, n)
        v = eh_action(m, 1.0, margin=margin).value
        errs.append(abs(v - analytic_patch_action(m, margin=margin)))
    assert errs[2] < errs[1] < errs[0]
    order = np.log2(errs[1] / errs[2])
    assert order == pytest.approx(2.0, abs=0.4)


# --- tetrads ----------------------------------------------------------------------


def test_identity_tetrad_gives_flat_metric():
    t = TetradField(
        flat_grid(2, 8).axes,
        np.broadcast_to(np.eye(2), (8, 8, 2, 2)).copy(),
        np.eye(2),
    )
    g = metric_from_tetrad(t)
    assert np.allclose(g.g, np.eye(2))


def test_spherical_frame_metric():
    # 3d chart with frame diag(1, r, r sin theta)
    r_ax = np.linspace(0.5, 1.5, 8)
    th_ax = np.linspace(0.4, np.pi - 0.4, 8)
    ph_ax = np.linspace(0.0, 1.0, 8)
    ext = (8, 8, 8)
    lam = np.zeros((*ext, 3, 3))
    Rg, Tg = np.meshgrid(r_ax, th_ax, indexing="ij")
    lam[..., 0, 0] = 1.0
    lam[..., 1, 1] = Rg[..., None] * np.ones(ext)[0, 0, :]
    lam[..., 2, 2] = (Rg * np.sin(Tg))[..., None] * np.ones(ext)[0, 0, :]
    t = TetradField((r_ax, th_ax, ph_ax), lam, np.eye(3))
    g = metric_from_tetrad(t)
    assert np.allclose(g.g[..., 0, 0], 1.0)
    assert np.allclose(g.g[..., 1, 1], (Rg ** 2)[..., None], atol=1e-12)
    assert np.allclose(g.g[..., 2, 2], ((Rg * np.sin(Tg)) ** 2)[..., None], atol=1e-12)
    off = g.g.copy()
    for i in range(3):
        off[..., i, i] = 0.0
    assert np.max(np.abs(off)) == 0.0


def test_metric_invariant_under_frame_rotation():
    rng = np.random.default_rng(0)
    axes = flat_grid(2, 8).axes
    lam = np.eye(2) + 0.3 * rng.standard_normal((8, 8, 2, 2))
    t = TetradField(axes, lam, np.eye(2))
    th = 0.8
    h = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    t2 = rotate_tetrad(t, h)
    assert np.max(np.abs(metric_from_tetrad(t2).g - metric_from_tetrad(t).g)) <= 1e-12


def test_singular_tetrad_rejected():
    axes = flat_grid(2, 8).axes
    lam = np.broadcast_to(np.eye(2), (8, 8, 2, 2)).copy()
    lam[3, 3] = 0.0
    with pytest.raises(DegenerateTetrad):
        metric_from_tetrad(TetradField(axes, lam, np.eye(2)))


# --- composite field ----------------------------------------------------------------


def test_trivial_composite_field_vanishes():
    axes = flat_grid(2, 8).axes
    t = TetradField(
        axes,
        np.broadcast_to(np.eye(2), (8, 8, 2, 2)).copy(),
        np.eye(2),
        Gamma_spin=np.zeros((8, 8, 2, 2, 2)),
    )
    assert np.max(np.abs(composite_field(t))) == 0.0


def make_smooth_tetrad(n=10):
    rng = np.random.default_rng(3)
    axes = tuple(np.linspace(0.0, 1.0, n) for _ in range(2))
    X, Y = np.meshgrid(*axes, indexing="ij")
    lam = np.zeros((n, n, 2, 2))
    lam[..., 0, 0] = 1.0 + 0.2 * np.sin(X)
    lam[..., 1, 1] = 1.0 + 0.1 * Y
    lam[..., 0, 1] = 0.05 * X * Y
    gam = 0.1 * rng.standard_normal((2, 2, 2)) * np.ones((n, n, 2, 2, 2))
    gam = gam + 0.05 * np.sin(X)[..., None, None, None]
    return TetradField(axes, lam, np.eye(2), Gamma_spin=gam)


def test_composite_field_rotation_invariance():
    t = make_smooth_tetrad()
    th = 0.5
    h = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    c1 = composite_field(t)
    c2 = composite_field(rotate_tetrad(t, h))
    sl = interior_slice(t.extents, 1)
    assert np.max(np.abs((c1 - c2)[sl])) <= 1e-12


def test_composite_of_levi_civita_matches_christoffels():
    t0 = sphere_cross_flat_tetrad(RADIUS, n_theta=14, n_other=6)
    gam = levi_civita_spin_connection(t0)
    t = TetradField(t0.axes, t0.Lambda, t0.eta, gam)
    comp = composite_field(t)
    mg = metric_from_tetrad(t)
    gamma_metric = christoffel(mg)
    sl = interior_slice(t.extents, 1)
    diff = comp - np.einsum("...rms->...rsm", gamma_metric)
    h = max(t.spacings)
    assert np.max(np.abs(diff[sl])) <= 2.0 * h


def test_spin_connection_solves_torsion_free_system():
    t = sphere_cross_flat_tetrad(RADIUS, n_theta=10, n_other=5)
    gam = levi_civita_spin_connection(t)
    grid = MetricGrid(
        t.axes, np.broadcast_to(np.eye(4), (*t.extents, 4, 4)).copy()
    )
    dl = np.stack([grid_gradient(t.Lambda, grid, mu) for mu in range(4)], axis=-1)
    worst = 0.0
    for a in range(4):
        for mu in range(4):
            for nu in range(mu + 1, 4):
                T = dl[..., a, nu, mu] - dl[..., a, mu, nu]
                T = T + np.einsum("...b,...b->...", gam[..., a, :, mu], t.Lambda[..., :, nu])
                T = T - np.einsum("...b,...b->...", gam[..., a, :, nu], t.Lambda[..., :, mu])
                worst = max(worst, float(np.max(np.abs(T))))
    assert worst <= 1e-10
    # frame-metric compatibility: omega^{ab} antisymmetric
    omega_up = np.einsum("...abm,bc->...acm", gam, np.linalg.inv(t.eta))
    assert np.max(np.abs(omega_up + np.swapaxes(omega_up, -3, -2))) <= 1e-10


# --- frame-curvature action -----------------------------------------------------------


def test_palatini_flat_is_zero():
    axes = tuple(np.linspace(0.0, 1.0, 6) for _ in range(4))
    ext = (6, 6, 6, 6)
    t = TetradField(
        axes,
        np.broadcast_to(np.eye(4), (*ext, 4, 4)).copy(),
        np.eye(4),
        Gamma_spin=np.zeros((*ext, 4, 4, 4)),
    )
    assert palatini_action(t, 1.0) == 0.0


def test_palatini_dimension_guard():
    t = make_smooth_tetrad()
    with pytest.raises(DimensionError):
        palatini_action(t, 1.0)


def test_palatini_rotation_invariance():
    t0 = sphere_cross_flat_tetrad(RADIUS, n_theta=10, n_other=5)
    gam = levi_civita_spin_connection(t0)
    t = TetradField(t0.axes, t0.Lambda, t0.eta, gam)
    s0 = palatini_action(t, 1.0)
    th = 0.4
    h = np.eye(4)
    h[0, 0] = h[1, 1] = np.cos(th)
    h[0, 1], h[1, 0] = -np.sin(th), np.sin(th)
    s1 = palatini_action(rotate_tetrad(t, h), 1.0)
    assert abs(s1 - s0) <= 1e-12 * max(1.0, abs(s0))


def test_palatini_matches_metric_action():
    t0 = sphere_cross_flat_tetrad(RADIUS, n_theta=14, n_other=6)
    gam = levi_civita_spin_connection(t0)
    t = TetradField(t0.axes, t0.Lambda, t0.eta, gam)
    s_frame = palatini_action(t, 1.0)
    s_metric = eh_action(metric_from_tetrad(t), 1.0).value
    assert s_frame == pytest.approx(s_metric, rel=0.03)
