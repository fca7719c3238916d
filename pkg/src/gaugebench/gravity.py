"""Grid-based tensor calculus: Levi-Civita connection, curvature, tetrads.

Charts are rectangular and non-periodic; derivatives are central differences
so tensors built from k derivative layers are trusted on the interior with a
k-site margin (christoffel: margin 1, curvature: margin 2).  Quadratures sum
interior cells at the midpoint rule.

Index conventions: Christoffel symbols Gamma[rho, mu, nu] with the derivative
pair symmetric in (mu, nu); Riemann R[rho, sigma, mu, nu]; tetrads
Lambda[a, mu] with frame index first; spin connections Gamma_spin[a, b, mu].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DegenerateMetric(ValueError):
    """Raised when det g collapses at an interior site."""


class DegenerateTetrad(ValueError):
    """Raised when a frame field is singular at an interior site."""


class DimensionError(ValueError):
    """Raised for operations restricted to a specific chart dimension."""


@dataclass
class MetricGrid:
    """Metric samples on a rectangular chart.

    axes: per-axis coordinate arrays (uniformly spaced);
    g: array (*extents, d, d), symmetric at every site;
    signature: "euclidean" or "lorentzian" (pointwise algebra only).
    """

    axes: tuple
    g: np.ndarray
    signature: str = "euclidean"

    def __post_init__(self):
        self.axes = tuple(np.asarray(ax, dtype=float) for ax in self.axes)
        d = len(self.axes)
        ext = self.extents
        self.g = np.asarray(self.g, dtype=float).reshape(*ext, d, d)
        asym = np.max(np.abs(self.g - np.swapaxes(self.g, -1, -2)))
        if asym > 0:
            raise ValueError(f"metric not symmetric, drift {asym:.3e}")
        if self.signature not in ("euclidean", "lorentzian"):
            raise ValueError(f"unknown signature {self.signature!r}")

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def extents(self) -> tuple:
        return tuple(len(ax) for ax in self.axes)

    @property
    def spacings(self) -> tuple:
        return tuple(float(ax[1] - ax[0]) for ax in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def check_nondegenerate(self, margin: int = 1, min_det: float = 1e-10):
        det = np.linalg.det(self.g)
        inner = det[interior_slice(self.extents, margin)]
        worst = float(np.min(np.abs(inner)))
        if worst <= min_det:
            raise DegenerateMetric(f"|det g| down to {worst:.3e} on the interior")


def interior_slice(extents, margin: int):
    return tuple(slice(margin, n - margin) for n in extents)


def grid_gradient(field: np.ndarray, m: MetricGrid, axis: int) -> np.ndarray:
    """Central differences along a chart axis (one-sided rows at the edges
    are produced by numpy but excluded by the margins downstream)."""
    return np.gradient(field, m.spacings[axis], axis=axis, edge_order=1)


def christoffel(m: MetricGrid) -> np.ndarray:
    """Levi-Civita Christoffel symbols, (1/2) g^{rs}(d_n g_sm + d_m g_sn - d_s g_mn).

    Valid on the margin-1 interior; symmetric in the last two indices by
    construction (torsion-free).
    """
    m.check_nondegenerate(margin=1)
    ginv = np.linalg.inv(m.g)
    dg = np.stack([grid_gradient(m.g, m, mu) for mu in range(m.d)], axis=-3)
    # dg[..., s, m, n] = d_s g_mn; assemble explicitly to keep the index
    # order transparent
    gamma = np.zeros((*m.extents, m.d, m.d, m.d))
    for rho in range(m.d):
        for mu in range(m.d):
            for nu in range(m.d):
                acc = 0.0
                for sig in range(m.d):
                    acc = acc + ginv[..., rho, sig] * (
                        dg[..., nu, sig, mu] + dg[..., mu, sig, nu] - dg[..., sig, mu, nu]
                    )
                gamma[..., rho, mu, nu] = 0.5 * acc
    return gamma


class CurvatureTensors(NamedTuple):
    riemann: np.ndarray  # (*ext, d, d, d, d): R[rho, sigma, mu, nu]
    torsion: np.ndarray  # (*ext, d, d, d):    T[rho, mu, nu]
    ricci: np.ndarray    # (*ext, d, d):       R[sigma, nu]


def curvature_tensors(gamma: np.ndarray, m: MetricGrid) -> CurvatureTensors:
    """Riemann, torsion and Ricci tensors of a connection coefficient field.

    R^r_smn = d_m G^r_ns - d_n G^r_ms + G^r_mh G^h_ns - G^r_nh G^h_ms;
    valid on the margin-2 interior when gamma came from :func:`christoffel`.
    """
    dgamma = np.stack([grid_gradient(gamma, m, mu) for mu in range(m.d)], axis=-4)
    # dgamma[..., m, r, a, b] = d_m G^r_ab
    riemann = np.einsum("...mrns->...rsmn", dgamma) - np.einsum(
        "...nrms->...rsmn", dgamma
    )
    riemann = riemann + np.einsum("...rmh,...hns->...rsmn", gamma, gamma) - np.einsum(
        "...rnh,...hms->...rsmn", gamma, gamma
    )
    torsion = gamma - np.swapaxes(gamma, -1, -2)
    ricci = np.einsum("...rsrn->...sn", riemann)
    return CurvatureTensors(riemann=riemann, torsion=torsion, ricci=ricci)


def scalar_curvature(m: MetricGrid, ricci: np.ndarray) -> np.ndarray:
    return np.einsum("...sn,...sn->...", np.linalg.inv(m.g), ricci)


class ActionResult(NamedTuple):
    value: float
    dimension_warning: bool


def eh_action(m: MetricGrid, g_newton: float, margin: int = 2) -> ActionResult:
    """Curvature-scalar action (-1/16 pi G) sum R sqrt|det g| h^d over the interior.

    Any chart dimension is accepted; a warning flag is set when d != 4.
    """
    m.check_nondegenerate(margin=margin)
    gamma = christoffel(m)
    tensors = curvature_tensors(gamma, m)
    R = scalar_curvature(m, tensors.ricci)
    dens = R * np.sqrt(np.abs(np.linalg.det(m.g)))
    inner = dens[interior_slice(m.extents, margin)]
    value = -inner.sum() * m.cell_volume / (16.0 * np.pi * g_newton)
    return ActionResult(value=float(value), dimension_warning=m.d != 4)


# --- tetrads -------------------------------------------------------------------


@dataclass
class TetradField:
    """Frame field Lambda[a, mu], optional spin connection Gamma[a, b, mu], flat eta."""

    axes: tuple
    Lambda: np.ndarray
    eta: np.ndarray
    Gamma_spin: np.ndarray = None

    def __post_init__(self):
        self.axes = tuple(np.asarray(ax, dtype=float) for ax in self.axes)
        d = len(self.axes)
        ext = self.extents
        self.Lambda = np.asarray(self.Lambda, dtype=float).reshape(*ext, d, d)
        self.eta = np.asarray(self.eta, dtype=float).reshape(d, d)
        if self.Gamma_spin is not None:
            self.Gamma_spin = np.asarray(self.Gamma_spin, dtype=float).reshape(
                *ext, d, d, d
            )

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def extents(self) -> tuple:
        return tuple(len(ax) for ax in self.axes)

    @property
    def spacings(self) -> tuple:
        return tuple(float(ax[1] - ax[0]) for ax in self.axes)

    def check_invertible(self, margin: int = 0, min_det: float = 1e-10):
        det = np.linalg.det(self.Lambda)
        inner = det[interior_slice(self.extents, margin)] if margin else det
        worst = float(np.min(np.abs(inner)))
        if worst <= min_det:
            raise DegenerateTetrad(f"|det Lambda| down to {worst:.3e}")

    def grid(self) -> MetricGrid:
        return metric_from_tetrad(self)


def metric_from_tetrad(t: TetradField) -> MetricGrid:
    """g_mn = eta_ab Lambda^a_m Lambda^b_n; invariant under frame rotations."""
    t.check_invertible()
    g = np.einsum("ab,...am,...bn->...mn", t.eta, t.Lambda, t.Lambda)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    return MetricGrid(axes=t.axes, g=g)


def rotate_tetrad(t: TetradField, h: np.ndarray) -> TetradField:
    """Apply a local frame rotation: Lambda -> h^-1 Lambda, Gamma -> h^-1 Gamma h + h^-1 dh."""
    ext = t.extents
    h = np.broadcast_to(np.asarray(h, dtype=float), (*ext, t.d, t.d)).copy()
    hinv = np.linalg.inv(h)
    new_lambda = np.einsum("...ab,...bm->...am", hinv, t.Lambda)
    new_gamma = None
    if t.Gamma_spin is not None:
        grid = MetricGrid(t.axes, np.broadcast_to(np.eye(t.d), (*ext, t.d, t.d)).copy())
        dh = np.stack([grid_gradient(h, grid, mu) for mu in range(t.d)], axis=-1)
        new_gamma = np.einsum("...ac,...cbm,...bd->...adm", hinv, t.Gamma_spin, h)
        # dh[..., a, b, mu]
        new_gamma = new_gamma + np.einsum("...ac,...cbm->...abm", hinv, dh)
    return TetradField(t.axes, new_lambda, t.eta, new_gamma)


def composite_field(t: TetradField) -> np.ndarray:
    """Rotation-invariant combination (Lambda^-1 Gamma Lambda + Lambda^-1 d Lambda).

    Returned as G[rho, sigma, mu] (value indices first, form index last);
    behaves like connection coefficients of a linear connection; exactly
    invariant under constant frame rotations.
    """
    if t.Gamma_spin is None:
        raise ValueError("composite field needs a spin connection")
    t.check_invertible()
    linv = np.linalg.inv(t.Lambda)
    grid = MetricGrid(t.axes, np.broadcast_to(np.eye(t.d), (*t.extents, t.d, t.d)).copy())
    dl = np.stack([grid_gradient(t.Lambda, grid, mu) for mu in range(t.d)], axis=-1)
    # dl[..., a, sigma, mu] = d_mu Lambda^a_sigma
    out = np.einsum("...ra,...abm,...bs->...rsm", linv, t.Gamma_spin, t.Lambda)
    out = out + np.einsum("...ra,...asm->...rsm", linv, dl)
    return out


def levi_civita_spin_connection(t: TetradField) -> np.ndarray:
    """Spin connection solving the torsion-free, frame-metric system per site.

    Unknowns are the eta-antisymmetric components omega^{ab}_mu; equations
    are the vanishing of d_mu Lambda^a_nu - d_nu Lambda^a_mu
    + Gamma^a_{b mu} Lambda^b_nu - Gamma^a_{b nu} Lambda^b_mu for mu < nu.
    Valid on the margin-1 interior.
    """
    t.check_invertible()
    d = t.d
    ext = t.extents
    grid = MetricGrid(t.axes, np.broadcast_to(np.eye(d), (*ext, d, d)).copy())
    dl = np.stack([grid_gradient(t.Lambda, grid, mu) for mu in range(d)], axis=-1)
    pairs_ab = [(a, b) for a in range(d) for b in range(a + 1, d)]
    pairs_mn = [(mu, nu) for mu in range(d) for nu in range(mu + 1, d)]
    n_unk = len(pairs_ab) * d
    n_eq = len(pairs_mn) * d
    A = np.zeros((*ext, n_eq, n_unk))
    rhs = np.zeros((*ext, n_eq))
    eta = t.eta
    for ie, ((mu, nu), a) in enumerate(
        ((mn, a) for mn in pairs_mn for a in range(d))
    ):
        rhs[..., ie] = -(dl[..., a, nu, mu] - dl[..., a, mu, nu])
        for iu, ((c, e), rho) in enumerate(
            ((ce, rho) for ce in pairs_ab for rho in range(d))
        ):
            coeff = 0.0
            # Gamma^a_{b rho} = x_(ce)rho (delta_ac eta_eb - delta_ae eta_cb)
            for b in range(d):
                gam = (1.0 if a == c else 0.0) * eta[e, b] - (
                    1.0 if a == e else 0.0
                ) * eta[c, b]
                if gam == 0.0:
                    continue
                term = np.zeros(ext)
                if rho == mu:
                    term = term + gam * t.Lambda[..., b, nu]
                if rho == nu:
                    term = term - gam * t.Lambda[..., b, mu]
                coeff = coeff + term
            A[..., ie, iu] = coeff
    x = np.linalg.solve(A, rhs[..., None])[..., 0]
    gamma = np.zeros((*ext, d, d, d))
    for iu, ((c, e), rho) in enumerate(
        ((ce, rho) for ce in pairs_ab for rho in range(d))
    ):
        for b in range(d):
            gamma[..., c, b, rho] += x[..., iu] * eta[e, b]
            gamma[..., e, b, rho] -= x[..., iu] * eta[c, b]
    return gamma


def spin_curvature(gamma_spin: np.ndarray, t: TetradField) -> np.ndarray:
    """Frame curvature R^a_{b mu nu} of a spin connection field."""
    d = t.d
    grid = MetricGrid(t.axes, np.broadcast_to(np.eye(d), (*t.extents, d, d)).copy())
    dg = np.stack([grid_gradient(gamma_spin, grid, mu) for mu in range(d)], axis=-1)
    # dg[..., a, b, nu, mu] = d_mu Gamma^a_{b nu}
    R = np.einsum("...abnm->...abmn", dg) - dg
    R = R + np.einsum("...acm,...cbn->...abmn", gamma_spin, gamma_spin) - np.einsum(
        "...acn,...cbm->...abmn", gamma_spin, gamma_spin
    )
    return R


_EPS4 = None


def _eps4():
    global _EPS4
    if _EPS4 is None:
        e = np.zeros((4, 4, 4, 4))
        from itertools import permutations

        for perm in permutations(range(4)):
            inv = sum(
                1
                for i in range(4)
                for j in range(i + 1, 4)
                if perm[i] > perm[j]
            )
            e[perm] = -1.0 if inv % 2 else 1.0
        _EPS4 = e
    return _EPS4


# orientation of the volume pairing, fixed once so the torsion-free reduction
# reproduces the metric (curvature-scalar) action
_ORIENTATION = -1.0


def palatini_action(t: TetradField, g_newton: float, margin: int = 2) -> float:
    """Frame-curvature action (-1/32 pi G) sum of R^a_b wedge star(L^b wedge L_a).

    Components are contracted with the chart's volume symbol and the Hodge
    star of the tetrad metric; exactly invariant under constant frame
    rotations of (Gamma, Lambda).  Requires a 4-dimensional chart.
    """
    if t.d != 4:
        raise DimensionError(f"the frame-curvature action needs d = 4, got {t.d}")
    if t.Gamma_spin is None:
        raise ValueError("needs a spin connection field")
    grid = metric_from_tetrad(t)
    grid.check_nondegenerate(margin=margin)
    ginv = np.linalg.inv(grid.g)
    sqrtg = np.sqrt(np.abs(np.linalg.det(grid.g)))
    R = spin_curvature(t.Gamma_spin, t)
    # lower/raise: L_a^n = eta_ab g^{nk} L^b_k ; L^{b m} = g^{mk} L^b_k
    L_up = np.einsum("...mk,...bk->...bm", ginv, t.Lambda)
    L_low = np.einsum("ab,...bm->...am", t.eta, L_up)
    # (L^b wedge L_a)^{gd} (already contravariant) and its Hodge dual
    wedge = np.einsum("...bg,...ad->...bagd", L_up, L_low)
    wedge = wedge - np.swapaxes(wedge, -2, -1)
    eps = _eps4()
    star = 0.5 * np.einsum("klgd,...bagd->...bakl", eps, wedge)
    star = star * sqrtg[..., None, None, None, None]
    dens = 0.5 * np.einsum("mnkl,...abmn,...bakl->...", eps, R, star)
    inner = dens[interior_slice(t.extents, margin)]
    total = _ORIENTATION * inner.sum() * grid.cell_volume
    return float(-total / (32.0 * np.pi * g_newton))


# --- chart presets ---------------------------------------------------------------


def chart_axes(ranges, counts):
    return tuple(
        np.linspace(lo, hi, n) for (lo, hi), n in zip(ranges, counts)
    )


def flat_grid(d: int, count: int = 8, width: float = 1.0) -> MetricGrid:
    axes = chart_axes([(0.0, width)] * d, [count] * d)
    ext = tuple(count for _ in range(d))
    g = np.broadcast_to(np.eye(d), (*ext, d, d)).copy()
    return MetricGrid(axes=axes, g=g)


def sphere_grid(
    radius: float,
    n_theta: int = 32,
    n_phi: int = 16,
    theta_range=(0.3, np.pi - 0.3),
    phi_range=(0.0, 1.0),
) -> MetricGrid:
    """Round-sphere chart (theta, phi) with g = diag(r^2, r^2 sin^2 theta)."""
    axes = chart_axes([theta_range, phi_range], [n_theta, n_phi])
    theta = axes[0][:, None] * np.ones((1, n_phi))
    g = np.zeros((n_theta, n_phi, 2, 2))
    g[..., 0, 0] = radius ** 2
    g[..., 1, 1] = (radius * np.sin(theta)) ** 2
    return MetricGrid(axes=axes, g=g)


def conformal_grid(
    lam_coeffs=(0.2, -0.1), count: int = 24, width: float = 1.0
) -> MetricGrid:
    """2d conformally flat metric exp(2 lambda(x)) delta with linear lambda."""
    axes = chart_axes([(0.0, width)] * 2, [count] * 2)
    X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
    lam = lam_coeffs[0] * X + lam_coeffs[1] * Y
    g = np.zeros((count, count, 2, 2))
    g[..., 0, 0] = np.exp(2 * lam)
    g[..., 1, 1] = np.exp(2 * lam)
    return MetricGrid(axes=axes, g=g)


def sphere_cross_flat_tetrad(
    radius: float,
    n_theta: int = 10,
    n_other: int = 6,
    theta_range=(0.6, np.pi - 0.6),
) -> TetradField:
    """4d tetrad diag(r, r sin theta, 1, 1): a round 2-sphere times a flat plane."""
    axes = chart_axes(
        [theta_range, (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)],
        [n_theta, n_other, n_other, n_other],
    )
    ext = tuple(len(a) for a in axes)
    theta = axes[0].reshape(-1, 1, 1, 1) * np.ones(ext)
    lam = np.zeros((*ext, 4, 4))
    lam[..., 0, 0] = radius
    lam[..., 1, 1] = radius * np.sin(theta)
    lam[..., 2, 2] = 1.0
    lam[..., 3, 3] = 1.0
    return TetradField(axes=axes, Lambda=lam, eta=np.eye(4))
