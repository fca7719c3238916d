"""Yang-Mills-Higgs fields on a periodic grid.

Fields are site-valued: a gauge field ``a_mu(x)`` (one anti-Hermitian n x n
matrix per site and base direction) and a scalar multiplet ``b_k(x)`` (one
anti-Hermitian matrix per site and fiber direction k = 1..n^2-1).  Base
derivatives are central differences with periodic wraparound; all squared
norms are Euclidean, so the action is nonnegative and vanishes exactly on
its two flat orbits (a pure gauge with b = 0, and a pure gauge with
b_k = i g^-1 E_k g).

Spatial axes come first: a field has shape ``(*extents, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .liealg import LieData


class IncompatibleFields(ValueError):
    """Raised when fields do not share a lattice or Lie data."""


class DimensionError(ValueError):
    """Raised for operations restricted to a specific base dimension."""


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic rectangular grid: site counts per axis and spacing."""

    extents: tuple
    h: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "extents", tuple(int(n) for n in self.extents))
        if any(n < 3 for n in self.extents):
            raise ValueError(f"every extent must be >= 3, got {self.extents}")
        if not self.h > 0:
            raise ValueError(f"spacing must be positive, got {self.h}")

    @property
    def d(self) -> int:
        return len(self.extents)

    @property
    def volume_element(self) -> float:
        return self.h ** self.d

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.extents))

    def axis_coordinates(self, mu: int) -> np.ndarray:
        """Coordinates along one axis, broadcastable over the grid."""
        shape = [1] * self.d
        shape[mu] = self.extents[mu]
        return (self.h * np.arange(self.extents[mu])).reshape(shape)


def finite_diff(field: np.ndarray, mu: int, lattice: LatticeSpec) -> np.ndarray:
    """Central difference (f(x+h e_mu) - f(x-h e_mu)) / 2h, periodic."""
    if not 0 <= mu < lattice.d:
        raise ValueError(f"direction {mu} out of range for d={lattice.d}")
    return (np.roll(field, -1, axis=mu) - np.roll(field, 1, axis=mu)) / (2.0 * lattice.h)


def _check_antihermitian(arr: np.ndarray, what: str, atol: float = 1e-12):
    drift = np.max(np.abs(arr + np.conj(np.swapaxes(arr, -1, -2)))) if arr.size else 0.0
    if drift > atol:
        raise ValueError(f"{what} must be anti-Hermitian, drift {drift:.3e}")


@dataclass
class GaugeFieldA:
    """Site-valued gauge field, array of shape (*extents, d, n, n)."""

    lattice: LatticeSpec
    lie: LieData
    a: np.ndarray

    def __post_init__(self):
        shape = (*self.lattice.extents, self.lattice.d, self.lie.n, self.lie.n)
        self.a = np.asarray(self.a, dtype=complex).reshape(shape)
        _check_antihermitian(self.a, "a_mu")


@dataclass
class ScalarMultipletB:
    """Site-valued scalar multiplet, array of shape (*extents, dim, n, n)."""

    lattice: LatticeSpec
    lie: LieData
    b: np.ndarray

    def __post_init__(self):
        shape = (*self.lattice.extents, self.lie.dim, self.lie.n, self.lie.n)
        self.b = np.asarray(self.b, dtype=complex).reshape(shape)
        _check_antihermitian(self.b, "b_k")


@dataclass(frozen=True)
class YMHParams:
    """Mass parameter and algebra for the Yang-Mills-Higgs action."""

    mu: float
    lie: LieData

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mass parameter must be nonnegative")


class FieldStrength(NamedTuple):
    """The three curvature blocks of a lattice connection."""

    geo: np.ndarray  # (*ext, d, d, n, n)   F_mn = d_m a_n - d_n a_m + [a_m, a_n]
    mix: np.ndarray  # (*ext, d, K, n, n)   F_mk = d_m b_k + [a_m, b_k]
    alg: np.ndarray  # (*ext, K, K, n, n)   F_kl = [b_k, b_l] - C^m_kl b_m


def _check_shared(a: GaugeFieldA, b: ScalarMultipletB):
    if a.lattice != b.lattice:
        raise IncompatibleFields("fields live on different lattices")
    if a.lie is not b.lie and not np.array_equal(a.lie.basis, b.lie.basis):
        raise IncompatibleFields("fields carry different Lie data")


def field_strength(a: GaugeFieldA, b: ScalarMultipletB) -> FieldStrength:
    """All three curvature blocks; each is anti-Hermitian by construction."""
    _check_shared(a, b)
    lat, lie = a.lattice, a.lie
    d, K = lat.d, lie.dim
    av, bv = a.a, b.b

    da = np.stack([finite_diff(av, mu, lat) for mu in range(d)], axis=-4)
    # da[..., mu, nu, :, :] = d_mu a_nu
    geo = da - np.swapaxes(da, -4, -3)
    geo = geo + np.einsum("...mab,...nbc->...mnac", av, av) - np.einsum(
        "...nab,...mbc->...mnac", av, av
    )

    db = np.stack([finite_diff(bv, mu, lat) for mu in range(d)], axis=-4)
    mix = db + np.einsum("...mab,...kbc->...mkac", av, bv) - np.einsum(
        "...kab,...mbc->...mkac", bv, av
    )

    alg = np.einsum("...kab,...lbc->...klac", bv, bv) - np.einsum(
        "...lab,...kbc->...klac", bv, bv
    )
    alg = alg - np.einsum("klm,...mab->...klab", lie.C, bv)
    return FieldStrength(geo=geo, mix=mix, alg=alg)


def _sq(block: np.ndarray) -> np.ndarray:
    """Site-wise sum of squared Frobenius norms over all block indices."""
    d = block.ndim
    spatial = d - 4
    return np.einsum(
        block.conj(), list(range(d)), block, list(range(d)), list(range(spatial))
    ).real


def ymh_action(a: GaugeFieldA, b: ScalarMultipletB, p: YMHParams) -> float:
    """Euclidean Yang-Mills-Higgs action.

        S = (1/4n) h^d sum_x [ sum_mn ||F^geo||^2
                               + (mu^2/2n) sum_mk ||F^mix||^2
                               + (mu^4/4n) sum_kl ||F^alg||^2 ]

    Nonnegative; zero exactly on the two flat orbits.
    """
    F = field_strength(a, b)
    n = a.lie.n
    mu2 = p.mu ** 2
    density = (
        _sq(F.geo) + (mu2 / (2.0 * n)) * _sq(F.mix) + (mu2 ** 2 / (4.0 * n)) * _sq(F.alg)
    )
    return float(a.lattice.volume_element * density.sum() / (4.0 * n))


def ym_action(a: GaugeFieldA) -> float:
    """Pure Yang-Mills part: (1/2) h^d sum_x sum_mn ||F^geo_mn||^2."""
    lat = a.lattice
    av = a.a
    da = np.stack([finite_diff(av, mu, lat) for mu in range(lat.d)], axis=-4)
    geo = da - np.swapaxes(da, -4, -3)
    geo = geo + np.einsum("...mab,...nbc->...mnac", av, av) - np.einsum(
        "...nab,...mbc->...mnac", av, av
    )
    return float(0.5 * lat.volume_element * _sq(geo).sum())


class GaugeTransformResult(NamedTuple):
    a: GaugeFieldA
    b: ScalarMultipletB
    projection_residual: float


def gauge_transform_lattice(
    a: GaugeFieldA, b: ScalarMultipletB, g: np.ndarray, atol: float = 1e-12
) -> GaugeTransformResult:
    """Apply a site-dependent gauge transformation.

        a_mu -> g^-1 a_mu g + g^-1 (d_mu g),   b_k -> g^-1 b_k g

    with the discrete central difference for d_mu g.  Outputs are projected
    back onto anti-Hermitian matrices, X -> (X - X^dag)/2, and the maximum
    projection residual is reported.
    """
    _check_shared(a, b)
    lat = a.lattice
    g = np.asarray(g, dtype=complex).reshape(*lat.extents, a.lie.n, a.lie.n)
    unit_drift = np.max(
        np.abs(np.einsum("...ba,...bc->...ac", g.conj(), g) - np.eye(a.lie.n))
    )
    if unit_drift > atol:
        raise ValueError(f"gauge field not unitary at every site, drift {unit_drift:.3e}")
    ginv = np.conj(np.swapaxes(g, -1, -2))

    new_a = np.einsum("...ab,...mbc,...cd->...mad", ginv, a.a, g)
    for mu in range(lat.d):
        new_a[..., mu, :, :] += np.einsum(
            "...ab,...bc->...ac", ginv, finite_diff(g, mu, lat)
        )
    new_b = np.einsum("...ab,...kbc,...cd->...kad", ginv, b.b, g)

    def project(arr):
        sym = 0.5 * (arr + np.conj(np.swapaxes(arr, -1, -2)))
        return arr - sym, float(np.max(np.abs(sym)))

    new_a, res_a = project(new_a)
    new_b, res_b = project(new_b)
    return GaugeTransformResult(
        a=GaugeFieldA(lat, a.lie, new_a),
        b=ScalarMultipletB(lat, a.lie, new_b),
        projection_residual=max(res_a, res_b),
    )


def chern_simons(a: GaugeFieldA) -> float:
    """Chern-Simons sum h^3 sum_x eps^mnr tr(a_m d_n a_r + (2/3) a_m a_n a_r)."""
    lat = a.lattice
    if lat.d != 3:
        raise DimensionError(f"Chern-Simons needs a 3d base, got d={lat.d}")
    av = a.a
    da = np.stack([finite_diff(av, mu, lat) for mu in range(3)], axis=-4)
    eps = np.zeros((3, 3, 3))
    for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                         (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.items():
        eps[i, j, k] = s
    quad = np.einsum("mnr,...mab,...nrba->...", eps, av, da).sum()
    cubic = np.einsum("mnr,...mab,...nbc,...rca->...", eps, av, av, av).sum()
    return float((lat.h ** 3) * (quad + (2.0 / 3.0) * cubic).real)


def mass_spectrum(b0: ScalarMultipletB, p: YMHParams, atol: float = 1e-10):
    """Eigenvalues of the gauge-field mass form at a constant scalar vacuum.

    Per base direction, diagonalizes a -> (mu^2/2n) sum_k ||[a, b0_k]||_F^2
    over constant anti-Hermitian a, in the Frobenius-orthonormal basis
    {iE_p/sqrt(2), i*I/sqrt(n)}.  Returns an array of shape (d, n^2), rows
    identical since directions decouple; eigenvalues scale as mu^2.
    """
    lat, lie = b0.lattice, b0.lie
    flat = b0.b.reshape(lat.n_sites, lie.dim, lie.n, lie.n)
    dev = np.max(np.abs(flat - flat[0])) if lat.n_sites else 0.0
    if dev > atol:
        raise ValueError(f"scalar background varies over sites by {dev:.3e}, unsupported")
    bk = flat[0]
    n, K = lie.n, lie.dim
    basis = np.concatenate(
        [1j * lie.basis / np.sqrt(2.0), (1j * np.eye(n) / np.sqrt(n))[None]], axis=0
    )
    comm = np.einsum("pab,kbc->pkac", basis, bk) - np.einsum("kab,pbc->pkac", bk, basis)
    M = np.einsum("pkab,qkab->pq", comm.conj(), comm).real
    M *= p.mu ** 2 / (2.0 * n)
    eigs = np.linalg.eigvalsh(0.5 * (M + M.T))
    return np.tile(eigs, (lat.d, 1))


# --- reference configurations -------------------------------------------


def zero_fields(lattice: LatticeSpec, lie: LieData):
    """Orbit-1 representative: a = 0, b = 0."""
    a = GaugeFieldA(lattice, lie, np.zeros((*lattice.extents, lattice.d, lie.n, lie.n)))
    b = ScalarMultipletB(lattice, lie, np.zeros((*lattice.extents, lie.dim, lie.n, lie.n)))
    return a, b


def vacuum_fields(lattice: LatticeSpec, lie: LieData, scale: float = 1.0):
    """Orbit-2 representative: a = 0, b_k = scale * iE_k at every site."""
    a, _ = zero_fields(lattice, lie)
    bk = scale * 1j * lie.basis
    b = ScalarMultipletB(
        lattice, lie, np.broadcast_to(bk, (*lattice.extents, lie.dim, lie.n, lie.n)).copy()
    )
    return a, b


def random_fields(
    lattice: LatticeSpec,
    lie: LieData,
    rng: np.random.Generator,
    scale: float = 1.0,
    traceless: bool = False,
):
    """Seeded random anti-Hermitian site fields (su(n)-valued if traceless)."""

    n = lie.n

    def anti(shape):
        raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        out = scale * 0.5 * (raw - np.conj(np.swapaxes(raw, -1, -2)))
        if traceless:
            tr = np.trace(out, axis1=-2, axis2=-1) / n
            out = out - tr[..., None, None] * np.eye(n)
        return out

    a = GaugeFieldA(lattice, lie, anti((*lattice.extents, lattice.d, lie.n, lie.n)))
    b = ScalarMultipletB(lattice, lie, anti((*lattice.extents, lie.dim, lie.n, lie.n)))
    return a, b


def smooth_gauge_field(
    lattice: LatticeSpec, lie: LieData, alpha: float = 0.3, axis: int = 0
) -> np.ndarray:
    """Unitary g(x) = exp(i alpha sin(2 pi x/L) E_last), smooth and periodic."""
    L = lattice.extents[axis] * lattice.h
    phase = alpha * np.sin(2.0 * np.pi * lattice.axis_coordinates(axis) / L)
    phase = np.broadcast_to(phase, lattice.extents)
    gen = lie.basis[-1]
    w, V = np.linalg.eigh(gen)
    expd = np.exp(1j * phase[..., None] * w)
    return np.einsum("ab,...b,cb->...ac", V, expd, V.conj())
