"""Trivial transitive Lie algebroids over a periodic grid.

An element is a pair X + gamma of a lattice vector field and a kernel field
with values in the Lie algebra, stored as real coefficients in the basis
``e_k = iE_k`` (so the coefficient bracket is ``[x, y]^m = C^m_kl x^k y^l``).
Forms carry an antisymmetric set of base slots and an antisymmetric set of
fiber slots; the differential splits as a lattice de Rham part plus a
Chevalley-Eilenberg part twisted by the base degree.

A generalized connection is a pair (omega, phi): omega eats base directions,
phi eats fiber directions.  Ordinary connections have phi = -Id; the shift
tau = phi + Id carries the scalar degrees of freedom, and the curvature
splits into the three blocks F_hat (base-base), D tau (mixed) and R_tau
(fiber-fiber).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._multiindex import merge_sign, sorted_sign
from .latticeymh import GaugeFieldA, LatticeSpec, ScalarMultipletB, finite_diff
from .liealg import LieData


class Incompatible(ValueError):
    """Raised when elements or forms do not share lattice/Lie data."""


class NotRepresentable(ValueError):
    """Raised when a matrix field has a trace part (kernel is g-valued)."""


def _shared(a, b):
    if a.lattice != b.lattice:
        raise Incompatible("different lattices")
    if a.lie is not b.lie and not np.array_equal(a.lie.basis, b.lie.basis):
        raise Incompatible("different Lie data")


@dataclass
class TLAElement:
    """A section X + gamma: vector field (*ext, d) and kernel field (*ext, K)."""

    lattice: LatticeSpec
    lie: LieData
    X: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        lat = self.lattice
        self.X = np.asarray(self.X, dtype=float).reshape(*lat.extents, lat.d)
        self.gamma = np.asarray(self.gamma, dtype=float).reshape(
            *lat.extents, self.lie.dim
        )
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.gamma))):
            raise ValueError("non-finite entries")


def fiber_element(lattice: LatticeSpec, lie: LieData, gamma) -> TLAElement:
    """Kernel-only section (anchor image zero)."""
    g = np.broadcast_to(
        np.asarray(gamma, dtype=float), (*lattice.extents, lie.dim)
    ).copy()
    return TLAElement(lattice, lie, np.zeros((*lattice.extents, lattice.d)), g)


def anchor(u: TLAElement) -> np.ndarray:
    """Projection to the vector-field part."""
    return u.X


def _directional(X: np.ndarray, f: np.ndarray, lat: LatticeSpec) -> np.ndarray:
    """X . f = sum_mu X^mu d_mu f for a field f with trailing component axes."""
    out = np.zeros_like(f)
    for mu in range(lat.d):
        df = finite_diff(f, mu, lat)
        comp = X[..., mu]
        out = out + comp.reshape(comp.shape + (1,) * (f.ndim - lat.d)) * df
    return out


def bracket(u: TLAElement, v: TLAElement) -> TLAElement:
    """[X + gamma, Y + eta] = [X, Y] + (X.eta - Y.gamma + [gamma, eta])."""
    _shared(u, v)
    lat = u.lattice
    XY = _directional(u.X, v.X, lat) - _directional(v.X, u.X, lat)
    ker = (
        _directional(u.X, v.gamma, lat)
        - _directional(v.X, u.gamma, lat)
        + u.lie.bracket_coeffs(u.gamma, v.gamma)
    )
    return TLAElement(lat, u.lie, XY, ker)


def adjoint_action(u: TLAElement, value: np.ndarray) -> np.ndarray:
    """Adjoint action of X + gamma on a kernel field: X.value + [gamma, value]."""
    return _directional(u.X, value, u.lattice) + u.lie.bracket_coeffs(u.gamma, value)


# --- forms -------------------------------------------------------------------


@dataclass
class AlgebroidForm:
    """Kernel-valued form of homogeneous total degree.

    ``coeffs`` maps (base_key, fiber_key) pairs of strictly increasing index
    tuples to real arrays of shape (*extents, K); mixed bidegrees may share
    one form as long as len(base)+len(fiber) is constant.
    """

    lattice: LatticeSpec
    lie: LieData
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        lat = self.lattice
        for (bk, fk), val in list(self.coeffs.items()):
            if len(bk) + len(fk) != self.degree:
                raise ValueError(f"key {(bk, fk)} has wrong total degree")
            if list(bk) != sorted(set(bk)) or list(fk) != sorted(set(fk)):
                raise ValueError(f"key {(bk, fk)} not strictly increasing")
            if any(not 0 <= m < lat.d for m in bk) or any(
                not 0 <= k < self.lie.dim for k in fk
            ):
                raise ValueError(f"key {(bk, fk)} out of range")
            self.coeffs[(bk, fk)] = np.asarray(val, dtype=float).reshape(
                *lat.extents, self.lie.dim
            )

    def coeff(self, bk: tuple, fk: tuple) -> np.ndarray:
        z = self.coeffs.get((tuple(bk), tuple(fk)))
        if z is None:
            return np.zeros((*self.lattice.extents, self.lie.dim))
        return z

    def coeff_signed(self, bk: tuple, fk: tuple) -> np.ndarray:
        kb, sb = sorted_sign(tuple(bk))
        kf, sf = sorted_sign(tuple(fk))
        if sb == 0 or sf == 0:
            return np.zeros((*self.lattice.extents, self.lie.dim))
        return (sb * sf) * self.coeff(kb, kf)

    def norm(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(float(np.max(np.abs(v))) for v in self.coeffs.values())

    def __add__(self, other: "AlgebroidForm") -> "AlgebroidForm":
        _shared(self, other)
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = {k: v.copy() for k, v in self.coeffs.items()}
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return AlgebroidForm(self.lattice, self.lie, self.degree, out)

    def __sub__(self, other: "AlgebroidForm") -> "AlgebroidForm":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "AlgebroidForm":
        return AlgebroidForm(
            self.lattice,
            self.lie,
            self.degree,
            {k: scalar * v for k, v in self.coeffs.items()},
        )


def differential(f: AlgebroidForm) -> AlgebroidForm:
    """Total differential: lattice de Rham part plus the fiber part.

    The fiber (Chevalley-Eilenberg, adjoint representation) part acts with a
    ``(-1)^r`` twist on a key with r base slots, which makes the two parts
    anticommute; the composite squares to zero exactly on the periodic grid
    (shift operators commute and the fiber part has constant coefficients).
    """
    lat, lie = f.lattice, f.lie
    out: dict = {}

    def add(bk, fk, val):
        key = (bk, fk)
        if key in out:
            out[key] = out[key] + val
        else:
            out[key] = val.copy()

    for (bk, fk), c in f.coeffs.items():
        r = len(bk)
        # de Rham part: insert one base index
        for mu in range(lat.d):
            if mu in bk:
                continue
            pos = sum(1 for m in bk if m < mu)
            sign = -1.0 if pos % 2 else 1.0
            new_bk = tuple(sorted(bk + (mu,)))
            add(new_bk, fk, sign * finite_diff(c, mu, lat))
        twist = -1.0 if r % 2 else 1.0
        # fiber action term: [e_k, c] into an extended fiber key
        for k in range(lie.dim):
            if k in fk:
                continue
            pos = sum(1 for x in fk if x < k)
            sign = twist * (-1.0 if pos % 2 else 1.0)
            new_fk = tuple(sorted(fk + (k,)))
            add(bk, new_fk, sign * np.einsum("pm,...p->...m", lie.C[k], c))
        # fiber bracket term: replace one index m by a pair (u, v), C^m_uv != 0
        for pos_m, m in enumerate(fk):
            rest = fk[:pos_m] + fk[pos_m + 1:]
            rows, cols = np.nonzero(lie.C[:, :, m])
            for u, v in zip(rows, cols):
                if u >= v or u in rest or v in rest:
                    continue
                new_fk, ins_sign = merge_sign(rest, (int(u), int(v)))
                if ins_sign == 0:
                    continue
                # positions of u, v inside the output key
                a = new_fk.index(u)
                b = new_fk.index(v)
                koszul_sign = -1.0 if (a + b) % 2 else 1.0
                # moving m to the front of rest costs (-1)^pos_m
                front_sign = -1.0 if pos_m % 2 else 1.0
                add(
                    bk,
                    new_fk,
                    twist
                    * koszul_sign
                    * front_sign
                    * float(lie.C[u, v, m])
                    * c,
                )
    out = {k: v for k, v in out.items() if np.max(np.abs(v)) > 0.0}
    return AlgebroidForm(lat, lie, f.degree + 1, out)


def evaluate_form(f: AlgebroidForm, elements) -> np.ndarray:
    """Multilinear antisymmetric evaluation on TLA elements (small degrees).

    Sums over assignments of arguments to base and fiber slots with shuffle
    signs; base slots contract the vector parts, fiber slots the kernel
    parts.  Independent of :func:`differential`; used to cross-check it.
    """
    lat, lie = f.lattice, f.lie
    p = f.degree
    if len(elements) != p:
        raise ValueError(f"need {p} arguments")
    total = np.zeros((*lat.extents, lie.dim))
    for (bk, fk), c in f.coeffs.items():
        r, s = len(bk), len(fk)
        for base_slots in combinations(range(p), r):
            fiber_slots = tuple(i for i in range(p) if i not in base_slots)
            _, sign = merge_sign(base_slots, fiber_slots)
            if sign == 0:
                continue
            base_det = _slot_det(
                [elements[i].X for i in base_slots], bk, lat
            )
            fiber_det = _slot_det(
                [elements[i].gamma for i in fiber_slots], fk, lat
            )
            total = total + sign * (base_det * fiber_det)[..., None] * c
    return total


def _slot_det(fields, key, lat) -> np.ndarray:
    """Determinant of the component matrix fields[i][..., key[j]]."""
    m = len(key)
    if m == 0:
        return np.ones(lat.extents)
    mat = np.stack(
        [np.stack([fields[i][..., key[j]] for j in range(m)], axis=-1) for i in range(m)],
        axis=-2,
    )
    return np.linalg.det(mat)


def koszul_differential_eval(f: AlgebroidForm, elements) -> np.ndarray:
    """Direct Koszul evaluation of (d f)(u_0, ..., u_p).

    Uses the adjoint action and the algebroid bracket on the actual
    arguments; dual code path to :func:`differential`.
    """
    p = f.degree
    if len(elements) != p + 1:
        raise ValueError(f"need {p + 1} arguments")
    total = np.zeros((*f.lattice.extents, f.lie.dim))
    for a in range(p + 1):
        rest = elements[:a] + elements[a + 1:]
        sign = -1.0 if a % 2 else 1.0
        total = total + sign * adjoint_action(elements[a], evaluate_form(f, rest))
    for a in range(p + 1):
        for b in range(a + 1, p + 1):
            rest = [
                elements[i] for i in range(p + 1) if i not in (a, b)
            ]
            sign = -1.0 if (a + b) % 2 else 1.0
            br = bracket(elements[a], elements[b])
            total = total + sign * evaluate_form(f, [br] + rest)
    return total


def cartan_operation(xi: TLAElement, f: AlgebroidForm):
    """Inner product and Lie derivative along a fiber element.

    Returns (i_xi f, L_xi f) with L = d i + i d.  The contraction inserts xi
    into the first fiber slot, which costs ``(-1)^r`` past r base slots.
    """
    if np.max(np.abs(xi.X)) != 0.0:
        raise ValueError("Cartan operation defined along fiber elements only")
    return inner_product(xi, f), lie_derivative(xi, f)


def inner_product(xi: TLAElement, f: AlgebroidForm) -> AlgebroidForm:
    lat, lie = f.lattice, f.lie
    if f.degree == 0:
        # the contraction kills 0-forms; keep the degree at 0 by convention
        return AlgebroidForm(lat, lie, 0, {})
    out: dict = {}
    for (bk, fk), c in f.coeffs.items():
        if not fk:
            continue
        r = len(bk)
        twist = -1.0 if r % 2 else 1.0
        for pos, k in enumerate(fk):
            rest = fk[:pos] + fk[pos + 1:]
            sign = twist * (-1.0 if pos % 2 else 1.0)
            term = sign * xi.gamma[..., k:k + 1] * c
            key = (bk, rest)
            out[key] = out.get(key, 0) + term
    out = {k: v for k, v in out.items() if np.max(np.abs(v)) > 0.0}
    return AlgebroidForm(lat, lie, f.degree - 1, out)


def lie_derivative(xi: TLAElement, f: AlgebroidForm) -> AlgebroidForm:
    if f.degree == 0:
        return inner_product(xi, differential(f))
    return differential(inner_product(xi, f)) + inner_product(xi, differential(f))


# --- generalized connections -------------------------------------------------


@dataclass
class GeneralizedConnection:
    """Pair (omega, phi): omega (*ext, d, K) real, phi (*ext, K, K) real.

    ``phi[..., m, k]`` is the m-th output component on the fiber direction k.
    An ordinary connection has phi = -Id at every site.
    """

    lattice: LatticeSpec
    lie: LieData
    omega: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        lat, K = self.lattice, self.lie.dim
        self.omega = np.asarray(self.omega, dtype=float).reshape(
            *lat.extents, lat.d, K
        )
        self.phi = np.asarray(self.phi, dtype=float).reshape(*lat.extents, K, K)
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.phi))):
            raise ValueError("non-finite connection data")

    def tau(self) -> np.ndarray:
        """Algebraic part tau = phi + Id, shape (*ext, K, K)."""
        return self.phi + np.eye(self.lie.dim)

    def is_ordinary(self, atol: float = 0.0) -> bool:
        return float(np.max(np.abs(self.tau()))) <= atol


def ordinary_connection(
    lattice: LatticeSpec, lie: LieData, omega=None
) -> GeneralizedConnection:
    """Connection with phi = -Id; omega defaults to zero (the flat background)."""
    K = lie.dim
    if omega is None:
        omega = np.zeros((*lattice.extents, lattice.d, K))
    phi = np.broadcast_to(-np.eye(K), (*lattice.extents, K, K)).copy()
    return GeneralizedConnection(lattice, lie, omega, phi)


@dataclass
class MetricTriple:
    """Base metric (flat, spacing from the lattice), fiber metric, background.

    ``fiber_h`` is a symmetric positive-definite K x K matrix on the kernel;
    the background must be an ordinary connection (phi = -Id exactly).
    """

    lattice: LatticeSpec
    lie: LieData
    fiber_h: np.ndarray
    background: GeneralizedConnection = None

    def __post_init__(self):
        K = self.lie.dim
        self.fiber_h = np.asarray(self.fiber_h, dtype=float).reshape(K, K)
        if np.max(np.abs(self.fiber_h - self.fiber_h.T)) > 0:
            self.fiber_h = 0.5 * (self.fiber_h + self.fiber_h.T)
        if K and np.min(np.linalg.eigvalsh(self.fiber_h)) <= 0:
            raise ValueError("fiber metric must be positive-definite")
        if self.background is None:
            self.background = ordinary_connection(self.lattice, self.lie)
        if not self.background.is_ordinary():
            raise ValueError("background must have phi = -Id exactly")


class CurvatureBlocks:
    """Components of the degree-2 curvature of a generalized connection."""

    def __init__(self, base_base, base_fiber, fiber_fiber):
        self.base_base = base_base      # (*ext, d, d, K), antisymmetric in (mu, nu)
        self.base_fiber = base_fiber    # (*ext, d, K, K): [mu, k, :]
        self.fiber_fiber = fiber_fiber  # (*ext, K, K, K), antisymmetric in (k, l)

    def as_form(self, lattice, lie) -> AlgebroidForm:
        coeffs = {}
        for mu in range(lattice.d):
            for nu in range(mu + 1, lattice.d):
                coeffs[((mu, nu), ())] = self.base_base[..., mu, nu, :]
            for k in range(lie.dim):
                coeffs[((mu,), (k,))] = self.base_fiber[..., mu, k, :]
        for k in range(lie.dim):
            for l in range(k + 1, lie.dim):
                coeffs[((), (k, l))] = self.fiber_fiber[..., k, l, :]
        form = AlgebroidForm(lattice, lie, 2, coeffs)
        return form

    def max_abs(self) -> float:
        return max(
            float(np.max(np.abs(self.base_base))) if self.base_base.size else 0.0,
            float(np.max(np.abs(self.base_fiber))) if self.base_fiber.size else 0.0,
            float(np.max(np.abs(self.fiber_fiber))) if self.fiber_fiber.size else 0.0,
        )


def curvature_generalized(w: GeneralizedConnection) -> CurvatureBlocks:
    """Curvature d w + (1/2)[w, w] assembled per bidegree.

    Blocks (with tau = phi + Id, e_k the constant kernel basis):

        (2,0):  d_mu omega_nu - d_nu omega_mu + [omega_mu, omega_nu]
        (1,1):  d_mu phi_k + [omega_mu, tau_k]
        (0,2):  [tau_k, tau_l] - tau([e_k, e_l])
    """
    lat, lie = w.lattice, w.lie
    d, K = lat.d, lie.dim
    om, tau = w.omega, w.tau()

    dom = np.stack([finite_diff(om, mu, lat) for mu in range(d)], axis=-3)
    bb = dom - np.swapaxes(dom, -3, -2)
    # C is antisymmetric in (k, l): one einsum already is the full commutator
    bb = bb + np.einsum("klm,...ik,...jl->...ijm", lie.C, om, om)

    dphi = np.stack([finite_diff(w.phi, mu, lat) for mu in range(d)], axis=-3)
    bf = np.swapaxes(dphi, -1, -2) + np.einsum(
        "plm,...ip,...lk->...ikm", lie.C, om, tau
    )

    ff = np.einsum("pqm,...pk,...ql->...klm", lie.C, tau, tau) - np.einsum(
        "klp,...mp->...klm", lie.C, tau
    )
    return CurvatureBlocks(bb, bf, ff)


@dataclass
class Decomposition:
    """tau / R_tau / ordinary part / D tau / F_hat of a generalized connection."""

    tau: np.ndarray          # (*ext, K, K)
    R_tau: np.ndarray        # (*ext, K, K, K): [k, l, :], antisymmetric in (k, l)
    omega_ord: GeneralizedConnection
    D_tau: np.ndarray        # (*ext, d, K, K): [mu, k, :]
    F_hat: np.ndarray        # (*ext, d, d, K), antisymmetric in (mu, nu)


def _ordinary_curvature(omega: np.ndarray, lat: LatticeSpec, lie: LieData) -> np.ndarray:
    dom = np.stack([finite_diff(omega, mu, lat) for mu in range(lat.d)], axis=-3)
    R = dom - np.swapaxes(dom, -3, -2)
    return R + np.einsum("klm,...ik,...jl->...ijm", lie.C, omega, omega)


def decompose(w: GeneralizedConnection, m: MetricTriple) -> Decomposition:
    """Split the connection against the background of the metric triple.

    tau = phi + Id; R_tau is the Lie-morphism defect of tau; omega_ord is the
    induced ordinary connection; D tau its covariant derivative relative to
    the background; F_hat the relative curvature R - tau(R_background).
    """
    lat, lie = w.lattice, w.lie
    K = lie.dim
    tau = w.tau()
    Rt = np.einsum("pqm,...pk,...ql->...klm", lie.C, tau, tau) - np.einsum(
        "klp,...mp->...klm", lie.C, tau
    )
    bg = m.background.omega
    sigma = w.omega + np.einsum("...mk,...ik->...im", tau, bg)
    omega_ord = ordinary_connection(lat, lie, sigma)
    # (D_mu tau)(e_k) = d_mu tau_k + [sigma_mu, tau_k] - tau([bg_mu, e_k])
    dtau = np.stack([finite_diff(tau, mu, lat) for mu in range(lat.d)], axis=-3)
    dtau = np.swapaxes(dtau, -1, -2)  # [..., mu, k, m]
    Dt = dtau + np.einsum("plm,...ip,...lk->...ikm", lie.C, sigma, tau)
    # [bg_mu, e_k]^l = C^l_pk bg^p_mu, then contract with tau^m_l
    Dt = Dt - np.einsum("...ml,pkl,...ip->...ikm", tau, lie.C, bg)
    R = _ordinary_curvature(sigma, lat, lie)
    Rdot = _ordinary_curvature(bg, lat, lie)
    Fh = R - np.einsum("...mk,...ijk->...ijm", tau, Rdot)
    return Decomposition(tau=tau, R_tau=Rt, omega_ord=omega_ord, D_tau=Dt, F_hat=Fh)


def reassemble_curvature(dec: Decomposition, m: MetricTriple) -> CurvatureBlocks:
    """Rebuild the total curvature from the three decomposition pieces.

    Evaluates rho*F_hat - (rho*D tau) o background + background*R_tau on the
    basis pairs; agrees with :func:`curvature_generalized` exactly on
    constant-coefficient data.
    """
    lat, lie = m.lattice, m.lie
    bg = m.background.omega  # background 1-form on base slots; -Id on fiber
    # (2,0): F_hat_mn - [(D_m tau)(bg_n) - (D_n tau)(bg_m)] + R_tau(bg_m, bg_n)
    cross = np.einsum("...ikm,...jk->...ijm", dec.D_tau, bg)
    bb = dec.F_hat - (cross - np.swapaxes(cross, -3, -2))
    bb = bb + np.einsum("...klm,...ik,...jl->...ijm", dec.R_tau, bg, bg)
    # (1,1): (D_mu tau)(e_k) - R_tau(bg_mu, e_k)
    bf = dec.D_tau - np.einsum("...klm,...ik->...ilm", dec.R_tau, bg)
    # (0,2): R_tau(e_k, e_l)
    return CurvatureBlocks(bb, bf, dec.R_tau.copy())


def action_generalized(w: GeneralizedConnection, m: MetricTriple) -> float:
    """Gauge-invariant action: squared norms of the three curvature blocks.

    Base indices contract with the flat Euclidean metric, fiber input slots
    with the inverse fiber metric, values with the fiber metric; the
    fiber-fiber block carries the algebra-size factor n that matches the
    trace-normalized matrix-model weights.  With fiber_h = Id and an
    ordinary connection this reduces exactly to the Yang-Mills action.
    """
    lat, lie = w.lattice, w.lie
    dec = decompose(w, m)
    h = m.fiber_h
    hinv = np.linalg.inv(h)
    sq_bb = np.einsum("...ijm,mp,...ijp->...", dec.F_hat, h, dec.F_hat)
    sq_bf = np.einsum("...ikm,kl,mp,...ilp->...", dec.D_tau, hinv, h, dec.D_tau)
    sq_ff = np.einsum(
        "...klm,ku,lv,mp,...uvp->...", dec.R_tau, hinv, hinv, h, dec.R_tau
    )
    density = sq_bb + sq_bf + lie.n * sq_ff
    return float(lat.volume_element * density.sum())


def infinitesimal_gauge(
    w: GeneralizedConnection, xi: np.ndarray, eps: float
) -> GeneralizedConnection:
    """First-order gauge flow w -> w + eps (d xi + [w, xi]) for a fiber xi."""
    lat, lie = w.lattice, w.lie
    xi = np.broadcast_to(np.asarray(xi, dtype=float), (*lat.extents, lie.dim)).copy()
    dxi = np.stack([finite_diff(xi, mu, lat) for mu in range(lat.d)], axis=-2)
    new_omega = w.omega + eps * (dxi + np.einsum("klm,...ik,...l->...im", lie.C, w.omega, xi))
    # fiber part: [e_k, xi] + [phi_k, xi] = [tau_k, xi]
    dphi = np.einsum("pqm,...pk,...q->...mk", lie.C, w.tau(), xi)
    return GeneralizedConnection(lat, lie, new_omega, w.phi + eps * dphi)


# --- correspondence with lattice matrix fields --------------------------------


def from_lattice_fields(a: GaugeFieldA, b: ScalarMultipletB) -> GeneralizedConnection:
    """Coefficient map (a, b) -> (omega, phi).

    omega^k_mu are the components of a_mu in the basis iE_k; phi is shifted
    so that b_k = iE_k gives phi = 0 (tau = Id) and b = 0 gives phi = -Id
    (tau = 0).  Raises NotRepresentable for fields with a trace part.
    """
    lat, lie = a.lattice, a.lie
    omega = _antihermitian_coeffs(a.a, lie)
    beta = _antihermitian_coeffs(b.b, lie)  # tau[..., m, k] = beta[..., k, m]
    tau = np.swapaxes(beta, -1, -2)
    phi = tau - np.eye(lie.dim)
    return GeneralizedConnection(lat, lie, omega, phi)


def to_lattice_fields(
    w: GeneralizedConnection,
) -> tuple[GaugeFieldA, ScalarMultipletB]:
    """Inverse of :func:`from_lattice_fields`."""
    lat, lie = w.lattice, w.lie
    basis = 1j * lie.basis
    a = np.einsum("...ik,kab->...iab", w.omega, basis)
    tau = w.tau()
    b = np.einsum("...mk,mab->...kab", tau, basis)
    return GaugeFieldA(lat, lie, a), ScalarMultipletB(lat, lie, b)


def _antihermitian_coeffs(fields: np.ndarray, lie: LieData, atol: float = 1e-10) -> np.ndarray:
    """Components of anti-Hermitian traceless matrices in the basis iE_k."""
    trace = np.trace(fields, axis1=-2, axis2=-1)
    worst = float(np.max(np.abs(trace))) if trace.size else 0.0
    if worst > atol:
        raise NotRepresentable(f"matrix field has trace part {worst:.3e}")
    # coefficient of iE_k: tr(E_k X) / (2i), real for anti-Hermitian X
    raw = np.einsum("kab,...ba->...k", lie.basis, fields) / 2j
    return np.real(raw)


def calibrated_triple(lattice: LatticeSpec, lie: LieData, mu: float) -> MetricTriple:
    """Fiber metric (2n/mu^2) Id: the scale matching the Yang-Mills-Higgs weights."""
    if mu <= 0:
        raise ValueError("calibration needs mu > 0")
    scale = 2.0 * lie.n / mu ** 2
    return MetricTriple(lattice, lie, scale * np.eye(lie.dim))


def ymh_equivalent_action(
    w: GeneralizedConnection, mu: float
) -> float:
    """Action in Yang-Mills-Higgs normalization.

    Equals ``mu^2/(4 n^2) * action_generalized`` with the calibrated fiber
    metric; matches ``latticeymh.ymh_action`` on corresponding fields.
    """
    lie = w.lie
    triple = calibrated_triple(w.lattice, lie, mu)
    return mu ** 2 / (4.0 * lie.n ** 2) * action_generalized(w, triple)
