"""Gradient descent on the action functionals.

Anti-Hermitian degrees of freedom are parametrized by real coefficients in
the basis {iE_1, ..., iE_K, i*Id}, so the optimizer works on flat real
vectors with no constraints.  Analytic gradients are provided for the
matrix-model and lattice actions (validated against central finite
differences); the algebroid action falls back to finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebroid import GeneralizedConnection, MetricTriple, action_generalized
from .latticeymh import (
    GaugeFieldA,
    LatticeSpec,
    ScalarMultipletB,
    YMHParams,
    field_strength,
    finite_diff,
    ymh_action,
)
from .liealg import LieData
from .ncgauge import MatrixConnection, action as matrix_action, curvature_components


class OptimizationFailure(RuntimeError):
    """Raised when the line search cannot decrease the action."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def antihermitian_basis(lie: LieData) -> np.ndarray:
    """Real basis of anti-Hermitian n x n matrices: iE_k plus i*Id."""
    n = lie.n
    return np.concatenate([1j * lie.basis, (1j * np.eye(n))[None]], axis=0)


# --- matrix model -----------------------------------------------------------


@dataclass
class MatrixModelProblem:
    """S[A] over real coordinates x of shape (K, n^2)."""

    lie: LieData

    @property
    def shape(self):
        return (self.lie.dim, self.lie.n ** 2)

    def connection(self, x: np.ndarray) -> MatrixConnection:
        basis = antihermitian_basis(self.lie)
        A = np.einsum("kp,pab->kab", x.reshape(self.shape), basis)
        return MatrixConnection(self.lie, A)

    def value(self, x: np.ndarray) -> float:
        return matrix_action(self.connection(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        lie = self.lie
        c = self.connection(x)
        F = curvature_components(c)
        Fd = np.conj(np.swapaxes(F, -1, -2))
        # W_p = 2 sum_l [A_l, Fd_pl] - sum_kl C^p_kl Fd_kl
        W = 2.0 * (
            np.einsum("lab,plbc->pac", c.A, Fd) - np.einsum("plab,lbc->pac", Fd, c.A)
        )
        W = W - np.einsum("klp,klab->pab", lie.C, Fd)
        basis = antihermitian_basis(lie)
        grad = np.einsum("pab,qba->pq", W, basis).real / (4.0 * lie.n)
        return grad.reshape(-1)


# --- lattice Yang-Mills-Higgs -------------------------------------------------


@dataclass
class LatticeYMHProblem:
    """S[a, b] over real coordinates x of shape (*extents, d + K, n^2)."""

    lattice: LatticeSpec
    lie: LieData
    mu: float

    @property
    def comps(self) -> int:
        return self.lattice.d + self.lie.dim

    @property
    def shape(self):
        return (*self.lattice.extents, self.comps, self.lie.n ** 2)

    def fields(self, x: np.ndarray):
        basis = antihermitian_basis(self.lie)
        mats = np.einsum("...cp,pab->...cab", x.reshape(self.shape), basis)
        d = self.lattice.d
        a = GaugeFieldA(self.lattice, self.lie, mats[..., :d, :, :])
        b = ScalarMultipletB(self.lattice, self.lie, mats[..., d:, :, :])
        return a, b

    def value(self, x: np.ndarray) -> float:
        a, b = self.fields(x)
        return ymh_action(a, b, YMHParams(self.mu, self.lie))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        lat, lie = self.lattice, self.lie
        n, d, K = lie.n, lat.d, lie.dim
        a, b = self.fields(x)
        F = field_strength(a, b)
        F1d = np.conj(np.swapaxes(F.geo, -1, -2))
        F2d = np.conj(np.swapaxes(F.mix, -1, -2))
        F3d = np.conj(np.swapaxes(F.alg, -1, -2))
        c1 = 1.0 / (4.0 * n)
        c2 = c1 * self.mu ** 2 / (2.0 * n)
        c3 = c1 * self.mu ** 4 / (4.0 * n)

        def comm(X, Y):
            return np.einsum("...ab,...bc->...ac", X, Y) - np.einsum(
                "...ab,...bc->...ac", Y, X
            )

        Wa = np.zeros_like(a.a)
        Wb = np.zeros_like(b.b)
        for mu in range(d):
            # derivative part of the geo block: -2 sum_nu d_nu F1_{nu mu}^dag
            acc = np.zeros((*lat.extents, n, n), dtype=complex)
            for nu in range(d):
                acc += finite_diff(F1d[..., nu, mu, :, :], nu, lat)
                Wa[..., mu, :, :] += 2.0 * c1 * comm(
                    a.a[..., nu, :, :], F1d[..., mu, nu, :, :]
                )
            Wa[..., mu, :, :] += -2.0 * c1 * acc
            for k in range(K):
                Wa[..., mu, :, :] += c2 * comm(
                    b.b[..., k, :, :], F2d[..., mu, k, :, :]
                )
        for k in range(K):
            acc = np.zeros((*lat.extents, n, n), dtype=complex)
            for mu in range(d):
                acc += finite_diff(F2d[..., mu, k, :, :], mu, lat)
                Wb[..., k, :, :] += c2 * comm(
                    F2d[..., mu, k, :, :], a.a[..., mu, :, :]
                )
            Wb[..., k, :, :] += -c2 * acc
            for l in range(K):
                Wb[..., k, :, :] += 2.0 * c3 * comm(
                    b.b[..., l, :, :], F3d[..., k, l, :, :]
                )
            Wb[..., k, :, :] += -c3 * np.einsum(
                "pq,...pqab->...ab", lie.C[:, :, k], F3d
            )
        W = np.concatenate([Wa, Wb], axis=-3)
        basis = antihermitian_basis(lie)
        grad = 2.0 * lat.volume_element * np.einsum(
            "...cab,qba->...cq", W, basis
        ).real
        return grad.reshape(-1)


# --- algebroid (finite differences only) ----------------------------------------


@dataclass
class AlgebroidProblem:
    """Generalized-connection action over (omega, phi) coordinates."""

    lattice: LatticeSpec
    lie: LieData
    metric: MetricTriple

    @property
    def n_omega(self) -> int:
        return int(np.prod(self.lattice.extents)) * self.lattice.d * self.lie.dim

    def connection(self, x: np.ndarray) -> GeneralizedConnection:
        lat, K = self.lattice, self.lie.dim
        om = x[: self.n_omega].reshape(*lat.extents, lat.d, K)
        phi = x[self.n_omega:].reshape(*lat.extents, K, K)
        return GeneralizedConnection(lat, self.lie, om, phi)

    def value(self, x: np.ndarray) -> float:
        return action_generalized(self.connection(x), self.metric)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return finite_difference_gradient(self.value, x)


def finite_difference_gradient(fn, x: np.ndarray, eps: float = 1e-6, indices=None):
    """Central-difference gradient; ``indices`` restricts to a coordinate subset."""
    x = np.asarray(x, dtype=float)
    idx = list(range(x.size)) if indices is None else list(indices)
    out = np.zeros(len(idx))
    for row, i in enumerate(idx):
        xp = x.copy()
        xp[i] += eps
        xm = x.copy()
        xm[i] -= eps
        out[row] = (fn(xp) - fn(xm)) / (2.0 * eps)
    return out


@dataclass
class MinimizeResult:
    x: np.ndarray
    value: float
    gradient_norm: float
    iterations: int
    trace: list = field(default_factory=list)
    converged: bool = False


def minimize(
    problem,
    x0: np.ndarray,
    step: float = 0.25,
    max_iter: int = 500,
    grad_tol: float = 1e-8,
    armijo_c: float = 1e-4,
    max_backtracks: int = 40,
    use_analytic: bool = True,
    action_tol: float = None,
) -> MinimizeResult:
    """Gradient descent with Armijo backtracking; the action trace is monotone.

    The trial step is seeded by a Barzilai-Borwein estimate from the previous
    iterate (falling back to ``step``) and halved until the Armijo condition
    holds, so every accepted step decreases the action.  Stops when the
    gradient norm drops below ``grad_tol``, when the action reaches an
    optional ``action_tol`` floor, or after ``max_iter`` steps; raises
    :class:`OptimizationFailure` when ``max_backtracks`` halvings cannot
    decrease the action.
    """
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    value = problem.value(x)
    trace = [value]
    grad_fn = problem.gradient if use_analytic else (
        lambda z: finite_difference_gradient(problem.value, z)
    )
    prev_x = prev_g = None
    for it in range(max_iter):
        g = grad_fn(x)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol or (action_tol is not None and value <= action_tol):
            return MinimizeResult(x, value, gnorm, it, trace, converged=True)
        alpha = step
        if prev_g is not None:
            s = x - prev_x
            y = g - prev_g
            sy = float(s @ y)
            if sy > 0:
                alpha = min(max(float(s @ s) / sy, 1e-8 * step), 1e8 * step)
        accepted = False
        for _ in range(max_backtracks):
            cand = x - alpha * g
            cand_value = problem.value(cand)
            if cand_value <= value - armijo_c * alpha * gnorm ** 2:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise OptimizationFailure(
                f"line search exhausted at iteration {it} (action {value:.3e})",
                trace,
            )
        prev_x, prev_g = x, g
        x, value = cand, cand_value
        trace.append(value)
    g = grad_fn(x)
    return MinimizeResult(
        x, value, float(np.linalg.norm(g)), max_iter, trace,
        converged=float(np.linalg.norm(g)) <= grad_tol,
    )
