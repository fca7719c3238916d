"""Noncommutative connections on the free rank-one module over M_n.

A connection is encoded by its 1-form part ``A = A_k tensor theta^k``
relative to the canonical flat connection; the full connection form is
``A - i theta``.  Hermitian connections have anti-Hermitian coefficients
``A_k``; their curvature components

    F_kl = [A_k, A_l] - C^m_kl A_m

are anti-Hermitian and feed the positive matrix-model action
``S[A] = (1/8n) sum_kl ||F_kl||_F^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import LieData
from .ncforms import MatrixForm, canonical_theta, koszul_d, wedge


class InvalidGaugeElement(ValueError):
    """Raised for non-unitary gauge transformations."""


@dataclass
class MatrixConnection:
    """Connection 1-form coefficients A_k, shape (dim, n, n).

    ``hermitian=True`` asserts every A_k is anti-Hermitian (checked to
    1e-12 at construction).
    """

    lie: LieData
    A: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex).reshape(
            self.lie.dim, self.lie.n, self.lie.n
        )
        if self.hermitian:
            drift = np.max(np.abs(self.A + np.conj(np.swapaxes(self.A, 1, 2))))
            if self.A.size and drift > 1e-12:
                raise ValueError(
                    f"connection flagged Hermitian but A_k + A_k^dag has norm {drift:.3e}"
                )

    def one_form(self) -> MatrixForm:
        """A as a noncommutative 1-form."""
        return MatrixForm(
            self.lie, 1, {(k,): self.A[k] for k in range(self.lie.dim)}
        )

    def full_form(self) -> MatrixForm:
        """The connection form A - i theta."""
        return self.one_form() - canonical_theta(self.lie)


def curvature_components(c: MatrixConnection) -> np.ndarray:
    """All components F_kl = [A_k, A_l] - C^m_kl A_m, shape (dim, dim, n, n)."""
    A = c.A
    comm = np.einsum("kab,lbc->klac", A, A) - np.einsum("lab,kbc->klac", A, A)
    return comm - np.einsum("klm,mab->klab", c.lie.C, A)


def curvature(c: MatrixConnection) -> MatrixForm:
    """Curvature 2-form, coefficient F_kl at each increasing pair (k, l)."""
    F = curvature_components(c)
    coeffs = {}
    for k in range(c.lie.dim):
        for l in range(k + 1, c.lie.dim):
            if np.max(np.abs(F[k, l])) > 0:
                coeffs[(k, l)] = F[k, l]
    return MatrixForm(c.lie, 2, coeffs)


def gauge_transform(c: MatrixConnection, g: np.ndarray, atol: float = 1e-12) -> MatrixConnection:
    """A_k -> g^-1 A_k g for unitary g; curvature conjugates accordingly."""
    g = np.asarray(g, dtype=complex)
    if np.max(np.abs(g.conj().T @ g - np.eye(c.lie.n))) > atol:
        raise InvalidGaugeElement("gauge element is not unitary")
    ginv = g.conj().T
    return MatrixConnection(c.lie, np.einsum("ab,kbc,cd->kad", ginv, c.A, g), c.hermitian)


def action(c: MatrixConnection) -> float:
    """Matrix-model action S[A] = (1/8n) sum_kl ||F_kl||_F^2.

    Equals -(1/8n) sum_kl tr(F_kl F_kl) for Hermitian connections (the F_kl
    are then anti-Hermitian), is nonnegative, and vanishes exactly on the
    flat configurations A = 0 and A_k = iE_k.
    """
    if not c.hermitian:
        raise ValueError("action requires a Hermitian connection (anti-Hermitian A_k)")
    F = curvature_components(c)
    return float(np.einsum("klab,klab->", F.conj(), F).real / (8.0 * c.lie.n))


def covariant_derivative(c: MatrixConnection, a: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Covariant derivative of ``a`` along ``ad_gamma``.

    Computes ``ad_gamma(a) + (A - i theta)(ad_gamma) a``; for A = 0 this is
    the canonical flat connection, ``a -> -a gamma``, and for A_k = iE_k it
    is the derivation itself, ``a -> [gamma, a]``.
    """
    lie = c.lie
    a = np.asarray(a, dtype=complex)
    gamma = np.asarray(gamma, dtype=complex)
    gamma = gamma - (np.trace(gamma) / lie.n) * np.eye(lie.n)  # ad_gamma ignores the trace
    coeffs = lie.coeffs_of(gamma)
    # (A - i theta)(ad_gamma) = -i gamma^k (A_k - iE_k)
    pot = np.einsum("k,kab->ab", -1j * coeffs, c.A - 1j * lie.basis)
    return (gamma @ a - a @ gamma) + pot @ a


def bianchi_residual(c: MatrixConnection) -> float:
    """Max coefficient of d'F + omega ^ F - F ^ omega with omega = A - i theta."""
    F = curvature(c)
    omega = c.full_form()
    lhs = koszul_d(F) + wedge(omega, F) - wedge(F, omega)
    return lhs.norm()


def random_connection(
    lie: LieData, rng: np.random.Generator, scale: float = 1.0, hermitian: bool = True
) -> MatrixConnection:
    """Seeded random connection with anti-Hermitian coefficients."""
    n = lie.n
    raw = rng.standard_normal((lie.dim, n, n)) + 1j * rng.standard_normal((lie.dim, n, n))
    if hermitian:
        raw = 0.5 * (raw - np.conj(np.swapaxes(raw, 1, 2)))
    return MatrixConnection(lie, scale * raw, hermitian)


def random_unitary(n: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    """Haar-ish random U(n) element via QR; ``special=True`` fixes det = 1."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    if special:
        q = q * np.linalg.det(q) ** (-1.0 / n)
    return q
