"""Bases of su(n)/sl(n) with structure constants and identity validation.

Conventions used throughout the package:

* basis matrices ``E_k`` are Hermitian and traceless, normalized so that
  ``tr(E_k E_l) = 2 delta_kl`` (generalized Gell-Mann basis);
* structure constants are real and defined by ``[E_k, E_l] = -i C^m_kl E_m``;
* the real derivations ``ad_{iE_k}`` then close as
  ``[ad_{iE_k}, ad_{iE_l}] = C^m_kl ad_{iE_m}``, i.e. ``C`` is also the
  structure table of the real form in the anti-Hermitian basis ``iE_k``.

``C`` is stored as an array with ``C[k, l, m] = C^m_kl`` so that the
coefficient bracket reads ``[x, y]^m = C[k, l, m] x^k y^l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NotALieBasis(ValueError):
    """Raised when a set of matrices does not close under the commutator."""


@dataclass(frozen=True)
class LieData:
    """A Hermitian traceless basis with its structure constants.

    Attributes:
        n: matrix size.
        basis: array of shape (K, n, n) with K = n**2 - 1 Hermitian
            traceless matrices.
        C: real structure constants, shape (K, K, K), ``C[k, l, m] = C^m_kl``.
        trace_form: real Gram matrix ``tr(E_k E_l)``, shape (K, K).
    """

    n: int
    basis: np.ndarray
    C: np.ndarray
    trace_form: np.ndarray

    @property
    def dim(self) -> int:
        """Dimension of the algebra, n**2 - 1."""
        return self.basis.shape[0]

    def bracket_coeffs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Coefficient-space bracket ``[x, y]^m = C^m_kl x^k y^l``.

        Both arguments may carry leading batch axes; the basis index is the
        last axis.
        """
        return np.einsum("klm,...k,...l->...m", self.C, x, y)

    def coeffs_of(self, a: np.ndarray, atol: float = 1e-10) -> np.ndarray:
        """Expand a traceless matrix in the basis, ``a = coeffs^k E_k``.

        With the normalization tr(E_k E_l) = 2 delta_kl the expansion is the
        trace projection coeffs^k = tr(E_k a) / 2.  Raises ValueError if ``a``
        has a trace part larger than ``atol``.
        """
        a = np.asarray(a, dtype=complex)
        if abs(np.trace(a)) > atol:
            raise ValueError(f"matrix has trace part {np.trace(a):.3e}, not in sl(n)")
        return np.einsum("kij,ji->k", self.basis, a) / 2.0

    def matrix_of(self, coeffs: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`coeffs_of`: ``coeffs^k E_k``."""
        return np.einsum("...k,kij->...ij", coeffs, self.basis)


def _gellmann_matrices(n: int) -> np.ndarray:
    """Generalized Gell-Mann matrices in the canonical order.

    For each column k = 2..n: the symmetric and antisymmetric pair for every
    row j < k, then the diagonal matrix closing that block.  Reproduces the
    Pauli matrices for n = 2 and the eight Gell-Mann matrices for n = 3.
    """
    mats = []
    for k in range(1, n):
        for j in range(k):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = 1.0
            sym[k, j] = 1.0
            mats.append(sym)
            asym = np.zeros((n, n), dtype=complex)
            asym[j, k] = -1.0j
            asym[k, j] = 1.0j
            mats.append(asym)
        diag = np.zeros((n, n), dtype=complex)
        scale = np.sqrt(2.0 / ((k + 1) * k))
        for i in range(k):
            diag[i, i] = scale
        diag[k, k] = -k * scale
        mats.append(diag)
    if not mats:
        return np.zeros((0, n, n), dtype=complex)
    return np.stack(mats)


def structure_constants(basis: np.ndarray, *, atol: float = 1e-10) -> np.ndarray:
    """Solve ``[E_k, E_l] = -i C^m_kl E_m`` for the real table C.

    Uses the trace form: for an orthogonal basis this reduces to the closed
    projection C^m_kl = (i/2) tr(E_m [E_k, E_l]); a generic Gram solve is kept
    for non-orthogonal bases.  Raises :class:`NotALieBasis` when the
    commutators do not lie in the span of the basis (projection residual
    above ``atol``).
    """
    basis = np.asarray(basis, dtype=complex)
    K = basis.shape[0]
    if K == 0:
        return np.zeros((0, 0, 0))
    comms = np.einsum("kab,lbc->klac", basis, basis)
    comms = comms - np.einsum("lab,kbc->klac", basis, basis)
    gram = np.einsum("mab,pba->mp", basis, basis)
    rhs = np.einsum("mab,klba->mkl", basis, comms)
    C = np.einsum("mp,pkl->klm", np.linalg.inv(gram), 1j * rhs)
    if np.max(np.abs(C.imag)) > 1e-12:
        raise NotALieBasis(
            f"structure constants carry imaginary residue {np.max(np.abs(C.imag)):.3e}"
        )
    C = C.real
    # exact antisymmetrization in the lower index pair
    C = 0.5 * (C - np.swapaxes(C, 0, 1))
    reconstructed = -1j * np.einsum("klm,mab->klab", C, basis)
    residual = np.max(np.abs(comms - reconstructed)) if comms.size else 0.0
    if residual > atol:
        raise NotALieBasis(f"basis not closed under commutator, residual {residual:.3e}")
    return C


def su_basis(n: int) -> LieData:
    """Generalized Gell-Mann basis of su(n) with tr(E_k E_l) = 2 delta_kl.

    ``n = 1`` yields the empty algebra.  Raises ValueError for n <= 0.
    """
    if n <= 0:
        raise ValueError(f"matrix size must be positive, got {n}")
    basis = _gellmann_matrices(n)
    C = structure_constants(basis)
    trace_form = np.einsum("kab,lba->kl", basis, basis).real
    return LieData(n=n, basis=basis, C=C, trace_form=trace_form)


@dataclass
class ValidationReport:
    """Per-invariant max residuals for a :class:`LieData`."""

    residuals: dict = field(default_factory=dict)
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals.values())

    def worst(self) -> tuple[str, float]:
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]


def validate_lie_data(d: LieData, tolerance: float = 1e-12) -> ValidationReport:
    """Check hermiticity, tracelessness, antisymmetry, commutators and Jacobi.

    Returns a report carrying max residuals; nothing is raised.
    """
    rep = ValidationReport(tolerance=tolerance)
    B, C = d.basis, d.C
    if B.shape[0] == 0:
        rep.residuals = {"empty_algebra": 0.0}
        return rep
    rep.residuals["hermitian"] = float(np.max(np.abs(B - np.conj(np.swapaxes(B, 1, 2)))))
    rep.residuals["traceless"] = float(np.max(np.abs(np.trace(B, axis1=1, axis2=2))))
    gram = np.einsum("kab,lba->kl", B, B)
    sign, logdet = np.linalg.slogdet(gram)
    rep.residuals["gram_nonsingular"] = 0.0 if sign != 0 else 1.0
    rep.residuals["antisymmetry"] = float(np.max(np.abs(C + np.swapaxes(C, 0, 1))))
    comms = np.einsum("kab,lbc->klac", B, B) - np.einsum("lab,kbc->klac", B, B)
    rep.residuals["commutator"] = float(
        np.max(np.abs(comms + 1j * np.einsum("klm,mab->klab", C, B)))
    )
    # sum over p of C^p_kl C^q_pm, cyclic in (k, l, m)
    cc = np.einsum("klp,pmq->klmq", C, C)
    jac = cc + np.einsum("lmp,pkq->klmq", C, C) + np.einsum("mkp,plq->klmq", C, C)
    rep.residuals["jacobi"] = float(np.max(np.abs(jac)))
    return rep
