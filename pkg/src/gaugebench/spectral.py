"""Finite real spectral triples: axioms, fluctuations, spectral action.

The algebra is a sum of full matrix blocks, A = M_{d_1} + ... + M_{d_B},
acting on H = C^N through a list of summands (block index, multiplicity):
the summand contributes d_block * mult dimensions on which the element acts
as a_block tensor Id_mult.  The antiunitary J is stored through its unitary
part K, J(v) = K conj(v), so that conjugation of operators reads
J X J^-1 = K conj(X) K^dagger.

Sign table by KO-dimension mod 8 (blank entries undefined):

    n      0   1   2   3   4   5   6   7
    eps    +   +   -   -   -   -   +   +
    eps'   +   -   +   +   +   -   +   +
    eps''  +       -       +       -
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

EPS = {0: 1, 1: 1, 2: -1, 3: -1, 4: -1, 5: -1, 6: 1, 7: 1}
EPS_PRIME = {0: 1, 1: -1, 2: 1, 3: 1, 4: 1, 5: -1, 6: 1, 7: 1}
EPS_DOUBLE_PRIME = {0: 1, 2: -1, 4: 1, 6: -1}


class SignTableGap(ValueError):
    """Raised when eps'' is requested for an odd KO-dimension."""


class InvalidFluctuation(ValueError):
    """Raised for non-Hermitian fluctuation one-forms."""


class InvalidGaugeElement(ValueError):
    """Raised for non-unitary algebra elements used as gauge transformations."""


def table_signs(ko_dim: int, need_eps_pp: bool = False):
    """(eps, eps', eps'') for a KO-dimension; eps'' is None when undefined."""
    n = ko_dim % 8
    epp = EPS_DOUBLE_PRIME.get(n)
    if need_eps_pp and epp is None:
        raise SignTableGap(f"KO-dimension {n} is odd: no eps'' is defined")
    return EPS[n], EPS_PRIME[n], epp


@dataclass
class FiniteSpectralTriple:
    """Matrix-block algebra represented on C^N with a Hermitian Dirac operator.

    Attributes:
        block_dims: algebra block sizes (d_1, ..., d_B).
        summands: list of (block_index, multiplicity) pairs describing H.
        D: Hermitian N x N Dirac matrix.
        gamma: optional Hermitian unitary grading.
        J_unitary: optional unitary K with J v = K conj(v).
        ko_dim: KO-dimension mod 8 used for the sign table.
    """

    block_dims: tuple
    summands: list
    D: np.ndarray
    gamma: np.ndarray = None
    J_unitary: np.ndarray = None
    ko_dim: int = 0

    def __post_init__(self):
        self.block_dims = tuple(int(d) for d in self.block_dims)
        self.summands = [(int(b), int(m)) for b, m in self.summands]
        N = self.hilbert_dim
        self.D = np.asarray(self.D, dtype=complex).reshape(N, N)
        if self.gamma is not None:
            self.gamma = np.asarray(self.gamma, dtype=complex).reshape(N, N)
        if self.J_unitary is not None:
            self.J_unitary = np.asarray(self.J_unitary, dtype=complex).reshape(N, N)

    @property
    def hilbert_dim(self) -> int:
        return sum(self.block_dims[b] * m for b, m in self.summands)

    def represent(self, blocks) -> np.ndarray:
        """pi(a) for an algebra element given per block."""
        mats = [np.asarray(blocks[i], dtype=complex).reshape(d, d)
                for i, d in enumerate(self.block_dims)]
        pieces = [np.kron(np.eye(m), mats[b]) for b, m in self.summands]
        out = np.zeros((self.hilbert_dim, self.hilbert_dim), dtype=complex)
        at = 0
        for piece in pieces:
            k = piece.shape[0]
            out[at:at + k, at:at + k] = piece
            at += k
        return out

    def algebra_basis(self):
        """Represented matrix units spanning the algebra."""
        out = []
        for i, d in enumerate(self.block_dims):
            for p in range(d):
                for q in range(d):
                    blocks = [np.zeros((dd, dd)) for dd in self.block_dims]
                    blocks[i] = np.zeros((d, d))
                    blocks[i][p, q] = 1.0
                    out.append(self.represent(blocks))
        return out

    def conjugate_by_J(self, X: np.ndarray) -> np.ndarray:
        """J X J^-1 = K conj(X) K^dagger."""
        K = self.J_unitary
        return K @ np.conj(X) @ K.conj().T


@dataclass
class AxiomReport:
    """Per-axiom max residuals; ``notes`` marks axioms that are vacuous."""

    residuals: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals.values())

    def worst(self):
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]


def _mx(X) -> float:
    return float(np.max(np.abs(X))) if np.size(X) else 0.0


def check_axioms(t: FiniteSpectralTriple, tolerance: float = 1e-12) -> AxiomReport:
    """Verify the triple's defining relations on a spanning set of the algebra.

    Includes the grading and reality axioms when the operators are present,
    the commutant condition, and the first-order condition.  The bounded-
    commutator requirement is vacuous in finite dimensions and is reported
    as such.
    """
    rep = AxiomReport(tolerance=tolerance)
    N = t.hilbert_dim
    basis = t.algebra_basis()
    rep.residuals["dirac_hermitian"] = _mx(t.D - t.D.conj().T)
    rep.residuals["bounded_commutator"] = 0.0
    rep.notes["bounded_commutator"] = "finite dimension: every operator is bounded"
    if t.gamma is not None:
        g = t.gamma
        rep.residuals["gamma_hermitian"] = _mx(g - g.conj().T)
        rep.residuals["gamma_squares_to_one"] = _mx(g @ g - np.eye(N))
        rep.residuals["gamma_anticommutes_dirac"] = _mx(t.D @ g + g @ t.D)
        rep.residuals["gamma_commutes_algebra"] = max(
            _mx(g @ a - a @ g) for a in basis
        )
    if t.J_unitary is not None:
        eps, eps_p, eps_pp = table_signs(t.ko_dim, need_eps_pp=t.gamma is not None)
        K = t.J_unitary
        rep.residuals["j_antiunitary"] = _mx(K.conj().T @ K - np.eye(N))
        rep.residuals["j_squared"] = _mx(K @ np.conj(K) - eps * np.eye(N))
        rep.residuals["j_dirac"] = _mx(K @ np.conj(t.D) - eps_p * t.D @ K)
        if t.gamma is not None:
            rep.residuals["j_gamma"] = _mx(
                K @ np.conj(t.gamma) - eps_pp * t.gamma @ K
            )
        conj_basis = [t.conjugate_by_J(a) for a in basis]
        rep.residuals["commutant"] = max(
            _mx(ca @ b - b @ ca) for ca in conj_basis for b in basis
        )
        rep.residuals["first_order"] = max(
            _mx((t.D @ a - a @ t.D) @ cb - cb @ (t.D @ a - a @ t.D))
            for a in basis
            for cb in conj_basis
        )
    return rep


def represent_one_form(t: FiniteSpectralTriple, terms) -> np.ndarray:
    """pi_D of a universal one-form: sum_i pi(a_i) [D, pi(b_i)].

    ``terms`` is a list of (blocks_a, blocks_b) pairs.  Linear in the terms;
    the empty list gives zero.
    """
    N = t.hilbert_dim
    out = np.zeros((N, N), dtype=complex)
    for blocks_a, blocks_b in terms:
        a = t.represent(blocks_a)
        b = t.represent(blocks_b)
        out += a @ (t.D @ b - b @ t.D)
    return out


def fluctuate(t: FiniteSpectralTriple, omega: np.ndarray, atol: float = 1e-12) -> FiniteSpectralTriple:
    """Inner fluctuation D -> D + omega + eps' J omega J^-1.

    ``omega`` must be Hermitian (the represented one-form of a Hermitian
    universal form); J and gamma are carried over unchanged, and the result
    satisfies the same axioms.
    """
    omega = np.asarray(omega, dtype=complex)
    if _mx(omega - omega.conj().T) > atol:
        raise InvalidFluctuation("fluctuation one-form must be Hermitian")
    D = t.D + omega
    if t.J_unitary is not None:
        _, eps_p, _ = table_signs(t.ko_dim)
        D = D + eps_p * t.conjugate_by_J(omega)
    return FiniteSpectralTriple(
        t.block_dims, t.summands, D, t.gamma, t.J_unitary, t.ko_dim
    )


def gauge_transform_spectral(
    t: FiniteSpectralTriple, u_blocks, atol: float = 1e-12
) -> FiniteSpectralTriple:
    """Inner symmetry by a unitary algebra element.

    D -> D + pi(u)[D, pi(u)*] + eps' J (pi(u)[D, pi(u)*]) J^-1; J and gamma
    are left untouched.
    """
    u = t.represent(u_blocks)
    if _mx(u.conj().T @ u - np.eye(t.hilbert_dim)) > atol:
        raise InvalidGaugeElement("gauge element must be unitary in the algebra")
    shift = u @ (t.D @ u.conj().T - u.conj().T @ t.D)
    D = t.D + shift
    if t.J_unitary is not None:
        _, eps_p, _ = table_signs(t.ko_dim)
        D = D + eps_p * t.conjugate_by_J(shift)
    return FiniteSpectralTriple(
        t.block_dims, t.summands, D, t.gamma, t.J_unitary, t.ko_dim
    )


def spectral_action(t: FiniteSpectralTriple, chi, cutoff: float) -> float:
    """Trace of chi(D^2 / cutoff) by exact eigendecomposition."""
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    eigs = np.linalg.eigvalsh(t.D)
    return float(sum(chi(l * l / cutoff) for l in eigs))


def chi_bump(width: float = 0.5):
    """Smooth cutoff: exactly 1 on [0, 1], exactly 0 beyond 1 + width."""

    def mollifier(s):
        return np.exp(-1.0 / s) if s > 0 else 0.0

    def chi(x):
        x = abs(x)
        if x <= 1.0:
            return 1.0
        if x >= 1.0 + width:
            return 0.0
        s = (x - 1.0) / width
        a, b = mollifier(1.0 - s), mollifier(s)
        return a / (a + b)

    return chi


def chi_gaussian(x):
    """Even positive Schwartz weight."""
    return float(np.exp(-float(x) ** 2))


# --- built-in triples ----------------------------------------------------------


def two_point_triple(m: float) -> FiniteSpectralTriple:
    """Even triple over C + C on C^2 with off-diagonal Dirac (no real structure).

    Eigenvalues of D are +-m.
    """
    D = np.array([[0.0, m], [m, 0.0]], dtype=complex)
    gamma = np.diag([1.0, -1.0]).astype(complex)
    return FiniteSpectralTriple(
        block_dims=(1, 1), summands=[(0, 1), (1, 1)], D=D, gamma=gamma, ko_dim=0
    )


def two_point_real_triple(m: float) -> FiniteSpectralTriple:
    """Real even triple over C + C on C^3 at KO-dimension 0.

    H carries the left action diag(a, a, b); J swaps the second and third
    summands with conjugation.  All axioms hold, including first order, with
    a nonzero off-diagonal Dirac (eigenvalues 0, +-sqrt(2) m).
    """
    D = np.array(
        [[0.0, m, m], [m, 0.0, 0.0], [m, 0.0, 0.0]], dtype=complex
    )
    gamma = np.diag([1.0, -1.0, -1.0]).astype(complex)
    K = np.array([[1.0, 0, 0], [0, 0, 1.0], [0, 1.0, 0]], dtype=complex)
    return FiniteSpectralTriple(
        block_dims=(1, 1),
        summands=[(0, 1), (0, 1), (1, 1)],
        D=D,
        gamma=gamma,
        J_unitary=K,
        ko_dim=0,
    )


def matrix_point_triple(M: np.ndarray) -> FiniteSpectralTriple:
    """Odd real triple over M_2(C) + C on C^4 at KO-dimension 7.

    The Dirac operator diag(M, M^T) with Hermitian M satisfies the
    first-order condition; fluctuations act inside the first summand and are
    mirrored into the second by the real structure.
    """
    M = np.asarray(M, dtype=complex).reshape(2, 2)
    if _mx(M - M.conj().T) > 1e-12:
        raise ValueError("Dirac block must be Hermitian")
    D = np.zeros((4, 4), dtype=complex)
    D[:2, :2] = M
    D[2:, 2:] = M.T
    K = np.zeros((4, 4), dtype=complex)
    K[:2, 2:] = np.eye(2)
    K[2:, :2] = np.eye(2)
    return FiniteSpectralTriple(
        block_dims=(2, 1),
        summands=[(0, 1), (1, 2)],
        D=D,
        gamma=None,
        J_unitary=K,
        ko_dim=7,
    )


def random_algebra_unitary(t: FiniteSpectralTriple, rng: np.random.Generator):
    """Per-block Haar-ish unitaries, returned as block list."""
    blocks = []
    for d in t.block_dims:
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(z)
        blocks.append(q * (np.diagonal(r) / np.abs(np.diagonal(r))))
    return blocks


def random_hermitian_one_form(
    t: FiniteSpectralTriple, rng: np.random.Generator, n_terms: int = 3
) -> np.ndarray:
    """pi_D of a random Hermitian universal one-form.

    Builds sum_i a_i [D, b_i] + h.c. so the represented form is Hermitian by
    construction.
    """
    terms = []
    for _ in range(n_terms):
        blocks_a = [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for d in t.block_dims
        ]
        blocks_b = [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for d in t.block_dims
        ]
        terms.append((blocks_a, blocks_b))
    omega = represent_one_form(t, terms)
    return 0.5 * (omega + omega.conj().T)
