"""Derivation-based differential forms on the matrix algebra M_n.

The calculus is M_n tensor Lambda^. sl_n^*: a p-form assigns an n x n
matrix to each antisymmetric p-tuple of basis derivations ``del_k =
ad_{iE_k}``.  Coefficients are stored on strictly increasing multi-indices
only, which makes the antisymmetric representative canonical.

Derivation pairing: ``theta^k(del_l) = delta^k_l``.  A traceless matrix
``gamma = gamma^k E_k`` generates the derivation ``ad_gamma = -i gamma^k
del_k``, so evaluation on matrix arguments carries the factor ``-i`` per
slot; this is the convention under which the canonical 1-form satisfies
``canonical_theta(ad_gamma) = gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from ._multiindex import merge_sign as _merge_sign, permutation_sign as _permutation_sign, sorted_sign as _sorted_sign
from .liealg import LieData


class IncompatibleAlgebras(ValueError):
    """Raised when two forms do not share the same LieData."""


@dataclass
class MatrixForm:
    """A noncommutative p-form with matrix coefficients.

    ``coeffs`` maps strictly increasing index tuples (0-based, entries in
    ``range(lie.dim)``) to complex (n, n) arrays.  Absent keys are zero.
    The degree-0 form stores its single coefficient under the empty tuple.
    """

    lie: LieData
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.lie.n
        for key, val in list(self.coeffs.items()):
            if len(key) != self.degree or any(
                not 0 <= k < self.lie.dim for k in key
            ) or list(key) != sorted(set(key)):
                raise ValueError(f"bad multi-index {key} for degree {self.degree}")
            self.coeffs[key] = np.asarray(val, dtype=complex).reshape(n, n)

    def coeff(self, key: tuple[int, ...]) -> np.ndarray:
        """Coefficient at an increasing key (zero matrix if absent)."""
        n = self.lie.n
        return self.coeffs.get(tuple(key), np.zeros((n, n), dtype=complex))

    def coeff_signed(self, idx: tuple[int, ...]) -> np.ndarray:
        """Coefficient at an arbitrary index tuple, with antisymmetry signs."""
        key, sign = _sorted_sign(tuple(idx))
        n = self.lie.n
        if sign == 0:
            return np.zeros((n, n), dtype=complex)
        return sign * self.coeff(key)

    def prune(self, atol: float = 0.0) -> "MatrixForm":
        """Drop coefficients with max norm <= atol (in place); returns self."""
        dead = [k for k, v in self.coeffs.items() if np.max(np.abs(v)) <= atol]
        for k in dead:
            del self.coeffs[k]
        return self

    def norm(self) -> float:
        """Max absolute coefficient entry over all keys."""
        if not self.coeffs:
            return 0.0
        return max(float(np.max(np.abs(v))) for v in self.coeffs.values())

    def __add__(self, other: "MatrixForm") -> "MatrixForm":
        self._check_compatible(other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        out = {k: v.copy() for k, v in self.coeffs.items()}
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return MatrixForm(self.lie, self.degree, out)

    def __sub__(self, other: "MatrixForm") -> "MatrixForm":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "MatrixForm":
        return MatrixForm(
            self.lie, self.degree, {k: scalar * v for k, v in self.coeffs.items()}
        )

    def _check_compatible(self, other: "MatrixForm"):
        if self.lie is not other.lie and (
            self.lie.n != other.lie.n
            or not np.array_equal(self.lie.basis, other.lie.basis)
        ):
            raise IncompatibleAlgebras("forms live over different Lie data")

    def allclose(self, other: "MatrixForm", atol: float = 1e-12) -> bool:
        return (self - other).norm() <= atol


def zero_form(lie: LieData, degree: int) -> MatrixForm:
    return MatrixForm(lie, degree, {})


def scalar_form(lie: LieData, a: np.ndarray) -> MatrixForm:
    """Wrap a matrix as a degree-0 form."""
    return MatrixForm(lie, 0, {(): np.asarray(a, dtype=complex)})


def wedge(omega: MatrixForm, eta: MatrixForm) -> MatrixForm:
    """Product of forms: signed shuffle sum with matrix multiplication.

    Degrees add; a result of degree above the fiber dimension is the zero
    form of that degree.
    """
    omega._check_compatible(eta)
    degree = omega.degree + eta.degree
    out = MatrixForm(omega.lie, degree, {})
    if degree > omega.lie.dim:
        return out
    acc: dict = {}
    for ki, vi in omega.coeffs.items():
        for kj, vj in eta.coeffs.items():
            key, sign = _merge_sign(ki, kj)
            if sign == 0:
                continue
            acc[key] = acc.get(key, 0) + sign * (vi @ vj)
    out.coeffs = {k: np.asarray(v) for k, v in acc.items()}
    return out


def koszul_d(omega: MatrixForm) -> MatrixForm:
    """Differential of the calculus, via the Koszul formula.

    On basis derivations, with 0-based positions:

        (d w)(del_{j_0}, ..., del_{j_p})
            = sum_a (-1)^a [iE_{j_a}, w(..., no a, ...)]
            + sum_{a<b} (-1)^(a+b) w([del_{j_a}, del_{j_b}], ..., no a, b, ...)

    where ``[del_k, del_l] = C^m_kl del_m``.  Satisfies d(d w) = 0 and the
    graded Leibniz rule over :func:`wedge`.
    """
    lie = omega.lie
    p = omega.degree
    K = lie.dim
    out: dict = {}
    if p + 1 > K:
        return MatrixForm(lie, p + 1, {})
    iE = 1j * lie.basis
    # nonzero structure-constant pairs, cached per LieData
    nz = _structure_nonzeros(lie)
    support = set()
    for key in omega.coeffs:
        for extra in range(K):
            if extra not in key:
                support.add(tuple(sorted(key + (extra,))))
        # bracket terms can only produce keys reachable by replacing one
        # index m of the input key with a pair (u, v) with C^m_uv != 0
        for pos, m in enumerate(key):
            rest = key[:pos] + key[pos + 1:]
            for (u, v) in nz.get(m, ()):
                if u in rest or v in rest:
                    continue
                support.add(tuple(sorted(rest + (u, v))))
    for J in support:
        n = lie.n
        total = np.zeros((n, n), dtype=complex)
        for a in range(p + 1):
            sub = J[:a] + J[a + 1:]
            c = omega.coeffs.get(sub)
            if c is None:
                continue
            sign = -1 if a % 2 else 1
            total += sign * (iE[J[a]] @ c - c @ iE[J[a]])
        for a in range(p + 1):
            for b in range(a + 1, p + 1):
                rest = tuple(x for i, x in enumerate(J) if i not in (a, b))
                row = lie.C[J[a], J[b]]
                for m in np.nonzero(row)[0]:
                    c = omega.coeff_signed((int(m),) + rest)
                    if not c.any():
                        continue
                    sign = -1 if (a + b) % 2 else 1
                    total += sign * row[m] * c
        if np.max(np.abs(total)) > 0:
            out[J] = total
    return MatrixForm(lie, p + 1, out)


_NZ_CACHE: dict = {}


def _structure_nonzeros(lie: LieData) -> dict:
    """Map m -> tuple of pairs (u, v), u < v, with C^m_uv != 0."""
    key = id(lie)
    cached = _NZ_CACHE.get(key)
    if cached is not None:
        return cached
    K = lie.dim
    table: dict = {}
    for u in range(K):
        for v in range(u + 1, K):
            for m in np.nonzero(lie.C[u, v])[0]:
                table.setdefault(int(m), []).append((u, v))
    table = {m: tuple(ps) for m, ps in table.items()}
    _NZ_CACHE[key] = table
    return table


def canonical_theta(lie: LieData) -> MatrixForm:
    """The canonical 1-form ``iE_k tensor theta^k``.

    Evaluating it on ``ad_gamma`` returns the traceless part of ``gamma``.
    Raises ValueError for n = 1 (no inner derivations).
    """
    if lie.n < 2:
        raise ValueError("n = 1 has no inner derivations")
    return MatrixForm(
        lie, 1, {(k,): 1j * lie.basis[k] for k in range(lie.dim)}
    )


def evaluate(omega: MatrixForm, gammas) -> np.ndarray:
    """Evaluate a p-form on the derivations ``ad_gamma`` of p matrices.

    Each argument is reduced to its traceless part (the derivation ad_gamma
    does not see the trace), expanded in the basis, gamma = gamma^k E_k, and
    ``ad_gamma = -i gamma^k del_k``; evaluation is multilinear and
    antisymmetric.
    """
    lie = omega.lie
    if len(gammas) != omega.degree:
        raise ValueError(f"need {omega.degree} arguments, got {len(gammas)}")
    n = lie.n
    if omega.degree == 0:
        return omega.coeff(())
    coeff_rows = [-1j * lie.coeffs_of(_traceless(g, n)) for g in gammas]
    total = np.zeros((n, n), dtype=complex)
    for key, val in omega.coeffs.items():
        # antisymmetric sum over assignments of arguments to the slots of key
        for perm in permutations(range(omega.degree)):
            sign = _permutation_sign(perm)
            factor = 1.0 + 0.0j
            for slot, arg in enumerate(perm):
                factor *= coeff_rows[arg][key[slot]]
            total += sign * factor * val
    return total


def _traceless(g, n: int) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    return g - (np.trace(g) / n) * np.eye(n)


def involution(omega: MatrixForm) -> MatrixForm:
    """Coefficient-wise Hermitian adjoint.

    With real basis derivations this single rule already satisfies the graded
    product law ``(w eta)^* = (-1)^{pq} eta^* w^*`` (the sign is produced by
    the shuffle reordering) and commutes with :func:`koszul_d`.
    """
    return MatrixForm(
        omega.lie,
        omega.degree,
        {k: np.conj(v.T) for k, v in omega.coeffs.items()},
    )


def random_form(
    lie: LieData, degree: int, rng: np.random.Generator, density: float = 1.0
) -> MatrixForm:
    """Seeded random form with unit-normal complex coefficients."""
    n = lie.n
    keys = list(combinations(range(lie.dim), degree))
    if density < 1.0 and len(keys) > 1:
        m = max(1, int(round(density * len(keys))))
        pick = rng.choice(len(keys), size=m, replace=False)
        keys = [keys[i] for i in sorted(pick)]
    coeffs = {
        key: rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for key in keys
    }
    return MatrixForm(lie, degree, coeffs)
