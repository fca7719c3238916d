"""Basis construction, structure constants, and algebra identities."""

import numpy as np
import pytest

from gaugebench.liealg import (
    LieData,
    NotALieBasis,
    structure_constants,
    su_basis,
    validate_lie_data,
)


def test_su1_is_empty():
    d = su_basis(1)
    assert d.dim == 0
    assert d.C.shape == (0, 0, 0)
    assert validate_lie_data(d).passed


def test_invalid_size_raises():
    with pytest.raises(ValueError):
        su_basis(0)
    with pytest.raises(ValueError):
        su_basis(-3)


def test_su2_is_pauli():
    d = su_basis(2)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    assert np.allclose(d.basis, np.stack([sx, sy, sz]))
    # [sigma_1, sigma_2] = 2 i sigma_3  <=>  C^3_12 = -2, antisymmetric, cyclic
    eps = np.zeros((3, 3, 3))
    for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                         (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}.items():
        eps[i, j, k] = s
    assert np.allclose(d.C, -2.0 * eps, atol=1e-14)


def test_su3_gellmann_trace_form():
    d = su_basis(3)
    assert d.dim == 8
    assert np.allclose(d.trace_form, 2.0 * np.eye(8), atol=1e-13)
    # [lambda_1, lambda_2] = 2 i lambda_3
    assert d.C[0, 1, 2] == pytest.approx(-2.0, abs=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_validator_passes_constructed_bases(n):
    d = su_basis(n)
    rep = validate_lie_data(d)
    assert rep.passed, rep.residuals
    if n > 1:
        assert rep.residuals["jacobi"] <= 1e-12
        assert rep.residuals["commutator"] <= 1e-12


def test_antisymmetry_is_exact():
    d = su_basis(3)
    swapped = -np.swapaxes(d.C, 0, 1)
    assert np.array_equal(d.C, swapped)
    assert np.all(np.diagonal(d.C, axis1=0, axis2=1) == 0.0)


def test_flipped_constant_detected():
    d = su_basis(2)
    C = d.C.copy()
    C[0, 1, 2] *= -1
    C[1, 0, 2] *= -1
    bad = LieData(n=2, basis=d.basis, C=C, trace_form=d.trace_form)
    rep = validate_lie_data(bad)
    assert not rep.passed
    assert rep.residuals["commutator"] == pytest.approx(4.0, abs=1e-12)


def test_non_lie_basis_rejected():
    # {sigma_x, sigma_y} does not close: [sx, sy] = 2i sz is outside the span
    d = su_basis(2)
    with pytest.raises(NotALieBasis):
        structure_constants(d.basis[:2])


def test_structure_constants_on_scaled_basis():
    # generic Gram solve path: non-orthonormal rescaling of the Pauli basis
    d = su_basis(2)
    scaled = d.basis * np.array([1.0, 2.0, 0.5])[:, None, None]
    C = structure_constants(scaled)
    recon = -1j * np.einsum("klm,mab->klab", C, scaled)
    comms = np.einsum("kab,lbc->klac", scaled, scaled)
    comms = comms - np.einsum("lab,kbc->klac", scaled, scaled)
    assert np.allclose(recon, comms, atol=1e-12)


def test_coeff_roundtrip():
    d = su_basis(3)
    rng = np.random.default_rng(7)
    x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    mat = d.matrix_of(x)
    assert np.allclose(d.coeffs_of(mat), x, atol=1e-12)
    with pytest.raises(ValueError):
        d.coeffs_of(np.eye(3))
