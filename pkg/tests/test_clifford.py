import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bohm_moyal.clifford import (
    BLADE_NAMES,
    CAYLEY,
    IdealElement,
    Multivector,
    all_blades,
    clifford_density,
    complex_trace,
    density_kernel,
    epsilon,
    generator_anticommutators,
    grade,
    ideal_to_spinor,
    matrix_representation,
    product,
    reverse,
    spinor_to_ideal,
    trace,
)

B = Multivector.blade
coeffs8 = arrays(np.float64, 8, elements=st.floats(-10, 10, allow_nan=False))


def test_generator_products():
    assert (B("e1") * B("e2")).allclose(B("e12"), atol=0)
    assert (B("e1") * B("e1")).allclose(Multivector.scalar(1.0), atol=0)
    assert (B("e123") * B("e123")).allclose(Multivector.scalar(-1.0), atol=0)
    assert (B("e2") * B("e1")).allclose(-B("e12"), atol=0)


def test_anticommutators_are_exact():
    table = generator_anticommutators()
    expected = np.zeros((3, 3, 8), dtype=np.int64)
    for i in range(3):
        expected[i, i, 0] = 2
    assert np.array_equal(table, expected)


def test_cayley_table_matches_pauli_matrices():
    mats = [matrix_representation(b) for b in all_blades()]
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            prod = np.einsum("k,kab->ab", CAYLEY[i, j].astype(float),
                             np.array(mats))
            assert np.array_equal(prod, a @ b), (BLADE_NAMES[i], BLADE_NAMES[j])


def test_pseudoscalar_is_imaginary_unit():
    assert np.allclose(matrix_representation(B("e123")), 1j * np.eye(2))


@pytest.mark.parametrize("name, sign", [("1", 1), ("e1", 1), ("e12", -1), ("e123", -1)])
def test_reverse_signs(name, sign):
    assert reverse(B(name)).allclose(B(name, sign), atol=0)


def test_grade_projection():
    a = Multivector(np.arange(1.0, 9.0))
    total = sum((grade(a, k) for k in range(4)), Multivector(np.zeros(8)))
    assert total.allclose(a, atol=0)
    assert grade(a, 2).allclose(Multivector([0, 0, 0, 0, 5, 6, 7, 0]), atol=0)
    with pytest.raises(ValueError):
        grade(a, 4)


def test_traces():
    assert trace(Multivector.scalar(1.0)) == 2.0
    assert trace(B("e3")) == 0.0
    assert trace(epsilon()) == 1.0
    assert complex_trace(B("e123")) == 2j


def test_epsilon_idempotent():
    eps = epsilon()
    assert (eps * eps).allclose(eps, atol=0)
    assert (B("e3") * eps).allclose(eps, atol=0)
    assert reverse(eps).allclose(eps, atol=0)


def test_spinor_encoding_examples():
    eps = epsilon()
    assert spinor_to_ideal(1, 0).mv.allclose(eps, atol=0)
    assert spinor_to_ideal(1j, 0).mv.allclose(B("e12") * eps, atol=0)
    assert spinor_to_ideal(1j, 0).mv.allclose(B("e123") * eps, atol=0)
    assert spinor_to_ideal(0, 1).mv.allclose(B("e1") * eps, atol=0)
    assert ideal_to_spinor(eps) == (1, 0)


def test_spinor_encoding_matches_matrix_column():
    # the ideal element's matrix has the spinor as its first column and zeros in the second
    psi = (0.3 + 0.4j, -0.5 + 0.1j)
    m = matrix_representation(spinor_to_ideal(*psi).mv)
    assert np.allclose(m[:, 0], psi, atol=1e-15)
    assert np.allclose(m[:, 1], 0, atol=1e-15)


def test_round_trip():
    psi = (0.3 + 0.4j, -0.5 + 0.1j)
    back = ideal_to_spinor(spinor_to_ideal(*psi))
    assert abs(back[0] - psi[0]) <= 1e-15 and abs(back[1] - psi[1]) <= 1e-15


def test_non_ideal_element_rejected():
    with pytest.raises(ValueError):
        IdealElement(B("e3", -1.0) + Multivector.scalar(1.0))
    with pytest.raises(ValueError):
        ideal_to_spinor(B("e2"))


def test_densities():
    rho = clifford_density(spinor_to_ideal(1, 0))
    assert rho.allclose(epsilon(), atol=0)
    assert trace(rho) == 1.0
    phi = spinor_to_ideal(0.6, 0.8j)
    assert trace(clifford_density(phi)) == pytest.approx(1.0, abs=1e-15)
    assert density_kernel(phi, phi).allclose(clifford_density(phi), atol=0)


def test_density_kernel_trace_is_inner_product():
    a, b = (0.3 - 0.2j, 0.7j), (-0.4 + 0.1j, 0.5)
    k = density_kernel(spinor_to_ideal(*a), spinor_to_ideal(*b))
    assert complex_trace(k) == pytest.approx(a[0] * np.conj(b[0]) + a[1] * np.conj(b[1]), abs=1e-15)


def test_batched_coefficients():
    a = Multivector(np.random.default_rng(1).normal(size=(4, 3, 8)))
    assert (a * a).shape == (4, 3)
    assert a[1, 2].shape == ()


def test_multivector_validation():
    with pytest.raises(ValueError):
        Multivector(np.zeros(7))
    with pytest.raises(ValueError):
        Multivector([np.nan] + [0] * 7)


@settings(max_examples=60, deadline=None)
@given(a=coeffs8, b=coeffs8, c=coeffs8)
def test_algebra_laws(a, b, c):
    A, Bm, C = Multivector(a), Multivector(b), Multivector(c)
    scale = 1 + np.abs(a).max() * np.abs(b).max() * np.abs(c).max()
    assert np.abs(((A * Bm) * C).coeffs - (A * (Bm * C)).coeffs).max() <= 1e-12 * scale
    assert np.abs(reverse(A * Bm).coeffs - (reverse(Bm) * reverse(A)).coeffs).max() <= 1e-12 * scale
    m = matrix_representation(A * Bm)
    assert np.abs(m - matrix_representation(A) @ matrix_representation(Bm)).max() <= 1e-12 * scale


def test_faithfulness_over_1000_random_pairs():
    rng = np.random.default_rng(7)
    a, b = Multivector(rng.normal(size=(1000, 8))), Multivector(rng.normal(size=(1000, 8)))
    lhs = matrix_representation(product(a, b))
    rhs = matrix_representation(a) @ matrix_representation(b)
    assert np.abs(lhs - rhs).max() <= 1e-12
