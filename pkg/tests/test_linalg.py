import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bell, hermitian_matrices, mixed, random_hermitian
from entmoments.errors import BadParty, InvalidState, NonRealTrace, NotHermitian
from entmoments.linalg import (
    DensityMatrix,
    Spectrum,
    hermitian_eigenvalues,
    jacobi_eigenvalues,
    kron,
    kron_all,
    partial_trace,
    partial_trace_matrix,
    partial_transpose,
    partial_transpose_matrix,
    trace_power,
)
from entmoments.states import ghz_noise, werner

SX = np.array([[0, 1], [1, 0]])


def test_kron_examples():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    # sigma_x (x) sigma_x sends |00> to |11>
    out = kron(SX, SX) @ np.array([1, 0, 0, 0])
    assert np.allclose(out, [0, 0, 0, 1])


def test_kron_all_is_associative(rng):
    a, b, c = (random_hermitian(rng, n) for n in (2, 3, 2))
    assert np.allclose(kron_all([a, b, c]), kron(kron(a, b), c))
    assert np.allclose(kron_all([a, b, c]), kron(a, kron(b, c)))


def test_eigenvalue_examples():
    assert np.allclose(hermitian_eigenvalues(np.diag([3, 1, 2])).eigenvalues, [1, 2, 3])
    assert np.allclose(hermitian_eigenvalues([[0, 1j], [-1j, 0]]).eigenvalues, [-1, 1])
    pt = partial_transpose(bell(), 1)
    assert np.allclose(hermitian_eigenvalues(pt).eigenvalues, [-0.5, 0.5, 0.5, 0.5], atol=1e-13)


def test_eigenvalues_reject_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues([[0, 1], [0, 0]])
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(np.ones((2, 3)))


def test_spectrum_is_sorted_and_frozen():
    s = Spectrum(np.array([2.0, -1.0, 0.5]))
    assert list(s) == [-1.0, 0.5, 2.0]
    assert s.min == -1.0 and s.max == 2.0 and len(s) == 3
    assert np.allclose(s.power_sums(3), [1.5, 5.25, 7.125])
    with pytest.raises(ValueError):
        s.eigenvalues[0] = 3.0


@pytest.mark.parametrize("n", [2, 3, 4, 8, 9])
def test_jacobi_matches_lapack(rng, n):
    for _ in range(20):
        h = random_hermitian(rng, n)
        ours = jacobi_eigenvalues(h)
        assert np.max(np.abs(ours - np.linalg.eigvalsh(h))) < 1e-11
        assert abs(ours.sum() - np.trace(h).real) < 1e-9


def test_jacobi_degenerate_and_diagonal():
    assert np.allclose(jacobi_eigenvalues(np.eye(5)), np.ones(5))
    u = np.linalg.qr(np.arange(1, 17).reshape(4, 4) + 1j * np.eye(4))[0]
    h = u @ np.diag([1.0, 1.0, -2.0, -2.0]) @ u.conj().T
    assert np.allclose(jacobi_eigenvalues(h), [-2, -2, 1, 1], atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(hermitian_matrices())
def test_jacobi_property(h):
    ev = hermitian_eigenvalues(h).eigenvalues
    scale = max(1.0, np.linalg.norm(h))
    assert np.max(np.abs(ev - np.linalg.eigvalsh(h))) <= 1e-11 * scale
    assert abs(ev.sum() - np.trace(h).real) <= 1e-9 * scale


@settings(max_examples=40, deadline=None)
@given(hermitian_matrices(), st.integers(0, 2**31))
def test_spectrum_invariant_under_unitary_conjugation(h, seed):
    rng = np.random.default_rng(seed)
    n = h.shape[0]
    u = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
    a = hermitian_eigenvalues(h).eigenvalues
    b = hermitian_eigenvalues(u @ h @ u.conj().T).eigenvalues
    assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.linalg.norm(h))


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(4), (2, 2))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(4) / 4, (2, 3))
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]), (2,))
    rho = mixed(4, (2, 2))
    assert rho.dim == 4 and rho.nparties == 2
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_partial_transpose_examples(rng):
    rho = mixed(4, (2, 2))
    assert np.allclose(partial_transpose(rho, 1), rho.matrix)
    assert abs(hermitian_eigenvalues(partial_transpose(werner(1.0), 1)).min + 0.5) < 1e-12
    a = np.array([[0.7, 0.2], [0.2, 0.3]])
    b_sym = np.array([[0.6, 0.1], [0.1, 0.4]])
    b_herm = np.array([[0.6, 0.1j], [-0.1j, 0.4]])
    prod = DensityMatrix(np.kron(a, b_sym), (2, 2))
    assert np.allclose(partial_transpose(prod, 1), prod.matrix)
    prod2 = DensityMatrix(np.kron(a, b_herm), (2, 2))
    assert not np.allclose(partial_transpose(prod2, 1), prod2.matrix)
    assert np.allclose(partial_transpose(prod2, 1), np.kron(a, b_herm.T))


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (2, 2, 2), (2, 3, 2)])
def test_partial_transpose_is_involution_and_factorwise(rng, dims):
    n = int(np.prod(dims))
    m = random_hermitian(rng, n)
    for p in range(len(dims)):
        once = partial_transpose_matrix(m, dims, p)
        assert np.allclose(partial_transpose_matrix(once, dims, p), m)
    full = m
    for p in range(len(dims)):
        full = partial_transpose_matrix(full, dims, p)
    assert np.allclose(full, m.T)
    factors = [random_hermitian(rng, d) for d in dims]
    expect = kron_all([f.T if i == 1 else f for i, f in enumerate(factors)])
    assert np.allclose(partial_transpose_matrix(kron_all(factors), dims, 1), expect)


def test_partial_transpose_spectrum_invariant_under_local_basis_change(rng):
    rho = DensityMatrix(np.kron(np.eye(2), np.eye(3)) / 6 * 0.5 + 0.5 * np.outer(*[np.ones(6) / np.sqrt(6)] * 2), (2, 3))
    u = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    w = np.kron(np.eye(2), u)
    rotated = DensityMatrix(w @ rho.matrix @ w.conj().T, (2, 3))
    a = hermitian_eigenvalues(partial_transpose(rho, 1)).eigenvalues
    b = hermitian_eigenvalues(partial_transpose(rotated, 1)).eigenvalues
    assert np.allclose(a, b, atol=1e-12)


def test_partial_trace_examples():
    a = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    b = np.diag([0.1, 0.5, 0.4])
    prod = DensityMatrix(np.kron(a, b), (2, 3))
    assert np.allclose(partial_trace(prod, 0), a)
    assert np.allclose(partial_trace(prod, 1), b)
    assert np.allclose(partial_trace(bell(), 0), np.eye(2) / 2)
    assert np.allclose(partial_trace(ghz_noise(0.0), 2), np.eye(2) / 2)


def test_partial_trace_bad_party():
    with pytest.raises(BadParty):
        partial_trace(bell(), 2)
    with pytest.raises(BadParty):
        partial_transpose(bell(), -1)
    with pytest.raises(IndexError):
        partial_trace_matrix(np.eye(4), (2, 2), 5)


def test_trace_power_examples():
    assert trace_power(np.eye(3), 4) == pytest.approx(3)
    assert trace_power(np.eye(4) / 4, 3) == pytest.approx(1 / 16)
    assert trace_power(partial_transpose(bell(), 1), 3) == pytest.approx(0.25)


def test_trace_power_non_real():
    # non-Hermitian input: the real part is returned without complaint
    assert trace_power(np.array([[1j, 0], [0, 0]]), 2) == pytest.approx(-1)
    # Hermitian within tolerance but with an imaginary trace beyond imag_tol
    with pytest.raises(NonRealTrace):
        trace_power(np.diag([1 + 5e-11j, 1]), 1, imag_tol=1e-12)


def test_trace_power_large_hermitian_is_real(rng):
    # rounding in Tr(H^5) scales with ||H||^5; a large Hermitian input must not be rejected
    h = 4 + random_hermitian(rng, 9) * 3
    assert trace_power(h, 5) == pytest.approx(np.sum(np.linalg.eigvalsh(h) ** 5), rel=1e-10)
