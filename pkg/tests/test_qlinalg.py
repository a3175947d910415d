"""Partial transpose, Jacobi eigensolver, NPT and purity."""

import numpy as np
import pytest

import mixent as mx
from mixent.qlinalg import (
    DegenerateStateError,
    HermiticityError,
    InvalidShapeError,
    NumericInputError,
)


def bell_projector():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    return mx.BipartiteMatrix(2, 2, np.outer(psi, psi.conj()))


def random_hermitian(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_state(rng, n):
    """Random full-rank density matrix."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def charpoly_roots(a):
    """Eigenvalues via Faddeev-LeVerrier coefficients and companion roots.

    Deliberately avoids any Hermitian eigensolver: the coefficients come from
    traces of matrix powers, the roots from numpy.roots.
    """
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.sort(np.roots(coeffs).real)


class TestPartialTranspose:
    def test_identity_is_fixed_point(self):
        m = mx.BipartiteMatrix(2, 2, np.eye(4))
        out = mx.partial_transpose(m, "B")
        assert np.array_equal(out.entries, m.entries)

    def test_bell_min_eigenvalue(self):
        pt = mx.partial_transpose(bell_projector(), "B")
        assert abs(mx.min_eigenvalue(pt) + 0.5) < 1e-12

    def test_involution_is_bit_exact(self):
        rng = np.random.default_rng(7)
        for da, db in ((2, 2), (2, 3), (3, 2)):
            a = rng.normal(size=(da * db, da * db)) + 1j * rng.normal(size=(da * db, da * db))
            m = mx.BipartiteMatrix(da, db, a)
            for which in ("A", "B"):
                twice = mx.partial_transpose(mx.partial_transpose(m, which), which)
                assert np.array_equal(twice.entries, m.entries)

    def test_preserves_trace_and_hermiticity(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            m = mx.BipartiteMatrix(2, 2, random_hermitian(rng))
            pt = mx.partial_transpose(m, "B")
            assert pt.trace() == m.trace()
            assert pt.hermiticity_defect() == 0.0

    def test_transpose_on_a_is_global_transpose_of_b(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        m = mx.BipartiteMatrix(2, 3, a)
        via_a = mx.partial_transpose(m, "A").entries
        via_b = mx.partial_transpose(m, "B").entries.T
        assert np.array_equal(via_a, via_b)

    def test_bad_selector(self):
        with pytest.raises(ValueError):
            mx.partial_transpose(bell_projector(), "C")


class TestEigensolver:
    def test_diagonal(self):
        m = mx.BipartiteMatrix(2, 2, np.diag([0.1, 0.2, 0.3, 0.4]))
        assert mx.min_eigenvalue(m) == pytest.approx(0.1, abs=1e-14)

    def test_against_charpoly_oracle(self):
        rng = np.random.default_rng(10)
        for _ in range(300):
            h = random_hermitian(rng)
            w, _ = mx.hermitian_eigensystem(h)
            assert np.max(np.abs(np.sort(w) - charpoly_roots(h))) < 1e-10

    def test_eigenpair_residual(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            h = random_hermitian(rng)
            m = mx.BipartiteMatrix(2, 2, h)
            val, vec = mx.min_eigenpair(m)
            resid = np.linalg.norm(h @ vec - val * vec)
            assert resid <= 1e-10 * np.linalg.norm(h)

    def test_eigenvalue_sum_equals_trace(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            h = random_hermitian(rng)
            w, _ = mx.hermitian_eigensystem(h)
            assert abs(w.sum() - np.trace(h).real) < 1e-10

    def test_unitary_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            h = random_hermitian(rng)
            q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
            w1, _ = mx.hermitian_eigensystem(h)
            w2, _ = mx.hermitian_eigensystem(q @ h @ q.conj().T)
            assert np.max(np.abs(np.sort(w1) - np.sort(w2))) < 1e-9

    def test_larger_matrices(self):
        rng = np.random.default_rng(14)
        h = random_hermitian(rng, n=24)
        w, v = mx.hermitian_eigensystem(h)
        assert np.max(np.abs(np.sort(w) - np.linalg.eigvalsh(h))) < 1e-10
        assert np.max(np.abs(v.conj().T @ v - np.eye(24))) < 1e-12


class TestNpt:
    def test_bell(self):
        assert abs(mx.npt(bell_projector()) - 1.0) < 1e-12

    def test_product_states_have_zero_npt(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            rho = np.kron(random_state(rng, 2), random_state(rng, 2))
            assert mx.npt(mx.BipartiteMatrix(2, 2, rho)) <= 1e-12

    def test_separable_mixtures_have_zero_npt(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            weights = rng.random(5)
            weights /= weights.sum()
            rho = sum(
                w * np.kron(random_state(rng, 2), random_state(rng, 2)) for w in weights
            )
            assert mx.npt(mx.BipartiteMatrix(2, 2, rho)) <= 1e-12

    def test_werner_state(self):
        # PT minimum eigenvalue of p|Phi+><Phi+| + (1-p) I/4 is (1-3p)/4;
        # the expected NPT is recomputed here with an independent eigensolver.
        p = 0.5
        rho = p * bell_projector().entries + (1 - p) * np.eye(4) / 4
        m = mx.BipartiteMatrix(2, 2, rho)
        pt = mx.partial_transpose(m, "B").entries
        expected = -2.0 * min(0.0, np.linalg.eigvalsh(pt).min())
        assert expected == pytest.approx(0.25, abs=1e-12)
        assert mx.npt(m) == pytest.approx(0.25, abs=1e-10)

    def test_npt_nonnegative_and_scale_free(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            rho = random_state(rng, 4)
            m = mx.BipartiteMatrix(2, 2, rho)
            value = mx.npt(m)
            assert value >= 0.0
            assert mx.npt(m.scaled(0.37)) == pytest.approx(value, abs=1e-12)

    def test_zero_trace_rejected(self):
        with pytest.raises(DegenerateStateError):
            mx.npt(mx.BipartiteMatrix(2, 2, np.zeros((4, 4))))

    def test_werner_family_detection_boundary(self):
        # for two qubits NPT > 0 iff entangled; the Werner family crosses the
        # boundary at p = 1/3
        for p, entangled in ((0.2, False), (1.0 / 3.0 + 0.01, True), (0.8, True)):
            rho = p * bell_projector().entries + (1 - p) * np.eye(4) / 4
            value = mx.npt(mx.BipartiteMatrix(2, 2, rho))
            assert (value > 1e-12) == entangled


class TestPurity:
    def test_pure_projector(self):
        assert mx.purity(bell_projector()) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        m = mx.BipartiteMatrix(2, 2, np.eye(4) / 4)
        assert mx.purity(m) == pytest.approx(0.25, abs=1e-12)

    def test_thermal_qubit(self):
        p = 0.9
        m = mx.BipartiteMatrix(2, 1, np.diag([p, 1 - p]))
        assert mx.purity(m) == pytest.approx(0.82, abs=1e-12)
        assert mx.purity(m) == pytest.approx(2 * (p - 0.5) ** 2 + 0.5, abs=1e-12)

    def test_zero_trace_rejected(self):
        with pytest.raises(DegenerateStateError):
            mx.purity(mx.BipartiteMatrix(2, 1, np.zeros((2, 2))))


class TestValidation:
    def test_shape_mismatch(self):
        with pytest.raises(InvalidShapeError):
            mx.BipartiteMatrix(2, 2, np.eye(3))

    def test_nonfinite_entries(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 0] = np.nan
        with pytest.raises(NumericInputError):
            mx.min_eigenvalue(mx.BipartiteMatrix(2, 2, bad))

    def test_hermiticity_rejection(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 1] = 1e-6
        with pytest.raises(HermiticityError):
            mx.min_eigenvalue(mx.BipartiteMatrix(2, 2, bad))

    def test_small_defect_symmetrized(self):
        noisy = np.eye(4, dtype=complex)
        noisy[0, 1] = 1e-13
        assert mx.min_eigenvalue(mx.BipartiteMatrix(2, 2, noisy)) == pytest.approx(1.0)

    def test_entries_immutable(self):
        m = mx.BipartiteMatrix(2, 2, np.eye(4))
        with pytest.raises(ValueError):
            m.entries[0, 0] = 2.0
