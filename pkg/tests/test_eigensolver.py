import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cocoonlab.eigensolver import (
    canonical_order,
    charpoly_coefficients,
    charpoly_roots_oracle,
    complex_eigenvalues_via_real_embedding,
    conjugate_pairing,
    eigenpair,
    eigenvalues,
    match_multisets,
)
from cocoonlab.errors import PairingError
from cocoonlab.operator import OperatorSpec, build_2d_hofstadter_matrix, build_harper_matrix


def harper(L, q, p, g=0.0, boundary="periodic"):
    return build_harper_matrix(OperatorSpec(L, q, p, g, boundary))


def circulant_values(L, p, g):
    """Analytic spectrum of the q=0 chain (circulant diagonalization)."""
    j = np.arange(L)
    theta = 2 * np.pi * j / L
    return (-2 * math.cosh(g) * np.cos(theta)
            - 2 * math.cos(2 * np.pi * p / L)
            - 2j * math.sinh(g) * np.sin(theta))


small_real_matrices = arrays(
    np.float64, st.tuples(st.integers(2, 6)).map(lambda t: (t[0], t[0])),
    elements=st.floats(-3, 3, allow_nan=False))


class TestCanonicalOrderAndPairing:
    def test_orders_by_re_then_im(self):
        vals = canonical_order([1 + 1j, -1 + 0j, 1 - 1j, 0 + 0j])
        assert list(vals) == [-1 + 0j, 0 + 0j, 1 - 1j, 1 + 1j]

    def test_pairing_requires_partner(self):
        with pytest.raises(PairingError):
            conjugate_pairing(np.array([1j, 2j]), tol=1e-12)

    def test_pairing_matches_conjugates(self):
        vals = canonical_order([1 + 1j, 1 - 1j, 2 + 0j])
        assert conjugate_pairing(vals, 1e-12) == ((0, 1),)


class TestEigenvalues:
    def test_ring_three_sites(self):
        s = eigenvalues(harper(3, 0, 0))
        assert np.allclose(s.values, [-4, -1, -1], atol=1e-12)
        assert s.pairing == ()
        assert len(s) == 3

    def test_asymmetric_ring_circulant_values(self):
        s = eigenvalues(harper(4, 0, 0, g=0.5))
        expected = canonical_order(circulant_values(4, 0, 0.5))
        assert np.allclose(s.values, expected, atol=1e-12)
        # the conjugate pair at Re = -2 is tracked
        assert len(s.pairing) == 1

    def test_matches_oracle_on_nonhermitian_point(self):
        A = harper(6, 1, 1, g=0.2)
        dist, _ = match_multisets(eigenvalues(A).values, charpoly_roots_oracle(A).values)
        assert dist < 1e-8

    def test_residual_is_small(self):
        s = eigenvalues(harper(12, 5, 3, g=0.4))
        assert s.max_residual < 1e-12 * max(s.matrix_norm, 1.0) * 100

    def test_rejects_complex_input(self):
        with pytest.raises(TypeError):
            eigenvalues(np.array([[1j]]))

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            eigenvalues(np.eye(2), tol=1e-3)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eigenvalues(np.array([[np.inf, 0], [0, 1.0]]))

    @given(small_real_matrices)
    @settings(max_examples=80, deadline=None)
    def test_conjugation_closure_exact(self, A):
        s = eigenvalues(A)
        assert np.array_equal(canonical_order(s.values),
                              canonical_order(np.conj(s.values)))

    @given(small_real_matrices)
    @settings(max_examples=60, deadline=None)
    def test_gershgorin_bound(self, A):
        s = eigenvalues(A)
        radii = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
        for v in s.values:
            assert any(abs(v - A[i, i]) <= radii[i] + 1e-9 for i in range(len(A)))

    @given(small_real_matrices)
    @settings(max_examples=60, deadline=None)
    def test_trace_consistency(self, A):
        s = eigenvalues(A)
        n = len(A)
        scale = max(1.0, n * s.matrix_norm)
        assert abs(np.sum(s.values) - np.trace(A)) <= 1e-9 * scale

    def test_determinant_consistency(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            A = rng.normal(size=(n, n))
            s = eigenvalues(A)
            det = np.linalg.det(A)
            prod = np.prod(s.values)
            assert abs(prod - det) <= 1e-7 * max(abs(det), 1e-30) + 1e-12

    def test_similarity_invariance(self):
        rng = np.random.default_rng(3)
        A = harper(10, 3, 2, g=0.5)
        d = rng.uniform(0.5, 2.0, size=10)
        P = np.diag(d)
        B = P @ A @ np.diag(1.0 / d)
        dist, _ = match_multisets(eigenvalues(A).values, eigenvalues(B).values)
        assert dist < 1e-8

    def test_harper_gershgorin_window(self):
        # |Re E| <= 2 cosh g + 2 for the chain; [-4, 4] at g = 0
        s = eigenvalues(harper(20, 7, 4, g=0.0))
        assert np.all(np.abs(s.values.real) <= 4 + 1e-9)
        s = eigenvalues(harper(20, 7, 4, g=0.6))
        assert np.all(np.abs(s.values.real) <= 2 * math.cosh(0.6) + 2 + 1e-9)

    def test_open_chain_real_at_extreme_conditioning(self):
        # e^{|g| L} ~ 1e20 here; the tridiagonal similarity keeps the spectrum real
        A = harper(49, 45, 32, g=-0.9706, boundary="open")
        s = eigenvalues(A)
        assert np.max(np.abs(s.values.imag)) == 0.0
        s0 = eigenvalues(harper(49, 45, 32, g=0.0, boundary="open"))
        dist, _ = match_multisets(s.values, s0.values)
        assert dist < 1e-8


class TestEigenpair:
    def test_uniform_ground_state(self):
        A = harper(4, 0, 0)
        pair = eigenpair(A, -4.0)
        assert pair.residual < 1e-12 * np.linalg.norm(A)
        assert np.allclose(pair.vector, 0.5 * np.ones(4), atol=1e-10)
        assert pair.value == pytest.approx(-4.0, abs=1e-10)

    def test_degenerate_subspace_membership(self):
        A = harper(4, 0, 0)  # eigenvalues -4, -2, -2, 0... E = -2 twice
        pair = eigenpair(A, -2.0)
        assert pair.residual <= 1e-10 * np.linalg.norm(A)
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)

    def test_complex_eigenpair_residual(self):
        A = harper(6, 1, 0, g=0.4)
        s = eigenvalues(A)
        target = next(v for v in s.values if v.imag > 1e-6)
        pair = eigenpair(A, target)
        assert pair.residual <= 1e-10 * np.linalg.norm(A)
        assert abs(pair.value - target) < 1e-8

    def test_phase_convention(self):
        A = harper(6, 1, 0, g=0.4)
        target = eigenvalues(A).values[0]
        v = eigenpair(A, target).vector
        k = int(np.argmax(np.abs(v)))
        assert v[k].imag == pytest.approx(0.0, abs=1e-12)
        assert v[k].real > 0


class TestRealEmbedding:
    def test_single_imaginary_entry(self):
        s = complex_eigenvalues_via_real_embedding(np.array([[1j]]))
        assert np.allclose(s.values, [-1j, 1j], atol=1e-14)

    def test_diagonal(self):
        s = complex_eigenvalues_via_real_embedding(np.diag([1 + 2j, 3 + 0j]))
        assert np.allclose(s.values, [1 - 2j, 1 + 2j, 3, 3], atol=1e-12)

    def test_2d_operator_separates_into_momentum_sectors(self):
        L, q, g = 4, 1, 0.25
        H2 = build_2d_hofstadter_matrix(L, q, g)
        emb = complex_eigenvalues_via_real_embedding(H2)
        union = np.concatenate([
            eigenvalues(harper(L, q, p, g)).values for p in range(L)])
        both = np.concatenate([union, np.conj(union)])
        dist, _ = match_multisets(emb.values, both)
        assert dist < 1e-8

    def test_rejects_oversize(self):
        with pytest.raises(ValueError):
            complex_eigenvalues_via_real_embedding(np.eye(145, dtype=complex))


class TestCharpolyOracle:
    def test_one_by_one(self):
        s = charpoly_roots_oracle(np.array([[2.0]]))
        assert np.allclose(s.values, [2.0])

    def test_rotation_generator(self):
        s = charpoly_roots_oracle(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert np.allclose(s.values, [-1j, 1j], atol=1e-12)

    def test_ring(self):
        s = charpoly_roots_oracle(harper(3, 0, 0))
        assert np.allclose(s.values, [-4, -1, -1], atol=1e-9)

    def test_coefficients_match_numpy(self):
        rng = np.random.default_rng(5)
        for n in (2, 4, 7):
            A = rng.normal(size=(n, n))
            c = charpoly_coefficients(A)
            ref = np.poly(A)[::-1]  # numpy returns highest degree first
            assert np.allclose(c, ref, atol=1e-9 * max(1, np.max(np.abs(ref))))

    def test_double_degeneracy_recovered(self):
        # q=0 ring at L=4 has an exactly double eigenvalue -2 cos(k) pair
        A = harper(4, 0, 0)
        dist, _ = match_multisets(charpoly_roots_oracle(A).values,
                                  eigenvalues(A).values)
        assert dist < 1e-9

    def test_rejects_large_dimension(self):
        with pytest.raises(ValueError):
            charpoly_roots_oracle(np.eye(11))

    def test_agreement_random_specs(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            L = int(rng.integers(3, 9))
            spec = OperatorSpec(L, int(rng.integers(0, L)), int(rng.integers(0, L)),
                                float(rng.uniform(-1, 1)),
                                "periodic" if rng.random() < 0.7 else "open")
            A = build_harper_matrix(spec)
            dist, _ = match_multisets(eigenvalues(A).values,
                                      charpoly_roots_oracle(A).values)
            assert dist < 1e-8, f"oracle disagreement at {spec}"


class TestMatchMultisets:
    def test_empty(self):
        assert match_multisets([], [])[0] == 0.0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            match_multisets([1.0], [1.0, 2.0])

    def test_reports_worst_pair(self):
        dist, worst = match_multisets([0.0, 1.0], [0.0, 1.5])
        assert dist == pytest.approx(0.5)
        assert worst == (1.0, 1.5)
