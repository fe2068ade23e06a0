import math

import numpy as np
import pytest

from edgelab.ensembles import EnsembleSpec, HermitianSample, RectSample, sample_wigner
from edgelab.spectra import (
    SpectrumSample,
    eigvals_hermitian,
    eigvals_via_real_embedding,
    rescale,
    rescale_values,
    singvals_rect,
)


def test_two_by_two():
    s = eigvals_hermitian(HermitianSample(N=2, entries=np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert np.allclose(s.eigenvalues, [-1.0, 1.0])


def test_trace_preservation_and_residual():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((30, 30))
    A = A + A.T
    s = eigvals_hermitian(HermitianSample(N=30, entries=A))
    assert np.sum(s.eigenvalues) == pytest.approx(np.trace(A), rel=1e-9)
    # backward error of sampled eigenpairs
    w, v = np.linalg.eigh(A)
    norm = np.linalg.norm(A, 2)
    for i in (0, 15, 29):
        assert np.linalg.norm(A @ v[:, i] - w[i] * v[:, i]) <= 1e-8 * norm


def _charpoly_roots(A):
    # Faddeev-LeVerrier characteristic polynomial, roots via the companion
    # matrix: an eigenvalue route independent of the Hermitian solver
    n = A.shape[0]
    eye = np.eye(n, dtype=A.dtype)
    coeffs = [1.0]
    M = eye.copy()
    for k in range(1, n + 1):
        ck = float((-np.trace(A @ M) / k).real)
        coeffs.append(ck)
        M = A @ M + ck * eye
    return np.sort(np.roots(np.array(coeffs)).real)


def test_complex_embedding_matches_direct_and_charpoly():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    A = A + A.conj().T
    direct = eigvals_hermitian(HermitianSample(N=6, entries=A)).eigenvalues
    embedded = eigvals_via_real_embedding(A)
    assert np.allclose(direct, embedded, atol=1e-9)
    oracle = _charpoly_roots(A)
    assert np.allclose(direct, oracle, atol=1e-6)


def test_singvals_identity_padded():
    X = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    s = singvals_rect(RectSample(M=2, N=3, entries=X))
    assert np.allclose(s.eigenvalues, [1.0, 1.0])


def test_singvals_frobenius_and_dual_route():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((5, 8))
    s = singvals_rect(RectSample(M=5, N=8, entries=X))
    assert np.sum(s.eigenvalues) == pytest.approx(np.linalg.norm(X, "fro") ** 2,
                                                  rel=1e-10)
    B = X @ X.T
    via_eig = eigvals_hermitian(HermitianSample(N=5, entries=B)).eigenvalues
    assert np.allclose(s.eigenvalues, via_eig, rtol=1e-7)


def test_rescale_centering_points():
    N = 64
    lam = np.linspace(0.5, 2.0 * math.sqrt(N), N)
    sample = SpectrumSample(eigenvalues=lam, M=N, N=N)
    y = rescale(sample, "wigner_max")[0].y
    assert y == pytest.approx(0.0, abs=1e-9)

    M, Nc = 9, 25
    lam = np.linspace((math.sqrt(M) - math.sqrt(Nc)) ** 2,
                      (math.sqrt(M) + math.sqrt(Nc)) ** 2, M)
    cov = SpectrumSample(eigenvalues=lam, M=M, N=Nc)
    assert rescale(cov, "cov_smallest")[0].y == pytest.approx(0.0, abs=1e-9)
    assert rescale(cov, "cov_largest")[0].y == pytest.approx(0.0, abs=1e-9)


def test_cov_smallest_negative_denominator():
    # lambda_1 slightly above the left edge maps to negative y
    M, N = 9, 25
    left = (math.sqrt(M) - math.sqrt(N)) ** 2
    lam = np.array([left + 0.5] + [left + 1 + k for k in range(M - 1)], dtype=float)
    cov = SpectrumSample(eigenvalues=np.sort(lam), M=M, N=N)
    assert rescale(cov, "cov_smallest")[0].y < 0


def test_rescale_monotonicity_directions():
    lam = np.sort(np.random.default_rng(6).normal(size=16))
    sq = SpectrumSample(eigenvalues=lam, M=16, N=16)
    pp = rescale_values(sq, "wigner_point_process")
    assert np.all(np.diff(pp) <= 1e-12)       # index 1 nearest the max edge

    M, N = 8, 20
    lam = np.sort(np.abs(np.random.default_rng(7).normal(size=M))) + (math.sqrt(M) - math.sqrt(N)) ** 2
    cov = SpectrumSample(eigenvalues=lam, M=M, N=N)
    ys = rescale_values(cov, "cov_point_process")
    assert np.all(np.diff(ys) <= 1e-12)       # order-reversing map


def test_point_process_largest_ordering():
    # y_1 of the largest-edge family corresponds to lambda_{M-i+1}
    M, N = 6, 15
    rng = np.random.default_rng(8)
    lam = np.sort(rng.uniform(1.0, 40.0, M))
    cov = SpectrumSample(eigenvalues=lam, M=M, N=N)
    top = rescale(cov, "cov_largest")[0].y
    den = (math.sqrt(M) + math.sqrt(N)) * (M ** -0.5 + N ** -0.5) ** (1 / 3)
    expected = (lam[-1] - (math.sqrt(M) + math.sqrt(N)) ** 2) / den
    assert top == pytest.approx(expected, rel=1e-12)


def test_rescale_rejects_square_cov():
    sq = SpectrumSample(eigenvalues=np.array([1.0, 2.0]), M=2, N=2)
    with pytest.raises(ValueError):
        rescale(sq, "cov_smallest")


def test_wigner_min_role():
    spec = EnsembleSpec(1, ("wigner", 50), "sign", seed=3)
    s = eigvals_hermitian(sample_wigner(spec))
    y = rescale(s, "wigner_min")[0].y
    assert y == pytest.approx(-(50 ** (1 / 6) * s.eigenvalues[0] + 2 * 50 ** (2 / 3)))
