"""Spectrum extraction and edge rescalings.

Eigenvalues of Hermitian samples come from the dense symmetric solver;
covariance spectra are computed as squared singular values of the
rectangular factor rather than as eigenvalues of X X*, which preserves
relative accuracy of the smallest eigenvalue (forming the product squares
the condition number exactly where the soft edge lives).

The rescaling maps are the affine changes of variable under which extreme
eigenvalues converge to the Tracy-Widom laws:

* wigner_max:    y = N^(1/6) lambda_N - 2 N^(2/3)
* wigner_min:    y = -(N^(1/6) lambda_1 + 2 N^(2/3))
* cov_largest:   y = (lambda_M - (sqrt(M)+sqrt(N))^2)
                     / ((sqrt(M)+sqrt(N)) (M^(-1/2)+N^(-1/2))^(1/3))
* cov_smallest:  y = (lambda_1 - (sqrt(M)-sqrt(N))^2)
                     / ((sqrt(M)-sqrt(N)) (M^(-1/2)-N^(-1/2))^(1/3))

For M < N the cov_smallest denominator is negative (the first factor is
negative, the second positive); the sign is kept exactly as written, so
eigenvalues slightly above the left edge map to negative y.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleSpec, HermitianSample, RectSample

RESCALE_ROLES = (
    "cov_smallest",
    "cov_largest",
    "wigner_min",
    "wigner_max",
    "cov_point_process",
    "wigner_point_process",
)


@dataclass
class SpectrumSample:
    """Ascending eigenvalues plus the shape they came from."""

    eigenvalues: np.ndarray
    M: int
    N: int
    spec: EnsembleSpec | None = field(default=None, repr=False)


@dataclass(frozen=True)
class RescaledPoint:
    y: float
    role: str
    index: int


def eigvals_hermitian(sample: HermitianSample) -> SpectrumSample:
    """All eigenvalues of a Hermitian sample, ascending."""
    A = np.asarray(sample.entries)
    w = np.linalg.eigvalsh(A)
    return SpectrumSample(eigenvalues=w, M=sample.N, N=sample.N, spec=sample.spec)


def eigvals_via_real_embedding(A: np.ndarray) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix through the 2N x 2N real
    symmetric embedding [[X, -Y], [Y, X]] with A = X + iY.

    Every eigenvalue appears twice; the doubled spectrum is deduplicated by
    pairing consecutive sorted values.  Kept as an independently testable
    alternate route for the complex solver.
    """
    A = np.asarray(A, dtype=np.complex128)
    X, Y = A.real, A.imag
    big = np.block([[X, -Y], [Y, X]])
    w = np.linalg.eigvalsh(big)
    return 0.5 * (w[0::2] + w[1::2])


def singvals_rect(sample: RectSample) -> SpectrumSample:
    """Eigenvalues of B = X X* as squared singular values of X, ascending."""
    s = np.linalg.svd(np.asarray(sample.entries), compute_uv=False)
    lam = np.sort(s * s)
    return SpectrumSample(eigenvalues=lam, M=sample.M, N=sample.N, spec=sample.spec)


def _cov_denominators(M: int, N: int):
    rm, rn = np.sqrt(M), np.sqrt(N)
    den_max = (rm + rn) * (M ** (-0.5) + N ** (-0.5)) ** (1.0 / 3.0)
    if M == N:
        den_min = None
    else:
        # (sqrt(M) - sqrt(N)) < 0 while the cube-rooted factor is > 0
        den_min = (rm - rn) * (M ** (-0.5) - N ** (-0.5)) ** (1.0 / 3.0)
    return den_min, den_max


def rescale(sample: SpectrumSample, role: str) -> list[RescaledPoint]:
    """Apply the edge rescaling for the given role.

    Scalar roles return a single point; point-process roles return the whole
    rescaled family ordered so that index 1 is the atom nearest the edge.
    """
    if role not in RESCALE_ROLES:
        raise ValueError(f"unknown rescale role {role!r}")
    lam = sample.eigenvalues
    M, N = sample.M, sample.N

    if role in ("wigner_min", "wigner_max", "wigner_point_process"):
        if M != N:
            raise ValueError(f"{role} requires a square (Wigner) spectrum")
        scale = N ** (1.0 / 6.0)
        center = 2.0 * N ** (2.0 / 3.0)
        if role == "wigner_max":
            return [RescaledPoint(float(scale * lam[-1] - center), role, 1)]
        if role == "wigner_min":
            return [RescaledPoint(float(-(scale * lam[0] + center)), role, 1)]
        return [
            RescaledPoint(float(scale * lam[N - i] - center), role, i)
            for i in range(1, N + 1)
        ]

    den_min, den_max = _cov_denominators(M, N)
    left_center = (np.sqrt(M) - np.sqrt(N)) ** 2
    right_center = (np.sqrt(M) + np.sqrt(N)) ** 2

    if role == "cov_largest":
        return [RescaledPoint(float((lam[-1] - right_center) / den_max), role, 1)]
    if role == "cov_smallest":
        if den_min is None:
            raise ValueError("cov_smallest requires M < N (denominator vanishes at M = N)")
        return [RescaledPoint(float((lam[0] - left_center) / den_min), role, 1)]
    # cov_point_process: the smallest-eigenvalue family, index 1 = lambda_1
    if den_min is None:
        raise ValueError("cov_point_process requires M < N")
    return [
        RescaledPoint(float((lam[i - 1] - left_center) / den_min), role, i)
        for i in range(1, M + 1)
    ]


def rescale_values(sample: SpectrumSample, role: str) -> np.ndarray:
    """The y values of rescale() as a plain array."""
    return np.array([p.y for p in rescale(sample, role)])
