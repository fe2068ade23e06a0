"""Random-matrix ensemble samplers and exact exhaustive enumerators.

Supported entry laws (all symmetric with subgaussian tails):

* ``sign`` -- Rademacher +-1, real (beta = 1 only); Wigner variant has a
  zero diagonal.
* ``unit_circle`` -- uniform on the complex unit circle (beta = 2 only);
  Wigner variant has a zero diagonal.
* ``gaussian`` -- GOE/GUE-normalised Gaussian entries: off-diagonal variance
  1 with diagonal variance 2 for beta = 1; complex N(0,1/2) + i N(0,1/2)
  off-diagonal with real N(0,1) diagonal for beta = 2.  Rectangular variant
  uses N(0,1) (beta = 1) or complex with unit second absolute moment
  (beta = 2).
* ``rademacher_scale_mix`` -- a two-scale symmetric test law, +-c with
  probability 2/5 each and +-2c with probability 1/10 each, c = sqrt(5/8),
  so that E r^2 = 4/5 * 5/8 + 1/5 * 5/2 = 1 exactly in rationals.

Randomness comes from a counter-based Philox generator keyed by
``(seed, stream_id)``: replicas with distinct stream ids are independent and
reproducible regardless of scheduling, and a fixed spec always yields a
bit-identical sample.

The subgaussian-tail constant of the entry laws is a documentation-level
assumption (every supported law is bounded or Gaussian); it is never a
runtime parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ENTRY_LAWS = ("sign", "unit_circle", "gaussian", "rademacher_scale_mix")
_LAW_BETAS = {
    "sign": (1,),
    "unit_circle": (2,),
    "gaussian": (1, 2),
    "rademacher_scale_mix": (1,),
}

_MIX_SCALE = math.sqrt(5.0 / 8.0)

MAX_EXHAUSTIVE_WIGNER_N = 5
MAX_EXHAUSTIVE_RECT_CELLS = 12


@dataclass(frozen=True)
class EnsembleSpec:
    """Which random-matrix law to draw.

    shape is ("wigner", N) or ("rect", M, N) with M <= N.  seed and
    stream_id key the Philox counter-based generator; stream_id is the
    replica index in Monte Carlo runs.
    """

    beta: int
    shape: tuple
    entry_law: str
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.beta not in (1, 2):
            raise ValueError(f"beta must be 1 or 2, got {self.beta}")
        if self.entry_law not in ENTRY_LAWS:
            raise ValueError(f"unknown entry law {self.entry_law!r}")
        if self.beta not in _LAW_BETAS[self.entry_law]:
            raise ValueError(
                f"entry law {self.entry_law!r} incompatible with beta={self.beta}"
            )
        kind = self.shape[0]
        if kind == "wigner":
            if len(self.shape) != 2 or self.shape[1] < 1:
                raise ValueError("wigner shape is ('wigner', N)")
        elif kind == "rect":
            if len(self.shape) != 3:
                raise ValueError("rect shape is ('rect', M, N)")
            _, M, N = self.shape
            if not 1 <= M <= N:
                raise ValueError(f"rect requires 1 <= M <= N, got M={M}, N={N}")
        else:
            raise ValueError(f"unknown shape kind {kind!r}")

    def with_stream(self, stream_id: int) -> "EnsembleSpec":
        return EnsembleSpec(self.beta, self.shape, self.entry_law, self.seed, stream_id)

    def to_dict(self) -> dict:
        d = {"beta": self.beta, "entry_law": self.entry_law,
             "seed": self.seed, "stream_id": self.stream_id}
        if self.shape[0] == "wigner":
            d["shape"] = {"kind": "wigner", "N": self.shape[1]}
        else:
            d["shape"] = {"kind": "rect", "M": self.shape[1], "N": self.shape[2]}
        return d

    @staticmethod
    def from_dict(d: dict) -> "EnsembleSpec":
        sh = d["shape"]
        if sh["kind"] == "wigner":
            shape = ("wigner", int(sh["N"]))
        elif sh["kind"] == "rect":
            shape = ("rect", int(sh["M"]), int(sh["N"]))
        else:
            raise ValueError(f"unknown shape kind {sh['kind']!r}")
        return EnsembleSpec(
            beta=int(d["beta"]),
            shape=shape,
            entry_law=d["entry_law"],
            seed=int(d.get("seed", 0)),
            stream_id=int(d.get("stream_id", 0)),
        )


@dataclass
class HermitianSample:
    """A Hermitian draw: real symmetric for beta=1, complex Hermitian for beta=2."""

    N: int
    entries: np.ndarray
    spec: EnsembleSpec | None = field(default=None, repr=False)


@dataclass
class RectSample:
    """An M x N rectangular draw; the covariance product is B = X X*."""

    M: int
    N: int
    entries: np.ndarray
    spec: EnsembleSpec | None = field(default=None, repr=False)


def _generator(spec: EnsembleSpec) -> np.random.Generator:
    key = np.array([spec.seed, spec.stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_entries(law: str, beta: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """size i.i.d. off-diagonal entries of the given law (shared by samplers)."""
    if law == "sign":
        return 2.0 * rng.integers(0, 2, size=size).astype(np.float64) - 1.0
    if law == "unit_circle":
        theta = rng.uniform(0.0, 2.0 * math.pi, size=size)
        return np.exp(1j * theta)
    if law == "gaussian":
        if beta == 1:
            return rng.standard_normal(size)
        re = rng.standard_normal(size)
        im = rng.standard_normal(size)
        return math.sqrt(0.5) * (re + 1j * im)
    if law == "rademacher_scale_mix":
        u = rng.integers(0, 20, size=size)
        vals = np.where(u < 8, _MIX_SCALE, np.where(u < 16, -_MIX_SCALE,
                        np.where(u < 18, 2.0 * _MIX_SCALE, -2.0 * _MIX_SCALE)))
        return vals
    raise ValueError(f"unknown entry law {law!r}")


def sample_wigner(spec: EnsembleSpec) -> HermitianSample:
    """Draw one Hermitian Wigner matrix; deterministic given (seed, stream_id)."""
    if spec.shape[0] != "wigner":
        raise ValueError("sample_wigner requires a wigner-shaped spec")
    N = spec.shape[1]
    rng = _generator(spec)
    iu = np.triu_indices(N, k=1)
    off = draw_entries(spec.entry_law, spec.beta, rng, len(iu[0]))

    if spec.beta == 1:
        A = np.zeros((N, N))
    else:
        A = np.zeros((N, N), dtype=np.complex128)
    A[iu] = off
    A = A + A.conj().T

    if spec.entry_law == "gaussian":
        if spec.beta == 1:
            A[np.diag_indices(N)] = math.sqrt(2.0) * rng.standard_normal(N)
        else:
            A[np.diag_indices(N)] = rng.standard_normal(N)
    # sign / unit_circle / rademacher_scale_mix keep a zero diagonal
    return HermitianSample(N=N, entries=A, spec=spec)


def sample_rect(spec: EnsembleSpec) -> RectSample:
    """Draw one M x N rectangular matrix; deterministic given (seed, stream_id)."""
    if spec.shape[0] != "rect":
        raise ValueError("sample_rect requires a rect-shaped spec")
    _, M, N = spec.shape
    rng = _generator(spec)
    flat = draw_entries(spec.entry_law, spec.beta, rng, M * N)
    return RectSample(M=M, N=N, entries=flat.reshape(M, N), spec=spec)


def exhaustive_sign_wigner(N: int):
    """All 2^(N(N-1)/2) symmetric +-1 sign matrices with zero diagonal, N <= 5."""
    if N > MAX_EXHAUSTIVE_WIGNER_N:
        raise ValueError(f"exhaustive enumeration capped at N={MAX_EXHAUSTIVE_WIGNER_N}")
    iu = np.triu_indices(N, k=1)
    nfree = len(iu[0])
    for mask in range(1 << nfree):
        A = np.zeros((N, N))
        vals = np.array([1.0 if (mask >> b) & 1 else -1.0 for b in range(nfree)])
        A[iu] = vals
        A = A + A.T
        yield HermitianSample(N=N, entries=A)


def exhaustive_sign_rect(M: int, N: int):
    """All 2^(M N) rectangular +-1 sign matrices, M*N <= 12."""
    if M * N > MAX_EXHAUSTIVE_RECT_CELLS:
        raise ValueError(f"exhaustive enumeration capped at M*N={MAX_EXHAUSTIVE_RECT_CELLS}")
    cells = M * N
    for mask in range(1 << cells):
        vals = np.array([1.0 if (mask >> b) & 1 else -1.0 for b in range(cells)])
        yield RectSample(M=M, N=N, entries=vals.reshape(M, N))
