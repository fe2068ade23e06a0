"""Chebyshev-type polynomial families and their orthogonality checks.

Four scalar families are provided:

* ``U_n`` -- Chebyshev polynomials of the second kind, by the three-term
  recurrence ``U_n(y) = 2y U_{n-1}(y) - U_{n-2}(y)``.
* ``P_n`` -- the dimension-dependent family with ``P_2(x) = x^2 - (N-1)``
  and ``P_n = x P_{n-1} - (N-2) P_{n-2}``.
* ``Q_n`` -- the rectangular (covariance) family with ``Q_1(x) = x - N`` and
  ``Q_n = (x - (M+N-2)) Q_{n-1} - (M-1)(N-1) Q_{n-2}``.
* ``V_{n,s} = U_n + sqrt(s) U_{n-1}`` -- orthogonal for the Marchenko-Pastur
  weight with aspect parameter ``s``.

The same recurrences applied to a full matrix argument give traces of
polynomials of Hermitian matrices without an eigendecomposition.  Exact
rational expansions of monomials in the U basis are provided for the
moment-reduction step, and adaptive Gauss-Legendre quadrature verifies the
orthogonality relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_DEGREE = 10_000
# forward recurrence switches to compensated (double-double) arithmetic here
_DD_THRESHOLD = 1_000
_QUAD_MAX_DEGREE = 64


# ---------------------------------------------------------------------------
# double-double helpers (Dekker split; no math.fma on 3.10)

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    v = s - a
    return s, (a - (s - v)) + (b - v)


def _two_prod(a, b):
    p = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _dd_add(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    e += xl + yl
    hi, lo = _two_sum(s, e)
    return hi, lo


def _dd_mul_scalar(xh, xl, c):
    p, e = _two_prod(xh, c)
    e += xl * c
    hi, lo = _two_sum(p, e)
    return hi, lo


def cheb_u(n: int, y: float) -> float:
    """Chebyshev polynomial of the second kind U_n(y), any real y.

    Uses the forward three-term recurrence; degrees above 1000 run in
    compensated double-double arithmetic to keep the error growth of the
    long recurrence below the stated tolerances.  Degrees are capped at
    10^4.
    """
    if n < 0:
        # U_{-1} = U_{-2} = 0 by convention, used by the P/V identities
        if n in (-1, -2):
            return 0.0
        raise ValueError(f"degree must be >= -2, got {n}")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds cap {MAX_DEGREE}")
    y = float(y)
    if n == 0:
        return 1.0
    if n == 1:
        return 2.0 * y
    if n <= _DD_THRESHOLD:
        prev, cur = 1.0, 2.0 * y
        for _ in range(2, n + 1):
            prev, cur = cur, 2.0 * y * cur - prev
        return cur
    ph, pl = 1.0, 0.0
    ch, cl = _two_prod(2.0, y)
    for _ in range(2, n + 1):
        th, tl = _dd_mul_scalar(ch, cl, 2.0 * y)
        nh, nl = _dd_add(th, tl, -ph, -pl)
        ph, pl, ch, cl = ch, cl, nh, nl
    return ch + cl


def poly_p(n: int, N: int, x: float) -> float:
    """P_n(x) for ambient dimension N >= 3, by the recurrence.

    P_0 = 1, P_1 = x, P_2 = x^2 - (N-1), then
    P_n = x P_{n-1} - (N-2) P_{n-2}.
    """
    if N < 3:
        raise ValueError(f"P family requires N >= 3, got N={N}")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    x = float(x)
    if n == 0:
        return 1.0
    if n == 1:
        return x
    prev, cur = x, x * x - (N - 1)
    for _ in range(3, n + 1):
        prev, cur = cur, x * cur - (N - 2) * prev
    return cur


def poly_q(n: int, M: int, N: int, x: float) -> float:
    """Q_n(x) for an M x N covariance product, 1 <= M <= N.

    Q_0 = 1, Q_1 = x - N, then
    Q_n = (x - (M+N-2)) Q_{n-1} - (M-1)(N-1) Q_{n-2}.
    """
    if not 1 <= M <= N:
        raise ValueError(f"Q family requires 1 <= M <= N, got M={M}, N={N}")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    x = float(x)
    if n == 0:
        return 1.0
    shift = M + N - 2
    scale = (M - 1) * (N - 1)
    prev, cur = 1.0, x - N
    for _ in range(2, n + 1):
        prev, cur = cur, (x - shift) * cur - scale * prev
    return cur


def cheb_v(n: int, s: float, y: float) -> float:
    """V_{n,s}(y) = U_n(y) + sqrt(s) U_{n-1}(y), aspect parameter s in [0,1]."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"aspect parameter must lie in [0,1], got {s}")
    return cheb_u(n, y) + math.sqrt(s) * cheb_u(n - 1, y)


@dataclass(frozen=True)
class PolyFamilyParams:
    """Which polynomial family to evaluate, with its shape parameters.

    family "U" needs only the degree; "P" needs the ambient dimension N >= 3;
    "Q" needs row/column dimensions 1 <= M <= N; "V" needs the aspect
    parameter s in [0,1].
    """

    family: str
    n: int
    N: int | None = None
    M: int | None = None
    s: float | None = None

    def __post_init__(self):
        if self.family not in ("U", "P", "Q", "V"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 0:
            raise ValueError("degree must be nonnegative")
        if self.family == "P":
            if self.N is None or self.N < 3:
                raise ValueError("family P requires N >= 3")
        if self.family == "Q":
            if self.M is None or self.N is None or not 1 <= self.M <= self.N:
                raise ValueError("family Q requires 1 <= M <= N")
        if self.family == "V":
            if self.s is None or not 0.0 <= self.s <= 1.0:
                raise ValueError("family V requires s in [0,1]")


@dataclass(frozen=True)
class UExpansion:
    """Exact-rational expansion of a monomial in the U basis.

    For parity "even" the entry ``coefficients[k]`` multiplies U_{2k} in the
    expansion of x^{2m}; for parity "odd" it multiplies U_{2k-1} in the
    expansion of x^{2m-1}.
    """

    m: int
    parity: str
    coefficients: dict[int, Fraction]

    def degree_of_term(self, k: int) -> int:
        return 2 * k if self.parity == "even" else 2 * k - 1


def snyder_expand(m: int, parity: str) -> UExpansion:
    """Expand x^{2m} (parity "even") or x^{2m-1} ("odd") over U_n exactly.

    x^{2m}   = 1/((2m+1) 2^{2m})   * sum_{n=0}^m (2n+1) C(2m+1, m-n) U_{2n}
    x^{2m-1} = 1/((2m) 2^{2m-1})   * sum_{n=1}^m  2n    C(2m,   m-n) U_{2n-1}
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    coeffs: dict[int, Fraction] = {}
    if parity == "even":
        denom = (2 * m + 1) * 2 ** (2 * m)
        for k in range(m + 1):
            coeffs[k] = Fraction((2 * k + 1) * math.comb(2 * m + 1, m - k), denom)
    elif parity == "odd":
        denom = (2 * m) * 2 ** (2 * m - 1)
        for k in range(1, m + 1):
            coeffs[k] = Fraction(2 * k * math.comb(2 * m, m - k), denom)
    else:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return UExpansion(m=m, parity=parity, coefficients=coeffs)


def u_coefficients(n: int) -> list[Fraction]:
    """Exact coefficient list [c_0, ..., c_n] of U_n; used by exact checks."""
    if n < 0:
        return [Fraction(0)]
    prev = [Fraction(1)]
    if n == 0:
        return prev
    cur = [Fraction(0), Fraction(2)]
    for _ in range(2, n + 1):
        nxt = [Fraction(0)] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


# ---------------------------------------------------------------------------
# matrix arguments


def _require_hermitian(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix argument must be square, got shape {A.shape}")
    if not np.allclose(A, A.conj().T, rtol=1e-12, atol=1e-12):
        raise ValueError("matrix argument must be Hermitian")
    return A


def matrix_poly_traces(params: PolyFamilyParams, A: np.ndarray) -> np.ndarray:
    """Traces of F_k(A) for k = 0..n by the matrix three-term recurrence.

    Iterates on two full dense matrices so every intermediate degree comes
    for free.  The input must be Hermitian; the returned traces are real
    (the imaginary residue is asserted below 1e-9 relative).
    """
    A = _require_hermitian(A)
    dim = A.shape[0]
    fam, n = params.family, params.n
    if fam == "P" and params.N != dim:
        raise ValueError(f"family P expects a {params.N} x {params.N} matrix")
    if fam == "Q" and params.M != dim:
        raise ValueError(f"family Q expects an M x M = {params.M} matrix")

    eye = np.eye(dim, dtype=A.dtype)
    traces = np.empty(n + 1)

    def _real_trace(mat, k):
        t = np.trace(mat)
        if abs(t.imag) > 1e-9 * max(1.0, abs(t.real)):
            raise FloatingPointError(
                f"trace of degree-{k} term has imaginary residue {t.imag}"
            )
        return float(t.real)

    if fam == "U":
        prev, cur = eye, 2.0 * A
    elif fam == "V":
        # V_{k,s}(A) = U_k(A) + sqrt(s) U_{k-1}(A): run the U recurrence and
        # combine at the end, so compute all U traces first.
        u_params = PolyFamilyParams("U", n)
        u_traces = matrix_poly_traces(u_params, A)
        out = np.empty(n + 1)
        root_s = math.sqrt(params.s)
        for k in range(n + 1):
            out[k] = u_traces[k] + (root_s * u_traces[k - 1] if k >= 1 else 0.0)
        return out
    elif fam == "P":
        N = params.N
        prev = eye
        cur = A.copy()
        traces[0] = _real_trace(prev, 0)
        if n >= 1:
            traces[1] = _real_trace(cur, 1)
        if n >= 2:
            second = A @ A - (N - 1) * eye
            traces[2] = _real_trace(second, 2)
            prev, cur = cur, second
        for k in range(3, n + 1):
            prev, cur = cur, A @ cur - (N - 2) * prev
            traces[k] = _real_trace(cur, k)
        return traces
    elif fam == "Q":
        M, N = params.M, params.N
        shift = M + N - 2
        scale = (M - 1) * (N - 1)
        prev = eye
        cur = A - N * eye
        traces[0] = _real_trace(prev, 0)
        if n >= 1:
            traces[1] = _real_trace(cur, 1)
        for k in range(2, n + 1):
            prev, cur = cur, (A - shift * eye) @ cur - scale * prev
            traces[k] = _real_trace(cur, k)
        return traces
    else:  # pragma: no cover
        raise AssertionError

    # U path
    traces[0] = _real_trace(prev, 0)
    if n >= 1:
        traces[1] = _real_trace(cur, 1)
    for k in range(2, n + 1):
        prev, cur = cur, 2.0 * (A @ cur) - prev
        traces[k] = _real_trace(cur, k)
    return traces


def matrix_poly_trace(params: PolyFamilyParams, A: np.ndarray) -> float:
    """tr F_n(A) for the requested family, via the matrix recurrence."""
    return float(matrix_poly_traces(params, A)[params.n])


# ---------------------------------------------------------------------------
# quadrature checks of the orthogonality relations


def _gauss_legendre_theta(fn, npts: int) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    # map [-1,1] -> [0,pi]
    theta = 0.5 * math.pi * (nodes + 1.0)
    return float(0.5 * math.pi * np.sum(weights * fn(theta)))


def quad_inner(measure: str, n: int, nprime: int, s: float | None = None) -> float:
    """Inner product of family members under the stated spectral measure.

    measure "semicircle": integral of U_n U_n' against (2/pi) sqrt(1-x^2);
    measure "mp": integral of V_{n,s} V_{n',s} against the Marchenko-Pastur
    weight (2/pi) sqrt(1-x^2) / ((1+s) + 2 sqrt(s) x), 0 <= s < 1.

    The substitution x = cos(theta) absorbs the square-root endpoint factor;
    Gauss-Legendre node counts double until two successive estimates agree
    to 1e-10.
    """
    if max(n, nprime) > _QUAD_MAX_DEGREE:
        raise ValueError(f"quadrature degrees capped at {_QUAD_MAX_DEGREE}")
    if measure == "semicircle":
        def integrand(theta):
            x = np.cos(theta)
            un = np.array([cheb_u(n, xi) for xi in x])
            um = np.array([cheb_u(nprime, xi) for xi in x])
            return (2.0 / math.pi) * un * um * np.sin(theta) ** 2
    elif measure == "mp":
        if s is None or not 0.0 <= s < 1.0:
            raise ValueError("mp measure requires 0 <= s < 1 (s = 1 is endpoint-singular)")
        def integrand(theta):
            x = np.cos(theta)
            vn = np.array([cheb_v(n, s, xi) for xi in x])
            vm = np.array([cheb_v(nprime, s, xi) for xi in x])
            dens = (1.0 + s) + 2.0 * math.sqrt(s) * x
            return (2.0 / math.pi) * vn * vm * np.sin(theta) ** 2 / dens
    else:
        raise ValueError(f"unknown measure {measure!r}")

    npts = max(32, n + nprime + 8)
    prev = _gauss_legendre_theta(integrand, npts)
    for _ in range(12):
        npts *= 2
        cur = _gauss_legendre_theta(integrand, npts)
        if abs(cur - prev) < 1e-10:
            return cur
        prev = cur
    raise RuntimeError("quadrature failed to converge to 1e-10")
