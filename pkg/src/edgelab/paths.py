"""Exact path combinatorics on the complete and complete bipartite graphs.

A path word is a vertex sequence u_0 u_1 ... u_n on K_N.  The validity
conditions are

  (a)  u_j != u_{j-1}                     (no loops)
  (b)  u_j != u_{j-2}                     (non-backtracking)
  (c)  u_n = u_0                          (closed)
  (d1 weak)    per unordered pair, forward and backward traversal counts
               agree mod 2 (beta = 1) / agree exactly (beta = 2)
  (d  strong)  per unordered pair, total traversals in {0, 2} (beta = 1) /
               one traversal each way or none (beta = 2)

k-tuples of words share the edge-count conditions (d) across the tuple.
Counts are computed by depth-first enumeration of first-occurrence
canonical words; a canonical class on v distinct vertices accounts for
N (N-1) ... (N-v+1) labelled words, which keeps the stated budgets
(total length <= 12, N <= 8) tractable.

gamma_eval implements the entry-product generalisation of the path sum to
arbitrary Hermitian matrices: each word is scanned left to right while a
stack holds its non-backtracking part.  A step that immediately reverses
the edge pushed by the previous step resolves to the factor |A_e|^2 - 1
(recorded through gamma_n = gamma_{n-1} A - gamma_{n-2}); a repeated loop
at the start vertex after the stack has fully unwound contributes the
additive gamma_{n-2} term.  The scan is validated operationally by the
identity

  (N-2)^{n/2} U_n(A / (2 sqrt(N-2)))_{u v} = sum over words u -> v of gamma

which pins down the two prose-ambiguous corner cases (see tests).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ensembles import exhaustive_sign_wigner

MAX_TOTAL_LENGTH = 12
MAX_AMBIENT_N = 8

CONDITIONS = ("a", "b", "c", "d1_weak", "d_strong")


@dataclass(frozen=True)
class PathWord:
    """Vertex sequence u_0 ... u_n with entries in 1..N."""

    vertices: tuple
    N: int

    def __post_init__(self):
        if any(not 1 <= u <= self.N for u in self.vertices):
            raise ValueError("vertex out of range")

    @property
    def n(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class KPathWord:
    words: tuple

    def __post_init__(self):
        if not self.words:
            raise ValueError("k-path needs at least one word")

    @property
    def lengths(self) -> tuple:
        return tuple(w.n for w in self.words)


@dataclass(frozen=True)
class BipartitePathWord:
    """Alternating word u_0 v_0 u_1 v_1 ... v_{n-1} u_n on K_{M,N}."""

    us: tuple  # length n+1, entries in 1..M
    vs: tuple  # length n, entries in 1..N
    M: int
    N: int

    def __post_init__(self):
        if len(self.us) != len(self.vs) + 1:
            raise ValueError("alternation broken: need one more u than v")
        if any(not 1 <= u <= self.M for u in self.us):
            raise ValueError("u vertex out of range")
        if any(not 1 <= v <= self.N for v in self.vs):
            raise ValueError("v vertex out of range")

    @property
    def n(self) -> int:
        return len(self.vs)


@dataclass(frozen=True)
class Matching:
    """Fixed-point-free involution on edge positions, with orientation rules.

    pairs maps position -> position.  For beta = 2 a pair must join two
    reversed traversals of the same edge; for beta = 1 coincident pairs are
    allowed as well.
    """

    pairs: dict

    def validate(self, word, beta: int) -> None:
        words = word.words if isinstance(word, KPathWord) else (word,)
        edges = []
        for w in words:
            vs = w.vertices
            edges.extend((vs[j], vs[j + 1]) for j in range(len(vs) - 1))
        seen = set()
        for i, j in self.pairs.items():
            if i == j:
                raise ValueError(f"matching has a fixed point at {i}")
            if self.pairs.get(j) != i:
                raise ValueError("matching is not an involution")
            if not (0 <= i < len(edges) and 0 <= j < len(edges)):
                raise ValueError("matching index out of range")
            seen.update((i, j))
            ei, ej = edges[i], edges[j]
            if ei == (ej[1], ej[0]):
                continue  # reversed pair: fine for both beta
            if ei == ej:
                if beta == 2:
                    raise ValueError(
                        f"beta=2 forbids coincident pairing of positions {i},{j}"
                    )
                continue
            raise ValueError(f"positions {i},{j} carry different edges")
        if len(seen) != len(edges):
            raise ValueError("matching must cover every edge position")


def _directed_counts(words) -> Counter:
    c = Counter()
    for w in words:
        vs = w.vertices
        for j in range(len(vs) - 1):
            c[(vs[j], vs[j + 1])] += 1
    return c


def check_conditions(word, beta: int, which=None) -> dict:
    """Evaluate the requested validity conditions; returns name -> bool."""
    if which is None:
        which = CONDITIONS
    words = word.words if isinstance(word, KPathWord) else (word,)
    out = {}
    if "a" in which:
        out["a"] = all(
            w.vertices[j] != w.vertices[j - 1]
            for w in words for j in range(1, len(w.vertices))
        )
    if "b" in which:
        out["b"] = all(
            w.vertices[j] != w.vertices[j - 2]
            for w in words for j in range(2, len(w.vertices))
        )
    if "c" in which:
        out["c"] = all(w.vertices[-1] == w.vertices[0] for w in words)
    if "d1_weak" in which or "d_strong" in which:
        dc = _directed_counts(words)
        pairs = {frozenset(e) for e in dc}
        if "d1_weak" in which:
            if beta == 1:
                out["d1_weak"] = all(
                    (dc[(u, v)] + dc[(v, u)]) % 2 == 0
                    for u, v in (tuple(sorted(p)) for p in pairs)
                )
            else:
                out["d1_weak"] = all(
                    dc[(u, v)] == dc[(v, u)]
                    for u, v in (tuple(sorted(p)) for p in pairs)
                )
        if "d_strong" in which:
            if beta == 1:
                out["d_strong"] = all(
                    dc[(u, v)] + dc[(v, u)] == 2
                    for u, v in (tuple(sorted(p)) for p in pairs)
                )
            else:
                out["d_strong"] = all(
                    dc[(u, v)] == dc[(v, u)] == 1
                    for u, v in (tuple(sorted(p)) for p in pairs)
                )
    return out


def count_matchings(word, beta: int) -> int:
    """Number of valid matchings of the word's edge positions.

    Per unordered pair with f forward and b backward traversals: any perfect
    pairing works for beta = 1 (so (f+b-1)!! for even totals), while beta = 2
    must pair forward with backward (f! when f = b).
    """
    words = word.words if isinstance(word, KPathWord) else (word,)
    dc = _directed_counts(words)
    pairs = {frozenset(e) for e in dc}
    total = 1
    for p in pairs:
        u, v = tuple(sorted(p))
        f, b = dc[(u, v)], dc[(v, u)]
        if beta == 1:
            m = f + b
            if m % 2:
                return 0
            total *= _double_factorial(m - 1)
        else:
            if f != b:
                return 0
            total *= math.factorial(f)
    return total


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _falling(N: int, v: int) -> int:
    out = 1
    for i in range(v):
        out *= N - i
    return out


# ---------------------------------------------------------------------------
# exhaustive counting of (k-)paths


def count_sigma(beta: int, N: int, lengths, strength: str) -> int:
    """Exact number of closed NBT k-paths on K_N at the chosen d-condition.

    strength "weak" counts paths satisfying (a),(b),(c),(d_beta^1);
    "strong" uses (d_beta); "matched" counts (path, matching) pairs over the
    weak family.  Enumeration is over first-occurrence canonical words, each
    weighted by the falling factorial of its distinct-vertex count.
    """
    lengths = tuple(int(n) for n in lengths)
    if strength not in ("weak", "strong", "matched"):
        raise ValueError(f"unknown strength {strength!r}")
    if sum(lengths) > MAX_TOTAL_LENGTH or N > MAX_AMBIENT_N:
        raise ValueError(
            f"budget exceeded: total length <= {MAX_TOTAL_LENGTH}, N <= {MAX_AMBIENT_N}"
        )
    if any(n < 1 for n in lengths):
        raise ValueError("each word must have positive length")

    dc = Counter()  # directed traversal counts across the whole k-tuple
    total = 0

    def open_weight() -> int:
        # minimum number of further steps needed to balance the d-condition
        if beta == 1:
            return sum(1 for (u, v) in {(min(a, b), max(a, b)) for (a, b) in dc}
                       if (dc[(u, v)] + dc[(v, u)]) % 2)
        return sum(dc[(u, v)] - dc[(v, u)] for (u, v) in dc
                   if dc[(u, v)] > dc[(v, u)])

    def step_allowed(u, v) -> bool:
        if strength != "strong":
            return True
        if beta == 1:
            return dc[(u, v)] + dc[(v, u)] < 2
        return dc[(u, v)] < 1

    def finish_ok() -> bool:
        for (u, v) in {(min(a, b), max(a, b)) for (a, b) in dc}:
            f, b = dc[(u, v)], dc[(v, u)]
            if f == b == 0:
                continue
            if strength == "strong":
                if beta == 1 and f + b != 2:
                    return False
                if beta == 2 and not (f == b == 1):
                    return False
            else:
                if beta == 1 and (f + b) % 2:
                    return False
                if beta == 2 and f != b:
                    return False
        return True

    def dfs(word_idx, seq, used, remaining, canonical_words):
        nonlocal total
        L = lengths[word_idx]
        pos = len(seq) - 1
        if pos == L:
            if seq[-1] != seq[0]:
                return
            if word_idx + 1 == len(lengths):
                if finish_ok():
                    weight = _falling(N, used)
                    if strength == "matched":
                        kw = KPathWord(tuple(PathWord(w, N)
                                             for w in canonical_words + [tuple(seq)]))
                        weight *= count_matchings(kw, beta)
                    total += weight
                return
            done = canonical_words + [tuple(seq)]
            for start in range(1, min(used + 1, N) + 1):
                dfs(word_idx + 1, [start], max(used, start), remaining, done)
            return
        u = seq[-1]
        for v in range(1, min(used + 1, N) + 1):
            if v == u:
                continue  # (a)
            if pos >= 1 and v == seq[-2]:
                continue  # (b)
            if not step_allowed(u, v):
                continue
            dc[(u, v)] += 1
            if open_weight() <= remaining - 1:
                seq.append(v)
                dfs(word_idx, seq, max(used, v), remaining - 1, canonical_words)
                seq.pop()
            dc[(u, v)] -= 1
            if dc[(u, v)] == 0:
                del dc[(u, v)]

    dfs(0, [1], 1, sum(lengths), [])
    return int(total)


def expected_trace_exhaustive(N: int, family: str, n: int) -> Fraction:
    """Exact average of tr F_n(A) over every +-1 sign Wigner matrix on K_N.

    beta = 1 only; N <= 4 and n <= 6 keep the 2^(N(N-1)/2) sweep tiny.
    Family "P" uses the dimension-adapted recurrence, family "U" applies the
    plain second-kind recurrence to the raw matrix.
    """
    if N > 4 or n > 6:
        raise ValueError("budget exceeded: N <= 4 and n <= 6")
    if family not in ("P", "U"):
        raise ValueError("family must be 'P' or 'U'")
    total = Fraction(0)
    count = 0
    for sample in exhaustive_sign_wigner(N):
        A = sample.entries.astype(np.int64)
        eye = np.eye(N, dtype=np.int64)
        if family == "P":
            prev, cur = eye, A.copy()
            mats = [prev, cur]
            if n >= 2:
                mats.append(A @ A - (N - 1) * eye)
            for k in range(3, n + 1):
                mats.append(A @ mats[-1] - (N - 2) * mats[-2])
            tr = int(np.trace(mats[n]))
        else:
            prev, cur = eye, 2 * A
            if n == 0:
                tr = int(np.trace(prev))
            else:
                for _ in range(2, n + 1):
                    prev, cur = cur, 2 * (A @ cur) - prev
                tr = int(np.trace(cur))
        total += tr
        count += 1
    return total / count


# ---------------------------------------------------------------------------
# the gamma construction


def _gamma_scan(word: PathWord, A: np.ndarray):
    """Run the left-to-right scan; returns (gamma, stack, forest counter)."""
    vs = word.vertices
    u0 = vs[0]
    stack = [u0]
    gamma_prev2 = None  # gamma(p_{j-2})
    gamma = 1.0 + 0.0j  # gamma(p_{j-1}), starts at gamma(p_0)
    triv_prev2 = None   # was C(p_{j-2}) trivial
    triv_prev = True    # C(p_0) is trivial
    last_was_push = False
    forest = Counter()

    for j in range(1, len(vs)):
        w, v = vs[j - 1], vs[j]
        entry = complex(A[w - 1, v - 1])
        if v == w:
            if j >= 2 and triv_prev2 and w == u0:
                g_new = gamma * entry + gamma_prev2      # 1:1
            else:
                g_new = gamma * entry                    # 1:2
            forest[(w, w)] += 1
            pushed = False
        elif len(stack) >= 2 and stack[-1] == w and stack[-2] == v:
            if last_was_push:
                g_new = gamma * entry - gamma_prev2      # 2:1:1
            else:
                g_new = gamma * entry                    # 2:1:2
            stack.pop()
            forest[(min(v, w), max(v, w))] += 2
            pushed = False
        else:
            g_new = gamma * entry                        # 2:2
            stack.append(v)
            pushed = True
        gamma_prev2, gamma = gamma, g_new
        triv_prev2, triv_prev = triv_prev, len(stack) == 1
        last_was_push = pushed
    return gamma, stack, forest


def gamma_eval(word: PathWord, A: np.ndarray) -> complex:
    """gamma(word, A) for a Hermitian matrix A of the word's dimension."""
    A = np.asarray(A)
    if A.shape != (word.N, word.N):
        raise ValueError("matrix dimension does not match the word's N")
    if word.N < 3:
        raise ValueError("gamma construction requires N >= 3")
    g, _, _ = _gamma_scan(word, A)
    return g


def c_part(word: PathWord) -> PathWord:
    """The non-backtracking part of the word (always satisfies (a),(b))."""
    dummy = np.zeros((word.N, word.N))
    _, stack, _ = _gamma_scan(word, dummy)
    return PathWord(tuple(stack), word.N)


def forest_part(word: PathWord) -> Counter:
    """Multiset of off-circuit edge traversals: popped pairs plus loop steps."""
    dummy = np.zeros((word.N, word.N))
    _, _, forest = _gamma_scan(word, dummy)
    return forest


def gamma_word_sum(A: np.ndarray, u: int, v: int, n: int) -> complex:
    """Sum of gamma over all words of length n from u to v (1-based)."""
    A = np.asarray(A)
    N = A.shape[0]
    total = 0.0 + 0.0j
    if n == 0:
        return 1.0 + 0.0j if u == v else 0.0 + 0.0j

    def rec(seq):
        nonlocal total
        if len(seq) == n:
            word = PathWord(tuple(seq) + (v,), N)
            total += gamma_eval(word, A)
            return
        for w in range(1, N + 1):
            seq.append(w)
            rec(seq)
            seq.pop()

    rec([u])
    return total


# ---------------------------------------------------------------------------
# complete bipartite graph


def iter_bipartite_paths(M: int, N: int, n: int, closed: bool = True):
    """Alternating words u_0 v_0 u_1 ... v_{n-1} u_n on K_{M,N} with
    u_{j-1} != u_j and v_{j-1} != v_j; closed restricts to u_n = u_0."""
    if n < 1:
        return

    def rec(us, vs):
        if len(us) == n + 1:
            if not closed or us[-1] == us[0]:
                yield BipartitePathWord(tuple(us), tuple(vs), M, N)
            return
        for v in range(1, N + 1):
            if vs and v == vs[-1]:
                continue
            vs.append(v)
            for u in range(1, M + 1):
                if u == us[-1]:
                    continue
                us.append(u)
                yield from rec(us, vs)
                us.pop()
            vs.pop()

    for u0 in range(1, M + 1):
        yield from rec([u0], [])


def _bipartite_edge_counts(word: BipartitePathWord):
    down = Counter()  # (u_j, v_j)
    up = Counter()    # (u_{j+1}, v_j)
    for j in range(word.n):
        down[(word.us[j], word.vs[j])] += 1
        up[(word.us[j + 1], word.vs[j])] += 1
    return down, up


def count_sigma_bipartite(beta: int, M: int, N: int, n: int, strength: str) -> int:
    """Exact count of closed bipartite paths at the chosen d-condition."""
    if n > 6 or M > 3 or N > 4:
        raise ValueError("budget exceeded: n <= 6, M <= 3, N <= 4")
    if strength not in ("weak", "strong"):
        raise ValueError("strength must be 'weak' or 'strong'")
    count = 0
    for word in iter_bipartite_paths(M, N, n):
        down, up = _bipartite_edge_counts(word)
        ok = True
        for e in set(down) | set(up):
            a, b = down[e], up[e]
            if strength == "weak":
                good = (a + b) % 2 == 0 if beta == 1 else a == b
            else:
                good = (a + b) in (0, 2) if beta == 1 else a == b <= 1
            if not good:
                ok = False
                break
        if ok:
            count += 1
    return count


def bipartite_path_matrix(X: np.ndarray, n: int) -> np.ndarray:
    """M x M matrix of bipartite path sums: entry (u0, un) sums, over all
    alternating words u0 v0 u1 ... v_{n-1} un with no consecutive repeats,
    the product X_{u0 v0} conj(X_{u1 v0}) X_{u1 v1} conj(X_{u2 v1}) ...

    (Each descent along an edge contributes the plain entry, each ascent the
    conjugate, matching B = X X*.)"""
    X = np.asarray(X)
    M, N = X.shape
    out = np.zeros((M, M), dtype=np.complex128)
    for word in iter_bipartite_paths(M, N, n, closed=False):
        prod = 1.0 + 0.0j
        for j in range(n):
            prod *= complex(X[word.us[j] - 1, word.vs[j] - 1])
            prod *= complex(np.conj(X[word.us[j + 1] - 1, word.vs[j] - 1]))
        out[word.us[0] - 1, word.us[-1] - 1] += prod
    return out


def q_entry_path_sum(X: np.ndarray, u0: int, un: int, n: int) -> complex:
    """Single entry of bipartite_path_matrix (1-based indices)."""
    return complex(bipartite_path_matrix(X, n)[u0 - 1, un - 1])


# ---------------------------------------------------------------------------
# canonical strong paths for the diagram reduction oracle


def iter_canonical_strong_paths(beta: int, length: int, max_visits: int = 3):
    """First-occurrence canonical closed NBT paths of the given length in
    which every edge is traversed exactly twice (condition d_beta), with all
    vertex visit counts capped at max_visits.

    These are exactly the paths whose degree-2-erasure reduction has maximum
    degree 3 and is therefore a bona fide diagram; every diagram admits such
    a realisation, so classifying them by reduced canonical form enumerates
    diagrams without the high-degree vertex splitting step.
    """
    if length % 2 or length < 2:
        return
    dc = Counter()
    visits = Counter({1: 1})
    seq = [1]

    def open_pairs() -> int:
        if beta == 1:
            return sum(1 for (u, v) in {(min(a, b), max(a, b)) for (a, b) in dc}
                       if (dc[(u, v)] + dc[(v, u)]) % 2)
        return sum(dc[(u, v)] - dc[(v, u)] for (u, v) in dc
                   if dc[(u, v)] > dc[(v, u)])

    def complete() -> bool:
        for (u, v) in {(min(a, b), max(a, b)) for (a, b) in dc}:
            f, b = dc[(u, v)], dc[(v, u)]
            if beta == 1 and (f + b) not in (0, 2):
                return False
            if beta == 2 and not (f == b <= 1):
                return False
        return True

    def rec(used):
        pos = len(seq) - 1
        if pos == length:
            if seq[-1] == seq[0] and complete():
                yield tuple(seq)
            return
        remaining = length - pos
        u = seq[-1]
        for v in range(1, min(used + 1, length) + 1):
            if v == u:
                continue  # (a)
            if pos >= 1 and v == seq[-2]:
                continue  # (b)
            if visits[v] >= max_visits:
                continue
            if beta == 1:
                if dc[(u, v)] + dc[(v, u)] >= 2:
                    continue
            else:
                if dc[(u, v)] >= 1:
                    continue
            dc[(u, v)] += 1
            visits[v] += 1
            if open_pairs() <= remaining - 1:
                seq.append(v)
                yield from rec(max(used, v))
                seq.pop()
            dc[(u, v)] -= 1
            if dc[(u, v)] == 0:
                del dc[(u, v)]
            visits[v] -= 1

    yield from rec(1)
