import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgelab.ensembles import exhaustive_sign_rect
from edgelab.paths import (
    KPathWord,
    Matching,
    PathWord,
    bipartite_path_matrix,
    c_part,
    check_conditions,
    count_matchings,
    count_sigma,
    count_sigma_bipartite,
    expected_trace_exhaustive,
    forest_part,
    gamma_eval,
    gamma_word_sum,
    iter_canonical_strong_paths,
    q_entry_path_sum,
)


def test_condition_flags_doubled_triangle():
    w = PathWord((1, 2, 3, 1, 2, 3, 1), 4)
    flags = check_conditions(w, 1)
    assert flags == {"a": True, "b": True, "c": True,
                     "d1_weak": True, "d_strong": True}
    # same-orientation doubled triangle fails the beta=2 balance
    flags2 = check_conditions(w, 2)
    assert flags2["d1_weak"] is False


def test_condition_backtrack():
    w = PathWord((1, 2, 1), 3)
    assert check_conditions(w, 1, which=("b",)) == {"b": False}


def test_kpath_conditions():
    kw = KPathWord((PathWord((1, 2, 3, 1), 4), PathWord((1, 2, 3, 1), 4)))
    flags = check_conditions(kw, 1)
    assert flags["a"] and flags["b"] and flags["c"]
    assert flags["d1_weak"] is True    # every directed edge twice across the pair
    assert check_conditions(kw, 2)["d1_weak"] is False
    mixed = KPathWord((PathWord((1, 2, 3, 1), 4), PathWord((2, 3, 4, 2), 4)))
    assert check_conditions(mixed, 1)["d1_weak"] is False  # four single edges


def test_matching_validator():
    w = PathWord((1, 2, 3, 1, 2, 3, 1), 4)
    pairing = Matching({0: 3, 3: 0, 1: 4, 4: 1, 2: 5, 5: 2})
    pairing.validate(w, 1)            # coincident pairs: fine for beta 1
    with pytest.raises(ValueError):
        pairing.validate(w, 2)        # beta 2 needs reversed pairs
    with pytest.raises(ValueError):
        Matching({0: 0, 1: 2, 2: 1}).validate(PathWord((1, 2, 3, 1), 3), 1)


def test_count_matchings_formula_vs_brute():
    # reversed four-crossing: pair counts (f, b) = (2, 2) on one edge
    w = PathWord((1, 2, 1, 2, 1), 3)  # violates (b) but matchings ignore that
    # brute force over involutions of 4 positions on one unordered pair
    assert count_matchings(w, 1) == 3     # (4-1)!! = 3
    assert count_matchings(w, 2) == 2     # 2! pairings forward-with-backward


def test_sigma_examples():
    assert count_sigma(1, 4, (6,), "strong") == 24
    assert count_sigma(2, 4, (6,), "weak") == 0
    for beta in (1, 2):
        assert count_sigma(beta, 4, (2,), "weak") == 0
        assert count_sigma(beta, 4, (2,), "strong") == 0
        assert count_sigma(beta, 4, (2,), "matched") == 0


def test_sigma_budget():
    with pytest.raises(ValueError):
        count_sigma(1, 9, (4,), "weak")
    with pytest.raises(ValueError):
        count_sigma(1, 4, (14,), "weak")


@pytest.mark.parametrize("beta", [1, 2])
@pytest.mark.parametrize("lengths", [(4,), (6,), (2, 4), (4, 4)])
def test_sigma_sandwich(beta, lengths):
    for N in (3, 4, 5):
        s = count_sigma(beta, N, lengths, "strong")
        w = count_sigma(beta, N, lengths, "weak")
        m = count_sigma(beta, N, lengths, "matched")
        assert s <= w <= m


def test_sigma_parity():
    assert count_sigma(1, 4, (5,), "weak") == 0
    assert count_sigma(1, 4, (3, 4), "weak") == 0
    assert expected_trace_exhaustive(4, "P", 5) == 0


def test_exhaustive_oracle_equality():
    for N in (3, 4):
        for n in (1, 2, 3):
            assert expected_trace_exhaustive(N, "P", 2 * n) == \
                count_sigma(1, N, (2 * n,), "weak")
    assert expected_trace_exhaustive(4, "P", 6) == 24
    assert expected_trace_exhaustive(4, "P", 4) == 0
    assert expected_trace_exhaustive(4, "P", 2) == 0


def test_gamma_base_case():
    A = np.arange(16, dtype=float).reshape(4, 4)
    A = A + A.T
    w = PathWord((1, 2), 4)
    assert gamma_eval(w, A) == pytest.approx(A[0, 1])


def _matrix_u(Z, n):
    prev = np.eye(Z.shape[0], dtype=Z.dtype)
    if n == 0:
        return prev
    cur = 2.0 * Z
    for _ in range(2, n + 1):
        prev, cur = cur, 2.0 * (Z @ cur) - prev
    return cur


@pytest.mark.parametrize("seed", [0, 1])
def test_gamma_sum_identity_real(seed):
    rng = np.random.default_rng(seed)
    N = 4
    vals = np.array([-2.0, -1.0, 1.0, 2.0])
    A = vals[rng.integers(0, 4, (N, N))]
    A = np.triu(A) + np.triu(A, 1).T
    scale = 2.0 * math.sqrt(N - 2)
    for n in range(6):
        un = (N - 2) ** (n / 2.0) * _matrix_u(A / scale, n)
        for u in range(1, N + 1):
            for v in range(1, N + 1):
                assert gamma_word_sum(A, u, v, n) == pytest.approx(
                    un[u - 1, v - 1], abs=1e-8)


def test_gamma_sum_identity_hermitian():
    rng = np.random.default_rng(11)
    N = 4
    A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    A = A + A.conj().T
    scale = 2.0 * math.sqrt(N - 2)
    for n in range(5):
        un = (N - 2) ** (n / 2.0) * _matrix_u(A / scale, n)
        for u in range(1, N + 1):
            assert gamma_word_sum(A, u, u, n) == pytest.approx(
                un[u - 1, u - 1], abs=1e-8)


def test_gamma_empty_forest_matches_nbt_path_sum():
    # unit-modulus zero-diagonal A: words whose scan leaves no off-circuit
    # remainder are exactly the NBT words, and gamma is their entry product
    rng = np.random.default_rng(5)
    N = 4
    A = np.exp(1j * rng.uniform(0, 2 * math.pi, (N, N)))
    A = np.triu(A, 1)
    A = A + A.conj().T
    for n in (3, 4, 5):
        for u in (1, 2):
            total = 0.0 + 0.0j
            direct = 0.0 + 0.0j

            def rec(seq):
                nonlocal total, direct
                if len(seq) == n + 1:
                    if seq[-1] != u:
                        return
                    w = PathWord(tuple(seq), N)
                    if len(c_part(w).vertices) == len(seq):
                        total += gamma_eval(w, A)
                    flags = check_conditions(w, 1, which=("a", "b"))
                    if flags["a"] and flags["b"]:
                        prod = 1.0 + 0.0j
                        for j in range(n):
                            prod *= A[seq[j] - 1, seq[j + 1] - 1]
                        direct += prod
                    return
                for x in range(1, N + 1):
                    seq.append(x)
                    rec(seq)
                    seq.pop()

            rec([u])
            assert total == pytest.approx(direct, abs=1e-8)


@given(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=7))
@settings(max_examples=150, deadline=None)
def test_c_part_always_nbt(interior):
    word = PathWord(tuple([1] + interior), 5)
    cp = c_part(word)
    flags = check_conditions(cp, 1, which=("a", "b"))
    assert flags["a"] and flags["b"]
    assert cp.vertices[0] == word.vertices[0]
    assert cp.vertices[-1] == word.vertices[-1]


def test_forest_part_accounting():
    w = PathWord((1, 2, 3, 3, 2, 1), 4)
    forest = forest_part(w)
    # the loop at 3 plus both popped pairs are off-circuit
    assert forest[(3, 3)] == 1
    assert forest[(2, 3)] == 2
    assert forest[(1, 2)] == 2
    assert len(c_part(w).vertices) == 1


def test_bipartite_degenerate_length_one():
    for beta in (1, 2):
        assert count_sigma_bipartite(beta, 2, 3, 1, "weak") == 0


def test_bipartite_counts_match_exhaustive_expectation():
    # E tr of the bipartite path-sum matrix over all sign matrices equals
    # the weak count, for every n in budget
    for n in range(1, 5):
        total = 0.0
        count = 0
        for s in exhaustive_sign_rect(2, 3):
            total += float(np.trace(bipartite_path_matrix(s.entries, n)).real)
            count += 1
        assert total / count == pytest.approx(
            count_sigma_bipartite(1, 2, 3, n, "weak"), abs=1e-9)


def test_bipartite_path_sum_vs_q_with_base_drift():
    # Q_n(B) equals the path sum plus (M-1) ((M-1)(N-1))^((n-2)/2) U_{n-2}
    # of the centred argument; at n = 1 they coincide exactly.
    rng = np.random.default_rng(7)
    M, N = 2, 3
    X = np.exp(1j * rng.uniform(0, 2 * math.pi, (M, N)))
    B = X @ X.conj().T
    eye = np.eye(M, dtype=complex)
    shift, scale = M + N - 2, (M - 1) * (N - 1)
    qmats = [eye, B - N * eye]
    for k in range(2, 5):
        qmats.append((B - shift * eye) @ qmats[-1] - scale * qmats[-2])
    for n in range(1, 5):
        s_n = bipartite_path_matrix(X, n)
        expected = qmats[n].copy()
        if n >= 2:
            z = (B - shift * eye) / (2.0 * math.sqrt(scale))
            expected -= (M - 1) * scale ** ((n - 2) / 2.0) * _matrix_u(z, n - 2)
        assert np.max(np.abs(s_n - expected)) <= 1e-8


def test_q_entry_claim_exact_at_n1():
    rng = np.random.default_rng(9)
    M, N = 3, 4
    X = np.exp(1j * rng.uniform(0, 2 * math.pi, (M, N)))
    B = X @ X.conj().T
    for u in range(1, M + 1):
        for up in range(1, M + 1):
            expected = (B[u - 1, up - 1] - (N if u == up else 0.0))
            assert q_entry_path_sum(X, u, up, 1) == pytest.approx(expected, abs=1e-10)


def test_bipartite_iteration_budget():
    with pytest.raises(ValueError):
        count_sigma_bipartite(1, 4, 4, 2, "weak")
    with pytest.raises(ValueError):
        count_sigma_bipartite(1, 2, 3, 7, "weak")


def test_canonical_strong_paths_basic():
    # length 6, beta 1: the doubled triangle is the only canonical class
    got = list(iter_canonical_strong_paths(1, 6))
    assert got == [(1, 2, 3, 1, 2, 3, 1)]
    assert list(iter_canonical_strong_paths(2, 6)) == []
    # every yielded path really is strong, closed, NBT
    for p in iter_canonical_strong_paths(1, 10):
        w = PathWord(p, max(p))
        flags = check_conditions(w, 1)
        assert flags["a"] and flags["b"] and flags["c"] and flags["d_strong"]
