import math
from collections import defaultdict

import pytest

from edgelab.diagrams import (
    AutomatonState,
    CovTracePrediction,
    d_count,
    d_count_k,
    delta_count,
    enumerate_diagrams,
    enumerate_diagrams_by_s,
    export_d_table,
    minimal_half_length,
    phi,
    phi_multi,
    predict_cov_trace,
    realize_path,
    reduce_strong_path,
    state_trajectory,
    vertex_type_split,
    weight_placement_count,
)
from edgelab.paths import iter_bipartite_paths, iter_canonical_strong_paths


def test_census_values():
    assert d_count(1, 1) == 1
    assert d_count(2, 1) == 0
    assert d_count(2, 2) == 1
    assert d_count(2, 3) == 0   # beta = 2 needs an even step count
    assert d_count(1, 2) == 7
    assert d_count(1, 3) == 128


def test_structural_validation_runs_on_everything():
    for beta in (1, 2):
        for s in (1, 2, 3):
            for d in enumerate_diagrams(beta, s):
                d.validate()                       # raises on any violation
                assert d.n_vertices == 2 * s
                assert d.n_edges == 3 * s - 1


def test_realization_round_trip():
    for beta in (1, 2):
        for s in (1, 2, 3):
            for d in enumerate_diagrams(beta, s):
                wd = reduce_strong_path(beta, realize_path(d))
                assert wd.diagram.key == d.key
                assert all(w >= -1 for w in wd.weights)
                assert sum(w == -1 for w in wd.weights) <= 1


def test_realization_round_trip_s4_beta2():
    for d in enumerate_diagrams(2, 4):
        wd = reduce_strong_path(2, realize_path(d))
        assert wd.diagram.key == d.key


def test_cross_oracle_reachable_census():
    # classify exhaustively enumerated strong paths by reduced form and
    # compare, as sets of canonical keys, with the circuit enumeration
    for beta in (1, 2):
        found = defaultdict(set)
        for n in range(1, 10):
            for p in iter_canonical_strong_paths(beta, 2 * n):
                wd = reduce_strong_path(beta, p)
                found[wd.diagram.s].add(wd.diagram.key)
        for s in (1, 2, 3):
            reachable = {d.key for d in enumerate_diagrams(beta, s)
                         if minimal_half_length(d) <= 9}
            assert reachable == found.get(s, set()), (beta, s)


def test_lower_bound_product():
    for g in (1, 2):
        bound = 1
        for i in range(1, g + 1):
            bound *= (4 * i - 3) * (2 * i - 1)
        assert bound <= d_count(2, 2 * g)


def test_bracket_property_and_catalan_order_bound():
    catalan = {1: 1, 2: 2}
    for g in (1, 2):
        orders = set()
        for d in enumerate_diagrams(2, 2 * g):
            states = state_trajectory(d)
            assert states[0] == AutomatonState(0, ())
            assert states[-1] == AutomatonState(0, ())
            assert all(st.t > 0 for st in states[1:-1])
            loops = [len(st.loops) for st in states]
            assert min(loops) == 0 and loops[0] == 0 and loops[-1] == 0
            # macro transition order: the sign sequence of loop-count changes
            changes = tuple(b - a for a, b in zip(loops, loops[1:]) if b != a)
            assert sum(changes) == 0
            orders.add(changes)
        assert len(orders) <= catalan[g]


def test_d_count_k_composition_structure():
    assert d_count_k(1, 1, 3) == d_count(1, 3)
    assert d_count_k(1, 2, 2) == d_count(1, 1) ** 2
    assert d_count_k(1, 2, 3) == 2 * d_count(1, 1) * d_count(1, 2)
    assert d_count_k(2, 2, 4) == d_count(2, 2) ** 2   # only (2,2) contributes
    assert d_count_k(2, 2, 3) == 0
    assert d_count_k(1, 3, 2) == 0                     # s < k
    groups = enumerate_diagrams_by_s(1, 3, k=2)
    assert len(groups[2]) == 1 and len(groups[3]) == 14


def test_phi_limits():
    # N -> infinity: only s = 1 survives; D_1(1)/(1)! = 1
    for n in (2.0, 6.0, 10.0):
        assert phi(1, n, 1e15) == pytest.approx(n / 4.0, rel=1e-10)
    # beta = 2: s = 1 term vanishes, leading term (n/4) ((n/2)^3/N) / 4!
    n, N = 4.0, 1e9
    lead = (n / 4.0) * ((n / 2.0) ** 3 / N) * d_count(2, 2) / math.factorial(4)
    assert phi(2, n, N) == pytest.approx(lead, rel=1e-6)


def test_phi_warnings():
    with pytest.warns(UserWarning):
        phi(1, 100.0, 10.0)     # expansion parameter far above 1


def test_phi_even_argument_consistency():
    # n sum_s (n^3/N)^(s-1) D(s)/(3s-2)!  ==  2 phi(2n; N) for every grid point
    for beta in (1, 2):
        for n_half in (2, 3, 5, 8):
            for N in (50.0, 1e3, 1e6):
                direct = n_half * sum(
                    (n_half ** 3 / N) ** (s - 1) * d_count(beta, s)
                    / math.factorial(3 * s - 2)
                    for s in range(1, 6))
                assert 2.0 * phi(beta, 2 * n_half, N) == pytest.approx(
                    direct, rel=1e-12)


def test_phi_multi_factorises():
    assert phi_multi(1, (), 100.0) == 1.0
    assert phi_multi(1, (4, 6), 100.0) == pytest.approx(
        phi(1, 4, 100.0) * phi(1, 6, 100.0))


def test_predict_cov_trace_structure():
    pred = predict_cov_trace(1, 6, 300, 900)
    assert isinstance(pred, CovTracePrediction)
    assert not pred.degenerate_aspect
    assert pred.total == pytest.approx((300 * 900) ** 3 * pred.normalized)
    # M = N: the second branch's prefactor vanishes; flagged limit
    deg = predict_cov_trace(1, 4, 50, 50)
    assert deg.degenerate_aspect
    ratio = math.sqrt(50 / 50)
    assert deg.normalized == pytest.approx(
        (1 + ratio) * phi(1, 4, (50 ** -0.5 + 50 ** -0.5) ** -2))
    # odd degree with M << N: the two branches pull apart with a minus sign
    odd = predict_cov_trace(1, 3, 4, 100)
    n_plus = (4 ** -0.5 + 100 ** -0.5) ** -2
    n_minus = (4 ** -0.5 - 100 ** -0.5) ** -2
    expect = (1 + 0.2) * phi(1, 3, n_plus) - (1 - 0.2) * phi(1, 3, n_minus)
    assert odd.normalized == pytest.approx(expect, rel=1e-12)


def test_predict_cov_trace_order_of_magnitude_logged():
    # small-size sanity: asymptotic predictor vs the exhaustive expectation;
    # logged, not gated, so only finiteness is asserted
    from fractions import Fraction
    from edgelab.cheb import PolyFamilyParams, matrix_poly_traces
    from edgelab.ensembles import exhaustive_sign_rect

    total = Fraction(0)
    count = 0
    for s in exhaustive_sign_rect(2, 3):
        tr = matrix_poly_traces(PolyFamilyParams("Q", 2, N=3, M=2),
                                s.entries @ s.entries.T)[2]
        total += Fraction(round(tr))
        count += 1
    exact = float(total / count) / (2 * 3)
    pred = predict_cov_trace(1, 2, 2, 3).normalized
    print(f"exhaustive E tr Q_2/(MN) = {exact:.4f}, predictor = {pred:.4f}")
    assert math.isfinite(pred)


def test_delta_count_examples_and_brute_force():
    assert delta_count(3, 2, 1) == 0
    assert delta_count(4, 2, 1) == 3
    for b in (1, 3, 5):
        assert delta_count(0, 0, b) == 1
    with pytest.raises(ValueError):
        delta_count(4, 0, 0)

    def brute(m, a, b):
        def rec(rem, odd_left, even_left):
            if odd_left == 0 and even_left == 0:
                return 1 if rem == 0 else 0
            total = 0
            if odd_left:
                for v in range(1, rem + 1, 2):
                    total += rec(rem - v, odd_left - 1, even_left)
            else:
                for v in range(0, rem + 1, 2):
                    total += rec(rem - v, 0, even_left - 1)
            return total
        return rec(m, a, b)

    for m in range(13):
        for a in range(6):
            for b in range(6):
                if a + b >= 1:
                    assert delta_count(m, a, b) == brute(m, a, b), (m, a, b)


def test_vertex_type_split_examples():
    assert vertex_type_split(3, 1, 1) == (2, 1)
    assert vertex_type_split(3, 1, 2) is None
    v_plus, v_minus = vertex_type_split(8, 2, 4)
    assert v_plus + v_minus == 8 + 1 - 2


def _as_unipartite(word):
    seq = [("u", word.us[0])]
    for j in range(word.n):
        seq.append(("v", word.vs[j]))
        seq.append(("u", word.us[j + 1]))
    labels = {}
    out = []
    for v in seq:
        if v not in labels:
            labels[v] = len(labels) + 1
        out.append(labels[v])
    types = {labels[k]: k[0] for k in labels}
    return tuple(out), types


def test_vertex_type_split_against_bipartite_enumeration():
    # reduce strong bipartite paths and check the (V+, V-) formula per path
    checked = 0
    for n in (4, 5):
        for word in iter_bipartite_paths(3, 4, n):
            down = {}
            ok_strong = True
            from collections import Counter
            pairs = Counter()
            for j in range(word.n):
                pairs[(word.us[j], word.vs[j])] += 1
                pairs[(word.us[j + 1], word.vs[j])] += 1
            if any(c != 2 for c in pairs.values()):
                continue
            path, types = _as_unipartite(word)
            try:
                wd = reduce_strong_path(1, path)
            except ValueError:
                continue           # united degree above 3: out of oracle scope
            # recover the diagram vertex types along the reduction
            dvertex_types = _diagram_types(path, types)
            vbar_plus = sum(1 for t in dvertex_types if t == "u")
            split = vertex_type_split(n, wd.diagram.s, vbar_plus)
            assert split is not None
            v_plus, v_minus = split
            assert v_plus == len({u for u in word.us})
            assert v_minus == len({v for v in word.vs})
            checked += 1
    assert checked > 0


def _diagram_types(path, types):
    from collections import Counter
    pairs = Counter()
    for j in range(len(path) - 1):
        a, b = path[j], path[j + 1]
        pairs[(min(a, b), max(a, b))] += 1
    deg = Counter()
    for (a, b) in pairs:
        deg[a] += 1
        deg[b] += 1
    kept_types = []
    u0 = path[0]
    if deg[u0] > 1:
        kept_types.append("u")     # the created root is of the first type
        deg[u0] += 1
    else:
        kept_types.append(types[u0])   # u0 itself is the degree-1 root
    for v in deg:
        if deg[v] == 3:
            kept_types.append(types[v])
    return kept_types


def test_weight_placement_counts():
    d = enumerate_diagrams(1, 1)[0]          # two edges: root + loop
    # strict: compositions of n - 2 into two parts >= 1
    assert weight_placement_count(d, 5, strict=True) == math.comb(5 - 3, 1)
    assert weight_placement_count(d, 8, strict=True) == math.comb(8 - 3, 1)
    assert weight_placement_count(d, 3, strict=True) == 0
    # lax: the root edge may carry -1
    assert weight_placement_count(d, 3, strict=False) == math.comb(3, 1)


def test_cl_vert_exact_count_strict_weightings():
    # strict weightings pin the canonical realization uniquely, so the count
    # of labelled paths is the falling factorial of (#V + total weight)
    groups = defaultdict(list)
    for n in (5, 6):
        for p in iter_canonical_strong_paths(1, 2 * n):
            wd = reduce_strong_path(1, p)
            groups[(wd.diagram.key, wd.weights)].append(p)
    strict_groups = [(k, v) for k, v in groups.items() if all(w >= 1 for w in k[1])]
    assert strict_groups, "expected strict weightings at n = 5, 6"
    for (key, weights), members in strict_groups:
        assert len(members) == 1


def test_export_d_table():
    records = export_d_table((1, 2), 2)
    assert {"beta": 1, "s": 1, "count": 1} in records
    assert {"beta": 2, "s": 2, "count": 1} in records
    assert len(records) == 4
