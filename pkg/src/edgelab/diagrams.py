"""Diagram census, genus-expansion series, and trace-expectation predictors.

A diagram is a multigraph with one degree-1 root and all other degrees 3,
together with a closed circuit from the root that traverses every edge
exactly twice: for beta = 1 in arbitrary directions, for beta = 2 once in
each direction.  The circuit is non-backtracking, except that for beta = 1 a
self-loop may be rerun immediately.  A diagram reached in s steps has
2s vertices and 3s - 1 edges; D_beta(s) counts the distinct diagrams.

Two independent routes compute the census:

* enumerate_diagrams walks circuits directly: a depth-first search grows the
  traversal sequence with first-occurrence vertex and edge labels, pruning
  on the degree cap, the per-edge traversal cap, and the open-edge budget.
  Each admissible traversal sequence is a distinct diagram (edge copies are
  distinguished by which circuit slots they pair, mirroring the matching
  data of the paths they abstract), so no post-hoc deduplication is needed.
* reduce_strong_path contracts a closed non-backtracking path in which every
  edge appears exactly twice: pair up the two traversals of each edge, add a
  root when the start vertex has degree > 1, erase degree-2 vertices, and
  record erased counts as edge weights.  Classifying exhaustively enumerated
  paths by the reduced canonical form recovers the same census (tests).

Every diagram admits a reduction-preimage whose united degrees are at most
3 (subdivide each edge, two interior vertices on self-loops, one on all but
one copy of a parallel bundle), so capping the path search at degree 3
loses nothing; realize_path builds that witness explicitly.

The genus-expansion series predicts rescaled Chebyshev traces:

    phi_beta(n; N) = (n/4) sum_{s>=1} ((n/2)^3 / N)^(s-1) D_beta(s) / (3s-2)!

and the covariance analogue combines two phi evaluations at the effective
dimensions (M^(-1/2) +- N^(-1/2))^(-2).
"""

from __future__ import annotations

import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache

MAX_STEPS = 5


@dataclass(frozen=True)
class Diagram:
    """Rooted multigraph plus its circuit, in first-occurrence labels.

    circuit is a tuple of (edge_id, tail, head) traversals starting and
    ending at the root vertex 0; edge endpoints are recoverable from the
    first traversal of each id.
    """

    beta: int
    circuit: tuple
    n_vertices: int
    n_edges: int

    @property
    def s(self) -> int:
        return self.n_vertices // 2

    @property
    def key(self) -> tuple:
        return self.circuit

    def edge_endpoints(self) -> list:
        ends = {}
        for e, t, h in self.circuit:
            if e not in ends:
                ends[e] = (t, h)
        return [ends[e] for e in range(self.n_edges)]

    def validate(self) -> None:
        deg = Counter()
        trav = Counter()
        first_dir = {}
        prev_edge = None
        pos = 0
        for e, t, h in self.circuit:
            if t != pos:
                raise ValueError("circuit is not connected at the tail")
            pos = h
            trav[e] += 1
            if e not in first_dir:
                first_dir[e] = (t, h)
                deg[t] += 1
                deg[h] += 1
            else:
                ft, fh = first_dir[e]
                if self.beta == 2 and (t, h) != (fh, ft):
                    raise ValueError("beta=2 requires reversed second traversal")
            if prev_edge == e and t != h:
                raise ValueError("circuit backtracks on a non-loop edge")
            if prev_edge == e and t == h and self.beta == 2:
                raise ValueError("beta=2 forbids immediate loop rerun")
            prev_edge = e
        if pos != 0:
            raise ValueError("circuit does not return to the root")
        if any(c != 2 for c in trav.values()):
            raise ValueError("every edge must be traversed exactly twice")
        if deg[0] != 1:
            raise ValueError("root degree must be 1")
        if any(deg[v] != 3 for v in range(1, self.n_vertices)):
            raise ValueError("non-root degrees must all be 3")
        if self.n_edges != 3 * self.s - 1 or self.n_vertices != 2 * self.s:
            raise ValueError("edge/vertex counts off the 3s-1 / 2s pattern")


@dataclass(frozen=True)
class WeightedDiagram:
    diagram: Diagram
    weights: tuple  # per edge id; -1 only on the created root edge

    def total_weight(self) -> int:
        return sum(self.weights)


@dataclass(frozen=True)
class AutomatonState:
    """Thread length and open-loop sizes at one point of the circuit scan."""

    t: int
    loops: tuple


def _enumerate_circuits(beta: int, s: int):
    """Yield every diagram circuit for the given step count, canonically."""
    L = 6 * s - 2
    nv_target, ne_target = 2 * s, 3 * s - 1
    # vertex 0 = root, vertex 1 = first circuit vertex, edge 0 = root edge
    circuit = [(0, 0, 1)]
    deg = [1, 1] + [0] * (nv_target - 2)
    first_dir = {0: (0, 1)}
    trav = [1] + [0] * (ne_target - 1)
    adj = defaultdict(list)  # vertex -> incident edge ids
    adj[0].append(0)
    adj[1].append(0)
    out = []

    def rec(cur, nv, ne, n_open):
        steps = len(circuit)
        if steps == L - 1:
            # the only legal finish: close the root edge from vertex 1
            if cur == 1 and n_open == 1 and trav[0] == 1 and ne == ne_target \
                    and nv == nv_target:
                circuit.append((0, 1, 0))
                d = Diagram(beta=beta, circuit=tuple(circuit),
                            n_vertices=nv, n_edges=ne)
                out.append(d)
                circuit.pop()
            return
        remaining = L - steps
        if n_open > remaining:
            return
        if nv_target - nv > ne_target - ne:
            return
        prev_edge = circuit[-1][0]

        # close an open incident edge (never the root edge before the end)
        for e in adj[cur]:
            if trav[e] != 1 or e == 0:
                continue
            ft, fh = first_dir[e]
            if ft == fh:  # self-loop rerun
                if beta == 2:
                    continue
                nxt = cur
            else:
                nxt = ft if fh == cur else fh
                if nxt == cur:
                    continue
                if beta == 2 and fh != cur:
                    continue  # second traversal must oppose the first
                if prev_edge == e:
                    continue  # non-loop backtrack
            trav[e] = 2
            circuit.append((e, cur, nxt))
            rec(nxt, nv, ne, n_open - 1)
            circuit.pop()
            trav[e] = 1

        if ne == ne_target or deg[cur] >= 3:
            return

        # new edge to an existing non-root vertex
        for x in range(1, nv):
            if x == cur:
                continue
            if deg[x] >= 3:
                continue
            e = ne
            adj[cur].append(e)
            adj[x].append(e)
            deg[cur] += 1
            deg[x] += 1
            first_dir[e] = (cur, x)
            trav[e] = 1
            circuit.append((e, cur, x))
            rec(x, nv, ne + 1, n_open + 1)
            circuit.pop()
            del first_dir[e]
            trav[e] = 0
            deg[cur] -= 1
            deg[x] -= 1
            adj[cur].pop()
            adj[x].pop()

        # new self-loop (beta = 1 only: its rerun would backtrack otherwise)
        if beta == 1 and deg[cur] + 2 <= 3:
            e = ne
            adj[cur].append(e)
            deg[cur] += 2
            first_dir[e] = (cur, cur)
            trav[e] = 1
            circuit.append((e, cur, cur))
            rec(cur, nv, ne + 1, n_open + 1)
            circuit.pop()
            del first_dir[e]
            trav[e] = 0
            deg[cur] -= 2
            adj[cur].pop()

        # new edge to a brand-new vertex
        if nv < nv_target:
            x = nv
            e = ne
            adj[cur].append(e)
            adj[x].append(e)
            deg[cur] += 1
            deg[x] += 1
            first_dir[e] = (cur, x)
            trav[e] = 1
            circuit.append((e, cur, x))
            rec(x, nv + 1, ne + 1, n_open + 1)
            circuit.pop()
            del first_dir[e]
            trav[e] = 0
            deg[cur] -= 1
            deg[x] = 0
            adj[cur].pop()
            adj[x].pop()

    if s >= 1:
        rec(1, 2, 1, 1)
    return out


@lru_cache(maxsize=None)
def enumerate_diagrams(beta: int, s: int) -> tuple:
    """All diagrams with exactly s steps (2s vertices), as a tuple."""
    if beta not in (1, 2):
        raise ValueError("beta must be 1 or 2")
    if not 1 <= s <= MAX_STEPS:
        raise ValueError(f"step count must lie in 1..{MAX_STEPS}")
    diagrams = tuple(_enumerate_circuits(beta, s))
    for d in diagrams:
        d.validate()
    return diagrams


def enumerate_diagrams_by_s(beta: int, s_max: int, k: int = 1):
    """Diagrams grouped by step count; for k > 1, ordered k-tuples whose
    step counts sum to s (circuits are ordered, matching t = 0 hits)."""
    if k == 1:
        return {s: list(enumerate_diagrams(beta, s)) for s in range(1, s_max + 1)}
    out = {}
    for s in range(k, s_max + 1):
        tuples = []
        for comp in _compositions(s, k):
            pools = [enumerate_diagrams(beta, si) for si in comp]
            tuples.extend(_product_tuples(pools))
        out[s] = tuples
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _product_tuples(pools):
    if not pools:
        yield ()
        return
    head, *tail = pools
    for h in head:
        for t in _product_tuples(tail):
            yield (h,) + t


@lru_cache(maxsize=None)
def d_count(beta: int, s: int) -> int:
    """D_beta(s): the number of s-step diagrams."""
    return len(enumerate_diagrams(beta, s))


def d_count_k(beta: int, k: int, s: int) -> int:
    """Number of ordered k-diagrams with s total steps: the sum over
    compositions s_1 + ... + s_k = s of prod D_beta(s_i)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if s < k:
        return 0
    total = 0
    for comp in _compositions(s, k):
        prod = 1
        for si in comp:
            prod *= d_count(beta, si)
            if prod == 0:
                break
        total += prod
    return total


# ---------------------------------------------------------------------------
# the circuit-scan state trajectory (thread + loops)


def state_trajectory(diagram: Diagram) -> list:
    """(t; loops) after every traversal: the once-traversed edges always form
    one path from the root ("thread", t edges) plus disjoint cycles."""
    open_edges = {}
    states = [AutomatonState(0, ())]
    seen = set()
    for e, t, h in diagram.circuit:
        if e in seen:
            del open_edges[e]
        else:
            seen.add(e)
            open_edges[e] = (t, h)
        states.append(_classify_open(open_edges.values()))
    return states


def _classify_open(edges) -> AutomatonState:
    edges = list(edges)
    if not edges:
        return AutomatonState(0, ())
    deg = Counter()
    adjacency = defaultdict(list)
    for i, (a, b) in enumerate(edges):
        deg[a] += 1
        deg[b] += 1
        adjacency[a].append(i)
        adjacency[b].append(i)
    unvisited = set(range(len(edges)))
    t = None
    loops = []
    while unvisited:
        start = next(iter(unvisited))
        comp = [start]
        unvisited.discard(start)
        stackv = [edges[start][0], edges[start][1]]
        compv = set(stackv)
        while stackv:
            v = stackv.pop()
            for i in adjacency[v]:
                if i in unvisited:
                    unvisited.discard(i)
                    comp.append(i)
                    for w in edges[i]:
                        if w not in compv:
                            compv.add(w)
                            stackv.append(w)
        odd = [v for v in compv if deg[v] % 2 == 1]
        if odd:
            if t is not None:
                raise ValueError("open subgraph has two path components")
            t = len(comp)
        else:
            loops.append(len(comp))
    if t is None:
        # a lone open self-loop counts as a cycle component
        raise ValueError("open subgraph lost its thread component")
    return AutomatonState(t, tuple(sorted(loops)))


# ---------------------------------------------------------------------------
# path reduction (the independent census oracle)


def reduce_strong_path(beta: int, path: tuple):
    """Contract a closed strong NBT path (every edge exactly twice, united
    degrees <= 3) to its weighted diagram.

    Returns a WeightedDiagram in the same canonical label space as
    enumerate_diagrams.  Raises if a united degree exceeds 3.
    """
    if path[0] != path[-1]:
        raise ValueError("path must be closed")
    pairs = Counter()
    for j in range(len(path) - 1):
        a, b = path[j], path[j + 1]
        if a == b:
            raise ValueError("strong paths cannot step in place")
        pairs[(min(a, b), max(a, b))] += 1
    if any(c != 2 for c in pairs.values()):
        raise ValueError("every edge must appear exactly twice")
    deg = Counter()
    for (a, b) in pairs:
        deg[a] += 1
        deg[b] += 1
    if any(c > 3 for c in deg.values()):
        raise ValueError("united degree exceeds 3; path needs vertex splitting")

    u0 = path[0]
    if deg[u0] > 1:
        root = ("root",)
        walk = [root] + list(path) + [root]
        root_created = True
        deg[u0] += 1  # the created root edge raises the old start's degree
        deg[root] = 1
    else:
        root = u0
        walk = list(path)
        root_created = False
    kept = {v for v in deg if deg[v] == 3} | {root}

    # split the walk into runs between kept vertices
    runs = []  # (tail, head, interior frozenset)
    tail = walk[0]
    interior = []
    for v in walk[1:]:
        if v in kept:
            runs.append((tail, v, frozenset(interior)))
            tail = v
            interior = []
        else:
            interior.append(v)
    if interior:
        raise ValueError("walk ended inside a run")

    # pair up the two traversals of each diagram edge
    edge_ids = {}
    relabel = {}
    circuit = []

    def canon(v):
        if v not in relabel:
            relabel[v] = len(relabel)
        return relabel[v]

    next_edge = 0
    for (a, b, inner) in runs:
        sig = (frozenset((a, b)), inner)
        if sig in edge_ids:
            e = edge_ids.pop(sig)
        else:
            edge_ids[sig] = next_edge
            e = next_edge
            next_edge += 1
        circuit.append((e, canon(a), canon(b)))
    if edge_ids:
        raise ValueError("unpaired edge runs remain")

    weights = [0] * next_edge
    seen = set()
    idx = 0
    for (a, b, inner) in runs:
        e = circuit[idx][0]
        if e not in seen:
            seen.add(e)
            weights[e] = len(inner)
        idx += 1
    if root_created:
        weights[circuit[0][0]] = -1

    nv = len(relabel)
    diagram = Diagram(beta=beta, circuit=tuple(circuit),
                      n_vertices=nv, n_edges=next_edge)
    return WeightedDiagram(diagram=diagram, weights=tuple(weights))


def minimal_half_length(diagram: Diagram) -> int:
    """Smallest n such that some strong path of length 2n reduces to this
    diagram: one united edge per non-root diagram edge, plus two interior
    vertices on self-loops and one on all but one copy of a parallel bundle."""
    ends = diagram.edge_endpoints()
    n = 0
    bundles = Counter()
    for e, (a, b) in enumerate(ends):
        if e == 0:
            continue  # root edge realises as the created root (weight -1)
        if a == b:
            n += 3  # self-loop: two interior vertices
        else:
            bundles[(min(a, b), max(a, b))] += 1
            n += 1
    for c in bundles.values():
        n += c - 1  # one extra interior vertex on each additional copy
    return n


def realize_path(diagram: Diagram) -> tuple:
    """A concrete strong path witnessing the diagram at its minimal length."""
    ends = diagram.edge_endpoints()
    interiors = {}
    fresh = [0]
    bundles = Counter()

    def new_vertex():
        fresh[0] += 1
        return ("i", fresh[0])

    for e, (a, b) in enumerate(ends):
        if e == 0:
            continue
        if a == b:
            interiors[e] = [new_vertex(), new_vertex()]
        else:
            key = (min(a, b), max(a, b))
            bundles[key] += 1
            interiors[e] = [] if bundles[key] == 1 else [new_vertex()]

    path = []
    seen_dir = {}
    for (e, t, h) in diagram.circuit:
        if e == 0:
            continue  # skip the created root edge
        if not path:
            path.append(t)
        chain = interiors[e]
        if e not in seen_dir:
            seen_dir[e] = (t, h)
            inner = chain
        else:
            # second traversal walks the same interior chain, reversed when
            # the direction is opposite (self-loops keep the rotation)
            inner = chain if (t, h) == seen_dir[e] or t == h \
                else list(reversed(chain))
        path.extend(inner + [h])
    # relabel to integers 1..v in first-occurrence order
    labels = {}
    out = []
    for v in path:
        if v not in labels:
            labels[v] = len(labels) + 1
        out.append(labels[v])
    return tuple(out)


# ---------------------------------------------------------------------------
# counting helpers


def delta_count(m: int, a: int, b: int) -> int:
    """Ordered representations m = m'_1+...+m'_a + m''_1+...+m''_b with the
    m' odd (>= 1) and the m'' even (>= 0): zero unless a = m mod 2, else
    binom((m-a)/2 + a + b - 1, a + b - 1)."""
    if m < 0 or a < 0 or b < 0:
        raise ValueError("arguments must be nonnegative")
    if a + b < 1:
        raise ValueError("need at least one summand (a + b >= 1)")
    if (m - a) % 2:
        return 0
    half = (m - a) // 2
    if half < 0:
        return 0
    return math.comb(half + a + b - 1, a + b - 1)


def vertex_type_split(n: int, s: int, vbar_plus: int):
    """(V_+, V_-) = ((n+2-Vbar_+)/2, (n-2s+Vbar_+)/2), or None when the
    parity Vbar_+ = n (mod 2) fails and the path family is empty."""
    if (vbar_plus - n) % 2:
        return None
    v_plus = (n + 2 - vbar_plus) // 2
    v_minus = (n - 2 * s + vbar_plus) // 2
    assert v_plus + v_minus == n + 1 - s
    return (v_plus, v_minus)


def weight_placement_count(diagram: Diagram, n: int, strict: bool) -> int:
    """Number of weightings with total n - #E: strict demands w >= 1 on every
    edge; lax allows w = -1 on the root edge and w >= 0 elsewhere."""
    ne = diagram.n_edges
    if strict:
        return math.comb(n - ne - 1, ne - 1) if n - ne >= ne else 0
    total = n - ne + 1  # shift the root edge by +1
    if total < 0:
        return 0
    return math.comb(total + ne - 1, ne - 1)


# ---------------------------------------------------------------------------
# the genus-expansion predictor


def phi(beta: int, n: float, N: float, s_max: int = MAX_STEPS) -> float:
    """phi_beta(n; N) = (n/4) sum_s ((n/2)^3/N)^(s-1) D_beta(s)/(3s-2)!.

    Emits a warning when the expansion parameter exceeds 1 or when the last
    retained term still contributes more than 1% of the sum (truncation
    suspect)."""
    if n <= 0 or N <= 0:
        raise ValueError("n and N must be positive")
    x = (n / 2.0) ** 3 / N
    if x > 1.0:
        warnings.warn(
            f"phi expansion parameter (n/2)^3/N = {x:.3g} > 1; "
            "truncated series is unreliable", stacklevel=2)
    total = 0.0
    last = 0.0
    for s in range(1, s_max + 1):
        term = x ** (s - 1) * d_count(beta, s) / math.factorial(3 * s - 2)
        total += term
        last = term
    if total > 0.0 and last > 0.01 * total:
        warnings.warn(
            f"phi truncation at s_max={s_max} leaves a {last/total:.1%} tail term",
            stacklevel=2)
    return 0.25 * n * total


def phi_multi(beta: int, ns, N: float, s_max: int = MAX_STEPS) -> float:
    """phi on a tuple of degrees.  Because k-diagrams are ordered disjoint
    unions, the leading-order multi-trace coefficient factorises; the empty
    tuple gives 1."""
    ns = tuple(ns)
    if not ns:
        return 1.0
    out = 1.0
    for n in ns:
        out *= phi(beta, n, N, s_max)
    return out


@dataclass(frozen=True)
class CovTracePrediction:
    total: float        # predicted E tr Q-normalised trace, times (MN)^(n/2)
    normalized: float   # divided by (MN)^(n/2): the V-trace scale
    degenerate_aspect: bool  # True when M = N forced the one-branch limit


def predict_cov_trace(beta: int, n: int, M: int, N: int,
                      s_max: int = MAX_STEPS) -> CovTracePrediction:
    """Predicted covariance trace sum at degree n:

    (MN)^(n/2) [ (1+sqrt(M/N)) phi_beta(n, (M^-1/2 + N^-1/2)^-2)
               + (-1)^n (1-sqrt(M/N)) phi_beta(n, (M^-1/2 - N^-1/2)^-2) ].

    At M = N the second branch's prefactor vanishes while its effective
    dimension diverges; the returned value keeps only the first branch and
    is flagged degenerate."""
    if not 1 <= M <= N:
        raise ValueError("need 1 <= M <= N")
    ratio = math.sqrt(M / N)
    n_plus = (M ** -0.5 + N ** -0.5) ** -2
    term = (1.0 + ratio) * phi(beta, n, n_plus, s_max)
    degenerate = M == N
    if not degenerate:
        n_minus = (M ** -0.5 - N ** -0.5) ** -2
        term += (-1) ** n * (1.0 - ratio) * phi(beta, n, n_minus, s_max)
    normalized = term
    # assemble the (MN)^(n/2) prefactor in log space: n can be large enough
    # to overflow the direct power even when the product is representable
    if term == 0.0:
        total = 0.0
    else:
        log_total = 0.5 * n * math.log(M * N) + math.log(abs(term))
        total = math.copysign(math.exp(log_total), term) if log_total < 709.0 \
            else math.copysign(math.inf, term)
    return CovTracePrediction(total=total, normalized=normalized,
                              degenerate_aspect=degenerate)


def export_d_table(beta_values=(1, 2), s_max: int = 3) -> list:
    """JSON-ready {beta, s, count} records for the census."""
    return [
        {"beta": b, "s": s, "count": d_count(b, s)}
        for b in beta_values
        for s in range(1, s_max + 1)
    ]
