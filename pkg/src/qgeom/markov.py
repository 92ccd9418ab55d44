"""Markov chains from stochastic metric weights, and their geometry.

Arrow weights p[x->y] that are nonnegative with out-sums p(x) <= 1 define a
right-stochastic transition matrix P (diagonal 1 - p(x)).  The chain step on
row distributions coincides with the diffusion step

    f_new = f + (-Delta_theta f + (q - p) f)

built from the canonical graph Laplacian of the same weights, which the
tests exercise as an oracle pair.  Tropicalisation trades probabilities for
lengths lambda = -ln p, turning n-step transition sums into path sums and
maximum-probability paths into shortest paths of a Lawvere (asymmetric)
metric.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .graph import (
    GraphCalculus,
    GraphError,
    MetricWeights,
    VertexFunction,
    laplacian_theta,
)


@dataclass(frozen=True)
class StochasticReport:
    ok: bool
    violations: Tuple[str, ...]


def validate_stochastic(w: MetricWeights, tol: float = 1e-12) -> StochasticReport:
    """Check weights >= 0 and out-sum p(x) <= 1 at every vertex."""
    calc = w.calc
    violations: List[str] = []
    for a, (x, y) in enumerate(calc.arrows):
        p = complex(w.weights[a])
        if abs(p.imag) > tol or p.real < -tol:
            violations.append(
                f"arrow {calc.labels[x]!r}->{calc.labels[y]!r}: weight {p} "
                "is not a nonnegative real"
            )
    for x in range(calc.n_vertices):
        s = sum(complex(w.weights[a]).real for a in calc.out_arrows(x))
        if s > 1 + tol:
            violations.append(
                f"vertex {calc.labels[x]!r}: outgoing weight sum {s:.6g} exceeds 1"
            )
    return StochasticReport(not violations, tuple(violations))


@dataclass(frozen=True)
class MarkovChain:
    """Right-stochastic matrix P[x, y] with off-diagonal entries on arrows."""

    calc: GraphCalculus
    matrix: np.ndarray
    weights: MetricWeights

    def __post_init__(self):
        n = self.calc.n_vertices
        if self.matrix.shape != (n, n):
            raise GraphError("transition matrix has wrong shape")


def to_transition_matrix(w: MetricWeights) -> MarkovChain:
    report = validate_stochastic(w)
    if not report.ok:
        raise GraphError("weights are not stochastic: " + "; ".join(report.violations))
    calc = w.calc
    n = calc.n_vertices
    P = np.zeros((n, n), dtype=float)
    for a, (x, y) in enumerate(calc.arrows):
        P[x, y] = complex(w.weights[a]).real
    for x in range(n):
        P[x, x] = 1.0 - P[x].sum()
    return MarkovChain(calc, P, w)


def markov_step(chain: MarkovChain, f: VertexFunction) -> VertexFunction:
    """f_new(x) = sum_y f(y) P[y, x]; preserves the total mass."""
    vec = np.array([complex(v).real for v in f.values])
    out = vec @ chain.matrix
    return VertexFunction.from_values(chain.calc, out.tolist())


def p_q(w: MetricWeights) -> Tuple[VertexFunction, VertexFunction]:
    """Out-sum p(x) and reverse-sum q(x) = sum_{y: x->y} p[y->x]."""
    calc = w.calc
    dom = calc.domain
    pv, qv = [], []
    for x in range(calc.n_vertices):
        ps = dom.zero
        qs = dom.zero
        for a in calc.out_arrows(x):
            ps = ps + w.weights[a]
            qs = qs + w.weights[calc.reverse(a)]
        pv.append(ps)
        qv.append(qs)
    return VertexFunction(calc, tuple(pv)), VertexFunction(calc, tuple(qv))


def diffusion_step(w: MetricWeights, f: VertexFunction) -> VertexFunction:
    """One step of f + (-Delta_theta f + (q - p) f); equals the chain step."""
    p, q = p_q(w)
    minus_lap = VertexFunction(
        w.calc, tuple(-v for v in laplacian_theta(w, f).values)
    )
    return f + minus_lap + (q - p) * f


@dataclass(frozen=True)
class TropicalLengths:
    """Arrow lengths lambda = -ln p plus self-step lengths from 1 - p(x)."""

    calc: GraphCalculus
    arrow_lengths: Tuple[float, ...]
    self_lengths: Tuple[float, ...]

    def length(self, x: int, y: int) -> float:
        if x == y:
            return self.self_lengths[x]
        idx = self.calc._aindex.get((x, y))
        return math.inf if idx is None else self.arrow_lengths[idx]


def tropicalize(w: MetricWeights) -> TropicalLengths:
    report = validate_stochastic(w)
    if not report.ok:
        raise GraphError("weights are not stochastic: " + "; ".join(report.violations))
    calc = w.calc
    arrow_lengths = []
    for a in range(calc.n_arrows):
        p = complex(w.weights[a]).real
        arrow_lengths.append(math.inf if p <= 0 else -math.log(p))
    self_lengths = []
    for x in range(calc.n_vertices):
        stay = 1.0 - sum(complex(w.weights[a]).real for a in calc.out_arrows(x))
        self_lengths.append(math.inf if stay <= 0 else -math.log(stay))
    return TropicalLengths(calc, tuple(arrow_lengths), tuple(self_lengths))


def detropicalize(lengths: TropicalLengths) -> MetricWeights:
    calc = lengths.calc
    w = [math.exp(-l) if l != math.inf else 0.0 for l in lengths.arrow_lengths]
    return MetricWeights(calc, tuple(calc.domain.coerce(v) for v in w))


def n_step_path_sum(w: MetricWeights, x: int, y: int, n: int) -> float:
    """Sum of exp(-lambda(path)) over n-step paths x -> y with self-steps.

    Literal depth-first enumeration over the self-step-extended graph; the
    matrix power (P^n)[x, y] is the independent oracle for this value.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    lengths = tropicalize(w)
    calc = w.calc

    def walk(v: int, steps: int, weight: float) -> float:
        if weight == 0.0:
            return 0.0
        if steps == n:
            return weight if v == y else 0.0
        total = 0.0
        stay = lengths.self_lengths[v]
        if stay != math.inf:
            total += walk(v, steps + 1, weight * math.exp(-stay))
        for a in calc.out_arrows(v):
            lam = lengths.arrow_lengths[a]
            if lam != math.inf:
                total += walk(calc.arrows[a][1], steps + 1, weight * math.exp(-lam))
        return total

    return walk(x, 0, 1.0)


def lawvere_shortest(
    lengths: TropicalLengths, x: int, y: int
) -> Tuple[float, Tuple[object, ...]]:
    """Shortest asymmetric distance d(x, y) >= 0 with a witnessing path.

    Ties broken deterministically: fewest steps, then lexicographically
    smallest vertex index sequence (plain lexicographic order alone is not
    well defined when zero-length cycles exist).  Self-steps never shorten a
    path, so only genuine arrows are searched.  Unreachable targets give
    (inf, ()).
    """
    calc = lengths.calc
    for l in lengths.arrow_lengths:
        if l < 0:
            raise GraphError("Lawvere search requires nonnegative lengths")
    heap = [(0.0, 0, (x,))]
    settled = set()
    while heap:
        dist, steps, path = heapq.heappop(heap)
        v = path[-1]
        if v in settled:
            continue
        settled.add(v)
        if v == y:
            return dist, tuple(calc.labels[i] for i in path)
        for a in calc.out_arrows(v):
            lam = lengths.arrow_lengths[a]
            if lam == math.inf:
                continue
            u = calc.arrows[a][1]
            if u not in settled:
                heapq.heappush(heap, (dist + lam, steps + 1, path + (u,)))
    return math.inf, ()
