"""Shared generators for randomised property tests (seeded, no hypothesis)."""

from __future__ import annotations

import random
from typing import Tuple

from qgeom.graph import GraphCalculus, MetricWeights, VertexFunction
from qgeom.scalars import COMPLEX, ScalarDomain


def random_bidirected_graph(
    rng: random.Random, max_vertices: int = 6, domain: ScalarDomain = COMPLEX
) -> GraphCalculus:
    """Connected-ish bidirected graph with 2..max_vertices vertices."""
    n = rng.randint(2, max_vertices)
    pairs = []
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < 0.75:
                pairs.append((x, y))
    if not pairs:
        pairs = [(0, 1)]
    arrows = []
    for x, y in pairs:
        arrows += [(x, y), (y, x)]
    return GraphCalculus(tuple(range(n)), tuple(arrows), bidirected=True, domain=domain)


def random_stochastic_weights(
    rng: random.Random, calc: GraphCalculus, allow_zero: bool = False
) -> MetricWeights:
    """Weights >= 0 with out-sums strictly below 1."""
    raw = {a: rng.random() + 0.05 for a in calc.arrows}
    if allow_zero:
        for a in calc.arrows:
            if rng.random() < 0.2:
                raw[a] = 0.0
    weights = {}
    for x in range(calc.n_vertices):
        outs = [a for a in calc.arrows if a[0] == x]
        total = sum(raw[a] for a in outs)
        scale = rng.uniform(0.2, 0.95) / total if total > 0 else 0.0
        for a in outs:
            weights[a] = raw[a] * scale
    return MetricWeights.from_dict(calc, weights)


def random_stochastic_instance(
    rng: random.Random, max_vertices: int = 6, allow_zero: bool = False
) -> Tuple[GraphCalculus, MetricWeights]:
    calc = random_bidirected_graph(rng, max_vertices)
    return calc, random_stochastic_weights(rng, calc, allow_zero)


def random_vertex_function(rng: random.Random, calc: GraphCalculus) -> VertexFunction:
    return VertexFunction.from_values(
        calc,
        [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(calc.n_vertices)],
    )


def random_real_function(rng: random.Random, calc: GraphCalculus) -> VertexFunction:
    return VertexFunction.from_values(
        calc, [rng.uniform(-1.5, 1.5) for _ in range(calc.n_vertices)]
    )


def random_distribution(rng: random.Random, calc: GraphCalculus) -> VertexFunction:
    vals = [rng.random() + 1e-3 for _ in range(calc.n_vertices)]
    s = sum(vals)
    return VertexFunction.from_values(calc, [v / s for v in vals])


def random_one_form(rng: random.Random, calc: GraphCalculus):
    from qgeom.graph import OneForm

    return OneForm(
        calc,
        tuple(
            complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(calc.n_arrows)
        ),
    )
