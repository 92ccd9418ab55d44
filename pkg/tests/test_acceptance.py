"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
PASS/FAIL lines.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from conftest import (
    random_distribution,
    random_real_function,
    random_stochastic_instance,
    random_vertex_function,
)
from qgeom.graph import (
    MetricWeights,
    VertexFunction,
    metric_compat_residual,
    two_point_graph,
    two_state_connection,
)
from qgeom.markov import (
    diffusion_step,
    markov_step,
    n_step_path_sum,
    to_transition_matrix,
)
from qgeom.m2 import (
    M2Element,
    build_m2_calculus,
    curvature_m2,
    lift_symmetric,
    metric_g1,
    metric_g2,
    nabla_g_m2,
    qlc_family,
    ricci_m2,
    torsion_m2,
)
from qgeom.m2_search import brute_force_qlc_f2, encode_connection
from qgeom.demorgan import verify_all_digraphs
from qgeom.scalars import GAUSS, GF2_DOMAIN, GaussianRational
from qgeom.schrodinger import (
    currents,
    currents_explicit,
    decompose_step_check,
    norm2,
    norm_drift,
    schrodinger_step,
    two_state_f_step,
    two_state_unitary_family,
)


def report(n: int, passed: bool, detail: str):
    print(f"CRITERION {n}: {'PASS' if passed else 'FAIL'} — {detail}")
    assert passed, f"criterion {n}: {detail}"


def test_criterion_1_markov_diffusion_equivalence():
    rng = random.Random(101)
    t0 = time.time()
    worst = 0.0
    for _ in range(1000):
        calc, w = random_stochastic_instance(rng, max_vertices=8, allow_zero=True)
        chain = to_transition_matrix(w)
        f = random_distribution(rng, calc)
        worst = max(worst, (markov_step(chain, f) - diffusion_step(w, f)).max_abs())
    dt = time.time() - t0
    report(
        1,
        worst < 1e-12 and dt < 10,
        f"1000 graphs |X|<=8, max|chain-diffusion| = {worst:.3e} (<1e-12), "
        f"{dt:.1f}s (<10s)",
    )


def test_criterion_2_path_sum_matrix_power():
    rng = random.Random(102)
    worst = 0.0
    for _ in range(200):
        calc, w = random_stochastic_instance(rng, max_vertices=5, allow_zero=True)
        chain = to_transition_matrix(w)
        n = rng.randint(0, 5)
        x, y = rng.randrange(calc.n_vertices), rng.randrange(calc.n_vertices)
        Pn = np.linalg.matrix_power(chain.matrix, n)
        worst = max(worst, abs(n_step_path_sum(w, x, y, n) - Pn[x, y]))
    report(2, worst < 1e-9, f"200 chains, n<=5, max residual = {worst:.3e} (<1e-9)")


def test_criterion_3_two_state_qlc_exact():
    calc = two_point_graph(GAUSS)
    alphas = [GaussianRational(1, 2), GaussianRational(3, 4), GaussianRational(1, 5)]
    ss = [
        GaussianRational(1),
        GaussianRational(-1),
        GaussianRational(2),
        GaussianRational(-2),
        GaussianRational(0, 1),
        GaussianRational(0, -1),
        GaussianRational(1, 1),
        GaussianRational(Fraction(3), Fraction(-2)),
    ]
    ok = True
    for alpha in alphas:
        w = MetricWeights.from_dict(calc, {(0, 1): alpha, (1, 0): alpha})
        for s in ss:
            conn = two_state_connection(calc, s, GaussianRational(1) / s)
            ok = ok and metric_compat_residual(conn, w) == 0
    # beta != alpha perturbations must fail for every grid point
    for alpha in alphas:
        beta = alpha + GaussianRational(1, 7)
        w = MetricWeights.from_dict(calc, {(0, 1): beta, (1, 0): alpha})
        for s in ss:
            conn = two_state_connection(calc, s, GaussianRational(1) / s)
            ok = ok and metric_compat_residual(conn, w) != 0
    report(
        3,
        ok,
        f"residual exactly 0 on {len(alphas) * len(ss)} (alpha=beta, t=1/s) points, "
        f"nonzero on all beta!=alpha perturbations",
    )


def test_criterion_4_unitary_circle():
    worst = 0.0
    for phi in np.linspace(0, 2 * math.pi, 64, endpoint=False):
        for alpha in np.linspace(1 / 8, 1.0, 8):
            for beta in np.linspace(1 / 8, 1.0, 8):
                U = two_state_unitary_family(float(alpha), float(beta), float(phi)).step.matrix
                worst = max(worst, float(np.max(np.abs(U.conj().T @ U - np.eye(2)))))
    U0 = two_state_unitary_family(0.4, 0.9, 0.0).step.matrix
    id_ok = float(np.max(np.abs(U0 - np.eye(2)))) < 1e-12
    Upi = two_state_unitary_family(0.4, 0.9, math.pi).step.matrix
    swap_ok = float(np.max(np.abs(Upi - np.array([[0, 1], [1, 0]])))) < 1e-12
    vec = np.array([0.6, 0.8j])
    U = two_state_unitary_family(0.35, 0.85, 1.234).step.matrix
    for _ in range(10_000):
        vec = U @ vec
    drift = abs(float(np.sum(np.abs(vec) ** 2)) - 1.0)
    report(
        4,
        worst < 1e-12 and id_ok and swap_ok and drift < 1e-9,
        f"64x8x8 grid max|U+U-I| = {worst:.3e} (<1e-12), phi=0 identity, "
        f"phi=pi swap, 1e4-step norm drift = {drift:.3e} (<1e-9)",
    )


def test_criterion_5_two_state_f_evolution():
    rng = random.Random(105)
    worst = 0.0
    for _ in range(1000):
        phi = rng.uniform(0, 2 * math.pi)
        fam = two_state_unitary_family(rng.uniform(0.1, 1), rng.uniform(0.1, 1), phi)
        vals = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(2)]
        nrm = math.sqrt(sum(abs(v) ** 2 for v in vals))
        psi = VertexFunction.from_values(fam.weights.calc, [v / nrm for v in vals])
        mark, src = two_state_f_step(psi, phi)
        f_new = np.abs(fam.step.matrix @ np.array([complex(v) for v in psi.values])) ** 2
        worst = max(
            worst, abs(f_new[0] - mark[0] - src[0]), abs(f_new[1] - mark[1] - src[1])
        )
    report(
        5,
        worst < 1e-12,
        f"1000 random waves, max||U psi|^2 - (chain + source)| = {worst:.3e} "
        "(<1e-12), source sign frozen at -i/2 (see TWO_STATE_SOURCE_CONSTANT)",
    )


def test_criterion_6_step_decompositions_and_norm_drift():
    rng = random.Random(106)
    worst_dec = worst_drift = worst_dual = 0.0
    for _ in range(1000):
        calc, w = random_stochastic_instance(rng, max_vertices=6, allow_zero=True)
        psi = random_vertex_function(rng, calc)
        V = random_real_function(rng, calc)
        r1, r2 = decompose_step_check(w, V, psi)
        worst_dec = max(worst_dec, r1, r2)
        direct = norm2(schrodinger_step(w, V, psi)) - norm2(psi)
        worst_drift = max(worst_drift, abs(norm_drift(w, V, psi) - direct))
        J1, JV1 = currents(w, psi, V)
        J2, JV2 = currents_explicit(w, psi, V)
        worst_dual = max(worst_dual, (J1 - J2).max_abs(), (JV1 - JV2).max_abs())
    report(
        6,
        worst_dec < 1e-12 and worst_drift < 1e-12 and worst_dual < 1e-12,
        f"1000 instances: decomposition residual {worst_dec:.3e}, norm-drift "
        f"residual {worst_drift:.3e}, per-arrow vs compositional currents "
        f"{worst_dual:.3e} (all <1e-12)",
    )


def test_criterion_7_m2_exact_families_and_test_vectors():
    rng = random.Random(107)
    calc = build_m2_calculus(GAUSS)
    g1, g2 = metric_g1(calc), metric_g2(calc)

    def rq():
        return GaussianRational(
            Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
            Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
        )

    ok = True
    for _ in range(100):
        conn = qlc_family(calc, "g1", (rq(), rq(), rq(), rq()))
        ts, tt = torsion_m2(conn)
        ok = ok and ts.is_zero() and tt.is_zero() and nabla_g_m2(conn, g1).is_zero()
    for _ in range(100):
        conn = qlc_family(calc, "g2", (rq(), rq(), rq()))
        ts, tt = torsion_m2(conn)
        ok = ok and ts.is_zero() and tt.is_zero() and nabla_g_m2(conn, g2).is_zero()
    conn0 = qlc_family(calc, "g2", (0, 0, 0))
    rs, rt = curvature_m2(conn0)
    two = M2Element.scalar(GAUSS, 2)
    one = M2Element.one(GAUSS)
    vec_ok = (rs.X - two).is_zero() and rs.Y.is_zero() and rt.X.is_zero() and (
        rt.Y - two
    ).is_zero()
    ric, scal = ricci_m2(conn0, lift_symmetric(calc), g2)
    vec_ok = (
        vec_ok
        and ric.coeff(0, 1).eq(one)
        and ric.coeff(1, 0).eq(one)
        and ric.coeff(0, 0).is_zero()
        and ric.coeff(1, 1).is_zero()
        and scal.is_zero()
    )
    report(
        7,
        ok and vec_ok,
        "100 exact points per family: torsion = nabla g = 0 exactly; "
        "R s = 2 s^t(x)s, Ricci = s(x)t + t(x)s, S = 0 reproduced exactly",
    )


def test_criterion_8_f2_enumeration():
    t0 = time.time()
    res1 = brute_force_qlc_f2([[0, 1], [1, 0]], "g1")
    res2 = brute_force_qlc_f2([[1, 0], [0, 1]], "g2")
    dt = time.time() - t0
    calc = build_m2_calculus(GF2_DOMAIN)
    named = [
        encode_connection(qlc_family(calc, "g1", (0, 0, 0, 0))),
        encode_connection(qlc_family(calc, "g1", (1, 1, 1, 1))),
        encode_connection(qlc_family(calc, "g1", (1, 1, 0, 0))),
    ]
    ok = dt < 600
    for res in (res1, res2):
        by_bits = {r.bits: r for r in res.records}
        for b in named:
            ok = ok and b in by_bits and by_bits[b].flat
    joint = [
        encode_connection(qlc_family(calc, "g1", (1, 0, 1, 1))),
        encode_connection(qlc_family(calc, "g1", (0, 1, 1, 1))),
    ]
    by1 = {r.bits: r for r in res1.records}
    for b in joint:
        r = by1[b]
        ok = ok and not r.flat
        ok = ok and r.curvature_s == "s^t (x) [(1)s + (1)t]" == r.curvature_t
        ok = ok and r.ricci_plus == "(1)t(x)s + (1)t(x)t"
        ok = ok and r.ricci_minus == "(1)s(x)s + (1)s(x)t"
        ok = ok and r.s_plus == "1" == r.s_minus
        ok = ok and r.two_ricci == "(1)s(x)s + (1)s(x)t + (1)t(x)s + (1)t(x)t"
        ok = ok and r.two_einstein == "(1)s(x)s + (1)t(x)t"
        ok = ok and r.two_einstein_conserved
        ok = ok and b in {q.bits for q in res2.records}
    ok = ok and res1.curved_limit_family_count == 6
    split = [
        r
        for r in res1.records
        if r.from_limit_family and not r.flat and not r.einstein_applicable
    ]
    ok = ok and all({r.s_plus, r.s_minus} == {"E11", "E22"} for r in split)
    ok = ok and res2.curved_limit_family_count == 0
    report(
        8,
        ok,
        f"full 2^24 scans in {dt:.1f}s (<600s); cases (a)-(c) flat for both "
        f"metrics; joint nonflat data reproduced; g1 limit family: "
        f"{res1.curved_limit_family_count} curved (=6), split scalars "
        f"E11/E22 with sum 1; g2 limit family all flat; totals "
        f"g1={res1.qlc_count}, g2={res2.qlc_count} QLCs",
    )


def test_criterion_9_de_morgan_exhaustive():
    t0 = time.time()
    ok = True
    for n in (1, 2, 3):
        ok = ok and verify_all_digraphs(n).ok
    dt = time.time() - t0
    report(
        9,
        ok and dt < 5,
        f"all digraphs on <=3 vertices (64 at n=3), all subsets and one-forms, "
        f"exact arithmetic, {dt:.2f}s (<5s)",
    )


def test_criterion_10_exclusions_documented():
    # The weighted state-diagram example and the dimension-3 classification
    # table are image/external data: nothing in the package hard-codes or
    # asserts them.  Criteria 1-2 and 8 are the property-based substitutes.
    import qgeom.markov as markov_mod
    import qgeom.m2_search as search_mod
    import inspect

    source = inspect.getsource(markov_mod) + inspect.getsource(search_mod)
    ok = "0.6,0.4,0.8,0.2" not in source  # no transcribed diagram weights
    report(
        10,
        ok,
        "excluded figure data is not asserted anywhere; criteria 1-2 and 8 "
        "serve as the property-based substitutes",
    )
