import cmath
import math
import random

import numpy as np

from conftest import (
    random_real_function,
    random_stochastic_instance,
    random_vertex_function,
)
from qgeom.graph import (
    VertexFunction,
    connection_apply,
    connection_divergence,
    connection_laplacian,
    tensor_of_forms,
    theta,
    two_point_weights,
)
from qgeom.markov import p_q
from qgeom.schrodinger import (
    CIRCLE_CURRENT_CONSTANT,
    TWO_STATE_SOURCE_CONSTANT,
    circle_current,
    continuous_current_identity,
    currents,
    currents_explicit,
    decompose_step_check,
    norm2,
    norm_drift,
    schrodinger_step,
    step_matrix,
    tilde_psi,
    two_state_f_step,
    two_state_step_closed_form,
    two_state_unitary_family,
    unitary_scan,
)


def test_step_with_potential_q_gives_tilde():
    rng = random.Random(30)
    for _ in range(50):
        calc, w = random_stochastic_instance(rng)
        psi = random_vertex_function(rng, calc)
        _, q = p_q(w)
        stepped = schrodinger_step(w, q, psi)
        want = psi + tilde_psi(w, psi) * 1j
        assert (stepped - want).max_abs() < 1e-12


def test_step_of_zero_is_zero():
    calc, w = two_point_weights(0.4, 0.6)
    z = VertexFunction.constant(calc, 0)
    assert schrodinger_step(w, z, z).is_zero()


def test_circle_connection_step_matches_matrix():
    rng = random.Random(31)
    for _ in range(30):
        fam = two_state_unitary_family(
            rng.uniform(0.1, 1), rng.uniform(0.1, 1), rng.uniform(0, 2 * math.pi)
        )
        psi = random_vertex_function(rng, fam.weights.calc)
        stepped = schrodinger_step(fam.weights, fam.V, psi, fam.connection)
        vec = fam.step.matrix @ np.array([complex(v) for v in psi.values])
        assert max(abs(complex(a) - b) for a, b in zip(stepped.values, vec)) < 1e-12


def test_step_matrix_closed_form_and_examples():
    fam = two_state_unitary_family(0.5, 0.5, math.pi)
    assert np.max(np.abs(fam.step.matrix - [[0, 1], [1, 0]])) < 1e-12
    fam0 = two_state_unitary_family(0.3, 0.8, 0.0)
    assert np.max(np.abs(fam0.step.matrix - np.eye(2))) < 1e-12
    assert fam0.s == -1 and fam0.t == -1
    rng = random.Random(32)
    for _ in range(50):
        a, b, phi = rng.uniform(0.1, 1), rng.uniform(0.1, 1), rng.uniform(0, 2 * math.pi)
        fam = two_state_unitary_family(a, b, phi)
        assert np.max(np.abs(fam.step.matrix - two_state_step_closed_form(phi))) < 1e-12


def test_phi_zero_connection_is_two_theta_tensor_theta():
    fam = two_state_unitary_family(0.6, 0.35, 0.0)
    calc = fam.weights.calc
    nth = connection_apply(fam.connection, theta(calc))
    want = tensor_of_forms(theta(calc), theta(calc)) * 2
    assert (nth - want).max_abs() < 1e-12


def test_theta_mode_steps_not_unitary():
    calc, w = two_point_weights(0.5, 0.5)
    V = VertexFunction.constant(calc, 0)
    op = step_matrix(w, V)
    assert not op.unitary


def test_unitarity_grid():
    worst = 0.0
    for phi in np.linspace(0, 2 * math.pi, 64, endpoint=False):
        for alpha in np.linspace(1 / 8, 1.0, 8):
            for beta in np.linspace(1 / 8, 1.0, 8):
                fam = two_state_unitary_family(float(alpha), float(beta), float(phi))
                U = fam.step.matrix
                worst = max(worst, float(np.max(np.abs(U.conj().T @ U - np.eye(2)))))
    assert worst < 1e-12


def test_unitary_scan_helper():
    def family(alpha, beta, phi):
        return two_state_unitary_family(alpha, beta, phi).step

    grid = [(0.5, 0.5, 0.0), (0.25, 0.75, 1.0), (1.0, 1.0, math.pi)]
    out = unitary_scan(family, grid)
    assert all(flag for _, flag in out)


def test_closed_form_consistency_identities():
    for phi in np.linspace(0, 2 * math.pi, 97):
        z = (1 - cmath.exp(1j * phi)) / 2
        assert abs((1 - z) - cmath.exp(1j * phi / 2) * math.cos(phi / 2)) < 1e-12
        assert abs(z + 1j * cmath.exp(1j * phi / 2) * math.sin(phi / 2)) < 1e-12


# ---------------------------------------------------------------------------
# currents and step decompositions


def test_real_wave_kills_first_current_term():
    rng = random.Random(33)
    for _ in range(40):
        calc, w = random_stochastic_instance(rng)
        psi = random_real_function(rng, calc)
        V = random_real_function(rng, calc)
        from qgeom.graph import differential

        dpsi = differential(calc, psi)
        dpsib = differential(calc, psi.conj())
        iterm = (dpsi.right_action(psi.conj()) - dpsib.right_action(psi)) * 1j
        assert iterm.max_abs() < 1e-12


def test_currents_dual_path_oracle():
    rng = random.Random(34)
    worst = 0.0
    for _ in range(1000):
        calc, w = random_stochastic_instance(rng, max_vertices=6, allow_zero=True)
        psi = random_vertex_function(rng, calc)
        V = random_real_function(rng, calc)
        J1, JV1 = currents(w, psi, V)
        J2, JV2 = currents_explicit(w, psi, V)
        worst = max(worst, (J1 - J2).max_abs(), (JV1 - JV2).max_abs())
    assert worst < 1e-12


def test_currents_two_point_sample():
    calc, w = two_point_weights(0.5, 0.5)
    psi = VertexFunction.from_values(calc, [1 / math.sqrt(2), 1j / math.sqrt(2)])
    V = VertexFunction.constant(calc, 0)
    J1, JV1 = currents(w, psi, V)
    J2, JV2 = currents_explicit(w, psi, V)
    assert (J1 - J2).max_abs() < 1e-12
    assert (JV1 - JV2).max_abs() < 1e-12


def test_decompose_step_zero_potential():
    # V = 0: d+ f = -div_theta J exactly
    rng = random.Random(35)
    for _ in range(100):
        calc, w = random_stochastic_instance(rng)
        psi = random_vertex_function(rng, calc)
        V = VertexFunction.constant(calc, 0)
        r1, r2 = decompose_step_check(w, V, psi)
        assert r1 < 1e-12 and r2 < 1e-12


def test_decompose_step_random_instances():
    rng = random.Random(36)
    worst = 0.0
    for _ in range(300):
        calc, w = random_stochastic_instance(rng, allow_zero=True)
        psi = random_vertex_function(rng, calc)
        V = random_real_function(rng, calc)
        r1, r2 = decompose_step_check(w, V, psi)
        worst = max(worst, r1, r2)
    assert worst < 1e-12


def test_norm_drift_formula_vs_direct():
    rng = random.Random(37)
    worst = 0.0
    for _ in range(1000):
        calc, w = random_stochastic_instance(rng, allow_zero=True)
        psi = random_vertex_function(rng, calc)
        V = random_real_function(rng, calc)
        direct = norm2(schrodinger_step(w, V, psi)) - norm2(psi)
        formula = norm_drift(w, V, psi)
        worst = max(worst, abs(formula - direct))
    assert worst < 1e-12


def test_theta_mode_drift_generically_nonzero():
    calc, w = two_point_weights(0.5, 0.5)
    psi = VertexFunction.from_values(calc, [1.0, 0.0])
    V = VertexFunction.constant(calc, 0)
    assert abs(norm_drift(w, V, psi)) > 1e-3


def test_norm_drift_at_potential_q():
    rng = random.Random(38)
    for _ in range(50):
        calc, w = random_stochastic_instance(rng)
        psi = random_vertex_function(rng, calc)
        _, q = p_q(w)
        drift = norm_drift(w, q, psi)
        tp = tilde_psi(w, psi)
        want = 0j
        for x in range(calc.n_vertices):
            tx = complex(tp.values[x])
            cross = complex(psi.values[x]).conjugate() * tx
            want += abs(tx) ** 2 + 1j * (cross - cross.conjugate())
        assert abs(drift - want) < 1e-12


def test_circle_connection_has_zero_drift():
    rng = random.Random(39)
    for _ in range(50):
        fam = two_state_unitary_family(
            rng.uniform(0.1, 1), rng.uniform(0.1, 1), rng.uniform(0, 2 * math.pi)
        )
        psi = random_vertex_function(rng, fam.weights.calc)
        vec = np.array([complex(v) for v in psi.values])
        new = fam.step.matrix @ vec
        assert abs(np.sum(np.abs(new) ** 2) - np.sum(np.abs(vec) ** 2)) < 1e-12


def test_norm_preserved_over_many_steps():
    fam = two_state_unitary_family(0.35, 0.85, 1.234)
    vec = np.array([0.6, 0.8j])
    n0 = float(np.sum(np.abs(vec) ** 2))
    for _ in range(10_000):
        vec = fam.step.matrix @ vec
    assert abs(float(np.sum(np.abs(vec) ** 2)) - n0) < 1e-9


def test_continuous_current_identity():
    rng = random.Random(40)
    for _ in range(200):
        calc, w = random_stochastic_instance(rng, allow_zero=True)
        psi = random_vertex_function(rng, calc)
        V = random_real_function(rng, calc)
        assert continuous_current_identity(w, V, psi) < 1e-12
        # identity does not depend on V
        V2 = random_real_function(rng, calc)
        assert continuous_current_identity(w, V2, psi) < 1e-12


def test_continuous_identity_real_wave_trivial():
    rng = random.Random(41)
    calc, w = random_stochastic_instance(rng)
    psi = random_real_function(rng, calc)
    from qgeom.graph import differential

    J = (
        differential(calc, psi).right_action(psi.conj())
        - differential(calc, psi.conj()).right_action(psi)
    ) * 1j
    assert J.max_abs() < 1e-12


# ---------------------------------------------------------------------------
# the 2-state f-evolution


def test_f_step_delta_wave():
    calc, _ = two_point_weights(0.5, 0.5)
    psi = VertexFunction.from_values(calc, [1.0, 0.0])
    for phi in (0.3, 1.2, 2.9):
        mark, src = two_state_f_step(psi, phi)
        assert src == (0.0, 0.0)
        assert abs(mark[0] - math.cos(phi / 2) ** 2) < 1e-15
        assert abs(mark[1] - math.sin(phi / 2) ** 2) < 1e-15


def test_f_step_oracle_sample():
    calc, _ = two_point_weights(0.5, 0.5)
    psi = VertexFunction.from_values(calc, [1 / math.sqrt(2), 1j / math.sqrt(2)])
    mark, src = two_state_f_step(psi, math.pi / 2)
    f_new = (mark[0] + src[0], mark[1] + src[1])
    assert abs(f_new[0] - 1.0) < 1e-12 and abs(f_new[1]) < 1e-12


def test_f_step_relatively_real_components():
    calc, _ = two_point_weights(0.5, 0.5)
    psi = VertexFunction.from_values(calc, [0.6 * cmath.exp(0.7j), 0.8 * cmath.exp(0.7j)])
    _, src = two_state_f_step(psi, 1.1)
    assert abs(src[0]) < 1e-12 and abs(src[1]) < 1e-12


def test_f_step_matches_evolved_density():
    rng = random.Random(42)
    worst = 0.0
    for _ in range(1000):
        phi = rng.uniform(0, 2 * math.pi)
        fam = two_state_unitary_family(rng.uniform(0.1, 1), rng.uniform(0.1, 1), phi)
        calc = fam.weights.calc
        vals = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(2)]
        nrm = math.sqrt(sum(abs(v) ** 2 for v in vals))
        psi = VertexFunction.from_values(calc, [v / nrm for v in vals])
        mark, src = two_state_f_step(psi, phi)
        vec = fam.step.matrix @ np.array([complex(v) for v in psi.values])
        f_new = np.abs(vec) ** 2
        worst = max(worst, abs(f_new[0] - mark[0] - src[0]), abs(f_new[1] - mark[1] - src[1]))
        # stochasticity facts
        assert abs(mark[0] + mark[1] - sum(abs(complex(v)) ** 2 for v in psi.values)) < 1e-12
        assert abs(src[0] + src[1]) < 1e-15
        assert f_new[0] >= -1e-12 and f_new[1] >= -1e-12
        assert abs(f_new.sum() - 1) < 1e-12
    assert worst < 1e-12


def test_f_step_markov_matrix_doubly_stochastic():
    for phi in (0.4, 1.7, 3.0):
        c2, s2 = math.cos(phi / 2) ** 2, math.sin(phi / 2) ** 2
        M = np.array([[c2, s2], [s2, c2]])
        assert np.allclose(M.sum(axis=0), 1) and np.allclose(M.sum(axis=1), 1)


def test_source_constant_is_the_oracle_fixed_sign():
    assert TWO_STATE_SOURCE_CONSTANT == -0.5j
    # the opposite sign fails the oracle sample
    calc, _ = two_point_weights(0.5, 0.5)
    psi = VertexFunction.from_values(calc, [1 / math.sqrt(2), 1j / math.sqrt(2)])
    phi = math.pi / 2
    mark, _ = two_state_f_step(psi, phi)
    det = complex(psi.values[0]).conjugate() * complex(psi.values[1]) - complex(
        psi.values[1]
    ).conjugate() * complex(psi.values[0])
    flipped = (0.5j * math.sin(phi) * det).real
    fam = two_state_unitary_family(0.5, 0.5, phi)
    vec = fam.step.matrix @ np.array([complex(v) for v in psi.values])
    assert abs((np.abs(vec) ** 2)[0] - (mark[0] + flipped)) > 0.5


def test_circle_f_step_geometric_decomposition():
    # d+ f = (1/2i)(1 - e^{-i phi}) Delta f - div J on the circle family
    rng = random.Random(43)
    for _ in range(200):
        phi = rng.uniform(0, 2 * math.pi)
        fam = two_state_unitary_family(rng.uniform(0.1, 1), rng.uniform(0.1, 1), phi)
        calc, w = fam.weights.calc, fam.weights
        psi = random_vertex_function(rng, calc)
        f = psi.conj() * psi
        vec = fam.step.matrix @ np.array([complex(v) for v in psi.values])
        dpf = [abs(vec[i]) ** 2 - complex(f.values[i]).real for i in range(2)]
        lap_f = connection_laplacian(fam.connection, w, f)
        J = circle_current(psi, phi)
        div = connection_divergence(fam.connection, w, J)
        coeff = (1 - cmath.exp(-1j * phi)) / 2j
        for i in range(2):
            rhs = coeff * complex(lap_f.values[i]) - complex(div.values[i])
            assert abs(dpf[i] - rhs) < 1e-12


def test_circle_current_constant_sign():
    assert CIRCLE_CURRENT_CONSTANT == 0.5j
