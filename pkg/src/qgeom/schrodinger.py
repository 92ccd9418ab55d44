"""Discrete-time Schroedinger evolution on weighted graphs.

The step is ``psi -> psi + i(-Delta psi + V psi)`` with the Laplacian taken
either from the canonical theta-connection of the weights or from a general
bimodule connection.  Compositional probability currents J and J_V decompose
the induced step on f = |psi|^2; a second, per-arrow code path reproduces
them for cross-checking.  A connection is called unitary when its step
operator U preserves sum |psi|^2; for the 2-state graph there is a circle of
such connections, solved in closed form here, whose f-evolution is a doubly
stochastic chain plus a current source built from psi.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from .graph import (
    GraphConnection,
    MetricWeights,
    OneForm,
    VertexFunction,
    connection_laplacian,
    differential,
    divergence_theta,
    inner_product,
    laplacian_theta,
    two_point_weights,
    two_state_connection,
)
from .markov import p_q

WaveFunction = VertexFunction

# Sign of the source term in the 2-state f-evolution, fixed once by expanding
# |U psi|^2 directly (the +i/2 alternative fails that oracle).
TWO_STATE_SOURCE_CONSTANT = -0.5j

# Coefficient of the circle-family probability current, fixed by the same
# oracle so that -div J reproduces the source term.
CIRCLE_CURRENT_CONSTANT = 0.5j


def norm2(psi: WaveFunction) -> float:
    return sum((abs(complex(v)) ** 2 for v in psi.values), 0.0)


def tilde_psi(w: MetricWeights, psi: WaveFunction) -> WaveFunction:
    """psi~(x) = sum_{y: x->y} psi(y) p[y->x]; the reverse-weighted shift."""
    calc = w.calc
    vals = []
    for x in range(calc.n_vertices):
        acc = calc.domain.zero
        for a in calc.out_arrows(x):
            y = calc.arrows[a][1]
            acc = acc + psi.values[y] * w.weights[calc.reverse(a)]
        vals.append(acc)
    return VertexFunction(calc, tuple(vals))


def schrodinger_step(
    w: MetricWeights,
    V: VertexFunction,
    psi: WaveFunction,
    conn: Optional[GraphConnection] = None,
) -> WaveFunction:
    """psi_new = psi + i(-Delta psi + V psi); theta-mode when conn is None."""
    if conn is None:
        lap = laplacian_theta(w, psi)
    else:
        lap = connection_laplacian(conn, w, psi)
    delta = (V * psi - lap) * 1j
    return psi + delta


@dataclass(frozen=True)
class StepOperator:
    matrix: np.ndarray
    unitary: bool
    tol: float


def is_unitary(U: np.ndarray, tol: float = 1e-12) -> bool:
    n = U.shape[0]
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(n))) <= tol)


def step_matrix(
    w: MetricWeights,
    V: VertexFunction,
    conn: Optional[GraphConnection] = None,
    tol: float = 1e-12,
) -> StepOperator:
    """Assemble U column-wise from delta functions; psi_new = U psi."""
    calc = w.calc
    n = calc.n_vertices
    U = np.zeros((n, n), dtype=complex)
    for j in range(n):
        col = schrodinger_step(w, V, VertexFunction.delta(calc, j), conn)
        U[:, j] = [complex(v) for v in col.values]
    return StepOperator(U, is_unitary(U, tol), tol)


def currents(
    w: MetricWeights, psi: WaveFunction, V: VertexFunction
) -> Tuple[OneForm, OneForm]:
    """Probability currents J and J_V, built from module operations only."""
    calc = w.calc
    psib = psi.conj()
    dpsi = differential(calc, psi)
    dpsib = differential(calc, psib)
    lap = laplacian_theta(w, psi)
    lapb = laplacian_theta(w, psib)
    iterm = (dpsi.right_action(psib) - dpsib.right_action(psi)) * 1j
    J = iterm - (dpsi.right_action(lapb) + dpsib.right_action(lap)) * 0.5
    J_V = (
        iterm
        + dpsi.right_action(lapb * (-0.5) + V * psib)
        + dpsib.right_action(lap * (-0.5) + V * psi)
    )
    return J, J_V


def currents_explicit(
    w: MetricWeights, psi: WaveFunction, V: VertexFunction
) -> Tuple[OneForm, OneForm]:
    """Per-arrow closed forms of J and J_V.

    Independent of the compositional path: written out from the arrow data,
    with every shift/weight factor evaluated at the arrow head as the right
    module action dictates.
    """
    calc = w.calc
    _, q = p_q(w)
    tpsi = tilde_psi(w, psi)
    tpsib = tilde_psi(w, psi.conj())
    pj, pjv = [], []
    for (x, y) in calc.arrows:
        px, py = complex(psi.values[x]), complex(psi.values[y])
        bx, by = px.conjugate(), py.conjugate()
        ty, tby = complex(tpsi.values[y]), complex(tpsib.values[y])
        qy = complex(q.values[y])
        fy = (by * py).real
        cross = px * by + bx * py
        j = (
            1j * (bx * py - px * by)
            + 0.5 * (py * tby + by * ty - px * tby - bx * ty)
            - qy * fy
            + 0.5 * qy * cross
        )
        pj.append(j)
        pjv.append(j + complex(V.values[y]) * (2 * fy - cross))
    J = OneForm(calc, tuple(pj))
    J_V = OneForm(calc, tuple(pjv))
    return J, J_V


def decompose_step_check(
    w: MetricWeights, V: VertexFunction, psi: WaveFunction
) -> Tuple[float, float]:
    """Residuals of the two decompositions of d+ f = f_new - f.

    First form:  d+ f = V(-Delta + V)f + V (d psib, d psi) - div_theta J.
    Second form: d+ f = V^2 f - div_theta J_V.
    """
    calc = w.calc
    psib = psi.conj()
    f = psib * psi
    psi_new = schrodinger_step(w, V, psi)
    f_new = psi_new.conj() * psi_new
    dpf = f_new - f
    J, J_V = currents(w, psi, V)
    lap_f = laplacian_theta(w, f)
    grad_term = inner_product(w, differential(calc, psib), differential(calc, psi))
    rhs1 = V * (V * f - lap_f) + V * grad_term - divergence_theta(w, J)
    rhs2 = V * V * f - divergence_theta(w, J_V)
    return (dpf - rhs1).max_abs(), (dpf - rhs2).max_abs()


def norm_drift(w: MetricWeights, V: VertexFunction, psi: WaveFunction) -> complex:
    """Total change of sum |psi|^2 over one theta-mode step, in closed form.

    sum_X [ (V-q)^2 f + (V-q)(psib psi~ + conj) + |psi~|^2
            + i(psib psi~ - conj) ].
    """
    _, q = p_q(w)
    tpsi = tilde_psi(w, psi)
    total = 0j
    for x in range(w.calc.n_vertices):
        v = complex(V.values[x])
        qq = complex(q.values[x])
        px = complex(psi.values[x])
        tx = complex(tpsi.values[x])
        f = abs(px) ** 2
        cross = px.conjugate() * tx
        total += (
            (v - qq) ** 2 * f
            + (v - qq) * (cross + cross.conjugate())
            + abs(tx) ** 2
            + 1j * (cross - cross.conjugate())
        )
    return total


def continuous_current_identity(
    w: MetricWeights, V: VertexFunction, psi: WaveFunction
) -> float:
    """Residual of f' = -div_theta J for the continuous-time flow.

    With psi' = i(-Delta + V)psi and J = i((d psi)psib - (d psib)psi), the
    identity holds exactly on commutative function algebras; the potential
    cancels out of f' = psib' psi + psib psi'.
    """
    calc = w.calc
    psib = psi.conj()
    psidot = (V * psi - laplacian_theta(w, psi)) * 1j
    psibdot = psidot.conj()
    fdot = psibdot * psi + psib * psidot
    dpsi = differential(calc, psi)
    dpsib = differential(calc, psib)
    J = (dpsi.right_action(psib) - dpsib.right_action(psi)) * 1j
    return (fdot + divergence_theta(w, J)).max_abs()


# ---------------------------------------------------------------------------
# The 2-state unitary circle


@dataclass(frozen=True)
class TwoStateUnitary:
    """Closed-form unitary step data on the 2-point graph at angle phi."""

    alpha: float
    beta: float
    phi: float
    s: complex
    t: complex
    z: complex
    V: VertexFunction
    connection: GraphConnection
    weights: MetricWeights
    step: StepOperator


def two_state_unitary_family(alpha: float, beta: float, phi: float) -> TwoStateUnitary:
    """The circle of unitary connections: V = 0, z = (1 - e^{i phi})/2,
    s = -1 - i(1 - e^{i phi})/(2 alpha), t likewise with beta."""
    calc, w = two_point_weights(alpha, beta)
    zz = 1 - cmath.exp(1j * phi)
    z = zz / 2
    s = -1 - 1j * zz / (2 * alpha)
    t = -1 - 1j * zz / (2 * beta)
    conn = two_state_connection(calc, s, t)
    V = VertexFunction.constant(calc, 0)
    op = step_matrix(w, V, conn)
    return TwoStateUnitary(alpha, beta, phi, s, t, z, V, conn, w, op)


def two_state_step_closed_form(phi: float) -> np.ndarray:
    """U = [[1-z, z], [z, 1-z]] with z = (1 - e^{i phi})/2."""
    z = (1 - cmath.exp(1j * phi)) / 2
    return np.array([[1 - z, z], [z, 1 - z]])


def two_state_f_step(
    psi: WaveFunction, phi: float
) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Split |U psi|^2 into a doubly stochastic chain step plus a source.

    markov part: [[cos^2, sin^2], [sin^2, cos^2]](phi/2) applied to f;
    source part: c sin(phi) det(psib (x) psi) (1, -1) with the constant c
    frozen as TWO_STATE_SOURCE_CONSTANT.
    """
    c2 = math.cos(phi / 2) ** 2
    s2 = math.sin(phi / 2) ** 2
    p0, p1 = complex(psi.values[0]), complex(psi.values[1])
    f0, f1 = abs(p0) ** 2, abs(p1) ** 2
    markov = (c2 * f0 + s2 * f1, s2 * f0 + c2 * f1)
    det = p0.conjugate() * p1 - p1.conjugate() * p0
    src = TWO_STATE_SOURCE_CONSTANT * math.sin(phi) * det
    if abs(src.imag) > 1e-9 * max(1.0, abs(src)):
        raise ArithmeticError("source term failed to be real")
    return markov, (src.real, -src.real)


def circle_current(psi: WaveFunction, phi: float) -> OneForm:
    """The circle-family current J = c(1 + e^{-i phi}) det(psib (x) psi)
    (w01 - w10), with the oracle-fixed constant c."""
    calc = psi.calc
    p0, p1 = complex(psi.values[0]), complex(psi.values[1])
    det = p0.conjugate() * p1 - p1.conjugate() * p0
    j01 = CIRCLE_CURRENT_CONSTANT * (1 + cmath.exp(-1j * phi)) * det
    return OneForm.from_dict(calc, {(0, 1): j01, (1, 0): -j01})


def unitary_scan(
    family: Callable[..., StepOperator], grid: Iterable[Tuple], tol: float = 1e-12
) -> List[Tuple[Tuple, bool]]:
    """Evaluate a user-supplied connection family over a parameter grid and
    filter by unitarity of the resulting step operators."""
    out = []
    for params in grid:
        op = family(*params)
        U = op.matrix if isinstance(op, StepOperator) else np.asarray(op)
        out.append((params, is_unitary(U, tol)))
    return out
