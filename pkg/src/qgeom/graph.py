"""First-order differential calculus on a directed graph.

Functions live on vertices, one-forms on arrows (basis ``w[x->y]``), and
second/third tensor powers on composable arrow chains.  The bimodule rules
are ``f.w[x->y] = f(x) w[x->y]`` and ``w[x->y].f = f(y) w[x->y]``, and the
exterior derivative is the commutator with theta = sum of all arrows:

    df = [theta, f] = sum_{x->y} (f(y) - f(x)) w[x->y].

A metric inner product is given by per-arrow weights p[x->y], paired only
against reversed arrows, which is why metric operations require the graph
to be bidirected.  Weights may vanish (degenerate metric); the metric
*element* g is then built on the nonzero-weight support subgraph only.

Connections are stored by their basis values ``nabla w_a``; the left
Leibniz rule forces part of those values, which is validated at
construction.  The generalised braiding ``sigma`` is recovered from the
connection by solving ``sigma(w_a (x) df) = nabla(w_a.f) - (nabla w_a).f``
as a linear system over the scalar domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .scalars import COMPLEX, Scalar, ScalarDomain

Arrow = Tuple[int, int]


class GraphError(ValueError):
    pass


class SigmaInconsistent(GraphError):
    """No bimodule map satisfies the braiding constraints."""


class SigmaUnderdetermined(GraphError):
    """The constraint span does not pin the braiding uniquely."""


@dataclass(frozen=True)
class GraphCalculus:
    """Directed graph carrying the calculus; vertices indexed 0..n-1.

    ``labels`` keeps user-facing vertex names; arrows are (tail, head)
    index pairs.  Self-arrows are excluded.  ``bidirected`` is validated:
    the reverse of every arrow must be present.
    """

    labels: Tuple[object, ...]
    arrows: Tuple[Arrow, ...]
    bidirected: bool = True
    domain: ScalarDomain = COMPLEX

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise GraphError("duplicate vertex labels")
        seen = set()
        for a in self.arrows:
            x, y = a
            if x == y:
                raise GraphError(f"self-arrow at vertex {self.labels[x]!r}")
            if not (0 <= x < n and 0 <= y < n):
                raise GraphError(f"arrow {a} out of range")
            if a in seen:
                raise GraphError(f"duplicate arrow {a}")
            seen.add(a)
        if self.bidirected:
            for (x, y) in self.arrows:
                if (y, x) not in seen:
                    raise GraphError(
                        f"graph flagged bidirected but {self.labels[y]!r}->"
                        f"{self.labels[x]!r} is missing"
                    )

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_arrows(self) -> int:
        return len(self.arrows)

    def arrow_index(self, x: int, y: int) -> int:
        return self._aindex[(x, y)]

    def reverse(self, a: int) -> int:
        x, y = self.arrows[a]
        return self._aindex[(y, x)]

    def out_arrows(self, x: int) -> Tuple[int, ...]:
        return self._out[x]

    def in_arrows(self, x: int) -> Tuple[int, ...]:
        return self._in[x]

    @property
    def composable_pairs(self) -> Tuple[Tuple[int, int], ...]:
        """All (a, b) with head(a) == tail(b); the support of Omega1 (x) Omega1."""
        return self._pairs

    def pair_index(self, a: int, b: int) -> int:
        return self._pindex[(a, b)]

    # Derived lookups are cached on first use; the instance stays logically
    # immutable so sharing across threads is safe.
    @property
    def _aindex(self) -> Dict[Arrow, int]:
        d = self.__dict__.get("_aindex_cache")
        if d is None:
            d = {a: i for i, a in enumerate(self.arrows)}
            self.__dict__["_aindex_cache"] = d
        return d

    @property
    def _out(self):
        d = self.__dict__.get("_out_cache")
        if d is None:
            d = tuple(
                tuple(i for i, (x, _) in enumerate(self.arrows) if x == v)
                for v in range(self.n_vertices)
            )
            self.__dict__["_out_cache"] = d
        return d

    @property
    def _in(self):
        d = self.__dict__.get("_in_cache")
        if d is None:
            d = tuple(
                tuple(i for i, (_, y) in enumerate(self.arrows) if y == v)
                for v in range(self.n_vertices)
            )
            self.__dict__["_in_cache"] = d
        return d

    @property
    def _pairs(self):
        d = self.__dict__.get("_pairs_cache")
        if d is None:
            d = tuple(
                (a, b)
                for a in range(self.n_arrows)
                for b in range(self.n_arrows)
                if self.arrows[a][1] == self.arrows[b][0]
            )
            self.__dict__["_pairs_cache"] = d
        return d

    @property
    def _pindex(self):
        d = self.__dict__.get("_pindex_cache")
        if d is None:
            d = {p: i for i, p in enumerate(self._pairs)}
            self.__dict__["_pindex_cache"] = d
        return d


def complete_bidirected(n: int, domain: ScalarDomain = COMPLEX) -> GraphCalculus:
    arrows = tuple((x, y) for x in range(n) for y in range(n) if x != y)
    return GraphCalculus(tuple(range(n)), arrows, bidirected=True, domain=domain)


def two_point_graph(domain: ScalarDomain = COMPLEX) -> GraphCalculus:
    return GraphCalculus((0, 1), ((0, 1), (1, 0)), bidirected=True, domain=domain)


@dataclass(frozen=True)
class VertexFunction:
    calc: GraphCalculus
    values: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.values) != self.calc.n_vertices:
            raise GraphError("vertex function has wrong length")

    @staticmethod
    def from_values(calc: GraphCalculus, vals: Iterable) -> "VertexFunction":
        dom = calc.domain
        return VertexFunction(calc, tuple(dom.coerce(v) for v in vals))

    @staticmethod
    def constant(calc: GraphCalculus, c) -> "VertexFunction":
        return VertexFunction.from_values(calc, [c] * calc.n_vertices)

    @staticmethod
    def delta(calc: GraphCalculus, v: int) -> "VertexFunction":
        return VertexFunction.from_values(
            calc, [1 if i == v else 0 for i in range(calc.n_vertices)]
        )

    def __call__(self, v: int) -> Scalar:
        return self.values[v]

    def __add__(self, other: "VertexFunction") -> "VertexFunction":
        return VertexFunction(
            self.calc, tuple(a + b for a, b in zip(self.values, other.values))
        )

    def __sub__(self, other: "VertexFunction") -> "VertexFunction":
        return VertexFunction(
            self.calc, tuple(a - b for a, b in zip(self.values, other.values))
        )

    def __mul__(self, other):
        if isinstance(other, VertexFunction):
            return VertexFunction(
                self.calc, tuple(a * b for a, b in zip(self.values, other.values))
            )
        c = self.calc.domain.coerce(other)
        return VertexFunction(self.calc, tuple(a * c for a in self.values))

    __rmul__ = __mul__

    def conj(self) -> "VertexFunction":
        dom = self.calc.domain
        return VertexFunction(self.calc, tuple(dom.conj(a) for a in self.values))

    def is_zero(self) -> bool:
        dom = self.calc.domain
        return all(dom.is_zero(a) for a in self.values)

    def max_abs(self) -> float:
        dom = self.calc.domain
        return max((float(dom.abs2(a)) ** 0.5 for a in self.values), default=0.0)


@dataclass(frozen=True)
class OneForm:
    calc: GraphCalculus
    coeffs: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.calc.n_arrows:
            raise GraphError("one-form has wrong length")

    @staticmethod
    def zero(calc: GraphCalculus) -> "OneForm":
        return OneForm(calc, (calc.domain.zero,) * calc.n_arrows)

    @staticmethod
    def basis(calc: GraphCalculus, a: int) -> "OneForm":
        dom = calc.domain
        return OneForm(
            calc, tuple(dom.one if i == a else dom.zero for i in range(calc.n_arrows))
        )

    @staticmethod
    def from_dict(calc: GraphCalculus, d: Dict[Arrow, object]) -> "OneForm":
        dom = calc.domain
        coeffs = [dom.zero] * calc.n_arrows
        for arrow, c in d.items():
            coeffs[calc.arrow_index(*arrow)] = dom.coerce(c)
        return OneForm(calc, tuple(coeffs))

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.calc, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.calc, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, scalar):
        c = self.calc.domain.coerce(scalar)
        return OneForm(self.calc, tuple(a * c for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self):
        return OneForm(self.calc, tuple(-a for a in self.coeffs))

    def left_action(self, f: VertexFunction) -> "OneForm":
        """f.w — multiply each coefficient by f at the arrow tail."""
        return OneForm(
            self.calc,
            tuple(
                f.values[self.calc.arrows[a][0]] * c for a, c in enumerate(self.coeffs)
            ),
        )

    def right_action(self, f: VertexFunction) -> "OneForm":
        """w.f — multiply each coefficient by f at the arrow head."""
        return OneForm(
            self.calc,
            tuple(
                c * f.values[self.calc.arrows[a][1]] for a, c in enumerate(self.coeffs)
            ),
        )

    def star(self) -> "OneForm":
        """w[x->y]* = -w[y->x], with coefficients conjugated."""
        dom = self.calc.domain
        out = [dom.zero] * self.calc.n_arrows
        for a, c in enumerate(self.coeffs):
            out[self.calc.reverse(a)] = -dom.conj(c)
        return OneForm(self.calc, tuple(out))

    def is_zero(self) -> bool:
        dom = self.calc.domain
        return all(dom.is_zero(c) for c in self.coeffs)

    def max_abs(self) -> float:
        dom = self.calc.domain
        return max((float(dom.abs2(c)) ** 0.5 for c in self.coeffs), default=0.0)


@dataclass(frozen=True)
class TensorSquare:
    """Element of Omega1 (x)_A Omega1: coefficients on composable arrow pairs."""

    calc: GraphCalculus
    coeffs: Tuple[Scalar, ...]  # aligned with calc.composable_pairs

    def __post_init__(self):
        if len(self.coeffs) != len(self.calc.composable_pairs):
            raise GraphError("tensor-square has wrong length")

    @staticmethod
    def zero(calc: GraphCalculus) -> "TensorSquare":
        return TensorSquare(calc, (calc.domain.zero,) * len(calc.composable_pairs))

    @staticmethod
    def from_dict(calc: GraphCalculus, d: Dict[Tuple[Arrow, Arrow], object]) -> "TensorSquare":
        dom = calc.domain
        coeffs = [dom.zero] * len(calc.composable_pairs)
        for (a1, a2), c in d.items():
            i = calc.pair_index(calc.arrow_index(*a1), calc.arrow_index(*a2))
            coeffs[i] = dom.coerce(c)
        return TensorSquare(calc, tuple(coeffs))

    def __add__(self, other: "TensorSquare") -> "TensorSquare":
        return TensorSquare(
            self.calc, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other: "TensorSquare") -> "TensorSquare":
        return TensorSquare(
            self.calc, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __mul__(self, scalar):
        c = self.calc.domain.coerce(scalar)
        return TensorSquare(self.calc, tuple(a * c for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self):
        return TensorSquare(self.calc, tuple(-a for a in self.coeffs))

    def left_action(self, f: VertexFunction) -> "TensorSquare":
        calc = self.calc
        return TensorSquare(
            calc,
            tuple(
                f.values[calc.arrows[p[0]][0]] * c
                for p, c in zip(calc.composable_pairs, self.coeffs)
            ),
        )

    def right_action(self, f: VertexFunction) -> "TensorSquare":
        calc = self.calc
        return TensorSquare(
            calc,
            tuple(
                c * f.values[calc.arrows[p[1]][1]]
                for p, c in zip(calc.composable_pairs, self.coeffs)
            ),
        )

    def dagger(self) -> "TensorSquare":
        """(w (x) e)^dagger = e* (x) w*; basis pairs map to reversed pairs."""
        calc = self.calc
        dom = calc.domain
        out = [dom.zero] * len(calc.composable_pairs)
        for (a, b), c in zip(calc.composable_pairs, self.coeffs):
            # (w_a (x) w_b)^dagger = (-w_rev(b)) (x) (-w_rev(a))
            i = calc.pair_index(calc.reverse(b), calc.reverse(a))
            out[i] = out[i] + dom.conj(c)
        return TensorSquare(calc, tuple(out))

    def is_zero(self) -> bool:
        dom = self.calc.domain
        return all(dom.is_zero(c) for c in self.coeffs)

    def max_abs(self) -> float:
        dom = self.calc.domain
        return max((float(dom.abs2(c)) ** 0.5 for c in self.coeffs), default=0.0)


def tensor_of_forms(w: OneForm, e: OneForm) -> TensorSquare:
    """w (x)_A e, truncated to composable pairs (non-composable terms vanish)."""
    calc = w.calc
    return TensorSquare(
        calc,
        tuple(
            w.coeffs[a] * e.coeffs[b] for (a, b) in calc.composable_pairs
        ),
    )


@dataclass(frozen=True)
class Tensor3:
    """Element of Omega1^(x)3, supported on composable arrow triples."""

    calc: GraphCalculus
    coeffs: Dict[Tuple[int, int, int], Scalar]

    def is_zero(self) -> bool:
        dom = self.calc.domain
        return all(dom.is_zero(c) for c in self.coeffs.values())

    def norm(self):
        """Sum of |coefficient|^2; exact (int/Fraction) on exact domains."""
        dom = self.calc.domain
        total = 0
        for c in self.coeffs.values():
            total = total + dom.abs2(c)
        return total

    def max_abs(self) -> float:
        dom = self.calc.domain
        return max(
            (float(dom.abs2(c)) ** 0.5 for c in self.coeffs.values()), default=0.0
        )


# ---------------------------------------------------------------------------
# First-order operations


def differential(calc: GraphCalculus, f: VertexFunction) -> OneForm:
    """df with coefficient f(head) - f(tail) on every arrow."""
    return OneForm(
        calc, tuple(f.values[y] - f.values[x] for (x, y) in calc.arrows)
    )


def module_action(side: str, f: VertexFunction, w: OneForm) -> OneForm:
    if side == "left":
        return w.left_action(f)
    if side == "right":
        return w.right_action(f)
    raise ValueError("side must be 'left' or 'right'")


def theta(calc: GraphCalculus) -> OneForm:
    return OneForm(calc, (calc.domain.one,) * calc.n_arrows)


@dataclass(frozen=True)
class MetricWeights:
    """Per-arrow metric weights p[x->y]; may vanish, may be asymmetric."""

    calc: GraphCalculus
    weights: Tuple[Scalar, ...]

    def __post_init__(self):
        if not self.calc.bidirected:
            raise GraphError("metric weights require a bidirected graph")
        if len(self.weights) != self.calc.n_arrows:
            raise GraphError("weight vector has wrong length")

    @staticmethod
    def from_dict(calc: GraphCalculus, d: Dict[Arrow, object]) -> "MetricWeights":
        dom = calc.domain
        w = [dom.zero] * calc.n_arrows
        for arrow, c in d.items():
            w[calc.arrow_index(*arrow)] = dom.coerce(c)
        return MetricWeights(calc, tuple(w))

    def weight(self, a: int) -> Scalar:
        return self.weights[a]

    def support(self) -> Tuple[int, ...]:
        dom = self.calc.domain
        return tuple(a for a, p in enumerate(self.weights) if not dom.is_zero(p))


def two_point_weights(alpha, beta, domain: ScalarDomain = COMPLEX) -> Tuple[GraphCalculus, MetricWeights]:
    """The 2-state setup: alpha = p[1->0], beta = p[0->1]."""
    calc = two_point_graph(domain)
    w = MetricWeights.from_dict(calc, {(0, 1): beta, (1, 0): alpha})
    return calc, w


def inner_product(w: MetricWeights, omega: OneForm, eta: OneForm) -> VertexFunction:
    """(omega, eta)(x) = sum_{y: x->y} omega[x->y] eta[y->x] p[y->x]."""
    calc = w.calc
    dom = calc.domain
    vals = []
    for x in range(calc.n_vertices):
        acc = dom.zero
        for a in calc.out_arrows(x):
            r = calc.reverse(a)
            acc = acc + omega.coeffs[a] * eta.coeffs[r] * w.weights[r]
        vals.append(acc)
    return VertexFunction(calc, tuple(vals))


def evaluate_pairing(w: MetricWeights, t: TensorSquare) -> VertexFunction:
    """Apply ( , ) to a tensor square: only reversed pairs contribute."""
    calc = w.calc
    dom = calc.domain
    vals = [dom.zero] * calc.n_vertices
    for (a, b), c in zip(calc.composable_pairs, t.coeffs):
        if b == calc.reverse(a):
            x = calc.arrows[a][0]
            vals[x] = vals[x] + c * w.weights[b]
    return VertexFunction(calc, tuple(vals))


def laplacian_theta(w: MetricWeights, f: VertexFunction) -> VertexFunction:
    """Canonical graph Laplacian: (-Delta f)(x) = sum (f(y)-f(x)) p[y->x]."""
    calc = w.calc
    dom = calc.domain
    vals = []
    for x in range(calc.n_vertices):
        acc = dom.zero
        for a in calc.out_arrows(x):
            y = calc.arrows[a][1]
            acc = acc + (f.values[y] - f.values[x]) * w.weights[calc.reverse(a)]
        vals.append(-acc)
    return VertexFunction(calc, tuple(vals))


def divergence_theta(w: MetricWeights, omega: OneForm) -> VertexFunction:
    """(theta, omega)(x) = sum_{y: x->y} omega[y->x] p[y->x]."""
    return inner_product(w, theta(w.calc), omega)


# ---------------------------------------------------------------------------
# Connections


@dataclass(frozen=True)
class GraphConnection:
    """Left connection given by its basis values nabla w_a.

    Leibniz forces coefficient 1 on every pair (w_b (x) w_a) with
    head(b) = tail(a), and restricts the remaining support to pairs whose
    first arrow leaves tail(a); construction validates this shape.
    """

    calc: GraphCalculus
    basis_values: Tuple[TensorSquare, ...]

    def __post_init__(self):
        calc = self.calc
        dom = calc.domain
        if len(self.basis_values) != calc.n_arrows:
            raise GraphError("connection needs one tensor square per arrow")
        for a, t in enumerate(self.basis_values):
            tail_a = calc.arrows[a][0]
            for (b, c), coef in zip(calc.composable_pairs, t.coeffs):
                if c == a and calc.arrows[b][0] != tail_a:
                    if not dom.eq(coef, dom.one):
                        raise GraphError(
                            f"Leibniz rule forces coefficient 1 on pair {b},{c} "
                            f"of nabla w_{a}"
                        )
                elif calc.arrows[b][0] != tail_a:
                    if not dom.is_zero(coef):
                        raise GraphError(
                            f"Leibniz rule forbids pair {b},{c} in nabla w_{a}"
                        )

    @staticmethod
    def from_free_part(
        calc: GraphCalculus, free: Dict[int, Dict[Tuple[int, int], object]]
    ) -> "GraphConnection":
        """Build a valid connection from the unconstrained coefficients only.

        ``free[a]`` maps composable pairs (b, c) with tail(b) == tail(a) to
        coefficients; the Leibniz-forced part is filled in automatically.
        """
        dom = calc.domain
        values = []
        for a in range(calc.n_arrows):
            coeffs = [dom.zero] * len(calc.composable_pairs)
            tail_a = calc.arrows[a][0]
            for i, (b, c) in enumerate(calc.composable_pairs):
                if c == a and calc.arrows[b][0] != tail_a:
                    coeffs[i] = dom.one
            for (b, c), val in free.get(a, {}).items():
                if calc.arrows[b][0] != tail_a:
                    raise GraphError("free part must have first-arrow tail matching")
                coeffs[calc.pair_index(b, c)] = dom.coerce(val)
            values.append(TensorSquare(calc, tuple(coeffs)))
        return GraphConnection(calc, tuple(values))


def canonical_theta_connection(calc: GraphCalculus) -> GraphConnection:
    """nabla w = theta (x) w, the inner connection with sigma = 0."""
    values = []
    for a in range(calc.n_arrows):
        values.append(tensor_of_forms(theta(calc), OneForm.basis(calc, a)))
    return GraphConnection(calc, tuple(values))


def two_state_connection(calc: GraphCalculus, s, t) -> GraphConnection:
    """The general bimodule connection on the 2-point graph.

    nabla w01 = w10 (x) w01 - s w01 (x) w10,
    nabla w10 = w01 (x) w10 - t w10 (x) w01.
    """
    if calc.n_vertices != 2 or calc.n_arrows != 2:
        raise GraphError("two_state_connection needs the 2-point graph")
    a01 = calc.arrow_index(0, 1)
    a10 = calc.arrow_index(1, 0)
    dom = calc.domain
    s = dom.coerce(s)
    t = dom.coerce(t)
    free = {
        a01: {(a01, a10): -s},
        a10: {(a10, a01): -t},
    }
    return GraphConnection.from_free_part(calc, free)


def connection_apply(conn: GraphConnection, omega: OneForm) -> TensorSquare:
    """nabla applied to a general one-form (scalar-linear in the basis)."""
    calc = conn.calc
    out = TensorSquare.zero(calc)
    for a, c in enumerate(omega.coeffs):
        if not calc.domain.is_zero(c):
            out = out + conn.basis_values[a] * c
    return out


@dataclass(frozen=True)
class SigmaMap:
    """Generalised braiding on Omega1 (x) Omega1.

    ``matrix[p]`` maps composable-pair index p to {pair index: coefficient}
    with identical endpoints (tail of first arrow, head of second).
    """

    calc: GraphCalculus
    matrix: Tuple[Dict[int, Scalar], ...]

    def apply(self, t: TensorSquare) -> TensorSquare:
        calc = self.calc
        dom = calc.domain
        out = [dom.zero] * len(calc.composable_pairs)
        for p, c in enumerate(t.coeffs):
            if dom.is_zero(c):
                continue
            for q, m in self.matrix[p].items():
                out[q] = out[q] + c * m
        return TensorSquare(calc, tuple(out))

    def is_zero(self) -> bool:
        dom = self.calc.domain
        return all(
            dom.is_zero(v) for row in self.matrix for v in row.values()
        )


def _solve_linear(dom: ScalarDomain, rows: List[List[Scalar]], rhs: List[Scalar]):
    """Gaussian elimination over the domain.

    Returns (status, solution) with status in {"ok", "inconsistent",
    "underdetermined"}.  Exact domains pivot on any nonzero entry; the
    float domain uses partial pivoting with the domain tolerance.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    piv_cols = []
    r = 0
    for col in range(n):
        piv = None
        if dom.exact:
            for i in range(r, m):
                if not dom.is_zero(a[i][col]):
                    piv = i
                    break
        else:
            best = dom.eps
            for i in range(r, m):
                v = abs(a[i][col])
                if v > best:
                    best = v
                    piv = i
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = dom.one / a[r][col]
        a[r] = [v * inv for v in a[r]]
        for i in range(m):
            if i != r and not dom.is_zero(a[i][col]):
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not dom.is_zero(a[i][n]):
            return "inconsistent", None
    if len(piv_cols) < n:
        return "underdetermined", None
    x = [dom.zero] * n
    for i, col in enumerate(piv_cols):
        x[col] = a[i][n]
    return "ok", x


def sigma_solve(
    conn: GraphConnection, constraint_order: Optional[Sequence[int]] = None
) -> SigmaMap:
    """Solve for the braiding from sigma(w_a (x) df) = nabla(w_a.f) - (nabla w_a).f.

    One linear system is assembled per arrow a (the constraints never couple
    different first arrows), with delta functions f ranging over vertices.
    ``constraint_order`` permutes the vertex constraints, used to check that
    the solution is order-independent.  Raises SigmaInconsistent when no
    bimodule map exists and SigmaUnderdetermined when the span of
    {w_a (x) df} fails to pin sigma.
    """
    calc = conn.calc
    dom = calc.domain
    pairs = calc.composable_pairs
    vorder = list(range(calc.n_vertices))
    if constraint_order is not None:
        vorder = list(constraint_order)
    matrix: List[Dict[int, Scalar]] = [dict() for _ in pairs]
    for a in range(calc.n_arrows):
        src_pairs = [p for p, (pa, _) in enumerate(pairs) if pa == a]
        if not src_pairs:
            continue
        # unknowns: sigma[p][q] for p in src_pairs, q endpoint-compatible
        unknowns: List[Tuple[int, int]] = []
        for p in src_pairs:
            pa, pb = pairs[p]
            ends = (calc.arrows[pa][0], calc.arrows[pb][1])
            for q, (qa, qb) in enumerate(pairs):
                if (calc.arrows[qa][0], calc.arrows[qb][1]) == ends:
                    unknowns.append((p, q))
        uindex = {u: i for i, u in enumerate(unknowns)}
        rows: List[List[Scalar]] = []
        rhs: List[Scalar] = []
        for v in vorder:
            f = VertexFunction.delta(calc, v)
            lhs_ts = tensor_of_forms(OneForm.basis(calc, a), differential(calc, f))
            target = connection_apply(conn, OneForm.basis(calc, a).right_action(f)) - \
                conn.basis_values[a].right_action(f)
            # one scalar equation per composable pair q
            for q in range(len(pairs)):
                row = [dom.zero] * len(unknowns)
                nonzero = False
                for p in src_pairs:
                    c = lhs_ts.coeffs[p]
                    if dom.is_zero(c):
                        continue
                    key = (p, q)
                    if key in uindex:
                        row[uindex[key]] = row[uindex[key]] + c
                        nonzero = True
                t = target.coeffs[q]
                if nonzero or not dom.is_zero(t):
                    rows.append(row)
                    rhs.append(t)
        status, sol = _solve_linear(dom, rows, rhs)
        if status == "inconsistent":
            raise SigmaInconsistent(f"braiding constraints conflict at arrow {a}")
        if status == "underdetermined":
            raise SigmaUnderdetermined(f"braiding not pinned at arrow {a}")
        for (p, q), i in uindex.items():
            if not dom.is_zero(sol[i]):
                matrix[p][q] = sol[i]
    return SigmaMap(calc, tuple(matrix))


def connection_laplacian(
    conn: GraphConnection, w: MetricWeights, f: VertexFunction
) -> VertexFunction:
    """Delta f = ( , ) nabla df for the given connection and metric."""
    return evaluate_pairing(w, connection_apply(conn, differential(w.calc, f)))


def connection_divergence(
    conn: GraphConnection, w: MetricWeights, omega: OneForm
) -> VertexFunction:
    """nabla . omega = ( , ) nabla omega."""
    return evaluate_pairing(w, connection_apply(conn, omega))


# ---------------------------------------------------------------------------
# Metric element, compatibility, star


def metric_element(w: MetricWeights) -> TensorSquare:
    """g = sum over support arrows of (1/p_a) w_a (x) w_rev(a).

    Requires the nonzero-weight support to be bidirected, otherwise the
    inverse-pairing property fails on the support subgraph.
    """
    calc = w.calc
    dom = calc.domain
    supp = set(w.support())
    for a in supp:
        if calc.reverse(a) not in supp:
            raise GraphError(
                "metric element needs a bidirected nonzero-weight support "
                f"(arrow {calc.arrows[a]} has zero-weight reverse)"
            )
    coeffs = [dom.zero] * len(calc.composable_pairs)
    for a in supp:
        i = calc.pair_index(a, calc.reverse(a))
        coeffs[i] = dom.one / w.weights[a]
    return TensorSquare(calc, tuple(coeffs))


def nabla_tensor_square(
    conn: GraphConnection, sigma: SigmaMap, t: TensorSquare
) -> Tensor3:
    """Extend nabla to Omega1 (x) Omega1 by
    nabla(w (x) e) = nabla w (x) e + (sigma(w (x) .) (x) id) nabla e."""
    calc = conn.calc
    dom = calc.domain
    pairs = calc.composable_pairs
    out: Dict[Tuple[int, int, int], Scalar] = {}

    def add(key, val):
        if key in out:
            out[key] = out[key] + val
        else:
            out[key] = val

    for (a, b), c in zip(pairs, t.coeffs):
        if dom.is_zero(c):
            continue
        # first term: (nabla w_a) (x) w_b, truncated to composable triples
        for (p, q), g in zip(pairs, conn.basis_values[a].coeffs):
            if dom.is_zero(g):
                continue
            if calc.arrows[q][1] == calc.arrows[b][0]:
                add((p, q, b), c * g)
        # second term: sigma(w_a (x) first leg of nabla w_b) (x) second leg
        for (u, v), g in zip(pairs, conn.basis_values[b].coeffs):
            if dom.is_zero(g):
                continue
            if calc.arrows[a][1] != calc.arrows[u][0]:
                continue  # w_a (x) w_u vanishes
            p_in = calc.pair_index(a, u)
            for q, m in sigma.matrix[p_in].items():
                qa, qb = pairs[q]
                if calc.arrows[qb][1] == calc.arrows[v][0]:
                    add((qa, qb, v), c * m * g)
    return Tensor3(calc, out)


def nabla_g(conn: GraphConnection, w: MetricWeights) -> Tensor3:
    sigma = sigma_solve(conn)
    return nabla_tensor_square(conn, sigma, metric_element(w))


def metric_compat_residual(conn: GraphConnection, w: MetricWeights):
    """Norm of nabla g; exactly zero iff the connection is metric compatible."""
    return nabla_g(conn, w).norm()


def star_preserving_check(conn: GraphConnection) -> bool:
    """Whether nabla(w*) == sigma(dagger(nabla w)) on all basis one-forms."""
    calc = conn.calc
    if not calc.domain.conjugable:
        raise GraphError("star-preservation needs a conjugation-capable domain")
    sigma = sigma_solve(conn)
    for a in range(calc.n_arrows):
        lhs = connection_apply(conn, OneForm.basis(calc, a).star())
        rhs = sigma.apply(conn.basis_values[a].dagger())
        if not (lhs - rhs).is_zero():
            return False
    return True
