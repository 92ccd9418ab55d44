"""Quantum Riemannian geometry of 2x2 matrices over a pluggable field.

The calculus has a central one-form basis s, t with

    da = [E12, a] s + [E21, a] t,   s^2 = t^2 = 0,   s ^ t = t ^ s,
    ds = 2 theta ^ s,  dt = 2 theta ^ t,  theta = E12 s + E21 t,

so Omega2 = A.(s^t) and Omega3 = 0.  Over GF(2) the derivative of the basis
vanishes and t = dE12, s = dE21 are exact.  Because the basis is central,
metric coefficients and braiding entries are scalars; connections are two
tensor squares (nabla s, nabla t) with matrix coefficients.  The braiding is
recovered in closed form from the commutator constraints, torsion and
metric compatibility are checked exactly, and curvature feeds the lifted
Ricci contraction whose convention is pinned by the test vectors.

Everything here is exact when the domain is; the complex-float domain is
supported for quick numeric scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .scalars import Scalar, ScalarDomain

S, T = 0, 1  # basis indices


class M2Error(ValueError):
    pass


class M2SigmaInconsistent(M2Error):
    """No bimodule braiding exists for the connection."""


class M2SigmaUnderdetermined(M2Error):
    """Constraint span fails to pin the braiding (not reachable for this
    calculus; kept so callers can handle both failure modes uniformly)."""


@dataclass(frozen=True)
class M2Element:
    """2x2 matrix over the domain, stored row-major."""

    dom: ScalarDomain
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    @staticmethod
    def make(dom: ScalarDomain, a, b, c, d) -> "M2Element":
        return M2Element(dom, dom.coerce(a), dom.coerce(b), dom.coerce(c), dom.coerce(d))

    @staticmethod
    def zero(dom: ScalarDomain) -> "M2Element":
        return M2Element.make(dom, 0, 0, 0, 0)

    @staticmethod
    def one(dom: ScalarDomain) -> "M2Element":
        return M2Element.make(dom, 1, 0, 0, 1)

    @staticmethod
    def unit(dom: ScalarDomain, i: int, j: int) -> "M2Element":
        e = [[0, 0], [0, 0]]
        e[i][j] = 1
        return M2Element.make(dom, e[0][0], e[0][1], e[1][0], e[1][1])

    @staticmethod
    def scalar(dom: ScalarDomain, c) -> "M2Element":
        c = dom.coerce(c)
        return M2Element(dom, c, dom.zero, dom.zero, c)

    def __add__(self, o: "M2Element") -> "M2Element":
        return M2Element(self.dom, self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "M2Element") -> "M2Element":
        return M2Element(self.dom, self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> "M2Element":
        return M2Element(self.dom, -self.a, -self.b, -self.c, -self.d)

    def __mul__(self, o):
        if isinstance(o, M2Element):
            return M2Element(
                self.dom,
                self.a * o.a + self.b * o.c,
                self.a * o.b + self.b * o.d,
                self.c * o.a + self.d * o.c,
                self.c * o.b + self.d * o.d,
            )
        c = self.dom.coerce(o)
        return M2Element(self.dom, self.a * c, self.b * c, self.c * c, self.d * c)

    def __rmul__(self, o):
        c = self.dom.coerce(o)
        return M2Element(self.dom, c * self.a, c * self.b, c * self.c, c * self.d)

    def commutator(self, o: "M2Element") -> "M2Element":
        return self * o - o * self

    def conj_transpose(self) -> "M2Element":
        dc = self.dom.conj
        return M2Element(self.dom, dc(self.a), dc(self.c), dc(self.b), dc(self.d))

    def trace(self) -> Scalar:
        return self.a + self.d

    def is_zero(self) -> bool:
        dz = self.dom.is_zero
        return dz(self.a) and dz(self.b) and dz(self.c) and dz(self.d)

    def is_central(self) -> bool:
        dz = self.dom.is_zero
        return dz(self.b) and dz(self.c) and dz(self.a - self.d)

    def central_scalar(self) -> Scalar:
        if not self.is_central():
            raise M2Error("element is not central")
        return self.a

    def eq(self, o: "M2Element") -> bool:
        return (self - o).is_zero()

    def entries(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)

    def max_abs(self) -> float:
        return max(float(self.dom.abs2(x)) ** 0.5 for x in self.entries())


@dataclass(frozen=True)
class M2Form:
    """One-form c_s s + c_t t with matrix coefficients (basis is central)."""

    cs: M2Element
    ct: M2Element

    def coeff(self, i: int) -> M2Element:
        return self.cs if i == S else self.ct

    def __add__(self, o: "M2Form") -> "M2Form":
        return M2Form(self.cs + o.cs, self.ct + o.ct)

    def __sub__(self, o: "M2Form") -> "M2Form":
        return M2Form(self.cs - o.cs, self.ct - o.ct)

    def __neg__(self) -> "M2Form":
        return M2Form(-self.cs, -self.ct)

    def left_mul(self, a: M2Element) -> "M2Form":
        return M2Form(a * self.cs, a * self.ct)

    def is_zero(self) -> bool:
        return self.cs.is_zero() and self.ct.is_zero()

    def star(self) -> "M2Form":
        """(a s + b t)* = -b* s - a* t, from s* = -t and centrality."""
        return M2Form(-self.ct.conj_transpose(), -self.cs.conj_transpose())


@dataclass(frozen=True)
class M2TensorSquare:
    """Coefficients on s(x)s, s(x)t, t(x)s, t(x)t."""

    coeffs: Tuple[M2Element, M2Element, M2Element, M2Element]

    @staticmethod
    def zero(dom: ScalarDomain) -> "M2TensorSquare":
        z = M2Element.zero(dom)
        return M2TensorSquare((z, z, z, z))

    @staticmethod
    def from_map(d: Dict[Tuple[int, int], M2Element], dom: ScalarDomain) -> "M2TensorSquare":
        z = M2Element.zero(dom)
        cs = [z, z, z, z]
        for (i, j), m in d.items():
            cs[(i << 1) | j] = cs[(i << 1) | j] + m
        return M2TensorSquare(tuple(cs))

    def coeff(self, i: int, j: int) -> M2Element:
        return self.coeffs[(i << 1) | j]

    def __add__(self, o: "M2TensorSquare") -> "M2TensorSquare":
        return M2TensorSquare(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o: "M2TensorSquare") -> "M2TensorSquare":
        return M2TensorSquare(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> "M2TensorSquare":
        return M2TensorSquare(tuple(-a for a in self.coeffs))

    def left_mul(self, m: M2Element) -> "M2TensorSquare":
        return M2TensorSquare(tuple(m * a for a in self.coeffs))

    def right_mul(self, m: M2Element) -> "M2TensorSquare":
        return M2TensorSquare(tuple(a * m for a in self.coeffs))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)

    def dagger(self) -> "M2TensorSquare":
        """(C b_k (x) b_l)^dagger = C* b_{l'} (x) b_{k'} with s' = t, t' = s."""
        dom = self.coeffs[0].dom
        out: Dict[Tuple[int, int], M2Element] = {}
        for i in (S, T):
            for j in (S, T):
                out[(1 - j, 1 - i)] = self.coeff(i, j).conj_transpose()
        return M2TensorSquare.from_map(out, dom)

    def max_abs(self) -> float:
        return max(a.max_abs() for a in self.coeffs)


@dataclass(frozen=True)
class M2TwoForm:
    """Coefficient of the volume form s ^ t."""

    coeff: M2Element

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def __add__(self, o: "M2TwoForm") -> "M2TwoForm":
        return M2TwoForm(self.coeff + o.coeff)

    def __sub__(self, o: "M2TwoForm") -> "M2TwoForm":
        return M2TwoForm(self.coeff - o.coeff)


@dataclass(frozen=True)
class M2CurvatureForm:
    """Element of Omega2 (x) Omega1: s^t (x) (X s + Y t)."""

    X: M2Element
    Y: M2Element

    def leg(self, i: int) -> M2Element:
        return self.X if i == S else self.Y

    def is_zero(self) -> bool:
        return self.X.is_zero() and self.Y.is_zero()


@dataclass(frozen=True)
class M2Tensor3:
    """Coefficients on b_i (x) b_j (x) b_k, index (i<<2)|(j<<1)|k."""

    coeffs: Tuple[M2Element, ...]

    @staticmethod
    def zero(dom: ScalarDomain) -> "M2Tensor3":
        z = M2Element.zero(dom)
        return M2Tensor3((z,) * 8)

    def coeff(self, i: int, j: int, k: int) -> M2Element:
        return self.coeffs[(i << 2) | (j << 1) | k]

    def add_at(self, i: int, j: int, k: int, m: M2Element) -> "M2Tensor3":
        idx = (i << 2) | (j << 1) | k
        cs = list(self.coeffs)
        cs[idx] = cs[idx] + m
        return M2Tensor3(tuple(cs))

    def __sub__(self, o: "M2Tensor3") -> "M2Tensor3":
        return M2Tensor3(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)

    def max_abs(self) -> float:
        return max(a.max_abs() for a in self.coeffs)


class M2Calculus:
    """The 2D calculus on M2 over a chosen scalar domain."""

    def __init__(self, domain: ScalarDomain):
        self.dom = domain
        self.E11 = M2Element.unit(domain, 0, 0)
        self.E12 = M2Element.unit(domain, 0, 1)
        self.E21 = M2Element.unit(domain, 1, 0)
        self.E22 = M2Element.unit(domain, 1, 1)
        self.one = M2Element.one(domain)
        self.zero_el = M2Element.zero(domain)
        self.sigma1 = self.E12 + self.E21
        self.two = M2Element.scalar(domain, domain.coerce(1) + domain.coerce(1))

    def matrix_units(self) -> Tuple[M2Element, ...]:
        return (self.E11, self.E12, self.E21, self.E22)

    def d(self, a: M2Element) -> M2Form:
        """da = [E12, a] s + [E21, a] t."""
        return M2Form(self.E12.commutator(a), self.E21.commutator(a))

    def theta(self) -> M2Form:
        return M2Form(self.E12, self.E21)

    def basis_form(self, i: int) -> M2Form:
        if i == S:
            return M2Form(self.one, self.zero_el)
        return M2Form(self.zero_el, self.one)

    def wedge(self, w: M2Form, e: M2Form) -> M2TwoForm:
        """(a s + b t) ^ (c s + d t) = (a d + b c) s^t."""
        return M2TwoForm(w.cs * e.ct + w.ct * e.cs)

    def wedge_tensor(self, t: M2TensorSquare) -> M2TwoForm:
        """Apply ^ to a tensor square: only mixed slots survive."""
        return M2TwoForm(t.coeff(S, T) + t.coeff(T, S))

    def d_one_form(self, w: M2Form) -> M2TwoForm:
        """d(a s + b t) = ([E21,a] + 2 a E21 + [E12,b] + 2 b E12) s^t."""
        a, b = w.cs, w.ct
        coeff = (
            self.E21.commutator(a)
            + (a * self.E21) * self.two
            + self.E12.commutator(b)
            + (b * self.E12) * self.two
        )
        return M2TwoForm(coeff)

    def d_basis(self, i: int) -> M2TwoForm:
        """ds = 2 E21 s^t, dt = 2 E12 s^t (zero over GF(2))."""
        gen = self.E21 if i == S else self.E12
        return M2TwoForm(self.two * gen)

    def tensor(self, w: M2Form, e: M2Form) -> M2TensorSquare:
        out: Dict[Tuple[int, int], M2Element] = {}
        for i in (S, T):
            for j in (S, T):
                out[(i, j)] = w.coeff(i) * e.coeff(j)
        return M2TensorSquare.from_map(out, self.dom)


def build_m2_calculus(domain: ScalarDomain) -> M2Calculus:
    if domain.kind not in ("complex", "gf2", "gauss"):
        raise M2Error(f"unsupported field {domain.kind!r}")
    return M2Calculus(domain)


# ---------------------------------------------------------------------------
# Metrics


@dataclass(frozen=True)
class M2Metric:
    """Central metric g = sum G[i][j] b_i (x) b_j with scalar coefficients."""

    calc: M2Calculus
    G: Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]
    H: Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]  # inverse pairing
    name: str = ""

    def element(self) -> M2TensorSquare:
        dom = self.calc.dom
        out = {}
        for i in (S, T):
            for j in (S, T):
                out[(i, j)] = M2Element.scalar(dom, self.G[i][j])
        return M2TensorSquare.from_map(out, dom)

    def pair_basis(self, i: int, j: int) -> Scalar:
        return self.H[i][j]

    def pairing(self, t: M2TensorSquare) -> M2Element:
        """( , ) applied slotwise: sum C_ij (b_i, b_j)."""
        dom = self.calc.dom
        acc = M2Element.zero(dom)
        for i in (S, T):
            for j in (S, T):
                acc = acc + t.coeff(i, j) * self.H[i][j]
        return acc

    def quantum_symmetric(self) -> bool:
        return self.calc.wedge_tensor(self.element()).is_zero()

    def is_real(self) -> bool:
        g = self.element()
        return (g.dagger() - g).is_zero()


def metric_m2(calc: M2Calculus, coeffs: Sequence[Sequence], name: str = "") -> M2Metric:
    dom = calc.dom
    G = tuple(tuple(dom.coerce(coeffs[i][j]) for j in (0, 1)) for i in (0, 1))
    det = G[0][0] * G[1][1] - G[0][1] * G[1][0]
    if dom.is_zero(det):
        raise M2Error("metric coefficient matrix is singular")
    inv = dom.one / det
    H = (
        (G[1][1] * inv, -G[0][1] * inv),
        (-G[1][0] * inv, G[0][0] * inv),
    )
    return M2Metric(calc, G, H, name)


def metric_g1(calc: M2Calculus) -> M2Metric:
    """s(x)t - t(x)s, which over GF(2) reads s(x)t + t(x)s."""
    return metric_m2(calc, [[0, 1], [-1, 0]], "g1")


def metric_g2(calc: M2Calculus) -> M2Metric:
    return metric_m2(calc, [[1, 0], [0, 1]], "g2")


# ---------------------------------------------------------------------------
# Connections and braiding


@dataclass(frozen=True)
class M2Connection:
    calc: M2Calculus
    nabla_s: M2TensorSquare
    nabla_t: M2TensorSquare

    def basis_value(self, i: int) -> M2TensorSquare:
        return self.nabla_s if i == S else self.nabla_t

    def apply(self, w: M2Form) -> M2TensorSquare:
        """nabla(a s + b t) = da (x) s + a nabla s + db (x) t + b nabla t."""
        calc = self.calc
        da = calc.d(w.cs)
        db = calc.d(w.ct)
        out = M2TensorSquare.from_map(
            {
                (S, S): da.cs,
                (T, S): da.ct,
                (S, T): db.cs,
                (T, T): db.ct,
            },
            calc.dom,
        )
        return out + self.nabla_s.left_mul(w.cs) + self.nabla_t.left_mul(w.ct)


@dataclass(frozen=True)
class M2Sigma:
    """Braiding with scalar coefficients: entries[(i,j)][(m,n)]."""

    calc: M2Calculus
    entries: Tuple[Tuple[Scalar, ...], ...]  # [4][4], index (i<<1)|j

    def coefficient(self, src: Tuple[int, int], dst: Tuple[int, int]) -> Scalar:
        return self.entries[(src[0] << 1) | src[1]][(dst[0] << 1) | dst[1]]

    def apply(self, t: M2TensorSquare) -> M2TensorSquare:
        dom = self.calc.dom
        z = M2Element.zero(dom)
        out = [z, z, z, z]
        for src in range(4):
            c = t.coeffs[src]
            if c.is_zero():
                continue
            for dst in range(4):
                coef = self.entries[src][dst]
                if not dom.is_zero(coef):
                    out[dst] = out[dst] + c * coef
        return M2TensorSquare(tuple(out))

    def is_minus_flip(self) -> bool:
        dom = self.calc.dom
        for i in (S, T):
            for j in (S, T):
                for m in (S, T):
                    for n in (S, T):
                        want = -dom.one if (m, n) == (j, i) else dom.zero
                        if not dom.eq(self.coefficient((i, j), (m, n)), want):
                            return False
        return True


def sigma_solve_m2(conn: M2Connection) -> M2Sigma:
    """Recover the braiding from sigma(b_i (x) da) = da (x) b_i + [a, nabla b_i].

    Using a = E12 and a = E21 pins sigma on every basis pair (the images of
    dE12, dE21 are invertible multiples of t, s); a = E11 is then a pure
    consistency check.  All coefficients must come out central, otherwise no
    bimodule map exists.
    """
    calc = conn.calc
    dom = calc.dom
    J = calc.E22 - calc.E11  # squares to the identity

    def rhs(a: M2Element, i: int) -> M2TensorSquare:
        da = calc.d(a)
        nb = conn.basis_value(i)
        base = M2TensorSquare.from_map(
            {(S, i): da.cs, (T, i): da.ct}, dom
        )
        comm = M2TensorSquare(tuple(a.commutator(c) for c in nb.coeffs))
        return base + comm

    images: Dict[Tuple[int, int], M2TensorSquare] = {}
    for i in (S, T):
        # b_i (x) dE12 = J (b_i (x) t), so sigma(b_i (x) t) = J . rhs
        images[(i, T)] = rhs(calc.E12, i).left_mul(J)
        # b_i (x) dE21 = -J (b_i (x) s)
        images[(i, S)] = rhs(calc.E21, i).left_mul(-J)

    entries: List[List[Scalar]] = [[dom.zero] * 4 for _ in range(4)]
    for (i, j), img in images.items():
        for m in (S, T):
            for n in (S, T):
                cm = img.coeff(m, n)
                if not cm.is_central():
                    raise M2SigmaInconsistent(
                        "braiding coefficient is not central; no bimodule map"
                    )
                entries[(i << 1) | j][(m << 1) | n] = cm.central_scalar()
    sigma = M2Sigma(calc, tuple(tuple(row) for row in entries))

    # a = E11 consistency: sigma(b_i (x) dE11) must equal its forced value.
    for i in (S, T):
        dE11 = calc.d(calc.E11)  # = -E12 s + E21 t
        lhs = images[(i, S)].left_mul(dE11.cs) + images[(i, T)].left_mul(dE11.ct)
        if not (lhs - rhs(calc.E11, i)).is_zero():
            raise M2SigmaInconsistent("braiding fails the diagonal constraint")
    return sigma


def torsion_m2(conn: M2Connection) -> Tuple[M2TwoForm, M2TwoForm]:
    """(wedge nabla - d) on the basis forms; zero for torsion-free."""
    calc = conn.calc
    return (
        calc.wedge_tensor(conn.nabla_s) - calc.d_basis(S),
        calc.wedge_tensor(conn.nabla_t) - calc.d_basis(T),
    )


def nabla_tensor_square_m2(
    conn: M2Connection, sigma: M2Sigma, t: M2TensorSquare
) -> M2Tensor3:
    """nabla(C b_k (x) b_l) = (dC (x) b_k + C nabla b_k) (x) b_l
    + C (sigma(b_k (x) .) (x) id) nabla b_l, summed over slots."""
    calc = conn.calc
    dom = calc.dom
    out = M2Tensor3.zero(dom)
    for k in (S, T):
        for l in (S, T):
            C = t.coeff(k, l)
            if C.is_zero():
                continue
            dC = calc.d(C)
            out = out.add_at(S, k, l, dC.cs)
            out = out.add_at(T, k, l, dC.ct)
            nb_k = conn.basis_value(k)
            for m in (S, T):
                for n in (S, T):
                    cm = nb_k.coeff(m, n)
                    if not cm.is_zero():
                        out = out.add_at(m, n, l, C * cm)
            nb_l = conn.basis_value(l)
            for m in (S, T):
                for n in (S, T):
                    D = nb_l.coeff(m, n)
                    if D.is_zero():
                        continue
                    for u in (S, T):
                        for v in (S, T):
                            coef = sigma.coefficient((k, m), (u, v))
                            if not dom.is_zero(coef):
                                out = out.add_at(u, v, n, (C * D) * coef)
    return out


def nabla_g_m2(conn: M2Connection, metric: M2Metric) -> M2Tensor3:
    sigma = sigma_solve_m2(conn)
    return nabla_tensor_square_m2(conn, sigma, metric.element())


def curvature_m2(conn: M2Connection) -> Tuple[M2CurvatureForm, M2CurvatureForm]:
    """R_nabla = (d (x) id - id ^ nabla) nabla on each basis form."""
    calc = conn.calc
    dom = calc.dom
    out = []
    for i in (S, T):
        nb = conn.basis_value(i)
        X = M2Element.zero(dom)
        Y = M2Element.zero(dom)
        for k in (S, T):
            for l in (S, T):
                C = nb.coeff(k, l)
                if C.is_zero():
                    continue
                # d(C b_k) = (dC ^ b_k + C db_k) in Omega2
                dC = calc.d(C)
                if k == S:
                    two_form = dC.ct + (C * calc.E21) * calc.two.a
                else:
                    two_form = dC.cs + (C * calc.E12) * calc.two.a
                # id ^ nabla term
                nb_l = conn.basis_value(l)
                for m in (S, T):
                    for n in (S, T):
                        D = nb_l.coeff(m, n)
                        if D.is_zero() or m == k:
                            continue
                        contrib = C * D
                        if n == S:
                            X = X - contrib
                        else:
                            Y = Y - contrib
                if l == S:
                    X = X + two_form
                else:
                    Y = Y + two_form
        out.append(M2CurvatureForm(X, Y))
    return out[0], out[1]


@dataclass(frozen=True)
class Lift:
    """Splitting i: Omega2 -> Omega1 (x) Omega1 with scalar coefficients."""

    calc: M2Calculus
    L: Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]
    name: str = ""

    def __post_init__(self):
        dom = self.calc.dom
        if not dom.eq(self.L[S][T] + self.L[T][S], dom.one):
            raise M2Error("lift does not split the wedge (wedge o i != id)")

    def image(self) -> M2TensorSquare:
        dom = self.calc.dom
        return M2TensorSquare.from_map(
            {
                (i, j): M2Element.scalar(dom, self.L[i][j])
                for i in (S, T)
                for j in (S, T)
            },
            dom,
        )


def lift_plus(calc: M2Calculus) -> Lift:
    return Lift(calc, ((calc.dom.zero, calc.dom.one), (calc.dom.zero, calc.dom.zero)), "i+")


def lift_minus(calc: M2Calculus) -> Lift:
    return Lift(calc, ((calc.dom.zero, calc.dom.zero), (calc.dom.one, calc.dom.zero)), "i-")


def lift_symmetric(calc: M2Calculus) -> Lift:
    dom = calc.dom
    if dom.kind == "gf2":
        raise M2Error("symmetric lift needs 1/2, unavailable over GF(2)")
    half = dom.one / dom.coerce(2)
    return Lift(calc, ((dom.zero, half), (half, dom.zero)), "i_sym")


def ricci_m2(
    conn: M2Connection, lift: Lift, metric: M2Metric
) -> Tuple[M2TensorSquare, M2Element]:
    """Lifted Ricci contraction and its scalar.

    Apply R_nabla to the second leg of g, lift the 2-form and contract the
    first two legs with the inverse pairing:

        Ricci = sum_{i j k l} G_ij H_ik L_kl  b_l (x) r_j,

    where R_nabla b_j = s^t (x) r_j.  S = ( , )(Ricci).  The convention is
    validated against both exact test vectors in the suite.
    """
    calc = conn.calc
    dom = calc.dom
    r = curvature_m2(conn)
    out: Dict[Tuple[int, int], M2Element] = {}
    z = M2Element.zero(dom)
    for l in (S, T):
        for n in (S, T):
            acc = z
            for j in (S, T):
                rj = r[j].leg(n)
                if rj.is_zero():
                    continue
                w = dom.zero
                for i in (S, T):
                    for k in (S, T):
                        w = w + metric.G[i][j] * metric.H[i][k] * lift.L[k][l]
                if not dom.is_zero(w):
                    acc = acc + rj * w
            out[(l, n)] = acc
    ricci = M2TensorSquare.from_map(out, dom)
    return ricci, metric.pairing(ricci)


@dataclass(frozen=True)
class TwoLiftEinstein:
    """Two-lift Ricci/Einstein data; applicable only when S+ == S-."""

    ricci_plus: M2TensorSquare
    ricci_minus: M2TensorSquare
    s_plus: M2Element
    s_minus: M2Element
    applicable: bool
    two_ricci: Optional[M2TensorSquare]
    two_einstein: Optional[M2TensorSquare]
    einstein_conserved: Optional[bool]
    eins_plus: M2TensorSquare
    eins_minus: M2TensorSquare


def two_lift_einstein(conn: M2Connection, metric: M2Metric) -> TwoLiftEinstein:
    """2Ricci = Ricci+ + Ricci- and 2Eins = 2Ricci + g S when the two lifted
    scalars agree; otherwise reports both scalars with the per-lift fallback
    Eins+- = Ricci+- + S+- g."""
    calc = conn.calc
    rp, sp = ricci_m2(conn, lift_plus(calc), metric)
    rm, sm = ricci_m2(conn, lift_minus(calc), metric)
    g = metric.element()
    eins_p = rp + g.left_mul(sp)
    eins_m = rm + g.left_mul(sm)
    if sp.eq(sm):
        two_ricci = rp + rm
        two_eins = two_ricci + g.left_mul(sp)
        sigma = sigma_solve_m2(conn)
        conserved = nabla_tensor_square_m2(conn, sigma, two_eins).is_zero()
        return TwoLiftEinstein(rp, rm, sp, sm, True, two_ricci, two_eins,
                               conserved, eins_p, eins_m)
    return TwoLiftEinstein(rp, rm, sp, sm, False, None, None, None, eins_p, eins_m)


# ---------------------------------------------------------------------------
# The two parametrised torsion-free metric-compatible families


def _antidiag(calc: M2Calculus, top, bottom) -> M2Element:
    dom = calc.dom
    return M2Element.make(dom, 0, top, bottom, 0)


def qlc_family(
    calc: M2Calculus, metric_id: str, params: Sequence
) -> M2Connection:
    """The principal families of quantum Levi-Civita connections.

    metric_id "g1" takes (alpha, beta, mu, nu); "g2" takes (mu, nu, rho).
    Over GF(2) the same formulas reduce (2 = 0, signs collapse) to the
    digital connections, including the flat cases and the curved ones.
    """
    dom = calc.dom
    g1 = M2TensorSquare.from_map(
        {(S, T): M2Element.one(dom), (T, S): -M2Element.one(dom)}, dom
    )
    ss = M2TensorSquare.from_map({(S, S): M2Element.one(dom)}, dom)
    tt = M2TensorSquare.from_map({(T, T): M2Element.one(dom)}, dom)
    ts = M2TensorSquare.from_map({(T, S): M2Element.one(dom)}, dom)
    st = M2TensorSquare.from_map({(S, T): M2Element.one(dom)}, dom)
    theta_s = M2TensorSquare.from_map(
        {(S, S): calc.E12 * calc.two.a, (T, S): calc.E21 * calc.two.a}, dom
    )
    theta_t = M2TensorSquare.from_map(
        {(S, T): calc.E12 * calc.two.a, (T, T): calc.E21 * calc.two.a}, dom
    )
    if metric_id == "g1":
        if len(params) != 4:
            raise M2Error("g1 family needs (alpha, beta, mu, nu)")
        al, be, mu, nu = (dom.coerce(p) for p in params)
        one = dom.one
        M1 = _antidiag(calc, mu * al, be)
        M2_ = _antidiag(calc, al, nu * be)
        M3 = _antidiag(calc, nu * al, nu * nu * be + (mu * nu - one) * al)
        N1 = _antidiag(calc, mu * mu * al + (mu * nu - one) * be, mu * be)
        nabla_s = theta_s - ss.left_mul(M1) - g1.left_mul(M2_) + tt.left_mul(M3)
        nabla_t = theta_t + ss.left_mul(N1) + g1.left_mul(M1) - tt.left_mul(M2_)
        return M2Connection(calc, nabla_s, nabla_t)
    if metric_id == "g2":
        if len(params) != 3:
            raise M2Error("g2 family needs (mu, nu, rho)")
        mu, nu, rho = (dom.coerce(p) for p in params)
        one = dom.one
        two = dom.coerce(2)
        A1 = _antidiag(calc, mu * rho, two * mu - rho * (one + mu * (mu + nu)))
        B1 = _antidiag(calc, -rho, mu * rho)
        C1 = _antidiag(calc, nu * rho, rho)
        D1 = _antidiag(calc, -two * nu + rho * (one + nu * (mu + nu)), nu * rho)
        lead_s = ts.left_mul(calc.E21 * calc.two.a)
        lead_t = st.left_mul(calc.E12 * calc.two.a)
        nabla_s = lead_s + ss.left_mul(A1) + g1.left_mul(B1) + tt.left_mul(C1)
        nabla_t = lead_t + ss.left_mul(B1) - g1.left_mul(C1) + tt.left_mul(D1)
        return M2Connection(calc, nabla_s, nabla_t)
    raise M2Error(f"unknown family {metric_id!r}")


def flat_connection(calc: M2Calculus) -> M2Connection:
    """nabla s = 2 theta (x) s, nabla t = 2 theta (x) t; QLC for all metrics."""
    return qlc_family(calc, "g1", (0, 0, 0, 0))


# ---------------------------------------------------------------------------
# Star checks


@dataclass(frozen=True)
class StarReport:
    metric_real: bool
    connection_star_preserving: bool


def star_checks_m2(conn: M2Connection, metric: M2Metric) -> StarReport:
    """Check g^dagger = g and nabla o * = sigma o dagger o nabla on the basis."""
    calc = conn.calc
    if not calc.dom.conjugable:
        raise M2Error("star checks need a conjugation-capable field")
    sigma = sigma_solve_m2(conn)
    ok = True
    for i in (S, T):
        lhs = conn.apply(calc.basis_form(i).star())
        rhs = sigma.apply(conn.basis_value(i).dagger())
        if not (lhs - rhs).is_zero():
            ok = False
    return StarReport(metric.is_real(), ok)
