"""Boolean power-set calculi on digraphs and their de Morgan duals.

P(X) is the GF(2) ring with product "intersection" and addition
"exclusive or"; one-forms are subsets of the arrow set with the
noncommutative actions

    a . w = arrows of w with tail in a,      w . a = arrows of w with tip in a,
    da    = arrows with one end in a and the other in the complement.

The dual algebra carries "union" as product, "inclusive and"
(a, b) -> (a and b) or neither as addition, and the dual derivative
d-bar a = arrows wholly inside a or wholly inside the complement, which is
exactly the complement of da.  Complementation is verified to intertwine
every operation in degrees 0 and 1, exhaustively on small vertex sets.

Everything is plain int bitmask arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple


class GroundMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SubsetForm:
    """Subset of a ground set as a bitmask; primal ring operations."""

    mask: int
    ground: int  # number of elements in the ground set

    def _check(self, other: "SubsetForm"):
        if self.ground != other.ground:
            raise GroundMismatch("operands live on different ground sets")

    @property
    def full(self) -> int:
        return (1 << self.ground) - 1

    def xor(self, other: "SubsetForm") -> "SubsetForm":
        self._check(other)
        return SubsetForm(self.mask ^ other.mask, self.ground)

    def meet(self, other: "SubsetForm") -> "SubsetForm":
        self._check(other)
        return SubsetForm(self.mask & other.mask, self.ground)

    def complement(self) -> "DualSubsetForm":
        return DualSubsetForm(self.mask ^ self.full, self.ground)


@dataclass(frozen=True)
class DualSubsetForm:
    """The same bitmask under the dual (union / inclusive-and) structure."""

    mask: int
    ground: int

    def _check(self, other: "DualSubsetForm"):
        if self.ground != other.ground:
            raise GroundMismatch("operands live on different ground sets")

    @property
    def full(self) -> int:
        return (1 << self.ground) - 1

    def dual_add(self, other: "DualSubsetForm") -> "DualSubsetForm":
        self._check(other)
        both = self.mask & other.mask
        neither = self.full & ~(self.mask | other.mask)
        return DualSubsetForm(both | neither, self.ground)

    def join(self, other: "DualSubsetForm") -> "DualSubsetForm":
        self._check(other)
        return DualSubsetForm(self.mask | other.mask, self.ground)

    def complement(self) -> SubsetForm:
        return SubsetForm(self.mask ^ self.full, self.ground)


# ---------------------------------------------------------------------------
# Raw bitmask graph actions (n vertices, arrows = (tail, head) pairs)


def d_mask(a: int, arrows: Sequence[Tuple[int, int]]) -> int:
    """Arrows with exactly one end inside a."""
    out = 0
    for i, (x, y) in enumerate(arrows):
        if ((a >> x) & 1) != ((a >> y) & 1):
            out |= 1 << i
    return out


def left_act(a: int, w: int, arrows: Sequence[Tuple[int, int]]) -> int:
    """a . w: arrows of w with tail in a."""
    out = 0
    for i, (x, _) in enumerate(arrows):
        if (w >> i) & 1 and (a >> x) & 1:
            out |= 1 << i
    return out


def right_act(w: int, a: int, arrows: Sequence[Tuple[int, int]]) -> int:
    """w . a: arrows of w with tip in a."""
    out = 0
    for i, (_, y) in enumerate(arrows):
        if (w >> i) & 1 and (a >> y) & 1:
            out |= 1 << i
    return out


def dual_d_mask(a: int, n: int, arrows: Sequence[Tuple[int, int]]) -> int:
    """Arrows wholly in a or wholly in the complement of a."""
    out = 0
    for i, (x, y) in enumerate(arrows):
        ina = ((a >> x) & 1, (a >> y) & 1)
        if ina == (1, 1) or ina == (0, 0):
            out |= 1 << i
    return out


def dual_left_act(a: int, w: int, arrows: Sequence[Tuple[int, int]]) -> int:
    """a u w: arrows of w or with tail in a."""
    out = w
    for i, (x, _) in enumerate(arrows):
        if (a >> x) & 1:
            out |= 1 << i
    return out


def dual_right_act(w: int, a: int, arrows: Sequence[Tuple[int, int]]) -> int:
    """w u a: arrows of w or with tip in a."""
    out = w
    for i, (_, y) in enumerate(arrows):
        if (a >> y) & 1:
            out |= 1 << i
    return out


def boolean_ring_ops(a: SubsetForm, b: SubsetForm) -> dict:
    """The primal and dual binary operations in one bundle."""
    return {
        "xor": a.xor(b),
        "meet": a.meet(b),
        "complement_a": a.complement(),
        "dual_add": a.complement().dual_add(b.complement()),
        "join": a.complement().join(b.complement()),
    }


def graph_form_actions(
    n: int, arrows: Sequence[Tuple[int, int]], a: int, w: int
) -> dict:
    return {
        "left": left_act(a, w, arrows),
        "right": right_act(w, a, arrows),
        "d": d_mask(a, arrows),
        "dual_left": dual_left_act(a, w, arrows),
        "dual_right": dual_right_act(w, a, arrows),
        "dual_d": dual_d_mask(a, n, arrows),
    }


# ---------------------------------------------------------------------------
# Verification suites


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    checks: int
    failures: Tuple[str, ...]


def _all_digraphs(n: int) -> Iterable[Tuple[Tuple[int, int], ...]]:
    slots = [(x, y) for x in range(n) for y in range(n) if x != y]
    for mask in range(1 << len(slots)):
        yield tuple(s for i, s in enumerate(slots) if (mask >> i) & 1)


def _subset_samples(n_bits: int, exhaustive_limit: int, rng: random.Random, count: int):
    if n_bits <= exhaustive_limit:
        return list(range(1 << n_bits))
    return [rng.getrandbits(n_bits) for _ in range(count)]


def verify_calculus_axioms(
    n: int,
    arrows: Sequence[Tuple[int, int]],
    rng: random.Random | None = None,
    sample_count: int = 40,
) -> CheckReport:
    """Ring axioms, bimodule associativity and both Leibniz rules.

    Exhaustive over all subsets and one-forms when the ground sets are
    small (<= 9 bits of choice), randomised with the supplied rng above.
    """
    rng = rng or random.Random(0)
    m = len(arrows)
    vfull = (1 << n) - 1
    afull = (1 << m) - 1
    failures: List[str] = []
    checks = 0
    vsets = _subset_samples(n, 9, rng, sample_count)
    wsets = _subset_samples(m, 9, rng, sample_count)

    def dd(a):
        return d_mask(a, arrows)

    def dbar(a):
        return dual_d_mask(a, n, arrows)

    for a in vsets:
        for b in vsets:
            checks += 4
            if (a & b) != (b & a) or (a ^ b) != (b ^ a):
                failures.append(f"commutativity fails at a={a:b} b={b:b}")
            if a ^ a:
                failures.append(f"characteristic 2 fails at a={a:b}")
            # Leibniz: d(a.b) = (da).b xor a.(db)
            lhs = dd(a & b)
            rhs = right_act(dd(a), b, arrows) ^ left_act(a, dd(b), arrows)
            if lhs != rhs:
                failures.append(f"Leibniz fails at a={a:b} b={b:b}")
            # dual Leibniz: dbar(a u b) = (dbar a) u b  dual-xor  a u (dbar b)
            A, B = a ^ vfull, b ^ vfull
            lhs_d = dbar(A | B)
            t1 = dual_right_act(dbar(A), B, arrows)
            t2 = dual_left_act(A, dbar(B), arrows)
            both = t1 & t2
            neither = afull & ~(t1 | t2)
            if lhs_d != (both | neither):
                failures.append(f"dual Leibniz fails at A={A:b} B={B:b}")
    for a in vsets:
        for b in vsets:
            for w in wsets:
                checks += 2
                if left_act(a, right_act(w, b, arrows), arrows) != right_act(
                    left_act(a, w, arrows), b, arrows
                ):
                    failures.append(
                        f"bimodule associativity fails at a={a:b} w={w:b} b={b:b}"
                    )
                lhs = dual_left_act(a, dual_right_act(w, b, arrows), arrows)
                rhs = dual_right_act(dual_left_act(a, w, arrows), b, arrows)
                if lhs != rhs:
                    failures.append(
                        f"dual bimodule associativity fails a={a:b} w={w:b} b={b:b}"
                    )
    return CheckReport(not failures, checks, tuple(failures[:20]))


def duality_diffeomorphism_check(
    n: int,
    arrows: Sequence[Tuple[int, int]],
    rng: random.Random | None = None,
    sample_count: int = 40,
) -> CheckReport:
    """Complementation intertwines products, additions, actions and d."""
    rng = rng or random.Random(0)
    m = len(arrows)
    vfull = (1 << n) - 1
    afull = (1 << m) - 1
    failures: List[str] = []
    checks = 0
    vsets = _subset_samples(n, 9, rng, sample_count)
    wsets = _subset_samples(m, 9, rng, sample_count)

    for a in vsets:
        ca = a ^ vfull
        checks += 1
        if (d_mask(a, arrows) ^ afull) != dual_d_mask(ca, n, arrows):
            failures.append(f"d-intertwining fails at a={a:b}")
        for b in vsets:
            cb = b ^ vfull
            checks += 2
            if ((a & b) ^ vfull) != (ca | cb):
                failures.append(f"product intertwining fails a={a:b} b={b:b}")
            both = ca & cb
            neither = vfull & ~(ca | cb)
            if ((a ^ b) ^ vfull) != (both | neither):
                failures.append(f"addition intertwining fails a={a:b} b={b:b}")
        for w in wsets:
            cw = w ^ afull
            checks += 2
            if (left_act(a, w, arrows) ^ afull) != dual_left_act(ca, cw, arrows):
                failures.append(f"left-action intertwining fails a={a:b} w={w:b}")
            if (right_act(w, a, arrows) ^ afull) != dual_right_act(cw, ca, arrows):
                failures.append(f"right-action intertwining fails a={a:b} w={w:b}")
    return CheckReport(not failures, checks, tuple(failures[:20]))


def verify_all_digraphs(n: int, rng: random.Random | None = None) -> CheckReport:
    """Run both suites over every digraph on n labelled vertices."""
    rng = rng or random.Random(0)
    checks = 0
    failures: List[str] = []
    for arrows in _all_digraphs(n):
        r1 = verify_calculus_axioms(n, arrows, rng)
        r2 = duality_diffeomorphism_check(n, arrows, rng)
        checks += r1.checks + r2.checks
        failures.extend(r1.failures)
        failures.extend(r2.failures)
    return CheckReport(not failures, checks, tuple(failures[:20]))


# ---------------------------------------------------------------------------
# Unit-interval de Morgan operations


def ui_complement(f: Sequence[float]) -> Tuple[float, ...]:
    return tuple(1.0 - v for v in f)


def ui_oplus(f: Sequence[float], g: Sequence[float]) -> Tuple[float, ...]:
    """f (+) g = 1 - (1-f)(1-g) = f + g - fg, the dual of the product."""
    return tuple(a + b - a * b for a, b in zip(f, g))


def ui_min(f: Sequence[float], g: Sequence[float]) -> Tuple[float, ...]:
    return tuple(min(a, b) for a, b in zip(f, g))


def ui_max(f: Sequence[float], g: Sequence[float]) -> Tuple[float, ...]:
    return tuple(max(a, b) for a, b in zip(f, g))


def ui_heyting_hom(f: Sequence[float], g: Sequence[float]) -> Tuple[float, ...]:
    """Internal hom of the (min, max) structure: 1 where f <= g, else g."""
    return tuple(1.0 if a <= b else b for a, b in zip(f, g))


def ui_mult_hom(f: Sequence[float], g: Sequence[float]) -> Tuple[float, ...]:
    """Internal hom of the multiplicative structure: 1 where f <= g, else g/f."""
    return tuple(1.0 if a <= b else b / a for a, b in zip(f, g))
