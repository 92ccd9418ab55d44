"""Exhaustive search for quantum Levi-Civita connections on M2 over GF(2).

Torsion pins the mixed tensor slots equal per generator, leaving six matrix
coefficients = 24 bits, i.e. 16^3 candidates per generator and 2^24 in
total.  A connection is packed little-endian as

    bits  0..3   nabla s  coefficient on s(x)s
    bits  4..7   nabla s  pinned coefficient on s(x)t = t(x)s
    bits  8..11  nabla s  coefficient on t(x)t
    bits 12..15  nabla t  coefficient on s(x)s
    bits 16..19  nabla t  pinned coefficient on s(x)t = t(x)s
    bits 20..23  nabla t  coefficient on t(x)t

with each nibble holding a 2x2 matrix as (e11 | e12<<1 | e21<<2 | e22<<3).

Over GF(2) a braiding exists iff all six coefficient matrices are
trace-free (the commutators [E12, C], [E21, C] are then the scalars e21,
e12), so the sigma filter and the metric-compatibility filter are both
plain bit arithmetic, vectorised over candidate ranges with numpy.  The
few survivors are re-verified one by one with the exact machinery before
being reported, so the fast path never stands alone.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Dict, Optional, Sequence, Set, Tuple

import numpy as np

from .m2 import (
    M2Calculus,
    M2Connection,
    M2Element,
    M2Metric,
    M2TensorSquare,
    build_m2_calculus,
    curvature_m2,
    metric_m2,
    nabla_g_m2,
    qlc_family,
    sigma_solve_m2,
    torsion_m2,
    two_lift_einstein,
)
from .scalars import GF2_DOMAIN

TOTAL_CANDIDATES = 1 << 24
_NIBBLE_SHIFTS = (0, 4, 8, 12, 16, 20)  # s_ss, s_p, s_tt, t_ss, t_p, t_tt


def _element_to_nibble(m: M2Element) -> int:
    a, b, c, d = (int(bool(x)) for x in m.entries())
    return a | (b << 1) | (c << 2) | (d << 3)


def _nibble_to_element(calc: M2Calculus, n: int) -> M2Element:
    return M2Element.make(calc.dom, n & 1, (n >> 1) & 1, (n >> 2) & 1, (n >> 3) & 1)


def encode_connection(conn: M2Connection) -> int:
    """Pack a torsion-pinned GF(2) connection into its 24-bit id."""
    if conn.calc.dom.kind != "gf2":
        raise ValueError("encoding is defined over GF(2) only")
    nibbles = []
    for nb in (conn.nabla_s, conn.nabla_t):
        c_st, c_ts = nb.coeff(0, 1), nb.coeff(1, 0)
        if not c_st.eq(c_ts):
            raise ValueError("connection is not torsion-pinned")
        nibbles.extend(
            [_element_to_nibble(nb.coeff(0, 0)),
             _element_to_nibble(c_st),
             _element_to_nibble(nb.coeff(1, 1))]
        )
    bits = 0
    for shift, n in zip(_NIBBLE_SHIFTS, nibbles):
        bits |= n << shift
    return bits


def decode_connection(calc: M2Calculus, bits: int) -> M2Connection:
    ns = [_nibble_to_element(calc, (bits >> s) & 0xF) for s in _NIBBLE_SHIFTS]
    z = M2Element.zero(calc.dom)

    def tensor(c_ss, c_p, c_tt) -> M2TensorSquare:
        return M2TensorSquare((c_ss, c_p, c_p, c_tt))

    return M2Connection(calc, tensor(*ns[:3]), tensor(*ns[3:]))


def _metric_bits(metric_coeffs: Sequence[Sequence[int]]) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    return tuple(tuple(int(metric_coeffs[i][j]) & 1 for j in (0, 1)) for i in (0, 1))


def filter_chunk(start: int, end: int, G: Tuple[Tuple[int, int], Tuple[int, int]]) -> np.ndarray:
    """Ids in [start, end) that admit a braiding and satisfy nabla g = 0."""
    ids = np.arange(start, end, dtype=np.int64)
    # nibble per generator/slot: C[i][kl], kl in {0:ss, 1:st, 2:ts, 3:tt}
    raw = [((ids >> s) & 0xF).astype(np.uint8) for s in _NIBBLE_SHIFTS]
    C = [
        [raw[0], raw[1], raw[1], raw[2]],
        [raw[3], raw[4], raw[4], raw[5]],
    ]
    # braiding exists iff every coefficient is trace-free: e11 == e22
    ok = np.ones(len(ids), dtype=bool)
    for n in (raw[0], raw[1], raw[2], raw[3], raw[4], raw[5]):
        ok &= ((n ^ (n >> 3)) & 1) == 0

    def bit(n: np.ndarray, k: int) -> np.ndarray:
        return (n >> k) & 1

    # sigma[(i,k)] sends (m,n) to delta_{(m,n),(k,i)} + ent_k(C[i][(m,n)])
    # with ent_s = e12 (bit 1) and ent_t = e21 (bit 2).
    def sig(i: int, k: int, m: int, n: int) -> np.ndarray:
        base = 1 if (m, n) == (k, i) else 0
        ent = bit(C[i][(m << 1) | n], 1 if k == 0 else 2)
        return ent ^ base

    bad = np.zeros(len(ids), dtype=np.uint8)
    for m in (0, 1):
        for n in (0, 1):
            for l in (0, 1):
                slot = np.zeros(len(ids), dtype=np.uint8)
                for i in (0, 1):
                    if G[i][l]:
                        slot ^= C[i][(m << 1) | n]
                for i in (0, 1):
                    for j in (0, 1):
                        if not G[i][j]:
                            continue
                        for k in (0, 1):
                            slot ^= C[j][(k << 1) | l] * sig(i, k, m, n)
                bad |= slot
    ok &= bad == 0
    return ids[ok]


def _filter_worker(args) -> np.ndarray:
    return filter_chunk(*args)


@dataclass(frozen=True)
class QLCRecord:
    metric: str
    bits: int
    flat: bool
    nabla_s: str
    nabla_t: str
    curvature_s: str
    curvature_t: str
    ricci_plus: str
    ricci_minus: str
    s_plus: str
    s_minus: str
    einstein_applicable: bool
    two_ricci: Optional[str]
    two_einstein: Optional[str]
    two_einstein_conserved: Optional[bool]
    eins_plus: str
    eins_minus: str
    from_limit_family: bool

    def to_dict(self) -> Dict:
        return {
            "metric": self.metric,
            "bits": f"0x{self.bits:06x}",
            "flat": self.flat,
            "nabla_s": self.nabla_s,
            "nabla_t": self.nabla_t,
            "curvature_s": self.curvature_s,
            "curvature_t": self.curvature_t,
            "ricci_plus": self.ricci_plus,
            "ricci_minus": self.ricci_minus,
            "scalar_plus": self.s_plus,
            "scalar_minus": self.s_minus,
            "einstein_applicable": self.einstein_applicable,
            "two_ricci": self.two_ricci,
            "two_einstein": self.two_einstein,
            "two_einstein_conserved": self.two_einstein_conserved,
            "einstein_plus": self.eins_plus,
            "einstein_minus": self.eins_minus,
            "from_limit_family": self.from_limit_family,
        }


@dataclass(frozen=True)
class EnumerationResult:
    metric: str
    records: Tuple[QLCRecord, ...]
    total_candidates: int
    qlc_count: int
    flat_count: int
    curved_count: int
    limit_family_count: int
    curved_limit_family_count: int

    def summary(self) -> Dict:
        return {
            "metric": self.metric,
            "total_candidates": self.total_candidates,
            "qlc_count": self.qlc_count,
            "flat_count": self.flat_count,
            "curved_count": self.curved_count,
            "limit_family_count": self.limit_family_count,
            "curved_limit_family_count": self.curved_limit_family_count,
        }


# Human-readable rendering of GF(2) matrix coefficients -------------------

_UNIT_NAMES = {(0, 0): "E11", (0, 1): "E12", (1, 0): "E21", (1, 1): "E22"}
_BASIS2 = {0: "s(x)s", 1: "s(x)t", 2: "t(x)s", 3: "t(x)t"}


def _fmt_element(m: M2Element) -> str:
    entries = m.entries()
    terms = []
    for idx, (i, j) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        if bool(entries[idx]):
            terms.append(_UNIT_NAMES[(i, j)])
    if not terms:
        return "0"
    if terms == ["E11", "E22"]:
        return "1"
    return "+".join(terms)


def _fmt_tensor(t: M2TensorSquare) -> str:
    parts = []
    for idx in range(4):
        c = t.coeffs[idx]
        if not c.is_zero():
            parts.append(f"({_fmt_element(c)}){_BASIS2[idx]}")
    return " + ".join(parts) if parts else "0"


def _fmt_curv(x: M2Element, y: M2Element) -> str:
    parts = []
    if not x.is_zero():
        parts.append(f"({_fmt_element(x)})s")
    if not y.is_zero():
        parts.append(f"({_fmt_element(y)})t")
    return "s^t (x) [" + (" + ".join(parts) if parts else "0") + "]"


def limit_family_bits(metric_name: str) -> Set[int]:
    """Connections reached by 0/1 parameter values of the closed-form
    families: the 4-parameter family for g1, the 3-parameter one for g2."""
    calc = build_m2_calculus(GF2_DOMAIN)
    bits: Set[int] = set()
    if metric_name == "g1":
        for al in (0, 1):
            for be in (0, 1):
                for mu in (0, 1):
                    for nu in (0, 1):
                        conn = qlc_family(calc, "g1", (al, be, mu, nu))
                        bits.add(encode_connection(conn))
    elif metric_name == "g2":
        for mu in (0, 1):
            for nu in (0, 1):
                for rho in (0, 1):
                    conn = qlc_family(calc, "g2", (mu, nu, rho))
                    bits.add(encode_connection(conn))
    return bits


def classify_qlc(
    calc: M2Calculus, metric: M2Metric, bits: int, limit_bits: Set[int]
) -> QLCRecord:
    """Exact re-verification and full geometric data for one survivor."""
    conn = decode_connection(calc, bits)
    ts, tt = torsion_m2(conn)
    if not (ts.is_zero() and tt.is_zero()):
        raise AssertionError(f"candidate 0x{bits:06x} is not torsion-free")
    sigma_solve_m2(conn)  # raises if the fast filter lied
    if not nabla_g_m2(conn, metric).is_zero():
        raise AssertionError(f"candidate 0x{bits:06x} is not metric compatible")
    rs, rt = curvature_m2(conn)
    flat = rs.is_zero() and rt.is_zero()
    eins = two_lift_einstein(conn, metric)
    return QLCRecord(
        metric=metric.name,
        bits=bits,
        flat=flat,
        nabla_s=_fmt_tensor(conn.nabla_s),
        nabla_t=_fmt_tensor(conn.nabla_t),
        curvature_s=_fmt_curv(rs.X, rs.Y),
        curvature_t=_fmt_curv(rt.X, rt.Y),
        ricci_plus=_fmt_tensor(eins.ricci_plus),
        ricci_minus=_fmt_tensor(eins.ricci_minus),
        s_plus=_fmt_element(eins.s_plus),
        s_minus=_fmt_element(eins.s_minus),
        einstein_applicable=eins.applicable,
        two_ricci=_fmt_tensor(eins.two_ricci) if eins.applicable else None,
        two_einstein=_fmt_tensor(eins.two_einstein) if eins.applicable else None,
        two_einstein_conserved=eins.einstein_conserved,
        eins_plus=_fmt_tensor(eins.eins_plus),
        eins_minus=_fmt_tensor(eins.eins_minus),
        from_limit_family=bits in limit_bits,
    )


def resolve_workers(requested: Optional[int] = None) -> int:
    """Worker count bounded by the QGEOM_THREADS environment variable."""
    n = requested if requested and requested > 0 else 1
    bound = os.environ.get("QGEOM_THREADS")
    if bound:
        n = min(n, max(1, int(bound)))
    return n


def brute_force_qlc_f2(
    metric_coeffs: Sequence[Sequence[int]],
    metric_name: str = "",
    workers: Optional[int] = None,
    chunk_size: int = 1 << 20,
) -> EnumerationResult:
    """Scan all 2^24 torsion-pinned candidates for QLCs of the given metric.

    The scan is partitioned into contiguous id ranges; ranges may be
    filtered in parallel worker processes, and the surviving ids are merged
    and classified in sorted order, so output is deterministic regardless
    of the worker count.
    """
    calc = build_m2_calculus(GF2_DOMAIN)
    metric = metric_m2(calc, metric_coeffs, metric_name)
    G = _metric_bits(metric_coeffs)
    ranges = [
        (lo, min(lo + chunk_size, TOTAL_CANDIDATES), G)
        for lo in range(0, TOTAL_CANDIDATES, chunk_size)
    ]
    nworkers = resolve_workers(workers)
    if nworkers > 1:
        with Pool(nworkers) as pool:
            parts = pool.map(_filter_worker, ranges)
    else:
        parts = [filter_chunk(*r) for r in ranges]
    survivors = np.sort(np.concatenate(parts)) if parts else np.array([], dtype=np.int64)
    limit_bits = limit_family_bits(metric_name)
    records = tuple(
        classify_qlc(calc, metric, int(b), limit_bits) for b in survivors
    )
    flat = sum(1 for r in records if r.flat)
    lim = [r for r in records if r.from_limit_family]
    return EnumerationResult(
        metric=metric_name,
        records=records,
        total_candidates=TOTAL_CANDIDATES,
        qlc_count=len(records),
        flat_count=flat,
        curved_count=len(records) - flat,
        limit_family_count=len(lim),
        curved_limit_family_count=sum(1 for r in lim if not r.flat),
    )
