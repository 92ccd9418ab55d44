"""Command-line surface: file formats, reports and trajectory emission.

Commands
    markov       step | equiv | tropical | shortest
    schrodinger  evolve | unitary-scan | two-state
    m2           family | check | curvature | einstein | enumerate-f2
    demorgan     verify

Graphs come in as JSON (see parse_graph_spec); structured results go out as
a RunReport JSON object with stable field ordering, trajectories as CSV
(one header row, one row per step, columns in vertex order), and the GF(2)
enumeration as JSON lines plus a summary.  Exit codes: 0 success, 2 parse
error, 3 validation failure, 4 assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import m2 as m2mod
from .m2 import M2Error
from .demorgan import verify_all_digraphs
from .graph import (
    GraphCalculus,
    GraphError,
    MetricWeights,
    VertexFunction,
)
from .markov import (
    diffusion_step,
    lawvere_shortest,
    markov_step,
    to_transition_matrix,
    tropicalize,
    validate_stochastic,
)
from .m2_search import brute_force_qlc_f2, resolve_workers
from .scalars import GaussianRational, domain_named
from .schrodinger import (
    norm2,
    schrodinger_step,
    two_state_f_step,
    two_state_unitary_family,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_ASSERTION = 4


class ParseFailure(Exception):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class ValidationFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# Graph file format


def _weight_from_json(value, dom, where: str):
    try:
        if isinstance(value, dict):
            re = value.get("re", 0)
            im = value.get("im", 0)
            if dom.kind == "gauss":
                return dom.coerce(GaussianRational(Fraction(str(re)), Fraction(str(im))))
            return dom.coerce(complex(float(re), float(im)))
        if isinstance(value, str) and dom.kind == "gauss":
            return dom.coerce(GaussianRational(Fraction(value)))
        if isinstance(value, bool):
            raise TypeError("boolean weight")
        return dom.coerce(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseFailure(where, f"bad weight {value!r} ({exc})") from None


def _weight_to_json(value, dom):
    if dom.kind == "gf2":
        return int(bool(value))
    if dom.kind == "gauss":
        return {"re": str(value.re), "im": str(value.im)}
    z = complex(value)
    if z.imag == 0:
        return z.real
    return {"re": z.real, "im": z.imag}


def parse_graph_spec(doc: Dict) -> Tuple[GraphCalculus, MetricWeights, Dict]:
    """Decode {"vertices": [...], "arrows": [{from,to,weight}...], "flags": {...}}.

    Raises ParseFailure with the offending location on malformed input and
    ValidationFailure when the stochastic flag is set but violated.
    """
    if not isinstance(doc, dict):
        raise ParseFailure("$", "graph spec must be a JSON object")
    flags = doc.get("flags", {})
    if not isinstance(flags, dict):
        raise ParseFailure("flags", "must be an object")
    field = doc.get("field", "complex")
    try:
        dom = domain_named(field)
    except ValueError as exc:
        raise ParseFailure("field", str(exc)) from None
    verts = doc.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise ParseFailure("vertices", "must be a nonempty list of labels")
    if len(set(map(str, verts))) != len(verts):
        raise ParseFailure("vertices", "labels must be unique")
    vindex = {str(v): i for i, v in enumerate(verts)}
    arrows_doc = doc.get("arrows", [])
    if not isinstance(arrows_doc, list):
        raise ParseFailure("arrows", "must be a list")
    arrows: List[Tuple[int, int]] = []
    weights = []
    for i, item in enumerate(arrows_doc):
        where = f"arrows[{i}]"
        if not isinstance(item, dict):
            raise ParseFailure(where, "must be an object")
        for key in ("from", "to"):
            if key not in item:
                raise ParseFailure(where, f"missing {key!r}")
            if str(item[key]) not in vindex:
                raise ParseFailure(f"{where}.{key}", f"unknown vertex {item[key]!r}")
        arrows.append((vindex[str(item["from"])], vindex[str(item["to"])]))
        weights.append(_weight_from_json(item.get("weight", 0), dom, f"{where}.weight"))
    bidirected = bool(flags.get("bidirected", True))
    try:
        calc = GraphCalculus(tuple(str(v) for v in verts), tuple(arrows),
                             bidirected=bidirected, domain=dom)
        w = MetricWeights(calc, tuple(weights))
    except GraphError as exc:
        raise ParseFailure("arrows", str(exc)) from None
    if flags.get("stochastic", False):
        report = validate_stochastic(w)
        if not report.ok:
            raise ValidationFailure("; ".join(report.violations))
    return calc, w, flags


def dump_graph_spec(calc: GraphCalculus, w: MetricWeights, flags: Dict) -> Dict:
    dom = calc.domain
    return {
        "vertices": list(calc.labels),
        "arrows": [
            {
                "from": calc.labels[x],
                "to": calc.labels[y],
                "weight": _weight_to_json(w.weights[a], dom),
            }
            for a, (x, y) in enumerate(calc.arrows)
        ],
        "flags": dict(flags),
        "field": dom.kind if dom.kind != "complex" else "complex",
    }


def load_graph_file(path: str) -> Tuple[GraphCalculus, MetricWeights, Dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseFailure(path, f"cannot read input ({exc})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return parse_graph_spec(doc)


# ---------------------------------------------------------------------------
# Reports


class RunReport:
    """Accumulates results/residuals/assertions with stable ordering."""

    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        self.inputs_digest = ""
        self.results: Dict = {}
        self.residuals: Dict = {}
        self.assertions: List[Dict] = []

    def digest_text(self, text: str):
        self.inputs_digest = hashlib.sha256(text.encode()).hexdigest()[:16]

    def check(self, name: str, passed: bool, detail: str = ""):
        self.assertions.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_dict(self) -> Dict:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "residuals": self.residuals,
            "assertions": self.assertions,
            "passed": self.passed,
        }

    def emit(self, output: Optional[str]) -> int:
        text = json.dumps(self.to_dict(), indent=2, default=_json_default)
        if output:
            Path(output).write_text(text + "\n")
        else:
            print(text)
        return EXIT_OK if self.passed else EXIT_ASSERTION


def _json_default(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, GaussianRational):
        return {"re": str(x.re), "im": str(x.im)}
    raise TypeError(f"not JSON serialisable: {type(x)}")


def write_trajectory_csv(path: str, header: List[str], rows: List[List]) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        out.writerows(rows)


def _parse_vector(text: str, n: int, what: str) -> List[complex]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != n:
        raise ParseFailure(what, f"expected {n} comma-separated values, got {len(parts)}")
    try:
        return [complex(p.replace("i", "j").strip()) for p in parts]
    except ValueError as exc:
        raise ParseFailure(what, str(exc)) from None


# ---------------------------------------------------------------------------
# markov


def cmd_markov(args, report: RunReport) -> int:
    calc, w, flags = load_graph_file(args.input)
    report.digest_text(Path(args.input).read_text())
    vreport = validate_stochastic(w)
    if args.subcmd in ("step", "equiv", "tropical") and not vreport.ok:
        raise ValidationFailure("; ".join(vreport.violations))
    tol = args.tolerance
    if args.subcmd == "step":
        chain = to_transition_matrix(w)
        if args.dist:
            f = VertexFunction.from_values(calc, _parse_vector(args.dist, calc.n_vertices, "--dist"))
        else:
            f = VertexFunction.delta(calc, 0)
        rows = []
        cur = f
        for step in range(args.steps + 1):
            rows.append([step] + [complex(v).real for v in cur.values])
            if step < args.steps:
                cur = markov_step(chain, cur)
        report.results["final"] = [complex(v).real for v in cur.values]
        report.results["matrix"] = chain.matrix.tolist()
        mass0 = sum(complex(v).real for v in f.values)
        mass1 = sum(complex(v).real for v in cur.values)
        report.residuals["mass_drift"] = abs(mass1 - mass0)
        report.check("mass_conserved", abs(mass1 - mass0) < tol)
        if args.csv:
            write_trajectory_csv(args.csv, ["step"] + [str(l) for l in calc.labels], rows)
    elif args.subcmd == "equiv":
        chain = to_transition_matrix(w)
        rng = random.Random(args.seed)
        f = VertexFunction.from_values(
            calc, _normalised([rng.random() for _ in range(calc.n_vertices)])
        )
        worst = 0.0
        cur_m, cur_d = f, f
        for _ in range(args.steps):
            cur_m = markov_step(chain, cur_m)
            cur_d = diffusion_step(w, cur_d)
            worst = max(worst, (cur_m - cur_d).max_abs())
        report.residuals["max_step_difference"] = worst
        report.check("chain_equals_diffusion", worst < tol, f"max residual {worst:.3e}")
    elif args.subcmd == "tropical":
        lengths = tropicalize(w)
        report.results["arrow_lengths"] = [
            None if math.isinf(l) else l for l in lengths.arrow_lengths
        ]
        report.results["self_lengths"] = [
            None if math.isinf(l) else l for l in lengths.self_lengths
        ]
        from .markov import detropicalize

        back = detropicalize(lengths)
        resid = max(
            abs(complex(a) - complex(b)) for a, b in zip(back.weights, w.weights)
        )
        report.residuals["round_trip"] = resid
        report.check("round_trip", resid < tol)
        for x in range(calc.n_vertices):
            s = sum(
                math.exp(-lengths.arrow_lengths[a]) for a in calc.out_arrows(x)
                if not math.isinf(lengths.arrow_lengths[a])
            )
            report.check(f"length_restriction[{calc.labels[x]}]", s <= 1 + tol)
    elif args.subcmd == "shortest":
        lengths = tropicalize(w)
        try:
            src = list(calc.labels).index(args.source)
            dst = list(calc.labels).index(args.target)
        except ValueError as exc:
            raise ParseFailure("--from/--to", str(exc)) from None
        dist, path = lawvere_shortest(lengths, src, dst)
        report.results["distance"] = None if math.isinf(dist) else dist
        report.results["path"] = list(path)
        report.check("reachable", not math.isinf(dist) or not path)
    return report.emit(args.output)


def _normalised(vals: List[float]) -> List[float]:
    s = sum(vals)
    return [v / s for v in vals]


# ---------------------------------------------------------------------------
# schrodinger


def cmd_schrodinger(args, report: RunReport) -> int:
    tol = args.tolerance
    if args.subcmd == "two-state":
        fam = two_state_unitary_family(args.alpha, args.beta, args.phi)
        U = fam.step.matrix
        report.results["s"] = fam.s
        report.results["t"] = fam.t
        report.results["z"] = fam.z
        report.results["U"] = [[U[0, 0], U[0, 1]], [U[1, 0], U[1, 1]]]
        resid = float(np.max(np.abs(U.conj().T @ U - np.eye(2))))
        report.residuals["unitarity"] = resid
        report.check("unitary", resid < tol)
        rng = random.Random(args.seed)
        worst = 0.0
        for _ in range(50):
            psi = _random_wave(fam.weights.calc, rng)
            mark, src = two_state_f_step(psi, args.phi)
            new = U @ np.array([complex(v) for v in psi.values])
            fn = np.abs(new) ** 2
            worst = max(
                worst,
                abs(fn[0] - (mark[0] + src[0])),
                abs(fn[1] - (mark[1] + src[1])),
            )
        report.residuals["f_step_decomposition"] = worst
        report.check("f_step_decomposition", worst < tol)
    elif args.subcmd == "unitary-scan":
        grid = []
        for phi in np.linspace(0, 2 * math.pi, args.phi_count, endpoint=False):
            for alpha in np.linspace(0.1, 1.0, args.alpha_count):
                for beta in np.linspace(0.1, 1.0, args.beta_count):
                    grid.append((float(alpha), float(beta), float(phi)))
        worst = 0.0
        n_unitary = 0
        for alpha, beta, phi in grid:
            fam = two_state_unitary_family(alpha, beta, phi)
            U = fam.step.matrix
            resid = float(np.max(np.abs(U.conj().T @ U - np.eye(2))))
            worst = max(worst, resid)
            n_unitary += int(resid < tol)
        report.results["grid_size"] = len(grid)
        report.results["unitary_count"] = n_unitary
        report.residuals["max_unitarity_residual"] = worst
        report.check("all_unitary", n_unitary == len(grid), f"worst {worst:.3e}")
    elif args.subcmd == "evolve":
        calc, w, _ = load_graph_file(args.input)
        report.digest_text(Path(args.input).read_text())
        if args.psi:
            psi = VertexFunction.from_values(
                calc, _parse_vector(args.psi, calc.n_vertices, "--psi")
            )
        else:
            psi = VertexFunction.delta(calc, 0)
        if args.potential:
            V = VertexFunction.from_values(
                calc, _parse_vector(args.potential, calc.n_vertices, "--potential")
            )
        else:
            V = VertexFunction.constant(calc, 0)
        rows = []
        cur = psi
        header = ["step"]
        for l in calc.labels:
            header += [f"{l}_re", f"{l}_im"]
        for step in range(args.steps + 1):
            row = [step]
            for v in cur.values:
                z = complex(v)
                row += [z.real, z.imag]
            rows.append(row)
            if step < args.steps:
                cur = schrodinger_step(w, V, cur)
        report.results["initial_norm2"] = norm2(psi)
        report.results["final_norm2"] = norm2(cur)
        report.residuals["norm_drift"] = abs(norm2(cur) - norm2(psi))
        report.check("evolved", True)
        if args.csv:
            write_trajectory_csv(args.csv, header, rows)
    return report.emit(args.output)


def _random_wave(calc: GraphCalculus, rng: random.Random) -> VertexFunction:
    vals = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(calc.n_vertices)]
    nrm = math.sqrt(sum(abs(v) ** 2 for v in vals))
    return VertexFunction.from_values(calc, [v / nrm for v in vals])


# ---------------------------------------------------------------------------
# m2


def _m2_params(args, count: int, rng: random.Random, dom) -> List[Tuple]:
    if args.params:
        parts = [p.strip() for p in args.params.split(",")]
        if len(parts) != count:
            raise ParseFailure("--params", f"expected {count} values")
        try:
            if dom.kind == "gauss":
                return [tuple(GaussianRational(Fraction(p)) for p in parts)]
            if dom.kind == "gf2":
                return [tuple(int(p) for p in parts)]
            return [tuple(complex(p.replace("i", "j")) for p in parts)]
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseFailure("--params", str(exc)) from None
    pts = []
    for _ in range(args.samples):
        if dom.kind == "gauss":
            pts.append(
                tuple(
                    GaussianRational(
                        Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                        Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                    )
                    for _ in range(count)
                )
            )
        elif dom.kind == "gf2":
            pts.append(tuple(rng.randint(0, 1) for _ in range(count)))
        else:
            pts.append(
                tuple(
                    complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                    for _ in range(count)
                )
            )
    return pts


def _element_to_json(m, dom):
    e = m.entries()
    return [[_weight_to_json(e[0], dom), _weight_to_json(e[1], dom)],
            [_weight_to_json(e[2], dom), _weight_to_json(e[3], dom)]]


def _tensor_to_json(t, dom):
    from .m2_search import _fmt_tensor

    if dom.kind == "gf2":
        return _fmt_tensor(t)
    slots = ("s(x)s", "s(x)t", "t(x)s", "t(x)t")
    return {
        name: _element_to_json(coeff, dom)
        for name, coeff in zip(slots, t.coeffs)
        if not coeff.is_zero()
    }


def cmd_m2(args, report: RunReport) -> int:
    tol = args.tolerance
    if args.subcmd == "enumerate-f2":
        coeffs = {"g1": [[0, 1], [1, 0]], "g2": [[1, 0], [0, 1]]}[args.metric]
        result = brute_force_qlc_f2(
            coeffs, args.metric, workers=resolve_workers(args.workers)
        )
        if args.output_jsonl:
            with open(args.output_jsonl, "w") as fh:
                for rec in result.records:
                    fh.write(json.dumps(rec.to_dict()) + "\n")
        report.results["summary"] = result.summary()
        report.results["curved_among_limit_family"] = result.curved_limit_family_count
        report.check("enumeration_complete", result.total_candidates == 1 << 24)
        return report.emit(args.output)

    # the float path trades exactness for speed; a looser internal epsilon
    # keeps its braiding solves stable, residual thresholds stay --tolerance
    dom = domain_named(args.field, eps=1e-10 if args.field == "complex" else 1e-12)
    calc = m2mod.build_m2_calculus(dom)
    metric = m2mod.metric_g1(calc) if args.metric == "g1" else m2mod.metric_g2(calc)
    nparams = 4 if args.metric == "g1" else 3
    rng = random.Random(args.seed)
    points = _m2_params(args, nparams, rng, dom)
    if args.subcmd == "family":
        conn = m2mod.qlc_family(calc, args.metric, points[0])
        report.results["nabla_s"] = _tensor_to_json(conn.nabla_s, dom)
        report.results["nabla_t"] = _tensor_to_json(conn.nabla_t, dom)
        report.check("built", True)
    elif args.subcmd == "check":
        worst_t = 0.0
        worst_g = 0.0
        exact_ok = True
        for pt in points:
            conn = m2mod.qlc_family(calc, args.metric, pt)
            ts, tt = m2mod.torsion_m2(conn)
            ng = m2mod.nabla_g_m2(conn, metric)
            if dom.exact:
                exact_ok = exact_ok and ts.is_zero() and tt.is_zero() and ng.is_zero()
            else:
                worst_t = max(worst_t, ts.coeff.max_abs(), tt.coeff.max_abs())
                worst_g = max(worst_g, ng.max_abs())
        report.results["points_checked"] = len(points)
        if dom.exact:
            report.check("torsion_and_compat_zero", exact_ok)
        else:
            report.residuals["torsion"] = worst_t
            report.residuals["nabla_g"] = worst_g
            report.check("torsion_zero", worst_t < tol)
            report.check("nabla_g_zero", worst_g < tol)
    elif args.subcmd == "curvature":
        conn = m2mod.qlc_family(calc, args.metric, points[0])
        rs, rt = m2mod.curvature_m2(conn)
        if dom.kind == "gf2":
            from .m2_search import _fmt_curv

            report.results["curvature_s"] = _fmt_curv(rs.X, rs.Y)
            report.results["curvature_t"] = _fmt_curv(rt.X, rt.Y)
        else:
            report.results["curvature_s"] = {
                "s": _element_to_json(rs.X, dom), "t": _element_to_json(rs.Y, dom)
            }
            report.results["curvature_t"] = {
                "s": _element_to_json(rt.X, dom), "t": _element_to_json(rt.Y, dom)
            }
        report.results["flat"] = rs.is_zero() and rt.is_zero()
        report.check("computed", True)
    elif args.subcmd == "einstein":
        if dom.kind != "gf2":
            raise ValidationFailure("two-lift Einstein data is a GF(2) construction")
        conn = m2mod.qlc_family(calc, args.metric, points[0])
        eins = m2mod.two_lift_einstein(conn, metric)
        from .m2_search import _fmt_element, _fmt_tensor

        report.results["s_plus"] = _fmt_element(eins.s_plus)
        report.results["s_minus"] = _fmt_element(eins.s_minus)
        report.results["applicable"] = eins.applicable
        if eins.applicable:
            report.results["two_ricci"] = _fmt_tensor(eins.two_ricci)
            report.results["two_einstein"] = _fmt_tensor(eins.two_einstein)
            report.results["conserved"] = eins.einstein_conserved
        report.check("computed", True)
    return report.emit(args.output)


# ---------------------------------------------------------------------------
# demorgan


def cmd_demorgan(args, report: RunReport) -> int:
    rng = random.Random(args.seed)
    total = 0
    ok = True
    for n in range(1, args.max_vertices + 1):
        r = verify_all_digraphs(n, rng)
        total += r.checks
        ok = ok and r.ok
        report.results[f"digraphs_n{n}"] = {"checks": r.checks, "ok": r.ok}
        report.check(f"all_digraphs_n{n}", r.ok, "; ".join(r.failures[:3]))
    report.results["total_checks"] = total
    return report.emit(args.output)


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qgeom", description="discrete quantum-geometry workbench"
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--input", help="graph spec JSON file")
        sp.add_argument("--output", help="write the run report JSON here")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tolerance", type=float, default=1e-12)

    mk = sub.add_parser("markov", help="Markov chain / diffusion commands")
    mk.add_argument("subcmd", choices=["step", "equiv", "tropical", "shortest"])
    common(mk)
    mk.add_argument("--steps", type=int, default=1)
    mk.add_argument("--dist", help="comma-separated initial distribution")
    mk.add_argument("--csv", help="trajectory CSV path")
    mk.add_argument("--from", dest="source", help="source vertex label")
    mk.add_argument("--to", dest="target", help="target vertex label")

    sc = sub.add_parser("schrodinger", help="discrete Schroedinger commands")
    sc.add_argument("subcmd", choices=["evolve", "unitary-scan", "two-state"])
    common(sc)
    sc.add_argument("--steps", type=int, default=1)
    sc.add_argument("--psi", help="comma-separated complex amplitudes")
    sc.add_argument("--potential", help="comma-separated potential values")
    sc.add_argument("--csv", help="trajectory CSV path")
    sc.add_argument("--alpha", type=float, default=0.5)
    sc.add_argument("--beta", type=float, default=0.5)
    sc.add_argument("--phi", type=float, default=0.0)
    sc.add_argument("--phi-count", type=int, default=16)
    sc.add_argument("--alpha-count", type=int, default=4)
    sc.add_argument("--beta-count", type=int, default=4)

    m2p = sub.add_parser("m2", help="2x2 matrix geometry commands")
    m2p.add_argument(
        "subcmd", choices=["family", "check", "curvature", "einstein", "enumerate-f2"]
    )
    common(m2p)
    m2p.add_argument("--metric", choices=["g1", "g2"], default="g1")
    m2p.add_argument("--field", choices=["complex", "gf2", "gauss"], default="gauss")
    m2p.add_argument("--params", help="comma-separated family parameters")
    m2p.add_argument("--samples", type=int, default=20)
    m2p.add_argument("--workers", type=int, default=1)
    m2p.add_argument("--output-jsonl", help="enumeration records JSON-lines path")

    dm = sub.add_parser("demorgan", help="power-set duality verification")
    dm.add_argument("subcmd", choices=["verify"], nargs="?", default="verify")
    common(dm)
    dm.add_argument("--max-vertices", type=int, default=3)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    report = RunReport(["qgeom"] + argv)
    try:
        if args.command == "markov":
            if args.subcmd in ("step", "equiv", "tropical", "shortest") and not args.input:
                raise ParseFailure("--input", "a graph spec file is required")
            return cmd_markov(args, report)
        if args.command == "schrodinger":
            if args.subcmd == "evolve" and not args.input:
                raise ParseFailure("--input", "a graph spec file is required")
            return cmd_schrodinger(args, report)
        if args.command == "m2":
            return cmd_m2(args, report)
        if args.command == "demorgan":
            return cmd_demorgan(args, report)
        raise ParseFailure("command", f"unknown command {args.command!r}")
    except ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GraphError, M2Error) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
