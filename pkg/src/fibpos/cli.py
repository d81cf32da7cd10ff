"""Command-line front end.

Exit codes: 0 all applicable bounds hold, 1 some bound violated (or a
certificate contradicts the numerics), 2 input error, 3 nothing applicable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import grr, highdim, linstab, model, moriwaki, nodal, xiao
from . import schemas as sc
from .exact import format_rational
from .model import BoundReport, FibposError, Verdict

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_NA = 0, 1, 2, 3


@dataclass
class RunManifest:
    command: str
    inputPaths: list[str] = field(default_factory=list)
    options: dict[str, Any] = field(default_factory=dict)
    reports: list[BoundReport] = field(default_factory=list)
    warnings: list[dict[str, str]] = field(default_factory=list)
    values: dict[str, Any] = field(default_factory=dict)

    def warn(self, module: str, message: str) -> None:
        self.warnings.append({"module": module, "message": message})

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputPaths": list(self.inputPaths),
            "options": sc.to_json(self.options),
            "reports": [sc.report_to_json(r) for r in self.reports],
            "warnings": list(self.warnings),
            "values": sc.to_json(self.values),
            "exitCode": exit_code(self.reports),
        }

    @classmethod
    def from_json(cls, doc: dict) -> RunManifest:
        return cls(
            doc["command"],
            list(doc["inputPaths"]),
            dict(doc["options"]),
            [sc.report_from_json(r) for r in doc["reports"]],
            list(doc["warnings"]),
            dict(doc["values"]),
        )


def exit_code(reports: Sequence[BoundReport]) -> int:
    verdicts = [r.verdict for r in reports]
    if any(v in (Verdict.VIOLATED, Verdict.CONTRADICTION) for v in verdicts):
        return EXIT_VIOLATED
    if not verdicts or all(v is Verdict.NOT_APPLICABLE for v in verdicts):
        return EXIT_NA
    return EXIT_OK


# ------------------------------------------------------------ inputs

_SURFACE_ALIASES = {"K2": "Kf2", "Kf2": "Kf2", "chi": "chi_f", "chi_f": "chi_f", "g": "g", "b": "b"}
_COUNT_ALIASES = {"k": "k", "l": "l", "r": "rSocket", "rSocket": "rSocket", "n": "nTotal", "nTotal": "nTotal"}


def parse_kv(text: str, aliases: dict[str, str] | None = None, ints: set[str] = frozenset()) -> dict:
    """``a=1,b=2/3`` to a dict; integer-looking values become ints, the rest stay strings."""
    out: dict[str, Any] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise sc.SchemaError(f"expected key=value, got {part!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        if aliases is not None:
            if key not in aliases:
                raise sc.SchemaError(f"unknown key {key!r}; expected one of {sorted(aliases)}")
            key = aliases[key]
        if val.lower() in ("true", "false"):
            out[key] = val.lower() == "true"
        else:
            try:
                out[key] = int(val)
            except ValueError:
                if key in ints:
                    raise sc.SchemaError(f"{key} must be an integer") from None
                out[key] = val
    return out


def _doc(arg: str | None, man: RunManifest, aliases: dict[str, str] | None = None) -> Any:
    """Inline ``k=v`` list, or a path to a JSON document."""
    if arg is None:
        return None
    if "=" in arg and not Path(arg).exists():
        return parse_kv(arg, aliases)
    man.inputPaths.append(arg)
    return sc.load_path(arg)


def _surface(args, man: RunManifest, required: bool = True) -> model.SurfaceCanonicalData | None:
    doc = _doc(getattr(args, "surface", None), man, _SURFACE_ALIASES)
    if doc is None:
        if required:
            raise sc.SchemaError("--surface is required")
        return None
    if getattr(args, "not_minimal", False):
        doc["relativelyMinimal"] = False
    return sc.surface_from_json(doc)


def _counts(args, man: RunManifest) -> nodal.NodalCounts | None:
    doc = _doc(getattr(args, "counts", None), man, _COUNT_ALIASES)
    return None if doc is None else sc.counts_from_json(doc)


def _fibration(args, man: RunManifest) -> model.FibrationNumerics | None:
    doc = _doc(getattr(args, "fibration", None), man)
    if doc is None:
        return None
    flags = dict(doc.pop("flags", {})) if isinstance(doc, dict) else {}
    for name in getattr(args, "flag", None) or []:
        flags[name] = True
    if flags:
        doc["flags"] = flags
    return sc.fibration_from_json(doc)


def _fib_from_args(args, man: RunManifest) -> model.FibrationNumerics:
    f = _fibration(args, man)
    if f is not None:
        return f
    s = _surface(args, man, required=False)
    if s is None:
        raise sc.SchemaError("need --fibration or --surface")
    return s.numerics()


# ------------------------------------------------------------ commands


def cmd_invariants(args, man: RunManifest) -> None:
    s = _surface(args, man, required=False)
    f = _fibration(args, man) if s is None else s.numerics()
    if f is None:
        raise sc.SchemaError("need --surface or --fibration")
    man.values["e"] = model.ch_invariant(f)
    man.values["asymptote"] = model.slope_asymptote(f)
    if f.degG > 0:
        man.values["slope"] = model.slope(f)
        if not model.asymptotic_cross_check(f):
            man.warn("model", "slope-versus-asymptote cross-check failed")
    else:
        man.warn("model", "deg G <= 0: slope undefined")
    if args.k is not None:
        man.values["perturbedSlope"] = model.perturbed_slope(f, sc.rat(args.k, "k"))
    man.reports.append(model.f_positivity(f))
    if s is not None:
        man.reports.append(model.slope_inequality(s))


def cmd_nodal(args, man: RunManifest) -> None:
    gph = sc.fibre_graph_from_json(_doc(args.graph, man))
    counts = nodal.nodal_counts(gph)
    sock = nodal.socket_components(gph)
    man.values["bridges"] = sorted(nodal.disconnecting_nodes(gph))
    man.values["socketVertices"] = sorted(sock.vertices)
    man.values["counts"] = sc.counts_to_json(counts)
    man.values["arithmeticGenus"] = gph.arithmetic_genus()
    oracle, formula = nodal.socket_adjunction_discrepancy(gph)
    if oracle != formula:
        man.warn("nodal", f"socket adjunction degree {oracle} differs from -2r + k = {formula}")
    if not nodal.relative_minimality_check(counts):
        man.warn("nodal", "2r > k: fibre is not relatively minimal")
    s = _surface(args, man, required=False)
    if s is not None:
        cmp_ = nodal.refined_bounds(s, counts)
        man.reports.extend(cmp_.reports)
        man.values["summary"] = cmp_.summary()


def cmd_grr(args, man: RunManifest) -> None:
    s = _surface(args, man)
    poly = grr.grr_polynomial_canonical(s)
    e = model.ch_invariant(s.numerics())
    man.values["E"] = {f"h^{i}": c for i, c in enumerate(poly.coeffs)}
    man.values["e"] = e
    man.values["psiLimit"] = grr.psi_limit(s)
    man.values["hilbertLimit"] = grr.hfixed_hilbert_limit(s.g)
    table = grr.hfixed_table(s.g, range(args.h_min, args.h_max + 1))
    man.values["hfixed"] = {str(h): v for h, v in table}
    man.reports.append(BoundReport.compare("GRR leading coefficient = e/2", poly.coefficient(2), e / 2))
    man.reports.append(model.slope_inequality(s))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["h", "bound"])
            for h, v in table:
                w.writerow([h, format_rational(v)])


def cmd_xiao(args, man: RunManifest) -> None:
    hn = sc.filtration_from_json(_doc(args.filtration, man))
    index = [int(i) for i in args.I.split(",")] if args.I else None
    if args.itable:
        tbl = sc.itable_from_json(_doc(args.itable, man))
        dims = [int(x) for x in args.dims.split(",")] if args.dims else [tbl.n - 1] * hn.length
        bound = xiao.xiao_general_bound(hn, tbl, dims, index)
    else:
        bound = xiao.xiao_surface_bound(hn, index)
    man.values["xiaoBound"] = bound
    man.values["totalDegree"] = hn.total_deg
    lhs = None if args.Ln is None else sc.rat(args.Ln, "Ln")
    man.reports.append(BoundReport.maybe("Xiao", lhs, bound, ["L nef", "mu_l >= 0"], lhs_label="L^n"))
    if args.g is not None:
        man.reports.append(xiao.slope_from_clifford(args.g, hn))


def cmd_xiao_opt(args, man: RunManifest) -> None:
    chi = sc.rat(args.chi, "chi")
    res = xiao.worst_case_filtration(args.g, chi, args.max_steps, args.family, not args.free_degrees)
    man.values["minRatio"] = res.minRatio
    man.values["witness"] = sc.filtration_to_json(res.witness)
    man.values["patterns"] = res.patterns
    target = model.SurfaceCanonicalData(args.g, 0, 0, 1).slope_coefficient()
    man.reports.append(BoundReport.compare("worst-case Xiao ratio vs 4(g-1)/g", res.minRatio, target, [f"family {args.family}"]))


def cmd_moriwaki(args, man: RunManifest) -> None:
    certs = sc.certificates_from_json(_doc(args.certificates, man)) if args.certificates else []
    if args.kernel:
        k = sc.kernel_bundle_from_json(_doc(args.kernel, man))
        flags = model.FibrationFlags(**{n: True for n in args.flag or []})
        f = k.numerics(flags)
        man.values["delta"] = moriwaki.kernel_delta(k)
        man.values["e"] = model.ch_invariant(f)
        man.reports.append(moriwaki.delta_vs_e(k, f, certs))
        man.reports.append(moriwaki.h_semistable_positivity(f, certs))
    counts = _counts(args, man)
    if counts is not None:
        s = _surface(args, man)
        res = moriwaki.moriwaki_nodal(s.g, s.chi_f, counts, s.Kf2)
        man.values["displayedRhs"] = res.displayed_rhs
        man.values["conventionDiff"] = res.convention_diff
        if not res.cross_check:
            man.warn("moriwaki", "displayed discriminant form is weaker than the emitted bound")
        man.reports.append(res.report)
    if not args.kernel and counts is None:
        raise sc.SchemaError("need --kernel or --counts")


def cmd_linstab(args, man: RunManifest) -> None:
    m = sc.series_from_json(_doc(args.series, man))
    res = linstab.is_linearly_stable(m)
    man.values["verdict"] = res.verdict.value
    man.values["witness"] = None if res.witness is None else {"dPrime": res.witness[0], "rPrime": res.witness[1]}
    if res.certificates:
        man.values["certificates"] = sc.certificates_to_json(res.certificates)
    man.reports.append(linstab.linear_stability_report(m))


def cmd_certify(args, man: RunManifest) -> None:
    certs = sc.certificates_from_json(_doc(args.certificates, man)) if args.certificates else []
    if args.series:
        m = sc.series_from_json(_doc(args.series, man))
        if isinstance(m, linstab.CriteriaSeries):
            certs.extend(linstab.criteria_certify(m))
        else:
            res = linstab.is_linearly_stable(m)
            strict = {
                linstab.LinStabVerdict.STABLE: linstab.Strictness.STABLE,
                linstab.LinStabVerdict.STRICTLY_SEMISTABLE: linstab.Strictness.STRICTLY_SEMISTABLE,
                linstab.LinStabVerdict.UNSTABLE: linstab.Strictness.UNSTABLE,
            }.get(res.verdict)
            if strict is not None:
                certs.append(linstab.StabilityCertificate(linstab.CertKind.LINEAR, strict, "explicit-series"))
    if args.lct is not None:
        r, d, lct = args.lct
        c = linstab.lee_lct_rule(int(r), sc.rat(d, "d"), sc.rat(lct, "lct"))
        if c is not None:
            certs.append(c)
    closure = linstab.propagate_certificates(certs, args.very_ample)
    man.values["closure"] = sc.certificates_to_json(closure)
    if args.surface or args.fibration:
        man.reports.append(linstab.ch_bound_from_certificate(_fib_from_args(args, man), closure, args.very_ample))


def cmd_highdim(args, man: RunManifest) -> None:
    if args.input:
        op, p = sc.highdim_from_json(_doc(args.input, man))
    else:
        if args.op is None:
            raise sc.SchemaError("need --op or --input")
        doc = {"op": args.op}
        for key in sc.HIGHDIM_FIELDS[args.op][0] | sc.HIGHDIM_FIELDS[args.op][1]:
            val = getattr(args, _ARG_FOR.get(key, key), None)
            if val is not None:
                doc[key] = val
        op, p = sc.highdim_from_json(doc)
    if op == "abelian":
        man.reports.append(highdim.abelian_bound(p["n"], p["degPush"], p["Ln"], p["LFtop"]))
    elif op == "k3":
        man.reports.append(highdim.k3_bound(p["g"], p["degPush"], p.get("L3"), p.get("picardOne", True), p.get("primitive", True)))
    elif op == "conjectural":
        man.values["rhs"] = highdim.conjectural_slope_rhs(p["n"], p["KFtop"], p["h0omegaF"], p["degPush"])
        man.reports.append(highdim.conjectural_slope(p["n"], p["KFtop"], p["h0omegaF"], p["degPush"], p.get("Kfn")))
    elif op == "severi":
        man.reports.append(highdim.severi_check(sc.severi_from_params(p)))
    elif op == "etale":
        res = highdim.etale_cover_limit(
            p["n"], p["KXn"], p["KFtop"], p["chiF"], p["chiX"], p.get("eps1", 0), p.get("eps2", 0), p.get("induction", False)
        )
        man.reports.append(res.report)
        if res.slopemejor is not None:
            man.reports.append(res.slopemejor)
    else:
        res = highdim.pardini_limit(highdim.PardiniLedger.standard(p["q"]), p["n"])
        man.values["limit"] = str(res)
        man.values["matchesSeveri"] = res.is_severi
        man.reports.append(res.report)


# argparse destinations that differ from schema keys
_ARG_FOR = {"degPush": "deg"}


def cmd_compare(args, man: RunManifest) -> None:
    s = _surface(args, man)
    counts = _counts(args, man)
    if counts is None and args.graph:
        counts = nodal.nodal_counts(sc.fibre_graph_from_json(_doc(args.graph, man)))
    if counts is None:
        raise sc.SchemaError("compare needs nodal counts (--counts or --graph)")
    cmp_ = nodal.refined_bounds(s, counts)
    mw = moriwaki.moriwaki_nodal(s.g, s.chi_f, counts)
    man.values["rhs"] = {"Cornalba-Harris": cmp_.ch.rhs, "Xiao": cmp_.xiao.rhs, "Moriwaki": cmp_.moriwaki.rhs}
    man.values["summary"] = cmp_.summary()
    man.values["conventionDiff"] = mw.convention_diff
    man.reports.extend(cmp_.reports)


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fibpos", description="Exact evaluation of slope-type inequalities for fibrations.")
    p.add_argument("--json", action="store_true", help="emit the run manifest as JSON")
    p.add_argument("--strict", action="store_true", help="treat warnings as input errors (exit 2)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.add_argument("--strict", action="store_true", default=argparse.SUPPRESS)
        return sp

    def surface_opts(sp, fib: bool = False) -> None:
        sp.add_argument("--surface", help="g=..,K2=..,chi=.. or a surface JSON file")
        sp.add_argument("--not-minimal", action="store_true", help="fibration is not relatively minimal")
        if fib:
            sp.add_argument("--fibration", help="fibration JSON file or dim=..,Ln=..,LFtop=..,degG=..,rankG=..")
            sp.add_argument("--flag", action="append", choices=sorted(sc._FLAG_NAMES), help="assert a fibration flag")

    sp = add("invariants", cmd_invariants, "Cornalba-Harris invariant, slope, f-positivity")
    surface_opts(sp, fib=True)
    sp.add_argument("--k", help="perturbation L + kF")

    sp = add("nodal", cmd_nodal, "disconnecting nodes and refined nodal bounds")
    sp.add_argument("--graph", required=True, help="fibre-graph JSON")
    surface_opts(sp)

    sp = add("grr", cmd_grr, "Riemann-Roch polynomial and finite-h Hilbert bounds")
    surface_opts(sp)
    sp.add_argument("--h-min", type=int, default=2)
    sp.add_argument("--h-max", type=int, default=10)
    sp.add_argument("--csv", help="write the h-table as CSV")

    sp = add("xiao", cmd_xiao, "Xiao's bound for a Harder-Narasimhan filtration")
    sp.add_argument("--filtration", required=True)
    sp.add_argument("--itable", help="intersection table JSON (higher dimension)")
    sp.add_argument("--dims", help="comma-separated fibre image dimensions")
    sp.add_argument("--I", help="comma-separated index set")
    sp.add_argument("--g", type=int, help="fibre genus for the Clifford check")
    sp.add_argument("--Ln", help="value of L^n to compare against")

    sp = add("xiao-opt", cmd_xiao_opt, "worst-case Xiao ratio over admissible filtrations")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--chi", required=True)
    sp.add_argument("--max-steps", type=int, required=True)
    sp.add_argument("--family", choices=("pair", "full", "all"), default="pair")
    sp.add_argument("--free-degrees", action="store_true", help="do not force Clifford-minimal degrees")

    sp = add("moriwaki", cmd_moriwaki, "kernel-bundle discriminant and the nodal Moriwaki bound")
    sp.add_argument("--kernel", help="kernel-bundle JSON")
    sp.add_argument("--certificates", help="certificates JSON list")
    sp.add_argument("--flag", action="append", choices=sorted(sc._FLAG_NAMES))
    sp.add_argument("--counts", help="k=..,l=..,r=.. or counts JSON")
    sp.add_argument("--surface")

    sp = add("linstab", cmd_linstab, "linear stability of a curve linear series")
    sp.add_argument("--series", required=True)

    sp = add("certify", cmd_certify, "close a set of stability certificates")
    sp.add_argument("--series")
    sp.add_argument("--certificates")
    sp.add_argument("--very-ample", action="store_true")
    sp.add_argument("--lct", nargs=3, metavar=("R", "D", "LCT"), help="log canonical threshold of the Chow form")
    surface_opts(sp, fib=True)

    sp = add("highdim", cmd_highdim, "higher-dimensional bounds")
    sp.add_argument("--input", help="highdim JSON")
    sp.add_argument("--op", choices=sorted(sc.HIGHDIM_FIELDS))
    for name in ("n", "g", "q"):
        sp.add_argument(f"--{name}", type=int)
    for name in ("deg", "Ln", "LFtop", "L3", "KFtop", "h0omegaF", "Kfn", "Kn", "chi", "KXn", "chiF", "chiX", "eps1", "eps2"):
        sp.add_argument(f"--{name}")
    sp.add_argument("--induction", action="store_true", default=None)
    sp.add_argument("--no-max-albanese", dest="maximalAlbanese", action="store_false", default=None)

    sp = add("compare", cmd_compare, "Cornalba-Harris, Xiao and Moriwaki nodal bounds side by side")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--counts")
    sp.add_argument("--graph")
    return p


def _options(ns: argparse.Namespace) -> dict:
    out = {}
    for k, v in sorted(vars(ns).items()):
        if k in ("fn", "command") or v is None or v is False:
            continue
        out[k] = v if isinstance(v, (str, bool, int)) else [str(x) for x in v]
    return out


def render_table(man: RunManifest) -> str:
    lines = [f"fibpos {man.command}"]
    for key, val in sorted(man.values.items()):
        shown = sc.to_json(val)
        shown = shown if isinstance(shown, str) else json.dumps(shown, sort_keys=True)
        lines.append(f"  {key} = {shown}")
    if man.reports:
        rows = [("bound", "lhs", "rhs", "margin", "verdict")]
        for r in man.reports:
            cells = [format_rational(x) if x is not None else "-" for x in (r.lhs, r.rhs, r.margin)]
            verdict = r.verdict.value
            if r.failed_precondition:
                verdict += f" ({r.failed_precondition})"
            rows.append((r.name, *cells, verdict))
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        for row in rows:
            lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(row, widths)) + "  " + row[4])
        for r in man.reports:
            for note in r.notes:
                lines.append(f"  note [{r.name}]: {note}")
    for w in man.warnings:
        lines.append(f"  warning [{w['module']}]: {w['message']}")
    lines.append(f"exit {exit_code(man.reports)}")
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None) -> tuple[RunManifest | None, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, EXIT_INPUT if exc.code else EXIT_OK
    man = RunManifest(args.command, options=_options(args))
    try:
        args.fn(args, man)
    except (FibposError, ValueError, OSError) as exc:
        print(f"fibpos: error: {exc}", file=sys.stderr)
        return man, EXIT_INPUT
    code = exit_code(man.reports)
    if args.strict and man.warnings:
        code = EXIT_INPUT
    return man, code


def main(argv: Sequence[str] | None = None) -> int:
    man, code = run(argv)
    if man is None or code == EXIT_INPUT and not man.reports:
        return code
    out = sc.dumps(man.to_json()) if man.options.get("json") else render_table(man)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
