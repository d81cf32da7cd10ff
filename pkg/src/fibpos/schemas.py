"""JSON documents for the package's input objects and reports.

Rationals are written as strings ``"p/q"`` (``"p"`` when integral); integers
are accepted on input, floats never. Unknown fields are rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .exact import Q, format_rational
from .highdim import SeveriInput
from .linstab import CriteriaSeries, DSBData, ExplicitSeries, LinearSeriesModel, PlaneCurve, StabilityCertificate
from .model import BoundReport, FibposError, FibrationFlags, FibrationNumerics, SurfaceCanonicalData, Verdict
from .moriwaki import KernelBundleData
from .nodal import FibreDualGraph, NodalCounts
from .xiao import HNData, HNStep, IntersectionTable


class SchemaError(FibposError):
    pass


def _obj(doc: Any, schema: str, required: set[str], optional: set[str] = frozenset()) -> Mapping:
    if not isinstance(doc, Mapping):
        raise SchemaError(f"{schema}: expected a JSON object")
    unknown = set(doc) - required - set(optional)
    if unknown:
        raise SchemaError(f"{schema}: unknown field(s) {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise SchemaError(f"{schema}: missing field(s) {sorted(missing)}")
    return doc


def rat(value: Any, where: str = "value") -> Fraction:
    if isinstance(value, float):
        raise SchemaError(f"{where}: floats are not accepted, write {value!r} as a string \"p/q\"")
    try:
        return Q(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from None


def integer(value: Any, where: str = "value") -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}: expected an integer")
    return value


def boolean(value: Any, where: str = "value") -> bool:
    if not isinstance(value, bool):
        raise SchemaError(f"{where}: expected true or false")
    return value


def to_json(value: Any) -> Any:
    """Plain-JSON form with rationals as strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    if isinstance(value, Mapping):
        return {str(k): to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [to_json(v) for v in value]
        return sorted(items, key=json.dumps) if isinstance(value, (set, frozenset)) else items
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_path(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


# ------------------------------------------------------------ model

_FLAG_NAMES = {f for f in FibrationFlags.__dataclass_fields__}


def fibration_from_json(doc: Any) -> FibrationNumerics:
    d = _obj(doc, "fibration", {"dim", "Ln", "LFtop", "degG", "rankG"}, {"flags"})
    flags = _obj(d.get("flags", {}), "fibration.flags", set(), _FLAG_NAMES)
    return FibrationNumerics(
        integer(d["dim"], "dim"),
        rat(d["Ln"], "Ln"),
        rat(d["LFtop"], "LFtop"),
        rat(d["degG"], "degG"),
        integer(d["rankG"], "rankG"),
        FibrationFlags(**{k: boolean(v, k) for k, v in flags.items()}),
    )


def fibration_to_json(f: FibrationNumerics) -> dict:
    return {
        "dim": f.dim,
        "Ln": format_rational(f.Ln),
        "LFtop": format_rational(f.LFtop),
        "degG": format_rational(f.degG),
        "rankG": f.rankG,
        "flags": {k: True for k in f.flags.asserted()},
    }


def surface_from_json(doc: Any) -> SurfaceCanonicalData:
    d = _obj(doc, "surface", {"g", "Kf2", "chi_f"}, {"b", "relativelyMinimal"})
    return SurfaceCanonicalData(
        integer(d["g"], "g"),
        integer(d.get("b", 0), "b"),
        rat(d["Kf2"], "Kf2"),
        rat(d["chi_f"], "chi_f"),
        boolean(d.get("relativelyMinimal", True), "relativelyMinimal"),
    )


def surface_to_json(s: SurfaceCanonicalData) -> dict:
    return {
        "g": s.g,
        "b": s.b,
        "Kf2": format_rational(s.Kf2),
        "chi_f": format_rational(s.chi_f),
        "relativelyMinimal": s.relativelyMinimal,
    }


# ------------------------------------------------------------ nodal


def fibre_graph_from_json(doc: Any) -> FibreDualGraph:
    d = _obj(doc, "fibre-graph", {"vertices"}, {"edges"})
    verts = d["vertices"]
    if not isinstance(verts, list):
        raise SchemaError("fibre-graph.vertices: expected a list")
    genera = [integer(_obj(v, "fibre-graph.vertex", {"genus"})["genus"], "genus") for v in verts]
    edges = []
    for e in d.get("edges", []):
        if not (isinstance(e, list) and len(e) == 2):
            raise SchemaError("fibre-graph.edges: each edge is a pair [i, j]")
        edges.append((integer(e[0], "edge"), integer(e[1], "edge")))
    return FibreDualGraph(tuple(genera), tuple(edges))


def fibre_graph_to_json(gph: FibreDualGraph) -> dict:
    return {"vertices": [{"genus": g} for g in gph.genera], "edges": [list(e) for e in gph.edges]}


def counts_from_json(doc: Any) -> NodalCounts:
    d = _obj(doc, "counts", {"k", "l", "rSocket"}, {"nTotal"})
    k, l = integer(d["k"], "k"), integer(d["l"], "l")
    n = integer(d.get("nTotal", k + l), "nTotal")
    return NodalCounts(n, k, l, integer(d["rSocket"], "rSocket"))


def counts_to_json(c: NodalCounts) -> dict:
    return {"nTotal": c.nTotal, "k": c.k, "l": c.l, "rSocket": c.rSocket}


# ------------------------------------------------------------ xiao


def filtration_from_json(doc: Any) -> HNData:
    d = _obj(doc, "filtration", {"steps"}, {"nef", "strict"})
    steps = []
    for i, s in enumerate(d["steps"], 1):
        s = _obj(s, f"filtration.steps[{i}]", {"mu", "r", "d"})
        steps.append(HNStep(rat(s["mu"], "mu"), integer(s["r"], "r"), rat(s["d"], "d")))
    return HNData(tuple(steps), boolean(d.get("nef", True), "nef"), boolean(d.get("strict", True), "strict"))


def filtration_to_json(hn: HNData) -> dict:
    return {
        "steps": [{"mu": format_rational(s.mu), "r": s.r, "d": format_rational(s.d)} for s in hn.steps],
        "nef": hn.nef,
        "strict": hn.strict,
    }


def itable_from_json(doc: Any) -> IntersectionTable:
    d = _obj(doc, "itable", {"n", "entries"})
    entries = {}
    for e in d["entries"]:
        e = _obj(e, "itable.entry", {"idx", "val"})
        idx = tuple(integer(i, "idx") for i in e["idx"])
        entries[idx] = rat(e["val"], "val")
    return IntersectionTable(integer(d["n"], "n"), entries)


def itable_to_json(t: IntersectionTable) -> dict:
    return {"n": t.n, "entries": [{"idx": list(k), "val": format_rational(v)} for k, v in sorted(t.entries.items())]}


# ------------------------------------------------------------ moriwaki


def kernel_bundle_from_json(doc: Any) -> KernelBundleData:
    fields = {"rankG", "Lsq", "LF", "degG", "c", "caseFlag"}
    d = _obj(doc, "kernel-bundle", fields, {"LminusDsq", "LminusDF"})
    Lsq, LF = rat(d["Lsq"], "Lsq"), rat(d["LF"], "LF")
    return KernelBundleData(
        integer(d["rankG"], "rankG"),
        rat(d.get("LminusDsq", Lsq), "LminusDsq"),
        rat(d.get("LminusDF", LF), "LminusDF"),
        Lsq,
        LF,
        rat(d["degG"], "degG"),
        rat(d["c"], "c"),
        d["caseFlag"],
    )


def kernel_bundle_to_json(k: KernelBundleData) -> dict:
    out = {n: format_rational(getattr(k, n)) for n in ("LminusDsq", "LminusDF", "Lsq", "LF", "degG", "c")}
    out.update(rankG=k.rankG, caseFlag=k.caseFlag.value)
    return out


# ------------------------------------------------------------ linstab

_CRITERIA_FLAGS = {"complete", "hyperelliptic", "veryAmple", "genericProjection", "canonical"}


def series_from_json(doc: Any) -> LinearSeriesModel:
    if not isinstance(doc, Mapping) or "variant" not in doc:
        raise SchemaError("series: missing variant discriminator")
    variant = doc["variant"]
    if variant == "explicit":
        d = _obj(doc, "series", {"variant", "g", "d", "r"}, {"subseries"})
        subs = []
        for s in d.get("subseries", []):
            s = _obj(s, "series.subseries", {"dPrime", "rPrime"})
            subs.append((rat(s["dPrime"], "dPrime"), integer(s["rPrime"], "rPrime")))
        return ExplicitSeries(integer(d["g"], "g"), rat(d["d"], "d"), integer(d["r"], "r"), tuple(subs))
    if variant == "plane-curve":
        d = _obj(doc, "series", {"variant", "d"}, {"multiplicities"})
        return PlaneCurve(integer(d["d"], "d"), tuple(integer(m, "multiplicity") for m in d.get("multiplicities", [])))
    if variant == "criteria":
        d = _obj(doc, "series", {"variant", "g", "d", "r"}, {"flags", "cliffordIndex", "codimInComplete"})
        flags = _obj(d.get("flags", {}), "series.flags", set(), _CRITERIA_FLAGS)
        kw = {k: (None if v is None and k == "hyperelliptic" else boolean(v, k)) for k, v in flags.items()}
        opt = {k: integer(d[k], k) for k in ("cliffordIndex", "codimInComplete") if d.get(k) is not None}
        return CriteriaSeries(integer(d["g"], "g"), rat(d["d"], "d"), integer(d["r"], "r"), **kw, **opt)
    raise SchemaError(f"series: unknown variant {variant!r}")


def series_to_json(m: LinearSeriesModel) -> dict:
    if isinstance(m, ExplicitSeries):
        return {
            "variant": "explicit",
            "g": m.g,
            "d": format_rational(m.d),
            "r": m.r,
            "subseries": [{"dPrime": format_rational(dp), "rPrime": rp} for dp, rp in m.subseries],
        }
    if isinstance(m, PlaneCurve):
        return {"variant": "plane-curve", "d": m.d, "multiplicities": list(m.multiplicities)}
    out = {
        "variant": "criteria",
        "g": m.g,
        "d": format_rational(m.d),
        "r": m.r,
        "flags": {k: getattr(m, k) for k in sorted(_CRITERIA_FLAGS) if getattr(m, k) is not None},
    }
    for k in ("cliffordIndex", "codimInComplete"):
        if getattr(m, k) is not None:
            out[k] = getattr(m, k)
    return out


def certificate_from_json(doc: Any) -> StabilityCertificate:
    d = _obj(doc, "certificate", {"kind", "strictness"}, {"provenance", "hypotheses"})
    try:
        return StabilityCertificate(d["kind"], d["strictness"], d.get("provenance", "user"), tuple(d.get("hypotheses", ())))
    except ValueError as exc:
        raise SchemaError(f"certificate: {exc}") from None


def certificates_from_json(doc: Any) -> list[StabilityCertificate]:
    if not isinstance(doc, list):
        raise SchemaError("certificates: expected a list")
    return [certificate_from_json(c) for c in doc]


def certificate_to_json(c: StabilityCertificate) -> dict:
    return {
        "kind": c.kind.value,
        "strictness": c.strictness.value,
        "provenance": c.provenance,
        "hypotheses": list(c.hypotheses),
    }


def certificates_to_json(certs) -> list:
    ordered = sorted(certs, key=lambda c: (c.kind.value, c.strictness.value, c.provenance, c.hypotheses))
    return [certificate_to_json(c) for c in ordered]


def dsb_from_json(doc: Any) -> DSBData:
    d = _obj(doc, "dsb", {"g", "d", "r", "cliffordIndex"}, {"completenessCase", "codim", "h1"})
    opt = {k: integer(d[k], k) for k in ("codim", "h1") if d.get(k) is not None}
    return DSBData(integer(d["g"], "g"), rat(d["d"], "d"), integer(d["r"], "r"), integer(d["cliffordIndex"], "cliffordIndex"), d.get("completenessCase"), **opt)


# ------------------------------------------------------------ highdim

HIGHDIM_FIELDS = {
    "abelian": ({"n", "degPush", "Ln", "LFtop"}, set()),
    "k3": ({"g", "degPush"}, {"L3", "picardOne", "primitive"}),
    "conjectural": ({"n", "KFtop", "h0omegaF", "degPush"}, {"Kfn"}),
    "severi": ({"n", "Kn", "chi"}, {"maximalAlbanese"}),
    "etale": ({"n", "KXn", "KFtop", "chiF", "chiX"}, {"eps1", "eps2", "induction"}),
    "pardini": ({"n", "q"}, set()),
}
_INT_FIELDS = {"n", "g", "q"}
_BOOL_FIELDS = {"picardOne", "primitive", "maximalAlbanese", "induction"}


def highdim_from_json(doc: Any) -> tuple[str, dict]:
    if not isinstance(doc, Mapping) or doc.get("op") not in HIGHDIM_FIELDS:
        raise SchemaError(f"highdim: op must be one of {sorted(HIGHDIM_FIELDS)}")
    op = doc["op"]
    req, opt = HIGHDIM_FIELDS[op]
    d = _obj(doc, f"highdim[{op}]", req | {"op"}, opt)
    params = {}
    for k, v in d.items():
        if k == "op":
            continue
        if k in _INT_FIELDS:
            params[k] = integer(v, k)
        elif k in _BOOL_FIELDS:
            params[k] = boolean(v, k)
        else:
            params[k] = rat(v, k)
    return op, params


def severi_from_params(p: Mapping) -> SeveriInput:
    return SeveriInput(p["n"], p["Kn"], p["chi"], p.get("maximalAlbanese", True))


# ------------------------------------------------------------ reports


def report_to_json(r: BoundReport) -> dict:
    def fmt(x):
        return None if x is None else format_rational(x)

    return {
        "name": r.name,
        "lhs": fmt(r.lhs),
        "rhs": fmt(r.rhs),
        "margin": fmt(r.margin),
        "verdict": r.verdict.value,
        "assumptions": list(r.assumptions),
        "failedPrecondition": r.failed_precondition,
        "notes": list(r.notes),
    }


def report_from_json(doc: Any) -> BoundReport:
    fields = {"name", "lhs", "rhs", "margin", "verdict", "assumptions", "failedPrecondition", "notes"}
    d = _obj(doc, "report", fields)

    def parse(x, where):
        return None if x is None else rat(x, where)

    return BoundReport(
        d["name"],
        parse(d["lhs"], "lhs"),
        parse(d["rhs"], "rhs"),
        parse(d["margin"], "margin"),
        Verdict(d["verdict"]),
        tuple(d["assumptions"]),
        d["failedPrecondition"],
        tuple(d["notes"]),
    )
