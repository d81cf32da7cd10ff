"""Linear stability of curve linear series, and propagation of stability
certificates (linear, Chow, Hilbert, dual span bundle) into f-positivity.

GIT stabilities are never computed: they enter as certificates, either from
the criteria catalog below, from the log-canonical-threshold rule, or from
the caller.
"""

from __future__ import annotations

import ast
import enum
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .exact import Q, RationalLike
from .model import BoundReport, FibposError, FibrationNumerics, f_positivity


class InconsistentFlagsError(FibposError):
    pass


class CertKind(str, enum.Enum):
    LINEAR = "linear"
    CHOW = "Chow"
    HILBERT = "Hilbert"
    MU_DSB = "mu-DSB"
    H_BUNDLE = "H-bundle-semistable"
    MU_RESTRICTION = "mu-restriction-semistable"


class Strictness(str, enum.Enum):
    STABLE = "stable"
    SEMISTABLE = "semistable"
    STRICTLY_SEMISTABLE = "strictly-semistable"
    UNSTABLE = "unstable"

    @property
    def is_semistable(self) -> bool:
        return self is not Strictness.UNSTABLE


@dataclass(frozen=True)
class StabilityCertificate:
    kind: CertKind
    strictness: Strictness
    provenance: str = "user"
    hypotheses: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CertKind(self.kind))
        object.__setattr__(self, "strictness", Strictness(self.strictness))
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))

    @property
    def key(self) -> tuple[CertKind, Strictness]:
        return (self.kind, self.strictness)

    def __str__(self) -> str:
        return f"{self.kind.value} {self.strictness.value} [{self.provenance}]"


def holds(certs: Iterable[StabilityCertificate], kind: CertKind, stable: bool = False) -> bool:
    """Whether ``certs`` certify ``kind`` semistability (or stability)."""
    for c in certs:
        if c.kind is not kind:
            continue
        if stable and c.strictness is Strictness.STABLE:
            return True
        if not stable and c.strictness.is_semistable:
            return True
    return False


# ------------------------------------------------------------ series models


class LinStabVerdict(str, enum.Enum):
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly-semistable"
    UNSTABLE = "unstable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ExplicitSeries:
    """A ``g^{r-1}_d`` with an explicit list of subseries ``(d', r')``."""

    g: int
    d: Fraction
    r: int
    subseries: tuple[tuple[Fraction, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", Q(self.d))
        subs = tuple((Q(dp), int(rp)) for dp, rp in self.subseries)
        object.__setattr__(self, "subseries", subs)
        if self.r < 2:
            raise FibposError("series dimension r must be >= 2")
        for dp, rp in subs:
            if not (2 <= rp <= self.r and 0 < dp <= self.d):
                raise FibposError(f"malformed subseries ({dp}, {rp})")


@dataclass(frozen=True)
class PlaneCurve:
    d: int
    multiplicities: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "multiplicities", tuple(self.multiplicities))
        if self.d < 1:
            raise FibposError("degree must be >= 1")
        for m in self.multiplicities:
            if not 2 <= m <= self.d:
                raise FibposError(f"singular point multiplicity {m} outside [2, {self.d}]")


@dataclass(frozen=True)
class CriteriaSeries:
    """A series described only by numerical invariants and asserted flags."""

    g: int
    d: Fraction
    r: int
    complete: bool = False
    hyperelliptic: bool | None = None
    veryAmple: bool = False
    genericProjection: bool = False
    canonical: bool = False
    cliffordIndex: int | None = None
    codimInComplete: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", Q(self.d))
        canonical_numbers = self.d == 2 * self.g - 2 and self.r == self.g
        if self.canonical and not canonical_numbers:
            raise InconsistentFlagsError(f"canonical series needs d = 2g-2 and r = g, got d={self.d}, r={self.r}")
        if self.canonical and not self.complete:
            raise InconsistentFlagsError("the canonical series is complete")
        if self.complete and self.d >= 2 * self.g - 1 and self.r != self.d + 1 - self.g:
            raise InconsistentFlagsError("complete nonspecial series has r = d + 1 - g")
        if self.complete and self.codimInComplete not in (None, 0):
            raise InconsistentFlagsError("a complete series has codimension 0")
        if self.is_canonical and self.veryAmple and self.hyperelliptic:
            raise InconsistentFlagsError("the canonical map of a hyperelliptic curve is not an embedding")

    @property
    def is_canonical(self) -> bool:
        # a complete g^{g-1}_{2g-2} is the canonical series by Riemann-Roch
        return self.canonical or (self.complete and self.d == 2 * self.g - 2 and self.r == self.g)

    def facts(self) -> dict:
        out = {
            "curve": True,
            "g": self.g,
            "d": self.d,
            "r": self.r,
            "complete": self.complete,
            "canonical": self.is_canonical,
            "veryAmple": self.veryAmple,
            "genericProjection": self.genericProjection,
        }
        if self.hyperelliptic is not None:
            out["hyperelliptic"] = self.hyperelliptic
        codim = 0 if self.complete else self.codimInComplete
        if codim is not None:
            out["codim"] = codim
        if self.cliffordIndex is not None:
            out["cliff"] = self.cliffordIndex
        return out


LinearSeriesModel = Union[ExplicitSeries, PlaneCurve, CriteriaSeries]


@dataclass(frozen=True)
class LinStabResult:
    verdict: LinStabVerdict
    witness: tuple[Fraction, int] | None = None
    min_slope: Fraction | None = None
    slope: Fraction | None = None
    certificates: tuple[StabilityCertificate, ...] = ()


def _explicit_verdict(d: Fraction, r: int, subseries: Sequence[tuple[Fraction, int]]) -> LinStabResult:
    target = d / (r - 1)
    if not subseries:
        return LinStabResult(LinStabVerdict.STABLE, None, None, target)
    witness = min(subseries, key=lambda s: (s[0] / (s[1] - 1), s[0], s[1]))
    low = witness[0] / (witness[1] - 1)
    if low > target:
        verdict = LinStabVerdict.STABLE
    elif low == target:
        verdict = LinStabVerdict.STRICTLY_SEMISTABLE
    else:
        verdict = LinStabVerdict.UNSTABLE
    return LinStabResult(verdict, witness, low, target)


def plane_curve_projections(d: int, mults: Sequence[int]) -> list[tuple[Fraction, int]]:
    """Pencils cut by lines through a point: ``g^1_{d-m}`` from a point of multiplicity ``m``.

    A reduced plane curve always has smooth points, so ``m = 1`` is included
    once ``d >= 2``; points off the curve give ``g^1_d``.
    """
    subs = [(Fraction(d), 2)]
    for m in sorted(set(mults) | ({1} if d >= 2 else set())):
        if d - m > 0:
            subs.append((Fraction(d - m), 2))
    return subs


def plane_curve_stability(d: int, mults: Sequence[int] = ()) -> LinStabVerdict:
    """Max-multiplicity criterion: compare the worst point against ``d/2``."""
    PlaneCurve(d, tuple(mults))
    worst = max(list(mults) + [1])
    twice = 2 * worst
    if twice < d:
        return LinStabVerdict.STABLE
    if twice == d:
        return LinStabVerdict.STRICTLY_SEMISTABLE
    return LinStabVerdict.UNSTABLE


def plane_curve_bruteforce(d: int, mults: Sequence[int] = ()) -> LinStabResult:
    """Projection oracle: explicit minimization over point projections.

    A projection from a point of multiplicity ``d`` collapses the curve; its
    degree-0 image is treated as the extreme destabilizing subseries.
    """
    if any(m == d for m in mults) or d == 1:
        return LinStabResult(LinStabVerdict.UNSTABLE, (Fraction(0), 2), Fraction(0), Fraction(d, 2))
    return _explicit_verdict(Fraction(d), 3, plane_curve_projections(d, mults))


def is_linearly_stable(m: LinearSeriesModel) -> LinStabResult:
    if isinstance(m, ExplicitSeries):
        return _explicit_verdict(m.d, m.r, m.subseries)
    if isinstance(m, PlaneCurve):
        res = plane_curve_bruteforce(m.d, m.multiplicities)
        verdict = plane_curve_stability(m.d, m.multiplicities)
        return LinStabResult(verdict, res.witness, res.min_slope, res.slope)
    if isinstance(m, CriteriaSeries):
        certs = tuple(criteria_certify(m))
        if holds(certs, CertKind.LINEAR, stable=True):
            verdict = LinStabVerdict.STABLE
        elif any(c.kind is CertKind.LINEAR and c.strictness is Strictness.STRICTLY_SEMISTABLE for c in certs):
            verdict = LinStabVerdict.STRICTLY_SEMISTABLE
        else:
            # a bare semistability certificate does not decide strictness
            verdict = LinStabVerdict.UNKNOWN
        return LinStabResult(verdict, None, None, m.d / (m.r - 1), certs)
    raise TypeError(f"unsupported series model {type(m).__name__}")


# ------------------------------------------------------------ rule catalog

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_CMP = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}


class _Missing(Exception):
    pass


def _eval(node: ast.AST, facts: Mapping):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or isinstance(node.value, str):
            return node.value
        if isinstance(node.value, int):
            return Fraction(node.value)
        raise FibposError(f"unsupported literal {node.value!r}")
    if isinstance(node, ast.Name):
        if node.id not in facts:
            raise _Missing(node.id)
        v = facts[node.id]
        return Fraction(v) if isinstance(v, int) and not isinstance(v, bool) else v
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        return not _eval(node.operand, facts)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval(node.operand, facts)
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left, facts), _eval(node.right, facts))
    if isinstance(node, ast.BoolOp):
        vals = [_eval(v, facts) for v in node.values]
        return all(vals) if isinstance(node.op, ast.And) else any(vals)
    if isinstance(node, ast.Compare):
        left = _eval(node.left, facts)
        for op, comp in zip(node.ops, node.comparators):
            if type(op) not in _CMP:
                raise FibposError("unsupported comparison")
            right = _eval(comp, facts)
            if not _CMP[type(op)](left, right):
                return False
            left = right
        return True
    raise FibposError(f"unsupported expression element {type(node).__name__}")


def condition_holds(expr: str, facts: Mapping) -> bool:
    """Evaluate a catalog condition; a missing fact makes it false."""
    try:
        return bool(_eval(ast.parse(expr, mode="eval").body, facts))
    except _Missing:
        return False


@dataclass(frozen=True)
class Rule:
    id: str
    when: tuple[str, ...]
    then: tuple[tuple[CertKind, Strictness], ...]
    source: str = ""

    @classmethod
    def from_json(cls, doc: Mapping) -> Rule:
        return cls(
            doc["id"],
            tuple(doc["when"]),
            tuple((CertKind(k), Strictness(s)) for k, s in doc["then"]),
            doc.get("source", ""),
        )

    def fire(self, facts: Mapping) -> list[StabilityCertificate]:
        if not all(condition_holds(c, facts) for c in self.when):
            return []
        return [StabilityCertificate(k, s, self.id, self.when) for k, s in self.then]


DEFAULT_CATALOG: tuple[Rule, ...] = tuple(
    Rule.from_json(doc)
    for doc in [
        {
            "id": "curve.canonical.semistable",
            "when": ["curve", "canonical", "g >= 2"],
            "then": [["linear", "semistable"]],
            "source": "Clifford + Riemann-Roch",
        },
        {
            "id": "curve.canonical.non-hyperelliptic",
            "when": ["curve", "canonical", "g >= 2", "hyperelliptic == False"],
            "then": [["linear", "stable"]],
            "source": "canonical series stable iff non-hyperelliptic",
        },
        {
            "id": "curve.canonical.hyperelliptic",
            "when": ["curve", "canonical", "g >= 2", "hyperelliptic == True"],
            "then": [["linear", "strictly-semistable"]],
            "source": "canonical series stable iff non-hyperelliptic",
        },
        {
            "id": "curve.degree-2g+1",
            "when": ["curve", "complete", "d >= 2*g + 1"],
            "then": [["linear", "stable"]],
            "source": "line bundles of degree >= 2g+1 (Mumford)",
        },
        {
            "id": "curve.small-codimension",
            "when": ["curve", "d >= 2*g", "codim <= (d - 2*g)/2"],
            "then": [["linear", "semistable"]],
            "source": "base-point-free subseries of small codimension (Mistretta)",
        },
        {
            "id": "curve.generic-projection",
            "when": ["curve", "genericProjection", "hyperelliptic == False", "g >= 2"],
            "then": [["linear", "stable"]],
            "source": "generic low-codimension projections of the canonical curve",
        },
        {
            "id": "abelian.complete",
            "when": ["variety == 'abelian'", "complete"],
            "then": [["Hilbert", "semistable"]],
            "source": "abelian varieties embedded by complete linear systems (Kempf)",
        },
        {
            "id": "hypersurface.smooth",
            "when": ["variety == 'hypersurface'", "smooth", "degree >= 3"],
            "then": [["Hilbert", "stable"], ["Chow", "stable"]],
            "source": "smooth hypersurfaces of degree >= 3",
        },
        {
            "id": "k3.picard-one",
            "when": ["variety == 'K3'", "picard == 1", "degree >= 12"],
            "then": [["Hilbert", "semistable"]],
            "source": "K3 surfaces of Picard number 1 and degree >= 12 (Morrison)",
        },
    ]
)


def certify_facts(facts: Mapping, catalog: Sequence[Rule] = DEFAULT_CATALOG) -> list[StabilityCertificate]:
    out: list[StabilityCertificate] = []
    for rule in catalog:
        out.extend(rule.fire(facts))
    return out


def criteria_certify(m: CriteriaSeries, catalog: Sequence[Rule] = DEFAULT_CATALOG) -> list[StabilityCertificate]:
    return certify_facts(m.facts(), catalog)


# ------------------------------------------------------------ dual span bundle


class MSCase(str, enum.Enum):
    COMPLETE = "complete"
    LOW_DEGREE = "low-degree"
    SMALL_CODIM = "small-codimension"
    LARGE_DEGREE = "large-degree"


@dataclass(frozen=True)
class DSBData:
    g: int
    d: Fraction
    r: int
    cliffordIndex: int
    completenessCase: MSCase | None = None
    codim: int | None = None
    h1: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", Q(self.d))
        if self.completenessCase is not None:
            object.__setattr__(self, "completenessCase", MSCase(self.completenessCase))

    def ms_inequality(self) -> bool:
        return self.d - 2 * (self.r - 1) <= self.cliffordIndex

    def case_holds(self) -> tuple[bool, str]:
        """Check the numeric side of the completeness case where the data allows."""
        case = self.completenessCase
        if case is None:
            return False, "no completeness case"
        if case is MSCase.COMPLETE:
            return (self.codim in (None, 0)), "V = H^0(L)"
        if case is MSCase.LOW_DEGREE:
            return self.d <= 2 * self.g - self.cliffordIndex + 1, "deg L <= 2g - Cliff + 1"
        if case is MSCase.SMALL_CODIM:
            if self.codim is None or self.h1 is None or self.r <= 2:
                return True, "codim V < h^1(L) + g/(dim V - 2) (asserted)"
            return self.codim < self.h1 + Fraction(self.g, self.r - 2), "codim V < h^1(L) + g/(dim V - 2)"
        if self.codim is None:
            return self.d >= 2 * self.g, "deg L >= 2g, codim bound asserted"
        return (self.d >= 2 * self.g and self.codim <= (self.d - 2 * self.g) / 2), "deg L >= 2g, codim <= (deg L - 2g)/2"


@dataclass(frozen=True)
class DSBResult:
    certificate: StabilityCertificate
    equivalence: bool
    reasons: tuple[str, ...] = ()


def dsb_implication(cert: StabilityCertificate, data: DSBData) -> DSBResult:
    """mu-(semi)stability of the dual span bundle gives linear (semi)stability;
    under the Clifford-index inequality and a completeness case the two are
    equivalent."""
    if cert.kind is not CertKind.MU_DSB:
        raise FibposError("dsb_implication needs a mu-DSB certificate")
    linear = StabilityCertificate(CertKind.LINEAR, cert.strictness, "dsb.forward", (str(cert),))
    reasons = []
    ok_ineq = data.ms_inequality()
    reasons.append(f"d - 2(r-1) = {data.d - 2 * (data.r - 1)} {'<=' if ok_ineq else '>'} Cliff = {data.cliffordIndex}")
    ok_case, why = data.case_holds()
    reasons.append(why + (" holds" if ok_case else " fails"))
    return DSBResult(linear, ok_ineq and ok_case, tuple(reasons))


def linear_to_dsb(cert: StabilityCertificate, data: DSBData) -> StabilityCertificate | None:
    """Reverse edge, available only when the equivalence conditions hold."""
    if cert.kind is not CertKind.LINEAR:
        raise FibposError("linear_to_dsb needs a linear certificate")
    probe = StabilityCertificate(CertKind.MU_DSB, cert.strictness)
    if not dsb_implication(probe, data).equivalence:
        return None
    return StabilityCertificate(CertKind.MU_DSB, cert.strictness, "dsb.reverse", (str(cert),))


# ------------------------------------------------------------ lattice


def _derive(c: StabilityCertificate, very_ample: bool) -> list[tuple[CertKind, Strictness, str]]:
    out = []
    if c.strictness in (Strictness.STABLE, Strictness.STRICTLY_SEMISTABLE):
        out.append((c.kind, Strictness.SEMISTABLE, "weaken"))
    if c.kind is CertKind.LINEAR and very_ample:
        if c.strictness is Strictness.STABLE:
            out.append((CertKind.CHOW, Strictness.STABLE, "linear-stable=>Chow-stable"))
            out.append((CertKind.HILBERT, Strictness.STABLE, "linear-stable=>Hilbert-stable"))
        if c.strictness is Strictness.SEMISTABLE:
            out.append((CertKind.CHOW, Strictness.SEMISTABLE, "linear-semistable=>Chow-semistable"))
    if c.kind is CertKind.CHOW and c.strictness is Strictness.STABLE:
        out.append((CertKind.HILBERT, Strictness.STABLE, "Chow-stable=>Hilbert-stable"))
    if c.kind is CertKind.HILBERT and c.strictness is Strictness.SEMISTABLE:
        out.append((CertKind.CHOW, Strictness.SEMISTABLE, "Hilbert-semistable=>Chow-semistable"))
    return out


def propagate_certificates(
    certs: Iterable[StabilityCertificate], very_ample: bool = False
) -> frozenset[StabilityCertificate]:
    """Least fixed point of the implication rules.

    Linear strict semistability deliberately has no edge to Hilbert
    semistability. A derived certificate is added only when no certificate
    with the same (kind, strictness) is present, so the result does not
    depend on rule order.
    """
    result = set(certs)
    have = {c.key for c in result}
    frontier = sorted(result, key=_cert_sort_key)
    while frontier:
        new = []
        for c in frontier:
            for kind, strict, rule in _derive(c, very_ample):
                if (kind, strict) in have:
                    continue
                hyp = (str(c), "very ample") if rule.startswith("linear") else (str(c),)
                d = StabilityCertificate(kind, strict, rule, hyp)
                have.add(d.key)
                result.add(d)
                new.append(d)
        frontier = sorted(new, key=_cert_sort_key)
    return frozenset(result)


def _cert_sort_key(c: StabilityCertificate):
    return (c.kind.value, c.strictness.value, c.provenance, c.hypotheses)


def lee_lct_rule(r: int, d: RationalLike, lct: RationalLike) -> StabilityCertificate | None:
    """Chow (semi)stability from the log canonical threshold of the Chow form."""
    d, lct = Q(d), Q(lct)
    threshold = Fraction(r + 1) / d
    hyp = (f"lct = {lct}", f"(r+1)/d = {threshold}")
    if lct > threshold:
        return StabilityCertificate(CertKind.CHOW, Strictness.STABLE, "Lee.lct", hyp)
    if lct == threshold:
        return StabilityCertificate(CertKind.CHOW, Strictness.SEMISTABLE, "Lee.lct", hyp)
    return None


@dataclass(frozen=True)
class CHGates:
    """Which hypotheses of the Cornalba-Harris and Bost routes hold."""

    hilbert: bool
    chow: bool
    generating: bool
    nef_vertical: bool
    star: bool
    bpf: bool
    rel_nef: bool
    paths: tuple[str, ...] = field(default=())


def ch_gates(f: FibrationNumerics, certs: Iterable[StabilityCertificate]) -> CHGates:
    certs = list(certs)
    fl = f.flags
    hilbert = holds(certs, CertKind.HILBERT)
    # Chow stability also feeds the Hilbert route
    chow_stable = holds(certs, CertKind.CHOW, stable=True)
    chow = holds(certs, CertKind.CHOW)
    generating = fl.sheafGenerating
    nef_vertical = (fl.lineBundleNef or fl.lineBundleRelNef) and fl.baseLocusVertical
    star = fl.starCondition and (fl.normallyGenerated or fl.pushforwardPowersNef)
    bpf = fl.basePointFree or fl.sheafGenerating
    paths = []
    if (hilbert or chow_stable) and (generating or nef_vertical or star):
        sheaf = "generating" if generating else ("nef + vertical base locus" if nef_vertical else "condition (*)")
        paths.append(f"Cornalba-Harris: Hilbert semistable fibres, {sheaf}")
    if chow and bpf and fl.lineBundleRelNef:
        paths.append("Bost: Chow semistable fibres, base-point free, L relatively nef")
    return CHGates(hilbert or chow_stable, chow, generating, nef_vertical, star, bpf, fl.lineBundleRelNef, tuple(paths))


def ch_bound_from_certificate(
    f: FibrationNumerics, certs: Iterable[StabilityCertificate], very_ample: bool = False
) -> BoundReport:
    """f-positivity emitted through the Cornalba-Harris or Bost route.

    Certificates are closed under the implication lattice first.
    """
    gates = ch_gates(f, propagate_certificates(certs, very_ample))
    name = "f-positivity (GIT certificate)"
    if not gates.paths:
        return BoundReport.not_applicable(name, "no Cornalba-Harris or Bost route has all gates satisfied", f.flags.asserted())
    report = f_positivity(f)
    out = BoundReport.compare(name, report.lhs, report.rhs, gates.paths + f.flags.asserted())
    if out.margin < 0:
        return out.as_contradiction("contradiction: certificate inconsistent with numerics")
    return out


def linear_stability_report(m: LinearSeriesModel) -> BoundReport:
    """Linear stability as an inequality ``min d'/(r'-1) >= d/(r-1)``."""
    res = is_linearly_stable(m)
    name = "linear stability"
    if res.verdict is LinStabVerdict.UNKNOWN:
        return BoundReport.not_applicable(name, "no criterion fired", rhs=res.slope)
    if res.min_slope is None:
        # certified without an explicit subseries, or vacuous
        note = [str(c) for c in res.certificates]
        if res.verdict is LinStabVerdict.STRICTLY_SEMISTABLE:
            return BoundReport.compare(name, res.slope, res.slope, note)
        return BoundReport.not_applicable(name, "no explicit subseries to evaluate", note, rhs=res.slope, notes=[f"verdict {res.verdict.value}"])
    return BoundReport.compare(name, res.min_slope, res.slope, [f"witness subseries {res.witness}"])
