from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibpos import schemas as sc
from fibpos.linstab import CertKind, CriteriaSeries, ExplicitSeries, PlaneCurve, StabilityCertificate, Strictness
from fibpos.model import BoundReport, FibrationFlags, FibrationNumerics, SurfaceCanonicalData, Verdict
from fibpos.moriwaki import KernelBundleData, KernelCase
from fibpos.nodal import FibreDualGraph, NodalCounts
from fibpos.xiao import HNData, IntersectionTable


def test_rationals():
    assert sc.rat("3/6") == Fraction(1, 2)
    assert sc.rat(4) == 4
    with pytest.raises(sc.SchemaError, match="floats"):
        sc.rat(0.5)
    with pytest.raises(sc.SchemaError):
        sc.rat("x")
    with pytest.raises(sc.SchemaError):
        sc.integer(True)
    assert sc.to_json({"a": Fraction(4, 2), "b": [Fraction(1, 3)], "c": Verdict.VIOLATED}) == {
        "a": "2",
        "b": ["1/3"],
        "c": "violated",
    }


def test_unknown_and_missing_fields():
    with pytest.raises(sc.SchemaError, match="unknown field"):
        sc.surface_from_json({"g": 2, "Kf2": 6, "chi_f": 1, "K": 3})
    with pytest.raises(sc.SchemaError, match="missing field"):
        sc.surface_from_json({"g": 2, "Kf2": 6})
    with pytest.raises(sc.SchemaError):
        sc.counts_from_json([1, 2])


def test_model_round_trips():
    f = FibrationNumerics(3, Fraction(7, 2), 4, 1, 3, FibrationFlags(lineBundleNef=True, starCondition=True))
    assert sc.fibration_from_json(sc.fibration_to_json(f)) == f
    s = SurfaceCanonicalData(3, 1, Fraction(17, 2), 2, relativelyMinimal=False)
    assert sc.surface_from_json(sc.surface_to_json(s)) == s
    assert sc.surface_from_json({"g": 2, "Kf2": "6", "chi_f": 1}).b == 0


def test_other_round_trips():
    gph = FibreDualGraph((0, 1, 0), ((0, 1), (1, 2), (2, 2)))
    assert sc.fibre_graph_from_json(sc.fibre_graph_to_json(gph)) == gph
    c = NodalCounts.of(3, 1, 1)
    assert sc.counts_from_json(sc.counts_to_json(c)) == c
    hn = HNData.of((3, 1, 0), (Fraction(1, 2), 2, 2))
    assert sc.filtration_from_json(sc.filtration_to_json(hn)) == hn
    t = IntersectionTable(3, {(1, 1): Fraction(12), (1, 2): Fraction(5, 3)})
    assert sc.itable_from_json(sc.itable_to_json(t)) == t
    k = KernelBundleData(2, 5, 2, 6, 2, 1, 0, KernelCase.RELNEF_VERTICAL)
    assert sc.kernel_bundle_from_json(sc.kernel_bundle_to_json(k)) == k
    for m in (
        ExplicitSeries(3, 4, 3, ((3, 2),)),
        PlaneCurve(6, (3, 2)),
        CriteriaSeries(4, 6, 4, complete=True, hyperelliptic=False, canonical=True),
        CriteriaSeries(3, 10, 6, codimInComplete=2),
    ):
        assert sc.series_from_json(json.loads(json.dumps(sc.series_to_json(m)))) == m


def test_series_variant_errors():
    with pytest.raises(sc.SchemaError, match="variant"):
        sc.series_from_json({"d": 4})
    with pytest.raises(sc.SchemaError, match="unknown variant"):
        sc.series_from_json({"variant": "quartic"})


def test_certificates():
    c = StabilityCertificate(CertKind.CHOW, Strictness.SEMISTABLE, "Lee.lct", ("lct = 1/2",))
    assert sc.certificates_from_json(sc.certificates_to_json([c])) == [c]
    assert sc.certificate_from_json({"kind": "linear", "strictness": "stable"}).provenance == "user"
    with pytest.raises(sc.SchemaError):
        sc.certificate_from_json({"kind": "GIT", "strictness": "stable"})
    with pytest.raises(sc.SchemaError):
        sc.certificates_from_json({"kind": "linear"})


def test_dsb_and_highdim():
    d = sc.dsb_from_json({"g": 5, "d": 8, "r": 5, "cliffordIndex": 2, "completenessCase": "complete"})
    assert d.ms_inequality() and d.case_holds()[0]
    op, p = sc.highdim_from_json({"op": "k3", "g": 7, "degPush": "2", "L3": 10})
    assert op == "k3" and p == {"g": 7, "degPush": 2, "L3": 10}
    with pytest.raises(sc.SchemaError, match="op must be one of"):
        sc.highdim_from_json({"op": "fano"})
    with pytest.raises(sc.SchemaError, match="missing"):
        sc.highdim_from_json({"op": "pardini", "n": 2})
    with pytest.raises(sc.SchemaError):
        sc.highdim_from_json({"op": "pardini", "n": "2", "q": 1})


reports = st.one_of(
    st.builds(
        BoundReport.compare,
        st.text(max_size=10),
        st.fractions(max_denominator=50),
        st.fractions(max_denominator=50),
        st.lists(st.text(max_size=8), max_size=3),
    ),
    st.builds(BoundReport.not_applicable, st.text(max_size=10), st.text(min_size=1, max_size=10)),
)


@given(reports)
def test_report_round_trip(r):
    doc = sc.report_to_json(r)
    assert sc.report_from_json(json.loads(sc.dumps(doc))) == r


def test_contradiction_report_round_trip():
    r = BoundReport.compare("x", -1, 1).as_contradiction("contradiction: certificate inconsistent with numerics")
    assert sc.report_from_json(sc.report_to_json(r)) == r


def test_load_path(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{", encoding="utf-8")
    with pytest.raises(sc.SchemaError, match="invalid JSON"):
        sc.load_path(p)
