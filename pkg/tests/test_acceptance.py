"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import itertools
import math
import random
import time
from fractions import Fraction

from fibpos.exact import poly_eventual_sign, sign
from fibpos.grr import grr_polynomial_canonical, hfixed_hilbert_bound, hfixed_hilbert_limit, sym_slope_identity
from fibpos.highdim import PardiniLedger, abelian_bound, k3_bound, pardini_limit
from fibpos.linstab import (
    CertKind,
    CriteriaSeries,
    StabilityCertificate,
    Strictness,
    ch_bound_from_certificate,
    ch_gates,
    criteria_certify,
    holds,
    plane_curve_bruteforce,
    plane_curve_stability,
    propagate_certificates,
)
from fibpos.model import FibrationFlags, FibrationNumerics, SurfaceCanonicalData, Verdict, ch_invariant, f_positivity, slope_inequality
from fibpos.moriwaki import KernelBundleData, kernel_delta, moriwaki_nodal_bound
from fibpos.nodal import (
    FibreDualGraph,
    adjunction_degree,
    ch_nodal_rhs,
    disconnecting_nodes,
    NodalCounts,
    socket_components,
)
from fibpos.xiao import harmonic_coefficient, linstab_identity, worst_case_filtration

from oracles import brute_bridges, brute_socket, canonical_multigraphs

RESULTS: list[str] = []


def criterion(n: int, text: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}" + (f" [{detail}]" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


def grid():
    for g in range(2, 11):
        for K in range(0, 41):
            for chi in range(1, 11):
                yield SurfaceCanonicalData(g, 0, K, chi)


def test_criterion_01_slope_equivalence():
    start = time.perf_counter()
    bad = []
    count = 0
    for s in grid():
        count += 1
        fp = f_positivity(s.numerics()).verdict
        direct = Verdict.from_margin(s.Kf2 - Fraction(4 * (s.g - 1), s.g) * s.chi_f)
        if fp is not direct:
            bad.append((s.g, s.Kf2, s.chi_f))
    elapsed = time.perf_counter() - start
    criterion(1, "f-positivity verdict equals slope-inequality verdict", not bad and elapsed < 5,
              f"{count} points, {len(bad)} mismatches, {elapsed:.2f}s")


def test_criterion_02_grr_leading_term():
    bad = []
    for s in grid():
        p = grr_polynomial_canonical(s)
        e = ch_invariant(s.numerics())
        if p.coefficient(2) != e / 2 or (e != 0 and poly_eventual_sign(p) != sign(e)):
            bad.append((s.g, s.Kf2, s.chi_f))
    criterion(2, "GRR leading coefficient e/2 and eventual sign of e", not bad, f"{len(bad)} mismatches")


def test_criterion_03_finite_h_hilbert_bound():
    not_decreasing = [
        (g, h)
        for g in range(2, 13)
        for h in range(2, 50)
        if not hfixed_hilbert_bound(g, h) > hfixed_hilbert_bound(g, h + 1)
    ]
    limits = all(hfixed_hilbert_limit(g) == Fraction(4 * (g - 1), g) for g in range(2, 13))
    at_3_2 = hfixed_hilbert_bound(3, 2) == 3
    criterion(
        3,
        "finite-h Hilbert bound strictly decreasing in h, limit 4(g-1)/g, value 3 at (3,2)",
        not not_decreasing and limits and at_3_2,
        f"limits {'ok' if limits else 'wrong'}, (3,2) {'ok' if at_3_2 else 'wrong'}, "
        f"non-decreasing steps (g,h)->(g,h+1): {not_decreasing}",
    )


def test_criterion_04_xiao_sharpness():
    start = time.perf_counter()
    bad = []
    for g in range(2, 7):
        for chi in range(1, 6):
            res = worst_case_filtration(g, chi, g)
            if res.minRatio != Fraction(4 * (g - 1), g):
                bad.append((g, chi, res.minRatio))
    elapsed = time.perf_counter() - start
    criterion(4, "worst-case Xiao ratio is exactly 4(g-1)/g", not bad and elapsed < 60,
              f"{len(bad)} mismatches, {elapsed:.2f}s")


def test_criterion_05_moriwaki_dominance():
    bad = []
    for g in range(2, 11):
        for k in range(7):
            for l in range(7):
                for r in range(k // 2 + 1):
                    c = NodalCounts.of(k, l, r)
                    m = moriwaki_nodal_bound(g, 1, c).rhs
                    ch = ch_nodal_rhs(g, Fraction(1), c)
                    if m < ch or (m == ch) != (g == 2 or l == 0):
                        bad.append((g, k, l, r))
    criterion(5, "Moriwaki nodal rhs dominates, equality iff g=2 or l=0", not bad, f"{len(bad)} mismatches")


def test_criterion_06_kernel_delta_identity():
    rnd = random.Random(2026)
    bad = 0
    for _ in range(200):
        r = rnd.randint(2, 10)
        k = KernelBundleData.generating(
            r,
            Fraction(rnd.randint(-60, 60), rnd.randint(1, 9)),
            Fraction(rnd.randint(1, 40), rnd.randint(1, 5)),
            Fraction(rnd.randint(-30, 30), rnd.randint(1, 7)),
            Fraction(rnd.randint(0, 12), rnd.randint(1, 3)),
        )
        if kernel_delta(k) != ch_invariant(k.numerics()) - 2 * (r - 1) * k.c:
            bad += 1
    criterion(6, "delta = e - 2(r-1)c on 200 generating instances", bad == 0, f"{bad} mismatches")


def test_criterion_07_nodal_oracle():
    graphs = 0
    bad = []
    for n, edges in canonical_multigraphs(6, 8):
        # all-rational and mixed-genus labellings of each graph
        for genera in ((0,) * n, tuple(i % 2 for i in range(n))):
            gph = FibreDualGraph(genera, tuple(edges))
            graphs += 1
            sock, r = brute_socket(gph)
            got = socket_components(gph)
            degree_sum = sum(adjunction_degree(gph, v) for v in range(n))
            if (
                disconnecting_nodes(gph) != brute_bridges(gph)
                or got.vertices != sock
                or got.rSocket != r
                or degree_sum != 2 * gph.arithmetic_genus() - 2
            ):
                bad.append((genera, edges))
    criterion(7, "bridges and socket match edge-removal oracle, adjunction sum 2p_a-2", not bad,
              f"{graphs} labelled graphs, {len(bad)} mismatches")


def test_criterion_08_plane_curves():
    checked = 0
    bad = []
    for d in range(1, 11):
        for size in range(0, 6):
            for mults in itertools.combinations_with_replacement(range(2, d + 1), size):
                checked += 1
                if plane_curve_bruteforce(d, mults).verdict is not plane_curve_stability(d, mults):
                    bad.append((d, mults))
    criterion(8, "projection oracle matches the max-multiplicity <= d/2 criterion", not bad,
              f"{checked} profiles, {len(bad)} mismatches")


def test_criterion_09_certificate_lattice():
    rnd = random.Random(9)
    universe = [StabilityCertificate(k, s) for k in CertKind for s in Strictness]
    closure_ok = True
    for _ in range(500):
        a = set(rnd.sample(universe, rnd.randint(0, 6)))
        b = a | set(rnd.sample(universe, rnd.randint(0, 4)))
        va = rnd.random() < 0.5
        ca, cb = propagate_certificates(a, va), propagate_certificates(b, va)
        if not (ca >= a and propagate_certificates(ca, va) == ca and {c.key for c in cb} >= {c.key for c in ca}):
            closure_ok = False
    chain_ok = True
    for g in range(3, 9):
        series = CriteriaSeries(g, 2 * g - 2, g, complete=True, canonical=True, hyperelliptic=False, veryAmple=True)
        certs = criteria_certify(series)
        closed = propagate_certificates(certs, very_ample=True)
        s = SurfaceCanonicalData(g, 0, 4 * (g - 1) + 1, g)
        n = s.numerics()
        f = FibrationNumerics(2, n.Ln, n.LFtop, n.degG, n.rankG, FibrationFlags(sheafGenerating=True))
        gates = ch_gates(f, closed)
        report = ch_bound_from_certificate(f, certs, very_ample=True)
        chain_ok &= (
            holds(certs, CertKind.LINEAR, stable=True)
            and holds(closed, CertKind.CHOW, stable=True)
            and holds(closed, CertKind.HILBERT, stable=True)
            and any(p.startswith("Cornalba-Harris") for p in gates.paths)
            and report.verdict is slope_inequality(s).verdict is Verdict.HOLDS_STRICTLY
        )
    criterion(9, "closure idempotent and monotone; canonical chain fires for g=3..8", closure_ok and chain_ok,
              f"closure {'ok' if closure_ok else 'broken'}, chain {'ok' if chain_ok else 'broken'}")


def test_criterion_10_sym_identity():
    rnd = random.Random(10)
    degrees = [Fraction(rnd.randint(-1000, 1000), rnd.randint(1, 40)) for _ in range(50)]
    ok = all(sym_slope_identity(r, d, h) for r in range(1, 9) for h in range(1, 13) for d in degrees)
    criterion(10, "mu(Sym^h) = h mu for rank <= 8, h <= 12, 50 degrees", ok)


def test_criterion_11_highdim_coefficients():
    abel = all(
        abelian_bound(n, 1, 0, math.factorial(n - 1)).rhs == math.factorial(n) for n in range(2, 7)
    )
    k3 = k3_bound(7, 2, None).rhs
    criterion(11, "abelian coefficient n! for n=2..6; K3 rhs at (7, 2) is 9", abel and k3 == 9, f"K3 rhs {k3}")


def test_criterion_12_pardini_limit():
    outs = {(n, q): pardini_limit(PardiniLedger.standard(q), n) for n in (2, 3) for q in range(1, 6)}
    ok = all(r.kCoeff == 1 and r.chiCoeff == 2 * math.factorial(n) for (n, _), r in outs.items())
    shown = sorted({str(r) for r in outs.values()})
    criterion(12, "covering limit gives K^n >= 2 n! chi, independent of q", ok, "; ".join(shown))


def test_criterion_13_harmonic_identity():
    ds = [Fraction(k, m) for k in (1, 2, 5, 12, 37) for m in (1, 3, 7)]
    ok = all(
        linstab_identity(d, r) and harmonic_coefficient(d / (r - 1), d) == 2 * d / r
        for r in range(2, 51)
        for d in ds
    )
    criterion(13, "2ad/(a+d) = 2d/r for a = d/(r-1), r=2..50", ok)
