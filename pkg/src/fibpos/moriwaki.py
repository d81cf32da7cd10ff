"""Bogomolov discriminant of the kernel bundle and the bounds it yields."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .exact import Q, RationalLike
from .linstab import CertKind, StabilityCertificate, holds
from .model import BoundReport, FibposError, FibrationFlags, FibrationNumerics, ch_invariant, f_positivity
from .nodal import NodalCounts, ch_nodal_rhs, moriwaki_nodal_rhs, relative_minimality_check


class FlagMismatchError(FibposError):
    pass


class KernelCase(str, enum.Enum):
    GENERATING = "generating-codim-2"
    RELNEF_VERTICAL = "relnef-vertical-base"


def discriminant(rank: int, c1sq: RationalLike, c2deg: RationalLike) -> Fraction:
    """``2 rank c_2 - (rank - 1) c_1^2``."""
    if rank < 1:
        raise FibposError(f"rank must be >= 1, got {rank}")
    return 2 * rank * Q(c2deg) - (rank - 1) * Q(c1sq)


@dataclass(frozen=True)
class KernelBundleData:
    """Intersection numbers around the kernel of ``f^*G -> L``.

    ``D`` is the fixed part of the relative base locus, ``c`` the length of
    the isolated base points.
    """

    rankG: int
    LminusDsq: Fraction
    LminusDF: Fraction
    Lsq: Fraction
    LF: Fraction
    degG: Fraction
    c: Fraction
    caseFlag: KernelCase

    def __post_init__(self) -> None:
        for name in ("LminusDsq", "LminusDF", "Lsq", "LF", "degG", "c"):
            object.__setattr__(self, name, Q(getattr(self, name)))
        object.__setattr__(self, "caseFlag", KernelCase(self.caseFlag))
        if self.c < 0:
            raise FibposError("c must be >= 0")
        if self.caseFlag is KernelCase.GENERATING and (self.LminusDsq != self.Lsq or self.LminusDF != self.LF):
            raise FibposError("with a generating sheaf D = 0, so (L-D)^2 = L^2 and (L-D)F = LF")

    @classmethod
    def generating(cls, rankG: int, Lsq: RationalLike, LF: RationalLike, degG: RationalLike, c: RationalLike = 0) -> KernelBundleData:
        return cls(rankG, Q(Lsq), Q(LF), Q(Lsq), Q(LF), Q(degG), Q(c), KernelCase.GENERATING)

    def numerics(self, flags: FibrationFlags | None = None) -> FibrationNumerics:
        return FibrationNumerics(2, self.Lsq, self.LF, self.degG, self.rankG, flags or FibrationFlags())


def kernel_delta(k: KernelBundleData) -> Fraction:
    """``r (L-D)^2 - 2 deg G (L-D)F - 2(r-1)c``."""
    if k.rankG < 2:
        raise FibposError(f"the kernel has rank r - 1 >= 1, so r >= 2; got r={k.rankG}")
    r = k.rankG
    return r * k.LminusDsq - 2 * k.degG * k.LminusDF - 2 * (r - 1) * k.c


def delta_vs_e(
    k: KernelBundleData,
    f: FibrationNumerics,
    certs: Iterable[StabilityCertificate] = (),
) -> BoundReport:
    """``e >= delta`` for the kernel bundle."""
    if f.dim != 2:
        raise FibposError("the kernel-bundle comparison is for fibred surfaces")
    if (k.rankG, k.Lsq, k.LF, k.degG) != (f.rankG, f.Ln, f.LFtop, f.degG):
        raise FlagMismatchError("kernel data and fibration numerics disagree on r, L^2, LF or deg G")
    delta = kernel_delta(k)
    e = ch_invariant(f)
    assumptions = [f"case {k.caseFlag.value}", "Hodge index and Zariski lemma (cited)"]
    notes = []
    if k.caseFlag is KernelCase.GENERATING:
        identity = e - 2 * (k.rankG - 1) * k.c
        if delta != identity:
            raise AssertionError("delta = e - 2(r-1)c must hold exactly when D = 0")
        notes.append("exact identity delta = e - 2(r-1)c")
    else:
        missing = [n for n in ("lineBundleRelNef", "baseLocusVertical") if not getattr(f.flags, n)]
        if missing:
            raise FlagMismatchError("case relnef-vertical-base needs flags " + ", ".join(missing))
    report = BoundReport.compare("delta <= e", e, delta, assumptions, notes)
    certs = list(certs)
    if holds(certs, CertKind.MU_RESTRICTION):
        if delta < 0:
            return report.as_contradiction(
                "contradiction: certificate inconsistent with numerics (restriction-semistable kernel has delta >= 0)"
            )
    return report


@dataclass(frozen=True)
class MoriwakiNodal:
    report: BoundReport
    displayed_rhs: Fraction
    ch_displayed_rhs: Fraction
    ch_rhs: Fraction

    @property
    def cross_check(self) -> bool:
        """The displayed discriminant form dominates the emitted bound."""
        return self.displayed_rhs >= self.report.rhs

    @property
    def convention_diff(self) -> Fraction:
        """Displayed discriminant rhs minus the displayed ``3k - 4r + l`` form."""
        return self.displayed_rhs - self.ch_displayed_rhs


def moriwaki_nodal(g: int, chi: RationalLike, counts: NodalCounts, Kf2: RationalLike | None = None) -> MoriwakiNodal:
    if g < 2:
        raise FibposError("genus must be >= 2")
    chi = Q(chi)
    rhs = moriwaki_nodal_rhs(g, chi, counts)
    coeff = Fraction(4 * (g - 1), g)
    k, l, r = counts.k, counts.l, counts.rSocket
    displayed = coeff * chi + 3 * k - 4 * r + Fraction(2 * (g - 1), g) * l
    ch_displayed = coeff * chi + 3 * k - 4 * r + l
    assumptions = [
        "relatively minimal nodal fibration",
        f"counts k={k} l={l} r={r}",
        "Bogomolov inequality for the restriction-semistable kernel",
    ]
    name = "nodal slope (Moriwaki)"
    if not relative_minimality_check(counts):
        report = BoundReport.not_applicable(name, "relative minimality 2r <= k", assumptions, rhs)
    else:
        report = BoundReport.maybe(name, None if Kf2 is None else Q(Kf2), rhs, assumptions, lhs_label="K_f^2")
    return MoriwakiNodal(report, displayed, ch_displayed, ch_nodal_rhs(g, chi, counts))


def moriwaki_nodal_bound(g: int, chi: RationalLike, counts: NodalCounts, Kf2: RationalLike | None = None) -> BoundReport:
    return moriwaki_nodal(g, chi, counts, Kf2).report


def h_semistable_positivity(
    f: FibrationNumerics, cert: StabilityCertificate | Iterable[StabilityCertificate] | None
) -> BoundReport:
    """f-positivity from H-semistability of the evaluation kernel."""
    if cert is None:
        certs: list[StabilityCertificate] = []
    elif isinstance(cert, StabilityCertificate):
        certs = [cert]
    else:
        certs = list(cert)
    name = "f-positivity (H-semistable kernel)"
    if not holds(certs, CertKind.H_BUNDLE):
        return BoundReport.not_applicable(name, "no H-bundle-semistable certificate for the evaluation kernel")
    base = f_positivity(f)
    used = [str(c) for c in certs if c.kind is CertKind.H_BUNDLE]
    report = BoundReport.compare(name, base.lhs, base.rhs, used + list(f.flags.asserted()))
    if report.margin < 0:
        return report.as_contradiction("contradiction: certificate inconsistent with numerics")
    return report
