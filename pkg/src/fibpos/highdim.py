"""Higher-dimensional bounds: abelian and K3 fibres, the conjectural slope
inequality, the Severi inequality and its derivation by covering tricks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import BigOPoly, Poly, Q, RationalLike, limit_at_infinity
from .model import BoundReport, FibposError, FibrationNumerics, f_positivity

CONJECTURAL = "CONJECTURAL"


class NonIntegralRankError(FibposError):
    pass


class MalformedLedgerError(FibposError):
    pass


def abelian_rank(n: int, LFtop: RationalLike) -> int:
    """``h^0(F, L|F) = (L|F)^(n-1) / (n-1)!`` on an abelian fibre."""
    if n < 2:
        raise FibposError("dimension must be >= 2")
    r = Q(LFtop) / math.factorial(n - 1)
    if r.denominator != 1 or r <= 0:
        raise NonIntegralRankError(f"(L|F)^(n-1)/(n-1)! = {r} is not a positive integer")
    return int(r)


def abelian_bound(n: int, degPush: RationalLike, Ln: RationalLike, LFtop: RationalLike) -> BoundReport:
    """``L^n >= n! deg f_*L`` for fibres that are abelian varieties."""
    r = abelian_rank(n, LFtop)
    degPush, Ln = Q(degPush), Q(Ln)
    report = BoundReport.compare(
        "abelian fibres",
        Ln,
        math.factorial(n) * degPush,
        ["general fibre abelian, L|F ample", f"rank f_*L = {r}"],
    )
    # same inequality as f-positivity, after dividing by r
    fp = f_positivity(FibrationNumerics(n, Ln, Q(LFtop), degPush, r))
    if fp.margin != r * report.margin:
        raise AssertionError("abelian bound must agree with f-positivity")
    return report


def k3_coefficient(g: int) -> Fraction:
    return Fraction(6 * (g - 1), g + 1)


def k3_coefficient_identity(g: int) -> bool:
    """f-positivity coefficient ``3 (2g-2) / h^0`` with ``h^0 = g + 1``."""
    return Fraction(3 * (2 * g - 2), g + 1) == k3_coefficient(g)


def k3_bound(
    g: int,
    degPush: RationalLike,
    L3: RationalLike | None,
    picardOne: bool = True,
    primitive: bool = True,
) -> BoundReport:
    """``L^3 >= 6(g-1)/(g+1) deg f_*L`` for K3 fibres of genus ``g``."""
    name = "K3 fibres"
    degPush = Q(degPush)
    if g < 2:
        raise FibposError("genus must be >= 2")
    rhs = k3_coefficient(g) * degPush
    assumptions = ["Picard number 1", "primitive polarization", f"degree 2g-2 = {2 * g - 2}"]
    if 2 * g - 2 < 12:
        return BoundReport.not_applicable(name, f"degree 2g-2 = {2 * g - 2} < 12", assumptions, rhs)
    if not picardOne:
        return BoundReport.not_applicable(name, "Picard number 1 not asserted", assumptions, rhs)
    if not primitive:
        return BoundReport.not_applicable(name, "primitive polarization not asserted", assumptions, rhs)
    return BoundReport.maybe(name, None if L3 is None else Q(L3), rhs, assumptions, lhs_label="L^3")


def conjectural_slope_rhs(n: int, KFtop: RationalLike, h0omegaF: RationalLike, degPush: RationalLike) -> Fraction:
    """``n K_F^(n-1) / h^0(omega_F) deg f_*omega_f``."""
    h0 = Q(h0omegaF)
    if h0 <= 0:
        raise FibposError("h^0(F, omega_F) must be positive")
    return n * Q(KFtop) / h0 * Q(degPush)


def conjectural_slope(
    n: int, KFtop: RationalLike, h0omegaF: RationalLike, degPush: RationalLike, Kfn: RationalLike | None = None
) -> BoundReport:
    rhs = conjectural_slope_rhs(n, KFtop, h0omegaF, degPush)
    assumptions = [CONJECTURAL, "omega_f relatively nef, ample on general fibres", "mild fibre singularities"]
    return BoundReport.maybe("higher-dimensional slope", None if Kfn is None else Q(Kfn), rhs, assumptions, lhs_label="K_f^n")


@dataclass(frozen=True)
class SeveriInput:
    n: int
    Kn: Fraction
    chi: Fraction
    maximalAlbanese: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "Kn", Q(self.Kn))
        object.__setattr__(self, "chi", Q(self.chi))
        if self.n < 1:
            raise FibposError("dimension must be >= 1")


def severi_coefficient(n: int) -> int:
    return 2 * math.factorial(n)


def severi_check(s: SeveriInput) -> BoundReport:
    """``K_X^n >= 2 n! chi(omega_X)`` for maximal Albanese dimension."""
    rhs = severi_coefficient(s.n) * s.chi
    if not s.maximalAlbanese:
        return BoundReport.not_applicable("Severi inequality", "maximal Albanese dimension not asserted", rhs=rhs)
    return BoundReport.compare("Severi inequality", s.Kn, rhs, ["maximal Albanese dimension"])


# ------------------------------------------------------------ etale covers

R = Poly.x()


def etale_scaled_sides(
    n: int,
    KXn: RationalLike,
    KFtop: RationalLike,
    chiF: RationalLike,
    chiX: RationalLike,
    eps1: RationalLike = 0,
    eps2: RationalLike = 0,
) -> tuple[Poly, Poly, Poly]:
    """``(lhs, rhs numerator, rhs denominator)`` as polynomials in the cover degree ``r``.

    Over ``P^1``: ``K_f^n = K_X^n + 2n K_F^(n-1)`` and ``chi_f = chi(omega_X) + 2 chi(omega_F)``.
    The scaled inequality is ``r K_f^n >= n r K_F^(n-1) (r chi_f + eps2) / (r chi(omega_F) + eps1)``.
    """
    KXn, KFtop, chiF, chiX = Q(KXn), Q(KFtop), Q(chiF), Q(chiX)
    Kf = KXn + 2 * n * KFtop
    chif = chiX + 2 * chiF
    lhs = R * Kf
    num = R * (n * KFtop) * (R * chif + Q(eps2))
    den = R * chiF + Q(eps1)
    return lhs, num, den


@dataclass(frozen=True)
class EtaleLimit:
    lhs: Fraction
    rhs: Fraction
    report: BoundReport
    slopemejor: BoundReport | None

    def scaled(self) -> BoundReport:
        return self.report


def etale_cover_limit(
    n: int,
    KXn: RationalLike,
    KFtop: RationalLike,
    chiF: RationalLike,
    chiX: RationalLike,
    eps1: RationalLike = 0,
    eps2: RationalLike = 0,
    induction: bool = False,
) -> EtaleLimit:
    """Limit ``r -> inf`` of the inequality on degree-``r`` etale covers.

    With ``induction`` the fibre bound ``K_F^(n-1) >= 2(n-1)! chi(omega_F)``
    is assumed and the strengthened inequality is emitted as well.
    """
    if n < 2:
        raise FibposError("dimension must be >= 2")
    if Q(chiF) <= 0:
        raise FibposError("chi(omega_F) must be positive")
    lhs_poly, num, den = etale_scaled_sides(n, KXn, KFtop, chiF, chiX, eps1, eps2)
    lhs = limit_at_infinity(lhs_poly, R)
    rhs = limit_at_infinity(num, R * den)
    assumptions = [CONJECTURAL, "slope inequality on the etale covers", "base P^1", "maximal Albanese dimension"]
    report = BoundReport.compare("slope on etale covers (limit)", lhs, rhs, assumptions)
    mejor = None
    if induction:
        chif = Q(chiX) + 2 * Q(chiF)
        mejor = BoundReport.compare(
            "strengthened slope over P^1",
            lhs,
            severi_coefficient(n) * chif,
            assumptions + ["Severi inequality for the fibres (induction)"],
        )
    return EtaleLimit(lhs, rhs, report, mejor)


# ------------------------------------------------------------ covering trick


@dataclass(frozen=True)
class PardiniLedger:
    """Order estimates, in the multiplication degree ``d``, for
    ``K_Y^n``, ``K_F^(n-1)``, ``chi(omega_Y)`` and ``chi(omega_F)``.

    The exact part of ``KY`` (resp. ``chiY``) is the coefficient of
    ``K_X^n`` (resp. ``chi(omega_X)``); the fibre estimates carry no symbol.
    """

    q: int
    KY: BigOPoly
    KF: BigOPoly
    chiY: BigOPoly
    chiF: BigOPoly

    def __post_init__(self) -> None:
        if self.q < 1:
            raise MalformedLedgerError("irregularity q must be >= 1")
        top = 2 * self.q
        expected = {
            "KY": (Poly.monomial(1, top), top - 4),
            "KF": (Poly(), top - 2),
            "chiY": (Poly.monomial(1, top), None),
            "chiF": (Poly(), top - 2),
        }
        for name, (exact, order) in expected.items():
            est: BigOPoly = getattr(self, name)
            if not est.at_infinity:
                raise MalformedLedgerError(f"{name}: estimates are taken as d -> infinity")
            if est.exact != exact or est.order != order:
                raise MalformedLedgerError(f"{name}: expected {BigOPoly(exact, order)}, got {est}")

    @classmethod
    def standard(cls, q: int) -> PardiniLedger:
        top = 2 * q
        d_top = Poly.monomial(1, top)
        return cls(
            q,
            BigOPoly(d_top, top - 4),
            BigOPoly(Poly(), top - 2),
            BigOPoly(d_top, None),
            BigOPoly(Poly(), top - 2),
        )


@dataclass(frozen=True)
class PardiniResult:
    """Limiting inequality ``kCoeff K_X^n >= chiCoeff chi(omega_X)``."""

    n: int
    kCoeff: Fraction
    chiCoeff: Fraction
    report: BoundReport

    @property
    def is_severi(self) -> bool:
        return self.kCoeff == 1 and self.chiCoeff == severi_coefficient(self.n)

    def __str__(self) -> str:
        return f"{self.kCoeff} K_X^{self.n} >= {self.chiCoeff} chi(omega_X)"


def pardini_limit(ledger: PardiniLedger, n: int) -> PardiniResult:
    """Apply the strengthened inequality to the covers, divide by ``d^(2q)``
    and let ``d -> inf``.

    ``K_Y^n + 2n K_F^(n-1) - 2n! (chi(omega_Y) + 2 chi(omega_F)) >= 0`` is a
    linear form in the symbols ``K_X^n`` and ``chi(omega_X)`` whose
    coefficients are asymptotic expansions in ``d``.
    """
    if n < 2:
        raise FibposError("dimension must be >= 2")
    c = severi_coefficient(n)
    top = 2 * ledger.q
    sym_k = BigOPoly(ledger.KY.exact, None)
    sym_chi = BigOPoly(ledger.chiY.exact, None).scale(-c)

    def tail(e: BigOPoly) -> BigOPoly:
        return BigOPoly(Poly(), e.order)

    rest = tail(ledger.KY) + ledger.KF.scale(2 * n) - tail(ledger.chiY).scale(c) - ledger.chiF.scale(2 * c)
    k_coeff = sym_k.divide_by_power(top).limit()
    chi_coeff = -sym_chi.divide_by_power(top).limit()
    constant = rest.divide_by_power(top).limit()
    if constant != 0:
        raise MalformedLedgerError("the symbol-free part must vanish in the limit")
    report = BoundReport.not_applicable(
        "Severi inequality (covering limit)",
        "symbolic result, no numeric K_X^n supplied",
        [CONJECTURAL, f"limit over multiplication-by-d covers, q = {ledger.q}", f"{k_coeff} K_X^{n} >= {chi_coeff} chi(omega_X)"],
        rhs=chi_coeff,
    )
    return PardiniResult(n, k_coeff, chi_coeff, report)
