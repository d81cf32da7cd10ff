"""Numeric data model of a polarized fibration and the Cornalba-Harris invariant."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from .exact import Q, RationalLike, binomial, sign


class FibposError(ValueError):
    """Base class for input errors raised by this package."""


class NonpositiveDegreeError(FibposError):
    pass


class DimensionError(FibposError):
    pass


class NotApplicableError(FibposError):
    """A value-returning operation whose hypothesis gate failed."""


class Verdict(str, enum.Enum):
    HOLDS_STRICTLY = "holds-strictly"
    HOLDS_WITH_EQUALITY = "holds-with-equality"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not-applicable"
    # numerics contradict a supplied stability certificate
    CONTRADICTION = "contradiction"

    @classmethod
    def from_margin(cls, margin: Fraction) -> Verdict:
        s = sign(margin)
        if s > 0:
            return cls.HOLDS_STRICTLY
        if s == 0:
            return cls.HOLDS_WITH_EQUALITY
        return cls.VIOLATED


@dataclass(frozen=True)
class BoundReport:
    """One inequality instance ``lhs >= rhs``."""

    name: str
    lhs: Fraction | None
    rhs: Fraction | None
    margin: Fraction | None
    verdict: Verdict
    assumptions: tuple[str, ...] = ()
    failed_precondition: str | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.verdict is Verdict.NOT_APPLICABLE:
            if not self.failed_precondition:
                raise ValueError("not-applicable report must name the failed precondition")
            return
        if self.margin is None or self.lhs is None or self.rhs is None:
            raise ValueError("evaluated report needs lhs, rhs and margin")
        if self.margin != self.lhs - self.rhs:
            raise ValueError("margin must equal lhs - rhs")
        if self.verdict is not Verdict.CONTRADICTION and self.verdict is not Verdict.from_margin(self.margin):
            raise ValueError("verdict inconsistent with margin")

    @classmethod
    def compare(
        cls,
        name: str,
        lhs: RationalLike,
        rhs: RationalLike,
        assumptions: tuple[str, ...] | list[str] = (),
        notes: tuple[str, ...] | list[str] = (),
    ) -> BoundReport:
        lhs, rhs = Q(lhs), Q(rhs)
        margin = lhs - rhs
        return cls(name, lhs, rhs, margin, Verdict.from_margin(margin), tuple(assumptions), None, tuple(notes))

    @classmethod
    def not_applicable(
        cls,
        name: str,
        failed: str,
        assumptions: tuple[str, ...] | list[str] = (),
        rhs: RationalLike | None = None,
        notes: tuple[str, ...] | list[str] = (),
    ) -> BoundReport:
        return cls(
            name,
            None,
            None if rhs is None else Q(rhs),
            None,
            Verdict.NOT_APPLICABLE,
            tuple(assumptions),
            failed,
            tuple(notes),
        )

    @classmethod
    def maybe(
        cls,
        name: str,
        lhs: RationalLike | None,
        rhs: RationalLike,
        assumptions: tuple[str, ...] | list[str] = (),
        notes: tuple[str, ...] | list[str] = (),
        lhs_label: str = "lhs",
    ) -> BoundReport:
        """Evaluate when a left-hand value is supplied, else report the bare bound."""
        if lhs is None:
            return cls.not_applicable(name, f"no value supplied for {lhs_label}", assumptions, rhs, notes)
        return cls.compare(name, lhs, rhs, assumptions, notes)

    def as_contradiction(self, note: str) -> BoundReport:
        return replace(self, verdict=Verdict.CONTRADICTION, notes=self.notes + (note,))


@dataclass(frozen=True)
class FibrationFlags:
    """Caller-asserted geometric hypotheses; never verified here."""

    lineBundleNef: bool = False
    lineBundleRelNef: bool = False
    sheafGenerating: bool = False
    baseLocusVertical: bool = False
    basePointFree: bool = False
    starCondition: bool = False
    normallyGenerated: bool = False
    pushforwardPowersNef: bool = False

    def asserted(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(self) if getattr(self, f.name))


@dataclass(frozen=True)
class FibrationNumerics:
    """``(n, L^n, (L|F)^(n-1), deg G, rank G)`` of a polarized fibration."""

    dim: int
    Ln: Fraction
    LFtop: Fraction
    degG: Fraction
    rankG: int
    flags: FibrationFlags = field(default_factory=FibrationFlags)

    def __post_init__(self) -> None:
        for name in ("Ln", "LFtop", "degG"):
            object.__setattr__(self, name, Q(getattr(self, name)))
        if self.dim < 2:
            raise DimensionError(f"dim must be >= 2, got {self.dim}")
        if self.rankG < 1:
            raise FibposError(f"rankG must be >= 1, got {self.rankG}")
        if self.flags.lineBundleNef and self.LFtop < 0:
            raise FibposError("a nef line bundle cannot have negative fibre degree")


@dataclass(frozen=True)
class SurfaceCanonicalData:
    """Relative invariants ``(g, b, K_f^2, chi_f)`` of a fibred surface."""

    g: int
    b: int
    Kf2: Fraction
    chi_f: Fraction
    relativelyMinimal: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "Kf2", Q(self.Kf2))
        object.__setattr__(self, "chi_f", Q(self.chi_f))
        if self.g < 2:
            raise FibposError(f"fibre genus must be >= 2, got {self.g}")
        if self.b < 0:
            raise FibposError(f"base genus must be >= 0, got {self.b}")

    def numerics(self) -> FibrationNumerics:
        # K_f is nef iff f is relatively minimal; the canonical series has vertical base locus
        flags = FibrationFlags(
            lineBundleNef=self.relativelyMinimal,
            lineBundleRelNef=self.relativelyMinimal,
            baseLocusVertical=True,
            basePointFree=True,
        )
        return FibrationNumerics(2, self.Kf2, Fraction(2 * self.g - 2), self.chi_f, self.g, flags)

    def slope_coefficient(self) -> Fraction:
        return Fraction(4 * (self.g - 1), self.g)


def ch_invariant(f: FibrationNumerics) -> Fraction:
    """``e = r L^n - n deg(G) (L|F)^(n-1)``."""
    return f.rankG * f.Ln - f.dim * f.degG * f.LFtop


def f_positivity(f: FibrationNumerics) -> BoundReport:
    return BoundReport.compare(
        "f-positivity",
        f.rankG * f.Ln,
        f.dim * f.degG * f.LFtop,
        f.flags.asserted(),
    )


def slope(f: FibrationNumerics) -> Fraction:
    if f.degG <= 0:
        raise NonpositiveDegreeError(f"slope needs deg G > 0, got {f.degG}")
    return f.Ln / f.degG


def perturbed_slope(f: FibrationNumerics, k: RationalLike) -> Fraction:
    """Slope of ``(L + kF, G(k))``."""
    k = Q(k)
    if k < 0:
        raise FibposError("perturbation k must be >= 0")
    den = f.degG + k * f.rankG
    if den == 0:
        raise ZeroDivisionError("deg G + k rank G vanishes")
    return (f.Ln + k * f.dim * f.LFtop) / den


def slope_asymptote(f: FibrationNumerics) -> Fraction:
    """Limit of the perturbed slope as ``k -> inf``: ``n (L|F)^(n-1) / r``."""
    return f.dim * f.LFtop / f.rankG


def asymptotic_cross_check(f: FibrationNumerics) -> bool:
    """``slope >= asymptote`` iff ``e >= 0`` (needs deg G > 0)."""
    return (slope(f) >= slope_asymptote(f)) == (ch_invariant(f) >= 0)


def twist(f: FibrationNumerics, degA: RationalLike) -> FibrationNumerics:
    """Numerics of ``(L + f^*A, G (x) A)`` for a line bundle of degree ``degA`` on the base."""
    degA = Q(degA)
    return replace(
        f,
        degG=f.degG + f.rankG * degA,
        Ln=f.Ln + f.dim * degA * f.LFtop,
    )


def twist_invariance_check(f: FibrationNumerics, degA: RationalLike) -> bool:
    return ch_invariant(twist(f, degA)) == ch_invariant(f)


def top_self_intersection(f: FibrationNumerics) -> Fraction:
    """``(r L - deg(G) F)^n`` expanded with ``F^2 = 0`` and ``L^(n-1) F = (L|F)^(n-1)``."""
    n, r, delta = f.dim, f.rankG, f.degG
    # only j = 0, 1 powers of F survive
    return binomial(n, 0) * r**n * f.Ln + binomial(n, 1) * r ** (n - 1) * (-delta) * f.LFtop


def top_self_intersection_identity(f: FibrationNumerics) -> bool:
    if f.dim != 2:
        raise DimensionError("top self-intersection identity is checked for surfaces only")
    return top_self_intersection(f) == f.rankG ** (f.dim - 1) * ch_invariant(f)


class P1Obstruction(str, enum.Enum):
    NONE = "no-obstruction"
    RANK_DEGREE = "rank-degree-obstruction"
    FUJITA = "fujita-obstruction"


def p1_semistability_obstruction(rank: int, degree: int, q_f: int) -> P1Obstruction:
    """Numeric obstructions to semistability of ``f_* omega_f`` over P^1."""
    if rank < 1 or q_f < 0:
        raise FibposError("need rank >= 1 and q_f >= 0")
    if q_f > 0:
        return P1Obstruction.FUJITA
    if degree % rank != 0:
        return P1Obstruction.RANK_DEGREE
    return P1Obstruction.NONE


def slope_inequality(s: SurfaceCanonicalData) -> BoundReport:
    """``K_f^2 >= 4(g-1)/g chi_f``."""
    assumptions = ["relatively minimal"] if s.relativelyMinimal else []
    return BoundReport.compare("slope inequality", s.Kf2, s.slope_coefficient() * s.chi_f, assumptions)
