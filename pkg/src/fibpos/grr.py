"""Riemann-Roch polynomials in the power ``h`` of the polarization.

For a fibred surface with ``L = omega_f`` and ``G = f_* omega_f`` the quantity
``rank(G) deg(G_h) - h deg(G) rank(G_h)`` is an explicit quadratic in ``h``;
its leading coefficient is half the Cornalba-Harris invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import BigOPoly, Poly, Q, RationalLike, binomial, limit_at_infinity
from .model import (
    FibposError,
    FibrationNumerics,
    NotApplicableError,
    SurfaceCanonicalData,
    ch_invariant,
)

H = Poly.x()


class HRangeError(FibposError):
    pass


def rank_Gh(g: int) -> Poly:
    """``rank G_h = (2h - 1)(g - 1)``, valid for ``h >= 2``."""
    return Poly.of(-1, 2) * (g - 1)


def deg_Gh(s: SurfaceCanonicalData) -> Poly:
    """``deg G_h = h(h-1)/2 K_f^2 + chi_f``, valid for ``h >= 2``."""
    return Poly.of(0, -1, 1) * (s.Kf2 / 2) + s.chi_f


def grr_polynomial_canonical(s: SurfaceCanonicalData) -> Poly:
    """``E(h) = g deg G_h - h chi_f rank G_h``."""
    return deg_Gh(s) * s.g - H * rank_Gh(s.g) * s.chi_f


def leading_term_check(s: SurfaceCanonicalData) -> bool:
    """Coefficient of ``h^2`` equals ``e/2``."""
    e = ch_invariant(s.numerics())
    return grr_polynomial_canonical(s).coefficient(2) == e / 2


def _require_h(h: int) -> None:
    if h < 2:
        raise HRangeError(f"Riemann-Roch for G_h is used for h >= 2, got h={h}")


def hfixed_numerator(g: int) -> Poly:
    return Poly.of(-g, 1 - g, 2 * (g - 1)) * 2


def hfixed_denominator(g: int) -> Poly:
    return Poly.of(0, -1, 1) * g


def hfixed_hilbert_bound(g: int, h: int) -> Fraction:
    """Slope coefficient forced by semistability of the h-th Hilbert point:
    ``2(2(g-1)h^2 + (1-g)h - g) / (g h (h-1))``."""
    if g < 2:
        raise FibposError("genus must be >= 2")
    _require_h(h)
    return hfixed_numerator(g)(h) / hfixed_denominator(g)(h)


def hfixed_hilbert_limit(g: int) -> Fraction:
    """Exact ``h -> inf`` limit of :func:`hfixed_hilbert_bound`."""
    return limit_at_infinity(hfixed_numerator(g), hfixed_denominator(g))


def hfixed_table(g: int, h_values) -> list[tuple[int, Fraction]]:
    return [(h, hfixed_hilbert_bound(g, h)) for h in h_values]


@dataclass(frozen=True)
class SubleadingTerm:
    coefficient: Fraction
    from_expansion: Fraction
    short_form: Fraction

    @property
    def consistent(self) -> bool:
        return self.coefficient == self.from_expansion


def subleading_term_canonical(s: SurfaceCanonicalData) -> SubleadingTerm:
    """The ``h^1`` coefficient of ``E(h)`` when ``e = 0``.

    ``short_form`` is ``r * (-(1/n) K_f^n)`` at ``n = 2``, reported
    alongside and not asserted equal: it omits the ``(g-1) chi_f`` term coming
    from the constant part of ``deg G_h`` and the rank.
    """
    if ch_invariant(s.numerics()) != 0:
        raise NotApplicableError("subleading term is only examined when e = 0")
    coeff = grr_polynomial_canonical(s).coefficient(1)
    expected = s.g * (-s.Kf2 / 2) + (s.g - 1) * s.chi_f
    return SubleadingTerm(coeff, expected, s.g * (-s.Kf2 / 2))


def psi(s: SurfaceCanonicalData, h: int) -> Fraction:
    """``mu(G_h) / h``."""
    _require_h(h)
    den = h * rank_Gh(s.g)(h)
    return deg_Gh(s)(h) / den


def psi_limit(s: SurfaceCanonicalData) -> Fraction:
    """``lim psi(h) = L^n / (n (L|F)^(n-1))``."""
    return limit_at_infinity(deg_Gh(s), H * rank_Gh(s.g))


def sym_slope_identity(rank: int, deg: RationalLike, h: int) -> bool:
    """``mu(Sym^h F) = h mu(F)`` via the binomial degree and rank formulas."""
    if rank < 1 or h < 1:
        raise FibposError("need rank >= 1 and h >= 1")
    deg = Q(deg)
    sym_deg = binomial(h + rank - 1, rank) * deg
    sym_rank = binomial(h + rank - 1, rank - 1)
    return sym_deg / sym_rank == h * deg / rank


def grr_leading_general(f: FibrationNumerics, cover_degree: int = 1) -> BigOPoly:
    """``h^n e / (d n!) + O(h^(n-1))`` for the general pair ``(L, G)``."""
    if cover_degree < 1:
        raise FibposError("cover degree must be >= 1")
    lead = ch_invariant(f) / (cover_degree * math.factorial(f.dim))
    return BigOPoly(Poly.monomial(lead, f.dim), f.dim - 1, True)
