"""Xiao's method: lower bounds for ``L^n`` from Harder-Narasimhan data, and an
exact optimizer over admissible filtrations of a fibred surface."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import Q, RationalLike
from .model import BoundReport, FibposError

DEFAULT_MAX_ENUM = 10**6


class HNDataError(FibposError):
    pass


class CliffordViolation(FibposError):
    pass


class MissingIntersectionError(FibposError):
    pass


class InfeasibleError(FibposError):
    pass


@dataclass(frozen=True)
class HNStep:
    mu: Fraction
    r: int
    d: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", Q(self.mu))
        object.__setattr__(self, "d", Q(self.d))


@dataclass(frozen=True)
class HNData:
    """Slopes ``mu_i``, ranks ``r_i = rank G_i`` and fibre degrees ``d_i``.

    ``strict=False`` admits weakly decreasing slopes: the closure of the set
    of filtrations, used for optimizer witnesses.
    """

    steps: tuple[HNStep, ...]
    nef: bool = True
    strict: bool = True

    def __post_init__(self) -> None:
        steps = tuple(s if isinstance(s, HNStep) else HNStep(*s) for s in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise HNDataError("a filtration has at least one step")
        for i, (a, b) in enumerate(zip(steps, steps[1:]), start=1):
            if self.strict and not a.mu > b.mu:
                raise HNDataError(f"slopes must strictly decrease (step {i})")
            if not a.mu >= b.mu:
                raise HNDataError(f"slopes must decrease (step {i})")
            if b.r < a.r + 1:
                raise HNDataError(f"ranks must strictly increase (step {i})")
            if b.d < a.d:
                raise HNDataError(f"fibre degrees must not decrease (step {i})")
        if steps[0].r < 1:
            raise HNDataError("ranks are positive")
        if self.nef and steps[-1].mu < 0:
            raise HNDataError("nef data needs mu_l >= 0")

    @classmethod
    def of(cls, *triples: tuple[RationalLike, int, RationalLike], **kw) -> HNData:
        return cls(tuple(HNStep(Q(m), r, Q(d)) for m, r, d in triples), **kw)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def total_rank(self) -> int:
        return self.steps[-1].r

    def mu(self, i: int) -> Fraction:
        """1-based slope with ``mu_{l+1} = 0``."""
        return self.steps[i - 1].mu if i <= self.length else Fraction(0)

    def d(self, i: int) -> Fraction:
        """1-based fibre degree with ``d_{l+1} = d_l``."""
        return self.steps[min(i, self.length) - 1].d

    @property
    def total_deg(self) -> Fraction:
        return sum((s.r * (self.mu(i) - self.mu(i + 1)) for i, s in enumerate(self.steps, 1)), Fraction(0))

    def scaled(self, t: RationalLike) -> HNData:
        t = Q(t)
        return HNData(tuple(HNStep(s.mu * t, s.r, s.d) for s in self.steps), self.nef, self.strict)


def _index_set(hn: HNData, I: Iterable[int] | None) -> list[int]:
    if I is None:
        return list(range(1, hn.length + 1))
    idx = sorted(set(I))
    if idx and (idx[0] < 1 or idx[-1] > hn.length):
        raise HNDataError(f"index set {idx} outside 1..{hn.length}")
    return idx


def xiao_surface_bound(hn: HNData, I: Iterable[int] | None = None) -> Fraction:
    """``sum (d_i + d_next)(mu_i - mu_next)`` over consecutive chosen indices."""
    idx = _index_set(hn, I)
    if not idx:
        raise HNDataError("index set must be nonempty")
    total = Fraction(0)
    for i, nxt in zip(idx, idx[1:] + [hn.length + 1]):
        total += (hn.d(i) + hn.d(nxt)) * (hn.mu(i) - hn.mu(nxt))
    return total


def slope_from_clifford(g: int, hn: HNData) -> BoundReport:
    """Xiao's bound against ``4(g-1)/g deg G`` for the canonical filtration."""
    last = hn.steps[-1]
    if last.r != g or last.d != 2 * g - 2:
        raise CliffordViolation(f"last step must be (r, d) = ({g}, {2 * g - 2}), got ({last.r}, {last.d})")
    for i, s in enumerate(hn.steps, 1):
        if s.d < 2 * s.r - 2:
            raise CliffordViolation(f"step {i}: d = {s.d} < 2r - 2 = {2 * s.r - 2}")
    return BoundReport.compare(
        "Xiao slope (Clifford)",
        xiao_surface_bound(hn),
        Fraction(4 * (g - 1), g) * hn.total_deg,
        ["Clifford: d_i >= 2 r_i - 2", "mu_l >= 0 (Miyaoka nefness threshold)"],
    )


@dataclass(frozen=True)
class IntersectionTable:
    """Degree-``(n-1)`` monomials in the classes ``P_i`` on a fixed fibre."""

    n: int
    entries: dict

    def __post_init__(self) -> None:
        if self.n < 2:
            raise FibposError("dimension must be >= 2")
        norm = {}
        for key, val in dict(self.entries).items():
            key = tuple(sorted(key))
            if len(key) != self.n - 1:
                raise FibposError(f"monomial {key} does not have degree {self.n - 1}")
            norm[key] = Q(val)
        object.__setattr__(self, "entries", norm)

    @classmethod
    def from_degrees(cls, hn: HNData) -> IntersectionTable:
        return cls(2, {(i,): s.d for i, s in enumerate(hn.steps, 1)})

    def value(self, factors: Sequence[int], l: int) -> Fraction:
        key = tuple(sorted(min(i, l) for i in factors))
        try:
            return self.entries[key]
        except KeyError:
            mono = "*".join(f"P{i}" for i in key)
            raise MissingIntersectionError(f"missing intersection number {mono}") from None


def xiao_thresholds(n: int, l: int, dims: Sequence[int], idx: Sequence[int]) -> tuple[dict, dict]:
    """Partition ``I_s`` of the chosen indices by image dimension, and ``b_s``."""
    parts = {s: [i for i in idx if dims[i - 1] == s] for s in range(1, n)}
    b = {n: l + 1}
    for s in range(n - 1, 0, -1):
        b[s] = min(parts[s]) if parts[s] else b[s + 1]
    return parts, b


def xiao_general_bound(
    hn: HNData,
    tbl: IntersectionTable,
    fibreImageDims: Sequence[int],
    I: Iterable[int] | None = None,
) -> Fraction:
    """Generalized Xiao inequality evaluated through an intersection table."""
    n, l = tbl.n, hn.length
    if len(fibreImageDims) != l:
        raise HNDataError("one image dimension per filtration step")
    if any(not 0 <= s <= n - 1 for s in fibreImageDims):
        raise HNDataError(f"image dimensions must lie in 0..{n - 1}")
    idx = _index_set(hn, I)
    if not idx:
        return Fraction(0)
    successor = dict(zip(idx, idx[1:] + [l + 1]))
    parts, b = xiao_thresholds(n, l, fibreImageDims, idx)
    total = Fraction(0)
    for s in range(n - 1, 0, -1):
        prefix = [b[k] for k in range(s + 1, n)]
        for j in parts[s]:
            nxt = successor[j]
            inner = sum(
                (tbl.value(prefix + [j] * (s - r) + [nxt] * r, l) for r in range(s + 1)),
                Fraction(0),
            )
            total += inner * (hn.mu(j) - hn.mu(nxt))
    return total


def xiao_threefold_simplified(
    hn: HNData,
    tbl: IntersectionTable,
    b1: int,
    b2: int,
    lam: RationalLike,
) -> Fraction:
    """``3 P_l^2 mu_l + sum_{i=b2}^{l-1} P_i^2 (mu_i - mu_{i+1})
    + 2 lambda sum_{i=b1}^{b2-1} d_i (mu_i - mu_{i+1})``."""
    if tbl.n != 3:
        raise FibposError("simplified bound is for threefolds")
    l = hn.length
    if not 1 <= b1 <= b2 <= l:
        raise HNDataError(f"need 1 <= b1 <= b2 <= l, got b1={b1}, b2={b2}, l={l}")
    lam = Q(lam)
    total = 3 * tbl.value([l, l], l) * hn.mu(l)
    for i in range(b2, l):
        total += tbl.value([i, i], l) * (hn.mu(i) - hn.mu(i + 1))
    for i in range(b1, b2):
        total += 2 * lam * hn.d(i) * (hn.mu(i) - hn.mu(i + 1))
    return total


def harmonic_coefficient(a: RationalLike, d: RationalLike) -> Fraction:
    """``2ad / (a + d)``."""
    a, d = Q(a), Q(d)
    return 2 * a * d / (a + d)


def linstab_identity(d: RationalLike, r: int) -> bool:
    """``2ad/(a+d) = 2d/r`` for ``a = d/(r-1)``."""
    d = Q(d)
    return harmonic_coefficient(d / (r - 1), d) == 2 * d / r


def linstab_xiao_bound(d: RationalLike, r: int, degG: RationalLike, L2: RationalLike | None = None) -> BoundReport:
    """``L^2 >= 2 d/r deg G`` under linear semistability of the fibre series."""
    if r < 2:
        raise FibposError("rank must be >= 2")
    d = Q(d)
    if d <= 0:
        raise FibposError("degree must be positive")
    if not linstab_identity(d, r):
        raise AssertionError("harmonic-mean identity failed")
    return BoundReport.maybe(
        "Xiao + linear semistability",
        L2,
        2 * d / r * Q(degG),
        ["L nef", "G nef", "fibre series linearly semistable"],
        lhs_label="L^2",
    )


def general_a_bound(a: RationalLike, d: RationalLike, degG: RationalLike) -> Fraction:
    a, d = Q(a), Q(d)
    if a <= 0 or d <= 0:
        raise FibposError("a and d must be positive")
    return harmonic_coefficient(a, d) * Q(degG)


def general_a_supremum(d: RationalLike, degG: RationalLike) -> Fraction:
    """Supremum of :func:`general_a_bound` over ``a > 0`` (the ``a -> inf`` limit)."""
    return 2 * Q(d) * Q(degG)


def subcanonical_coefficient(g: int, d: RationalLike, subcanonical: bool) -> tuple[Fraction, str] | None:
    d = Q(d)
    options = []
    if subcanonical:
        options.append((4 * d / (d + 2), "(i) subcanonical, a = 2"))
    if d >= 2 * g + 1:
        options.append((2 * d / (d - g + 2), "(ii) d >= 2g+1"))
    if not options:
        return None
    return max(options, key=lambda t: t[0])


def subcanonical_bounds(
    g: int,
    d: RationalLike,
    degPush: RationalLike,
    subcanonical: bool,
    L2: RationalLike | None = None,
) -> BoundReport:
    name = "subcanonical degree bound"
    found = subcanonical_coefficient(g, d, subcanonical)
    if found is None:
        return BoundReport.not_applicable(name, "L|F subcanonical or d >= 2g+1")
    coeff, case = found
    return BoundReport.maybe(name, L2, coeff * Q(degPush), ["L nef", case], lhs_label="L^2")


def xiao_highdim_bound(
    n: int,
    d: RationalLike,
    r: int,
    degG: RationalLike,
    mu1: RationalLike | None = None,
    Ln: RationalLike | None = None,
) -> list[BoundReport]:
    """``L^n >= n d/(r + (n-1)^2) deg G``; with ``mu1`` also the two intermediate bounds."""
    if r <= n - 1:
        raise FibposError(f"rank {r} too small for dimension {n}")
    d, degG = Q(d), Q(degG)
    a = d / (r - n + 1)
    hyp = ["L nef", "G nef", "HN pieces generically finite on fibres", "fibre series linearly semistable"]
    out = [BoundReport.maybe("Xiao high-dimension", Ln, n * d / (r + (n - 1) ** 2) * degG, hyp, lhs_label="L^n")]
    if mu1 is not None:
        mu1 = Q(mu1)
        out.append(BoundReport.maybe("Xiao filtration step", Ln, n * a * degG - n * (n - 1) * a * mu1, hyp, lhs_label="L^n"))
        out.append(BoundReport.maybe("pseudoeffective threshold", Ln, mu1 * d, ["L - mu_1 F pseudoeffective"], lhs_label="L^n"))
    return out


# ---------------------------------------------------------------- optimizer


def _max_enum() -> int:
    raw = os.environ.get("FIBPOS_MAX_ENUM")
    return int(raw) if raw else DEFAULT_MAX_ENUM


def _rank_patterns(g: int, max_steps: int):
    for l in range(1, max_steps + 1):
        for head in itertools.combinations(range(1, g), l - 1):
            yield head + (g,)


def _degree_patterns(g: int, ranks: tuple[int, ...], clifford_minimal: bool):
    if clifford_minimal:
        yield tuple(2 * r - 2 for r in ranks)
        return
    ranges = [range(2 * r - 2, 2 * g - 1) for r in ranks[:-1]]
    for ds in itertools.product(*ranges):
        if all(a <= b for a, b in zip(ds, ds[1:])):
            yield ds + (2 * g - 2,)


def _objective_rows(ranks, degs, family: str) -> list[tuple[Fraction, ...]]:
    """Coefficient rows ``c`` with ``bound_I = c . x`` where ``x_i = mu_i - mu_{i+1}``."""
    l = len(ranks)
    if family == "full":
        sets = [tuple(range(1, l + 1))]
    elif family == "pair":
        sets = [tuple(range(1, l + 1)), (1, l) if l > 1 else (1,)]
    elif family == "all":
        sets = [c for m in range(1, l + 1) for c in itertools.combinations(range(1, l + 1), m)]
    else:
        raise FibposError(f"unknown index family {family!r}")
    d = list(degs) + [degs[-1]]
    rows = []
    for chosen in sets:
        nxt = dict(zip(chosen, chosen[1:] + (l + 1,)))
        row = [Fraction(0)] * l
        # (d_i + d_next)(mu_i - mu_next) telescopes into the x's between them
        for i in chosen:
            w = Fraction(d[i - 1] + d[nxt[i] - 1])
            for t in range(i, nxt[i]):
                row[t - 1] += w
        rows.append(tuple(row))
    return list(dict.fromkeys(rows))


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Exact Gaussian elimination; None when singular."""
    m = len(A)
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(m):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][m] for r in range(m)]


def _minimize_max(rows, ranks, chi: Fraction) -> tuple[Fraction, tuple[Fraction, ...]]:
    """min t  s.t.  t >= row . x,  sum r_i x_i = chi,  x >= 0  (exact vertex enumeration).

    Unknowns are (x_1..x_l, t); a vertex has l + 1 active constraints, one of
    which is the equality. Returns the optimum and the slopes
    ``mu_i = x_i + ... + x_l`` of the lexicographically smallest optimal vertex.
    """
    l = len(ranks)
    ineqs = [("x", i) for i in range(l)] + [("t", k) for k in range(len(rows))]
    best: tuple[Fraction, tuple[Fraction, ...]] | None = None
    for active in itertools.combinations(ineqs, l):
        A = [[Fraction(r) for r in ranks] + [Fraction(0)]]
        rhs = [chi]
        for kind, k in active:
            if kind == "x":
                row = [Fraction(0)] * (l + 1)
                row[k] = Fraction(1)
            else:
                row = [-c for c in rows[k]] + [Fraction(1)]
            A.append(row)
            rhs.append(Fraction(0))
        sol = _solve(A, rhs)
        if sol is None:
            continue
        x, t = tuple(sol[:l]), sol[l]
        if any(v < 0 for v in x):
            continue
        if any(t < sum((c * v for c, v in zip(row, x)), Fraction(0)) for row in rows):
            continue
        mus = tuple(sum(x[i:], Fraction(0)) for i in range(l))
        if best is None or (t, mus) < best:
            best = (t, mus)
    if best is None:
        raise InfeasibleError("empty polytope")
    return best


@dataclass(frozen=True)
class WorstCase:
    minRatio: Fraction
    witness: HNData
    patterns: int


def _witness_key(hn: HNData):
    return tuple((s.r, s.d, s.mu) for s in hn.steps)


def worst_case_filtration(
    g: int,
    chi: RationalLike,
    maxSteps: int,
    family: str = "pair",
    clifford_minimal: bool = True,
) -> WorstCase:
    """Minimize the best Xiao bound over ``deg G`` across admissible filtrations.

    For each discrete pattern (ranks, Clifford-minimal degrees) the Xiao
    bounds are linear in ``x_i = mu_i - mu_{i+1} >= 0`` subject to
    ``sum r_i x_i = chi``. ``family`` picks the index sets whose bounds are
    combined by ``max``: ``"pair"`` uses the full set and ``{1, l}``,
    ``"full"`` the full set alone, ``"all"`` every nonempty subset.
    """
    chi = Q(chi)
    if g < 2:
        raise FibposError("genus must be >= 2")
    if chi <= 0:
        raise FibposError("chi must be positive")
    if not 1 <= maxSteps <= g:
        raise FibposError("need 1 <= maxSteps <= g")
    if not clifford_minimal and maxSteps > 6:
        raise FibposError("free-degree sweeps are capped at maxSteps <= 6")
    if family == "all" and maxSteps > 4:
        raise FibposError("the all-subsets family is capped at maxSteps <= 4")
    cap = _max_enum()
    best: tuple[Fraction, HNData] | None = None
    count = 0
    for ranks in _rank_patterns(g, maxSteps):
        for degs in _degree_patterns(g, ranks, clifford_minimal):
            count += 1
            if count > cap:
                raise FibposError(f"pattern count exceeds FIBPOS_MAX_ENUM={cap}")
            rows = _objective_rows(ranks, degs, family)
            t, mus = _minimize_max(rows, ranks, chi)
            witness = HNData(
                tuple(HNStep(m, r, Fraction(d)) for m, r, d in zip(mus, ranks, degs)),
                nef=True,
                strict=False,
            )
            ratio = t / chi
            if best is None or ratio < best[0] or (ratio == best[0] and _witness_key(witness) < _witness_key(best[1])):
                best = (ratio, witness)
    if best is None:
        raise InfeasibleError("no admissible filtration pattern")
    return WorstCase(best[0], best[1], count)
