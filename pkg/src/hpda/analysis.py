"""Closed-form load baselines, the first-layer lower bound, and comparison sweeps.

All arithmetic is exact: memory sizes, split points and loads are
``fractions.Fraction`` throughout, with floats only ever produced by callers
for display.  Non-lattice memory ratios are handled by memory sharing, i.e.
the lower convex envelope of the lattice loads (linear interpolation between
adjacent lattice points); ratios that exceed 1 inside a split term clamp to 1,
meaning that subsystem caches everything and contributes zero load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .hierarchy import grouping_params, hybrid_params

Rational = Union[int, str, float, Fraction]


def _fraction(value: Rational) -> Fraction:
    """Exact conversion; floats go through their shortest decimal repr so that
    a literal like 2.4 means 12/5, not its binary approximation."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class SystemParams:
    """A (K1, K2; M1, M2; N) two-layer caching system."""

    k1: int
    k2: int
    n_files: int
    m1: Fraction
    m2: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "m1", _fraction(self.m1))
        object.__setattr__(self, "m2", _fraction(self.m2))
        if self.k1 < 1 or self.k2 < 1 or self.n_files < 1:
            raise ValueError("K1, K2 and N must be positive")
        if not 0 <= self.m1 <= self.n_files or not 0 <= self.m2 <= self.n_files:
            raise ValueError("memory sizes must lie in [0, N]")


@dataclass(frozen=True)
class SplitPoint:
    """File/memory split (alpha, beta) between the two subsystems."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _fraction(self.alpha))
        object.__setattr__(self, "beta", _fraction(self.beta))
        if not 0 <= self.alpha <= 1 or not 0 <= self.beta <= 1:
            raise ValueError("alpha and beta must lie in [0, 1]")


def r_c(m_ratio: Rational, k: int) -> Fraction:
    """Single-layer coded-caching load at memory ratio m for k users.

    Exactly K(1-m)/(1+Km) at the lattice points m = t/k; linear interpolation
    (memory sharing) between adjacent lattice points elsewhere.
    """
    m = _fraction(m_ratio)
    if k < 1:
        raise ValueError("k must be positive")
    if not 0 <= m <= 1:
        raise ValueError(f"memory ratio {m} outside [0, 1]")
    scaled = m * k
    t0 = math.floor(scaled)
    lo = Fraction(k - t0, t0 + 1)
    if scaled == t0:
        return lo
    hi = Fraction(k - t0 - 1, t0 + 2)
    lam = scaled - t0
    return (1 - lam) * lo + lam * hi


def _rc_clamped(memory: Fraction, content: Fraction, k: int) -> Fraction:
    """r_c(memory/content, k) with ratios above 1 clamped to a full cache."""
    ratio = memory / content
    if ratio > 1:
        ratio = Fraction(1)
    return r_c(ratio, k)


def knmd_loads(p: SystemParams, s: SplitPoint) -> tuple[Fraction, Fraction]:
    """Two-subsystem baseline that rebuilds whole files at each layer.

    R1 = a*K2*r_c(M1/(aN), K1) + (1-a)*r_c((1-b)M2/((1-a)N), K1K2)
    R2 = a*r_c(b*M2/(aN), K2)  + (1-a)*r_c((1-b)M2/((1-a)N), K2)
    with a weight of zero killing its term (the clamped limit).
    """
    a, b = s.alpha, s.beta
    n = Fraction(p.n_files)
    r1 = Fraction(0)
    r2 = Fraction(0)
    if a > 0:
        r1 += a * p.k2 * _rc_clamped(p.m1, a * n, p.k1)
        r2 += a * _rc_clamped(b * p.m2, a * n, p.k2)
    if a < 1:
        rest = _rc_clamped((1 - b) * p.m2, (1 - a) * n, p.k1 * p.k2)
        r1 += (1 - a) * rest
        r2 += (1 - a) * _rc_clamped((1 - b) * p.m2, (1 - a) * n, p.k2)
    return r1, r2


def wwcy_loads(p: SystemParams, s: SplitPoint) -> tuple[Fraction, Fraction]:
    """Improved baseline concatenating the two layers' schemes.

    Shares KNMD's R2; its first-layer term multiplies the two layers' loads:
    R1 = a*r_c(M1/(aN), K1)*r_c(b*M2/(aN), K2) + (1-a)*r_c((1-b)M2/((1-a)N), K1K2).
    """
    a, b = s.alpha, s.beta
    n = Fraction(p.n_files)
    r1 = Fraction(0)
    if a > 0:
        r1 += a * _rc_clamped(p.m1, a * n, p.k1) * _rc_clamped(b * p.m2, a * n, p.k2)
    if a < 1:
        r1 += (1 - a) * _rc_clamped((1 - b) * p.m2, (1 - a) * n, p.k1 * p.k2)
    _, r2 = knmd_loads(p, s)
    return r1, r2


_FORMULAS = {"knmd": knmd_loads, "wwcy": wwcy_loads}


def search_min_r1(
    formula: str, p: SystemParams, grid_step: Rational = Fraction(1, 100)
) -> tuple[SplitPoint, Fraction, Fraction]:
    """Exhaustive grid search over alpha, beta in {0, step, ..., 1}.

    Returns the point minimizing R1; ties break by smaller R2, then by
    lexicographic (alpha, beta).
    """
    if formula not in _FORMULAS:
        raise ValueError(f"formula must be one of {sorted(_FORMULAS)}, got {formula!r}")
    fn = _FORMULAS[formula]
    step = _fraction(grid_step)
    if not 0 < step <= 1:
        raise ValueError(f"grid step {step} outside (0, 1]")
    values = []
    i = 0
    while i * step < 1:
        values.append(i * step)
        i += 1
    values.append(Fraction(1))
    best_key: tuple[Fraction, Fraction] | None = None
    best: tuple[SplitPoint, Fraction, Fraction] | None = None
    for a in values:
        for b in values:
            point = SplitPoint(alpha=a, beta=b)
            r1, r2 = fn(p, point)
            key = (r1, r2)
            if best_key is None or key < best_key:
                best_key = key
                best = (point, r1, r2)
    assert best is not None
    return best


def lower_bound_r1(p: SystemParams) -> Fraction:
    """Least possible first-layer load under uncoded placement.

    The pooled memory ratio (M1+M2)/N is evaluated against the envelope of the
    lattice bounds (K1K2 - t)/(t + 1), which is exactly ``r_c`` of the pooled
    ratio for K1K2 users.
    """
    pooled = (p.m1 + p.m2) / p.n_files
    if not 0 <= pooled <= 1:
        raise ValueError(f"pooled memory ratio {pooled} outside [0, 1]")
    return r_c(pooled, p.k1 * p.k2)


def optimal_r2(p: SystemParams) -> Fraction:
    """Least possible second-layer load under uncoded placement: r_c(M2/N, K2)."""
    ratio = p.m2 / p.n_files
    if not 0 <= ratio <= 1:
        raise ValueError(f"memory ratio {ratio} outside [0, 1]")
    return r_c(ratio, p.k2)


@dataclass(frozen=True)
class ComparisonRow:
    """One scheme evaluated at one memory point of a sweep."""

    scheme: str
    t: int
    m1_ratio: Fraction
    m2_ratio: Fraction
    r1: Fraction | None
    r2: Fraction | None
    f: int | None
    feasible: bool = True


def _mn_params(k: int, t: int) -> tuple[int, int, int, int]:
    return (k, math.comb(k, t), math.comb(k - 1, t - 1), math.comb(k, t + 1))


def compare_sweep(k1: int, k2: int, n: int, t_range: Iterable[int]) -> list[ComparisonRow]:
    """Evaluate all schemes at the grouping construction's memory points.

    For each t, the memory ratios are fixed by the grouping construction; the
    rows cover that construction, the hybrid construction fed matched
    single-layer arrays (marked infeasible when no such arrays exist at these
    ratios), both baselines at alpha = beta = 1, and the per-layer optima
    ("bound": R1 lower bound and optimal R2).
    """
    rows: list[ComparisonRow] = []
    for t in t_range:
        loads, _, _ = grouping_params(k1, k2, t)
        m1r, m2r = loads.m1_ratio, loads.m2_ratio
        params = SystemParams(k1=k1, k2=k2, n_files=n, m1=m1r * n, m2=m2r * n)
        rows.append(
            ComparisonRow("grouping", t, m1r, m2r, loads.r1, loads.r2, loads.f)
        )
        t1, t2 = m1r * k1, m2r * k2
        if (
            t1.denominator == 1
            and t2.denominator == 1
            and 1 <= t1 <= k1
            and 1 <= t2 <= k2
        ):
            hybrid = hybrid_params(_mn_params(k1, int(t1)), _mn_params(k2, int(t2)))
            rows.append(
                ComparisonRow("hybrid-mn", t, m1r, m2r, hybrid.r1, hybrid.r2, hybrid.f)
            )
        else:
            rows.append(
                ComparisonRow("hybrid-mn", t, m1r, m2r, None, None, None, feasible=False)
            )
        whole = SplitPoint(alpha=Fraction(1), beta=Fraction(1))
        knmd_r1, knmd_r2 = knmd_loads(params, whole)
        rows.append(ComparisonRow("knmd", t, m1r, m2r, knmd_r1, knmd_r2, None))
        wwcy_r1, wwcy_r2 = wwcy_loads(params, whole)
        rows.append(ComparisonRow("wwcy", t, m1r, m2r, wwcy_r1, wwcy_r2, None))
        rows.append(
            ComparisonRow(
                "bound", t, m1r, m2r, lower_bound_r1(params), optimal_r2(params), None
            )
        )
    return rows
