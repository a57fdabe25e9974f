"""Closed-form baselines, the lower bound, the grid search, and sweeps."""

from fractions import Fraction
from math import comb

import pytest

from hpda import (
    SplitPoint,
    SystemParams,
    build_grouping,
    compare_sweep,
    grouping_params,
    hybrid_params,
    knmd_loads,
    loads_from_hpda,
    lower_bound_r1,
    optimal_r2,
    r_c,
    search_min_r1,
    wwcy_loads,
)

EXAMPLE_PARAMS = SystemParams(
    k1=3, k2=2, n_files=6, m1=Fraction(12, 5), m2=Fraction(8, 5)
)


def test_rc_lattice_values():
    assert r_c(0, 5) == 5
    assert r_c(1, 5) == 0
    assert r_c(Fraction(1, 3), 3) == 1
    assert r_c(Fraction(2, 3), 6) == Fraction(2, 5)
    for k in (2, 4, 7):
        for t in range(k + 1):
            assert r_c(Fraction(t, k), k) == Fraction(k - t, t + 1)


def test_rc_interpolates_between_lattice_points():
    # halfway between t=0 (load 2) and t=1 (load 1/2) for two users
    assert r_c(Fraction(1, 4), 2) == Fraction(5, 4)
    # the golden second-layer optimum: m = 4/15, k = 2
    assert r_c(Fraction(4, 15), 2) == Fraction(6, 5)


def test_rc_monotone_nonincreasing():
    k = 6
    samples = [Fraction(i, 60) for i in range(61)]
    values = [r_c(m, k) for m in samples]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_rc_rejects_out_of_range():
    with pytest.raises(ValueError):
        r_c(Fraction(-1, 2), 3)
    with pytest.raises(ValueError):
        r_c(Fraction(3, 2), 3)


def test_rc_accepts_float_via_decimal_repr():
    assert r_c(0.5, 2) == Fraction(1, 2)
    assert r_c(0.4, 3) == r_c(Fraction(2, 5), 3)


def test_knmd_corners():
    p = EXAMPLE_PARAMS
    r1, r2 = knmd_loads(p, SplitPoint(1, 1))
    assert r1 == 2 * r_c(Fraction(2, 5), 3)
    assert r2 == r_c(Fraction(4, 15), 2)
    r1, r2 = knmd_loads(p, SplitPoint(0, 0))
    assert r1 == r_c(Fraction(4, 15), 6)
    assert r2 == r_c(Fraction(4, 15), 2)


def test_knmd_clamps_oversized_ratio():
    p = EXAMPLE_PARAMS
    # alpha = 1/5 makes M1/(alpha N) = 2 > 1: that subsystem caches all.
    r1, _ = knmd_loads(p, SplitPoint(Fraction(1, 5), 1))
    assert r1 == Fraction(4, 5) * r_c(Fraction(0), 6)


def test_wwcy_corners():
    p = EXAMPLE_PARAMS
    r1, r2 = wwcy_loads(p, SplitPoint(1, 1))
    assert r1 == r_c(Fraction(2, 5), 3) * r_c(Fraction(4, 15), 2)
    assert r2 == r_c(Fraction(4, 15), 2)


def test_wwcy_r2_equals_knmd_r2_on_grid():
    p = EXAMPLE_PARAMS
    step = Fraction(1, 10)
    for i in range(11):
        for j in range(11):
            point = SplitPoint(i * step, j * step)
            assert knmd_loads(p, point)[1] == wwcy_loads(p, point)[1]


def test_wwcy_r1_never_exceeds_knmd_r1():
    p = EXAMPLE_PARAMS
    step = Fraction(1, 10)
    for i in range(11):
        for j in range(11):
            point = SplitPoint(i * step, j * step)
            assert wwcy_loads(p, point)[0] <= knmd_loads(p, point)[0]


def test_search_returns_grid_point_consistent_with_formula():
    point, r1, r2 = search_min_r1("knmd", EXAMPLE_PARAMS, Fraction(1, 20))
    assert (r1, r2) == knmd_loads(EXAMPLE_PARAMS, point)
    assert point.alpha.denominator <= 20 and point.beta.denominator <= 20


def test_search_min_wwcy_le_knmd():
    _, knmd_r1, _ = search_min_r1("knmd", EXAMPLE_PARAMS, Fraction(1, 50))
    _, wwcy_r1, _ = search_min_r1("wwcy", EXAMPLE_PARAMS, Fraction(1, 50))
    assert wwcy_r1 <= knmd_r1


def test_search_grid_step_one_hits_corners():
    point, r1, _ = search_min_r1("knmd", EXAMPLE_PARAMS, 1)
    corner_values = [
        knmd_loads(EXAMPLE_PARAMS, SplitPoint(a, b))[0] for a in (0, 1) for b in (0, 1)
    ]
    assert r1 == min(corner_values)
    assert point.alpha in (0, 1) and point.beta in (0, 1)


def test_search_rejects_bad_arguments():
    with pytest.raises(ValueError):
        search_min_r1("unknown", EXAMPLE_PARAMS, Fraction(1, 10))
    with pytest.raises(ValueError):
        search_min_r1("knmd", EXAMPLE_PARAMS, 0)


def test_lower_bound_examples():
    assert lower_bound_r1(EXAMPLE_PARAMS) == Fraction(2, 5)
    assert lower_bound_r1(SystemParams(3, 2, 6, 3, 3)) == 0
    assert lower_bound_r1(SystemParams(3, 2, 6, 0, 0)) == 6


def test_lower_bound_matches_grouping_r1_at_lattice():
    for k1, k2 in [(2, 2), (3, 2), (2, 3)]:
        k = k1 * k2
        n = k
        for t in range(k2 + 1, k):
            loads, _, _ = grouping_params(k1, k2, t)
            params = SystemParams(k1, k2, n, loads.m1_ratio * n, loads.m2_ratio * n)
            assert lower_bound_r1(params) == loads.r1


def test_optimal_r2_examples():
    assert optimal_r2(EXAMPLE_PARAMS) == Fraction(6, 5)
    assert optimal_r2(SystemParams(3, 2, 6, 0, 6)) == 0
    assert optimal_r2(SystemParams(3, 2, 6, 0, 0)) == 2


def test_compare_sweep_golden_point():
    rows = compare_sweep(3, 2, 6, [4])
    by_scheme = {r.scheme: r for r in rows}
    assert set(by_scheme) == {"grouping", "hybrid-mn", "knmd", "wwcy", "bound"}
    g = by_scheme["grouping"]
    assert (g.r1, g.r2, g.f) == (Fraction(2, 5), Fraction(6, 5), 15)
    assert by_scheme["bound"].r1 == Fraction(2, 5)
    assert by_scheme["bound"].r2 == Fraction(6, 5)
    assert not by_scheme["hybrid-mn"].feasible  # 3*(2/5) is not an integer
    assert by_scheme["knmd"].r1 == 2 * r_c(Fraction(2, 5), 3)
    assert by_scheme["wwcy"].r1 == r_c(Fraction(2, 5), 3) * r_c(Fraction(4, 15), 2)


def test_compare_sweep_feasible_hybrid_row():
    rows = compare_sweep(2, 3, 6, [5])
    hybrid = [r for r in rows if r.scheme == "hybrid-mn"][0]
    assert hybrid.feasible
    assert hybrid.r1 == Fraction(1, 2)
    assert hybrid.r2 == Fraction(1)
    assert hybrid.f == 6
    wwcy = [r for r in rows if r.scheme == "wwcy"][0]
    assert hybrid.r1 == wwcy.r1  # matched single-layer inputs reproduce wwcy


def test_hybrid_mn_loads_factor_into_single_layer_loads():
    """With matched single-layer inputs, R1 is the product of the per-layer
    loads and R2 is the second-layer optimum."""
    for k1, t1, k2, t2 in [(2, 1, 3, 1), (3, 2, 4, 2), (4, 1, 2, 1), (5, 3, 3, 2)]:
        a = (k1, comb(k1, t1), comb(k1 - 1, t1 - 1), comb(k1, t1 + 1))
        b = (k2, comb(k2, t2), comb(k2 - 1, t2 - 1), comb(k2, t2 + 1))
        loads = hybrid_params(a, b)
        assert loads.r1 == r_c(Fraction(t1, k1), k1) * r_c(Fraction(t2, k2), k2)
        params = SystemParams(k1, k2, k1 * k2, loads.m1_ratio * k1 * k2,
                              loads.m2_ratio * k1 * k2)
        assert loads.r2 == optimal_r2(params)
        point = SplitPoint(1, 1)
        assert loads.r1 == wwcy_loads(params, point)[0]


def test_full_scale_sweep_keeps_ordering():
    """The published-figure scale runs in closed form; only ordering asserted."""
    rows = compare_sweep(40, 20, 800, [100, 400, 700])
    by_t = {}
    for r in rows:
        by_t.setdefault(r.t, {})[r.scheme] = r
    for t, schemes in by_t.items():
        g, b = schemes["grouping"], schemes["bound"]
        w, k = schemes["wwcy"], schemes["knmd"]
        assert g.r1 == b.r1 <= w.r1 <= k.r1
        assert g.r2 >= b.r2


def test_compare_sweep_empty_range():
    assert compare_sweep(3, 2, 6, []) == []


def test_compare_sweep_rejects_out_of_range_t():
    with pytest.raises(ValueError):
        compare_sweep(3, 2, 6, [2])


def test_compare_sweep_matches_constructed_loads():
    rows = compare_sweep(3, 2, 6, [4, 5])
    for row in rows:
        if row.scheme != "grouping":
            continue
        measured = loads_from_hpda(build_grouping(3, 2, row.t))
        assert measured.r1 == row.r1
        assert measured.r2 == row.r2


def test_system_params_validation():
    with pytest.raises(ValueError):
        SystemParams(k1=0, k2=2, n_files=6, m1=1, m2=1)
    with pytest.raises(ValueError):
        SystemParams(k1=2, k2=2, n_files=6, m1=7, m2=1)
    p = SystemParams(k1=2, k2=2, n_files=6, m1=2.4, m2="8/5")
    assert p.m1 == Fraction(12, 5)
    assert p.m2 == Fraction(8, 5)


def test_split_point_validation():
    with pytest.raises(ValueError):
        SplitPoint(alpha=Fraction(3, 2), beta=0)
    point = SplitPoint(alpha=0.25, beta="1/4")
    assert point.alpha == point.beta == Fraction(1, 4)
