import math

import pytest

from src.common.errors import DegenerateInput, DomainError, InconsistentSpectrum, SingularSystem
from src.geometry.pants import trace
from src.geometry.xpiece import XPieceSpec, chart_spec, dual_spec, family_length, probe_charts
from src.inversion.boundary import (
    BCRow,
    BCUnknowns,
    cone_pair_candidates,
    intercept_model,
    recover_cone_pair,
    recover_single_boundary,
    side_factor,
    solve_bc_system,
    solve_bc_values,
    try_solve_bc_system,
)


def chart_rows(spec: XPieceSpec):
    dual = dual_spec(spec)
    rows = []
    for k in probe_charts(dual):
        chart = chart_spec(spec, k, dual)
        rows.append(
            BCRow(
                waist=chart.waist,
                twist=chart.twist,
                length0=family_length(chart, 0),
                length1=family_length(chart, 1),
            )
        )
    return rows


def waist_rows(companion_a: float, companion_b: float, waists=(1.0, 2.0, 3.0, 4.0)):
    """Rows of X-pieces sharing boundary data, one per waist, with nodes within a decade."""
    rows = []
    for waist in waists:
        spec = XPieceSpec.of(2.5, companion_a, 3.0, companion_b, waist=waist, twist=0.2)
        rows.append(BCRow(waist=waist, twist=0.2, length0=family_length(spec, 0), length1=family_length(spec, 1)))
    return rows


def _spec(companion_a: float, companion_b: float) -> XPieceSpec:
    # long shortest curve: the re-cut waists put the nodes between 1.26 and 8e10
    return XPieceSpec.of(2.5, companion_a, 3.0, companion_b, waist=1.4, twist=0.2)


M3, M3P = trace(2.5), trace(3.0)


def test_solve_bc_values_synthetic():
    truth = BCUnknowns(S=1.3, T=-0.4, Q=2.2, P=0.7)
    nodes = [1.5, 2.0, 3.0, 4.5]
    solved = solve_bc_values(nodes, [truth.evaluate(x) for x in nodes])
    assert solved.as_tuple() == pytest.approx(truth.as_tuple(), rel=1e-9, abs=1e-9)
    assert solved.forward_error < 1e-8
    nodes = [1.2, 1.5, 2.0, 3.0, 4.5]
    solved = solve_bc_values(nodes, [truth.evaluate(x) for x in nodes])
    assert solved.as_tuple() == pytest.approx(truth.as_tuple(), rel=1e-9, abs=1e-9)
    assert solved.condition >= 1.0


def test_solve_bc_values_singular():
    with pytest.raises(SingularSystem):
        solve_bc_values([1.5, 2.0, 2.0, 3.0], [10.0, 20.0, 20.0, 90.0])
    with pytest.raises(SingularSystem):
        solve_bc_values([1.5, 2.0, 3.0], [10.0, 20.0, 90.0])


def test_solve_bc_values_rejects_unresolvable_spread():
    truth = BCUnknowns.from_traces(trace(-1.2), M3, trace(-0.4), M3P)
    nodes = [1.26, 2776.0, 1.5e7, 7.9e10]
    with pytest.raises(SingularSystem):
        solve_bc_values(nodes, [truth.evaluate(x) for x in nodes])


def test_row_lhs_is_product_of_side_factors():
    for row in waist_rows(-1.2, -0.4):
        expected = side_factor(row.node, trace(-1.2), M3) * side_factor(row.node, trace(-0.4), M3P)
        assert row.lhs == pytest.approx(expected, rel=1e-9)


def test_row_intercept_matches_family_constant():
    for row in waist_rows(-1.2, 0.9):
        spec = XPieceSpec.of(2.5, -1.2, 3.0, 0.9, waist=row.waist, twist=0.2)
        _, base = spec.amplitudes()
        sh2 = math.sinh(row.waist / 2.0) ** 2
        assert row.intercept == pytest.approx(base * sh2, rel=1e-9, abs=1e-12)
        assert row.intercept == pytest.approx(intercept_model(row.node, trace(-1.2), M3, trace(0.9), M3P), rel=1e-9)


def test_waist_rows_recover_unknowns():
    unknowns = solve_bc_system(waist_rows(-1.2, -0.4))
    truth = BCUnknowns.from_traces(trace(-1.2), M3, trace(-0.4), M3P)
    assert unknowns.as_tuple() == pytest.approx(truth.as_tuple(), rel=1e-6)
    candidates = cone_pair_candidates(unknowns, M3, M3P)
    assert any(
        u == pytest.approx(trace(-1.2), rel=1e-7) and u2 == pytest.approx(trace(-0.4), rel=1e-7)
        for u, u2 in candidates
    )


def test_recover_cone_pair_from_solved_system():
    rows = waist_rows(-1.2, -0.4)
    low, high = recover_cone_pair(solve_bc_system(rows), M3, M3P, rows)
    assert (low.value, high.value) == pytest.approx((-1.2, -0.4), rel=1e-6)


def test_long_dual_chart_system_is_singular():
    rows = chart_rows(_spec(-1.2, -0.4))
    assert max(row.node for row in rows) / min(row.node for row in rows) > 1e6
    with pytest.raises(SingularSystem):
        solve_bc_system(rows)
    assert try_solve_bc_system(rows) is None


def test_recover_cone_pair():
    rows = chart_rows(_spec(-1.2, -0.4))
    low, high = recover_cone_pair(try_solve_bc_system(rows), M3, M3P, rows)
    assert low.value == pytest.approx(-1.2, rel=1e-6)
    assert high.value == pytest.approx(-0.4, rel=1e-6)


def test_recover_cone_pair_swap_invariant():
    rows = chart_rows(_spec(-0.4, -1.2))
    low, high = recover_cone_pair(None, M3, M3P, rows)
    assert (low.value, high.value) == pytest.approx((-1.2, -0.4), rel=1e-6)


def test_recover_equal_cone_pair():
    rows = chart_rows(_spec(-0.8, -0.8))
    low, high = recover_cone_pair(None, M3, M3P, rows)
    assert (low.value, high.value) == pytest.approx((-0.8, -0.8), rel=1e-6)


def test_recover_cusp_pair():
    rows = chart_rows(_spec(0.0, 0.0))
    low, high = recover_cone_pair(None, M3, M3P, rows)
    assert low.value == pytest.approx(0.0, abs=2e-4)
    assert high.value == pytest.approx(0.0, abs=2e-4)


def test_cone_pair_candidates_keep_pairing():
    rows = chart_rows(_spec(-1.2, -0.4))
    candidates = cone_pair_candidates(None, M3, M3P, rows)
    assert len(candidates) == 1
    assert candidates[0] == pytest.approx((trace(-1.2), trace(-0.4)), rel=1e-7)


def test_shortest_row_alone_admits_a_second_pair():
    rows = chart_rows(_spec(-1.2, -0.4))
    shortest = min(rows, key=lambda row: row.node)
    candidates = cone_pair_candidates(None, M3, M3P, [shortest])
    assert len(candidates) >= 2
    assert any(pair == pytest.approx((trace(-1.2), trace(-0.4)), rel=1e-7) for pair in candidates)


def test_recover_cone_pair_rejects_negative_sum():
    with pytest.raises(InconsistentSpectrum):
        recover_cone_pair(BCUnknowns(S=-1.0, T=1.0, Q=1.0, P=1.0), M3, M3P)


def test_recovery_needs_some_observations():
    with pytest.raises(DomainError):
        cone_pair_candidates(None, M3, M3P)
    with pytest.raises(DomainError):
        recover_single_boundary(None, M3, trace(0.9), M3P)


def test_recover_single_boundary():
    rows = chart_rows(_spec(-1.2, 0.9))
    value = recover_single_boundary(try_solve_bc_system(rows), M3, trace(0.9), M3P, rows)
    assert value.value == pytest.approx(-1.2, rel=1e-6)


def test_recover_single_boundary_from_solved_system():
    rows = waist_rows(-1.2, 0.9)
    unknowns = solve_bc_system(rows)
    assert recover_single_boundary(unknowns, M3, trace(0.9), M3P).value == pytest.approx(-1.2, rel=1e-6)
    assert recover_single_boundary(unknowns, M3, trace(0.9), M3P, rows).value == pytest.approx(-1.2, rel=1e-6)


def test_recover_single_boundary_wrong_side_is_inconsistent():
    rows = chart_rows(_spec(-1.2, 0.9))
    with pytest.raises(InconsistentSpectrum):
        recover_single_boundary(None, M3, trace(1.7), M3P, rows)


def test_row_at_half_integer_twist():
    row = BCRow(waist=1.0, twist=-0.5, length0=2.0, length1=2.0)
    with pytest.raises(DegenerateInput):
        row.lhs
