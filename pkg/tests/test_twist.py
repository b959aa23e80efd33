import math

import pytest

from src.common.errors import DegenerateInput, InconsistentSpectrum, MissingCurves
from src.geometry.xpiece import TorusSpec, XPieceSpec, family_length, torus_family_length
from src.inversion.twist import best_window, recover_torus_angle, recover_twist, solve_torus_twist, solve_twist


def _xpiece(twist: float, waist: float = 1.2) -> XPieceSpec:
    return XPieceSpec.of(2.5, -1.0, 3.0, -0.6, waist=waist, twist=twist)


def test_solve_twist_round_trip():
    spec = _xpiece(0.7)
    lengths = [family_length(spec, n) for n in range(3)]
    assert solve_twist(*lengths, spec.waist) == pytest.approx(0.7, abs=1e-10)


def test_solve_twist_symmetric_window():
    spec = _xpiece(-1.0)
    lengths = [family_length(spec, n) for n in range(3)]
    assert solve_twist(*lengths, spec.waist) == pytest.approx(-1.0, abs=1e-10)


def test_solve_twist_half_integer_is_degenerate():
    spec = _xpiece(-0.5)
    lengths = [family_length(spec, n) for n in range(3)]
    with pytest.raises(DegenerateInput):
        solve_twist(*lengths, spec.waist)


def test_solve_twist_rejects_unreachable_ratio():
    with pytest.raises(InconsistentSpectrum):
        solve_twist(3.0, 3.1, 3.15, 1.2)


def test_solve_torus_twist():
    spec = TorusSpec.of(2.2, -1.1, twist=-0.3)
    lengths = [torus_family_length(spec, n) for n in range(3)]
    assert solve_torus_twist(*lengths, spec.waist) == pytest.approx(-0.3, abs=1e-10)


def test_recover_twist_fuzz(rng):
    for _ in range(1000):
        twist = rng.uniform(-3.0, 3.0)
        spec = XPieceSpec.of(
            rng.uniform(0.5, 4.0),
            rng.uniform(-2.5, 2.0),
            rng.uniform(0.5, 4.0),
            rng.uniform(-2.5, 2.0),
            waist=rng.uniform(0.5, 3.0),
            twist=twist,
        )
        sample = {n: family_length(spec, n) for n in range(-5, 6)}
        assert recover_twist(sample, spec.waist) == pytest.approx(twist, abs=1e-9)


def test_recover_twist_uses_any_window():
    spec = _xpiece(2.4)
    sample = {n: family_length(spec, n) for n in (-7, -6, -5, 9)}
    assert recover_twist(sample, spec.waist) == pytest.approx(2.4, abs=1e-8)


def test_best_window_prefers_short_members():
    spec = _xpiece(1.3)
    sample = {n: family_length(spec, n) for n in range(-5, 6)}
    assert best_window(sample) == -2


def test_recover_twist_missing_members():
    with pytest.raises(MissingCurves):
        recover_twist({0: 3.0, 1: 3.5, 3: 4.0}, 1.0)


@pytest.mark.parametrize("twist,members", [(-0.5, range(3)), (1.5, range(-2, 1))])
def test_recover_twist_half_integer(twist, members):
    spec = _xpiece(twist)
    sample = {n: family_length(spec, n) for n in members}
    assert recover_twist(sample, spec.waist) == pytest.approx(twist, abs=1e-12)


def test_recover_twist_long_waist():
    spec = _xpiece(2.61, waist=4.41)
    sample = {n: family_length(spec, n) for n in range(-6, 6)}
    assert recover_twist(sample, spec.waist) == pytest.approx(2.61, abs=1e-9)


@pytest.mark.parametrize("lam", [-2.0, 0.0, 1.5])
def test_recover_torus_angle(lam):
    spec = TorusSpec.of(1.9, lam, twist=0.4)
    n = -1
    recovered = recover_torus_angle(spec.waist, torus_family_length(spec, n), spec.twist + n)
    assert recovered.value == pytest.approx(lam, abs=1e-8)


def test_recover_torus_angle_inconsistent():
    with pytest.raises(InconsistentSpectrum):
        recover_torus_angle(2.0, 0.1, 0.0)
    with pytest.raises(InconsistentSpectrum):
        recover_torus_angle(-1.0, 2.0, 0.0)


@pytest.mark.parametrize("grid", [[-0.45 + 0.05 * k for k in range(70)], [-3.0 + 0.05 * k for k in range(50)]])
def test_consecutive_ratio_decreases_with_twist(grid):
    ratios = []
    for t in grid:
        spec = _xpiece(t)
        c0, c1, c2 = (math.cosh(family_length(spec, n) / 2.0) for n in range(3))
        ratios.append((c2 - c1) / (c1 - c0))
    assert all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
