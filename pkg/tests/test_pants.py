import math

import mpmath
import pytest

from src.common.errors import DomainError
from src.common.models import BoundaryKind
from src.geometry.pants import (
    PantsSpec,
    arc_with_displacement,
    coefficients,
    cone_distance,
    from_trace,
    perp_between,
    self_perp_one,
    self_perp_two,
    sine_trace,
    trace,
)


def test_traces():
    assert trace(-1.0) == pytest.approx(math.cos(0.5), rel=1e-15)
    assert trace(0.0) == 1.0
    assert trace(2.0) == pytest.approx(math.cosh(1.0), rel=1e-15)
    assert sine_trace(-1.0) == pytest.approx(math.sin(0.5), rel=1e-15)
    assert sine_trace(0.0) == 0.0
    assert sine_trace(2.0) == pytest.approx(math.sinh(1.0), rel=1e-15)


@pytest.mark.parametrize("lam", [-2.5, -1.0, -0.2, 0.4, 1.5, 6.0])
def test_from_trace_inverts_trace(lam):
    assert from_trace(trace(lam)).value == pytest.approx(lam, rel=1e-9)


def test_from_trace_snaps_cusp_and_rejects():
    assert from_trace(1.0 + 1e-11).kind == BoundaryKind.CUSP
    with pytest.raises(DomainError):
        from_trace(0.0)
    with pytest.raises(DomainError):
        from_trace(math.nan)


def test_pants_spec():
    spec = PantsSpec.of(-1.0, 0.0, 2.0)
    assert spec.kinds() == (BoundaryKind.CONE, BoundaryKind.CUSP, BoundaryKind.GEODESIC)
    assert spec.traces[1] == 1.0


def test_cusp_cusp_coefficients():
    coeff = coefficients(0.0, 0.0, 1.7)
    expected = 1.0 / math.tanh(1.7 / 4.0)
    assert coeff.V == pytest.approx(expected, rel=1e-14)
    assert coeff.U == pytest.approx(expected, rel=1e-14)
    assert coeff.s == 0.0


@pytest.mark.parametrize(
    "target,companion,waist",
    [(-1.0, 0.8, 1.3), (-2.8, -2.8, 0.05), (0.0, 2.0, 3.0), (1.4, -0.5, 2.5), (3.0, 3.0, 8.0)],
)
def test_coefficient_identity(target, companion, waist):
    coeff = coefficients(target, companion, waist)
    m = trace(target)
    assert coeff.U ** 2 == pytest.approx(coeff.V ** 2 - m * m + 1.0, rel=1e-12)
    assert coeff.U > 0 and coeff.V > 0


def test_coefficients_agree_with_squared_perpendicular(rng):
    for _ in range(10_000):
        target, companion, waist = rng.uniform(0.05, 6.0), rng.uniform(-3.0, 4.0), rng.uniform(0.05, 6.0)
        m, mu = trace(target), trace(companion)
        ch, sh = math.cosh(waist / 2.0), math.sinh(waist / 2.0)
        squared = (ch * ch + 2.0 * mu * m * ch + mu * mu + m * m - 1.0) / (sh * sh)
        assert coefficients(target, companion, waist).U == pytest.approx(math.sqrt(squared), rel=1e-12)


def test_coefficients_oracle():
    m = mpmath.cos(mpmath.mpf(1) / 2)
    mu = mpmath.cosh(mpmath.mpf("0.8") / 2)
    w = mpmath.mpf("1.3")
    v = (m * mpmath.cosh(w / 2) + mu) / mpmath.sinh(w / 2)
    u = mpmath.sqrt(v * v - m * m + 1)
    coeff = coefficients(-1.0, 0.8, 1.3)
    assert coeff.V == pytest.approx(float(v), rel=1e-14)
    assert coeff.U == pytest.approx(float(u), rel=1e-14)


def test_cone_distance_matches_coefficients():
    coeff = coefficients(-1.0, 0.8, 1.3)
    d = cone_distance(-1.0, 0.8, 1.3)
    assert coeff.U == pytest.approx(coeff.s * math.cosh(d), rel=1e-13)
    assert cone_distance(0.0, 0.8, 1.3) == math.inf
    d = cone_distance(1.2, 0.8, 1.3)
    geodesic = coefficients(1.2, 0.8, 1.3)
    assert geodesic.V == pytest.approx(geodesic.s * math.cosh(d), rel=1e-13)


def test_coefficients_reject_bad_waist():
    with pytest.raises(DomainError):
        coefficients(0.0, 0.0, 0.0)


def test_perp_between_oracle():
    l1, l2, l3 = mpmath.mpf("1.1"), mpmath.mpf("2.3"), mpmath.mpf("-0.7")
    x = (mpmath.cosh(l1 / 2) * mpmath.cosh(l2 / 2) + mpmath.cos(l3 / 2)) / (mpmath.sinh(l1 / 2) * mpmath.sinh(l2 / 2))
    assert perp_between(1.1, 2.3, -0.7) == pytest.approx(float(mpmath.acosh(x)), rel=1e-13)


def test_perp_between_monotone_in_third_cuff():
    values = [perp_between(1.1, 2.3, lam) for lam in (-2.5, -1.0, 0.0, 1.0, 3.0)]
    assert values == sorted(values)


def test_perp_between_needs_geodesics():
    with pytest.raises(DomainError):
        perp_between(-1.0, 2.0, 0.0)


def test_self_perp_one():
    h = self_perp_one(1.4, -0.9, 0.0)
    m1, m2 = trace(1.4), trace(-0.9)
    assert math.cosh(h) - 1.0 == pytest.approx(2.0 * (m2 * m2 + 2.0 * m1 * m2 + 1.0) / sine_trace(1.4) ** 2, rel=1e-13)


def test_self_perp_two_cusps_and_equal_cuffs():
    lam = 1.6
    assert self_perp_two(lam, 0.0, 0.0) == pytest.approx(2.0 * math.asinh(1.0 / math.sinh(lam / 4.0)), rel=1e-14)
    m = trace(-1.2)
    h = self_perp_two(lam, -1.2, -1.2)
    assert 1.0 / math.sinh(h / 2.0) == pytest.approx(math.sinh(lam / 4.0) / m, rel=1e-13)


@pytest.mark.parametrize("lam2,lam3", [(-1.2, 0.0), (0.7, -2.0), (2.5, 0.3)])
def test_self_perp_two_solves_relation(lam2, lam3):
    lam1 = 1.9
    h = self_perp_two(lam1, lam2, lam3)
    l = 1.0 / math.sinh(h / 2.0)
    m2, m3 = trace(lam2), trace(lam3)
    lhs = l * m2 * math.sqrt(1.0 + (l * m3) ** 2) + l * m3 * math.sqrt(1.0 + (l * m2) ** 2)
    assert lhs == pytest.approx(math.sinh(lam1 / 2.0), rel=1e-12)


def test_arc_with_displacement():
    assert arc_with_displacement(1.2, 0.0, 0.0) == pytest.approx(1.2, rel=1e-14)
    assert arc_with_displacement(1.2, 0.5, 0.5) > 1.2


def test_perpendicular_ratio_against_cusp(rng):
    """cosh h - 1 changes by a factor between (1+m)/2 and 1 (cone) or 1 and (1+m)/2 (geodesic)."""
    for _ in range(500):
        l1, l2 = rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)
        lam = rng.uniform(-3.0, 3.0)
        m3 = trace(lam)
        ratio = (math.cosh(perp_between(l1, l2, lam)) - 1.0) / (math.cosh(perp_between(l1, l2, 0.0)) - 1.0)
        low, high = sorted((1.0, (1.0 + m3) / 2.0))
        assert low * (1 - 1e-10) <= ratio <= high * (1 + 1e-10)


def test_self_perp_one_ratio_against_cusp(rng):
    for _ in range(500):
        l1 = rng.uniform(0.2, 3.0)
        lam2, lam3 = rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)
        m3 = trace(lam3)
        ratio = (math.cosh(self_perp_one(l1, lam2, lam3)) - 1.0) / (math.cosh(self_perp_one(l1, lam2, 0.0)) - 1.0)
        low, high = sorted((1.0, m3 * m3))
        assert low * (1 - 1e-9) <= ratio <= high * (1 + 1e-9)


def test_self_perp_two_ratio_against_cusps(rng):
    for _ in range(500):
        l1 = rng.uniform(0.2, 3.0)
        lam2, lam3 = rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)
        m2, m3 = trace(lam2), trace(lam3)
        l = 1.0 / math.sinh(self_perp_two(l1, lam2, lam3) / 2.0)
        l0 = 1.0 / math.sinh(self_perp_two(l1, 0.0, 0.0) / 2.0)
        k, big_k = min(m2, m3), max(m2, m3)
        assert k * k * (1 - 1e-9) <= (l0 / l) ** 2 <= big_k * big_k * (1 + 1e-9)


def test_self_perp_two_continuous_at_cusp():
    near = self_perp_two(1.5, -1e-7, -1e-7)
    assert near == pytest.approx(self_perp_two(1.5, 0.0, 0.0), rel=1e-9)
