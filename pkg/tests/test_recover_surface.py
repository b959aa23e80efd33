import pytest

from src.common.errors import ExceptionalSurface, InconsistentSpectrum, MissingCurves, UnsupportedTopology
from src.common.models import CurveId, CurveKind, LengthSpectrum
from src.inversion.surface import curve_budget, probe_rows, recover_surface
from src.teich.spectrum import curve_manifest, forward_spectrum
from src.teich.surface import SurfaceFN, standard_topology
from tests.conftest import random_surface


def _assert_same(recovered, surface):
    assert recovered.lengths == pytest.approx(surface.lengths, rel=1e-9)
    assert recovered.twists == pytest.approx(surface.twists, abs=1e-8)
    assert recovered.lambdas == pytest.approx(surface.lambdas, abs=1e-6)


def test_curve_budget():
    assert curve_budget(1, 1) == 32
    assert curve_budget(2, 0) == 12
    assert curve_budget(2, 3) == 108
    with pytest.raises(ExceptionalSurface):
        curve_budget(1, 0)


def test_torus_round_trip(torus_surface):
    spectrum = forward_spectrum(torus_surface)
    _assert_same(recover_surface(torus_surface.topology, spectrum), torus_surface)


def test_genus_two_round_trip(genus_two_surface):
    spectrum = forward_spectrum(genus_two_surface)
    _assert_same(recover_surface(genus_two_surface.topology, spectrum), genus_two_surface)


_SUPPORTED_TYPES = [(g, n) for g in (1, 2, 3) for n in range(5) if (g, n) != (1, 0)]


@pytest.mark.parametrize("genus,n", _SUPPORTED_TYPES)
def test_random_round_trips(rng, genus, n):
    for k in range(4):
        surface = random_surface(rng, genus, n, geodesic=k % 2 == 1)
        manifest = curve_manifest(surface)
        assert len(manifest) <= curve_budget(genus, n)
        spectrum = forward_spectrum(surface, manifest)
        _assert_same(recover_surface(surface.topology, spectrum, parallelism=2), surface)


def test_half_integer_twist_round_trip():
    surface = SurfaceFN.build(standard_topology(1, 1), [-1.1], [2.2], [0.5])
    _assert_same(recover_surface(surface.topology, forward_spectrum(surface)), surface)


def test_half_integer_twists_round_trip(genus_two_surface):
    surface = SurfaceFN.build(
        genus_two_surface.topology, genus_two_surface.lambdas, genus_two_surface.lengths, [0.5, -1.5, 2.5, -0.5]
    )
    _assert_same(recover_surface(surface.topology, forward_spectrum(surface)), surface)


def test_probe_rows_follow_charts(genus_two_surface):
    spectrum = forward_spectrum(genus_two_surface)
    j = next(cid.curve for cid in spectrum if cid.kind == CurveKind.DUAL)
    rows = probe_rows(spectrum, j)
    assert len(rows) == 4
    assert [row.waist for row in rows] == [
        spectrum[CurveId(curve=j, kind=CurveKind.DUAL, index=k)] for k in spectrum.charts(j)
    ]


def test_missing_pants_curve_is_named(genus_two_surface):
    spectrum = forward_spectrum(genus_two_surface)
    partial = LengthSpectrum({cid: length for cid, length in spectrum.items() if str(cid) != "pants/1:0"})
    with pytest.raises(MissingCurves) as info:
        recover_surface(genus_two_surface.topology, partial)
    assert "pants/1:0" in info.value.missing


def test_missing_twist_window_is_named(torus_surface):
    spectrum = forward_spectrum(torus_surface)
    partial = LengthSpectrum({cid: length for cid, length in spectrum.items() if str(cid) != "twist/0:1"})
    with pytest.raises(MissingCurves) as info:
        recover_surface(torus_surface.topology, partial)
    assert "twist/0:1" in info.value.missing


def test_missing_probe_is_named(genus_two_surface):
    spectrum = forward_spectrum(genus_two_surface)
    kept = (CurveKind.PANTS, CurveKind.TWIST)
    partial = LengthSpectrum({cid: length for cid, length in spectrum.items() if cid.kind in kept})
    with pytest.raises(MissingCurves) as info:
        recover_surface(genus_two_surface.topology, partial)
    assert set(info.value.missing) <= {"dual/2", "dual/3"}
    assert info.value.missing


def test_perturbed_spectrum_is_inconsistent(genus_two_surface):
    spectrum = forward_spectrum(genus_two_surface)
    perturbed = LengthSpectrum(dict(spectrum.items()))
    manifest = curve_manifest(genus_two_surface)
    extra = CurveId(curve=0, kind=CurveKind.TWIST, index=4)
    perturbed[extra] = forward_spectrum(genus_two_surface, [extra])[extra] * 1.01
    assert extra not in manifest
    with pytest.raises(InconsistentSpectrum):
        recover_surface(genus_two_surface.topology, perturbed)


def test_genus_zero_is_unsupported(rng):
    surface = random_surface(rng, 0, 6)
    topology = standard_topology(0, 6)
    spectrum = LengthSpectrum(
        {CurveId(curve=j, kind=CurveKind.PANTS): length for j, length in enumerate(surface.lengths)}
    )
    for j in range(surface.n_curves):
        for n in range(-3, 3):
            cid = CurveId(curve=j, kind=CurveKind.TWIST, index=n)
            spectrum[cid] = forward_spectrum(surface, [cid])[cid]
    with pytest.raises(UnsupportedTopology):
        recover_surface(topology, spectrum)


def test_distinct_surfaces_have_distinct_manifest_lengths(rng):
    for _ in range(20):
        x1, x2 = random_surface(rng, 2, 1), random_surface(rng, 2, 1)
        curves = curve_manifest(x1)
        s1, s2 = forward_spectrum(x1, curves), forward_spectrum(x2, curves)
        assert max(abs(s2[cid] - s1[cid]) / s1[cid] for cid in curves) > 1e-8
