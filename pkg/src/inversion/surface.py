"""Recovery of full Fenchel-Nielsen coordinates from a finite length spectrum.

Pants-curve lengths are read directly and every twist comes from three
consecutive members of its family. Boundaries inside a one-holed torus are
read from the torus family; every other boundary is a companion of a probed
X-piece and is recovered from the four-chart boundary system.
"""

import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..common.config import settings
from ..common.errors import AmbiguousRecovery, InconsistentSpectrum, MissingCurves, UnsupportedTopology
from ..common.models import CurveId, CurveKind, GeneralizedLength, LengthSpectrum
from ..geometry.pants import from_trace, trace
from ..geometry.xpiece import XPieceSpec, chart_spec, dual_spec, family_length
from ..teich.families import EmbeddedFamily, FamilyKind, all_families
from ..teich.spectrum import forward_spectrum
from ..teich.surface import CuffSlot, SurfaceFN, SurfaceTopology, check_surface_type
from .boundary import BCRow, cone_pair_candidates, recover_single_boundary, try_solve_bc_system
from .twist import best_window, recover_torus_angle, recover_twist

logger = logging.getLogger(__name__)


def curve_budget(genus: int, n_boundaries: int) -> int:
    """Upper bound 12g - 12 + 32n on the number of curves the inversion may read.

    Raises:
        ExceptionalSurface: For the exceptional surface types.
    """
    check_surface_type(genus, n_boundaries)
    return 12 * genus - 12 + 32 * n_boundaries


def _missing_window(curve: int, kind: CurveKind, present: Mapping[int, float], chart: int = 0) -> List[str]:
    """Ids completing the three-member window that needs the fewest extra curves.

    Ties go to the window centred nearest the shortest member present.
    """
    shortest = min(present, key=lambda n: (present[n], n)) if present else 1
    starts = range(min(present) - 2, max(present) + 1) if present else [0]
    best = min(
        starts, key=lambda n: (sum(1 for k in range(n, n + 3) if k not in present), abs(n + 1 - shortest), n)
    )
    return [
        str(CurveId(curve=curve, kind=kind, chart=chart, index=k))
        for k in range(best, best + 3) if k not in present
    ]


def _family_sample(spectrum: LengthSpectrum, curve: int, kind: CurveKind, chart: int = 0) -> Dict[int, float]:
    indices = spectrum.indices(curve, kind, chart)
    sample = {n: spectrum[CurveId(curve=curve, kind=kind, chart=chart, index=n)] for n in indices}
    try:
        best_window(sample)
    except MissingCurves:
        raise MissingCurves(_missing_window(curve, kind, sample, chart)) from None
    return sample


def _read_pants(topology: SurfaceTopology, spectrum: LengthSpectrum) -> Tuple[List[float], List[float]]:
    families = all_families(topology)
    missing = [
        str(CurveId(curve=j, kind=CurveKind.PANTS)) for j in range(topology.n_curves)
        if CurveId(curve=j, kind=CurveKind.PANTS) not in spectrum
    ]
    for j in range(topology.n_curves):
        present = {
            n: spectrum[CurveId(curve=j, kind=CurveKind.TWIST, index=n)]
            for n in spectrum.indices(j, CurveKind.TWIST)
        }
        try:
            best_window(present)
        except MissingCurves:
            missing.extend(_missing_window(j, CurveKind.TWIST, present))
    if missing:
        raise MissingCurves(missing)

    lengths = [spectrum[CurveId(curve=j, kind=CurveKind.PANTS)] for j in range(topology.n_curves)]
    twists = []
    for family in families:
        sample = _family_sample(spectrum, family.curve, CurveKind.TWIST)
        twists.append(recover_twist(sample, lengths[family.curve], torus=family.kind == FamilyKind.TORUS))
    return lengths, twists


def _cuff(slot: CuffSlot, lengths: Sequence[float], known: Dict[int, GeneralizedLength]) -> Optional[GeneralizedLength]:
    if slot.is_boundary:
        return known.get(slot.boundary)
    return GeneralizedLength(value=lengths[slot.curve])


def _row_pair(sample: Dict[int, float]) -> int:
    """First index of the consecutive pair with the largest relative half-cosh increment."""
    n0 = best_window(sample)

    def spread(n: int) -> float:
        c0, c1 = math.cosh(sample[n] / 2.0), math.cosh(sample[n + 1] / 2.0)
        return abs(c1 - c0) / max(c0, c1)

    return max((n0, n0 + 1), key=lambda n: (spread(n), -n))


def probe_rows(spectrum: LengthSpectrum, j: int) -> List[BCRow]:
    """Boundary-system rows from the dual and chart lengths around curve j.

    Each row uses the pair of its window whose lengths differ most, which
    keeps the row away from the half-integer twist where both coincide.
    """
    rows = []
    for k in spectrum.charts(j):
        waist = spectrum[CurveId(curve=j, kind=CurveKind.DUAL, index=k)]
        sample = _family_sample(spectrum, j, CurveKind.CHART, chart=k)
        n = _row_pair(sample)
        twist = recover_twist(sample, waist)
        rows.append(BCRow(waist=waist, twist=twist + n, length0=sample[n], length1=sample[n + 1]))
    return rows


def _probe_mismatch(spec: XPieceSpec, spectrum: LengthSpectrum, j: int) -> float:
    """Worst relative error of the dual and chart lengths predicted by ``spec``."""
    dual = dual_spec(spec)
    worst = 0.0
    for k in spectrum.charts(j):
        observed = spectrum[CurveId(curve=j, kind=CurveKind.DUAL, index=k)]
        worst = max(worst, abs(family_length(dual, k) - observed) / observed)
        chart = chart_spec(spec, k, dual)
        for n in spectrum.indices(j, CurveKind.CHART, k):
            observed = spectrum[CurveId(curve=j, kind=CurveKind.CHART, chart=k, index=n)]
            worst = max(worst, abs(family_length(chart, n) - observed) / observed)
    return worst


def _resolve_probe(
    family: EmbeddedFamily,
    spectrum: LengthSpectrum,
    lengths: Sequence[float],
    twists: Sequence[float],
    known: Dict[int, GeneralizedLength],
) -> Dict[int, GeneralizedLength]:
    """Unknown companion boundaries of the X-piece spanned by ``family.curve``."""
    j = family.curve
    unknown = [s for s in family.companions() if s.is_boundary and s.boundary not in known]
    if not unknown:
        return {}
    m3 = trace(_cuff(family.target_a, lengths, known))
    m3p = trace(_cuff(family.target_b, lengths, known))
    rows = probe_rows(spectrum, j)
    unknowns = try_solve_bc_system(rows)
    if unknowns is not None:
        logger.info(f"probe {j}: {len(rows)} rows, condition {unknowns.condition:.3e}")

    if len(unknown) == 1:
        slot = unknown[0]
        if slot == family.companion_a:
            other = trace(_cuff(family.companion_b, lengths, known))
            value = recover_single_boundary(unknowns, m3, other, m3p, rows)
        else:
            other = trace(_cuff(family.companion_a, lengths, known))
            value = recover_single_boundary(unknowns, m3p, other, m3, rows)
        return {slot.boundary: value}

    candidates = cone_pair_candidates(unknowns, m3, m3p, rows)
    if not candidates:
        raise InconsistentSpectrum(f"No boundary pair reproduces probe {j}", {"curve": j})
    scored = []
    for u, u2 in candidates:
        pair = (from_trace(u), from_trace(u2))
        spec = XPieceSpec(
            target_a=_cuff(family.target_a, lengths, known),
            companion_a=pair[0],
            target_b=_cuff(family.target_b, lengths, known),
            companion_b=pair[1],
            waist=lengths[j],
            twist=twists[j],
        )
        scored.append((_probe_mismatch(spec, spectrum, j), pair))
    scored.sort(key=lambda s: s[0])
    fitting = [s for s in scored if s[0] <= settings.END_TO_END_TOLERANCE]
    if len(fitting) > 1 and any(
        abs(a.value - b.value) > settings.VOTE_TOLERANCE * max(1.0, abs(b.value))
        for a, b in zip(fitting[0][1], fitting[1][1])
    ):
        raise AmbiguousRecovery(
            f"Probe {j} fits {len(fitting)} boundary assignments",
            [[g.value for g in pair] for _, pair in fitting],
        )
    _, (value_a, value_b) = scored[0]
    return {family.companion_a.boundary: value_a, family.companion_b.boundary: value_b}


def _probe_options(families: List[EmbeddedFamily], i: int) -> List[str]:
    return [
        CurveId(curve=f.curve, kind=CurveKind.DUAL).family for f in families
        if f.kind == FamilyKind.XPIECE and any(c.boundary == i for c in f.companions())
        and not (f.target_a.is_boundary or f.target_b.is_boundary)
    ]


def recover_surface(
    topology: SurfaceTopology,
    spectrum: LengthSpectrum,
    tolerance: Optional[float] = None,
    parallelism: Optional[int] = None,
) -> SurfaceFN:
    """Fenchel-Nielsen coordinates (Λ, L, T) reproducing ``spectrum``.

    Args:
        topology: The pants graph the spectrum is marked against.
        spectrum: Pants, twist, dual and chart lengths (see ``curve_manifest``).
        tolerance: Relative tolerance of the final re-simulation
            (default END_TO_END_TOLERANCE).
        parallelism: Worker threads for the re-simulation.

    Raises:
        MissingCurves: Naming the curves that must be added.
        UnsupportedTopology: If some boundary sits in no probeable X-piece.
        InconsistentSpectrum: If a solve fails or the recovered surface does
            not reproduce the spectrum.
        AmbiguousRecovery: If a probe admits two boundary assignments.
    """
    check_surface_type(topology.genus, topology.n_boundaries)
    tolerance = tolerance or settings.END_TO_END_TOLERANCE
    lengths, twists = _read_pants(topology, spectrum)
    families = all_families(topology)
    known: Dict[int, GeneralizedLength] = {}

    for family in families:
        slot = family.torus_boundary
        if family.kind != FamilyKind.TORUS or not slot.is_boundary:
            continue
        j = family.curve
        sample = _family_sample(spectrum, j, CurveKind.TWIST)
        n = min(sample, key=lambda k: (sample[k], k))
        known[slot.boundary] = recover_torus_angle(lengths[j], sample[n], twists[j] + n)
        logger.info(f"boundary {slot.boundary} read from torus family {j}: {known[slot.boundary].value!r}")

    for family in families:
        if family.kind != FamilyKind.XPIECE or not spectrum.charts(family.curve):
            continue
        if family.target_a.is_boundary or family.target_b.is_boundary:
            continue
        for i, value in _resolve_probe(family, spectrum, lengths, twists, known).items():
            known[i] = value
            logger.info(f"boundary {i} read from probe {family.curve}: {value.value!r}")

    unresolved = [i for i in range(topology.n_boundaries) if i not in known]
    if unresolved:
        unreadable = [i for i in unresolved if not _probe_options(families, i)]
        if unreadable:
            raise UnsupportedTopology(
                f"Boundaries {unreadable} are not companions of any X-piece with geodesic targets",
                {"boundaries": unreadable},
            )
        missing = sorted({opt for i in unresolved for opt in _probe_options(families, i)})
        raise MissingCurves(
            missing, f"Boundaries {unresolved} need probe data for one of: {', '.join(missing)}"
        )

    surface = SurfaceFN.build(topology, [known[i] for i in range(topology.n_boundaries)], lengths, twists)
    check = forward_spectrum(surface, list(spectrum), parallelism)
    worst_id, worst = None, 0.0
    for cid, observed in spectrum.items():
        error = abs(check[cid] - observed) / observed
        if error > worst:
            worst_id, worst = cid, error
    if worst > tolerance or not math.isfinite(worst):
        raise InconsistentSpectrum(
            f"Recovered surface misses {worst_id} by {worst:.3e} relative",
            {"curve": str(worst_id), "error": worst},
        )
    logger.info(f"Recovered surface reproduces {len(spectrum)} lengths (worst {worst:.3e})")
    return surface
