"""Curve manifests and forward length spectra of a surface.

The manifest is the finite curve set the inversion reads:

* ``pants/j`` - the pants curve itself (index 0);
* ``twist/j`` - three consecutive members of its twist family;
* ``dual/j`` - for each boundary probe, four members of the family
  obtained by twisting the waist along the shortest member δ*;
* ``chart/j/k`` - three members of the δ-family relative to each of
  those re-cut waists.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Tuple

from ..common.config import settings
from ..common.errors import DomainError, UnsupportedTopology
from ..common.models import CurveId, CurveKind, LengthSpectrum
from ..geometry.xpiece import (
    XPieceSpec,
    chart_spec,
    dual_spec,
    family_length,
    probe_charts,
    shortest_index,
    torus_family_length,
)
from .families import EmbeddedFamily, FamilyKind, FamilySpec, all_families, family_spec
from .surface import SurfaceFN, boundary

logger = logging.getLogger(__name__)

TWIST_WINDOW = 3


def window_start(twist: float) -> int:
    """First index of the three-member window around the family minimum.

    The window puts t + n0 in [-3/2, -1/2), so the first two members never
    coincide and u = (t + n0 + 1/2) ℓ stays in [-ℓ, 0).
    """
    return -math.floor(twist + 0.5) - 1


def _window(twist: float) -> range:
    n0 = window_start(twist)
    return range(n0, n0 + TWIST_WINDOW)


def probe_curves(surface: SurfaceFN) -> List[int]:
    """Internal curves whose X-pieces are probed to read the boundaries.

    Boundaries sitting in a one-holed torus are read from the torus family.
    Every other boundary must be the companion of some X-piece with two
    geodesic targets; among those, X-pieces with a single unknown companion
    are preferred, then the shortest δ*.

    Raises:
        UnsupportedTopology: If some boundary has no usable X-piece.
    """
    topology = surface.topology
    families = all_families(topology)
    probes: List[int] = []
    covered = set()
    for i in range(len(surface.boundaries)):
        if i in covered:
            continue
        p, _ = topology.boundary_slot(i)
        slot = boundary(i)
        if any(f.kind == FamilyKind.TORUS and f.torus_boundary == slot for f in families):
            covered.add(i)
            continue
        candidates: List[Tuple[int, float, EmbeddedFamily]] = []
        for family in families:
            if family.kind != FamilyKind.XPIECE or slot not in family.companions():
                continue
            if family.target_a.is_boundary or family.target_b.is_boundary:
                continue
            spec = family_spec(surface, family.curve, family)
            unknown = sum(1 for c in family.companions() if c.is_boundary)
            candidates.append((unknown, family_length(spec, shortest_index(spec)), family))
        if not candidates:
            raise UnsupportedTopology(
                f"Boundary {i} is not the companion of any X-piece with geodesic targets", {"boundary": i}
            )
        _, _, chosen = min(candidates, key=lambda c: (c[0], c[1], c[2].curve))
        probes.append(chosen.curve)
        covered.update(c.boundary for c in chosen.companions() if c.is_boundary)
    return sorted(probes)


class SpectrumEvaluator:
    """Evaluates manifest curves of one surface, sharing the per-curve charts."""

    def __init__(self, surface: SurfaceFN):
        self.surface = surface
        self.families = all_families(surface.topology)
        self.specs: Dict[int, FamilySpec] = {
            f.curve: family_spec(surface, f.curve, f) for f in self.families
        }
        self._duals: Dict[int, XPieceSpec] = {}
        self._charts: Dict[Tuple[int, int], XPieceSpec] = {}

    def _xpiece(self, j: int) -> XPieceSpec:
        spec = self.specs[j]
        if not isinstance(spec, XPieceSpec):
            raise DomainError(f"Curve {j} spans a one-holed torus; it has no dual charts", {"curve": j})
        return spec

    def dual(self, j: int) -> XPieceSpec:
        if j not in self._duals:
            self._duals[j] = dual_spec(self._xpiece(j))
        return self._duals[j]

    def chart(self, j: int, k: int) -> XPieceSpec:
        if (j, k) not in self._charts:
            self._charts[(j, k)] = chart_spec(self._xpiece(j), k, self.dual(j))
        return self._charts[(j, k)]

    def prepare(self, curve_ids: Iterable[CurveId]) -> None:
        """Build every chart the given curves need."""
        for cid in curve_ids:
            if cid.kind == CurveKind.DUAL:
                self.dual(cid.curve)
            elif cid.kind == CurveKind.CHART:
                self.chart(cid.curve, cid.chart)

    def length(self, cid: CurveId) -> float:
        if not 0 <= cid.curve < self.surface.n_curves:
            raise DomainError(f"No internal curve {cid.curve}", {"curve": str(cid)})
        if cid.kind == CurveKind.PANTS:
            return self.surface.lengths[cid.curve]
        if cid.kind == CurveKind.TWIST:
            spec = self.specs[cid.curve]
            if isinstance(spec, XPieceSpec):
                return family_length(spec, cid.index)
            return torus_family_length(spec, cid.index)
        if cid.kind == CurveKind.DUAL:
            return family_length(self.dual(cid.curve), cid.index)
        return family_length(self.chart(cid.curve, cid.chart), cid.index)

    def manifest(self) -> List[CurveId]:
        ids: List[CurveId] = []
        for j in range(self.surface.n_curves):
            ids.append(CurveId(curve=j, kind=CurveKind.PANTS))
            ids.extend(CurveId(curve=j, kind=CurveKind.TWIST, index=n) for n in _window(self.surface.twists[j]))
        for j in probe_curves(self.surface):
            for k in probe_charts(self.dual(j)):
                ids.append(CurveId(curve=j, kind=CurveKind.DUAL, index=k))
                chart = self.chart(j, k)
                ids.extend(
                    CurveId(curve=j, kind=CurveKind.CHART, chart=k, index=n) for n in _window(chart.twist)
                )
        return sorted(ids)


def curve_manifest(surface: SurfaceFN) -> List[CurveId]:
    """The curve set read by ``recover_surface`` for this surface."""
    return SpectrumEvaluator(surface).manifest()


def forward_spectrum(
    surface: SurfaceFN,
    curves: Optional[Iterable[CurveId]] = None,
    parallelism: Optional[int] = None,
) -> LengthSpectrum:
    """Lengths of ``curves`` (default: the manifest) on ``surface``.

    Evaluation may be spread over worker threads; results are assembled in
    curve order, so the spectrum does not depend on ``parallelism``.
    """
    evaluator = SpectrumEvaluator(surface)
    ids = sorted(set(curves)) if curves is not None else evaluator.manifest()
    evaluator.prepare(ids)
    workers = parallelism or settings.PARALLELISM
    if workers > 1 and len(ids) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            lengths = list(pool.map(evaluator.length, ids))
    else:
        lengths = [evaluator.length(cid) for cid in ids]
    logger.info(f"Evaluated {len(ids)} curve lengths (parallelism={workers})")
    return LengthSpectrum(dict(zip(ids, lengths)))


def family_curve_set(surface: SurfaceFN, max_index: int) -> List[CurveId]:
    """Pants curves plus every family member with |index| <= max_index."""
    ids = [CurveId(curve=j, kind=CurveKind.PANTS) for j in range(surface.n_curves)]
    for j in range(surface.n_curves):
        ids.extend(CurveId(curve=j, kind=CurveKind.TWIST, index=n) for n in range(-max_index, max_index + 1))
    return sorted(ids)
