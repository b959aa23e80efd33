"""Recovery of unknown companion boundaries of an X-piece.

For an X-piece with geodesic targets of traces m3, m3' and companions of
traces u, u', each side contributes the factor

    F(c) = c² + B c + C,   B = 2 u m3,   C = u² + m3² - 1,   c = cosh(ℓ/2),

and the squared normalized family increment equals F_a(c) F_b(c). Expanding
the product gives a linear system in (S, T, Q, P) = (B+B', C+C'+BB',
BC'+B'C, CC') with one row per waist ℓ_k.

Long dual waists spread the nodes over many orders of magnitude and the
system loses every digit of P. The rows are then read directly: the
shortest waist fixes F_a F_b and the constant term of its family,

    B sinh²(ℓ/2) = c (m3 u' + m3' u) + u u' + m3 m3',

which pins (u, u'), and the remaining rows confirm the pair.
"""

import logging
import math
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, Field
from scipy.optimize import brentq, least_squares

from ..common.config import settings
from ..common.errors import AmbiguousRecovery, DegenerateInput, DomainError, InconsistentSpectrum, SingularSystem
from ..common.models import GeneralizedLength
from ..geometry.pants import from_trace

logger = logging.getLogger(__name__)

_EPS = 2.0 ** -52
_IMAG_TOLERANCE = 1e-6
# relative error assumed on each observed row value
_VALUE_PRECISION = 64.0 * _EPS
_SCAN_POINTS = 4001
_TANGENT_LEVEL = 1e-3

Residuals = Callable[[float, float], np.ndarray]


class BCRow(BaseModel):
    """One observation: a waist, its twist, and the lengths of family members 0 and 1."""
    waist: float = Field(gt=0.0, allow_inf_nan=False)
    twist: float = Field(allow_inf_nan=False)
    length0: float = Field(gt=0.0, allow_inf_nan=False)
    length1: float = Field(gt=0.0, allow_inf_nan=False)

    model_config = {"frozen": True}

    @property
    def node(self) -> float:
        return math.cosh(self.waist / 2.0)

    @property
    def amplitude(self) -> float:
        """A sinh²(ℓ/2) = (c1 - c0) sinh(ℓ/2) / (2 sinh(tℓ + ℓ/2))."""
        x = self.twist * self.waist + self.waist / 2.0
        denominator = 2.0 * math.sinh(x)
        if abs(denominator) <= 4.0 * _EPS * math.cosh(x):
            raise DegenerateInput("Row twist sits at a half-integer", {"twist": self.twist})
        increment = math.cosh(self.length1 / 2.0) - math.cosh(self.length0 / 2.0)
        return increment * math.sinh(self.waist / 2.0) / denominator

    @property
    def lhs(self) -> float:
        """((c1 - c0) sinh²(ℓ/2) / (cosh(tℓ+ℓ) - cosh(tℓ)))²."""
        return self.amplitude ** 2

    def _base_member(self) -> Tuple[float, float]:
        # the member nearer the family minimum
        x0 = self.twist * self.waist
        x1 = x0 + self.waist
        if abs(x0) <= abs(x1):
            return math.cosh(self.length0 / 2.0), x0
        return math.cosh(self.length1 / 2.0), x1

    @property
    def intercept(self) -> float:
        """B sinh²(ℓ/2), B being the constant term of the family."""
        c, x = self._base_member()
        return c * math.sinh(self.waist / 2.0) ** 2 - self.amplitude * math.cosh(x)

    @property
    def intercept_scale(self) -> float:
        c, _ = self._base_member()
        return c * math.sinh(self.waist / 2.0) ** 2


def side_factor(c, u, m):
    """F(c) = c² + 2umc + u² + m² - 1 for one pants (elementwise on arrays)."""
    return c * c + 2.0 * u * m * c + u * u + m * m - 1.0


def intercept_model(c, u, m3, u2, m3p):
    """B sinh²(ℓ/2) for companions u (beside m3) and u' (beside m3')."""
    return c * (m3 * u2 + m3p * u) + u * u2 + m3 * m3p


def companion_for_factor(c, value, m):
    """The companion trace u >= -mc with side_factor(c, u, m) == value."""
    root = np.sqrt((m * m - 1.0) * (c * c - 1.0) + value)
    return (value - (c * c + m * m - 1.0)) / (m * c + root)


class BCUnknowns(BaseModel):
    """Symmetric functions of the two side factors, with the solve diagnostics."""
    S: float
    T: float
    Q: float
    P: float
    condition: float = 1.0
    forward_error: float = 0.0
    nodes: List[float] = []
    values: List[float] = []

    @classmethod
    def from_factors(cls, b: float, c: float, b2: float, c2: float) -> "BCUnknowns":
        return cls(S=b + b2, T=c + c2 + b * b2, Q=b * c2 + b2 * c, P=c * c2)

    @classmethod
    def from_traces(cls, u: float, m3: float, u2: float, m3p: float) -> "BCUnknowns":
        return cls.from_factors(2.0 * u * m3, u * u + m3 * m3 - 1.0, 2.0 * u2 * m3p, u2 * u2 + m3p * m3p - 1.0)

    def evaluate(self, x: float) -> float:
        return (((x + self.S) * x + self.T) * x + self.Q) * x + self.P

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.S, self.T, self.Q, self.P


def solve_bc_values(nodes: Sequence[float], values: Sequence[float]) -> BCUnknowns:
    """Solve x⁴ + S x³ + T x² + Q x + P = value at four or more nodes.

    Rows and columns are equilibrated before the condition number is taken.
    Four rows are solved by LU with partial pivoting, more by least squares.
    Each value is taken to carry a relative error of 64 ulp; the resulting
    componentwise error bound on (S, T, Q, P) must stay within
    LINEAR_TOLERANCE.

    Raises:
        SingularSystem: On repeated nodes, a condition number above
            CONDITION_LIMIT, or an error bound above LINEAR_TOLERANCE.
        InconsistentSpectrum: If the back-substituted residual exceeds LINEAR_TOLERANCE.
    """
    x = np.asarray(nodes, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.shape[0] < 4 or x.shape != v.shape:
        raise SingularSystem(f"Need at least four observations, got {x.shape[0]}")
    scale = float(np.max(np.abs(x)))
    for i, j in combinations(range(len(x)), 2):
        if abs(x[i] - x[j]) <= 4.0 * _EPS * scale:
            raise SingularSystem("Repeated waist among the observations", {"nodes": x.tolist()})

    matrix = np.vander(x, 4)  # columns x³, x², x, 1
    rhs = v - x ** 4
    col_scale = 1.0 / np.max(np.abs(matrix), axis=0)
    scaled = matrix * col_scale
    row_scale = 1.0 / np.max(np.abs(scaled), axis=1)
    scaled = scaled * row_scale[:, None]
    condition = float(np.linalg.cond(scaled))
    logger.debug(f"BC system: nodes={x.tolist()} condition={condition:.3e}")
    if not math.isfinite(condition) or condition > settings.CONDITION_LIMIT:
        raise SingularSystem(
            f"Boundary system condition number {condition:.3e} exceeds limit", {"condition": condition}
        )
    if x.shape[0] == 4:
        z = np.linalg.solve(scaled, rhs * row_scale)
    else:
        z, *_ = np.linalg.lstsq(scaled, rhs * row_scale, rcond=None)
    solution = z * col_scale

    perturbation = _VALUE_PRECISION * (np.abs(v) + x ** 4) * row_scale
    bound = col_scale * (np.abs(np.linalg.pinv(scaled)) @ perturbation)
    forward_error = float(np.max(bound / np.maximum(1.0, np.abs(solution))))
    if not math.isfinite(forward_error) or forward_error > settings.LINEAR_TOLERANCE:
        raise SingularSystem(
            f"Boundary system cannot resolve its unknowns (error bound {forward_error:.3e})",
            {"condition": condition, "forward_error": forward_error, "nodes": x.tolist()},
        )

    s, t, q, p = (float(c) for c in solution)
    unknowns = BCUnknowns(
        S=s, T=t, Q=q, P=p, condition=condition, forward_error=forward_error, nodes=x.tolist(), values=v.tolist()
    )
    residual = max(abs(unknowns.evaluate(float(xi)) - float(vi)) / abs(float(vi)) for xi, vi in zip(x, v))
    if residual > settings.LINEAR_TOLERANCE:
        raise InconsistentSpectrum(
            f"Boundary system residual {residual:.3e} exceeds tolerance", {"residual": residual}
        )
    return unknowns


def solve_bc_system(rows: Sequence[BCRow]) -> BCUnknowns:
    """Symmetric functions (S, T, Q, P) from four or more waist observations."""
    return solve_bc_values([row.node for row in rows], [row.lhs for row in rows])


def try_solve_bc_system(rows: Sequence[BCRow]) -> Optional[BCUnknowns]:
    """``solve_bc_system``, or None when the rows cannot resolve (S, T, Q, P)."""
    try:
        return solve_bc_system(rows)
    except SingularSystem as e:
        logger.warning(f"boundary system unusable, reading the rows directly: {e.message}")
        return None


def _anchor(rows: Sequence[BCRow]) -> BCRow:
    return min(rows, key=lambda row: row.node)


def _row_residuals(rows: Sequence[BCRow], m3: float, m3p: float) -> Residuals:
    nodes = np.array([row.node for row in rows])
    lhs = np.array([row.lhs for row in rows])
    anchor = _anchor(rows)
    c0, intercept, scale = anchor.node, anchor.intercept, anchor.intercept_scale

    def residuals(u: float, u2: float) -> np.ndarray:
        model = side_factor(nodes, u, m3) * side_factor(nodes, u2, m3p)
        misfit = (intercept_model(c0, u, m3, u2, m3p) - intercept) / scale
        return np.append((model - lhs) / lhs, misfit)

    return residuals


def _symmetric_residuals(unknowns: BCUnknowns, m3: float, m3p: float) -> Residuals:
    target = np.array(unknowns.as_tuple())
    scale = np.maximum(1.0, np.abs(target))

    def residuals(u: float, u2: float) -> np.ndarray:
        return (np.array(BCUnknowns.from_traces(u, m3, u2, m3p).as_tuple()) - target) / scale

    return residuals


def _quartic_seeds(unknowns: BCUnknowns, m3: float, m3p: float) -> List[Tuple[float, float]]:
    # u' = alpha + beta u from S; substitute into P = C C'
    alpha = unknowns.S / (2.0 * m3p)
    beta = -m3 / m3p
    a = m3 * m3 - 1.0
    b = m3p * m3p - 1.0
    coeffs = [
        a * (alpha * alpha + b) - unknowns.P,
        2.0 * a * alpha * beta,
        alpha * alpha + b + a * beta * beta,
        2.0 * alpha * beta,
        beta * beta,
    ]
    seeds = []
    for root in npoly.polyroots(coeffs):
        if abs(root.imag) > _IMAG_TOLERANCE * max(1.0, abs(root.real)):
            continue
        u = float(root.real)
        u2 = alpha + beta * u
        if u > 0 and u2 > 0:
            seeds.append((u, u2))
    return seeds


def _scan_seeds(rows: Sequence[BCRow], m3: float, m3p: float) -> List[Tuple[float, float]]:
    """Pairs meeting both equations of the shortest-waist row.

    Along F_a F_b = lhs the partner u' is a function of u. The intercept
    misfit is sampled over 0 <= u <= u_max (where u' reaches 0); sign changes
    are refined by brentq and near-zero local minima are kept as they are.
    """
    anchor = _anchor(rows)
    c, value = anchor.node, anchor.lhs
    intercept, scale = anchor.intercept, anchor.intercept_scale
    u_max = float(companion_for_factor(c, value / side_factor(c, 0.0, m3p), m3))
    if not u_max > 0:
        return []

    def partner(u):
        return companion_for_factor(c, value / side_factor(c, u, m3), m3p)

    def misfit(u):
        return (intercept_model(c, u, m3, partner(u), m3p) - intercept) / scale

    grid = np.linspace(0.0, u_max, _SCAN_POINTS)
    h = misfit(grid)
    roots = [brentq(misfit, grid[i], grid[i + 1], xtol=1e-15) for i in np.flatnonzero(h[:-1] * h[1:] < 0)]
    level = np.abs(h)
    dips = (level[1:-1] <= level[:-2]) & (level[1:-1] <= level[2:]) & (level[1:-1] < _TANGENT_LEVEL)
    roots.extend(grid[1:-1][dips])
    seeds = [(float(u), float(partner(u))) for u in roots]
    logger.debug(f"scan of anchor row c={c!r}: {len(seeds)} seeds")
    return [(u, u2) for u, u2 in seeds if u > 0 and u2 > 0]


def _polish(residuals: Residuals, seed: Tuple[float, ...], known: Optional[float] = None):
    """Least-squares refinement of a seed; returns the parameters and the worst residual."""
    if known is None:
        def fun(p: np.ndarray) -> np.ndarray:
            return residuals(p[0], p[1])
    else:
        def fun(p: np.ndarray) -> np.ndarray:
            return residuals(p[0], known)
    fit = least_squares(fun, np.array(seed, dtype=float), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return tuple(float(c) for c in fit.x), float(np.max(np.abs(fun(fit.x))))


def cone_pair_candidates(
    unknowns: Optional[BCUnknowns],
    m3: float,
    m3p: float,
    rows: Optional[Sequence[BCRow]] = None,
) -> List[Tuple[float, float]]:
    """Companion trace pairs (u, u'), u paired with m3, consistent with the observations.

    Seeds come from the quartic in u obtained from S and P, and from a scan
    of the shortest-waist row. Each is polished by least squares against the
    rows (or against S, T, Q, P without rows) and kept if every residual is
    within VOTE_TOLERANCE.

    Raises:
        DomainError: If neither unknowns nor rows are given.
    """
    if unknowns is None and not rows:
        raise DomainError("Boundary recovery needs solved unknowns or observation rows")
    residuals = _row_residuals(rows, m3, m3p) if rows else _symmetric_residuals(unknowns, m3, m3p)
    seeds = _quartic_seeds(unknowns, m3, m3p) if unknowns is not None else []
    if rows:
        seeds += _scan_seeds(rows, m3, m3p)
    accepted: List[Tuple[float, float]] = []
    for seed in seeds:
        (u, u2), worst = _polish(residuals, seed)
        logger.debug(f"cone pair seed={seed} polished=({u!r}, {u2!r}) residual={worst:.3e}")
        if u <= 0 or u2 <= 0 or worst > settings.VOTE_TOLERANCE:
            continue
        if any(abs(u - p) <= settings.VOTE_TOLERANCE * p and abs(u2 - q) <= settings.VOTE_TOLERANCE * q
               for p, q in accepted):
            continue
        accepted.append((u, u2))
    return accepted


def recover_cone_pair(
    unknowns: Optional[BCUnknowns],
    m3: float,
    m3p: float,
    rows: Optional[Sequence[BCRow]] = None,
) -> Tuple[GeneralizedLength, GeneralizedLength]:
    """Both companion boundaries of an X-piece, in ascending order.

    Args:
        unknowns: Solved symmetric functions, or None when the system was
            too ill-conditioned to solve.
        m3: Trace of the geodesic target on the first side.
        m3p: Trace of the geodesic target on the second side.
        rows: The observations; required when ``unknowns`` is None.

    Raises:
        InconsistentSpectrum: If no pair reproduces the observations.
        AmbiguousRecovery: If two different unordered pairs do.
    """
    pairs = []
    for u, u2 in cone_pair_candidates(unknowns, m3, m3p, rows):
        try:
            pair = tuple(sorted((from_trace(u), from_trace(u2)), key=lambda g: g.value))
        except ValueError as e:
            raise InconsistentSpectrum(f"Recovered trace is not admissible: {e}") from e
        if not any(_same_pair(pair, other) for other in pairs):
            pairs.append(pair)
    if not pairs:
        details = {"S": unknowns.S, "P": unknowns.P} if unknowns is not None else {"rows": len(rows)}
        raise InconsistentSpectrum("No boundary pair reproduces the observations", details)
    if len(pairs) > 1:
        raise AmbiguousRecovery(
            f"{len(pairs)} boundary pairs reproduce the observations",
            [[g.value for g in pair] for pair in pairs],
        )
    return pairs[0]


def _same_pair(p1, p2) -> bool:
    tol = settings.VOTE_TOLERANCE
    return all(abs(a.value - b.value) <= tol * max(1.0, abs(b.value)) for a, b in zip(p1, p2))


def recover_single_boundary(
    unknowns: Optional[BCUnknowns],
    m3: float,
    known_trace: float,
    m3p: float,
    rows: Optional[Sequence[BCRow]] = None,
) -> GeneralizedLength:
    """The one unknown companion (paired with m3) when the other side is fully known.

    The seed is read from the shortest-waist row when rows are given, else
    from S.

    Raises:
        DomainError: If neither unknowns nor rows are given.
        InconsistentSpectrum: If the implied trace is not admissible or does not fit.
    """
    if rows:
        anchor = _anchor(rows)
        c = anchor.node
        u = float(companion_for_factor(c, anchor.lhs / side_factor(c, known_trace, m3p), m3))
        residuals = _row_residuals(rows, m3, m3p)
    elif unknowns is not None:
        u = (unknowns.S - 2.0 * known_trace * m3p) / (2.0 * m3)
        residuals = _symmetric_residuals(unknowns, m3, m3p)
    else:
        raise DomainError("Boundary recovery needs solved unknowns or observation rows")
    if not u > 0:
        raise InconsistentSpectrum(f"Implied companion trace {u!r} is not positive", {"trace": u})

    (u,), worst = _polish(residuals, (u,), known=known_trace)
    if u <= 0 or worst > settings.VOTE_TOLERANCE:
        raise InconsistentSpectrum(
            f"Single boundary recovery residual {worst:.3e} exceeds tolerance", {"residual": worst, "trace": u}
        )
    try:
        return from_trace(u)
    except ValueError as e:
        raise InconsistentSpectrum(f"Recovered trace is not admissible: {e}") from e
