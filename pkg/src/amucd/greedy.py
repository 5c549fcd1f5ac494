"""Greedy point selection over a candidate grid and the decomposition loop.

Each candidate ``p`` is scored by the energy it would capture,
``|<f, beta'>|^2``, where ``beta'`` orthonormalizes the element for ``p``
against the current span. Maximizing the score is the same as minimizing
the residual of the extended projection.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    AllCandidatesDependent,
    DomainViolation,
    LinearDependence,
    NumericalConsistencyError,
)
from .gram import (
    COINCIDENCE_TOL,
    ENERGY_CLAMP_TOL,
    INDEPENDENCE_TOL,
    Decomposition,
    GramSystem,
    _clamp_energy,
    build_gram,
    empty_gram,
    next_element,
    orthonormal_extend,
    project,
)
from .rkhs import (
    DictionaryElement,
    SignalSpec,
    SpaceModel,
    _raw_kernel,
    kernel_mixed_derivative,
    moments_at,
    signal_moment,
    signal_norm_sq,
)

TIE_RTOL = 1e-12
THREADS_ENV = "AMUCD_THREADS"


# ---------------------------------------------------------------------------
# Candidate grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateGrid:
    """Search set for the selection step.

    ``kind`` is ``"polar"`` (Hardy), ``"rect"`` (Paley-Wiener) or ``"points"``
    (explicit list, never refined).
    """

    points: np.ndarray
    kind: str = "points"
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.points.size)


def _dedupe(points: np.ndarray) -> np.ndarray:
    _, idx = np.unique(np.round(points.real, 15) + 1j * np.round(points.imag, 15), return_index=True)
    return points[np.sort(idx)]


def chebyshev_radii(n_radial: int, r_max: float) -> np.ndarray:
    """Chebyshev-Lobatto radii on ``[0, r_max]`` (both ends included)."""
    if n_radial == 1:
        return np.array([r_max])
    k = np.arange(n_radial)
    return r_max * 0.5 * (1.0 - np.cos(np.pi * k / (n_radial - 1)))


def _polar_points(radii: np.ndarray, angles: np.ndarray) -> np.ndarray:
    pts = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    return _dedupe(np.where(np.abs(pts) == 0, 0j, pts))


def hardy_grid(n_radial: int = 64, n_angular: int = 128, r_max: float = 0.995) -> CandidateGrid:
    if not 0 < r_max < 1:
        raise DomainViolation("r_max must lie in (0, 1)")
    if n_radial < 1 or n_angular < 1:
        raise ValueError("grid counts must be positive")
    radii = chebyshev_radii(n_radial, r_max)
    angles = 2 * np.pi * np.arange(n_angular) / n_angular
    return CandidateGrid(
        _polar_points(radii, angles),
        "polar",
        {"n_radial": n_radial, "n_angular": n_angular, "r_max": r_max},
    )


def pw_grid(x_max: float = 8.0, y_max: float = 8.0, step: float = 0.125) -> CandidateGrid:
    if step <= 0 or x_max < 0 or y_max < 0:
        raise ValueError("rectangle half-widths must be >= 0 and step > 0")
    nx, ny = int(round(x_max / step)), int(round(y_max / step))
    xs = step * np.arange(-nx, nx + 1)
    ys = step * np.arange(-ny, ny + 1)
    pts = (xs[:, None] + 1j * ys[None, :]).ravel()
    return CandidateGrid(pts, "rect", {"x_max": x_max, "y_max": y_max, "step": step})


def point_grid(points, space: SpaceModel | None = None) -> CandidateGrid:
    pts = _dedupe(np.atleast_1d(np.asarray(points, dtype=complex)).ravel())
    if pts.size == 0:
        raise ValueError("candidate grid is empty")
    if space is not None:
        space.check_points(pts)
    return CandidateGrid(pts, "points", {})


def default_grid(space: SpaceModel) -> CandidateGrid:
    return hardy_grid() if space.is_hardy else pw_grid()


def parse_grid_spec(text: str) -> CandidateGrid:
    """Parse ``"radial:64,angular:128,rmax:0.995"`` or ``"rect:8,8,step:0.125"``."""
    text = text.strip()
    if text.startswith("rect:"):
        parts = text[len("rect:"):].split(",")
        if len(parts) != 3 or not parts[2].startswith("step:"):
            raise ValueError(f"bad rect grid spec {text!r}")
        return pw_grid(float(parts[0]), float(parts[1]), float(parts[2][len("step:"):]))
    fields = {}
    for part in text.split(","):
        key, sep, value = part.partition(":")
        if not sep:
            raise ValueError(f"bad grid spec component {part!r}")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"radial", "angular", "rmax"}
    if unknown:
        raise ValueError(f"unknown grid spec keys {sorted(unknown)}")
    return hardy_grid(
        int(fields.get("radial", 64)),
        int(fields.get("angular", 128)),
        float(fields.get("rmax", 0.995)),
    )


def refinement_points(grid: CandidateGrid, p: complex) -> np.ndarray:
    """Local grid at 3x resolution spanning the neighbouring cells of ``p``."""
    if grid.kind == "rect":
        step = grid.params["step"] / 3.0
        k = np.arange(-3, 4)
        return (p.real + step * k)[:, None] + 1j * (p.imag + step * k)[None, :]
    if grid.kind != "polar":
        return np.zeros(0, dtype=complex)
    radii = chebyshev_radii(grid.params["n_radial"], grid.params["r_max"])
    n_ang = grid.params["n_angular"]
    dtheta = 2 * np.pi / n_ang
    r = abs(p)
    i = int(np.argmin(np.abs(radii - r)))
    lo = radii[i - 1] if i > 0 else radii[i]
    hi = radii[i + 1] if i + 1 < radii.size else radii[i]
    local_r = np.unique(np.concatenate([
        np.linspace(lo, radii[i], 4), np.linspace(radii[i], hi, 4)
    ]))
    if r == 0:
        angles = dtheta / 3.0 * np.arange(3 * n_ang)
    else:
        angles = np.angle(p) + dtheta / 3.0 * np.arange(-3, 4)
    return _polar_points(local_r, angles)


# ---------------------------------------------------------------------------
# Engine state and scoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StoppingRule:
    """Stop after ``max_iterations``, or when the residual drops below
    ``energy_tol * ||f||^2``, or when the best gain is below
    ``stagnation_tol * ||f||^2``."""

    max_iterations: int = 25
    energy_tol: float = 1e-12
    stagnation_tol: float = 0.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.energy_tol < 0 or self.stagnation_tol < 0:
            raise ValueError("tolerances must be nonnegative")


@dataclass(frozen=True)
class GreedyState:
    gram: GramSystem
    moments: np.ndarray
    ortho_coeffs: np.ndarray
    residual_energy: float
    norm_sq_f: float

    @classmethod
    def start(cls, space: SpaceModel, f: SignalSpec) -> "GreedyState":
        norm = signal_norm_sq(space, f)
        return cls(empty_gram(space), np.zeros(0, complex), np.zeros(0, complex), norm, norm)

    @property
    def space(self) -> SpaceModel:
        return self.gram.space

    def extend(self, f: SignalSpec, e: DictionaryElement) -> "GreedyState":
        gram, _ = orthonormal_extend(self.gram, e)
        e = gram.elements[-1]
        moments = np.append(self.moments, signal_moment(self.space, f, e))
        o_new = np.conj(gram.ortho_coords[:, -1]) @ moments
        ortho = np.append(self.ortho_coeffs, o_new)
        residual = _clamp_energy(
            self.norm_sq_f - float(np.sum(np.abs(ortho) ** 2)), self.norm_sq_f
        )
        return GreedyState(gram, moments, ortho, residual, self.norm_sq_f)


class Scores(NamedTuple):
    scores: np.ndarray
    orders: np.ndarray
    points: np.ndarray
    dependent: np.ndarray


def _orders_for(state: GreedyState, points: np.ndarray):
    orders = np.zeros(points.shape, dtype=int)
    snapped = points.copy()
    for e in state.gram.elements:
        hit = np.abs(points - e.center) <= COINCIDENCE_TOL
        orders += hit
        snapped = np.where(hit, e.center, snapped)
    return orders, snapped


def _score_block(space: SpaceModel, state: GreedyState, points: np.ndarray,
                 order: int, moments: np.ndarray):
    gram = state.gram
    C = gram.ortho_coords
    n = len(gram)
    r = np.zeros((n, points.size), dtype=complex)
    for j, ej in enumerate(gram.elements):
        col = _raw_kernel(space, ej.center, points, ej.order, order)
        for k in range(j, n):
            r[k] += np.conj(C[j, k]) * col
    diag = _raw_kernel(space, points, points, order, order).real
    rho_sq = diag.copy()
    numer = moments.copy()
    for k in range(n):
        rho_sq -= np.abs(r[k]) ** 2
        numer -= np.conj(r[k]) * state.ortho_coeffs[k]
    dependent = ~(rho_sq >= INDEPENDENCE_TOL * diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.abs(numer) ** 2 / rho_sq
    # A gain above the remaining energy breaks Bessel's inequality: the
    # factorization has lost orthogonality for this candidate.
    ceiling = state.residual_energy + ENERGY_CLAMP_TOL * max(1.0, state.norm_sq_f)
    dependent |= ~(scores <= ceiling)
    scores = np.where(dependent, 0.0, scores)
    return scores, dependent


def _score_chunk(space, f, state, points, orders, base_moments):
    scores = np.zeros(points.size)
    dependent = np.zeros(points.size, dtype=bool)
    for m in np.unique(orders):
        idx = np.nonzero(orders == m)[0]
        if m > space.max_order:
            dependent[idx] = True
            continue
        if m == 0 and base_moments is not None:
            mom = base_moments[idx]
        else:
            mom = moments_at(space, f, points[idx], int(m))
        s, d = _score_block(space, state, points[idx], int(m), mom)
        scores[idx], dependent[idx] = s, d
    return scores, dependent


def resolve_threads(threads: int | None = None) -> int:
    """Thread count from the argument or ``AMUCD_THREADS`` (0 = auto)."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        threads = int(raw)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def score_points(space: SpaceModel, f: SignalSpec, state: GreedyState, points,
                 base_moments: np.ndarray | None = None,
                 threads: int | None = None) -> Scores:
    """Vectorised candidate scores.

    ``base_moments`` optionally supplies ``f`` at ``points`` (order 0). Work
    is split into contiguous chunks across threads; every score is computed
    elementwise, so the result does not depend on the thread count.
    """
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    space.check_points(points)
    orders, snapped = _orders_for(state, points)
    if base_moments is None:
        base_moments = moments_at(space, f, snapped, 0)
    nthreads = min(resolve_threads(threads), max(1, points.size // 256))
    if nthreads <= 1:
        scores, dependent = _score_chunk(space, f, state, snapped, orders, base_moments)
    else:
        bounds = np.linspace(0, points.size, nthreads + 1).astype(int)
        chunks = list(zip(bounds[:-1], bounds[1:]))
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            parts = list(pool.map(
                lambda ab: _score_chunk(
                    space, f, state, snapped[ab[0]:ab[1]], orders[ab[0]:ab[1]],
                    base_moments[ab[0]:ab[1]],
                ),
                chunks,
            ))
        scores = np.concatenate([p[0] for p in parts])
        dependent = np.concatenate([p[1] for p in parts])
    return Scores(scores, orders, snapped, dependent)


def score_candidate(space: SpaceModel, f: SignalSpec, state: GreedyState, p):
    """Energy gain ``|<f, beta'>|^2`` from extending by the element at ``p``.

    Returns ``(gain, dependent)``; a rejected extension scores 0.
    """
    space.check_points(p)
    s = score_points(space, f, state, np.array([complex(p)]), threads=1)
    return float(s.scores[0]), bool(s.dependent[0])


def _pick(points: np.ndarray, scores: np.ndarray, dependent: np.ndarray) -> int:
    admissible = np.nonzero(~dependent)[0]
    if admissible.size == 0:
        raise AllCandidatesDependent("every candidate was rejected by the dependence guard")
    best = float(np.max(scores[admissible]))
    tied = admissible[scores[admissible] >= best - TIE_RTOL * best]
    order = np.lexsort((points[tied].imag, points[tied].real))
    return int(tied[order[0]])


class Selection(NamedTuple):
    point: complex
    gain: float
    element: DictionaryElement


def _select(space, f, state, points, base_moments=None, threads=None) -> Selection:
    s = score_points(space, f, state, points, base_moments, threads)
    i = _pick(s.points, s.scores, s.dependent)
    p = complex(s.points[i])
    return Selection(p, float(s.scores[i]), DictionaryElement(p, int(s.orders[i])))


def select_next(space: SpaceModel, f: SignalSpec, state: GreedyState,
                grid: CandidateGrid, threads: int | None = None):
    """Grid point of maximal gain as ``(point, gain)``.

    Ties (relative ``1e-12``) go to the smallest ``(re, im)``.
    """
    if len(grid) == 0:
        raise ValueError("candidate grid is empty")
    sel = _select(space, f, state, grid.points, threads=threads)
    return sel.point, sel.gain


def refine(space: SpaceModel, f: SignalSpec, state: GreedyState,
           grid: CandidateGrid, sel: Selection) -> Selection:
    """One pass of local refinement around a grid selection."""
    local = refinement_points(grid, sel.point).ravel()
    local = local[np.asarray(space.contains(local))]
    if local.size == 0:
        return sel
    candidates = np.concatenate([[sel.point], local])
    try:
        best = _select(space, f, state, candidates, threads=1)
    except AllCandidatesDependent:
        return sel
    return best if best.gain > sel.gain else sel


@dataclass(frozen=True)
class IterationRecord:
    n: int
    point: complex
    order: int
    gain: float
    residual_energy: float
    bvc_ratio: float


def decompose(space: SpaceModel, f: SignalSpec, grid: CandidateGrid | None = None,
              stop: StoppingRule | None = None, refine_grid: bool = True,
              threads: int | None = None) -> Decomposition:
    """Greedy decomposition of ``f``.

    ``status`` is one of ``converged``, ``max_iterations``, ``stagnated``,
    ``precision_floor`` (conditioning stopped further progress) or
    ``all_candidates_dependent``. Early stops return the partial result.
    """
    grid = grid if grid is not None else default_grid(space)
    stop = stop or StoppingRule()
    space.check_points(grid.points)
    state = GreedyState.start(space, f)
    norm = state.norm_sq_f
    base = moments_at(space, f, grid.points, 0)
    log: list[IterationRecord] = []
    status = "max_iterations"
    for it in range(stop.max_iterations):
        if state.residual_energy <= stop.energy_tol * norm:
            status = "converged"
            break
        try:
            s = score_points(space, f, state, grid.points, base, threads)
            i = _pick(s.points, s.scores, s.dependent)
        except AllCandidatesDependent:
            status = "all_candidates_dependent"
            break
        sel = Selection(complex(s.points[i]), float(s.scores[i]),
                        DictionaryElement(s.points[i], int(s.orders[i])))
        if refine_grid:
            sel = refine(space, f, state, grid, sel)
        if stop.stagnation_tol > 0 and sel.gain < stop.stagnation_tol * norm:
            status = "stagnated"
            break
        try:
            state = state.extend(f, sel.element)
        except LinearDependence:
            status = "all_candidates_dependent"
            break
        except NumericalConsistencyError:
            # the factorization can no longer resolve the residual; keep the
            # last consistent state
            status = "precision_floor"
            break
        e = state.gram.elements[-1]
        log.append(IterationRecord(
            it + 1, e.center, e.order, sel.gain, state.residual_energy,
            bvc_ratio(space, f, e),
        ))
    else:
        if state.residual_energy <= stop.energy_tol * norm:
            status = "converged"
    ortho = state.ortho_coeffs
    return Decomposition(
        space,
        tuple(state.gram.elements),
        state.gram.ortho_coords @ ortho if len(state.gram) else np.zeros(0, complex),
        ortho,
        tuple(r.residual_energy for r in log),
        norm,
        status,
        tuple(log),
    )


def project_fixed_points(space: SpaceModel, f: SignalSpec,
                         elements: Sequence[DictionaryElement]) -> Decomposition:
    """Projection onto a user-fixed element list (e.g. Shannon grids ``{jh}``)."""
    gram = build_gram(space, elements)
    d = project(space, f, gram)
    log = []
    for k, e in enumerate(gram.elements):
        log.append(IterationRecord(
            k + 1, e.center, e.order, float(abs(d.ortho_coeffs[k]) ** 2),
            d.energy_track[k], bvc_ratio(space, f, e),
        ))
    return Decomposition(space, d.elements, d.kernel_coeffs, d.ortho_coeffs,
                         d.energy_track, d.norm_sq_f, "fixed", tuple(log))


def elements_from_points(points: Sequence[complex]) -> list:
    """Assign multiplicity orders to a raw point sequence."""
    out: list = []
    for p in points:
        out.append(next_element(out, p))
    return out


def bvc_ratio(space: SpaceModel, f: SignalSpec, e: DictionaryElement) -> float:
    """``|f^(m)(p)| / ||K~(., conj p)||`` for the element ``(p, m)``."""
    space.check_points(e.center)
    num = abs(signal_moment(space, f, e))
    den = math.sqrt(kernel_mixed_derivative(space, e.center, e.center, e.order, e.order).real)
    return num / den
