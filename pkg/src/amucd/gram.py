"""Gram systems, generalized Gram-Schmidt and the orthogonal projection.

The projection onto the span of dictionary elements is computed from
orthonormal coordinates ``C`` (column ``k`` holds ``beta_k`` in the
element basis), so ``C^H A C = I`` and ``A^-1 = C C^H`` without ever
inverting ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LinearDependence, MultiplicityError, NumericalConsistencyError
from .rkhs import (
    DictionaryElement,
    KernelCombination,
    SignalSpec,
    SpaceModel,
    kernel_mixed_derivative,
    signal_moment,
    signal_norm_sq,
)

INDEPENDENCE_TOL = 1e-10
COINCIDENCE_TOL = 1e-9
ENERGY_CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class GramSystem:
    space: SpaceModel
    elements: tuple = ()
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    ortho_coords: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    residual_norms: tuple = ()

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def centers(self) -> np.ndarray:
        return np.array([e.center for e in self.elements], dtype=complex)


@dataclass(frozen=True)
class Decomposition:
    """Result of a projection or greedy run.

    ``energy_track[k]`` is ``||f - f*||^2`` after ``k + 1`` elements.
    """

    space: SpaceModel
    elements: tuple
    kernel_coeffs: np.ndarray
    ortho_coeffs: np.ndarray
    energy_track: tuple
    norm_sq_f: float
    status: str = "ok"
    log: tuple = ()

    @property
    def residual_energy(self) -> float:
        return self.energy_track[-1] if self.energy_track else self.norm_sq_f

    @property
    def relative_residual(self) -> float:
        if self.norm_sq_f == 0:
            return 0.0
        return self.residual_energy / self.norm_sq_f

    def as_signal(self) -> KernelCombination:
        """The approximant ``f*`` as a kernel combination."""
        return KernelCombination(self.space, tuple(zip(self.elements, self.kernel_coeffs)))


def empty_gram(space: SpaceModel) -> GramSystem:
    return GramSystem(space)


def next_element(elements: Sequence[DictionaryElement], p: complex) -> DictionaryElement:
    """Element for a new point ``p``: snap to an existing center within
    ``COINCIDENCE_TOL`` and take the order from the multiplicity count."""
    p = complex(p)
    order = 0
    center = p
    for e in elements:
        if abs(e.center - p) <= COINCIDENCE_TOL:
            order += 1
            center = e.center
    return DictionaryElement(center, order)


def check_multiplicity(elements: Sequence[DictionaryElement]) -> list:
    """Validate the order rule, returning elements with snapped centers."""
    out: list = []
    for i, e in enumerate(elements):
        expected = next_element(out, e.center)
        if expected.order != e.order:
            raise MultiplicityError(
                f"element {i} at {e.center} has order {e.order}; "
                f"{expected.order} earlier element(s) share its center"
            )
        out.append(expected)
    return out


def _clamp_energy(value: float, scale: float) -> float:
    if value >= 0:
        return value
    if value >= -ENERGY_CLAMP_TOL * max(1.0, scale):
        return 0.0
    raise NumericalConsistencyError(f"residual energy {value:.3e} is negative")


def orthonormal_extend(state: GramSystem, e: DictionaryElement):
    """Append ``e`` and its orthonormalized ``beta``; returns ``(state, ||alpha||)``.

    Modified Gram-Schmidt in the ``A``-metric with one reorthogonalization
    pass. Raises :class:`LinearDependence` when the squared residual falls
    below ``INDEPENDENCE_TOL`` times the new diagonal entry.
    """
    space = state.space
    expected = next_element(state.elements, e.center)
    if expected.order != e.order:
        raise MultiplicityError(
            f"element at {e.center} needs order {expected.order}, got {e.order}"
        )
    e = expected
    space.check_points(e.center)
    space.check_orders(e.order)

    n = len(state)
    A = np.zeros((n + 1, n + 1), dtype=complex)
    A[:n, :n] = state.matrix
    for j, ej in enumerate(state.elements):
        A[j, n] = kernel_mixed_derivative(space, ej.center, e.center, ej.order, e.order)
        A[n, j] = np.conj(A[j, n])
    diag = kernel_mixed_derivative(space, e.center, e.center, e.order, e.order).real
    A[n, n] = diag

    C = np.zeros((n + 1, n + 1), dtype=complex)
    C[:n, :n] = state.ortho_coords
    v = np.zeros(n + 1, dtype=complex)
    v[n] = 1.0
    for _ in range(2):
        for j in range(n):
            r = np.conj(C[:, j]) @ (A @ v)
            v = v - r * C[:, j]
    res_sq = float(np.real(np.conj(v) @ A @ v))
    if not res_sq >= INDEPENDENCE_TOL * diag:
        raise LinearDependence(n, res_sq, diag)
    norm = float(np.sqrt(res_sq))
    C[:, n] = v / norm
    new = GramSystem(
        space,
        state.elements + (e,),
        A,
        C,
        state.residual_norms + (norm,),
    )
    return new, norm


def build_gram(space: SpaceModel, elements: Sequence[DictionaryElement]) -> GramSystem:
    """Gram system of ``elements`` built by sequential orthonormal extension."""
    if len(elements) < 1:
        raise ValueError("build_gram needs at least one element")
    state = empty_gram(space)
    for e in check_multiplicity(elements):
        state, _ = orthonormal_extend(state, e)
    return state


def moments_for(space: SpaceModel, f: SignalSpec, state: GramSystem) -> np.ndarray:
    return np.array([signal_moment(space, f, e) for e in state.elements], dtype=complex)


def residual_energy(f: SignalSpec, state: GramSystem, moments, norm_sq_f: float | None = None) -> float:
    """``||f||^2 - sum_k |<f, beta_k>|^2`` from the moments ``F_j = f^(m_j)(p_j)``."""
    if norm_sq_f is None:
        norm_sq_f = signal_norm_sq(state.space, f)
    F = np.asarray(moments, dtype=complex)
    ortho = np.conj(state.ortho_coords).T @ F if len(state) else F[:0]
    return _clamp_energy(norm_sq_f - float(np.sum(np.abs(ortho) ** 2)), norm_sq_f)


def energy_track_from(norm_sq_f: float, ortho: np.ndarray) -> tuple:
    captured = np.cumsum(np.abs(ortho) ** 2)
    return tuple(_clamp_energy(float(norm_sq_f - c), norm_sq_f) for c in captured)


def project(space: SpaceModel, f: SignalSpec, state: GramSystem) -> Decomposition:
    """Orthogonal projection of ``f`` onto the span of the state's elements."""
    if not space.same_space(state.space):
        raise ValueError("state was built in a different space")
    norm_sq = signal_norm_sq(space, f)
    F = moments_for(space, f, state)
    C = state.ortho_coords
    ortho = np.conj(C).T @ F
    coeffs = C @ ortho
    return Decomposition(
        space,
        tuple(state.elements),
        coeffs,
        ortho,
        energy_track_from(norm_sq, ortho),
        norm_sq,
    )


def reconstruct_at(space: SpaceModel, d: Decomposition, p):
    """``f*(p) = sum_k c_k K~_k(p)``; ``p`` may be an array."""
    space.check_points(p)
    out = np.zeros(np.shape(p), dtype=complex)
    for e, c in zip(d.elements, d.kernel_coeffs):
        out = out + c * kernel_mixed_derivative(space, p, e.center, 0, e.order)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def beta_eval(state: GramSystem, k: int, p):
    """Evaluate the ``k``-th (0-based) orthonormal function at ``p``."""
    space = state.space
    out = np.zeros(np.shape(p), dtype=complex)
    for j in range(k + 1):
        e = state.elements[j]
        out = out + state.ortho_coords[j, k] * kernel_mixed_derivative(space, p, e.center, 0, e.order)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def reconstruct_ortho_at(state: GramSystem, d: Decomposition, p):
    """``f*(p) = sum_k <f, beta_k> beta_k(p)`` (orthonormal-basis route)."""
    out = np.zeros(np.shape(p), dtype=complex)
    for k, o in enumerate(d.ortho_coeffs):
        out = out + o * beta_eval(state, k, p)
    if np.ndim(out) == 0:
        return complex(out)
    return out
