"""Spaces, dictionary elements, signals and the moment functionals.

A dictionary element ``(p, m)`` stands for the function
``d^m/d(conj w)^m K(., conj w)`` at ``w = p``; pairing a signal with it
returns ``f^(m)(p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .errors import (
    BandViolation,
    DomainViolation,
    NumericalConsistencyError,
    OrderCapExceeded,
    SpaceMismatch,
)

HARDY = "hardy"
PALEY_WIENER = "pw"
DEFAULT_MAX_ORDER = 8


@dataclass(frozen=True)
class SpaceModel:
    """A reproducing kernel Hilbert space backend.

    ``kind`` is ``"hardy"`` (Szegő kernel on the unit disc) or ``"pw"``
    (sinc kernel of band ``pi/h`` on the whole plane).
    """

    kind: str
    h: float = 1.0
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self):
        if self.kind not in (HARDY, PALEY_WIENER):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError("h must be a positive finite number")
        if self.max_order < 0:
            raise ValueError("max_order must be nonnegative")

    @classmethod
    def hardy(cls, max_order: int = DEFAULT_MAX_ORDER) -> "SpaceModel":
        return cls(HARDY, 1.0, max_order)

    @classmethod
    def paley_wiener(cls, h: float = 1.0, max_order: int = DEFAULT_MAX_ORDER) -> "SpaceModel":
        return cls(PALEY_WIENER, float(h), max_order)

    @property
    def is_hardy(self) -> bool:
        return self.kind == HARDY

    @property
    def band(self) -> float:
        """Spectral half-width ``pi/h`` (Paley-Wiener only)."""
        return math.pi / self.h

    def same_space(self, other: "SpaceModel") -> bool:
        return self.kind == other.kind and (self.is_hardy or self.h == other.h)

    def contains(self, p):
        p = np.asarray(p, dtype=complex)
        finite = np.isfinite(p.real) & np.isfinite(p.imag)
        if self.is_hardy:
            return finite & (np.abs(p) < 1.0)
        return finite

    def boundary_distance(self, p):
        """Distance-to-boundary surrogate: ``1 - |p|`` or ``1 / (1 + |p|)``."""
        r = np.abs(np.asarray(p, dtype=complex))
        if self.is_hardy:
            return np.maximum(1.0 - r, 0.0)
        return 1.0 / (1.0 + r)

    def check_points(self, *points) -> None:
        for p in points:
            if not np.all(self.contains(p)):
                raise DomainViolation(f"point(s) outside the domain of the {self.kind} space")

    def check_orders(self, *orders: int) -> None:
        for m in orders:
            if m < 0 or m > self.max_order:
                raise OrderCapExceeded(
                    f"derivative order {m} outside [0, {self.max_order}]"
                )


@dataclass(frozen=True)
class DictionaryElement:
    """Center ``p`` and derivative order ``m`` of a complete-dictionary element."""

    center: complex
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "order", int(self.order))
        if self.order < 0:
            raise OrderCapExceeded("order must be nonnegative")


@dataclass(frozen=True)
class TaylorPolynomial:
    """Hardy signal ``sum_n coeffs[n] z^n``."""

    space: SpaceModel
    coeffs: tuple

    def __post_init__(self):
        if not self.space.is_hardy:
            raise SpaceMismatch("Taylor signals live in the Hardy space only")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not all(np.isfinite(c.real) and np.isfinite(c.imag) for c in self.coeffs):
            raise ValueError("non-finite Taylor coefficient")


@dataclass(frozen=True)
class KernelCombination:
    """Signal ``sum_i c_i K~(., conj p_i)`` given as ``(element, coefficient)`` pairs."""

    space: SpaceModel
    terms: tuple

    def __post_init__(self):
        terms = tuple((e, complex(c)) for e, c in self.terms)
        object.__setattr__(self, "terms", terms)
        for e, _ in terms:
            self.space.check_points(e.center)
            self.space.check_orders(e.order)

    @property
    def elements(self) -> list:
        return [e for e, _ in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=complex)


@dataclass(frozen=True)
class Spectrum:
    """Paley-Wiener signal ``(1/2pi) int F(t) e^{-izt} dt``.

    ``F`` is the piecewise-linear interpolant of the samples and vanishes
    outside ``[t[0], t[-1]]``.
    """

    space: SpaceModel
    t: tuple
    values: tuple = field(default=())

    def __post_init__(self):
        if self.space.is_hardy:
            raise SpaceMismatch("spectrum signals live in the Paley-Wiener space only")
        t = tuple(float(x) for x in self.t)
        vals = tuple(complex(v) for v in self.values)
        if len(t) != len(vals) or len(t) < 2:
            raise ValueError("a spectrum needs at least two (t, F(t)) samples")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("spectrum abscissae must be strictly increasing")
        band = self.space.band
        if t[0] < -band * (1 + 1e-12) or t[-1] > band * (1 + 1e-12):
            raise BandViolation(f"spectral samples must lie in [-{band:g}, {band:g}]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", vals)


SignalSpec = Union[TaylorPolynomial, KernelCombination, Spectrum]


def _finite(value, what: str):
    arr = np.asarray(value)
    if not np.all(np.isfinite(arr)):
        raise NumericalConsistencyError(f"{what} is not finite")
    return value


def _raw_kernel(space: SpaceModel, p, q, a: int, b: int):
    u = np.conj(np.asarray(q, dtype=complex))
    if space.is_hardy:
        return _kernels.szego_mixed_derivative(p, u, a, b)
    return _kernels.sinc_mixed_derivative(p, u, a, b, space.h)


def kernel_mixed_derivative(space: SpaceModel, p, q, a: int, b: int):
    """``d^a/dp^a d^b/d(conj q)^b K(p, conj q)``.

    ``p`` and ``q`` may be arrays (broadcast); scalars give a Python complex.
    """
    space.check_orders(a, b)
    space.check_points(p, q)
    out = _finite(_raw_kernel(space, p, q, a, b), "kernel derivative")
    if np.ndim(out) == 0:
        return complex(out)
    return out


def kernel_matrix(space: SpaceModel, elements: Sequence[DictionaryElement]) -> np.ndarray:
    """``M[j, k] = <K~_k, K~_j>`` with no multiplicity check."""
    n = len(elements)
    M = np.empty((n, n), dtype=complex)
    for j, ej in enumerate(elements):
        for k, ek in enumerate(elements):
            M[j, k] = kernel_mixed_derivative(space, ej.center, ek.center, ej.order, ek.order)
    return M


def _check_signal(space: SpaceModel, f: SignalSpec) -> None:
    if not space.same_space(f.space):
        raise SpaceMismatch(f"signal belongs to {f.space}, not {space}")


def moments_at(space: SpaceModel, f: SignalSpec, points, order: int) -> np.ndarray:
    """Vectorised ``f^(order)`` at an array of points."""
    _check_signal(space, f)
    space.check_orders(order)
    points = np.asarray(points, dtype=complex)
    space.check_points(points)
    if isinstance(f, TaylorPolynomial):
        coeffs = np.array(f.coeffs, dtype=complex)
        if order >= coeffs.size:
            out = np.zeros(points.shape, dtype=complex)
        else:
            deriv = np.polynomial.polynomial.polyder(coeffs, order) if order else coeffs
            out = np.polynomial.polynomial.polyval(points, deriv)
    elif isinstance(f, KernelCombination):
        out = np.zeros(points.shape, dtype=complex)
        for e, c in f.terms:
            out = out + c * _raw_kernel(space, points, e.center, order, e.order)
    elif isinstance(f, Spectrum):
        out = _kernels.spectral_moments(f.t, f.values, points, order)
    else:
        raise TypeError(f"unsupported signal type {type(f).__name__}")
    return _finite(np.asarray(out, dtype=complex), "signal moment")


def signal_moment(space: SpaceModel, f: SignalSpec, e: DictionaryElement) -> complex:
    """``<f, K~(., conj p)> = f^(m)(p)`` for the element ``(p, m)``."""
    return complex(moments_at(space, f, np.array([e.center]), e.order)[0])


def signal_eval(f: SignalSpec, z):
    """Point evaluation of a signal (scalar or array)."""
    out = moments_at(f.space, f, np.atleast_1d(np.asarray(z, dtype=complex)), 0)
    if np.ndim(z) == 0:
        return complex(out[0])
    return out.reshape(np.shape(z))


def signal_norm_sq(space: SpaceModel, f: SignalSpec) -> float:
    """Exact squared norm of a signal."""
    _check_signal(space, f)
    if isinstance(f, TaylorPolynomial):
        return float(sum(abs(c) ** 2 for c in f.coeffs))
    if isinstance(f, KernelCombination):
        if not f.terms:
            return 0.0
        c = f.coefficients
        G = kernel_matrix(space, f.elements)
        return max(float(np.real(np.conj(c) @ G @ c)), 0.0)
    if isinstance(f, Spectrum):
        return float(np.real(_kernels.spectral_inner(f.t, f.values, f.t, f.values)))
    raise TypeError(f"unsupported signal type {type(f).__name__}")


def zero_signal(space: SpaceModel) -> KernelCombination:
    return KernelCombination(space, ())


def kernel_signal(space: SpaceModel, center, order: int = 0, coeff: complex = 1.0) -> KernelCombination:
    """Single-term signal ``coeff * K~(., conj center)``."""
    return KernelCombination(space, ((DictionaryElement(center, order), coeff),))
