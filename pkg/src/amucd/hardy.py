"""Hardy space H^2 of the unit disc.

Szegő kernel ``1 / (1 - conj(w) z)``, the Takenaka-Malmquist system of
modified Blaschke products and the closed-form selection objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import szego_mixed_derivative
from .errors import DomainViolation, SpaceMismatch
from .rkhs import KernelCombination, SignalSpec, TaylorPolynomial, _raw_kernel, signal_eval

__all__ = [
    "BlaschkeSystem",
    "afd_coefficients",
    "blaschke_eval",
    "blaschke_taylor",
    "boundary_inner_product",
    "boundary_values",
    "hardy_selection_objective",
    "szego_mixed_derivative",
]

BOUNDARY_NODES = 512
BOUNDARY_TOL = 1e-14
# Closer than this to a center, g is evaluated by its circle mean.
NEAR_CENTER = 1e-3


@dataclass(frozen=True)
class BlaschkeSystem:
    """Ordered disc points; a repeated center encodes a higher derivative order."""

    centers: tuple

    def __post_init__(self):
        centers = tuple(complex(c) for c in self.centers)
        if any(not abs(c) < 1 for c in centers):
            raise DomainViolation("Blaschke centers must lie in the open unit disc")
        object.__setattr__(self, "centers", centers)

    def __len__(self) -> int:
        return len(self.centers)


def _centers_of(state) -> tuple:
    if isinstance(state, BlaschkeSystem):
        return state.centers
    gram = getattr(state, "gram", state)
    elements = getattr(gram, "elements", None)
    if elements is not None:
        return tuple(e.center for e in elements)
    return BlaschkeSystem(tuple(state)).centers


def blaschke_eval(sys: BlaschkeSystem, j: int, z):
    """``B_j(z)`` (1-based ``j``) by the product formula."""
    if not 1 <= j <= len(sys):
        raise IndexError(f"j={j} outside 1..{len(sys)}")
    z = np.asarray(z, dtype=complex)
    if not np.all(np.abs(z) <= 1.0 + 1e-12):
        raise DomainViolation("Blaschke functions are evaluated on the closed disc")
    a = sys.centers[j - 1]
    out = np.sqrt(1 - abs(a) ** 2) / (1 - np.conj(a) * z)
    for zk in sys.centers[: j - 1]:
        out = out * (z - zk) / (1 - np.conj(zk) * z)
    if out.ndim == 0:
        return complex(out)
    return out


def _series_mul(x: np.ndarray, y: np.ndarray, degree: int) -> np.ndarray:
    return np.convolve(x, y)[: degree + 1]


def _geometric(a: complex, degree: int) -> np.ndarray:
    # Taylor coefficients of 1 / (1 - conj(a) z)
    return np.conj(a) ** np.arange(degree + 1)


def blaschke_taylor(sys: BlaschkeSystem, j: int, degree: int) -> np.ndarray:
    """First ``degree + 1`` Taylor coefficients of ``B_j`` about 0."""
    a = sys.centers[j - 1]
    out = np.sqrt(1 - abs(a) ** 2) * _geometric(a, degree)
    for zk in sys.centers[: j - 1]:
        factor = _series_mul(np.array([-zk, 1.0], dtype=complex), _geometric(zk, degree), degree)
        out = _series_mul(out, factor, degree)
    return np.pad(out, (0, degree + 1 - out.size))


def boundary_inner_product(f, g, nodes: int = BOUNDARY_NODES, adaptive: bool = True) -> complex:
    """``(1/2pi) int f(e^{it}) conj(g(e^{it})) dt`` by the trapezoid rule.

    ``f`` and ``g`` are callables on arrays. With ``adaptive`` the node
    count doubles until consecutive estimates agree to ``1e-14``.
    """
    def rule(n):
        w = np.exp(2j * np.pi * np.arange(n) / n)
        return complex(np.mean(f(w) * np.conj(g(w))))

    val = rule(nodes)
    if not adaptive:
        return val
    while nodes < 1 << 20:
        nodes *= 2
        new = rule(nodes)
        if abs(new - val) <= BOUNDARY_TOL * max(1.0, abs(new)):
            return new
        val = new
    return val  # pragma: no cover


def afd_coefficients(f: SignalSpec, sys: BlaschkeSystem) -> np.ndarray:
    """``<f, B_j>`` for ``j = 1..n``.

    Taylor signals are handled exactly by power-series expansion of ``B_j``;
    other Hardy signals use adaptive boundary quadrature.
    """
    if not f.space.is_hardy:
        raise SpaceMismatch("AFD coefficients are defined for Hardy signals")
    n = len(sys)
    if isinstance(f, TaylorPolynomial):
        c = np.array(f.coeffs, dtype=complex)
        deg = max(c.size - 1, 0)
        return np.array(
            [np.sum(c * np.conj(blaschke_taylor(sys, j, deg)[: c.size])) for j in range(1, n + 1)],
            dtype=complex,
        )
    return np.array(
        [
            boundary_inner_product(lambda w: boundary_values(f, w), lambda w, j=j: blaschke_eval(sys, j, w))
            for j in range(1, n + 1)
        ],
        dtype=complex,
    )


def boundary_values(f: SignalSpec, w: np.ndarray) -> np.ndarray:
    """Values of a Hardy signal on the unit circle."""
    if isinstance(f, TaylorPolynomial):
        return np.polynomial.polynomial.polyval(w, np.array(f.coeffs, dtype=complex))
    if isinstance(f, KernelCombination):
        # rational, poles outside the closed disc
        out = np.zeros(np.shape(w), dtype=complex)
        for e, c in f.terms:
            out = out + c * _raw_kernel(f.space, w, e.center, 0, e.order)
        return out
    raise SpaceMismatch(f"{type(f).__name__} is not a Hardy signal")


def _remainder(f: SignalSpec, sys: BlaschkeSystem, coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = signal_eval(f, z)
    for j, c in enumerate(coeffs, start=1):
        out = out - c * blaschke_eval(sys, j, z)
    return out


def _g(f, sys, coeffs, z: np.ndarray) -> np.ndarray:
    out = _remainder(f, sys, coeffs, z)
    for zl in sys.centers:
        out = out * (1 - np.conj(zl) * z) / (z - zl)
    return out


def hardy_selection_objective(f: SignalSpec, state, z, coeffs: Sequence[complex] | None = None) -> float:
    """``(1 - |z|^2) |g(z)|^2`` with ``g`` the reduced remainder.

    ``g = (f - sum_k <f, B_k> B_k) / prod_l (z - z_l)/(1 - conj(z_l) z)``.
    Near a center the removable singularity is resolved by the mean-value
    property: ``g(z)`` is averaged over a small circle about ``z``.
    """
    if not f.space.is_hardy:
        raise SpaceMismatch("the Hardy selection objective needs a Hardy signal")
    z = complex(z)
    if not abs(z) < 1:
        raise DomainViolation("z must lie in the open unit disc")
    sys = BlaschkeSystem(_centers_of(state))
    coeffs = afd_coefficients(f, sys) if coeffs is None else np.asarray(coeffs, complex)
    if len(sys) == 0:
        g = complex(signal_eval(f, z))
    elif min(abs(z - zl) for zl in sys.centers) < NEAR_CENTER:
        rho = min(0.05, 0.5 * (1 - abs(z)))
        ring = z + rho * np.exp(2j * np.pi * (np.arange(64) + 0.5) / 64)
        g = complex(np.mean(_g(f, sys, coeffs, ring)))
    else:
        g = complex(_g(f, sys, coeffs, np.array([z]))[0])
    return (1 - abs(z) ** 2) * abs(g) ** 2
