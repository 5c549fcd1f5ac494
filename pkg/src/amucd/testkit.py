"""Brute-force oracles for cross-checking the closed-form paths.

Nothing here is used by the engine or the CLI.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

import numpy as np
import scipy.linalg

from . import hardy
from .errors import SingularSystem
from .rkhs import (
    DictionaryElement,
    KernelCombination,
    SignalSpec,
    SpaceModel,
    Spectrum,
    TaylorPolynomial,
    _raw_kernel,
    kernel_matrix,
    signal_moment,
    signal_norm_sq,
)


def least_squares_oracle(space: SpaceModel, f: SignalSpec, elements: Sequence[DictionaryElement]):
    """Solve the normal equations ``A c = F`` densely.

    Returns ``(coefficients, residual_energy)``. Cholesky first; on failure a
    least-squares (SVD) solve, reported as singular when the rank drops.
    """
    A = kernel_matrix(space, elements)
    F = np.array([signal_moment(space, f, e) for e in elements], dtype=complex)
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
        c = scipy.linalg.cho_solve(factor, F)
    except np.linalg.LinAlgError:
        c, _, rank, _ = np.linalg.lstsq(A, F, rcond=None)
        if rank < len(elements):
            raise SingularSystem(f"Gram matrix has rank {rank} < {len(elements)}")
    residual = signal_norm_sq(space, f) - float(np.real(np.conj(F) @ c))
    return c, residual


def _central_weights(order: int):
    # offsets (in steps) and weights of the order-th central difference
    return [(order / 2.0 - k, (-1) ** k * comb(order, k)) for k in range(order + 1)]


def finite_difference_derivative(space: SpaceModel, p: complex, q: complex, a: int, b: int,
                                 step: float = 1e-4) -> complex:
    """Nested central differences of ``K(p, conj q)``: ``a`` times in ``p``,
    ``b`` times in ``conj q`` (the kernel is holomorphic in both)."""
    if step <= 0:
        raise ValueError("step must be positive")
    total = 0j
    u0 = np.conj(complex(q))
    for dp, wp in _central_weights(a):
        for du, wu in _central_weights(b):
            val = _raw_kernel(space, complex(p) + dp * step, np.conj(u0 + du * step), 0, 0)
            total += wp * wu * complex(val)
    return total / step ** (a + b)


def spectrum_of(f: SignalSpec):
    """Spectral density ``F`` of a Paley-Wiener signal as a callable on ``t``."""
    if isinstance(f, KernelCombination):
        def F(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros(t.shape, dtype=complex)
            for e, c in f.terms:
                out = out + c * (1j * t) ** e.order * np.exp(1j * np.conj(e.center) * t)
            return out
        return F
    if isinstance(f, Spectrum):
        t0 = np.array(f.t)
        v0 = np.array(f.values)
        return lambda t: np.interp(t, t0, v0.real, 0, 0) + 1j * np.interp(t, t0, v0.imag, 0, 0)
    raise TypeError(f"no spectrum for {type(f).__name__}")


def quadrature_inner_product(space: SpaceModel, f: SignalSpec, g: SignalSpec,
                             nodes: int | None = None) -> complex:
    """``<f, g>`` by quadrature, independent of the kernel closed forms.

    Hardy: 512-node trapezoid on the unit circle. Paley-Wiener:
    Gauss-Legendre on ``[-pi/h, pi/h]`` of ``(1/2pi) F conj(G)``.
    """
    if space.is_hardy:
        return hardy.boundary_inner_product(
            lambda w: hardy.boundary_values(f, w),
            lambda w: hardy.boundary_values(g, w),
            nodes=nodes or hardy.BOUNDARY_NODES,
            adaptive=False,
        )
    F, G = spectrum_of(f), spectrum_of(g)
    x, w = np.polynomial.legendre.leggauss(nodes or 400)
    band = space.band
    breaks = [-band, band]
    for s in (f, g):
        if isinstance(s, Spectrum):
            breaks.extend(s.t)
    breaks = np.unique(np.clip(breaks, -band, band))
    total = 0j
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        t = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        total += 0.5 * (hi - lo) * np.sum(w * F(t) * np.conj(G(t)))
    return complex(total / (2 * np.pi))


def taylor_series_szego(z: complex, u: complex, a: int, b: int, terms: int = 4000) -> complex:
    """Szegő mixed derivative from the power series ``sum (u z)^n`` termwise."""
    total = 0j
    for n in range(max(a, b), terms):
        fa = np.prod(np.arange(n - a + 1, n + 1, dtype=float))
        fb = np.prod(np.arange(n - b + 1, n + 1, dtype=float))
        total += fa * fb * u ** (n - b) * z ** (n - a)
    return complex(total)


def taylor_as_kernels(f: TaylorPolynomial) -> KernelCombination:
    """Rewrite ``sum c_n z^n`` as ``sum (c_n / n!) K~(., 0)`` of order ``n``."""
    from math import factorial

    terms = tuple(
        (DictionaryElement(0j, n), c / factorial(n)) for n, c in enumerate(f.coeffs)
    )
    return KernelCombination(f.space, terms)
