"""Paley-Wiener space W(pi/h) of band-limited entire functions.

Reproducing kernel ``K_h(z, conj w) = sin((pi/h)(z - conj w)) / (pi (z - conj w))``
with the norm of L^2 on the real line. A spectrum ``F`` on ``[-pi/h, pi/h]``
maps to ``f(z) = (1/2pi) int F(t) e^{-izt} dt`` and
``||f||^2 = (1/2pi) int |F|^2 dt``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ._kernels import sinc_derivative, sinc_mixed_derivative
from .errors import BandViolation, SpaceMismatch
from .rkhs import SignalSpec, SpaceModel, Spectrum, signal_eval

__all__ = [
    "pw_growth_denominator",
    "shannon_partial_sum",
    "signal_eval",
    "sinc_derivative",
    "sinc_kernel",
    "sinc_mixed_derivative",
    "spectrum_to_signal",
]


def sinc_kernel(h: float, z, w):
    """``K_h(z, conj w)``, including the removable singularity at ``z = conj w``."""
    out = sinc_mixed_derivative(z, np.conj(np.asarray(w, dtype=complex)), 0, 0, h)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def shannon_partial_sum(f: SignalSpec, h: float, J: int, z):
    """``h * sum_{|j|<=J} f(jh) K_h(z, jh)``.

    With this normalization a kernel centered at a node ``j0 h``,
    ``|j0| <= J``, is reproduced exactly.
    """
    if f.space.is_hardy or f.space.h != h:
        raise SpaceMismatch(f"signal is not in W(pi/{h:g})")
    if J < 1:
        raise ValueError("J must be a positive integer")
    nodes = h * np.arange(-J, J + 1)
    samples = signal_eval(f, nodes)
    z = np.asarray(z, dtype=complex)
    K = sinc_mixed_derivative(z[..., None], nodes, 0, 0, h)
    out = h * (K @ samples)
    if out.ndim == 0:
        return complex(out)
    return out


def spectrum_to_signal(samples: Sequence, h: float = 1.0) -> Spectrum:
    """Build a spectrum signal from ``(t, F(t))`` samples in ``[-pi/h, pi/h]``."""
    t = [float(s[0]) for s in samples]
    F = [complex(s[1]) for s in samples]
    band = math.pi / h
    bad = [x for x in t if abs(x) > band * (1 + 1e-12)]
    if bad:
        raise BandViolation(f"abscissa {bad[0]:g} outside [-{band:g}, {band:g}]")
    return Spectrum(SpaceModel.paley_wiener(h), tuple(t), tuple(F))


_SERIES_Y = 1e-4


def pw_growth_denominator(y: float) -> float:
    """``sqrt(sinh(2 pi y) / (2 pi y))``, the kernel norm at ``x + iy`` for ``h = 1``."""
    x = 2.0 * math.pi * abs(float(y))
    if x < 2.0 * math.pi * _SERIES_Y:
        ratio = 1.0 + x * x / 6.0 + x**4 / 120.0
    else:
        ratio = math.sinh(x) / x
    return math.sqrt(ratio)
