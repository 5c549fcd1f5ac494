"""Closed-form kernel derivatives and band-limited quadrature.

All functions broadcast over numpy arrays. ``z`` is the evaluation variable
and ``u`` the (already conjugated) kernel parameter, i.e. the kernels are
written ``K(z, u)`` with ``u = conj(w)``.
"""

from __future__ import annotations

from math import comb, factorial

import numpy as np

# Sinc derivatives switch to the diagonal Taylor series below this |z - u|.
SINC_SERIES_RADIUS = 0.1
SERIES_TERM_TOL = 1e-18


def szego_mixed_derivative(z, u, a: int, b: int):
    """``d^a/dz^a d^b/du^b (1 - u z)^-1`` in closed form.

    Leibniz on ``b! z^b (1 - u z)^-(b+1)`` gives a finite sum of
    ``min(a, b) + 1`` rational terms.
    """
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    denom = 1.0 - u * z
    out = np.zeros(np.broadcast(z, u).shape, dtype=complex)
    for i in range(min(a, b) + 1):
        coef = comb(a, i) * (factorial(b) // factorial(b - i)) * factorial(a + b - i)
        out = out + coef * z ** (b - i) * u ** (a - i) / denom ** (a + b - i + 1)
    return out


def _sincos_pi(x):
    """sin(pi x) and cos(pi x) for real arrays, exact at half-integers."""
    x = np.asarray(x, dtype=float)
    n = np.rint(2.0 * x)
    f = np.pi * (x - 0.5 * n)
    q = np.mod(n, 4).astype(int)
    s, c = np.sin(f), np.cos(f)
    sin_out = np.choose(q, [s, c, -s, -c])
    cos_out = np.choose(q, [c, -s, -c, s])
    return sin_out, cos_out


def sin_pi(x):
    """sin(pi x) for complex arrays with exact zeros at real integers."""
    x = np.asarray(x, dtype=complex)
    s, c = _sincos_pi(x.real)
    y = np.pi * x.imag
    return s * np.cosh(y) + 1j * c * np.sinh(y)


def _sinc_closed(s, n: int, h: float):
    # d^n/ds^n [sin(c s) / (pi s)], c = pi / h, via Leibniz on sin(c s) * s^-1
    c = np.pi / h
    out = np.zeros(s.shape, dtype=complex)
    for k in range(n + 1):
        trig = sin_pi(s / h + 0.5 * k)
        out = out + (
            comb(n, k) * c**k * trig * (-1) ** (n - k) * factorial(n - k)
            / s ** (n - k + 1)
        )
    return out / np.pi


def _sinc_series(s, n: int, h: float):
    # g^(n)(s) = sum_{k: n+k even} (-1)^((n+k)/2) c^(n+k+1) s^k / (pi k! (n+k+1))
    c = np.pi / h
    out = np.zeros(s.shape, dtype=complex)
    term = np.full(s.shape, c ** (n + 1), dtype=complex)  # c^(n+k+1) s^k / k!
    peak = float(np.max(np.abs(c * s))) if s.size else 0.0
    k = 0
    while True:
        if (n + k) % 2 == 0:
            contrib = (-1) ** ((n + k) // 2) * term / (np.pi * (n + k + 1))
            out = out + contrib
            mag = float(np.max(np.abs(contrib))) if s.size else 0.0
            if k > peak and mag < SERIES_TERM_TOL * max(1.0, float(np.max(np.abs(out)))):
                break
        k += 1
        term = term * (c * s / k)
        if k > 2000:  # pragma: no cover - unreachable for admissible inputs
            raise RuntimeError("sinc series failed to converge")
    return out


def sinc_derivative(s, n: int, h: float):
    """n-th derivative of ``sin((pi/h) s) / (pi s)`` at complex ``s``.

    The closed form is used when ``|s| >= 0.1`` and ``(pi/h)|s| >= n``;
    elsewhere the entire Taylor series about 0 is summed. The second
    condition keeps the Leibniz sum out of its cancellation regime for high
    orders.
    """
    s = np.asarray(s, dtype=complex)
    c = np.pi / h
    use_series = (np.abs(s) < SINC_SERIES_RADIUS) | (c * np.abs(s) < n)
    out = np.empty(s.shape, dtype=complex)
    if np.any(use_series):
        out[use_series] = _sinc_series(s[use_series], n, h)
    if np.any(~use_series):
        out[~use_series] = _sinc_closed(s[~use_series], n, h)
    return out


def sinc_mixed_derivative(z, u, a: int, b: int, h: float):
    """``d^a/dz^a d^b/du^b`` of ``sin((pi/h)(z - u)) / (pi (z - u))``."""
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    return (-1) ** b * sinc_derivative(z - u, a + b, h)


# ---------------------------------------------------------------------------
# Band-limited quadrature: f(z) = (1/2pi) int F(t) e^{-izt} dt
# ---------------------------------------------------------------------------

GL_NODES = 12
SPECTRAL_TOL = 1e-10
_POINT_CHUNK = 1024


def _panel_rule(breaks: np.ndarray, panels: int):
    x, w = np.polynomial.legendre.leggauss(GL_NODES)
    lo, hi = breaks[:-1], breaks[1:]
    edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
    a, b = edges[:, :-1].ravel(), edges[:, 1:].ravel()
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _spectral_chunk(t, F, z, m, panels):
    nodes, weights = _panel_rule(t, panels)
    Fn = np.interp(nodes, t, F.real) + 1j * np.interp(nodes, t, F.imag)
    wf = weights * Fn * (-1j * nodes) ** m / (2.0 * np.pi)
    return np.exp(-1j * np.outer(z, nodes)) @ wf


def spectral_moments(t, F, z, m: int):
    """``f^(m)(z)`` for the piecewise-linear spectrum through ``(t, F)``.

    Composite Gauss-Legendre; the panel count per sample interval is doubled
    until the result moves by less than ``1e-10`` (relative to ``max(1, |f|)``).
    """
    t = np.asarray(t, dtype=float)
    F = np.asarray(F, dtype=complex)
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    out = np.empty(z.shape, dtype=complex)
    width = float(np.max(np.diff(t)))
    for start in range(0, z.size, _POINT_CHUNK):
        zc = z[start:start + _POINT_CHUNK]
        scale = float(np.max(np.abs(zc))) + m + 1.0
        panels = max(1, int(np.ceil(width * scale / 4.0)))
        prev = _spectral_chunk(t, F, zc, m, panels)
        while True:
            panels *= 2
            cur = _spectral_chunk(t, F, zc, m, panels)
            err = float(np.max(np.abs(cur - prev)))
            if err < SPECTRAL_TOL * max(1.0, float(np.max(np.abs(cur)))):
                break
            if panels > 1 << 14:  # pragma: no cover - guard against runaway
                raise RuntimeError("spectral quadrature failed to converge")
            prev = cur
        out[start:start + _POINT_CHUNK] = cur
    return out.reshape(shape)


def spectral_inner(t1, F1, t2, F2) -> complex:
    """``(1/2pi) int F1 conj(F2) dt`` for two piecewise-linear spectra (exact)."""
    t1, t2 = np.asarray(t1, float), np.asarray(t2, float)
    F1, F2 = np.asarray(F1, complex), np.asarray(F2, complex)
    lo, hi = max(t1[0], t2[0]), min(t1[-1], t2[-1])
    if hi <= lo:
        return 0j
    breaks = np.union1d(t1, t2)
    breaks = breaks[(breaks >= lo) & (breaks <= hi)]
    nodes, weights = _panel_rule(breaks, 1)
    g1 = np.interp(nodes, t1, F1.real) + 1j * np.interp(nodes, t1, F1.imag)
    g2 = np.interp(nodes, t2, F2.real) + 1j * np.interp(nodes, t2, F2.imag)
    return complex(np.sum(weights * g1 * np.conj(g2)) / (2.0 * np.pi))
