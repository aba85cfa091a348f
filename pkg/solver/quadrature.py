"""Quadrature rules shared by the scattering and Hankel stages."""

import numpy as np
from numpy.polynomial import legendre


def gauss_legendre(n, a, b):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def sinh_grid(k_min, k_max, n_nodes, scale):
    """Symmetric k-grid without 0, sinh-spaced in |k| (clustered near 0)."""
    if n_nodes % 2:
        raise ValueError("number of k nodes must be even")
    if not 0 < k_min < k_max:
        raise ValueError("need 0 < k_min < k_max")
    s = np.linspace(np.arcsinh(k_min / scale), np.arcsinh(k_max / scale),
                    n_nodes // 2)
    positive = scale * np.sinh(s)
    return np.concatenate([-positive[::-1], positive])


def _alpha_beta_gamma(theta):
    """Filon coefficients, with a series for small theta."""
    theta = np.asarray(theta, dtype=float)
    alpha = np.empty_like(theta)
    beta = np.empty_like(theta)
    gamma = np.empty_like(theta)

    small = np.abs(theta) < 1e-2
    t = theta[small]
    t2 = t * t
    alpha[small] = t * t2 * (2.0 / 45.0 - t2 * 2.0 / 315.0)
    beta[small] = 2.0 / 3.0 + t2 * (2.0 / 15.0 - t2 * 4.0 / 105.0)
    gamma[small] = 4.0 / 3.0 - t2 * (2.0 / 15.0 - t2 / 210.0)

    t = theta[~small]
    sin_t, cos_t = np.sin(t), np.cos(t)
    itheta3 = 1.0 / t ** 3
    alpha[~small] = itheta3 * (t * t + t * sin_t * cos_t - 2.0 * sin_t ** 2)
    beta[~small] = 2.0 * itheta3 * (t * (1.0 + cos_t ** 2) - 2.0 * sin_t * cos_t)
    gamma[~small] = 4.0 * itheta3 * (sin_t - t * cos_t)
    return alpha, beta, gamma


def filon_fourier(f, dx, omega, x0=0.0):
    """Integral of f(x) exp(-i omega x) over [x0, x0 + (len(f) - 1) dx].

    f holds samples on a uniform grid of odd length; omega may be an array.
    Filon's rule integrates the oscillatory factor exactly against the
    piecewise quadratic interpolant of f.
    """
    f = np.asarray(f, dtype=float)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = f.size
    if n < 3 or n % 2 == 0:
        raise ValueError("Filon's rule needs an odd number of samples, at least 3")

    x = x0 + dx * np.arange(n)
    alpha, beta, gamma = _alpha_beta_gamma(dx * omega)
    phase = np.outer(omega, x)
    cos_kx, sin_kx = np.cos(phase), np.sin(phase)
    x_end = x[-1]

    even = f[0::2].copy()
    even[0] *= 0.5
    even[-1] *= 0.5
    odd = f[1::2]

    c_even = cos_kx[:, 0::2] @ even
    s_even = sin_kx[:, 0::2] @ even
    c_odd = cos_kx[:, 1::2] @ odd
    s_odd = sin_kx[:, 1::2] @ odd

    cos_part = dx * (alpha * (f[-1] * np.sin(omega * x_end) - f[0] * np.sin(omega * x0))
                     + beta * c_even + gamma * c_odd)
    sin_part = dx * (alpha * (f[0] * np.cos(omega * x0) - f[-1] * np.cos(omega * x_end))
                     + beta * s_even + gamma * s_odd)
    return cos_part - 1j * sin_part


def phase_panels(k_max, slope, order, span, hotspots=(), refine=1, max_width=0.5):
    """Gauss-Legendre panels on [0, k_max] sized by the local phase slope.

    ``slope(k)`` bounds |d(phase)/dk| and must be non-decreasing in k; each
    panel covers at most ``span`` radians of phase. Panels overlapping one
    of the ``hotspots`` intervals are subdivided ``refine`` times.
    """
    x, w = legendre.leggauss(order)
    edges = [0.0]
    k = 0.0
    while k < k_max:
        width = min(max_width, span / max(slope(k), 1e-12))
        width = min(max_width, span / max(slope(k + width), 1e-12))
        k = min(k_max, k + width)
        edges.append(k)
    edges = np.asarray(edges)

    if refine > 1 and hotspots:
        refined = [edges[0]]
        for a, b in zip(edges[:-1], edges[1:]):
            hot = any(a < hi and b > lo for lo, hi in hotspots)
            pieces = refine if hot else 1
            refined.extend(np.linspace(a, b, pieces + 1)[1:])
        edges = np.asarray(refined)

    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (a[:, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
