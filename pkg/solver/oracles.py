"""Reference computations that share no numerics with the pipeline.

Closed-form solitons, exact transfer matrices for piecewise constant
profiles, a finite-difference eigensolver and a split-step Fourier KdV
integrator. They exist to check the main route, so they are kept simple.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib import scimath
from scipy import linalg

from . import conf
from .exceptions import BlowUpError
from .potential import evaluate

logger = logging.getLogger(__name__)


def soliton_exact(kappa, x0, x, t):
    """-2 kappa^2 sech^2(kappa (x - 4 kappa^2 t) - x0)."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    phase = kappa * (np.asarray(x, dtype=float) - 4.0 * kappa ** 2 * t) - x0
    value = -2.0 * kappa ** 2 / np.cosh(phase) ** 2
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True, eq=False)
class PiecewiseConstantPotential:
    """values[j] on (breakpoints[j], breakpoints[j + 1]), zero outside."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.size != v.size + 1 or np.any(np.diff(b) <= 0):
            raise ValueError("need increasing breakpoints, one more than values")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, q, a, b, cells):
        """Midpoint staircase of q on [a, b]."""
        edges = np.linspace(a, b, cells + 1)
        return cls(edges, evaluate(q, 0.5 * (edges[:-1] + edges[1:])))


def _matching(k_j, a):
    phase = np.exp(1j * k_j * a)
    return np.array([[phase, 1.0 / phase],
                     [1j * k_j * phase, -1j * k_j / phase]])


def transfer_matrix_scattering(p, k):
    """(T, R, L) at real k != 0 from the product of interface matrices.

    M maps the plane-wave amplitudes (A, B) of exp(ikx), exp(-ikx) on the
    far left to those on the far right.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    k = float(k)
    levels = np.concatenate([[0.0], p.values, [0.0]])
    wavenumbers = scimath.sqrt(k * k - levels + 0j)
    wavenumbers[0] = wavenumbers[-1] = k

    M = np.eye(2, dtype=complex)
    for j, a in enumerate(p.breakpoints):
        step = linalg.solve(_matching(wavenumbers[j + 1], a), _matching(wavenumbers[j], a))
        M = step @ M
    T = 1.0 / M[1, 1]
    R = M[0, 1] / M[1, 1]
    L = -M[1, 0] / M[1, 1]
    return T, R, L


def _eigenvalues(q, domain, n_grid):
    a, b = domain
    h = (b - a) / (n_grid + 1)
    x = a + h * np.arange(1, n_grid + 1)
    potential = evaluate(q, x)
    diagonal = 2.0 / h ** 2 + potential
    off = np.full(n_grid - 1, -1.0 / h ** 2)
    lower = float(np.min(potential)) - 1.0
    if lower >= 0:
        return np.empty(0)
    values = linalg.eigh_tridiagonal(diagonal, off, eigvals_only=True, select="v",
                                     select_range=(lower, 0.0))
    return np.sort(values[values < 0])


def schrodinger_eigs(q, domain, n_grid, refine=True):
    """Negative eigenvalues of -d^2/dx^2 + q with Dirichlet ends on domain.

    With refine, the grid is halved once and the second order error is
    removed by Richardson extrapolation over the common eigenvalues.
    """
    coarse = _eigenvalues(q, domain, n_grid)
    if not refine or coarse.size == 0:
        return coarse.tolist()
    fine = _eigenvalues(q, domain, 2 * n_grid + 1)
    count = min(coarse.size, fine.size)
    refined = (4.0 * fine[:count] - coarse[:count]) / 3.0
    return np.sort(refined[refined < 0]).tolist()


def split_step_kdv(q, t_final, domain, n_modes, dt, growth_limit=None):
    """u(., t_final) for u_t - 6 u u_x + u_xxx = 0 on the periodic domain.

    Strang splitting: exact linear flow in Fourier space for half steps
    around a midpoint step of the nonlinear part u_t = 3 (u^2)_x, with 2/3
    dealiasing. Returns (x, u).
    """
    growth_limit = conf.get("BLOWUP_GROWTH", growth_limit)
    a, b = domain
    length = b - a
    x = a + length * np.arange(n_modes) / n_modes
    u = np.asarray(evaluate(q, x), dtype=float)
    if t_final == 0:
        return x, u

    k = 2.0 * math.pi * np.fft.rfftfreq(n_modes, d=length / n_modes)
    dealias = k <= (2.0 / 3.0) * k.max()
    half_linear = np.exp(0.5j * k ** 3 * dt)

    def nonlinear(v_hat):
        v = np.fft.irfft(v_hat, n_modes)
        return 3j * k * np.fft.rfft(v * v) * dealias

    steps = int(round(t_final / dt))
    if steps < 1 or not math.isclose(steps * dt, t_final, rel_tol=1e-9):
        raise ValueError("t_final must be a positive multiple of dt")

    u_hat = np.fft.rfft(u)
    start = max(float(np.max(np.abs(u))), 1e-300)
    for n in range(steps):
        u_hat = half_linear * u_hat
        middle = u_hat + 0.5 * dt * nonlinear(u_hat)
        u_hat = u_hat + dt * nonlinear(middle)
        u_hat = half_linear * u_hat
        if n % 100 == 99 or n == steps - 1:
            peak = float(np.max(np.abs(np.fft.irfft(u_hat, n_modes))))
            if not math.isfinite(peak) or (np.any(u) and peak / start > growth_limit):
                raise BlowUpError("split-step KdV diverged", time=(n + 1) * dt,
                                  growth=peak / start)
    logger.debug("split-step KdV: %d steps of %g on %d modes", steps, dt, n_modes)
    return x, np.fft.irfft(u_hat, n_modes)
