"""Transformation kernel B+ of a right half-line potential and the
representation of R+ built from it.

For q supported in [0, inf) the kernel solves

    B(x, y) = P(x + y) + int_0^y dz int_{x+y-z}^inf q(t) B(t, z) dt,
    P(s) = int_s^inf q,

on x, y >= 0. With Q(y) = int_0^y q(z) B(z, y - z) dz one has -B_x(0, y) =
q(y) + Q(y), and the right reflection coefficient of q is

    R+(k) = T+(k) (G0(k) / 2ik + G1(k) / (2ik)^2),

G0 and G1 being the transforms of q and Q' against exp(-2iky) on (0, inf).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import conf
from .exceptions import NumericalError, VolterraError
from .potential import evaluate, restrict, tail_start
from .quadrature import filon_fourier, gauss_legendre
from .scattering import scattering_coefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VolterraSolution:
    y: np.ndarray
    Q: np.ndarray
    step: float
    iterations: int
    bound_ratio: float
    kernel: np.ndarray = None


@dataclass(frozen=True, eq=False)
class RPlusRepresentation:
    k_nodes: np.ndarray
    G0: np.ndarray
    G1: np.ndarray
    R_plus: np.ndarray
    y: np.ndarray
    Q: np.ndarray
    Qprime: np.ndarray
    defect: float


@dataclass(frozen=True)
class KernelBounds:
    eta0: float
    gamma0: float
    C1: float
    C2: float
    kernel_ratio: float
    derivative_ratio: float

    @property
    def passes(self):
        return self.kernel_ratio <= 1.0 + 1e-6 and self.derivative_ratio <= 1.0 + 1e-3


def _cell_integrals(func, q, grid, order=8):
    """int func over every cell of grid, split at the breakpoints of q."""
    a, b = grid[:-1], grid[1:]
    x, w = gauss_legendre(order, -1.0, 1.0)
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b)[:, None] + half[:, None] * x[None, :]
    samples = np.asarray(func(nodes.ravel())).reshape(nodes.shape)
    values = (samples * w[None, :]).sum(axis=1) * half

    for p in q.breakpoints:
        i = np.searchsorted(grid, p) - 1
        if 0 <= i < a.size and a[i] < p < b[i]:
            left_nodes, left_w = gauss_legendre(order, a[i], p)
            right_nodes, right_w = gauss_legendre(order, p, b[i])
            values[i] = func(left_nodes) @ left_w + func(right_nodes) @ right_w
    return values


def _reverse_cumsum(cells):
    out = np.zeros(cells.size + 1)
    out[:-1] = np.cumsum(cells[::-1])[::-1]
    return out


def _tail_integral(B, q_left, q_right, h):
    """int_{x_i}^{end} q B by the trapezoid rule with one-sided q limits."""
    cells = 0.5 * h * (q_right[:-1] * B[:-1] + q_left[1:] * B[1:])
    return _reverse_cumsum(cells)


def _right_end(q_plus):
    hi = q_plus.support[1]
    return float(hi) if math.isfinite(hi) else tail_start(q_plus, "right")


def _grid(X, step, eta0):
    h = step
    if eta0 > 0:
        h = min(h, 0.9 / eta0)
    N = 2 * max(1, int(math.ceil(X / (2.0 * h))))
    return N


def _growth(q, x):
    """eta(x) = int_x^inf |q| and gamma(x) = int_x^inf (t - x)|q(t)| dt."""
    absolute = _cell_integrals(lambda t: np.abs(evaluate(q, t)), q, x)
    moment = _cell_integrals(lambda t: t * np.abs(evaluate(q, t)), q, x)
    eta = _reverse_cumsum(absolute)
    gamma = _reverse_cumsum(moment) - x * eta
    return eta, np.maximum(gamma, 0.0)


def _origin_constants(q_plus, X):
    """eta(0) and gamma(0) on a fine grid of [0, X]."""
    eta, gamma = _growth(q_plus, np.linspace(0.0, X, 4097))
    return float(eta[0]), float(gamma[0])


def solve_kernel(q_plus, X, N, tol=None, max_iter=None, keep=False):
    """March the kernel equation column by column in y.

    Within a column the only implicit term is the trapezoid end weight of
    the inner integral; it is resolved by fixed-point iteration, which
    contracts because h eta(0) / 2 < 1/2.
    """
    tol = conf.get("VOLTERRA_TOL", tol)
    max_iter = conf.get("VOLTERRA_MAX_ITER", max_iter)
    h = X / N
    x = h * np.arange(N + 1)
    delta = 1e-9 * h
    q_left = evaluate(q_plus, x - delta)
    q_right = evaluate(q_plus, x + delta)
    P = _reverse_cumsum(_cell_integrals(lambda t: evaluate(q_plus, t), q_plus, x))
    eta, gamma = _growth(q_plus, x)

    Q = np.zeros(N + 1)
    J = np.zeros(N + 1)
    kernel = np.zeros((N + 1, N + 1)) if keep else None
    worst = 0.0
    iterations = 0
    I_prev = None
    for j in range(N + 1):
        n = N - j + 1
        if j == 0:
            B = P.copy()
            I = _tail_integral(B, q_left, q_right, h)
        else:
            base = P[j:] + J[j:] + 0.5 * h * I_prev[1:n + 1]
            B = base.copy()
            for sweep in range(1, max_iter + 1):
                I = _tail_integral(B, q_left[:n], q_right[:n], h)
                updated = base + 0.5 * h * I
                change = float(np.max(np.abs(updated - B)))
                B = updated
                if change <= tol * max(1.0, float(np.max(np.abs(B)))):
                    break
            else:
                raise VolterraError(f"fixed point in column y = {j * h:g} did not settle",
                                    residual=change)
            iterations = max(iterations, sweep)
            I = _tail_integral(B, q_left[:n], q_right[:n], h)
            J[j:] += 0.5 * h * (I_prev[1:n + 1] + I)

        # anti-diagonal trapezoid for Q(y_m), m = i + j
        if j == 0:
            # (x_m, 0) closes every anti-diagonal
            weights = 0.5 * h * q_left.copy()
            weights[0] = 0.0
        else:
            weights = 0.5 * h * (q_left[:n] + q_right[:n])
            weights[0] = 0.5 * h * q_right[0]
        Q[j:] += weights * B

        bound = eta[j:] * np.exp(gamma[:n])
        resolved = bound > 0
        if np.any(~resolved & (np.abs(B) > 1e-14)):
            worst = math.inf
        elif resolved.any():
            worst = max(worst, float(np.max(np.abs(B[resolved]) / bound[resolved])))

        if keep:
            kernel[:n, j] = B
        I_prev = I

    return VolterraSolution(x, Q, h, iterations, worst, kernel)


def _g0(q_plus, k_nodes, X):
    """int_0^X q exp(-2iky) dy piecewise with oscillatory quad weights."""
    cuts = [0.0] + [p for p in q_plus.breakpoints if 0.0 < p < X] + [X]
    values = np.zeros(k_nodes.size, dtype=complex)

    for a, b in zip(cuts[:-1], cuts[1:]):
        eps = 1e-12 * max(1.0, abs(a), abs(b))

        # one-sided values at the piece ends
        def q_at(y, a=a, b=b, eps=eps):
            return float(evaluate(q_plus, min(max(y, a + eps), b - eps)))

        for n, k in enumerate(k_nodes):
            omega = 2.0 * k
            options = dict(wvar=omega, limit=200, epsabs=1e-13, epsrel=1e-12)
            c = integrate.quad(q_at, a, b, weight="cos", **options)[0]
            s = integrate.quad(q_at, a, b, weight="sin", **options)[0]
            values[n] += c - 1j * s
    return values


def r_plus_representation(q, k_nodes, step=None, rep_tol=None, check=True):
    """G0, G1, Q' for q+ and the reconstructed R+, checked against the
    Wronskian route.

    G1 is computed by parts as 2ik int Q exp(-2iky) dy with Filon's rule;
    the kernel is solved at steps h and h/2 and the transforms are combined
    by Richardson extrapolation.
    """
    rep_tol = conf.get("REP_TOL", rep_tol)
    step = conf.get("VOLTERRA_STEP", step)
    k_nodes = np.asarray(k_nodes, dtype=float)
    if np.any(k_nodes == 0):
        raise ValueError("k nodes must be nonzero")
    q_plus = restrict(q, "right")
    zeros = np.zeros(k_nodes.size, dtype=complex)
    if q_plus.is_zero:
        y = np.array([0.0, 1.0])
        return RPlusRepresentation(k_nodes, zeros, zeros.copy(), zeros.copy(), y,
                                   np.zeros(2), np.zeros(2), 0.0)

    X = _right_end(q_plus)
    eta0, _ = _origin_constants(q_plus, X)
    N = _grid(X, step, eta0)
    coarse = solve_kernel(q_plus, X, N)
    fine = solve_kernel(q_plus, X, 2 * N)
    logger.debug("kernel of %s on [0, %g]: h=%g, %d sweeps per column at most",
                 q_plus.description, X, coarse.step, fine.iterations)

    omega = 2.0 * k_nodes
    transform = (4.0 * filon_fourier(fine.Q, fine.step, omega)
                 - filon_fourier(coarse.Q, coarse.step, omega)) / 3.0
    G1 = 2j * k_nodes * transform
    G0 = _g0(q_plus, k_nodes, X)

    T_plus = scattering_coefficients(q_plus, k_nodes)
    twoik = 2j * k_nodes
    R_plus = T_plus.T * (G0 / twoik + G1 / twoik ** 2)
    defect = float(np.max(np.abs(R_plus - T_plus.R), initial=0.0))

    Q = (4.0 * fine.Q[::2] - coarse.Q) / 3.0
    Qprime = np.gradient(Q, coarse.step)
    if check and defect > rep_tol:
        raise NumericalError(f"representation of R+ deviates from the Wronskian "
                             f"route by {defect:.3e} (tolerance {rep_tol:g})")
    return RPlusRepresentation(k_nodes, G0, G1, R_plus, coarse.y, Q, Qprime, defect)


def kernel_bounds(q, step=None):
    """Pointwise bounds on B+ and Q' with the constants
    C1 = eta(0)(exp(gamma(0)) + 1) and C2 = 2 eta(0)^2 exp(gamma(0))."""
    step = conf.get("VOLTERRA_STEP", step)
    q_plus = restrict(q, "right")
    if q_plus.is_zero:
        return KernelBounds(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    X = _right_end(q_plus)
    eta0, gamma0 = _origin_constants(q_plus, X)
    solution = solve_kernel(q_plus, X, _grid(X, step, eta0))

    y = solution.y
    C1 = eta0 * (math.exp(gamma0) + 1.0)
    C2 = 2.0 * eta0 ** 2 * math.exp(gamma0)
    delta = 1e-9 * solution.step
    size = np.maximum(np.abs(evaluate(q_plus, y - delta)), np.abs(evaluate(q_plus, y + delta)))
    # neighbouring samples enter the central difference
    size = np.maximum(size, np.maximum(np.roll(size, 1), np.roll(size, -1)))
    eta_y, _ = _growth(q_plus, y)
    bound = C1 * size + C2 * eta_y
    Qprime = np.gradient(solution.Q, solution.step)
    resolved = bound > 0
    ratio = float(np.max(np.abs(Qprime[resolved]) / bound[resolved], initial=0.0))
    if np.any(~resolved & (np.abs(Qprime) > 1e-12)):
        ratio = math.inf
    return KernelBounds(eta0, gamma0, C1, C2, solution.bound_ratio, ratio)
