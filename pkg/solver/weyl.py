"""Left half-line data through the Weyl m-function.

For Im(lambda) >= 0 let f be the solution of -f'' + q f = lambda^2 f that is
square integrable at -inf (the outgoing one for real lambda). With
m = -f'(0) / f(0) the right reflection coefficient of q on (-inf, 0) is

    R(lambda) = (i lambda - m) / (i lambda + m).

This does not need q to decay at -inf, which is what makes the limiting
left data available for the split assembly.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import conf
from .exceptions import RiccatiError
from .potential import evaluate, restrict
from .scattering import right_data_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WeylData:
    lambdas: np.ndarray
    m: np.ndarray
    R: np.ndarray
    x_left: float
    convergence: float


def _upper_sqrt(z):
    root = np.sqrt(np.asarray(z, dtype=complex))
    return np.where(root.imag < 0, -root, root)


def _start_value(q, lambdas, x_left):
    return 1j * _upper_sqrt(lambdas ** 2 - evaluate(q, x_left))


def _pieces(q, x_left):
    cuts = [b for b in q.breakpoints if x_left < b < 0.0]
    points = [x_left] + sorted(cuts) + [0.0]
    return list(zip(points[:-1], points[1:]))


def _riccati(q, lambdas, x_left, w0, rtol, atol):
    """w' = w^2 + lambda^2 - q on [x_left, 0]; None where w blows up."""
    blowup = conf.get("RICCATI_BLOWUP")
    lam2 = lambdas ** 2
    w = w0.copy()
    for a, b in _pieces(q, x_left):
        eps = 1e-12 * max(1.0, abs(a), abs(b))

        def rhs(x, state, a=a, b=b, eps=eps):
            return state ** 2 + lam2 - evaluate(q, min(max(x, a + eps), b - eps))

        def escape(x, state):
            return blowup - np.max(np.abs(state))
        escape.terminal = True

        solution = integrate.solve_ivp(rhs, (a, b), w, method="DOP853", rtol=rtol,
                                       atol=atol, events=escape)
        if solution.status != 0:
            return None
        w = solution.y[:, -1]
    if not np.all(np.isfinite(w)):
        return None
    return w


def _projective(q, lambdas, x_left, w0, rtol, atol):
    """Linear system for (f, -f'), renormalised on unit steps."""
    lam2 = lambdas ** 2
    n = lambdas.size
    state = np.concatenate([np.ones(n, dtype=complex), w0.astype(complex)])
    for a, b in _pieces(q, x_left):
        eps = 1e-12 * max(1.0, abs(a), abs(b))
        steps = np.linspace(a, b, max(2, int(math.ceil(b - a)) + 1))
        for s0, s1 in zip(steps[:-1], steps[1:]):

            def rhs(x, v, a=a, b=b, eps=eps):
                f, g = v[:n], v[n:]
                qx = evaluate(q, min(max(x, a + eps), b - eps))
                return np.concatenate([-g, (lam2 - qx) * f])

            solution = integrate.solve_ivp(rhs, (s0, s1), state, method="DOP853",
                                           rtol=rtol, atol=atol)
            if solution.status != 0:
                raise RiccatiError(f"projective integration failed: {solution.message}")
            state = solution.y[:, -1]
            scale = np.maximum(np.abs(state[:n]), np.abs(state[n:]))
            state = state / np.tile(scale, 2)
    f, g = state[:n], state[n:]
    if np.any(np.abs(f) < 1e-14 * np.abs(g)):
        raise RiccatiError("Weyl solution vanishes at 0; m-function has a pole there")
    return g / f


def _m_values(q, lambdas, x_left, rtol, atol):
    w0 = _start_value(q, lambdas, x_left)
    m = _riccati(q, lambdas, x_left, w0, rtol, atol)
    if m is None:
        logger.warning("Riccati integration left the chart, switching to the "
                       "projective parameterization")
        m = _projective(q, lambdas, x_left, w0, rtol, atol)
    return m


def m_function_left(q, lambda_nodes, x_left=None, rtol=None, atol=None):
    """m-(lambda^2) and R(lambda) for q restricted to (-inf, 0).

    Reports the change of R when the starting point moves from x_left to
    2 x_left.
    """
    rtol = conf.get("ODE_RTOL", rtol)
    atol = conf.get("ODE_ATOL", atol)
    lambdas = np.atleast_1d(np.asarray(lambda_nodes, dtype=complex))
    if np.any(lambdas.imag < 0):
        raise ValueError("lambda nodes must lie in the closed upper half-plane")
    q_minus = restrict(q, "left")
    if x_left is not None and x_left >= 0:
        raise ValueError("x_left must be negative")

    if q_minus.is_zero:
        m = 1j * lambdas
        return WeylData(lambdas, m, np.zeros_like(lambdas), x_left, 0.0)

    if x_left is None:
        lo = q_minus.support[0]
        x_left = lo if math.isfinite(lo) else -conf.get("WEYL_DEPTH")

    m = _m_values(q_minus, lambdas, x_left, rtol, atol)
    m_deep = _m_values(q_minus, lambdas, 2.0 * x_left, rtol, atol)
    R = (1j * lambdas - m) / (1j * lambdas + m)
    R_deep = (1j * lambdas - m_deep) / (1j * lambdas + m_deep)
    convergence = float(np.max(np.abs(R - R_deep)))
    logger.debug("m-function of %s from x_left=%g, change under doubling %.2e",
                 q.description, x_left, convergence)
    return WeylData(lambdas, m, R, x_left, convergence)


def analytic_g(q, lambdas, x_left=None):
    """G = T+^2 R- / (1 - L+ R-) at points of the closed upper half-plane.

    T+ and L+ come from the right Jost solution of q+ at 0, R- from the
    m-function of q on (-inf, 0).
    """
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    q_minus = restrict(q, "left")
    if q_minus.is_zero:
        return np.zeros_like(lambdas)

    q_plus = restrict(q, "right")
    if q_plus.is_zero:
        T_plus, L_plus = np.ones_like(lambdas), np.zeros_like(lambdas)
    else:
        y, yp, _ = right_data_at(q_plus, lambdas, x_match=0.0)
        W = yp + 2j * lambdas * y
        T_plus = 2j * lambdas / W
        L_plus = -yp / W

    R_minus = m_function_left(q_minus, lambdas, x_left).R
    return T_plus ** 2 * R_minus / (1.0 - L_plus * R_minus)
