"""Fredholm determinants of the Hankel operators and the KdV solution

    u(x, t) = -2 d^2/dx^2 log det(1 + H(x, t))

read off from them, with the checks around it: two independent routes to
u, block determinant variants of the split operator, truncation and
smoothing studies and the KdV residual of a computed field.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg

from . import conf, hankel
from .exceptions import (BlockVariantError, ContourError, DeterminantError,
                         GridError, MethodMismatchError)
from .potential import evaluate, truncate_left
from .scattering import ScatteringData, scattering_data

logger = logging.getLogger(__name__)

TRACE_FORMULA = "trace_formula"
FINITE_DIFFERENCE = "finite_difference"
CROSS_CHECK = "cross_check"
METHODS = (TRACE_FORMULA, FINITE_DIFFERENCE, CROSS_CHECK)


@dataclass(frozen=True)
class Discretization:
    """Nystrom parameters; None falls back to the SOLVER settings."""

    L_s: float = None
    n_quad: int = None
    fd_step: float = None
    tail_cut: float = None

    def describe(self):
        return {
            "L_s": self.L_s,
            "n_quad": conf.get("N_QUAD", self.n_quad),
            "fd_step": conf.get("FD_STEP", self.fd_step),
            "tail_cut": conf.get("TAIL_CUT", self.tail_cut),
        }


@dataclass(frozen=True, eq=False)
class SplitData:
    """Data of H(phi+) + H(Phi): the right restriction and G on a contour.

    ``full`` is used where the contour integral does not converge
    (t = 0, x <= 0).
    """

    plus: ScatteringData
    contour: hankel.ContourData
    full: ScatteringData = None


@dataclass(frozen=True, eq=False)
class SolutionField:
    x_grid: np.ndarray
    t_grid: np.ndarray
    u: np.ndarray
    logdet: np.ndarray
    residual: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def rows(self):
        """(x, t, u, logdet, residual) per grid point, t-major."""
        for i, t in enumerate(self.t_grid):
            for j, x in enumerate(self.x_grid):
                residual = math.nan if self.residual is None else self.residual[i, j]
                yield x, t, self.u[i, j], self.logdet[i, j], residual


@dataclass(frozen=True, eq=False)
class ConvergenceTable:
    b_values: tuple
    probes: tuple
    u_b: np.ndarray
    deltas: np.ndarray

    @property
    def monotone_tail(self):
        """Successive deltas shrink at every probe over the last three b."""
        if self.deltas.shape[0] < 2:
            return True
        tail = np.abs(self.deltas[-2:])
        return bool(np.all(tail[1] <= tail[0]))


@dataclass(frozen=True)
class InitialValueReport:
    x_grid: tuple
    t: float
    u: tuple
    q: tuple
    max_deviation: float


# Log-determinants.

def _log_det(A):
    """(log |det A|, phase of det A) from a pivoted LU factorization."""
    lu, piv = linalg.lu_factor(A, check_finite=True)
    diagonal = np.diag(lu)
    if np.any(diagonal == 0):
        raise DeterminantError("1 + M is singular")
    swaps = int(np.sum(piv != np.arange(piv.size)))
    phase = np.prod(diagonal / np.abs(diagonal)) * (-1) ** swaps
    return float(np.sum(np.log(np.abs(diagonal)))), phase


def fredholm_logdet(d):
    """log det(1 + M) for a discretization (or a bare matrix); det must be > 0."""
    M = d.M if isinstance(d, hankel.HankelDiscretization) else np.asarray(d)
    if M.size == 0:
        return 0.0
    value, phase = _log_det(np.eye(M.shape[0]) + M)
    if abs(phase - 1.0) > 1e-8:
        raise DeterminantError(f"det(1 + M) is not positive (phase {phase})")
    return value


# Operators at (x, t).

def _symbols(data, x, t):
    if isinstance(data, SplitData):
        if t == 0 and x <= 0:
            if data.full is None:
                raise ContourError("split assembly needs x > 0 at t = 0",
                                   required_length=math.inf)
            return [hankel.assemble_symbol(data.full, x, t)]
        poles = [b.kappa for b in data.plus.bound_states]
        if data.full is not None:
            poles += [b.kappa for b in data.full.bound_states]
        return [hankel.symbol_plus(data.plus, x, t),
                hankel.contour_symbol(data.contour, x, t, poles)]
    return [hankel.assemble_symbol(data, x, t)]


def _length(symbols, disc):
    if disc.L_s is not None:
        return disc.L_s
    kappa = max(s.kappa_max for s in symbols)
    for s in symbols:
        if s.analytic_part is not None:
            kappa = max(kappa, s.analytic_part.height - conf.get("CONTOUR_OFFSET"))
    t = symbols[0].t
    return 30.0 + 10.0 * max(1.0, 4.0 * kappa ** 3 * t)


def _series(data, x, t, disc, orders, reach=None):
    """Exponential sum of the whole operator and the Nystrom grid for it.

    The sum stays accurate for shifts of x up to ``reach`` (by default the
    finite-difference stencil).
    """
    symbols = _symbols(data, x, t)
    L_s = _length(symbols, disc)
    s, w = hankel.nodes(L_s, disc.n_quad)
    if reach is None:
        reach = 4.0 * conf.get("FD_STEP", disc.fd_step)
    series = None
    for symbol in symbols:
        # a shift dx in x acts like a shift 2 dx in s
        part = hankel.expansion(symbol, max(2.0 * s[0] - 2.0 * reach, 0.0),
                                2.0 * L_s + 2.0 * reach, orders)
        series = part if series is None else series + part
    return series, s, w, L_s


def _check_tail(series, L_s, disc):
    return hankel.check_tail(series, L_s, disc.tail_cut)


def _trace_value(series, s, w, dx=0.0):
    matrices, _ = series.shifted(dx=dx).gram(s, w, [(0, 0), (1, 0), (2, 0)])
    M, M_x, M_xx = matrices[(0, 0)], matrices[(1, 0)], matrices[(2, 0)]
    factor = linalg.lu_factor(np.eye(s.size) + M)
    A_x = linalg.lu_solve(factor, M_x)
    A_xx = linalg.lu_solve(factor, M_xx)
    u = -2.0 * (np.trace(A_xx) - np.sum(A_x * A_x.T))
    return float(u), fredholm_logdet(M)


def _difference_value(series, s, w, h):
    def logdet(dx):
        matrices, _ = series.shifted(dx=dx).gram(s, w)
        return fredholm_logdet(matrices[(0, 0)])

    f = {j: logdet(j * h) for j in (-4, -2, -1, 0, 1, 2, 4)}

    def second(a):
        return (-f[2 * a] + 16.0 * f[a] - 30.0 * f[0] + 16.0 * f[-a] - f[-2 * a]) \
            / (12.0 * (a * h) ** 2)

    D = (16.0 * second(1) - second(2)) / 15.0
    return -2.0 * D, f[0]


def u_point(sd, x, t, disc=None, method=TRACE_FORMULA):
    """u(x, t) and log det(1 + H) at one point.

    ``sd`` is ScatteringData (full-line symbol) or SplitData. The trace
    formula -2 [tr(A M_xx) - tr((A M_x)^2)], A = (1 + M)^-1, is the primary
    route; finite differences of log det in x are the independent one.
    """
    disc = disc or Discretization()
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if t < 0:
        raise ValueError("t must be non-negative")
    h = conf.get("FD_STEP", disc.fd_step)
    orders = [(0, 0)] if method == FINITE_DIFFERENCE else [(0, 0), (1, 0), (2, 0)]
    series, s, w, L_s = _series(sd, x, t, disc, orders)
    _check_tail(series, L_s, disc)

    if method == FINITE_DIFFERENCE:
        return _difference_value(series, s, w, h)
    u, logdet = _trace_value(series, s, w)
    if method == CROSS_CHECK:
        other, _ = _difference_value(series, s, w, h)
        if abs(u - other) > conf.get("CROSS_TOL"):
            raise MethodMismatchError(u, other)
    return u, logdet


def _field_point(sd, x, t, disc, method):
    return u_point(sd, x, t, disc, method)


def u_field(sd, x_grid, t_grid, disc=None, method=TRACE_FORMULA, workers=1,
            residual=False, meta=None):
    """u over the product grid (rows are times), in a joblib thread pool."""
    disc = disc or Discretization()
    x_grid = np.asarray(x_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    points = [(x, t) for t in t_grid for x in x_grid]
    results = Parallel(n_jobs=workers, prefer="threads")(
        delayed(_field_point)(sd, x, t, disc, method) for x, t in points)
    shape = (t_grid.size, x_grid.size)
    u = np.array([r[0] for r in results]).reshape(shape)
    logdet = np.array([r[1] for r in results]).reshape(shape)
    if not np.all(np.isfinite(u)):
        raise DeterminantError("non-finite u in the computed field")
    info = {"discretization": disc.describe(), "method": method}
    info.update(meta or {})
    solution = SolutionField(x_grid, t_grid, u, logdet, None, info)
    if residual:
        matrix, norm = kdv_residual(solution)
        info["residual_max"] = norm
        solution = SolutionField(x_grid, t_grid, u, logdet, matrix, info)
    return solution


# KdV residual.

def _uniform_step(grid, what):
    steps = np.diff(grid)
    if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise GridError(f"{what} grid is not uniform")
    return float(steps[0])


def kdv_residual(field):
    """u_t - 6 u u_x + u_xxx by central differences on interior nodes.

    Returns the residual on the field's grid (NaN on the boundary rows and
    columns) and its max norm.
    """
    x, t, u = field.x_grid, field.t_grid, field.u
    if x.size < 7 or t.size < 3:
        raise GridError("residual needs at least 7 x nodes and 3 t nodes")
    hx = _uniform_step(x, "x")
    ht = _uniform_step(t, "t")

    inner = u[1:-1, 2:-2]
    u_t = (u[2:, 2:-2] - u[:-2, 2:-2]) / (2.0 * ht)
    u_x = (u[1:-1, 3:-1] - u[1:-1, 1:-3]) / (2.0 * hx)
    u_xxx = (u[1:-1, 4:] - 2.0 * u[1:-1, 3:-1] + 2.0 * u[1:-1, 1:-3]
             - u[1:-1, :-4]) / (2.0 * hx ** 3)
    residual = np.full(u.shape, np.nan)
    residual[1:-1, 2:-2] = u_t - 6.0 * inner * u_x + u_xxx
    return residual, float(np.nanmax(np.abs(residual)))


# Split operator checks.

def block_det_variants(H_plus, H_phi, block_tol=None, psd_tol=None):
    """log det(1 + H+ + H(Phi)) computed five ways.

    The square-root variant is only formed when H(Phi) is positive
    semidefinite; otherwise it is skipped and logged.
    """
    block_tol = conf.get("BLOCK_TOL", block_tol)
    psd_tol = conf.get("PSD_TOL", psd_tol)
    H_plus = np.asarray(H_plus, dtype=float)
    H_phi = np.asarray(H_phi, dtype=float)
    n = H_plus.shape[0]
    one = np.eye(n)
    base = one + H_plus

    def positive(log_value, phase, label):
        if abs(phase - 1.0) > 1e-6:
            raise DeterminantError(f"variant {label}: determinant is not positive")
        return log_value

    values = {"v1": positive(*_log_det(base + H_phi), "v1")}
    first = positive(*_log_det(base), "v2")
    values["v2"] = first + positive(*_log_det(one + linalg.solve(base, H_phi)), "v2")
    values["v4"] = positive(*_log_det(np.block([[base, -H_phi], [one, one]])), "v4")
    values["v5"] = positive(*_log_det(np.block([[base, one], [-H_phi, one]])), "v5")

    symmetric = 0.5 * (H_phi + H_phi.T)
    eigenvalues, vectors = linalg.eigh(symmetric)
    scale = max(1.0, float(np.max(np.abs(eigenvalues), initial=0.0)))
    if np.min(eigenvalues, initial=0.0) >= -psd_tol * scale:
        root = (vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ vectors.T
        block = np.block([[base.astype(complex), 1j * root], [1j * root, one]])
        values["v3"] = positive(*_log_det(block), "v3")
    else:
        logger.warning("H(Phi) is not positive semidefinite (min eigenvalue %.3e), "
                       "square-root variant skipped", float(eigenvalues[0]))

    spread = max(values.values()) - min(values.values())
    if spread > block_tol:
        raise BlockVariantError(values)
    return values


def split_matrices(data, x, t, disc=None):
    """(H+, H(Phi)) on a common Nystrom grid for SplitData at (x, t)."""
    disc = disc or Discretization()
    plus, analytic = _symbols(data, x, t)
    L_s = _length([plus, analytic], disc)
    H_plus = hankel.nystrom(plus, L_s, disc.n_quad, tail_cut=math.inf).M
    H_phi = hankel.nystrom(analytic, L_s, disc.n_quad, tail_cut=math.inf).M
    return H_plus, H_phi


# Studies.

def truncation_study(q, b_list, probes, disc=None, k_nodes=None, workers=1):
    """u of the left truncations q_b at the probe points, for decreasing b."""
    b_list = tuple(float(b) for b in b_list)
    if any(b2 >= b1 for b1, b2 in zip(b_list, b_list[1:])):
        raise ValueError("b values must be strictly decreasing")
    probes = tuple((float(x), float(t)) for x, t in probes)

    def run(b):
        sd = scattering_data(truncate_left(q, b), k_nodes, source=f"left-truncated b={b:g}")
        return [u_point(sd, x, t, disc)[0] for x, t in probes]

    rows = Parallel(n_jobs=workers, prefer="threads")(delayed(run)(b) for b in b_list)
    u_b = np.array(rows, dtype=float).reshape(len(b_list), len(probes))
    deltas = np.diff(u_b, axis=0)
    for b, row in zip(b_list, u_b):
        logger.debug("b=%g: %s", b, ", ".join(f"{v:.10g}" for v in row))
    return ConvergenceTable(b_list, probes, u_b, deltas)


def _stencil(order):
    """Second-order central difference weights for the given derivative."""
    radius = (order + 1) // 2
    offsets = np.arange(-radius, radius + 1)
    vandermonde = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    return offsets, linalg.solve(vandermonde, rhs)


def smoothing_probe(sd, x, t, max_order, disc=None, steps=(0.2, 0.1, 0.05)):
    """Derivative estimates of u in x up to max_order at shrinking steps.

    Returns (order, estimate at the finest step, observed convergence
    order); a degraded order is reported, not raised.
    """
    if t <= 0:
        raise ValueError("the smoothing probe needs t > 0")
    if not 1 <= max_order <= 5:
        raise ValueError("max_order must lie in 1..5")
    disc = disc or Discretization()
    radius = (max_order + 1) // 2
    series, s, w, L_s = _series(sd, x, t, disc, [(0, 0), (1, 0), (2, 0)],
                                reach=radius * max(steps))
    _check_tail(series, L_s, disc)
    samples = {}
    for h in steps:
        for j in range(-radius, radius + 1):
            key = round(j * h, 12)
            if key not in samples:
                samples[key] = _trace_value(series, s, w, dx=key)[0]

    report = []
    for order in range(1, max_order + 1):
        offsets, weights = _stencil(order)
        estimates = [sum(c * samples[round(j * h, 12)] for j, c in zip(offsets, weights)) / h ** order
                     for h in steps]
        first = abs(estimates[0] - estimates[1])
        second = abs(estimates[1] - estimates[2])
        if first == 0 or second == 0:
            slope = math.nan
        else:
            slope = math.log(first / second) / math.log(steps[0] / steps[1])
        report.append((order, float(estimates[-1]), slope))
    return report


def initial_value_report(q, sd, x_grid, t=0.0, disc=None):
    """u(., t) for small t against q on x_grid."""
    x_grid = np.asarray(x_grid, dtype=float)
    u = np.array([u_point(sd, x, t, disc)[0] for x in x_grid])
    profile = evaluate(q, x_grid)
    deviation = float(np.max(np.abs(u - profile), initial=0.0))
    return InitialValueReport(tuple(x_grid), float(t), tuple(u), tuple(profile), deviation)
