"""Forward scattering for -psi'' + q psi = k^2 psi.

The Jost solutions are carried in phase-removed form,

    y+(x, k) = exp(-ikx) psi+(x, k),   y-(x, k) = exp(ikx) psi-(x, k),

which solve y'' + 2ik y' = q y and y'' - 2ik y' = q y respectively and tend
to 1 at +inf / -inf. Coefficients follow the conventions

    T psi- = conj(psi+) + R psi+,   T psi+ = conj(psi-) + L psi-,
    T = 2ik / W(psi-, psi+).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import conf, oracles
from .exceptions import (BoundStateCountError, CoefficientError,
                         ExceptionalPotentialError, NumericalError, SplitError)
from .potential import computational_interval, evaluate, restrict, shifted
from .quadrature import sinh_grid

logger = logging.getLogger(__name__)

DOCUMENT_VERSION = 1


@dataclass(frozen=True)
class BoundState:
    kappa: float
    c: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.c > 0):
            raise ValueError(f"bound state needs kappa > 0 and c > 0, got {self}")


@dataclass(frozen=True, eq=False)
class CoefficientGrid:
    k_nodes: np.ndarray
    R: np.ndarray
    T: np.ndarray
    L: np.ndarray

    def unitarity_defect(self):
        return float(np.max(np.abs(np.abs(self.R) ** 2 + np.abs(self.T) ** 2 - 1.0),
                            initial=0.0))

    def symmetry_defect(self):
        """max |R(-k) - conj R(k)| over mirrored node pairs."""
        k = self.k_nodes
        if not np.allclose(k, -k[::-1]):
            return math.nan
        defects = [np.abs(v - np.conj(v[::-1])) for v in (self.R, self.T, self.L)]
        return float(max(np.max(d, initial=0.0) for d in defects))


@dataclass(frozen=True, eq=False)
class ScatteringData:
    coeffs: CoefficientGrid
    bound_states: tuple = ()
    source: str = "full-line"
    shift: float = 0.0
    potential_digest: str = ""
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        kappas = [b.kappa for b in self.bound_states]
        if kappas != sorted(kappas, reverse=True):
            raise ValueError("bound states must be sorted by kappa, descending")

    @property
    def kappa_max(self):
        return max((b.kappa for b in self.bound_states), default=0.0)

    @classmethod
    def reflectionless(cls, bound_states, k_nodes=None, source="reflectionless"):
        """Pure soliton data: R = L = 0 and |T| = 1 on the grid."""
        if k_nodes is None:
            k_nodes = default_k_grid()
        k = np.asarray(k_nodes, dtype=float)
        T = np.ones_like(k, dtype=complex)
        for b in bound_states:
            T = T * (k + 1j * b.kappa) / (k - 1j * b.kappa)
        zeros = np.zeros_like(k, dtype=complex)
        states = tuple(sorted(bound_states, key=lambda b: -b.kappa))
        return cls(CoefficientGrid(k, zeros, T, zeros.copy()), states, source)

    def to_document(self):
        """Versioned JSON-compatible document (used by the cache)."""
        c = self.coeffs

        def pairs(values):
            return [[float(v.real), float(v.imag)] for v in values]

        return {
            "version": DOCUMENT_VERSION,
            "source": self.source,
            "shift": self.shift,
            "potential": self.potential_digest,
            "grid": self.grid,
            "k": [float(k) for k in c.k_nodes],
            "R": pairs(c.R),
            "T": pairs(c.T),
            "L": pairs(c.L),
            "bound_states": [{"kappa": b.kappa, "c": b.c} for b in self.bound_states],
        }

    @classmethod
    def from_document(cls, document):
        if document.get("version") != DOCUMENT_VERSION:
            raise ValueError(f"unsupported scattering document version "
                             f"{document.get('version')!r}")

        def values(key):
            array = np.asarray(document[key], dtype=float).reshape(-1, 2)
            return array[:, 0] + 1j * array[:, 1]

        coeffs = CoefficientGrid(np.asarray(document["k"], dtype=float),
                                 values("R"), values("T"), values("L"))
        states = tuple(BoundState(b["kappa"], b["c"]) for b in document["bound_states"])
        return cls(coeffs, states, document["source"], document["shift"],
                   document["potential"], document.get("grid", {}))


@dataclass(frozen=True, eq=False)
class ReflectionSplit:
    R_plus: CoefficientGrid
    G_values: np.ndarray
    T_plus: np.ndarray
    L_plus: np.ndarray
    poles: tuple
    defect: float


def default_k_grid(k_min=None, k_max=None, n_nodes=None, scale=None):
    return sinh_grid(conf.get("K_MIN", k_min), conf.get("K_MAX", k_max),
                     conf.get("K_NODES", n_nodes), conf.get("K_SCALE", scale))


# Phase-removed Jost integration.

def _segments(q, start, stop):
    """Integration pieces from start to stop, split at the breakpoints."""
    lo, hi = min(start, stop), max(start, stop)
    cuts = [b for b in q.breakpoints if lo < b < hi]
    points = [start] + (sorted(cuts) if stop > start else sorted(cuts, reverse=True)) + [stop]
    return [(a, b) for a, b in zip(points[:-1], points[1:]) if a != b]


def _sweep(q, ks, start, stop, sign, x_eval=None, rtol=None, atol=None):
    """Integrate y'' + 2i sign k y' = q y from start to stop for all ks.

    Starts from y = 1, y' = 0. Returns (y, y') at ``stop`` and, if requested,
    y at the points of ``x_eval`` (which must lie between start and stop) as
    an array of shape (len(x_eval), len(ks)).
    """
    rtol = conf.get("ODE_RTOL", rtol)
    atol = conf.get("ODE_ATOL", atol)
    ks = np.asarray(ks, dtype=complex)
    n = ks.size
    state = np.concatenate([np.ones(n, dtype=complex), np.zeros(n, dtype=complex)])
    coupling = 2j * sign * ks

    samples = None
    if x_eval is not None:
        x_eval = np.asarray(x_eval, dtype=float)
        samples = np.empty((x_eval.size, n), dtype=complex)

    for a, b in _segments(q, start, stop):
        left, right = min(a, b), max(a, b)
        eps = 1e-12 * max(1.0, abs(left), abs(right))

        def rhs(x, s, left=left, right=right, eps=eps):
            qx = evaluate(q, min(max(x, left + eps), right - eps))
            y, yp = s[:n], s[n:]
            return np.concatenate([yp, qx * y - coupling * yp])

        index = np.empty(0, dtype=int)
        if samples is not None:
            index = np.flatnonzero((x_eval >= left) & (x_eval <= right))
            index = index[np.argsort(x_eval[index])]
            if b < a:
                index = index[::-1]

        if not np.any(state[n:]) and not _has_mass(q, left, right):
            # q vanishes and y' = 0, so y is constant here
            if index.size:
                samples[index] = state[:n]
            continue

        solution = integrate.solve_ivp(rhs, (a, b), state, method="DOP853",
                                       rtol=rtol, atol=atol,
                                       dense_output=bool(index.size))
        if solution.status != 0:
            raise NumericalError(
                f"Jost integration failed on [{left}, {right}]: {solution.message}")
        if index.size:
            samples[index] = solution.sol(x_eval[index])[:n].T
        state = solution.y[:, -1]

    return state[:n], state[n:], samples


def _has_mass(q, left, right):
    xs = np.linspace(left, right, 257)
    return bool(np.any(evaluate(q, xs) != 0.0))


def _batched(ks, batch=None):
    batch = conf.get("ODE_BATCH", batch)
    ks = np.asarray(ks)
    for start in range(0, ks.size, batch):
        yield slice(start, start + batch), ks[start:start + batch]


def jost_right(q, k, x_grid):
    """y+(x, k) on x_grid, for Im k >= 0."""
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x_grid) <= 0):
        raise ValueError("x_grid must be increasing")
    if q.is_zero:
        return np.ones(x_grid.shape, dtype=complex)
    _, x_right = computational_interval(q)
    start = max(x_right, x_grid[-1])
    _, _, samples = _sweep(q, [k], start, x_grid[0], +1, x_eval=x_grid)
    return samples[:, 0]


def jost_left(q, k, x_grid):
    """y-(x, k) on x_grid, for Im k >= 0."""
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x_grid) <= 0):
        raise ValueError("x_grid must be increasing")
    if q.is_zero:
        return np.ones(x_grid.shape, dtype=complex)
    x_left, _ = computational_interval(q)
    start = min(x_left, x_grid[0])
    _, _, samples = _sweep(q, [k], start, x_grid[-1], -1, x_eval=x_grid)
    return samples[:, 0]


def right_data_at(q, ks, x_match=None):
    """(y+, y+') at x_match (default: left end of the computational interval).

    Works for any ks in the closed upper half-plane; the sweep runs in
    batches.
    """
    ks = np.asarray(ks, dtype=complex)
    if q.is_zero:
        return np.ones_like(ks), np.zeros_like(ks), 0.0 if x_match is None else x_match
    x_left, x_right = computational_interval(q)
    if x_match is None:
        x_match = x_left
    y = np.empty_like(ks)
    yp = np.empty_like(ks)
    for where, chunk in _batched(ks):
        y[where], yp[where], _ = _sweep(q, chunk, max(x_right, x_match), x_match, +1)
    return y, yp, x_match


def scattering_coefficients(q, k_nodes, wronskian_floor=None, coeff_tol=None):
    """R, T, L on real, nonzero k_nodes.

    The right Jost solution is integrated across the whole support; left of
    it y- = 1 and y-' = 0, so the Wronskian and both reflection coefficients
    follow from (y+, y+') there. Unitarity must hold to coeff_tol.
    """
    floor = conf.get("WRONSKIAN_FLOOR", wronskian_floor)
    coeff_tol = conf.get("COEFF_TOL", coeff_tol)
    k_nodes = np.asarray(k_nodes, dtype=float)
    if np.any(k_nodes == 0):
        raise ValueError("k nodes must be nonzero")

    positive = np.unique(np.abs(k_nodes))
    y, yp, x0 = right_data_at(q, positive)
    W = yp + 2j * positive * y
    bad = np.abs(W) < floor
    if bad.any():
        i = int(np.argmax(bad))
        raise ExceptionalPotentialError("Wronskian below floor",
                                        k=float(positive[i]), wronskian=float(abs(W[i])))
    T = 2j * positive / W
    R = -np.exp(-2j * positive * x0) * np.conj(yp) / W
    L = -np.exp(2j * positive * x0) * yp / W
    _check_unitarity(positive, R, T, coeff_tol)

    index = np.searchsorted(positive, np.abs(k_nodes))
    mirror = k_nodes < 0

    def spread(values):
        out = values[index]
        return np.where(mirror, np.conj(out), out)

    grid = CoefficientGrid(k_nodes, spread(R), spread(T), spread(L))
    logger.debug("coefficients of %s on %d nodes, unitarity defect %.2e",
                 q.description, k_nodes.size, grid.unitarity_defect())
    return grid


def _check_unitarity(k, R, T, coeff_tol):
    # W(psi+, conj psi+) = -2ik is not built into the formulas, so this
    # measures the integration error
    defect = np.abs(np.abs(R) ** 2 + np.abs(T) ** 2 - 1.0)
    if defect.size and np.max(defect) > coeff_tol:
        i = int(np.argmax(defect))
        raise CoefficientError("|R|^2 + |T|^2 != 1", k=float(k[i]), defect=float(defect[i]))


# Bound states.

def wronskian_imaginary_axis(q, kappas):
    """Real W(psi-, psi+)(i kappa) for kappa > 0."""
    kappas = np.asarray(kappas, dtype=float)
    y, yp, _ = right_data_at(q, 1j * kappas)
    return np.real(yp - 2.0 * kappas * y)


def _matching_point(q, x_left, x_right):
    """Middle of the deepest part of q, where both Jost solutions are O(1)."""
    probe = np.linspace(x_left, x_right, 4001)
    values = evaluate(q, probe)
    deepest = np.flatnonzero(values <= values.min() + 1e-9 * abs(values.min()))
    return 0.5 * float(probe[deepest[0]] + probe[deepest[-1]])


def _proportionality(q, kappa):
    """gamma with psi-(., i kappa) = gamma psi+(., i kappa) at a bound state.

    Both solutions are integrated towards an interior point from the side
    where they decay, so neither picks up the growing solution; gamma is
    the least-squares ratio of (psi, psi' / kappa) there.
    """
    x_left, x_right = computational_interval(q)
    x_m = _matching_point(q, x_left, x_right)
    k = [1j * kappa]
    y_p, yp_p, _ = _sweep(q, k, max(x_right, x_m), x_m, +1)
    y_m, yp_m, _ = _sweep(q, k, min(x_left, x_m), x_m, -1)
    y_p, yp_p, y_m, yp_m = (float(np.real(v[0])) for v in (y_p, yp_p, y_m, yp_m))
    # psi+ = exp(-kappa x) y+ and psi- = exp(kappa x) y-; the common factor
    # exp(kappa x_m) is applied after the ratio
    plus = np.array([y_p, (yp_p - kappa * y_p) / kappa])
    minus = np.array([y_m, (yp_m + kappa * y_m) / kappa])
    return math.exp(2.0 * kappa * x_m) * float(minus @ plus) / float(plus @ plus)


def _norming_constant(q, kappa, step=1e-3):
    """c = 1 / ||psi+(., i kappa)||^2 with psi+ ~ exp(-kappa x) at +inf.

    Uses int psi- psi+ dx = -w'(kappa) / (2 kappa) for w(kappa) = W(i kappa),
    so ||psi+||^2 = -w'(kappa) / (2 kappa gamma); w' is a fourth-order
    central difference.
    """
    h = step * kappa
    w = wronskian_imaginary_axis(q, kappa + h * np.array([-2.0, -1.0, 1.0, 2.0]))
    slope = (w[0] - 8.0 * w[1] + 8.0 * w[2] - w[3]) / (12.0 * h)
    norm = -slope / (2.0 * kappa * _proportionality(q, kappa))
    if not norm > 0:
        raise NumericalError(f"non-positive norm {norm!r} of the bound state at "
                             f"kappa = {kappa!r}")
    return 1.0 / norm


def _kappa_floor():
    return 2.0 / conf.get("EIG_MARGIN")


def bound_states(q, kappa_max=None, kappa_tol=None, check=True):
    """Bound states (kappa_n, c_n), sorted by kappa descending.

    Zeros of kappa -> W(i kappa) are bracketed on a geometric scan and
    refined with Brent's method; the count is checked against the
    finite-difference eigensolver.
    """
    kappa_tol = conf.get("KAPPA_TOL", kappa_tol)
    if q.is_zero:
        return ()
    x_left, x_right = computational_interval(q)
    probe = np.linspace(x_left, x_right, 4001)
    depth = max(0.0, -float(np.min(evaluate(q, probe))))
    if depth == 0.0:
        return ()

    margin = conf.get("EIG_MARGIN")
    domain = (x_left - margin, x_right + margin)
    eigenvalues = oracles.schrodinger_eigs(q, domain, conf.get("EIG_GRID"), refine=False)
    if kappa_max is None:
        kappa_max = math.sqrt(depth) + 0.5
    if len(eigenvalues) and math.sqrt(-eigenvalues[0]) >= kappa_max:
        widened = 1.1 * math.sqrt(-eigenvalues[0])
        logger.warning("kappa_max %.4g below the eigensolver estimate, using %.4g",
                       kappa_max, widened)
        kappa_max = widened

    scan = np.geomspace(1e-4, kappa_max, conf.get("KAPPA_SCAN"))
    values = wronskian_imaginary_axis(q, scan)

    def w_at(kappa):
        return float(wronskian_imaginary_axis(q, [kappa])[0])

    kappas = []
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
        root = optimize.brentq(w_at, scan[i], scan[i + 1], xtol=kappa_tol,
                               rtol=4 * np.finfo(float).eps)
        kappas.append(root)

    if check:
        floor = _kappa_floor()
        found = sum(1 for kappa in kappas if kappa > floor)
        expected = int(np.sum(np.asarray(eigenvalues) < -floor ** 2))
        if found != expected:
            raise BoundStateCountError(found, expected)

    states = [BoundState(kappa, _norming_constant(q, kappa)) for kappa in kappas]
    states.sort(key=lambda b: -b.kappa)
    logger.debug("bound states of %s: %s", q.description,
                 ", ".join(f"{b.kappa:.10g}" for b in states) or "none")
    return tuple(states)


def scattering_data(q, k_nodes=None, kappa_max=None, source="full-line"):
    """Coefficients plus bound states, retrying once with a shifted profile
    when the Wronskian is numerically singular."""
    if k_nodes is None:
        k_nodes = default_k_grid()
    shift = 0.0
    try:
        coeffs = scattering_coefficients(q, k_nodes)
    except ExceptionalPotentialError as e:
        shift = conf.get("PROFILE_SHIFT")
        logger.warning("%s; retrying with the profile shifted by %g", e, shift)
        q = shifted(q, shift)
        coeffs = scattering_coefficients(q, k_nodes)
    states = bound_states(q, kappa_max)
    return ScatteringData(coeffs, states, source, shift, q.digest())


def split_reflection(q, k_nodes, split_tol=None, denominator_floor=None):
    """R = R+ + G with G = T+^2 R- / (1 - L+ R-), checked against the
    full-line coefficients."""
    split_tol = conf.get("SPLIT_TOL", split_tol)
    floor = conf.get("DENOMINATOR_FLOOR", denominator_floor)
    k_nodes = np.asarray(k_nodes, dtype=float)
    q_plus, q_minus = restrict(q, "right"), restrict(q, "left")

    plus = scattering_coefficients(q_plus, k_nodes)
    if q_minus.is_zero:
        G = np.zeros_like(plus.R)
    else:
        R_minus = scattering_coefficients(q_minus, k_nodes).R
        denominator = 1.0 - plus.L * R_minus
        bad = np.abs(denominator) < floor
        if bad.any():
            i = int(np.argmax(bad))
            raise SplitError("near-resonant split denominator", k=float(k_nodes[i]),
                             value=complex(denominator[i]))
        G = plus.T ** 2 * R_minus / denominator

    full = scattering_coefficients(q, k_nodes)
    defect = float(np.max(np.abs(full.R - plus.R - G), initial=0.0))
    if defect > split_tol:
        i = int(np.argmax(np.abs(full.R - plus.R - G)))
        raise SplitError("R differs from R+ + G", k=float(k_nodes[i]), value=defect)

    poles = tuple(1j * b.kappa for b in bound_states(q)) + \
        tuple(1j * b.kappa for b in bound_states(q_plus))
    return ReflectionSplit(plus, G, plus.T, plus.L, poles, defect)
