"""Hankel symbols, their kernel profiles and Nystrom discretizations.

Every part of a symbol is turned into an exponential sum

    F(s) = sum_m W_m exp(i lambda_m s),   W_m = base_m xi(lambda_m),
    xi(lambda) = exp(i (8 lambda^3 t + 2 lambda x)),

with lambda_m = i kappa_n for the pole terms, real panel nodes for the
reflection integral and points of the line Im(lambda) = h for the analytic
part. An (x, t) derivative of order (m, n) multiplies W by
(2i lambda)^m (8i lambda^3)^n, and a Nystrom matrix is E diag(W) E^T with
E[i, m] = sqrt(w_i) exp(i lambda_m s_i).
"""

import logging
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, linalg, special

from . import conf
from .exceptions import ContourError, KernelError, TruncationError
from .quadrature import gauss_legendre, phase_panels

logger = logging.getLogger(__name__)

CHUNK = 4096


class ContourData:
    """G sampled on the line lambda = u + ih, u = j * step.

    Only u >= 0 is evaluated; the other half follows from
    G(-conj(lambda)) = conj(G(lambda)). Samples are kept, so one contour
    serves every (x, t).
    """

    def __init__(self, G, height, step=None, max_length=None):
        if height <= 0:
            raise ValueError("contour height must be positive")
        self.G = G
        self.height = float(height)
        self.step = conf.get("CONTOUR_STEP", step)
        self.max_length = conf.get("CONTOUR_MAX_LENGTH", max_length)
        self._values = np.empty(0, dtype=complex)
        self._lock = threading.Lock()

    def _extend(self, count):
        with self._lock:
            have = self._values.size
            if count <= have:
                return
            u = self.step * np.arange(have, count)
            fresh = np.asarray(self.G(u + 1j * self.height), dtype=complex)
            if fresh.shape != u.shape:
                raise ValueError("G must return one value per contour point")
            self._values = np.concatenate([self._values, fresh])
            logger.debug("contour at h=%g extended to |u| <= %g", self.height,
                         self.step * (count - 1))

    def samples(self, half_length):
        """(lambda, G) on the symmetric trapezoid nodes of [-U, U]."""
        count = int(math.ceil(half_length / self.step)) + 1
        self._extend(count)
        u = self.step * np.arange(count)
        values = self._values[:count]
        lam = np.concatenate([-u[:0:-1], u]) + 1j * self.height
        G = np.concatenate([np.conj(values[:0:-1]), values])
        return lam, G


@dataclass(frozen=True, eq=False)
class HankelSymbol:
    x: float
    t: float
    pole_terms: tuple = ()
    reflection: object = None
    analytic_part: ContourData = None

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be non-negative")

    @property
    def kappa_max(self):
        return max((kappa for kappa, _ in self.pole_terms), default=0.0)

    @property
    def pole_weights(self):
        """c_n xi(i kappa_n) = c_n exp(8 kappa_n^3 t - 2 kappa_n x)."""
        return tuple(c * math.exp(8.0 * kappa ** 3 * self.t - 2.0 * kappa * self.x)
                     for kappa, c in self.pole_terms)

    @property
    def is_zero(self):
        reflection = self.reflection is not None and np.any(self.reflection.R)
        return not (self.pole_terms or reflection or self.analytic_part is not None)


@dataclass(frozen=True, eq=False)
class KernelProfile:
    s_nodes: np.ndarray
    F_values: np.ndarray
    tail_bound: float
    kappa_min: float = 0.0
    imag_defect: float = 0.0


@dataclass(frozen=True, eq=False)
class HankelDiscretization:
    nodes: np.ndarray
    weights: np.ndarray
    M: np.ndarray
    L_s: float
    deriv_matrices: dict = field(default_factory=dict)
    imag_defect: float = 0.0
    tail_value: float = 0.0

    def matrix(self, order=(0, 0)):
        return self.M if tuple(order) == (0, 0) else self.deriv_matrices[tuple(order)]


@dataclass(frozen=True, eq=False)
class SingularValueReport:
    values: np.ndarray
    partial_sums: np.ndarray
    trace_norm: float
    rank: int
    decay_rate: float


def assemble_symbol(sd, x, t):
    """Symbol of the full-line data: pole terms and the reflection coefficient."""
    poles = tuple((b.kappa, b.c) for b in sd.bound_states)
    # data of a translated profile q(. - shift) describe u at x + shift
    return HankelSymbol(float(x) + sd.shift, float(t), poles, sd.coeffs)


def symbol_plus(sd_plus, x, t):
    """Symbol of the data of the right restriction q+."""
    return assemble_symbol(sd_plus, x, t)


def contour_symbol(contour, x, t, poles=()):
    """Symbol of the analytic part; the contour must pass above all poles."""
    top = max((abs(p) for p in poles), default=0.0)
    if contour.height <= top:
        raise ValueError(f"contour height {contour.height:g} must exceed the "
                         f"highest pole {top:g}")
    return HankelSymbol(float(x), float(t), analytic_part=contour)


def xi(lam, x, t):
    lam = np.asarray(lam, dtype=complex)
    return np.exp(1j * (8.0 * lam ** 3 * t + 2.0 * lam * x))


def _order_factor(lam, order):
    m, n = order
    return (2j * lam) ** m * (8j * lam ** 3) ** n


def _growth(k, orders):
    return np.maximum.reduce([np.abs(_order_factor(k, order)) for order in orders])


# Reflection integral on the real line.

def _reflection_spline(coeffs):
    """R on [0, inf) from the positive grid nodes; zero beyond k_max."""
    k = coeffs.k_nodes
    positive = k > 0
    k_pos, R_pos, T_pos = k[positive], coeffs.R[positive], coeffs.T[positive]
    generic = abs(T_pos[0]) < 0.1
    if generic:
        spline = interpolate.CubicSpline(np.concatenate([[0.0], k_pos]),
                                         np.concatenate([[-1.0 + 0j], R_pos]))
    else:
        spline = interpolate.CubicSpline(k_pos, R_pos)
    k_min, k_max = k_pos[0], k_pos[-1]

    def R(values):
        values = np.asarray(values, dtype=float)
        out = spline(np.clip(values, 0.0 if generic else k_min, k_max))
        return np.where(values > k_max, 0.0, out)

    return k_pos, R_pos, R


def _phase_gap(k, x, t, s_lo, s_hi):
    """min |d theta / dk| over s in [s_lo, s_hi] with theta = 8k^3 t + 2kx + ks,
    and the s where it is attained."""
    a = 24.0 * k ** 2 * t + 2.0 * x
    lo, hi = a + s_lo, a + s_hi
    inside = (lo <= 0) & (hi >= 0)
    gap = np.where(inside, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    where = np.where(inside, np.clip(-a, s_lo, s_hi),
                     np.where(np.abs(lo) < np.abs(hi), s_lo, s_hi))
    return gap, where


def _hotspots(x, t, s_lo, s_hi):
    """k intervals where the phase is stationary for some s."""
    if t <= 0:
        return ()
    upper = -2.0 * x - s_lo
    if upper <= 0:
        return ()
    lower = max(0.0, -2.0 * x - s_hi)
    return ((math.sqrt(lower / (24.0 * t)), math.sqrt(upper / (24.0 * t))),)


def _reflection_sum(symbol, s_lo, s_hi, orders, tol):
    """Nodes and weights of the reflection integral, plus noise terms
    (amplitude, offset, power, floor) bounding what the cut at K leaves in
    F(s) as amplitude / max(|offset + s|, floor) ** power."""
    coeffs = symbol.reflection
    floor = conf.get("REFLECTION_FLOOR")
    empty = np.empty(0, dtype=complex)
    if coeffs is None or not np.any(coeffs.R) or np.max(np.abs(coeffs.R)) < floor:
        return empty, empty, ()

    x, t = symbol.x, symbol.t
    k_pos, R_pos, R = _reflection_spline(coeffs)
    gap, where = _phase_gap(k_pos, x, t, s_lo, s_hi)
    # values below the floor are integration noise, not reflection
    size = np.where(np.abs(R_pos) < floor, 0.0, np.abs(R_pos)) * _growth(k_pos, orders)
    estimate = size / np.maximum(gap, 1.0 / k_pos)
    envelope = np.maximum.accumulate(estimate[::-1])[::-1]
    settled = np.flatnonzero(envelope <= tol)
    lam_t = base_t = empty
    if settled.size:
        K = float(k_pos[settled[0]])
        R_K = float(abs(R_pos[settled[0]]))
        noise = ((R_K / math.pi, 24.0 * K ** 2 * t + 2.0 * x, 1, 1.0 / K),) if R_K else ()
    else:
        K = float(k_pos[-1])
        tail = _reflection_tail(k_pos, R_pos, x, t, s_lo, s_hi, orders)
        if tail is None or tail[2] > tol:
            raise KernelError("reflection integral does not settle before k_max",
                              s=float(where[-1]),
                              estimate=float(estimate[-1] if tail is None else tail[2]))
        lam_t, base_t, _, noise = tail

    def slope(k):
        return 24.0 * k ** 2 * t + 2.0 * abs(x) + s_hi

    k, w = phase_panels(K, slope, conf.get("PANEL_ORDER"), conf.get("PANEL_SPAN"),
                        _hotspots(x, t, s_lo, s_hi), conf.get("HOTSPOT_REFINE"))
    values = w * R(k) / (2.0 * math.pi)
    lam = np.concatenate([-k[::-1], k, -np.conj(lam_t[::-1]), lam_t]).astype(complex)
    base = np.concatenate([np.conj(values[::-1]), values, np.conj(base_t[::-1]), base_t])
    logger.debug("reflection integral cut at K=%g with %d nodes (%d on the tail ray)",
                 K, lam.size, 2 * lam_t.size)
    return lam, base * xi(lam, x, t), noise


RAY = complex(math.cos(math.pi / 6), math.sin(math.pi / 6))


def _tail_model(k_pos, R_pos):
    """R(lambda) ~ R(K) (K / lambda)^2 exp(-i beta (lambda - K)) beyond the grid.

    beta is read off the last two nodes and kept only if it also fits the
    third-last one better than beta = 0. Returns beta and the derivative
    mismatch of the model at that node.
    """
    K, R_K = k_pos[-1], R_pos[-1]

    def model(k, beta):
        return R_K * (K / k) ** 2 * np.exp(-1j * beta * (k - K))

    beta = 0.0
    z_last, z_prev = R_K * K ** 2, R_pos[-2] * k_pos[-2] ** 2
    if z_last != 0 and z_prev != 0:
        beta = -float(np.angle(z_last / z_prev)) / (K - k_pos[-2])
    k0, R0 = k_pos[-3], R_pos[-3]
    fits = [(abs(R0 - model(k0, b)) / (K - k0), b) for b in (0.0, beta)]
    mismatch, beta = min(fits)
    return beta, float(mismatch)


def _reflection_tail(k_pos, R_pos, x, t, s_lo, s_hi, orders, order=16):
    """Nodes for the integral of the modelled R over k > K, taken along the
    ray K + rho exp(i pi / 6) where xi and exp(i lambda s) decay.

    Returns (lambda, base weights, error estimate, noise terms), or None
    when the integrand does not decay along the ray.
    """
    if k_pos.size < 3:
        return None
    K, R_K = float(k_pos[-1]), complex(R_pos[-1])
    beta, mismatch = _tail_model(k_pos, R_pos)
    # decay rate of |xi(lambda) exp(i lambda (s - beta))| at rho = 0
    rate = 12.0 * t * K ** 2 + x + 0.5 * (s_lo - beta)
    slope = 24.0 * t * K ** 2 + 2.0 * x - beta + s_lo
    if rate <= 0 or slope <= 0:
        return None
    error = mismatch * float(_growth(K, orders)) / slope ** 2

    length = 40.0 / rate
    fastest = rate + 0.5 * (s_hi - s_lo)
    levels = max(1, math.ceil(math.log2(max(fastest * length / 5.0, 1.0))) + 1)
    edges = [0.0] + [length * 2.0 ** -j for j in range(levels - 1, -1, -1)]
    rho, w = map(np.concatenate, zip(*(gauss_legendre(order, a, b)
                                       for a, b in zip(edges[:-1], edges[1:]))))
    lam = K + rho * RAY
    base = RAY * w * R_K * (K / lam) ** 2 * np.exp(-1j * beta * (lam - K)) / (2.0 * math.pi)
    noise = ((2.0 * mismatch, 24.0 * t * K ** 2 + 2.0 * x - beta, 2, 1.0 / K),)
    return lam, base, error, noise


# Analytic part on the shifted contour.

def _contour_extent(contour, x, t, s_lo, s_hi, orders, tol, distance=None):
    """Half-length U of the contour for a truncation error below tol.

    ``distance`` bounds 1 / |lambda - k| for the Cauchy integral of Phi.
    """
    h, step = contour.height, contour.step
    extra = 1.0 if distance is None else 1.0 / distance
    if t == 0 and x <= 0:
        raise ContourError("at t = 0 the contour integral only converges for x > 0",
                           required_length=math.inf)
    if t > 0:
        a = 24.0 * t * h
        scale = math.exp(8.0 * t * h ** 3 - 2.0 * h * x - h * s_lo) * extra / (2.0 * math.pi)
        U = math.sqrt(max(math.log(max(scale * math.sqrt(math.pi / a) / tol, 1.0)), 1.0) / a)
    else:
        a = 0.0
        omega = 2.0 * x + s_lo
        scale = math.exp(-h * omega) * extra / (2.0 * math.pi * omega)
        U = 10.0

    while True:
        if U > contour.max_length:
            raise ContourError("contour truncation bound not reached",
                               required_length=U)
        lam, G = contour.samples(U)
        if t > 0:
            size = float(np.max(np.abs(G), initial=0.0))
            bound = (scale * size * _growth(U + 1j * h, orders)
                     * math.sqrt(math.pi / a) * special.erfc(U * math.sqrt(a)))
        else:
            size = float(abs(G[0]) + abs(G[-1]))
            bound = scale * size * _growth(U + 1j * h, orders)
        if bound <= tol:
            break
        U *= 1.25 if t > 0 else 2.0

    frequency = 24.0 * t * U ** 2 + 2.0 * abs(x) + s_hi
    if frequency * step > math.pi:
        raise ContourError(f"contour step {step:g} too coarse for phase "
                           f"frequency {frequency:.3g}", required_length=U)
    return lam, G, bound


def _contour_sum(symbol, s_lo, s_hi, orders, tol):
    contour = symbol.analytic_part
    if contour is None:
        return np.empty(0, dtype=complex), np.empty(0, dtype=complex), ()
    lam, G, bound = _contour_extent(contour, symbol.x, symbol.t, s_lo, s_hi, orders, tol)
    weights = contour.step * G * xi(lam, symbol.x, symbol.t) / (2.0 * math.pi)
    return lam, weights, ((bound, 0.0, 0, 1.0),)


def phi_analytic(G_on_contour, h, x, t, k_eval, tol=None):
    """Phi(k) = -(1 / 2 pi i) int_{Im lambda = h} xi(lambda) G(lambda) / (lambda - k).

    ``G_on_contour`` is a ContourData at height h or a vectorised callable.
    Every k must lie below the contour.
    """
    tol = conf.get("PHI_TOL", tol)
    contour = G_on_contour
    if not isinstance(contour, ContourData):
        contour = ContourData(G_on_contour, h)
    elif contour.height != h:
        raise ValueError(f"contour sampled at height {contour.height:g}, not {h:g}")
    k_eval = np.atleast_1d(np.asarray(k_eval, dtype=complex))
    distance = h - float(np.max(k_eval.imag))
    if distance <= 0:
        raise ValueError("evaluation points must lie below the contour")

    lam, G, bound = _contour_extent(contour, x, t, 0.0, 0.0, [(0, 0)], tol, distance)
    weights = contour.step * xi(lam, x, t) * G
    values = np.empty(k_eval.shape, dtype=complex)
    for start in range(0, k_eval.size, 256):
        k = k_eval[start:start + 256]
        values[start:start + 256] = (weights[None, :] / (lam[None, :] - k[:, None])).sum(axis=1)
    logger.debug("Phi at %d points, contour |u| <= %g, tail bound %.2e",
                 k_eval.size, float(lam[-1].real), bound)
    return -values / (2j * math.pi)


# Exponential sums of a symbol.

@dataclass(frozen=True, eq=False)
class ExponentialSum:
    lam: np.ndarray
    weights: np.ndarray
    noise_terms: tuple = ()

    def __add__(self, other):
        return ExponentialSum(np.concatenate([self.lam, other.lam]),
                              np.concatenate([self.weights, other.weights]),
                              self.noise_terms + other.noise_terms)

    def shifted(self, dx=0.0, dt=0.0):
        """The same nodes with the symbol moved to (x + dx, t + dt).

        Noise terms keep describing the unshifted sum.
        """
        return ExponentialSum(self.lam, self.weights * xi(self.lam, dx, dt), self.noise_terms)

    def noise(self, s):
        """Bound on the error of F(s) left by cutting the integrals."""
        return float(sum(amplitude / max(abs(offset + s), floor) ** power
                         for amplitude, offset, power, floor in self.noise_terms))

    def values(self, s, order=(0, 0)):
        s = np.asarray(s, dtype=float)
        weights = self.weights * _order_factor(self.lam, order)
        total = np.zeros(s.shape, dtype=complex)
        for start in range(0, self.lam.size, CHUNK):
            part = slice(start, start + CHUNK)
            total += np.exp(1j * np.multiply.outer(s, self.lam[part])) @ weights[part]
        return total

    def gram(self, s, w, orders=((0, 0),)):
        """sqrt(w_i w_j) F^(order)(s_i + s_j) for every order, real and symmetric."""
        root = np.sqrt(w)
        out = {tuple(order): np.zeros((s.size, s.size), dtype=complex) for order in orders}
        for start in range(0, self.lam.size, CHUNK):
            part = slice(start, start + CHUNK)
            E = root[:, None] * np.exp(1j * np.outer(s, self.lam[part]))
            for order, matrix in out.items():
                matrix += (E * (self.weights[part] * _order_factor(self.lam[part], order))) @ E.T
        imag = 0.0
        for order, matrix in out.items():
            real, leak = _real(matrix, f"Nystrom matrix {order}")
            out[order] = 0.5 * (real + real.T)
            imag = max(imag, leak)
        return out, imag


def expansion(symbol, s_lo, s_hi, orders=((0, 0),), tol=None):
    """Exponential sum of the symbol, accurate for s in [s_lo, s_hi] and for
    the requested derivative orders."""
    tol = conf.get("KERNEL_TOL", tol)
    orders = list(orders)
    poles = np.array([1j * kappa for kappa, _ in symbol.pole_terms], dtype=complex)
    pole_base = np.array(symbol.pole_weights, dtype=complex)
    lam_r, base_r, noise_r = _reflection_sum(symbol, s_lo, s_hi, orders, tol)
    lam_c, base_c, noise_c = _contour_sum(symbol, s_lo, s_hi, orders, conf.get("PHI_TOL"))
    return ExponentialSum(np.concatenate([poles, lam_r, lam_c]),
                          np.concatenate([pole_base, base_r, base_c]),
                          noise_r + noise_c)


def _real(values, what, s=None):
    values = np.asarray(values)
    imag = float(np.max(np.abs(values.imag), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(values.real), initial=0.0)))
    if imag > conf.get("KERNEL_IMAG_TOL") * scale:
        raise KernelError(f"{what} has an imaginary part", s=s, estimate=imag)
    return values.real.copy(), imag


def kernel_profile(sym, s_nodes):
    """F(s) on s_nodes, real; the discarded imaginary part is recorded."""
    s_nodes = np.asarray(s_nodes, dtype=float)
    if s_nodes.size == 0 or np.any(s_nodes <= 0):
        raise ValueError("s nodes must be positive")
    series = expansion(sym, float(s_nodes.min()), float(s_nodes.max()))
    F, imag = _real(series.values(s_nodes), "kernel profile")
    kappa_min = min((kappa for kappa, _ in sym.pole_terms), default=0.0)
    if sym.pole_terms:
        tail = float(sum(sym.pole_weights))
    else:
        tail = float(np.max(np.abs(F[-min(8, F.size):])))
    return KernelProfile(s_nodes, F, tail, kappa_min, imag)


def default_length(symbol):
    """30 + 10 max(1, 4 kappa_max^3 t)."""
    return 30.0 + 10.0 * max(1.0, 4.0 * symbol.kappa_max ** 3 * symbol.t)


def nodes(L_s, n_quad=None):
    n_quad = conf.get("N_QUAD", n_quad)
    if n_quad < 8:
        raise ValueError("n_quad must be at least 8")
    return gauss_legendre(n_quad, 0.0, L_s)


def check_tail(series, L_s, tail_cut=None):
    """|F(2 L_s)|, which may exceed tail_cut only by the cut-off noise of F."""
    tail_cut = conf.get("TAIL_CUT", tail_cut)
    s = 2.0 * L_s
    tail = float(abs(series.values(np.array([s]))[0]))
    noise = series.noise(s)
    if tail > tail_cut + 2.0 * noise:
        raise TruncationError(f"kernel not negligible at 2 L_s = {s:g} "
                              f"(noise level {noise:.1e})",
                              value=tail, suggested_length=s)
    return tail


def discretize(series, L_s, n_quad=None, deriv_orders=(), tail_cut=None):
    """Nystrom discretization of an exponential sum on [0, L_s]."""
    s, w = nodes(L_s, n_quad)
    orders = [(0, 0)] + [tuple(o) for o in deriv_orders if tuple(o) != (0, 0)]
    matrices, imag = series.gram(s, w, orders)
    tail = check_tail(series, L_s, tail_cut)
    M = matrices.pop((0, 0))
    return HankelDiscretization(s, w, M, L_s, matrices, imag, tail)


def nystrom(source, L_s=None, n_quad=None, deriv_orders=(), tail_cut=None):
    """Gauss-Legendre Nystrom matrix sqrt(w_i w_j) F(s_i + s_j) on [0, L_s].

    ``source`` is a HankelSymbol or a vectorised kernel function F(s);
    derivative matrices need a symbol.
    """
    if L_s is None:
        if not isinstance(source, HankelSymbol):
            raise ValueError("L_s is required for a kernel function")
        L_s = default_length(source)

    if isinstance(source, HankelSymbol):
        s, _ = nodes(L_s, n_quad)
        orders = [(0, 0)] + [tuple(o) for o in deriv_orders]
        series = expansion(source, 2.0 * s[0], 2.0 * L_s, orders)
        return discretize(series, L_s, n_quad, deriv_orders, tail_cut)

    if any(tuple(o) != (0, 0) for o in deriv_orders):
        raise ValueError("derivative matrices need a Hankel symbol")
    s, w = nodes(L_s, n_quad)
    root = np.sqrt(w)
    M = np.outer(root, root) * np.asarray(source(s[:, None] + s[None, :]), dtype=float)
    M = 0.5 * (M + M.T)
    tail_cut = conf.get("TAIL_CUT", tail_cut)
    tail = float(abs(source(2.0 * L_s)))
    if tail > tail_cut:
        raise TruncationError(f"kernel not negligible at 2 L_s = {2.0 * L_s:g}",
                              value=tail, suggested_length=2.0 * L_s)
    return HankelDiscretization(s, w, M, L_s, {}, 0.0, tail)


def dump_matrix(path, matrix):
    """Little-endian int64 rows, cols, then row-major float64 entries."""
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    if matrix.ndim != 2:
        raise ValueError("only 2-D matrices can be dumped")
    with open(path, "wb") as handle:
        handle.write(np.asarray(matrix.shape, dtype="<i8").tobytes())
        handle.write(matrix.tobytes(order="C"))


def load_matrix(path):
    with open(path, "rb") as handle:
        rows, cols = np.frombuffer(handle.read(16), dtype="<i8")
        data = np.frombuffer(handle.read(), dtype="<f8")
    return data.reshape(int(rows), int(cols))


def singular_value_report(d):
    """Singular values of M, their partial sums and a geometric tail fit."""
    values = linalg.svdvals(d.M) if d.M.size else np.empty(0)
    partial = np.cumsum(values)
    top = float(values[0]) if values.size else 0.0
    significant = values[values > 1e-12 * max(top, 1e-300)] if top > 0 else values[:0]
    rate = math.nan
    if significant.size >= 4:
        tail = significant[significant.size // 2:]
        index = np.arange(significant.size // 2, significant.size)
        rate = float(math.exp(np.polyfit(index, np.log(tail), 1)[0]))
    rank = int(np.sum(values > 1e-12)) if values.size else 0
    return SingularValueReport(values, partial, float(partial[-1]) if values.size else 0.0,
                               rank, rate)


def symbol_split_check(sd, sd_plus, G, x, t, L_s=None, n_quad=None, height=None):
    """Spectral norm of M(phi) - M(phi+) - M(Phi) on a common grid."""
    full = assemble_symbol(sd, x, t)
    plus = symbol_plus(sd_plus, x, t)
    poles = [b.kappa for b in sd.bound_states] + [b.kappa for b in sd_plus.bound_states]
    if isinstance(G, ContourData):
        contour = G
    else:
        if height is None:
            height = max(poles, default=0.0) + conf.get("CONTOUR_OFFSET")
        contour = ContourData(G, height)
    analytic = contour_symbol(contour, x, t, poles)

    L_s = default_length(full) if L_s is None else L_s
    M = nystrom(full, L_s, n_quad).M
    M_plus = nystrom(plus, L_s, n_quad, tail_cut=math.inf).M
    M_phi = nystrom(analytic, L_s, n_quad, tail_cut=math.inf).M
    defect = float(linalg.norm(M - M_plus - M_phi, 2))
    logger.debug("symbol split at x=%g t=%g: defect %.3e", x, t, defect)
    return defect
