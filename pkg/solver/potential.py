"""Initial profiles q(x), their truncations and restrictions, and the
admissibility conditions on them.

A profile vanishes identically outside its open support interval. The
support may be unbounded on either side; the family formula is only
evaluated inside it.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from django.db.models import TextChoices
from scipy import integrate

from . import conf
from .exceptions import QuadratureError, TailError

logger = logging.getLogger(__name__)

INF = math.inf


class Family(TextChoices):
    ZERO = "zero", "Zero profile"
    SECH_WELL = "sech_well", "depth * sech^2((x - center) / width)"
    SQUARE_WELL = "square_well", "depth on (left, right)"
    GAUSSIAN_WELL = "gaussian_well", "depth * exp(-((x - center) / width)^2)"
    POWER_TAIL = "power_tail", "amplitude * (1 + x)^(-power) for x > 0"
    LEFT_OSCILLATORY = "left_oscillatory", "bounded oscillation on x < -1, smoothly cut"
    SAMPLED = "sampled", "linear interpolation of (x, q) samples"
    COMPOSITE = "composite", "sum of profiles"


# Parameters each family accepts, with defaults (None = required).
FAMILY_PARAMETERS = {
    Family.ZERO: {},
    Family.SECH_WELL: {"depth": None, "width": 1.0, "center": 0.0},
    Family.SQUARE_WELL: {"depth": None, "left": None, "right": None},
    Family.GAUSSIAN_WELL: {"depth": None, "width": 1.0, "center": 0.0},
    Family.POWER_TAIL: {"amplitude": None, "power": None},
    Family.LEFT_OSCILLATORY: {"amplitude": None, "frequency": 1.0, "cut": 1.0},
}


def _smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Potential:
    kind: str
    params: tuple = ()
    support: tuple = (-INF, INF)
    description: str = ""
    shift: float = 0.0
    samples: tuple = field(default=(), repr=False)
    components: tuple = ()

    def __post_init__(self):
        if self.kind == Family.SAMPLED:
            xs = np.asarray(self.samples[0], dtype=float)
            if xs.size < 2 or np.any(np.diff(xs) <= 0):
                raise ValueError("sampled profile needs strictly increasing abscissae")

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def parameters(self):
        return dict(self.params)

    @property
    def is_zero(self):
        lo, hi = self.support
        if lo >= hi or self.kind == Family.ZERO:
            return True
        if self.kind == Family.COMPOSITE:
            return all(c.is_zero for c in self.components)
        return False

    @property
    def breakpoints(self):
        """Points where q may be discontinuous, inside the closed support."""
        lo, hi = self.support
        points = {p for p in (lo, hi) if math.isfinite(p)}
        p = self.parameters
        if self.kind == Family.SQUARE_WELL:
            points.update((p["left"] + self.shift, p["right"] + self.shift))
        elif self.kind == Family.POWER_TAIL:
            points.add(self.shift)
        elif self.kind == Family.SAMPLED:
            points.update((self.samples[0][0] + self.shift,
                           self.samples[0][-1] + self.shift))
        elif self.kind == Family.COMPOSITE:
            for c in self.components:
                points.update(b + self.shift for b in c.breakpoints)
        return tuple(sorted(b for b in points if lo <= b <= hi))

    def raw(self, x):
        """Family formula without the support mask."""
        x = np.asarray(x, dtype=float) - self.shift
        p = self.parameters
        if self.kind == Family.ZERO:
            return np.zeros_like(x)
        if self.kind == Family.SECH_WELL:
            return p["depth"] / np.cosh((x - p["center"]) / p["width"]) ** 2
        if self.kind == Family.SQUARE_WELL:
            inside = (x > p["left"]) & (x < p["right"])
            return np.where(inside, p["depth"], 0.0)
        if self.kind == Family.GAUSSIAN_WELL:
            return p["depth"] * np.exp(-((x - p["center"]) / p["width"]) ** 2)
        if self.kind == Family.POWER_TAIL:
            with np.errstate(invalid="ignore", divide="ignore"):
                value = p["amplitude"] * np.abs(1.0 + x) ** (-p["power"])
            return np.where(x > 0, value, 0.0)
        if self.kind == Family.LEFT_OSCILLATORY:
            window = _smooth_step((-1.0 - x) / p["cut"])
            return p["amplitude"] * 0.5 * (1.0 + np.cos(p["frequency"] * x)) * window
        if self.kind == Family.SAMPLED:
            xs, qs = self.samples
            return np.interp(x, xs, qs, left=0.0, right=0.0)
        if self.kind == Family.COMPOSITE:
            total = np.zeros_like(x)
            for c in self.components:
                total = total + evaluate(c, x)
            return total
        raise ValueError(f"unknown potential family {self.kind!r}")

    def spec(self):
        """Canonical, JSON-serialisable description (cache keys, sidecars)."""
        document = {
            "kind": str(self.kind),
            "params": {key: value for key, value in self.params},
            "support": [_encode_bound(b) for b in self.support],
            "shift": self.shift,
        }
        if self.kind == Family.SAMPLED:
            digest = hashlib.sha256()
            for column in self.samples:
                digest.update(np.asarray(column, dtype="<f8").tobytes())
            document["samples"] = digest.hexdigest()
        if self.components:
            document["components"] = [c.spec() for c in self.components]
        return document

    def digest(self):
        text = json.dumps(self.spec(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _encode_bound(value):
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    return value


# Constructors.

def zero():
    return Potential(Family.ZERO, support=(0.0, 0.0), description="zero")


def family(kind, **params):
    """Build a built-in family profile from its parameters."""
    kind = Family(kind)
    if kind == Family.ZERO:
        return zero()
    accepted = FAMILY_PARAMETERS[kind]
    unknown = set(params) - set(accepted)
    if unknown:
        raise ValueError(f"unknown parameters for {kind.value}: {sorted(unknown)}")
    values = {}
    for name, default in accepted.items():
        value = params.get(name, default)
        if value is None:
            raise ValueError(f"{kind.value} needs parameter {name!r}")
        values[name] = float(value)

    support = (-INF, INF)
    if kind == Family.SQUARE_WELL:
        if values["right"] <= values["left"]:
            raise ValueError("square well needs left < right")
        support = (values["left"], values["right"])
    elif kind in (Family.SECH_WELL, Family.GAUSSIAN_WELL):
        if values["width"] <= 0:
            raise ValueError("width must be positive")
    elif kind == Family.POWER_TAIL:
        support = (0.0, INF)
    elif kind == Family.LEFT_OSCILLATORY:
        if values["cut"] <= 0:
            raise ValueError("cut must be positive")
        support = (-INF, -1.0)

    label = ", ".join(f"{key}={value:g}" for key, value in values.items())
    return Potential(kind, params=tuple(values.items()), support=support,
                     description=f"{kind.value}({label})")


def sech_well(depth, width=1.0, center=0.0):
    return family(Family.SECH_WELL, depth=depth, width=width, center=center)


def square_well(depth, left, right):
    return family(Family.SQUARE_WELL, depth=depth, left=left, right=right)


def gaussian_well(depth, width=1.0, center=0.0):
    return family(Family.GAUSSIAN_WELL, depth=depth, width=width, center=center)


def power_tail(amplitude, power):
    return family(Family.POWER_TAIL, amplitude=amplitude, power=power)


def left_oscillatory(amplitude, frequency=1.0, cut=1.0):
    return family(Family.LEFT_OSCILLATORY, amplitude=amplitude,
                  frequency=frequency, cut=cut)


def sampled(xs, qs, description="sampled"):
    xs = np.asarray(xs, dtype=float)
    qs = np.asarray(qs, dtype=float)
    if xs.shape != qs.shape or xs.ndim != 1:
        raise ValueError("sampled profile needs two columns of equal length")
    return Potential(Family.SAMPLED, support=(float(xs[0]), float(xs[-1])),
                     description=description,
                     samples=(tuple(xs.tolist()), tuple(qs.tolist())))


def load_sampled(path):
    """Read a two-column (x, q) text file with '#' comments."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
    return sampled(data[:, 0], data[:, 1], description=f"sampled({path})")


def composite(*components, description=None):
    components = tuple(c for c in components if not c.is_zero)
    if not components:
        return zero()
    if len(components) == 1:
        return components[0]
    lo = min(c.support[0] for c in components)
    hi = max(c.support[1] for c in components)
    text = description or " + ".join(c.description for c in components)
    return Potential(Family.COMPOSITE, support=(lo, hi), description=text,
                     components=components)


# Operations.

def evaluate(q, x):
    """q(x), exactly 0 outside the support. Accepts scalars or arrays."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    lo, hi = q.support
    if q.kind == Family.ZERO or lo >= hi:
        values = np.zeros_like(x)
    else:
        inside = (x > lo) & (x < hi)
        values = np.where(inside, q.raw(x), 0.0)
    return float(values) if scalar else values


def truncate_left(q, b):
    """Profile equal to q on (b, inf) and 0 on (-inf, b]."""
    lo, hi = q.support
    if q.is_zero or b >= hi:
        return zero()
    return replace(q, support=(max(lo, float(b)), hi),
                   description=f"{q.description} | x > {b:g}")


def restrict(q, side):
    """q+ = q on (0, inf) or q- = q on (-inf, 0)."""
    lo, hi = q.support
    if side == "right":
        if q.is_zero or hi <= 0:
            return zero()
        return replace(q, support=(max(lo, 0.0), hi),
                       description=f"{q.description} | x > 0")
    if side == "left":
        if q.is_zero or lo >= 0:
            return zero()
        return replace(q, support=(lo, min(hi, 0.0)),
                       description=f"{q.description} | x < 0")
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def shifted(q, offset):
    """The translate q(. - offset)."""
    if q.is_zero:
        return q
    lo, hi = q.support
    return replace(q, support=(lo + offset, hi + offset), shift=q.shift + offset,
                   description=f"{q.description} shifted by {offset:g}")


@dataclass(frozen=True)
class AdmissibilityReport:
    lower_bound_sup: float
    weighted_norm: float
    N: float
    passes: tuple


def _pieces(q, a, b):
    """Split [a, b] at the breakpoints of q."""
    cuts = [a] + [p for p in q.breakpoints if a < p < b] + [b]
    return list(zip(cuts[:-1], cuts[1:]))


def _quad(func, a, b, tol, label):
    result = integrate.quad(func, a, b, epsabs=tol, epsrel=tol, limit=500,
                            full_output=1)
    value, error = result[0], result[1]
    if len(result) > 3:
        raise QuadratureError(f"{label} did not converge on [{a}, {b}]: {result[3]}",
                              partial_value=value)
    if not math.isfinite(value):
        raise QuadratureError(f"{label} is not finite on [{a}, {b}]",
                              partial_value=value)
    return value, error


def weighted_norm(q, N, a, tol=1e-11):
    """Integral of (1 + |x|)^N |q(x)| over (a, inf)."""
    lo, hi = q.support
    start, stop = max(a, lo), hi
    if q.is_zero or start >= stop:
        return 0.0

    def integrand(x):
        return (1.0 + abs(x)) ** N * abs(evaluate(q, x))

    total = 0.0
    for left, right in _pieces(q, start, stop):
        if math.isinf(left):
            raise QuadratureError("weighted norm needs a finite left endpoint",
                                  partial_value=total)
        if math.isinf(right):
            # the far tail is handled separately so quad sees a finite piece
            middle = left + 50.0
            value, _ = _quad(integrand, left, middle, tol, "weighted norm")
            total += value
            try:
                value, _ = _quad(integrand, middle, INF, tol, "weighted norm")
            except QuadratureError as e:
                raise QuadratureError(str(e), partial_value=total + (e.partial_value or 0.0))
            total += value
        else:
            value, _ = _quad(integrand, left, right, tol, "weighted norm")
            total += value
    return total


def lower_bound_sup(q, scan_window, step=0.01, resolution=1e-3):
    """max over unit intervals I in scan_window of the integral of max(-q, 0).

    Left endpoints run on a grid of the given step; the supremum over all
    unit intervals is approximated by this scan.
    """
    w0, w1 = scan_window
    if w1 - w0 < 1.0:
        raise ValueError("scan window shorter than a unit interval")
    n = int(round((w1 - w0) / resolution))
    xs = np.linspace(w0, w1, n + 1)
    negative = np.maximum(-evaluate(q, xs), 0.0)
    cumulative = integrate.cumulative_trapezoid(negative, xs, initial=0.0)
    lefts = np.arange(w0, w1 - 1.0 + 0.5 * step, step)
    masses = np.interp(lefts + 1.0, xs, cumulative) - np.interp(lefts, xs, cumulative)
    return float(max(masses.max(), 0.0))


def check_admissibility(q, N, scan_window, a):
    """Evaluate both admissibility conditions for q."""
    if N < 0:
        raise ValueError("N must be non-negative")
    sup = lower_bound_sup(q, scan_window)
    norm = weighted_norm(q, N, a)
    passes = (math.isfinite(sup), math.isfinite(norm) and N >= 2.5)
    logger.debug("admissibility of %s: sup=%.6g norm=%.6g N=%g", q.description,
                 sup, norm, N)
    return AdmissibilityReport(lower_bound_sup=sup, weighted_norm=norm, N=N,
                               passes=passes)


def tail_start(q, side, tol=None):
    """Point beyond which the (1 + |x|)-weighted tail of q is below tol.

    For bounded support this is the support end itself.
    """
    tol = conf.get("TAIL_TOL", tol)
    limit = conf.get("TAIL_SEARCH_MAX")
    lo, hi = q.support
    if q.is_zero:
        return 0.0
    end = hi if side == "right" else lo
    if math.isfinite(end):
        return float(end)

    other = lo if side == "right" else hi
    anchor = other if math.isfinite(other) else 0.0
    for c in q.components or (q,):
        anchor = _anchor(c, anchor, side)

    def weighted(x):
        return (1.0 + abs(x)) * abs(evaluate(q, x))

    offset = 1.0
    while offset <= limit:
        x = anchor + offset if side == "right" else anchor - offset
        bounds = (x, INF) if side == "right" else (-INF, x)
        tail, _ = integrate.quad(weighted, *bounds, limit=200)
        if tail < tol:
            return float(x)
        offset += 1.0 if offset < 64 else offset
    raise TailError(f"weighted {side} tail of {q.description} stays above {tol:g}",
                    required_x=anchor + limit if side == "right" else anchor - limit)


def _anchor(q, current, side):
    p = q.parameters
    center = p.get("center")
    if center is None:
        return current
    center = center + q.shift
    return max(current, center) if side == "right" else min(current, center)


def computational_interval(q, tol=None):
    """Finite interval outside which q is negligible for the Jost integration."""
    return tail_start(q, "left", tol), tail_start(q, "right", tol)
