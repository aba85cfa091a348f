"""CSV export of result tables.

Each table is a django-import-export Resource over simple row objects.
Files start with '#' metadata lines; floats carry 17 significant digits
so that reruns are byte-identical. A JSON sidecar holds the run metadata.
"""

import json
import logging
import math
from types import SimpleNamespace

import numpy as np
import tablib
from import_export import fields, resources, widgets

logger = logging.getLogger(__name__)


class FloatWidget(widgets.Widget):
    """Round-trip float formatting."""

    def render(self, value, obj=None, **kwargs):
        if value is None:
            return ""
        value = float(value)
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"


def number(name):
    return fields.Field(attribute=name, column_name=name, widget=FloatWidget())


class SolutionResource(resources.Resource):
    x = number("x")
    t = number("t")
    u = number("u")
    logdet = number("logdet")
    residual = number("residual")

    class Meta:
        fields = ("x", "t", "u", "logdet", "residual")
        export_order = fields

    @staticmethod
    def rows(field):
        return [SimpleNamespace(x=x, t=t, u=u, logdet=logdet, residual=residual)
                for x, t, u, logdet, residual in field.rows()]


class ConvergenceResource(resources.Resource):
    b = number("b")
    x = number("x")
    t = number("t")
    u = number("u")
    delta = number("delta")

    class Meta:
        fields = ("b", "x", "t", "u", "delta")
        export_order = fields

    @staticmethod
    def rows(table):
        """One row per (b, probe); delta is u_b minus u at the previous b."""
        result = []
        for i, b in enumerate(table.b_values):
            for j, (x, t) in enumerate(table.probes):
                delta = table.deltas[i - 1, j] if i > 0 else math.nan
                result.append(SimpleNamespace(b=b, x=x, t=t, u=table.u_b[i, j], delta=delta))
        return result


class ComparisonResource(resources.Resource):
    x = number("x")
    t = number("t")
    u_determinant = number("u_determinant")
    u_oracle = number("u_oracle")
    difference = number("difference")

    class Meta:
        fields = ("x", "t", "u_determinant", "u_oracle", "difference")
        export_order = fields

    @staticmethod
    def rows(x, t, u_determinant, u_oracle):
        return [SimpleNamespace(x=xi, t=t, u_determinant=a, u_oracle=b, difference=a - b)
                for xi, a, b in zip(x, u_determinant, u_oracle)]


class CoefficientResource(resources.Resource):
    k = number("k")
    R_re = number("R_re")
    R_im = number("R_im")
    T_re = number("T_re")
    T_im = number("T_im")
    L_re = number("L_re")
    L_im = number("L_im")

    class Meta:
        fields = ("k", "R_re", "R_im", "T_re", "T_im", "L_re", "L_im")
        export_order = fields

    @staticmethod
    def rows(coeffs):
        return [SimpleNamespace(k=k, R_re=R.real, R_im=R.imag, T_re=T.real, T_im=T.imag,
                                L_re=L.real, L_im=L.imag)
                for k, R, T, L in zip(coeffs.k_nodes, coeffs.R, coeffs.T, coeffs.L)]


class BoundStateResource(resources.Resource):
    kappa = number("kappa")
    c = number("c")
    energy = number("energy")

    class Meta:
        fields = ("kappa", "c", "energy")
        export_order = fields

    @staticmethod
    def rows(states):
        return [SimpleNamespace(kappa=b.kappa, c=b.c, energy=-b.kappa ** 2) for b in states]


def _header(meta):
    lines = []
    for key, value in meta.items():
        if isinstance(value, (dict, list, tuple)):
            value = json.dumps(_plain(value), sort_keys=True)
        lines.append(f"# {key}: {value}")
    return "\n".join(lines) + ("\n" if lines else "")


def _plain(value):
    """JSON-compatible copy (numpy scalars and arrays become Python values)."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_table(path, resource, rows, meta=None):
    """Export rows through the resource to CSV with a metadata header."""
    dataset = resource.export(rows)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(_header(meta or {}))
        handle.write(dataset.csv)
    logger.debug("wrote %d rows to %s", len(rows), path)
    return path


def write_sidecar(path, meta):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_plain(meta), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def read_table(path):
    """(metadata lines, header, rows of floats) of a CSV written by write_table."""
    with open(path, encoding="utf-8", newline="") as handle:
        lines = handle.read().splitlines(keepends=True)
    comments = [line[1:].strip() for line in lines if line.startswith("#")]
    body = "".join(line for line in lines if not line.startswith("#"))
    dataset = tablib.Dataset().load(body, format="csv")
    rows = [[float(v) if v not in ("", None) else math.nan for v in row] for row in dataset]
    return comments, list(dataset.headers), np.array(rows, dtype=float)
