"""Run configurations: INI-style files validated section by section.

    [potential]
    family = sech_well
    depth = -2

    [potential:bump]          # summed with the profile above
    family = gaussian_well
    depth = -1
    center = 4

    [discretization]
    n_quad = 96
    coeff_tol = 1e-8

Unknown sections and keys are rejected. Errors name the section, the
field and the line they come from.
"""

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import conf
from . import potential as profiles
from .determinant import Discretization
from .exceptions import ConfigurationError
from .forms import SECTION_FORMS, TOLERANCES
from .scattering import default_k_grid

logger = logging.getLogger(__name__)

EXPERIMENT_DEFAULTS = {
    "x_min": -10.0,
    "x_max": 10.0,
    "x_count": 41,
    "t_min": 0.0,
    "t_max": 0.0,
    "t_count": 1,
    "residual_bound": 1e-3,
    "b_list": (),
    "probes": (),
    "domain": (-40.0, 40.0),
    "n_modes": 1024,
    "dt": 1e-4,
    "compare_bound": 1e-3,
    "workers": 1,
}


@dataclass
class Entry:
    value: str
    line: int


@dataclass
class Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)

    def line_of(self, key):
        entry = self.entries.get(key)
        return entry.line if entry else self.line


def read_sections(text, source="<config>"):
    """Split INI text into sections of (value, line) entries."""
    sections = {}
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigurationError(f"{source}: malformed section header",
                                         line=number)
            name = line[1:-1].strip()
            if name in sections:
                raise ConfigurationError(f"{source}: duplicate section", section=name,
                                         line=number)
            current = sections[name] = Section(name, number)
            continue
        if current is None:
            raise ConfigurationError(f"{source}: key outside of a section", line=number)
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise ConfigurationError(f"{source}: expected 'key = value'",
                                     section=current.name, line=number)
        if key in current.entries:
            raise ConfigurationError(f"{source}: duplicate key", section=current.name,
                                     field=key, line=number)
        current.entries[key] = Entry(value.strip(), number)
    return sections


def _form_kind(name):
    kind = name.split(":", 1)[0].strip()
    if kind not in SECTION_FORMS:
        return None
    if kind != "potential" and kind != name:
        return None
    return kind


def clean_section(section, source="<config>"):
    """Typed values of a section; None for keys that were left out."""
    kind = _form_kind(section.name)
    if kind is None:
        raise ConfigurationError(f"{source}: unknown section", section=section.name,
                                 line=section.line)
    form_class = SECTION_FORMS[kind]
    # keys are read case-insensitively
    names = {name.lower(): name for name in form_class.base_fields}
    unknown = sorted(set(section.entries) - set(names))
    if unknown:
        key = unknown[0]
        raise ConfigurationError(f"{source}: unknown key", section=section.name,
                                 field=key, line=section.line_of(key))
    form = form_class(data={names[k]: e.value for k, e in section.entries.items()})
    if not form.is_valid():
        key, messages = next(iter(form.errors.items()))
        if key == "__all__":
            raise ConfigurationError(f"{source}: {messages[0]}", section=section.name,
                                     line=section.line)
        raise ConfigurationError(f"{source}: {messages[0]}", section=section.name,
                                 field=key, line=section.line_of(key.lower()))
    return {key: value for key, value in form.cleaned_data.items()
            if key.lower() in section.entries}


def _build_potential(values, base_dir):
    kind = values.pop("family")
    shift = values.pop("shift", None)
    cut = values.pop("truncate", None)
    if kind == profiles.Family.SAMPLED:
        path = values["path"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        q = profiles.load_sampled(path)
    else:
        q = profiles.family(kind, **values)
    if shift:
        q = profiles.shifted(q, shift)
    if cut is not None:
        q = profiles.truncate_left(q, cut)
    return q


@dataclass
class RunConfig:
    """A validated run configuration."""

    potential: profiles.Potential
    kgrid: dict = field(default_factory=dict)
    discretization: Discretization = field(default_factory=Discretization)
    route: str = "full"
    method: str = "trace_formula"
    contour_height: float = None
    tolerances: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=lambda: dict(EXPERIMENT_DEFAULTS))
    directory: str = None
    cache: bool = True
    dump_matrix: bool = False
    source: str = "<config>"
    lines: dict = field(default_factory=dict)

    def k_nodes(self):
        return default_k_grid(self.kgrid.get("k_min"), self.kgrid.get("k_max"),
                              self.kgrid.get("nodes"), self.kgrid.get("scale"))

    def grid_spec(self):
        """Resolved k-grid parameters (part of the cache key)."""
        return {"k_min": conf.get("K_MIN", self.kgrid.get("k_min")),
                "k_max": conf.get("K_MAX", self.kgrid.get("k_max")),
                "nodes": conf.get("K_NODES", self.kgrid.get("nodes")),
                "scale": conf.get("K_SCALE", self.kgrid.get("scale"))}

    def x_grid(self):
        e = self.experiment
        return np.linspace(e["x_min"], e["x_max"], e["x_count"])

    def t_grid(self):
        e = self.experiment
        return np.linspace(e["t_min"], e["t_max"], e["t_count"])

    def fail(self, message, section, key):
        """ConfigurationError pointing at the key's line in the file."""
        return ConfigurationError(f"{self.source}: {message}", section=section,
                                  field=key, line=self.lines.get((section, key)))

    def describe(self):
        return {
            "config": self.source,
            "potential": self.potential.description,
            "potential_hash": self.potential.digest(),
            "kgrid": self.grid_spec(),
            "discretization": self.discretization.describe(),
            "route": self.route,
            "method": self.method,
            "tolerances": self.tolerances,
        }


def parse(text, source="<config>", base_dir="."):
    sections = read_sections(text, source)
    cleaned = {name: clean_section(section, source) for name, section in sections.items()}
    lines = {(name, key): entry.line for name, section in sections.items()
             for key, entry in section.entries.items()}

    parts = []
    for name, values in cleaned.items():
        if _form_kind(name) != "potential":
            continue
        try:
            parts.append(_build_potential(dict(values), base_dir))
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"{source}: {e}", section=name,
                                     line=sections[name].line)
    if not parts:
        raise ConfigurationError(f"{source}: a [potential] section is required")
    q = parts[0] if len(parts) == 1 else profiles.composite(*parts)

    discretization = cleaned.get("discretization", {})
    tolerances = {TOLERANCES[key]: value for key, value in discretization.items()
                  if key in TOLERANCES}
    disc = Discretization(L_s=discretization.get("L_s"),
                          n_quad=discretization.get("n_quad"),
                          fd_step=discretization.get("fd_step"),
                          tail_cut=discretization.get("tail_cut"))

    experiment = dict(EXPERIMENT_DEFAULTS)
    experiment.update(cleaned.get("experiment", {}))
    output = cleaned.get("output", {})
    config = RunConfig(
        potential=q,
        kgrid=cleaned.get("kgrid", {}),
        discretization=disc,
        route=discretization.get("route") or "full",
        method=discretization.get("method") or "trace_formula",
        contour_height=discretization.get("contour_height"),
        tolerances=tolerances,
        experiment=experiment,
        directory=output.get("directory"),
        cache=output.get("cache", True),
        dump_matrix=bool(output.get("dump_matrix", False)),
        source=source,
        lines=lines,
    )
    if experiment["x_min"] > experiment["x_max"]:
        raise config.fail("x_max must not be below x_min", "experiment", "x_max")
    if experiment["t_min"] > experiment["t_max"]:
        raise config.fail("t_max must not be below t_min", "experiment", "t_max")
    try:
        config.k_nodes()
    except ValueError as e:
        raise config.fail(str(e), "kgrid", "k_max")
    logger.debug("configuration %s: %s", source, q.description)
    return config


def load(path):
    """Parse the configuration file at ``path``."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigurationError(f"cannot read configuration {path}: {e.strerror}")
    return parse(text, source=path, base_dir=os.path.dirname(os.path.abspath(path)))


def steps_of(value, step):
    """Number of whole steps in value, or None when it is not a multiple."""
    count = round(value / step)
    if not math.isclose(count * step, value, rel_tol=1e-9, abs_tol=1e-12):
        return None
    return int(count)
