"""Validation of the sections of a run configuration.

One form per section. The forms only see strings, exactly as they were
written in the file; cleaning turns them into typed values.
"""

from django import forms
from django.core.exceptions import ValidationError

from .potential import FAMILY_PARAMETERS, Family


def positive(value):
    if value is not None and not value > 0:
        raise ValidationError("must be positive")


class FloatListField(forms.CharField):
    """Comma separated floats."""

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return ()
        try:
            return tuple(float(item) for item in value.split(","))
        except ValueError:
            raise ValidationError("expected comma separated numbers")


class ProbeListField(forms.CharField):
    """Comma separated x:t pairs."""

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return ()
        probes = []
        for item in value.split(","):
            try:
                x, t = item.split(":")
                probes.append((float(x), float(t)))
            except ValueError:
                raise ValidationError(f"expected x:t, got {item.strip()!r}")
        return tuple(probes)


class PotentialForm(forms.Form):
    family = forms.ChoiceField(choices=[(f.value, f.label) for f in Family
                                        if f != Family.COMPOSITE])
    depth = forms.FloatField(required=False)
    width = forms.FloatField(required=False, validators=[positive])
    center = forms.FloatField(required=False)
    left = forms.FloatField(required=False)
    right = forms.FloatField(required=False)
    amplitude = forms.FloatField(required=False)
    power = forms.FloatField(required=False, validators=[positive])
    frequency = forms.FloatField(required=False)
    cut = forms.FloatField(required=False, validators=[positive])
    path = forms.CharField(required=False)
    shift = forms.FloatField(required=False)
    truncate = forms.FloatField(required=False)

    def clean(self):
        data = super().clean()
        family = data.get("family")
        if family is None:
            return data
        if family == Family.SAMPLED:
            accepted, required = {"path"}, {"path"}
        else:
            parameters = FAMILY_PARAMETERS[Family(family)]
            accepted = set(parameters)
            required = {name for name, default in parameters.items() if default is None}
        for name in required:
            if data.get(name) in (None, ""):
                self.add_error(name, f"required for family {family}")
        for name, field in self.fields.items():
            if name in ("family", "shift", "truncate") or name in accepted:
                continue
            if data.get(name) not in (None, ""):
                self.add_error(name, f"not a parameter of family {family}")
        return data


class KGridForm(forms.Form):
    k_min = forms.FloatField(required=False, validators=[positive])
    k_max = forms.FloatField(required=False, validators=[positive])
    nodes = forms.IntegerField(required=False, min_value=2)
    scale = forms.FloatField(required=False, validators=[positive])

    def clean(self):
        data = super().clean()
        if data.get("nodes") is not None and data["nodes"] % 2:
            self.add_error("nodes", "must be even")
        k_min, k_max = data.get("k_min"), data.get("k_max")
        if k_min is not None and k_max is not None and k_min >= k_max:
            self.add_error("k_max", "must exceed k_min")
        return data


ROUTES = [("full", "Full-line symbol"), ("split", "Right restriction plus analytic part")]
METHODS = [("trace_formula", "Trace formula"), ("finite_difference", "Finite differences"),
           ("cross_check", "Both, cross-checked")]

# Tolerance keys of the discretization section and the SOLVER entries they set.
TOLERANCES = {
    "coeff_tol": "COEFF_TOL",
    "split_tol": "SPLIT_TOL",
    "rep_tol": "REP_TOL",
    "kernel_tol": "KERNEL_TOL",
    "kernel_imag_tol": "KERNEL_IMAG_TOL",
    "phi_tol": "PHI_TOL",
    "tail_cut": "TAIL_CUT",
    "cross_tol": "CROSS_TOL",
    "block_tol": "BLOCK_TOL",
    "psd_tol": "PSD_TOL",
    "kappa_tol": "KAPPA_TOL",
    "tail_tol": "TAIL_TOL",
    "ode_rtol": "ODE_RTOL",
    "ode_atol": "ODE_ATOL",
}


class DiscretizationForm(forms.Form):
    L_s = forms.FloatField(required=False, validators=[positive])
    n_quad = forms.IntegerField(required=False, min_value=8)
    fd_step = forms.FloatField(required=False, validators=[positive])
    route = forms.ChoiceField(required=False, choices=ROUTES)
    method = forms.ChoiceField(required=False, choices=METHODS)
    contour_height = forms.FloatField(required=False, validators=[positive])


for _name in TOLERANCES:
    DiscretizationForm.base_fields[_name] = forms.FloatField(required=False,
                                                             validators=[positive])


class ExperimentForm(forms.Form):
    x_min = forms.FloatField(required=False)
    x_max = forms.FloatField(required=False)
    x_count = forms.IntegerField(required=False, min_value=1)
    t_min = forms.FloatField(required=False, min_value=0.0)
    t_max = forms.FloatField(required=False, min_value=0.0)
    t_count = forms.IntegerField(required=False, min_value=1)
    residual_bound = forms.FloatField(required=False, validators=[positive])
    b_list = FloatListField(required=False)
    probes = ProbeListField(required=False)
    domain = FloatListField(required=False)
    n_modes = forms.IntegerField(required=False, min_value=16)
    dt = forms.FloatField(required=False, validators=[positive])
    compare_bound = forms.FloatField(required=False, validators=[positive])
    workers = forms.IntegerField(required=False)

    def clean(self):
        data = super().clean()
        for axis in ("x", "t"):
            lo, hi = data.get(f"{axis}_min"), data.get(f"{axis}_max")
            if lo is not None and hi is not None and hi < lo:
                self.add_error(f"{axis}_max", f"must not be below {axis}_min")
        b_list = data.get("b_list") or ()
        if any(b2 >= b1 for b1, b2 in zip(b_list, b_list[1:])):
            self.add_error("b_list", "must be strictly decreasing")
        domain = data.get("domain") or ()
        if domain and (len(domain) != 2 or domain[1] <= domain[0]):
            self.add_error("domain", "expected two increasing numbers a, b")
        if data.get("workers") == 0:
            self.add_error("workers", "must be nonzero")
        return data


class OutputForm(forms.Form):
    directory = forms.CharField(required=False)
    cache = forms.BooleanField(required=False)
    dump_matrix = forms.BooleanField(required=False)


SECTION_FORMS = {
    "potential": PotentialForm,
    "kgrid": KGridForm,
    "discretization": DiscretizationForm,
    "experiment": ExperimentForm,
    "output": OutputForm,
}
