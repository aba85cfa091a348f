import json

from solver.management.base import SolverCommand
from solver.resources import (BoundStateResource, CoefficientResource, write_sidecar,
                              write_table)
from solver.scattering import split_reflection


class Command(SolverCommand):
    help = ("Usage: python manage.py scatter --config <path> [--out <dir>]\n"
            "\n"
            "Compute the scattering data of the configured profile, store them in "
            "the cache and as scattering.json, write coefficients.csv and "
            "bound_states.csv and report unitarity, symmetry and the reflection "
            "split defect.")

    def run(self, config):
        q = config.potential
        self.log(f"Scattering data of {q.description} ...", format="bold")
        data = self.scattering(config, q)
        coeffs = data.coeffs

        with open(self.path("scattering.json"), "w", encoding="utf-8") as handle:
            json.dump(data.to_document(), handle, sort_keys=True)
            handle.write("\n")

        report = {
            "unitarity_defect": coeffs.unitarity_defect(),
            "symmetry_defect": coeffs.symmetry_defect(),
            "bound_states": [{"kappa": b.kappa, "c": b.c} for b in data.bound_states],
            "shift": data.shift,
        }
        self.log(f"unitarity defect  max | |R|^2 + |T|^2 - 1 | = {report['unitarity_defect']:.3e}")
        self.log(f"symmetry defect   max |R(-k) - conj R(k)|   = {report['symmetry_defect']:.3e}")
        if data.bound_states:
            for n, b in enumerate(data.bound_states, start=1):
                self.log(f"bound state {n}: kappa = {b.kappa:.6f}, c = {b.c:.6g}")
        else:
            self.log("no bound states")

        split = split_reflection(q, coeffs.k_nodes)
        report["split_defect"] = split.defect
        self.log(f"split defect      max |R - R+ - G|          = {split.defect:.3e}")

        meta = dict(config.describe(), **report)
        write_table(self.path("coefficients.csv"), CoefficientResource(),
                    CoefficientResource.rows(coeffs), {"potential": q.description,
                                                       "potential_hash": q.digest()})
        write_table(self.path("bound_states.csv"), BoundStateResource(),
                    BoundStateResource.rows(data.bound_states),
                    {"potential": q.description})
        write_sidecar(self.path("scatter.json"), meta)
        self.log(f"Results written to {self.out}", format="blue")
