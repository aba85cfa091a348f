import numpy as np
from django.core.management.base import CommandError

from solver.config import steps_of
from solver.determinant import u_field
from solver.management.base import SolverCommand
from solver.oracles import split_step_kdv
from solver.resources import ComparisonResource, write_sidecar, write_table


class Command(SolverCommand):
    help = ("Usage: python manage.py compare --config <path> [--out <dir>] [--workers N]\n"
            "\n"
            "Compare u(., t_max) from the determinant route with a split-step "
            "Fourier solution on the periodic experiment.domain. The x grid must "
            "lie on the Fourier grid and t_max must be a multiple of dt. Exits "
            "with 1 when the max difference exceeds experiment.compare_bound.")

    def _oracle_indices(self, config, x_grid):
        a, b = config.experiment["domain"]
        n_modes = config.experiment["n_modes"]
        spacing = (b - a) / n_modes
        indices = []
        for x in x_grid:
            index = steps_of(x - a, spacing)
            if index is None or not 0 <= index < n_modes:
                raise config.fail(f"x = {x:g} is not a node of the Fourier grid "
                                  f"(spacing {spacing:g} from {a:g})", "experiment", "x_min")
            indices.append(index)
        return np.array(indices)

    def run(self, config):
        experiment = config.experiment
        t = experiment["t_max"]
        dt = experiment["dt"]
        if steps_of(t, dt) is None:
            raise config.fail(f"t_max = {t:g} is not a multiple of dt = {dt:g}",
                              "experiment", "dt")
        x_grid = config.x_grid()
        indices = self._oracle_indices(config, x_grid)

        q = config.potential
        self.log(f"Split-step Fourier reference at t = {t:g} "
                 f"({experiment['n_modes']} modes, dt = {dt:g}) ...", format="bold")
        _, u_reference = split_step_kdv(q, t, experiment["domain"], experiment["n_modes"], dt)
        u_oracle = u_reference[indices]

        self.log(f"Determinant route on {x_grid.size} points ...", format="bold")
        data = self.operator_data(config)
        field = u_field(data, x_grid, [t], config.discretization, config.method,
                        workers=self.workers, meta=config.describe())
        u_determinant = field.u[0]

        difference = float(np.max(np.abs(u_determinant - u_oracle), initial=0.0))
        bound = experiment["compare_bound"]
        meta = dict(field.meta, t=t, domain=experiment["domain"],
                    n_modes=experiment["n_modes"], dt=dt, max_difference=difference)
        write_table(self.path("comparison.csv"), ComparisonResource(),
                    ComparisonResource.rows(x_grid, t, u_determinant, u_oracle),
                    {"potential": q.description, "potential_hash": q.digest(), "t": t})
        write_sidecar(self.path("comparison.json"), meta)
        self.log(f"max |u_det - u_fourier| = {difference:.3e} (bound {bound:.3e})")
        if difference > bound:
            self.log("difference above the configured bound", format="red", file=self.stderr)
            raise CommandError(f"routes differ by {difference:.3e} > {bound:.3e}",
                               returncode=1)
        self.log(f"Results written to {self.out}", format="blue")
