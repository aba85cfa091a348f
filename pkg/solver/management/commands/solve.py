from django.core.management.base import CommandError

from solver import hankel
from solver.determinant import SplitData, u_field
from solver.management.base import SolverCommand
from solver.resources import SolutionResource, write_sidecar, write_table


class Command(SolverCommand):
    help = ("Usage: python manage.py solve --config <path> [--out <dir>] [--workers N]\n"
            "\n"
            "Evaluate u(x, t) = -2 d^2/dx^2 log det(1 + H(x, t)) on the configured "
            "grid, write solution.csv and solution.json and check the KdV residual. "
            "Exits with 1 when the residual exceeds experiment.residual_bound.")

    def run(self, config):
        x_grid, t_grid = config.x_grid(), config.t_grid()
        data = self.operator_data(config)
        self.log(f"Solve on {x_grid.size} x {t_grid.size} points "
                 f"({config.route} route, {config.method}, {self.workers} worker(s)) ...",
                 format="bold")

        with_residual = x_grid.size >= 7 and t_grid.size >= 3
        if not with_residual:
            self.log("grid too small for the KdV residual (needs 7 x and 3 t nodes); skipped")
        field = u_field(data, x_grid, t_grid, config.discretization, config.method,
                        workers=self.workers, residual=with_residual,
                        meta=config.describe())

        if config.dump_matrix and not isinstance(data, SplitData):
            symbol = hankel.assemble_symbol(data, x_grid[0], t_grid[0])
            d = hankel.nystrom(symbol, config.discretization.L_s,
                               config.discretization.n_quad)
            hankel.dump_matrix(self.path("matrix.bin"), d.M)
            self.log(f"Nystrom matrix at (x, t) = ({x_grid[0]:g}, {t_grid[0]:g}) "
                     f"dumped to matrix.bin ({d.M.shape[0]} x {d.M.shape[1]})")

        meta = dict(field.meta)
        write_table(self.path("solution.csv"), SolutionResource(),
                    SolutionResource.rows(field),
                    {"potential": config.potential.description,
                     "potential_hash": config.potential.digest(),
                     "route": config.route, "method": config.method})
        write_sidecar(self.path("solution.json"),
                      dict(meta, x_grid=field.x_grid, t_grid=field.t_grid))
        self.log(f"max |u| = {abs(field.u).max():.6g}")

        if with_residual:
            residual = field.meta["residual_max"]
            bound = config.experiment["residual_bound"]
            self.log(f"KdV residual max norm {residual:.3e} (bound {bound:.3e})")
            if residual > bound:
                self.log("residual above the configured bound", format="red",
                         file=self.stderr)
                raise CommandError(f"KdV residual {residual:.3e} exceeds {bound:.3e}",
                                   returncode=1)
        self.log(f"Results written to {self.out}", format="blue")
