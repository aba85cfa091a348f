from solver.determinant import truncation_study
from solver.management.base import SolverCommand
from solver.resources import ConvergenceResource, write_sidecar, write_table


class Command(SolverCommand):
    help = ("Usage: python manage.py converge --config <path> [--out <dir>] [--workers N]\n"
            "\n"
            "Evaluate u for the left truncations q_b of the profile, b taken from "
            "experiment.b_list (decreasing), at the probe points experiment.probes "
            "(x:t pairs). Writes convergence.csv with the successive differences.")

    def run(self, config):
        experiment = config.experiment
        if not experiment["b_list"]:
            raise config.fail("converge needs a b_list", "experiment", "b_list")
        if not experiment["probes"]:
            raise config.fail("converge needs probe points", "experiment", "probes")

        q = config.potential
        self.log(f"Truncations of {q.description} at b = "
                 f"{', '.join(f'{b:g}' for b in experiment['b_list'])} ...", format="bold")
        table = truncation_study(q, experiment["b_list"], experiment["probes"],
                                 config.discretization, config.k_nodes(), self.workers)

        for b, delta in zip(table.b_values[1:], table.deltas):
            self.log(f"b = {b:8g}: max |u_b - u_b'| = {abs(delta).max():.3e}")
        if table.monotone_tail:
            self.log("differences decrease over the last truncations")
        else:
            self.log("differences do not decrease over the last truncations", format="red")

        meta = dict(config.describe(), b_list=table.b_values, probes=table.probes,
                    monotone_tail=table.monotone_tail)
        write_table(self.path("convergence.csv"), ConvergenceResource(),
                    ConvergenceResource.rows(table),
                    {"potential": q.description, "potential_hash": q.digest()})
        write_sidecar(self.path("convergence.json"), meta)
        self.log(f"Results written to {self.out}", format="blue")
