import os

from django.core.management.base import BaseCommand, CommandError

from solver import conf
from solver.cache import ScatteringCache
from solver.config import load
from solver.determinant import SplitData
from solver.exceptions import ConfigurationError, NumericalError
from solver.hankel import ContourData
from solver.potential import restrict
from solver.scattering import scattering_data
from solver.weyl import analytic_g


class SolverCommand(BaseCommand):
    """Shared plumbing of the batch commands.

    Subclasses implement ``run(config)``. Configuration errors leave with
    exit code 2, numerical failures with exit code 1.
    """

    PRINT_FORMATS = {
        "red": lambda text: f"\033[31m{text}\033[0m",
        "blue": lambda text: f"\033[34m{text}\033[0m",
        "bold": lambda text: f"\033[1m{text}\033[0m",
        None: lambda text: text,
    }

    def __init__(self, *args, **kwargs):
        self._logs = []
        super().__init__(*args, **kwargs)

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True,
                            help="Path of the run configuration (INI)")
        parser.add_argument("--out", default=None,
                            help="Output directory (default: [output] directory, else ./out)")
        parser.add_argument("--no-cache", action="store_true",
                            help="Neither read nor write cached scattering data")
        parser.add_argument("--workers", type=int, default=None,
                            help="Size of the worker pool (-1 = one per core)")

    def log(self, msg, format=None, *args, file=None):
        if args:
            msg += " " + " ".join(str(arg) for arg in args)
        self._logs.append(msg)
        stream = file or self.stdout
        stream.write(self.PRINT_FORMATS[format](msg) if stream.isatty() else msg)

    def handle(self, *args, returnLog=False, **options):
        try:
            config = load(options["config"])
            self.out = options["out"] or config.directory or "out"
            os.makedirs(self.out, exist_ok=True)
            self.workers = options["workers"] or config.experiment["workers"]
            self.cache = ScatteringCache(self.out,
                                         enabled=config.cache and not options["no_cache"])
            with conf.configured(config.tolerances):
                self.run(config)
        except ConfigurationError as e:
            self.log(f"configuration error: {e}", format="red", file=self.stderr)
            raise CommandError(str(e), returncode=2)
        except NumericalError as e:
            self.log(f"{type(e).__name__}: {e}", format="red", file=self.stderr)
            raise CommandError(f"{type(e).__name__}: {e}", returncode=1)

        if returnLog:
            return self._logs

    def run(self, config):
        raise NotImplementedError

    def path(self, name):
        return os.path.join(self.out, name)

    # Scattering data, through the cache.

    def scattering(self, config, q, role="full-line"):
        k_nodes = config.k_nodes()
        data, hit = self.cache.fetch(
            q, config.grid_spec(), lambda: scattering_data(q, k_nodes, source=role), role)
        self.log(f"{role} scattering data of {q.description}"
                 f" ({'cached' if hit else 'computed'}, {k_nodes.size} k nodes,"
                 f" {len(data.bound_states)} bound states)")
        return data

    def operator_data(self, config):
        """Full-line data, or SplitData for the split route."""
        q = config.potential
        full = self.scattering(config, q)
        if config.route == "full":
            return full
        plus = self.scattering(config, restrict(q, "right"), role="right-restriction")
        if plus.shift or full.shift:
            raise NumericalError("split route needs data of the untranslated profile")
        top = max(full.kappa_max, plus.kappa_max)
        height = config.contour_height
        if height is None:
            height = top + conf.get("CONTOUR_OFFSET")
        elif height <= top:
            raise config.fail(f"contour must pass above the poles (kappa = {top:g})",
                              "discretization", "contour_height")
        contour = ContourData(lambda lam: analytic_g(q, lam), height)
        self.log(f"split route: analytic part on Im(lambda) = {height:g}")
        return SplitData(plus, contour, full)
