import math
import os
import shutil
import tempfile

import numpy as np
from django.test import SimpleTestCase

from solver import conf, potential, resources
from solver.cache import ScatteringCache, cache_key
from solver.scattering import BoundState, ScatteringData

GRID = {"k_min": 0.001, "k_max": 40.0, "nodes": 64, "scale": 4.0}


class CacheTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.directory)
        self.q = potential.sech_well(-2.0)
        self.calls = 0

    def compute(self):
        self.calls += 1
        return ScatteringData.reflectionless([BoundState(1.0, 2.0)], np.array([-1.0, 1.0]))

    def test_second_lookup_hits(self):
        cache = ScatteringCache(self.directory)
        first, hit = cache.fetch(self.q, GRID, self.compute)
        self.assertFalse(hit)
        second, hit = cache.fetch(self.q, GRID, self.compute)
        self.assertTrue(hit)
        self.assertEqual(self.calls, 1)
        self.assertEqual(second.bound_states, first.bound_states)
        np.testing.assert_array_equal(second.coeffs.T, first.coeffs.T)
        self.assertTrue(os.path.isdir(os.path.join(self.directory, "cache")))

    def test_disabled_cache_always_computes(self):
        cache = ScatteringCache(self.directory, enabled=False)
        cache.fetch(self.q, GRID, self.compute)
        _, hit = cache.fetch(self.q, GRID, self.compute)
        self.assertFalse(hit)
        self.assertEqual(self.calls, 2)
        self.assertFalse(os.path.exists(os.path.join(self.directory, "cache")))

    def test_key_depends_on_profile_grid_and_role(self):
        key = cache_key(self.q, GRID)
        self.assertNotEqual(key, cache_key(self.q, dict(GRID, nodes=128)))
        self.assertNotEqual(key, cache_key(potential.sech_well(-6.0), GRID))
        self.assertNotEqual(key, cache_key(self.q, GRID, "right-restriction"))
        self.assertEqual(key, cache_key(potential.sech_well(-2.0), dict(GRID)))

    def test_key_depends_on_the_scattering_tolerances(self):
        key = cache_key(self.q, GRID)
        with conf.configured({"ODE_RTOL": 1e-8}):
            self.assertNotEqual(key, cache_key(self.q, GRID))
        with conf.configured({"KAPPA_TOL": 1e-6}):
            self.assertNotEqual(key, cache_key(self.q, GRID))
        # the kernel tolerances do not enter the scattering data
        with conf.configured({"KERNEL_TOL": 1e-4}):
            self.assertEqual(key, cache_key(self.q, GRID))

    def test_unreadable_entry_is_discarded(self):
        cache = ScatteringCache(self.directory)
        key = cache_key(self.q, GRID)
        cache._backend.set(key, '{"version": 0}')
        with self.assertLogs("solver.cache", "WARNING"):
            self.assertIsNone(cache.get(key))
        self.assertIsNone(cache._backend.get(key))


class TableTests(SimpleTestCase):
    def test_tables_carry_metadata_and_full_precision(self):
        states = (BoundState(2.0, 12.0), BoundState(0.1, 0.3))
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "bound_states.csv")
            resources.write_table(path, resources.BoundStateResource(),
                                  resources.BoundStateResource.rows(states),
                                  {"config": "run.ini", "kgrid": {"nodes": 64}})
            with open(path) as handle:
                text = handle.read()
            comments, header, rows = resources.read_table(path)
        self.assertTrue(text.startswith("# config: run.ini\n"))
        self.assertIn("0.10000000000000001", text)
        self.assertEqual(comments, ["config: run.ini", 'kgrid: {"nodes": 64}'])
        self.assertEqual(header, ["kappa", "c", "energy"])
        np.testing.assert_array_equal(rows[:, 2], [-4.0, -0.1 ** 2])

    def test_empty_cells_read_as_nan(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "convergence.csv")
            with open(path, "w") as handle:
                handle.write("# config: run.ini\r\nb,delta\r\n-1.0,\r\n-2.0,nan\r\n-4.0,0.5\r\n")
            comments, header, rows = resources.read_table(path)
        self.assertEqual(comments, ["config: run.ini"])
        self.assertEqual(header, ["b", "delta"])
        np.testing.assert_array_equal(rows[:, 0], [-1.0, -2.0, -4.0])
        self.assertTrue(np.isnan(rows[0, 1]))
        self.assertTrue(np.isnan(rows[1, 1]))
        self.assertEqual(rows[2, 1], 0.5)

    def test_missing_values(self):
        widget = resources.FloatWidget()
        self.assertEqual(widget.render(None), "")
        self.assertEqual(widget.render(math.nan), "nan")
        self.assertEqual(widget.render(np.float64(-0.5)), "-0.5")

    def test_sidecar_is_plain_json(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "meta.json")
            resources.write_sidecar(path, {"u_max": np.float64(1.5), "grid": np.arange(2),
                                           "bad": math.inf})
            with open(path) as handle:
                text = handle.read()
        self.assertIn('"u_max": 1.5', text)
        self.assertIn('"bad": "inf"', text)
