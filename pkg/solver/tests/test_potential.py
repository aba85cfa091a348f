import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from solver import potential
from solver.exceptions import QuadratureError


class FamilyTests(SimpleTestCase):
    def test_sech_well_takes_signed_depth(self):
        q = potential.sech_well(-2.0)
        self.assertAlmostEqual(q(0.0), -2.0)
        self.assertAlmostEqual(q(1.0), -2.0 / math.cosh(1.0) ** 2)

    def test_square_well_vanishes_outside_and_on_the_edges(self):
        q = potential.square_well(-1.5, -1.0, 2.0)
        values = q(np.array([-3.0, -1.0, 0.0, 2.0, 3.0]))
        np.testing.assert_array_equal(values, [0.0, 0.0, -1.5, 0.0, 0.0])
        self.assertEqual(q.breakpoints, (-1.0, 2.0))

    def test_unknown_and_missing_parameters(self):
        with self.assertRaises(ValueError):
            potential.family("sech_well", depth=-1.0, height=2.0)
        with self.assertRaises(ValueError):
            potential.family("square_well", depth=-1.0, left=0.0)
        with self.assertRaises(ValueError):
            potential.square_well(-1.0, 2.0, 1.0)

    def test_power_tail_is_right_supported(self):
        q = potential.power_tail(1.0, 3.0)
        self.assertEqual(q(-0.5), 0.0)
        self.assertAlmostEqual(q(1.0), 1.0 / 8.0)

    def test_left_oscillatory_is_smoothly_cut(self):
        q = potential.left_oscillatory(1.0, frequency=2.0, cut=1.0)
        self.assertEqual(q(-0.5), 0.0)
        self.assertEqual(q(-1.0), 0.0)
        x = -10.0
        self.assertAlmostEqual(q(x), 0.5 * (1.0 + math.cos(2.0 * x)))

    def test_composite_sums_components(self):
        a = potential.gaussian_well(-1.0, 0.5, -2.0)
        b = potential.gaussian_well(-1.0, 0.5, 2.0)
        q = potential.composite(a, b)
        x = np.linspace(-4, 4, 9)
        np.testing.assert_allclose(q(x), a(x) + b(x))
        self.assertIs(potential.composite(potential.zero(), a), a)

    def test_sampled_profile_from_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "q.txt")
            with open(path, "w") as handle:
                handle.write("# x q\n0 0\n1 -1\n2 0\n")
            q = potential.load_sampled(path)
        self.assertAlmostEqual(q(0.5), -0.5)
        self.assertEqual(q(3.0), 0.0)
        self.assertEqual(q.support, (0.0, 2.0))


class OperationTests(SimpleTestCase):
    def setUp(self):
        self.q = potential.sech_well(-2.0)

    def test_evaluate(self):
        self.assertEqual(potential.evaluate(potential.zero(), 3.7), 0.0)
        self.assertAlmostEqual(potential.evaluate(self.q, 0.0), -2.0)
        self.assertEqual(potential.evaluate(potential.square_well(-1.0, 0.0, 2.0), 1.0), -1.0)

    def test_truncate_left(self):
        q_b = potential.truncate_left(self.q, -1.0)
        self.assertEqual(q_b(-1.5), 0.0)
        self.assertEqual(q_b(0.3), self.q(0.3))
        self.assertTrue(potential.truncate_left(potential.square_well(-1, 0, 1), 2.0).is_zero)

    def test_restrict(self):
        right = potential.restrict(self.q, "right")
        left = potential.restrict(self.q, "left")
        x = np.array([-1.0, -0.1, 0.1, 1.0])
        np.testing.assert_allclose(right(x) + left(x), self.q(x))
        self.assertEqual(right(-0.1), 0.0)
        self.assertTrue(potential.restrict(potential.square_well(-1, 1, 2), "left").is_zero)
        with self.assertRaises(ValueError):
            potential.restrict(self.q, "up")

    def test_shifted_translates(self):
        q = potential.square_well(-1.0, 0.0, 1.0)
        moved = potential.shifted(q, 2.0)
        self.assertEqual(moved(2.5), -1.0)
        self.assertEqual(moved(0.5), 0.0)
        self.assertEqual(moved.breakpoints, (2.0, 3.0))

    def test_digest_depends_on_parameters_only(self):
        a = potential.sech_well(-2.0)
        self.assertEqual(a.digest(), potential.sech_well(-2.0).digest())
        self.assertNotEqual(a.digest(), potential.sech_well(-2.0, width=2.0).digest())


class AdmissibilityTests(SimpleTestCase):
    def test_weighted_norm_of_square_well(self):
        q = potential.square_well(-1.0, 0.0, 1.0)
        self.assertAlmostEqual(potential.weighted_norm(q, 0, -5.0), 1.0, places=9)
        self.assertAlmostEqual(potential.weighted_norm(q, 1, -5.0), 1.5, places=9)

    def test_weighted_norm_diverges_for_slow_tails(self):
        with self.assertRaises(QuadratureError):
            potential.weighted_norm(potential.power_tail(1.0, 2.0), 3.0, 0.0)

    def test_lower_bound_sup(self):
        q = potential.square_well(-2.0, 0.0, 3.0)
        self.assertAlmostEqual(potential.lower_bound_sup(q, (-2.0, 5.0)), 2.0, delta=1e-3)
        bump = potential.gaussian_well(1.0)
        self.assertEqual(potential.lower_bound_sup(bump, (-5.0, 5.0)), 0.0)

    def test_sech_well_is_admissible(self):
        report = potential.check_admissibility(potential.sech_well(-2.0), 3.0,
                                               (-10.0, 10.0), -10.0)
        self.assertTrue(all(report.passes))

    def test_tail_start(self):
        q = potential.square_well(-1.0, -2.0, 3.0)
        self.assertEqual(potential.computational_interval(q), (-2.0, 3.0))
        x_left, x_right = potential.computational_interval(potential.sech_well(-2.0))
        self.assertLess(x_left, -10.0)
        self.assertGreater(x_right, 10.0)
        self.assertLess(x_right, 60.0)
