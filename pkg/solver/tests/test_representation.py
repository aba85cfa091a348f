import numpy as np
from django.test import SimpleTestCase

from solver import potential
from solver.representation import kernel_bounds, r_plus_representation, solve_kernel
from solver.scattering import scattering_coefficients

K = np.array([0.5, 1.0, 2.0, 4.0])


class RepresentationTests(SimpleTestCase):
    def test_reconstructs_R_plus(self):
        q = potential.gaussian_well(-1.0, 0.5, 1.5)
        rep = r_plus_representation(q, K)
        self.assertLess(rep.defect, 1e-6)
        R_plus = scattering_coefficients(potential.restrict(q, "right"), K).R
        np.testing.assert_allclose(rep.R_plus, R_plus, atol=1e-6)

    def test_square_well_on_the_right(self):
        rep = r_plus_representation(potential.square_well(-1.0, 0.5, 1.5), K)
        self.assertLess(rep.defect, 1e-6)
        self.assertEqual(rep.Q.shape, rep.Qprime.shape)

    def test_transform_of_a_square_well(self):
        V0 = 1.0
        rep = r_plus_representation(potential.square_well(-V0, 0.0, 2.0), K, check=False)
        expected = -V0 * (1.0 - np.exp(-4j * K)) / (2j * K)
        np.testing.assert_allclose(rep.G0, expected, rtol=0.0, atol=1e-10)

    def test_left_supported_profile(self):
        rep = r_plus_representation(potential.square_well(-1.0, -2.0, -1.0), K)
        np.testing.assert_array_equal(rep.R_plus, 0.0)
        self.assertEqual(rep.defect, 0.0)

    def test_kernel_solution_is_bounded(self):
        q_plus = potential.restrict(potential.sech_well(-2.0), "right")
        solution = solve_kernel(q_plus, 12.0, 240)
        self.assertLessEqual(solution.bound_ratio, 1.0 + 1e-6)
        self.assertEqual(solution.y.size, solution.Q.size)


class BoundTests(SimpleTestCase):
    def test_bounds_hold_for_smooth_and_discontinuous_data(self):
        for q in (potential.sech_well(-2.0), potential.square_well(-1.0, 0.5, 1.5)):
            report = kernel_bounds(q)
            self.assertGreater(report.eta0, 0.0)
            self.assertAlmostEqual(report.C1, report.eta0 * (np.exp(report.gamma0) + 1.0))
            self.assertTrue(report.passes, msg=str(report))

    def test_zero_profile(self):
        report = kernel_bounds(potential.zero())
        self.assertEqual(report.C1, 0.0)
        self.assertTrue(report.passes)
