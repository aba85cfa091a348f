import numpy as np
from django.test import SimpleTestCase

from solver import potential
from solver.scattering import scattering_coefficients, split_reflection
from solver.weyl import analytic_g, m_function_left

LAMBDAS = np.array([0.3, 1.0, 2.5])


class MFunctionTests(SimpleTestCase):
    def test_free_half_line(self):
        data = m_function_left(potential.square_well(-1.0, 0.5, 1.0), LAMBDAS)
        np.testing.assert_allclose(data.m, 1j * LAMBDAS)
        np.testing.assert_array_equal(data.R, 0.0)

    def test_zero_profile_off_the_real_line(self):
        lam = np.array([1.0 + 0.5j])
        data = m_function_left(potential.zero(), lam)
        np.testing.assert_allclose(data.m, 1j * lam)
        np.testing.assert_array_equal(data.R, 0.0)

    def test_constant_left_half_line(self):
        # m = i sqrt(lambda^2 + V0) on the branch with positive imaginary part
        V0, lam = 1.0, np.array([1.0 + 0.5j])
        q = potential.square_well(-V0, -60.0, 0.0)
        data = m_function_left(q, lam, x_left=-10.0)
        root = np.sqrt(lam ** 2 + V0)
        root = np.where(root.imag < 0, -root, root)
        np.testing.assert_allclose(data.m, 1j * root, rtol=1e-8)
        self.assertLess(data.convergence, 1e-8)

    def test_reflection_matches_the_wronskian_route(self):
        q = potential.square_well(-1.0, -3.0, -1.0)
        data = m_function_left(q, LAMBDAS)
        R = scattering_coefficients(q, LAMBDAS).R
        np.testing.assert_allclose(data.R, R, atol=1e-8)
        self.assertLess(data.convergence, 1e-8)

    def test_non_decaying_left_tail(self):
        q = potential.left_oscillatory(1.0, frequency=2.0)
        data = m_function_left(q, LAMBDAS + 0.5j)
        self.assertTrue(np.all(np.isfinite(data.R)))
        self.assertLess(data.convergence, 1e-8)

    def test_argument_checks(self):
        q = potential.sech_well(-2.0)
        with self.assertRaises(ValueError):
            m_function_left(q, [1.0 - 0.1j])
        with self.assertRaises(ValueError):
            m_function_left(q, LAMBDAS, x_left=1.0)


class AnalyticGTests(SimpleTestCase):
    def test_matches_the_split_of_R_on_the_real_line(self):
        q = potential.composite(potential.gaussian_well(-1.0, 0.5, -2.0),
                                potential.gaussian_well(-1.0, 0.5, 2.0))
        G = analytic_g(q, LAMBDAS)
        split = split_reflection(q, LAMBDAS)
        np.testing.assert_allclose(G, split.G_values, atol=1e-7)

    def test_vanishes_without_left_part(self):
        q = potential.square_well(-1.0, 0.5, 1.5)
        np.testing.assert_array_equal(analytic_g(q, LAMBDAS + 1j), 0.0)
