import math

import numpy as np
from django.test import SimpleTestCase

from solver.quadrature import filon_fourier, gauss_legendre, phase_panels, sinh_grid


class QuadratureTests(SimpleTestCase):
    def test_gauss_legendre_is_exact_for_polynomials(self):
        x, w = gauss_legendre(6, -1.0, 3.0)
        exact = (3.0 ** 12 - 1.0) / 12.0
        self.assertLess(abs(np.sum(w * x ** 11) - exact) / exact, 1e-12)

    def test_sinh_grid(self):
        k = sinh_grid(1e-3, 40.0, 64, 4.0)
        self.assertEqual(k.size, 64)
        np.testing.assert_allclose(k, -k[::-1])
        self.assertAlmostEqual(k[-1], 40.0)
        self.assertAlmostEqual(k[32], 1e-3)
        with self.assertRaises(ValueError):
            sinh_grid(1e-3, 40.0, 63, 4.0)

    def test_filon_is_exact_for_quadratics(self):
        x = np.linspace(0.0, 1.0, 11)
        for omega in (0.5, 5.0, 80.0):
            a = -1j * omega
            exact = np.exp(a) * (1 / a - 2 / a ** 2 + 2 / a ** 3) - 2 / a ** 3
            value = filon_fourier(x ** 2, x[1] - x[0], omega)[0]
            self.assertAlmostEqual(abs(value - exact), 0.0, places=10)

        # small frequencies go through the series branch
        value = filon_fourier(x ** 2, x[1] - x[0], 1e-3)[0]
        self.assertAlmostEqual(value, 1.0 / 3.0 - 0.25e-3j, places=6)

    def test_filon_needs_odd_sample_count(self):
        with self.assertRaises(ValueError):
            filon_fourier(np.ones(4), 0.1, 1.0)

    def test_phase_panels_resolve_oscillation(self):
        k, w = phase_panels(10.0, lambda k: 8.0, 16, 12.0)
        self.assertAlmostEqual(np.sum(w * np.cos(8.0 * k)), math.sin(80.0) / 8.0, places=12)
        self.assertAlmostEqual(np.sum(w), 10.0, places=12)
