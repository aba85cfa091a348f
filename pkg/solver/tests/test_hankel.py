import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from solver import hankel, potential
from solver.exceptions import TruncationError
from solver.scattering import BoundState, ScatteringData, default_k_grid, scattering_data
from solver.weyl import analytic_g

K = np.linspace(-6.0, 6.0, 40)


def soliton_data():
    return ScatteringData.reflectionless([BoundState(1.0, 2.0)], K)


def g_test(lam):
    """Analytic above -2i, with G(-conj lambda) = conj G(lambda)."""
    return 1j / (lam + 2j)


class SymbolTests(SimpleTestCase):
    def test_pole_weights_evolve_in_time(self):
        symbol = hankel.assemble_symbol(soliton_data(), 0.5, 0.25)
        (weight,) = symbol.pole_weights
        self.assertAlmostEqual(weight, 2.0 * math.exp(8.0 * 0.25 - 1.0))
        self.assertEqual(symbol.kappa_max, 1.0)
        self.assertFalse(symbol.is_zero)

    def test_symbol_of_the_right_restriction(self):
        data = soliton_data()
        plus = hankel.symbol_plus(data, 0.5, 0.25)
        self.assertEqual(plus.pole_weights, hankel.assemble_symbol(data, 0.5, 0.25).pole_weights)
        self.assertIs(plus.reflection, data.coeffs)
        self.assertIsNone(plus.analytic_part)

    def test_zero_symbol(self):
        symbol = hankel.assemble_symbol(ScatteringData.reflectionless([], K), 0.0, 0.0)
        self.assertTrue(symbol.is_zero)

    def test_contour_must_pass_above_the_poles(self):
        contour = hankel.ContourData(g_test, 0.5)
        with self.assertRaises(ValueError):
            hankel.contour_symbol(contour, 0.0, 0.1, poles=[1.0])

    def test_negative_time_is_rejected(self):
        with self.assertRaises(ValueError):
            hankel.HankelSymbol(0.0, -1.0)


class ContourTests(SimpleTestCase):
    def test_samples_use_the_mirror_symmetry(self):
        contour = hankel.ContourData(g_test, 1.0, step=0.05)
        lam, G = contour.samples(2.0)
        np.testing.assert_allclose(lam.real, -lam.real[::-1], atol=1e-15)
        np.testing.assert_allclose(G, g_test(lam), rtol=1e-13)
        self.assertAlmostEqual(lam[0].imag, 1.0)

    def test_phi_does_not_depend_on_the_contour_height(self):
        k = np.array([-1.0, 0.0, 0.5, 2.0])
        low = hankel.phi_analytic(g_test, 1.0, 1.0, 0.1, k)
        high = hankel.phi_analytic(g_test, 2.0, 1.0, 0.1, k)
        np.testing.assert_allclose(low, high, atol=1e-9)

    def test_phi_needs_points_below_the_contour(self):
        with self.assertRaises(ValueError):
            hankel.phi_analytic(g_test, 1.0, 1.0, 0.1, [1.5j])


class KernelTests(SimpleTestCase):
    def test_soliton_kernel_is_a_single_exponential(self):
        symbol = hankel.assemble_symbol(soliton_data(), 1.0, 0.1)
        s = np.linspace(0.5, 10.0, 20)
        profile = hankel.kernel_profile(symbol, s)
        weight = 2.0 * math.exp(0.8 - 2.0)
        np.testing.assert_allclose(profile.F_values, weight * np.exp(-s), rtol=1e-12)
        self.assertEqual(profile.kappa_min, 1.0)
        self.assertLess(profile.imag_defect, 1e-15)

    def test_kernel_of_sech_data_matches_the_reflectionless_one(self):
        data = scattering_data(potential.sech_well(-2.0), K)
        symbol = hankel.assemble_symbol(data, 0.0, 0.1)
        exact = hankel.assemble_symbol(soliton_data(), 0.0, 0.1)
        s = np.linspace(0.5, 8.0, 16)
        np.testing.assert_allclose(hankel.kernel_profile(symbol, s).F_values,
                                   hankel.kernel_profile(exact, s).F_values, rtol=1e-5)

    def test_square_well_kernel_is_real(self):
        data = scattering_data(potential.square_well(-1.0, 0.5, 1.5),
                               default_k_grid(n_nodes=1024))
        symbol = hankel.assemble_symbol(data, 0.5, 0.1)
        profile = hankel.kernel_profile(symbol, np.linspace(0.1, 20.0, 40))
        self.assertLess(profile.imag_defect, 1e-9)
        self.assertTrue(np.all(np.isfinite(profile.F_values)))

    def test_nodes_need_a_minimum_order(self):
        with self.assertRaises(ValueError):
            hankel.nodes(10.0, 4)


class NystromTests(SimpleTestCase):
    def test_symbol_and_kernel_function_agree(self):
        symbol = hankel.assemble_symbol(soliton_data(), 0.0, 0.0)

        def F(s):
            return 2.0 * np.exp(-s)

        from_symbol = hankel.nystrom(symbol, 20.0, 32)
        from_function = hankel.nystrom(F, 20.0, 32)
        np.testing.assert_allclose(from_symbol.M, from_function.M, atol=1e-14)
        self.assertEqual(from_symbol.M.shape, (32, 32))

    def test_derivative_matrices(self):
        symbol = hankel.assemble_symbol(soliton_data(), 0.0, 0.0)
        d = hankel.nystrom(symbol, 20.0, 32, deriv_orders=[(1, 0), (0, 1)])
        # d/dx multiplies the pole weight by -2 kappa, d/dt by 8 kappa^3
        np.testing.assert_allclose(d.matrix((1, 0)), -2.0 * d.M, atol=1e-13)
        np.testing.assert_allclose(d.matrix((0, 1)), 8.0 * d.M, atol=1e-13)

    def test_derivative_matrices_match_finite_differences(self):
        data = ScatteringData.reflectionless([BoundState(2.0, 12.0), BoundState(1.0, 6.0)], K)
        x, t = 1.0, 0.01
        orders = [(m, n) for n in range(2) for m in range(6) if 0 < m + 3 * n <= 5]

        def matrices(dx=0.0, dt=0.0):
            symbol = hankel.assemble_symbol(data, x + dx, t + dt)
            return hankel.nystrom(symbol, 20.0, 32, deriv_orders=orders)

        exact = matrices()
        for m, n in orders:
            # step along x from order (m - 1, n), along t from (0, n - 1)
            if m:
                lower, steps = (m - 1, n), (0.01, 0.005, 0.0025)
            else:
                lower, steps = (0, n - 1), (1e-3, 5e-4, 2.5e-4)
            errors = []
            for h in steps:
                dx, dt = (h, 0.0) if m else (0.0, h)
                ahead = matrices(dx, dt).matrix(lower)
                behind = matrices(-dx, -dt).matrix(lower)
                difference = (ahead - behind) / (2.0 * h)
                errors.append(np.linalg.norm(difference - exact.matrix((m, n))))
            for coarse, fine in zip(errors, errors[1:]):
                slope = math.log2(coarse / fine)
                self.assertGreater(slope, 1.8, msg=f"order {(m, n)}")
                self.assertLess(slope, 2.2, msg=f"order {(m, n)}")

    def test_truncation_is_reported(self):
        symbol = hankel.assemble_symbol(soliton_data(), 0.0, 0.0)
        with self.assertRaises(TruncationError) as raised:
            hankel.nystrom(symbol, 5.0, 32)
        self.assertEqual(raised.exception.suggested_length, 10.0)

    def test_tail_check_allows_for_cut_off_noise(self):
        lam = np.array([1j])
        quiet = hankel.ExponentialSum(lam, np.array([1.0]))
        noisy = hankel.ExponentialSum(lam, np.array([1.0]), ((1e-6, 0.0, 1, 1.0),))
        self.assertAlmostEqual(noisy.noise(10.0), 1e-7)
        self.assertEqual((quiet + noisy).noise_terms, noisy.noise_terms)
        self.assertAlmostEqual(hankel.check_tail(noisy, 10.0, tail_cut=1e-12), math.exp(-20.0))
        with self.assertRaises(TruncationError) as raised:
            hankel.check_tail(quiet, 10.0, tail_cut=1e-12)
        self.assertEqual(raised.exception.suggested_length, 20.0)

    def test_default_grid_passes_the_tail_check(self):
        data = scattering_data(potential.gaussian_well(-1.0))
        symbol = hankel.assemble_symbol(data, 0.0, 0.1)
        d = hankel.nystrom(symbol)
        self.assertEqual(d.M.shape, (96, 96))
        self.assertTrue(np.all(np.isfinite(d.M)))

    def test_singular_values_of_a_rank_one_operator(self):
        symbol = hankel.assemble_symbol(soliton_data(), 0.0, 0.0)
        report = hankel.singular_value_report(hankel.nystrom(symbol, 20.0, 64))
        self.assertEqual(report.rank, 1)
        # trace of the positive operator: int_0^L 2 exp(-2s) ds
        self.assertAlmostEqual(report.trace_norm, 1.0 - math.exp(-40.0), places=12)

    def test_partial_sums_are_stable_under_refinement(self):
        data = scattering_data(potential.gaussian_well(-1.0), K)
        symbol = hankel.assemble_symbol(data, 0.0, 0.1)
        coarse = hankel.singular_value_report(hankel.nystrom(symbol, 40.0, 64))
        fine = hankel.singular_value_report(hankel.nystrom(symbol, 40.0, 128))
        self.assertLess(abs(fine.trace_norm - coarse.trace_norm) / coarse.trace_norm, 1e-5)

    def test_matrix_dump(self):
        matrix = np.arange(6.0).reshape(2, 3)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "m.bin")
            hankel.dump_matrix(path, matrix)
            with open(path, "rb") as handle:
                head = np.frombuffer(handle.read(16), dtype="<i8")
            self.assertEqual(os.path.getsize(path), 16 + 6 * 8)
            np.testing.assert_array_equal(head, [2, 3])
            np.testing.assert_array_equal(hankel.load_matrix(path), matrix)


class SplitOperatorTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.q = potential.composite(potential.gaussian_well(-1.0, 0.5, -2.0),
                                    potential.gaussian_well(-1.0, 0.5, 2.0))
        k = np.linspace(-10.0, 10.0, 1000)
        cls.sd = scattering_data(cls.q, k)
        cls.sd_plus = scattering_data(potential.restrict(cls.q, "right"), k)

    def defect(self, n_quad):
        return hankel.symbol_split_check(self.sd, self.sd_plus, lambda lam: analytic_g(self.q, lam),
                                         1.0, 0.1, L_s=30.0, n_quad=n_quad)

    def test_operator_splits_into_right_part_and_analytic_part(self):
        self.assertLess(self.defect(64), 1e-6)

    def test_defect_does_not_grow_with_the_quadrature(self):
        coarse = self.defect(32)
        fine = self.defect(64)
        self.assertLessEqual(fine, coarse + 1e-9)
