import numpy as np
from django.test import SimpleTestCase

from solver import conf, determinant, oracles, potential
from solver.exceptions import CoefficientError, ExceptionalPotentialError
from solver.scattering import (BoundState, ScatteringData, bound_states, jost_left, jost_right,
                               scattering_coefficients, scattering_data, split_reflection)

K = np.array([-3.0, -1.0, -0.4, 0.4, 1.0, 3.0])


def two_wells():
    return potential.composite(potential.gaussian_well(-1.0, 0.5, -2.0),
                               potential.gaussian_well(-1.0, 0.5, 2.0))


class CoefficientTests(SimpleTestCase):
    def test_zero_profile(self):
        grid = scattering_coefficients(potential.zero(), K)
        np.testing.assert_array_equal(grid.R, 0.0)
        np.testing.assert_allclose(grid.T, 1.0)

    def test_sech_well_is_reflectionless(self):
        grid = scattering_coefficients(potential.sech_well(-2.0), K)
        self.assertLess(np.max(np.abs(grid.R)), 1e-8)
        np.testing.assert_allclose(grid.T, (K + 1j) / (K - 1j), atol=1e-8)

    def test_square_well_matches_transfer_matrices(self):
        q = potential.square_well(-1.5, -1.0, 0.5)
        grid = scattering_coefficients(q, K)
        profile = oracles.PiecewiseConstantPotential([-1.0, 0.5], [-1.5])
        for i, k in enumerate(K):
            T, R, L = oracles.transfer_matrix_scattering(profile, k)
            self.assertAlmostEqual(abs(grid.T[i] - T), 0.0, places=8)
            self.assertAlmostEqual(abs(grid.R[i] - R), 0.0, places=8)
            self.assertAlmostEqual(abs(grid.L[i] - L), 0.0, places=8)

    def test_unitarity_and_symmetry(self):
        grid = scattering_coefficients(two_wells(), K)
        self.assertLess(grid.unitarity_defect(), 1e-8)
        self.assertLess(grid.symmetry_defect(), 1e-12)

    def test_translation_multiplies_R_by_a_phase(self):
        q = potential.square_well(-1.0, -1.0, 1.0)
        k = K[K > 0]
        base = scattering_coefficients(q, k)
        moved = scattering_coefficients(potential.shifted(q, 1.5), k)
        np.testing.assert_allclose(moved.R, base.R * np.exp(-3j * k), atol=1e-9)
        np.testing.assert_allclose(moved.T, base.T, atol=1e-9)

    def test_jost_right_is_one_beyond_the_support(self):
        q = potential.square_well(-1.0, -1.0, 1.0)
        y = jost_right(q, 0.7, np.array([-2.0, 0.0, 1.5, 2.0]))
        self.assertAlmostEqual(abs(y[-1] - 1.0), 0.0, places=12)
        self.assertAlmostEqual(abs(y[-2] - 1.0), 0.0, places=12)
        self.assertNotAlmostEqual(abs(y[1] - 1.0), 0.0, places=3)

    def test_jost_left_is_one_before_the_support(self):
        q = potential.square_well(-1.0, -1.0, 1.0)
        y = jost_left(q, 0.7, np.array([-2.0, -1.5, 0.0, 2.0]))
        self.assertAlmostEqual(abs(y[0] - 1.0), 0.0, places=12)
        self.assertAlmostEqual(abs(y[1] - 1.0), 0.0, places=12)
        self.assertNotAlmostEqual(abs(y[2] - 1.0), 0.0, places=3)

    def test_bound_state_jost_solution_is_a_sech(self):
        x = np.linspace(-3.0, 3.0, 13)
        psi = np.exp(-x) * jost_right(potential.sech_well(-2.0), 1j, x)
        np.testing.assert_allclose(psi.imag, 0.0, atol=1e-12)
        np.testing.assert_allclose(psi.real * np.cosh(x), 0.5, rtol=1e-6)

    def test_unitarity_is_enforced(self):
        with self.assertRaises(CoefficientError) as raised:
            scattering_coefficients(two_wells(), K, coeff_tol=0.0)
        self.assertIn(raised.exception.k, np.abs(K))
        self.assertGreater(raised.exception.defect, 0.0)

    def test_jost_solutions_of_the_zero_profile(self):
        x = np.linspace(-1.0, 1.0, 5)
        np.testing.assert_array_equal(jost_left(potential.zero(), 2.0, x), 1.0)
        np.testing.assert_array_equal(jost_right(potential.zero(), 2.0, x), 1.0)


class BoundStateTests(SimpleTestCase):
    def test_one_soliton(self):
        (state,) = bound_states(potential.sech_well(-2.0))
        self.assertAlmostEqual(state.kappa, 1.0, places=8)
        self.assertAlmostEqual(state.c, 2.0, places=6)

    def test_two_soliton(self):
        states = bound_states(potential.sech_well(-6.0))
        self.assertEqual(len(states), 2)
        self.assertAlmostEqual(states[0].kappa, 2.0, places=6)
        self.assertAlmostEqual(states[1].kappa, 1.0, places=6)
        self.assertAlmostEqual(states[0].c / 12.0, 1.0, places=5)
        self.assertAlmostEqual(states[1].c / 6.0, 1.0, places=5)

    def test_no_bound_states(self):
        self.assertEqual(bound_states(potential.zero()), ())
        self.assertEqual(bound_states(potential.gaussian_well(1.0)), ())

    def test_norming_constants_follow_a_translation(self):
        # psi+ of q(. - a) is exp(-kappa a) psi+(. - a), so c picks up exp(2 kappa a)
        states = bound_states(potential.sech_well(-6.0, center=1.0))
        self.assertAlmostEqual(states[0].c / (12.0 * np.exp(4.0)), 1.0, places=5)
        self.assertAlmostEqual(states[1].c / (6.0 * np.exp(2.0)), 1.0, places=5)

    def test_square_well_matches_the_matching_conditions(self):
        V0, a = 4.0, 1.0
        q = potential.square_well(-V0, -a, a)
        states = bound_states(q)
        eigenvalues = oracles.schrodinger_eigs(q, (-21.0, 21.0), 4000)
        self.assertEqual(len(states), len(eigenvalues))
        for state in states:
            p = np.sqrt(V0 - state.kappa ** 2)
            even = state.kappa * np.cos(p * a) - p * np.sin(p * a)
            odd = state.kappa * np.sin(p * a) + p * np.cos(p * a)
            self.assertLess(min(abs(even), abs(odd)), 1e-8, msg=f"kappa={state.kappa}")

    def test_bound_state_validation(self):
        with self.assertRaises(ValueError):
            BoundState(-1.0, 1.0)


class ScatteringDataTests(SimpleTestCase):
    def test_reflectionless_data(self):
        data = ScatteringData.reflectionless([BoundState(1.0, 2.0), BoundState(2.0, 12.0)], K)
        self.assertEqual([b.kappa for b in data.bound_states], [2.0, 1.0])
        np.testing.assert_allclose(np.abs(data.coeffs.T), 1.0)
        self.assertEqual(data.kappa_max, 2.0)

    def test_document_keeps_every_value(self):
        data = scattering_data(potential.square_well(-1.0, 0.0, 1.0), K)
        copy = ScatteringData.from_document(data.to_document())
        np.testing.assert_array_equal(copy.coeffs.R, data.coeffs.R)
        self.assertEqual(copy.bound_states, data.bound_states)
        self.assertEqual(copy.potential_digest, data.potential_digest)

    def test_unknown_document_version(self):
        document = ScatteringData.reflectionless([], K).to_document()
        document["version"] = 99
        with self.assertRaises(ValueError):
            ScatteringData.from_document(document)


class ExceptionalPotentialTests(SimpleTestCase):
    def test_retry_with_a_shifted_profile_is_logged(self):
        with conf.configured({"WRONSKIAN_FLOOR": 1e3}):
            with self.assertLogs("solver.scattering", "WARNING") as logs:
                with self.assertRaises(ExceptionalPotentialError):
                    scattering_data(two_wells(), K)
        self.assertIn("retrying with the profile shifted", logs.output[0])

    def test_shifted_data_describe_the_unshifted_profile(self):
        q = potential.gaussian_well(-1.0)
        shift = conf.get("PROFILE_SHIFT")
        k = np.linspace(-10.0, 10.0, 1000)
        base = scattering_data(q, k)
        moved = potential.shifted(q, shift)
        retried = ScatteringData(scattering_coefficients(moved, k), bound_states(moved),
                                 shift=shift)
        for x in (0.5, 2.0):
            u_base, _ = determinant.u_point(base, x, 0.1)
            u_retried, _ = determinant.u_point(retried, x, 0.1)
            self.assertAlmostEqual(u_retried, u_base, delta=1e-6)


class SplitTests(SimpleTestCase):
    def test_reflection_splits_into_right_part_and_G(self):
        split = split_reflection(two_wells(), np.linspace(0.2, 6.0, 12))
        self.assertLess(split.defect, 1e-6)
        self.assertGreaterEqual(len(split.poles), 2)

    def test_right_supported_profile_has_no_G(self):
        split = split_reflection(potential.square_well(-1.0, 0.5, 1.5), K)
        np.testing.assert_array_equal(split.G_values, 0.0)
