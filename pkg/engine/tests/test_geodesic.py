import numpy as np
from django.test import SimpleTestCase

from engine import geodesic
from engine.constants import DEFAULT_TOLERANCES
from engine.scenarios import s1, s2
from engine.utils import LeftAdmissibleDomainException, StepRejectedException


class GeodesicTests(SimpleTestCase):

    def test_flat_space_geodesics_are_lines(self):
        x0 = np.array([0.1, -0.2, 0.3])
        y0 = np.array([0.5, 0.2, -0.1])
        trajectory = geodesic.geodesic_integrate(s1().fields, x0, y0, 1.0, 0.1)
        self.assertTrue(trajectory.complete)
        self.assertEqual(len(trajectory.states), 11)
        np.testing.assert_allclose(trajectory.end.x, x0 + y0, atol=1e-14)
        np.testing.assert_allclose(trajectory.end.y, y0, atol=1e-14)
        self.assertLess(trajectory.drift, 1e-13)

    def test_step_lands_on_t_end(self):
        trajectory = geodesic.geodesic_integrate(s1().fields, np.zeros(3), [1.0, 0.0, 0.5], 1.0, 0.3)
        self.assertAlmostEqual(trajectory.end.t, 1.0)
        self.assertAlmostEqual(trajectory.step, 0.25)

    def test_norm_is_conserved(self):
        trajectory = geodesic.geodesic_integrate(s2().fields, [0.0, 1.0, 0.0], [1.0, 1.0, 1.0], 1.0, 1e-3)
        self.assertLessEqual(trajectory.drift, DEFAULT_TOLERANCES['geodesic_drift'])

    def test_fourth_order_convergence(self):
        ratio = geodesic.convergence_ratio(s2().fields, [0.0, 1.0, 0.0], [1.0, 1.0, 1.0], 1.0, 0.05)
        self.assertGreaterEqual(ratio, 12.0)
        self.assertLessEqual(ratio, 20.0)

    def test_rows_follow_the_header(self):
        trajectory = geodesic.geodesic_integrate(s1().fields, np.zeros(3), [1.0, 0.0, 0.0], 0.5, 0.25)
        self.assertEqual(trajectory.header(), ['t', 'x0', 'x1', 'x2', 'y0', 'y1', 'y2', 'K', 'residual'])
        for row in trajectory.rows():
            self.assertEqual(len(row), 9)

    def test_leaving_the_admissible_domain(self):
        # b_0 = 0.7 + 0.05 x1^2 reaches 1 at x1 = sqrt(6)
        with self.assertRaises(LeftAdmissibleDomainException) as raised:
            geodesic.geodesic_integrate(s2().fields, [0.0, 2.3, 0.0], [0.2, 1.0, 0.0], 2.0, 1e-2)
        partial = raised.exception.trajectory
        self.assertFalse(partial.complete)
        self.assertGreater(len(partial.states), 1)
        self.assertLess(partial.end.t, 2.0)

    def test_rejected_steps(self):
        for step in (0.0, -0.1, float('nan')):
            with self.assertRaises(StepRejectedException):
                geodesic.geodesic_integrate(s1().fields, np.zeros(3), [1.0, 0.0, 0.0], 1.0, step)
