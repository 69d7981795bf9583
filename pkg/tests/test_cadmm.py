import numpy as np
import pytest

from bq_consensus import Graph, CADMM
from bq_consensus.Consensus.CADMM import CadmmState
from bq_consensus.Consensus.Quantizer import QuantizerSpec
from bq_consensus.exceptions import ColumnSpaceError, PreconditionError


class TestCadmmStep:
    def test_first_step(self, two_node):
        s = CADMM.cadmm_step(CadmmState.zeros(2), two_node, 0.5, [0., 2.])
        np.testing.assert_allclose(s.x, [0., 1.])
        np.testing.assert_allclose(s.alpha, [-0.5, 0.5])
        assert s.k == 1

    def test_fixed_point_is_stationary(self, two_node):
        x_star, alpha_star = CADMM.fixed_point([0., 2.])
        s = CADMM.cadmm_step(CadmmState(x_star, alpha_star), two_node, 0.5,
                             [0., 2.])
        np.testing.assert_allclose(s.x, x_star)
        np.testing.assert_allclose(s.alpha, alpha_star)

    def test_long_run(self, two_node):
        s = CadmmState.zeros(2)
        for _ in range(1000):
            s = CADMM.cadmm_step(s, two_node, 0.5, [0., 2.])
        np.testing.assert_allclose(s.x, [1., 1.], atol=1e-6)

    def test_dual_conservation(self, rng):
        g = Graph.generate('random_connected', 12, rng=rng, m=25)
        r = rng.normal(size=12)
        s = CadmmState.zeros(12)
        for _ in range(50):
            s = CADMM.cadmm_step(s, g, 0.7, r)
            assert abs(s.alpha.sum()) < 1e-10

    def test_projection_form(self, two_node):
        spec = QuantizerSpec(1., 5.)
        s = CadmmState([8., 1.], [0., 0.])
        projected = CADMM.cadmm_step(s, two_node, 1., [0., 0.], spec=spec)
        plain = CADMM.cadmm_step(CadmmState([5., 1.], [0., 0.]), two_node, 1.,
                                 [0., 0.])
        np.testing.assert_allclose(projected.x, plain.x)

    def test_non_positive_rho(self, two_node):
        with pytest.raises(PreconditionError):
            CADMM.cadmm_step(CadmmState.zeros(2), two_node, 0., [0., 2.])


class TestFixedPoint:
    @pytest.mark.parametrize('r, x, alpha', [([0., 2.], [1., 1.], [-1., 1.]),
                                             ([3., 3., 3.], [3., 3., 3.], [0., 0., 0.]),
                                             ([1., 2., 3.], [2., 2., 2.], [-1., 0., 1.])])
    def test_fixed_point(self, r, x, alpha):
        x_star, alpha_star = CADMM.fixed_point(r)
        np.testing.assert_allclose(x_star, x)
        np.testing.assert_allclose(alpha_star, alpha)


class TestTransitionMatrix:
    def test_fixed_point(self, rng):
        g = Graph.generate('intermediate', 8, rng=rng)
        r = rng.normal(size=8)
        x_star, alpha_star = CADMM.fixed_point(r)
        s = np.concatenate([x_star, alpha_star, r])
        np.testing.assert_allclose(CADMM.transition_matrix(g, 0.8).dot(s), s,
                                   atol=1e-12)

    def test_two_node(self, two_node):
        D = CADMM.transition_matrix(two_node, 0.5)
        s = D.dot([0., 0., 0., 0., 0., 2.])
        np.testing.assert_allclose(s, [0., 1., -0.5, 0.5, 0., 2.])
        np.testing.assert_array_equal(D[4:, 4:], np.eye(2))
        np.testing.assert_array_equal(D[4:, :4], 0.)

    def test_matches_step(self, rng):
        g = Graph.generate('random_connected', 10, rng=rng, m=18)
        D = CADMM.transition_matrix(g, 1.3)
        for _ in range(20):
            s = CadmmState(rng.normal(size=10), rng.normal(size=10))
            r = rng.normal(size=10)
            s1 = CADMM.cadmm_step(s, g, 1.3, r)
            np.testing.assert_allclose(D.dot(s.stack(r)), s1.stack(r),
                                       atol=1e-12)


class TestRates:
    def test_path(self, path3):
        info = CADMM.delta_rate(path3.spectral, 1., 2.)
        assert info.delta_rate == pytest.approx(1. / 6.)

    def test_complete(self, k3):
        info = CADMM.delta_rate(k3.spectral, 1., 2.)
        assert info.delta_rate == pytest.approx(3. / 8.)

    def test_mu_near_one(self, path3):
        assert CADMM.delta_rate(path3.spectral, 1., 1. + 1e-9).delta_rate < 1e-8

    def test_mu_must_exceed_one(self, path3):
        with pytest.raises(PreconditionError):
            CADMM.delta_rate(path3.spectral, 1., 1.)

    def test_best_delta_rate(self, path3):
        best = CADMM.best_delta_rate(path3.spectral, 1.)
        scanned = [CADMM.delta_rate(path3.spectral, 1., mu).delta_rate
                   for mu in CADMM.DEFAULT_MUS]
        assert best.delta_rate == pytest.approx(max(scanned))
        assert best.mu in CADMM.DEFAULT_MUS

    def test_envelope(self, path3):
        c = CADMM.r_linear_envelope(path3.spectral, 1., 1. / 6.)
        assert c == pytest.approx(1. + np.sqrt(6. / (7. / 6.)))


class TestGNorm:
    def test_zero_at_fixed_point(self, two_node):
        x_star, alpha_star = CADMM.fixed_point([0., 2.])
        s = CadmmState(x_star, alpha_star)
        assert CADMM.g_norm_error(s, two_node, 1., [0., 2.]) == \
            pytest.approx(0., abs=1e-12)

    def test_two_node_initial_error(self, two_node):
        err = CADMM.g_norm_error(CadmmState.zeros(2), two_node, 1., [0., 2.])
        assert err ** 2 == pytest.approx(2.5)

    def test_dual_pair(self, two_node):
        u = CADMM.dual_pair(CadmmState([1., 1.], [-1., 1.]), two_node)
        np.testing.assert_allclose(u.z, [1., 1.])
        np.testing.assert_allclose(two_node.matrices.Mminus.dot(u.beta),
                                   [-1., 1.])

    def test_column_space(self, two_node):
        with pytest.raises(ColumnSpaceError):
            CADMM.dual_pair(CadmmState([0., 0.], [1., 1.]), two_node)

    def test_monotone(self, rng):
        g = Graph.generate('random_connected', 10, rng=rng, m=20)
        r = rng.normal(0, 5, size=10)
        run = CADMM.run_cadmm(g, 0.6, r, max_iter=60, tol=0., g_norms=True)
        errors = run.history['g_norm']
        assert np.all(np.diff(errors) <= 1e-9 * errors[:-1] + 1e-12)

    @pytest.mark.parametrize('family, n, m, rho', [
        ('random_connected', 10, 20, 0.6),
        ('random_connected', 12, 40, 3.),
        ('star', 8, None, 0.1),
        ('intermediate', 10, None, 1.)])
    def test_state_within_envelope(self, rng, family, n, m, rho):
        g = Graph.generate(family, n, rng=rng, m=m)
        r = rng.normal(0, 5, size=n)
        run = CADMM.run_cadmm(g, rho, r, max_iter=80, tol=0., trace=True,
                              g_norms=True)
        delta = CADMM.best_delta_rate(g.spectral, rho).delta_rate
        c = CADMM.r_linear_envelope(g.spectral, rho, delta)

        x_star, alpha_star = CADMM.fixed_point(r)
        hist = run.history
        dist = np.sqrt(((hist['x'] - x_star) ** 2).sum(axis=1) +
                       ((hist['alpha'] - alpha_star) ** 2).sum(axis=1))
        g_err = hist['g_norm']
        assert len(dist) == len(g_err) == 81
        slack = 1e-9 * g_err[0]
        assert np.all(dist[1:] <= c * g_err[:-1] * (1. + 1e-9) + slack)


class TestRoughTimeBound:
    def test_zero_data(self, two_node, spec_5):
        assert CADMM.rough_time_bound(two_node, two_node.spectral, 0.5,
                                      [0., 0.], spec_5) == 0.

    def test_two_node(self, two_node, spec_5):
        assert CADMM.rough_time_bound(two_node, two_node.spectral, 0.5,
                                      [0., 2.], spec_5) == pytest.approx(4.)

    def test_rho_scaling(self, two_node, spec_5):
        # r centered on zero leaves only the rho dependent term
        big = CADMM.rough_time_bound(two_node, two_node.spectral, 0.05,
                                     [-1., 1.], spec_5)
        small = CADMM.rough_time_bound(two_node, two_node.spectral, 0.5,
                                       [-1., 1.], spec_5)
        assert big == pytest.approx(100. * small)


class TestRunCadmm:
    def test_converges(self, rng):
        g = Graph.generate('random_connected', 15, rng=rng, m=30)
        r = rng.normal(0, 10, size=15)
        run = CADMM.run_cadmm(g, 1., r, trace=True)
        assert run.converged
        assert run.max_error <= 1e-8
        assert run.history['x'].shape == (run.iterations + 1, 15)
        assert run.history['iterative_error'][0] == \
            pytest.approx(CADMM.iterative_error(np.zeros(15), r.mean()))

    def test_iterative_error(self):
        assert CADMM.iterative_error([0., 2.], 1.) == pytest.approx(1.)
