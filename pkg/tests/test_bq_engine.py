from fractions import Fraction
import numpy as np
import pytest

from bq_consensus import Graph, BQ_CADMM as bq
from bq_consensus.Consensus.BQ_CADMM import BqConfig, IntState
from bq_consensus.Consensus.Quantizer import QuantizerSpec
from bq_consensus.exceptions import OutcomeError, PreconditionError


def cyclic_config(two_node, spec_5, **kwargs):
    # two nodes started from x0 = (1, 0) cycle with period two
    return BqConfig(two_node, [0., 1.], 1., spec_5, x0=[1., 0.], **kwargs)


class TestBqStep:
    def test_two_steps(self, two_node, spec_5):
        s = IntState.initial(spec_5, 2)
        s1 = bq.bq_step(s, two_node, 0.25, [0.3, 1.7], spec_5)
        np.testing.assert_allclose(s1.x, [0.2, 1.7 / 1.5])
        np.testing.assert_array_equal(s1.q, [0, 1])
        np.testing.assert_array_equal(s1.a, [-1, 1])

        s2 = bq.bq_step(s1, two_node, 0.25, [0.3, 1.7], spec_5)
        np.testing.assert_allclose(s2.x, [0.8 / 1.5, 1.7 / 1.5])
        np.testing.assert_array_equal(s2.q, [1, 1])
        np.testing.assert_array_equal(s2.a, [-1, 1])
        assert s2.k == 2

    def test_fixed_point(self, two_node, spec_5):
        s = IntState([1, 1], [-1, 1], [0., 0.], 2)
        s1 = bq.bq_step(s, two_node, 0.25, [0.3, 1.7], spec_5)
        np.testing.assert_array_equal(s1.q, s.q)
        np.testing.assert_array_equal(s1.a, s.a)

    def test_matches_projection_form(self, rng, projection_step):
        spec = QuantizerSpec(0.5, 10.)
        for _ in range(200):
            n = int(rng.integers(3, 10))
            m = int(rng.integers(n - 1, Graph.max_edge_count(n) + 1))
            g = Graph.generate('random_connected', n, rng=rng, m=m)
            rho = float(rng.choice([0.05, 0.3, 1., 4.]))
            r = rng.normal(0., 15., size=n) * rng.choice([1., 100.])
            x = rng.uniform(-15., 15., size=n)
            x[int(rng.integers(n))] = spec.range_l * rng.choice([-1., 1.])
            a = g.matrices.Lminus_int.dot(rng.integers(-5, 6, size=n))
            s = IntState(IntState.initial(spec, n, x).q, a, x)

            x_new, sent_new, alpha_new = projection_step(
                x, rho * spec.delta * a, g, rho, r, spec)
            out = bq.bq_step(s, g, rho, r, spec)
            np.testing.assert_allclose(out.x, x_new, rtol=1e-12, atol=1e-9)
            np.testing.assert_array_equal(out.q * spec.delta, sent_new)
            np.testing.assert_allclose(out.alpha(rho, spec.delta), alpha_new,
                                       rtol=1e-12, atol=1e-9)
            assert np.all(np.abs(out.q) <= spec.max_level)


class TestRun:
    def test_converges(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5))
        assert out.kind == bq.CONVERGED
        assert out.k0 == 2
        assert out.period == 1
        assert out.q_star == 1
        assert out.consensus_value == 1.
        assert out.consensus_error == pytest.approx(0., abs=1e-12)
        assert out.bound_ok
        assert out.convergence_time == 2

    def test_large_rho_converges_at_zero(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 2., spec_5))
        assert out.kind == bq.CONVERGED
        assert out.q_star == 0
        assert out.k0 == 1

    def test_cyclic(self, two_node, spec_5):
        out = bq.run(cyclic_config(two_node, spec_5))
        assert out.kind == bq.CYCLIC
        assert out.k0 == 1
        assert out.period == 2
        np.testing.assert_array_equal(out.cycle_levels, [[1, 0], [0, 1]])
        assert out.xbar_levels == Fraction(1, 2)
        assert out.consensus_value == 0.5
        assert out.consensus_error == 0.
        assert out.error_bound == pytest.approx(24.)
        assert out.bound_ok
        assert out.level_span == 1
        assert out.convergence_time == 3

    def test_cycle_x_range(self, two_node, spec_5):
        out = bq.run(cyclic_config(two_node, spec_5))
        limit = bq.x_range_limit(1., two_node, spec_5)
        assert np.all(np.abs(out.cycle_x) <= limit)

    def test_cycle_stats(self, two_node, spec_5):
        averages, value = bq.cycle_stats(bq.run(cyclic_config(two_node, spec_5)))
        assert averages == [Fraction(1, 2), Fraction(1, 2)]
        assert value == 0.5

    def test_cycle_stats_requires_cycle(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5))
        with pytest.raises(OutcomeError):
            bq.cycle_stats(out)

    def test_zero_init_same_data_converges(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0., 1.], 1., spec_5))
        assert out.kind == bq.CONVERGED
        assert out.q_star == 0
        assert out.k0 == 1
        assert out.consensus_error == pytest.approx(0.5)
        assert out.bound_ok

    def test_unresolved(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5, max_iter=1))
        assert out.kind == bq.UNRESOLVED
        assert out.iterations == 1
        assert out.consensus_value is None
        assert out.bound_ok is None
        assert out.convergence_time is None

    @pytest.mark.parametrize('table_limit', [1, 2])
    def test_brent_fallback(self, two_node, spec_5, table_limit):
        out = bq.run(cyclic_config(two_node, spec_5), table_limit=table_limit)
        assert out.kind == bq.CYCLIC
        assert out.period == 2
        assert out.consensus_value == 0.5

    def test_brent_fallback_converged(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5), table_limit=1)
        assert out.kind == bq.CONVERGED
        assert out.k0 == 2
        assert out.q_star == 1

    def test_min_iter(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5), min_iter=10)
        assert out.iterations == 10
        assert out.k0 == 2
        assert out.final_state.k == 10

    def test_trace(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5), trace=True)
        np.testing.assert_array_equal(out.trace['k'], np.arange(out.iterations + 1))
        np.testing.assert_allclose(out.trace['x'][1], [0.2, 1.7 / 1.5])
        np.testing.assert_array_equal(out.trace['q'][0], [0, 0])

    def test_deterministic(self, rng, spec_30):
        g = Graph.generate('intermediate', 12, rng=rng)
        r = rng.normal(0., 10., size=12)
        cfg = BqConfig(g, r, 0.5, spec_30)
        assert bq.run(cfg).to_dict() == bq.run(cfg).to_dict()

    def test_random_runs_satisfy_bounds(self, rng, spec_30):
        for family in ('star', 'intermediate', 'complete'):
            g = Graph.generate(family, 10, rng=rng)
            for mult in (1e-2, 0.5, 1., 10.):
                r = rng.normal(0., 10., size=10) + rng.normal(0., 5.)
                out = bq.run(BqConfig(g, r, mult * g.n / g.m, spec_30))
                assert out.resolved
                assert out.bound_ok
                if out.kind == bq.CYCLIC:
                    bq.cycle_stats(out)

    def test_data_never_truncated(self, two_node, spec_5):
        cfg = BqConfig(two_node, [100., -3.], 0.1, spec_5)
        np.testing.assert_array_equal(cfg.r, [100., -3.])
        assert cfg.rbar == 48.5


class TestBqConfig:
    def test_data_length(self, two_node, spec_5):
        with pytest.raises(PreconditionError):
            BqConfig(two_node, [1., 2., 3.], 0.5, spec_5)

    def test_non_finite_data(self, two_node, spec_5):
        with pytest.raises(PreconditionError):
            BqConfig(two_node, [1., np.nan], 0.5, spec_5)

    @pytest.mark.parametrize('rho', [0., -1., np.inf])
    def test_rho(self, two_node, spec_5, rho):
        with pytest.raises(PreconditionError):
            BqConfig(two_node, [1., 2.], rho, spec_5)

    def test_max_iter(self, two_node, spec_5):
        with pytest.raises(PreconditionError):
            BqConfig(two_node, [1., 2.], 0.5, spec_5, max_iter=0)

    def test_init_dual_sum(self, two_node, spec_5):
        with pytest.raises(PreconditionError):
            BqConfig(two_node, [1., 2.], 0.5, spec_5,
                     init=IntState([0, 0], [1, 0], [0., 0.]))

    def test_init_levels(self, two_node, spec_5):
        with pytest.raises(PreconditionError):
            BqConfig(two_node, [1., 2.], 0.5, spec_5,
                     init=IntState([9, 0], [0, 0], [0., 0.]))

    def test_non_lattice_state(self):
        with pytest.raises(PreconditionError):
            IntState([0.5, 0], [0, 0], [0., 0.])

    def test_replace(self, two_node, spec_5):
        cfg = BqConfig(two_node, [1., 2.], 0.5, spec_5)
        other = cfg.replace(rho=0.1)
        assert other.rho == 0.1
        assert cfg.rho == 0.5
        np.testing.assert_array_equal(other.r, cfg.r)

    def test_initial_state(self, spec_5):
        s = IntState.initial(spec_5, 3, [7.3, -0.2, 4.4])
        np.testing.assert_array_equal(s.q, [5, 0, 4])
        np.testing.assert_array_equal(s.a, [0, 0, 0])


class TestBounds:
    def test_gamma0_floor(self):
        spec = QuantizerSpec(1., 25.)
        assert bq.gamma0(1. / (8. * 50. * 25.), 50, spec) == 0.5

    def test_gamma0_large_rho(self):
        spec = QuantizerSpec(1., 25.)
        assert bq.gamma0(1e9, 50, spec) == pytest.approx(50., rel=1e-6)

    def test_gamma0_threshold(self):
        spec = QuantizerSpec(1., 5.)
        rho = 1. / (2. * 4. * (4. * 5. - 1.))
        assert bq.gamma0(rho * 0.999, 4, spec) == 0.5

    def test_fig1_bound(self):
        g = Graph.generate('random_connected', 50, rng=1, m=100)
        b = bq.bounds(0.5, g, QuantizerSpec(1., 25.))
        assert b.bound_convergent == pytest.approx(2.5)

    def test_fig2_bound(self):
        g = Graph.generate('random_connected', 75, rng=1, m=200)
        b = bq.bounds(0.5, g, QuantizerSpec(1., 30.))
        assert b.bound_convergent == pytest.approx((1. + 16. / 3.) / 2.)

    def test_cyclic_equals_convergent_at_floor(self, two_node, spec_5):
        b = bq.bounds(0.01, two_node, spec_5)
        assert b.gamma0 == 0.5
        assert b.bound_cyclic == b.bound_convergent

    def test_state_counts(self, two_node, spec_5):
        b = bq.bounds(1., two_node, spec_5, r=[0., 1.])
        # (2L/delta + 1)((L + |r_i|) / (rho delta) + 6 |N_i| L / delta)
        np.testing.assert_allclose(b.state_count_per_node, [11. * 35., 11. * 36.])
        assert b.state_count_B == pytest.approx(11. * (6. + 60.))
        assert b.tight_bound_cyclic <= b.bound_cyclic


class TestForcedLevel:
    def test_forced_level(self, two_node, spec_5):
        forced = bq.predict_forced_level(0.01, two_node, spec_5, 13.)
        assert forced.level == 5.

    def test_no_prediction(self, two_node, spec_5):
        assert bq.predict_forced_level(0.01, two_node, spec_5, 0.) is None

    def test_unknown_level(self, two_node, spec_5):
        # premise holds but rho >= n / (4m)
        forced = bq.predict_forced_level(0.6, two_node, spec_5, 1000.)
        assert forced is not None
        assert forced.level is None

    def test_forced_runs(self, rng):
        spec = QuantizerSpec(1., 5.)
        for _ in range(20):
            g = Graph.generate('intermediate', 10, rng=rng)
            r = rng.normal(20., 1., size=10)
            rho = 0.01
            forced = bq.predict_forced_level(rho, g, spec, r.mean())
            assert forced.level == 5.
            out = bq.run(BqConfig(g, r, rho, spec))
            assert out.kind == bq.CONVERGED
            assert out.q_star * spec.delta == forced.level
