"""
BQ_CADMM.py is the BQ-CADMM engine: consensus ADMM for distributed averaging
where every transmitted local variable passes through the bounded quantizer
Q_b. The state is held on an exact integer lattice:

    q = Q_b(x) / delta          (levels)
    a = alpha / (rho delta)     (duals)

so the map (q, a) -> (q', a') is exact and the first repeat of the integer
pair classifies a run as converged (period 1) or cyclic (period T >= 2).

>>> from bq_consensus import Graph, Quantizer, BQ_CADMM
>>> g = Graph.build_graph(2, [(0, 1)])
>>> spec = Quantizer.QuantizerSpec(delta=1., range_l=5.)
>>> cfg = BQ_CADMM.BqConfig(g, [0.3, 1.7], rho=0.25, spec=spec)
>>> outcome = BQ_CADMM.run(cfg)
>>> outcome.kind, outcome.k0, outcome.q_star
('converged', 2, 1)
"""
import logging
import numbers
from fractions import Fraction
import numpy as np

from .Quantizer import bounded_level, project
from ..exceptions import InvariantViolation, OutcomeError, PreconditionError


logger = logging.getLogger(__name__)

CONVERGED = 'converged'
CYCLIC = 'cyclic'
UNRESOLVED = 'unresolved'

DEFAULT_MAX_ITER = 10 ** 6
DEFAULT_TABLE_LIMIT = 10 ** 6
_OVERFLOW_GUARD = 2 ** 62
_BOUND_RTOL = 1e-12


class IntState(object):
    """
    Exact BQ-CADMM state

    Parameters:
    ----------
    :param np.ndarray q: integer levels, Q_b(x) / delta
    :param np.ndarray a: integer duals, alpha / (rho delta)
    :param np.ndarray x: real local variables
    :param int k: iteration index
    """
    def __init__(self, q, a, x, k=0):
        self.q = _as_lattice(q, 'q')
        self.a = _as_lattice(a, 'a')
        self.x = np.array(x, dtype=float)
        self.k = int(k)
        if not self.q.shape == self.a.shape == self.x.shape:
            raise PreconditionError('q, a and x must have the same shape')

    @classmethod
    def initial(cls, spec, n, x0=None):
        """
        Algorithm start state: x0 (default 0), q0 = Q_b(x0) / delta, a0 = 0
        """
        x0 = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
        if x0.shape != (n,):
            raise PreconditionError('x0 must have length {}'.format(n))
        q0 = np.asarray(bounded_level(x0, spec), dtype=np.int64)
        return cls(q0, np.zeros(n, dtype=np.int64), x0, 0)

    @property
    def key(self):
        return self.q.tobytes() + self.a.tobytes()

    def alpha(self, rho, delta):
        return rho * delta * self.a

    def levels(self, delta):
        return self.q * delta

    def copy(self):
        return IntState(self.q.copy(), self.a.copy(), self.x.copy(), self.k)


def _as_lattice(values, name):
    arr = np.asarray(values)
    if np.issubdtype(arr.dtype, np.integer):
        return arr.astype(np.int64)
    arr = arr.astype(float)
    if not np.all(np.isfinite(arr)) or not np.all(arr == np.round(arr)):
        raise PreconditionError('{} must be integer valued on the lattice'
                                .format(name))
    return arr.astype(np.int64)


class BqConfig(object):
    """
    Inputs of one BQ-CADMM run.

    Parameters:
    ----------
    :param Graph graph: network topology
    :param np.ndarray r: local data, never truncated
    :param float rho: step size > 0
    :param QuantizerSpec spec: bounded quantizer
    :param int max_iter: iteration cap >= 1
    :param IntState init: optional warm start state
    :param np.ndarray x0: optional initial local variables (alpha0 = 0),
        ignored when init is supplied
    """
    def __init__(self, graph, r, rho, spec, max_iter=DEFAULT_MAX_ITER,
                 init=None, x0=None):
        self.graph = graph
        self.spec = spec
        self.r = r
        self.rho = rho
        self.max_iter = max_iter
        if init is None:
            init = IntState.initial(spec, graph.n, x0)
        self.init = init

    def __setattr__(self, obj, value):
        """
        Validates run inputs as they are set
        """
        if obj == 'r':
            value = np.array(value, dtype=float)
            if value.shape != (self.graph.n,):
                raise PreconditionError('data vector must have length {}'
                                        .format(self.graph.n))
            if not np.all(np.isfinite(value)):
                raise PreconditionError('data vector must be finite')
            value.flags.writeable = False

        elif obj == 'rho':
            if isinstance(value, bool) or not value > 0 or not np.isfinite(value):
                raise PreconditionError('rho must be positive and finite, '
                                        'got {}'.format(value))
            value = float(value)

        elif obj == 'max_iter':
            if isinstance(value, bool) or not isinstance(value, numbers.Integral) \
                    or value < 1:
                raise PreconditionError('max_iter must be an integer >= 1, '
                                        'got {!r}'.format(value))
            value = int(value)

        elif obj == 'init':
            if not isinstance(value, IntState):
                raise PreconditionError('init must be an IntState')
            if value.q.shape != (self.graph.n,):
                raise PreconditionError('init state must have length {}'
                                        .format(self.graph.n))
            if np.any(np.abs(value.q) > self.spec.max_level):
                raise PreconditionError('init levels outside [-L/delta, L/delta]')
            if value.a.sum() != 0:
                raise PreconditionError('init duals must sum to zero')

        super(BqConfig, self).__setattr__(obj, value)

    @property
    def rbar(self):
        return float(self.r.mean())

    def replace(self, **kwargs):
        """
        Returns a copy of the configuration with some fields replaced
        """
        params = {'graph': self.graph, 'r': self.r, 'rho': self.rho,
                  'spec': self.spec, 'max_iter': self.max_iter,
                  'init': self.init}
        params.update(kwargs)
        return BqConfig(**params)


class BoundSet(object):
    """
    Error radii and state count diagnostics of a BQ-CADMM configuration

    Parameters:
    ----------
    :param float gamma0: cyclic quantization error scale
    :param float bound_convergent: (1 + 4 rho m / n) delta / 2
    :param float bound_cyclic: (1 + 4 rho m / n) gamma0
    :param float state_count_B: network bound on local variable states
    :param np.ndarray state_count_per_node: per-node state bound
    :param float tight_bound_cyclic: cyclic radius with L replaced by delta
        in gamma0, reported only
    """
    def __init__(self, gamma0, bound_convergent, bound_cyclic,
                 state_count_B=None, state_count_per_node=None,
                 tight_bound_cyclic=None):
        self.gamma0 = gamma0
        self.bound_convergent = bound_convergent
        self.bound_cyclic = bound_cyclic
        self.state_count_B = state_count_B
        self.state_count_per_node = state_count_per_node
        self.tight_bound_cyclic = tight_bound_cyclic

    def to_dict(self):
        d = {'gamma0': self.gamma0,
             'bound_convergent': self.bound_convergent,
             'bound_cyclic': self.bound_cyclic,
             'state_count_B': self.state_count_B,
             'tight_bound_cyclic': self.tight_bound_cyclic}
        return d


class ForcedConvergence(object):
    """
    Prediction that a run must converge. level is sgn(rbar) L when it is
    known, None otherwise.
    """
    def __init__(self, level=None):
        self.level = level

    def __repr__(self):
        return 'ForcedConvergence(level={})'.format(self.level)


def gamma0(rho, n, spec):
    """
    Cyclic error scale, max{delta / 2, 4 rho n L / (1 + 2 rho n)}
    """
    return max(spec.delta / 2.,
               4. * rho * n * spec.range_l / (1. + 2. * rho * n))


def bounds(rho, g, spec, r=None):
    """
    Consensus error radii for a BQ-CADMM configuration.

    Parameters:
    ----------
    :param float rho: step size
    :param Graph g: topology
    :param QuantizerSpec spec: quantizer
    :param np.ndarray r: optional data vector, needed for the state counts

    Returns:
    -------
    :return: BoundSet
    """
    n, m = g.n, g.m
    delta, L = spec.delta, spec.range_l
    scale = 1. + 4. * rho * m / n
    g0 = gamma0(rho, n, spec)
    tight = max(delta / 2., 4. * rho * n * delta / (1. + 2. * rho * n))

    state_count = None
    per_node = None
    if r is not None:
        abs_r = np.abs(np.asarray(r, dtype=float))
        levels = 2. * L / delta + 1.
        per_node = levels * ((L + abs_r) / (rho * delta)
                             + 6. * g.degrees * L / delta)
        state_count = float(levels * ((L + abs_r.max()) / (rho * delta)
                                      + 6. * n * L / delta))

    return BoundSet(g0, scale * delta / 2., scale * g0, state_count,
                    per_node, scale * tight)


def predict_forced_level(rho, g, spec, rbar):
    """
    Predicts forced convergence when the data mean lies far outside the
    quantizer range: |rbar| - L > (1 + 4 rho m / n) gamma0. If additionally
    rho < n / (4 m), the common level is sgn(rbar) L.

    Returns:
    -------
    :return: None or ForcedConvergence
    """
    radius = (1. + 4. * rho * g.m / g.n) * gamma0(rho, g.n, spec)
    if not abs(rbar) - spec.range_l > radius:
        return None
    if rho < g.n / (4. * g.m):
        return ForcedConvergence(float(np.sign(rbar)) * spec.range_l)
    return ForcedConvergence(None)


class _Kernel(object):
    """
    Precomputed per-run quantities of the lattice update
    """
    def __init__(self, graph, r, rho, spec, a0=None):
        self.spec = spec
        self.r = r
        self.rho_delta = rho * spec.delta
        self.Lplus = graph.matrices.Lplus
        self.Lminus_int = graph.matrices.Lminus_int
        self.denom = 1. + 2. * rho * graph.degrees
        # dual bound in lattice units, widened to a warm start dual above it
        a_max = ((1. + 6. * rho * graph.degrees) * spec.range_l + np.abs(r)) \
            / self.rho_delta
        if a0 is not None:
            a_max = np.maximum(a_max, np.abs(a0))
        self.a_max = a_max * (1. + _BOUND_RTOL) + 1e-9

    def step(self, q, a):
        x = (self.rho_delta * (self.Lplus.dot(q) - a) + self.r) / self.denom
        q_new = np.asarray(bounded_level(x, self.spec), dtype=np.int64)
        a_new = a + self.Lminus_int.dot(q_new)
        return x, q_new, a_new

    def check(self, q, a, k):
        if np.max(np.abs(a)) > _OVERFLOW_GUARD:
            raise InvariantViolation('dual lattice overflow', k)
        if a.sum() != 0:
            raise InvariantViolation('dual sum {} is not zero'.format(a.sum()), k)
        bad = np.nonzero(np.abs(a) > self.a_max)[0]
        if bad.size:
            raise InvariantViolation('dual bound exceeded at nodes {}'
                                     .format(bad.tolist()), k)


def bq_step(s, g, rho, r, spec):
    """
    One BQ-CADMM iteration on the integer lattice:

        x_i' = (rho|N_i| delta q_i + rho sum_j delta q_j - rho delta a_i + r_i)
               / (1 + 2 rho|N_i|)
        q' = Q_b(x') / delta
        a' = a + Lminus q'

    Parameters:
    ----------
    :param IntState s: current state
    :param Graph g: topology
    :param float rho: step size
    :param np.ndarray r: data vector
    :param QuantizerSpec spec: quantizer

    Returns:
    -------
    :return: IntState at k + 1
    """
    r = np.asarray(r, dtype=float)
    kernel = _Kernel(g, r, rho, spec, s.a)
    x, q, a = kernel.step(s.q, s.a)
    kernel.check(q, a, s.k + 1)
    return IntState(q, a, x, s.k + 1)


def advance(cfg, n_iter, check_invariants=True):
    """
    Runs exactly n_iter iterations from cfg.init without cycle detection

    :param BqConfig cfg: run configuration
    :param int n_iter: number of iterations
    :param bool check_invariants: check dual conservation and bounds
    :return: IntState
    """
    kernel = _Kernel(cfg.graph, cfg.r, cfg.rho, cfg.spec, cfg.init.a)
    q, a, x = cfg.init.q, cfg.init.a, cfg.init.x
    k = cfg.init.k
    for _ in range(n_iter):
        x, q, a = kernel.step(q, a)
        k += 1
        if check_invariants:
            kernel.check(q, a, k)
    return IntState(q, a, x, k)


def _brent(kernel, q, a, budget):
    """
    Brent's cycle finding on the deterministic lattice map, started from
    (q, a). Returns (mu, lam), the offset of the cycle start and the
    period, or None if budget steps are exhausted.
    """
    def key(state):
        return state[0].tobytes() + state[1].tobytes()

    def f(state):
        _, q_new, a_new = kernel.step(*state)
        return q_new, a_new

    steps = 1
    power = lam = 1
    tortoise = (q, a)
    hare = f(tortoise)
    while key(tortoise) != key(hare):
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
        steps += 1
        if steps > budget:
            return None

    tortoise = hare = (q, a)
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while key(tortoise) != key(hare):
        tortoise = f(tortoise)
        hare = f(hare)
        mu += 1
        steps += 2
        if steps > budget:
            return None
    return mu, lam


class RunOutcome(object):
    """
    Classified result of a BQ-CADMM run.

    Parameters:
    ----------
    :param str kind: 'converged', 'cyclic' or 'unresolved'
    :param BqConfig cfg: configuration that produced the outcome
    :param int k0: first iteration whose state recurs
    :param int period: distance to the first repeat
    :param np.ndarray cycle_levels: (period x n) integer levels over one period
    :param np.ndarray cycle_x: (period x n) local variables over one period
    :param int iterations: iterations executed
    :param IntState final_state: state after the last iteration
    :param dict trace: optional per-iteration arrays 'k', 'x', 'q', 'a'
    """
    def __init__(self, kind, cfg, k0=None, period=None, cycle_levels=None,
                 cycle_x=None, iterations=0, final_state=None, trace=None):
        self.kind = kind
        self.k0 = k0
        self.period = period
        self.cycle_levels = cycle_levels
        self.cycle_x = cycle_x
        self.iterations = iterations
        self.max_iter = cfg.max_iter
        self.final_state = final_state
        self.trace = trace
        self.rho = cfg.rho
        self.delta = cfg.spec.delta
        self.range_l = cfg.spec.range_l
        self.rbar = cfg.rbar
        self.bounds = bounds(cfg.rho, cfg.graph, cfg.spec, cfg.r)

        self.q_star = None
        self.xbar_levels = None
        if kind == CONVERGED:
            self.q_star = int(cycle_levels[0, 0])
        elif kind == CYCLIC:
            self.xbar_levels = Fraction(int(cycle_levels[:, 0].sum()), period)

    @property
    def xbar_q(self):
        """
        Cyclic sample average over one period
        """
        if self.xbar_levels is None:
            return None
        return float(self.xbar_levels * Fraction(self.delta))

    @property
    def consensus_value(self):
        if self.kind == CONVERGED:
            return self.q_star * self.delta
        elif self.kind == CYCLIC:
            return self.xbar_q
        return None

    @property
    def target(self):
        """
        Reference value of the error: T_X(rbar) when converged, rbar otherwise
        """
        if self.kind == CONVERGED:
            return project(self.rbar, self.range_l)
        return self.rbar

    @property
    def consensus_error(self):
        if self.kind == UNRESOLVED:
            return None
        return abs(self.consensus_value - self.target)

    @property
    def error_bound(self):
        if self.kind == CONVERGED:
            return self.bounds.bound_convergent
        elif self.kind == CYCLIC:
            return self.bounds.bound_cyclic
        return None

    @property
    def bound_ok(self):
        if self.kind == UNRESOLVED:
            return None
        bound = self.error_bound
        return bool(self.consensus_error <= bound * (1. + _BOUND_RTOL) + 1e-12)

    @property
    def convergence_time(self):
        """
        k0 for converged runs, k0 + T for cyclic runs
        """
        if self.kind == CONVERGED:
            return self.k0
        elif self.kind == CYCLIC:
            return self.k0 + self.period
        return None

    @property
    def level_span(self):
        """
        Largest number of distinct consecutive levels a node visits in the
        cycle, minus one
        """
        if self.cycle_levels is None:
            return None
        spans = self.cycle_levels.max(axis=0) - self.cycle_levels.min(axis=0)
        return int(spans.max())

    @property
    def resolved(self):
        return self.kind != UNRESOLVED

    def to_dict(self):
        """
        JSON ready summary of the outcome
        """
        d = {'kind': self.kind,
             'k0': self.k0,
             'period': self.period,
             'iterations': self.iterations,
             'rho': self.rho,
             'rbar': self.rbar,
             'bounds': self.bounds.to_dict()}
        if self.kind == CONVERGED:
            d['q_star'] = self.q_star * self.delta
        elif self.kind == CYCLIC:
            d['xbar_q'] = self.xbar_q
            d['level_span'] = self.level_span
        if self.resolved:
            d['consensus_value'] = self.consensus_value
            d['consensus_error'] = self.consensus_error
            d['bound_ok'] = self.bound_ok
        return d

    def __repr__(self):
        return 'RunOutcome(kind={}, k0={}, period={})'.format(self.kind,
                                                               self.k0,
                                                               self.period)


def run(cfg, **kwargs):
    """
    Runs BQ-CADMM until the integer state (q, a) first repeats or max_iter
    iterations have been taken. States are kept in a lookup table up to
    table_limit entries; beyond that Brent's algorithm locates the cycle.

    Parameters:
    ----------
    :param BqConfig cfg: run configuration
    :keyword bool trace: record x, q and a at every iteration
    :keyword int min_iter: keep iterating after detection until this many
        iterations have run (fixed budget reporting)
    :keyword int table_limit: size of the visited state table
    :keyword bool check_invariants: raise InvariantViolation on a broken
        dual bound, dual sum, or cycle average

    Returns:
    -------
    :return: RunOutcome
    """
    params = {'trace': False,
              'min_iter': 0,
              'table_limit': DEFAULT_TABLE_LIMIT,
              'check_invariants': True}
    params.update(kwargs)

    graph, spec = cfg.graph, cfg.spec
    max_iter = max(cfg.max_iter, params['min_iter'])
    kernel = _Kernel(graph, cfg.r, cfg.rho, spec, cfg.init.a)
    check = params['check_invariants']

    logger.debug('[Running BQ-CADMM, n=%d, rho=%g]', graph.n, cfg.rho)

    q, a, x = cfg.init.q, cfg.init.a, cfg.init.x
    k_start = cfg.init.k
    records = None
    if params['trace']:
        records = [(0, x, q, a)]

    table = {}
    k = 0
    detected = None
    pending = None
    snapshot = None
    while k < max_iter:
        if detected is None and k >= cfg.max_iter:
            break

        x, q, a = kernel.step(q, a)
        k += 1
        if check:
            kernel.check(q, a, k_start + k)
        if records is not None:
            records.append((k, x, q, a))

        if detected is None:
            if pending is not None:
                if k == pending[0] + pending[1]:
                    detected = pending
            else:
                key = q.tobytes() + a.tobytes()
                j = table.get(key)
                if j is not None:
                    detected = (j, k - j)
                elif len(table) < params['table_limit']:
                    table[key] = k
                else:
                    logger.info('[State table full at iteration %d, '
                                'switching to Brent]', k)
                    table = {}
                    found = _brent(kernel, q, a, cfg.max_iter - k)
                    if found is None:
                        break
                    mu, lam = found
                    pending = (k + mu, lam)
            if detected is not None:
                snapshot = (q, a, k)

        if detected is not None and k >= params['min_iter']:
            break

    final_state = IntState(q, a, x, k_start + k)
    trace = None
    if records is not None:
        trace = {'k': np.array([rec[0] for rec in records]),
                 'x': np.array([rec[1] for rec in records]),
                 'q': np.array([rec[2] for rec in records]),
                 'a': np.array([rec[3] for rec in records])}

    if detected is None:
        logger.debug('[BQ-CADMM unresolved after %d iterations]', k)
        return RunOutcome(UNRESOLVED, cfg, iterations=k,
                          final_state=final_state, trace=trace)

    k0, period = detected
    cycle_levels, cycle_x = _one_period(kernel, snapshot[0], snapshot[1], period)
    kind = CONVERGED if period == 1 else CYCLIC

    if check:
        sums = cycle_levels.sum(axis=0)
        if kind == CONVERGED and np.any(cycle_levels != cycle_levels[0, 0]):
            raise InvariantViolation('period one repeat without consensus',
                                     k_start + k0)
        if kind == CYCLIC and np.any(sums != sums[0]):
            raise InvariantViolation('per-node cycle averages differ: {}'
                                     .format(sums.tolist()), k_start + k0)

    logger.debug('[BQ-CADMM %s: k0=%d, period=%d]', kind, k0, period)
    return RunOutcome(kind, cfg, k0=k0, period=period,
                      cycle_levels=cycle_levels, cycle_x=cycle_x,
                      iterations=k, final_state=final_state, trace=trace)


def _one_period(kernel, q, a, period):
    levels = []
    xs = []
    for _ in range(period):
        x, q, a = kernel.step(q, a)
        levels.append(q)
        xs.append(x)
    return np.array(levels), np.array(xs)


def cycle_stats(o):
    """
    Per-node sample averages of the quantized values over one period and
    their common value.

    Parameters:
    ----------
    :param RunOutcome o: cyclic outcome

    Returns:
    -------
    :return: (list of Fraction, float) per-node averages in value units
        and the cyclic consensus value
    """
    if o.kind != CYCLIC:
        raise OutcomeError('cycle_stats requires a cyclic outcome, got {}'
                           .format(o.kind))
    delta = Fraction(o.delta)
    sums = o.cycle_levels.sum(axis=0)
    averages = [Fraction(int(total), o.period) * delta for total in sums]
    if any(avg != averages[0] for avg in averages):
        raise InvariantViolation('per-node cycle averages differ')
    return averages, float(averages[0])


def x_range_limit(rho, g, spec):
    """
    Per-node bound on |x_i| once the run is cycling,
    L + 4 rho |N_i| L / (1 + 2 rho |N_i|)
    """
    d = g.degrees
    L = spec.range_l
    return L + 4. * rho * d * L / (1. + 2. * rho * d)
