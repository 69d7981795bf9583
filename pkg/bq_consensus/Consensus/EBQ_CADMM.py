"""
Extended BQ-CADMM. Repeated BQ-CADMM calls where, every time a call
converges at the edge of the quantizer range (+/- L), each node adds
sgn(x_BQ) L to its offset t_i and subtracts it from its data. The final
consensus estimate is t* + x_BQ.

>>> from bq_consensus import Graph, Quantizer, BQ_CADMM, EBQ_CADMM
>>> g = Graph.build_graph(2, [(0, 1)])
>>> spec = Quantizer.QuantizerSpec(1., 5.)
>>> cfg = BQ_CADMM.BqConfig(g, [12., 14.], rho=0.01, spec=spec)
>>> out = EBQ_CADMM.run_ebq(cfg)
>>> out.t_star, out.x_bq, len(out.calls)
(10.0, 3.0, 3)
"""
import logging
import math
import numpy as np

from . import BQ_CADMM as bq
from ..exceptions import InvariantViolation, PreconditionError


logger = logging.getLogger(__name__)

_TOL = 1e-12


def accuracy_bound(rho, g, spec):
    """
    EBQ-CADMM consensus error radius, (1 + 4 rho m / n) delta / 2. Holds when
    gamma0 <= delta / 2 and L is large compared with the radius.
    """
    return (1. + 4. * rho * g.m / g.n) * spec.delta / 2.


def call_bound(rbar, range_l):
    """
    Largest number of BQ-CADMM calls, ceil(|rbar| / L) + 1
    """
    return int(math.ceil(abs(rbar) / range_l)) + 1


def recovery_bound(rho, g, spec):
    """
    Per-node bound on the recovery residuals, L + 8 rho |N_i| L
    """
    return spec.range_l * (1. + 8. * rho * g.degrees)


def recovery_residuals(final, t_star, rho, r, g, delta):
    """
    Residual data -alpha_i + r_i - t* left at each node after an EBQ-CADMM
    run. The residuals average to rbar - t*.

    Parameters:
    ----------
    :param IntState final: final state of the last BQ-CADMM call
    :param float t_star: accumulated offset
    :param float rho: step size
    :param np.ndarray r: original data vector
    :param Graph g: topology
    :param float delta: quantizer resolution. IntState keeps the duals as
        integers alpha / (rho delta), so delta is needed to recover alpha

    Returns:
    -------
    :return: np.ndarray of residuals
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (g.n,):
        raise PreconditionError('data vector must have length {}'.format(g.n))
    return -final.alpha(rho, delta) + r - t_star


class EbqOutcome(object):
    """
    Result of an EBQ-CADMM run

    Parameters:
    ----------
    :param BqConfig cfg: configuration, with the original data
    :param np.ndarray offsets: per-node accumulated offsets t_i
    :param list calls: RunOutcome of every BQ-CADMM call
    """
    def __init__(self, cfg, offsets, calls):
        self.offsets = offsets
        self.calls = calls
        self.rho = cfg.rho
        self.delta = cfg.spec.delta
        self.range_l = cfg.spec.range_l
        self.r = cfg.r
        self.rbar = cfg.rbar
        self.graph = cfg.graph
        self.radius = accuracy_bound(cfg.rho, cfg.graph, cfg.spec)
        self.call_bound = call_bound(self.rbar, self.range_l)

    @property
    def t_star(self):
        return float(self.offsets[0])

    @property
    def kind(self):
        return self.calls[-1].kind

    @property
    def resolved(self):
        return self.calls[-1].resolved

    @property
    def x_bq(self):
        return self.calls[-1].consensus_value

    @property
    def final_state(self):
        return self.calls[-1].final_state

    @property
    def total_iterations(self):
        return sum(call.iterations for call in self.calls)

    @property
    def convergence_time(self):
        """
        Iterations of all calls but the last plus the last call's
        convergence time
        """
        last = self.calls[-1].convergence_time
        if last is None:
            return None
        return sum(call.iterations for call in self.calls[:-1]) + last

    @property
    def consensus_value(self):
        if not self.resolved:
            return None
        return self.t_star + self.x_bq

    @property
    def consensus_error(self):
        if not self.resolved:
            return None
        return abs(self.consensus_value - self.rbar)

    @property
    def interior(self):
        """
        True when the final call converged strictly inside the range
        """
        last = self.calls[-1]
        return last.kind == bq.CONVERGED and \
            abs(last.q_star) * self.delta < self.range_l

    @property
    def bound_ok(self):
        """
        Final error check against the accuracy radius for interior
        finishes; the final call's own bound otherwise
        """
        if not self.resolved:
            return None
        if self.interior:
            return bool(self.consensus_error <= self.radius * (1. + _TOL) + _TOL)
        return self.calls[-1].bound_ok

    @property
    def calls_ok(self):
        return len(self.calls) <= self.call_bound

    @property
    def residuals(self):
        return recovery_residuals(self.final_state, self.t_star, self.rho,
                                  self.r, self.graph, self.delta)

    @property
    def trace(self):
        """
        Concatenated per-iteration trace over all calls with the running
        offset, or None when the calls were not traced
        """
        if any(call.trace is None for call in self.calls):
            return None
        columns = {'k': [], 'call': [], 'x': [], 'q': [], 'a': [], 't': []}
        shift = 0
        t = 0.
        for number, call in enumerate(self.calls):
            tr = call.trace
            start = 0 if number == 0 else 1
            columns['k'].append(tr['k'][start:] + shift)
            columns['call'].append(np.full(len(tr['k']) - start, number))
            for key in ('x', 'q', 'a'):
                columns[key].append(tr[key][start:])
            columns['t'].append(np.full(len(tr['k']) - start, t))
            shift += call.iterations
            if number < len(self.calls) - 1:
                t += np.sign(call.q_star) * self.range_l
        return {key: np.concatenate(value) for key, value in columns.items()}

    def to_dict(self):
        d = {'kind': self.kind,
             't_star': self.t_star,
             'x_bq': self.x_bq,
             'rbar': self.rbar,
             'rho': self.rho,
             'total_iterations': self.total_iterations,
             'accuracy_bound': self.radius,
             'call_bound': self.call_bound,
             'calls': [call.to_dict() for call in self.calls]}
        if self.resolved:
            d['consensus_value'] = self.consensus_value
            d['consensus_error'] = self.consensus_error
            d['bound_ok'] = self.bound_ok
        return d


def run_ebq(cfg, **kwargs):
    """
    Runs EBQ-CADMM.

    Parameters:
    ----------
    :param BqConfig cfg: configuration with the original data. cfg.init is
        used by the first call only; later calls start from zero.
    :keyword int budget: run every call for exactly this many iterations
        (fixed budget mode); default runs each call to detection
    :keyword bool enforce_precondition: raise PreconditionError unless
        gamma0 <= delta / 2 (default True); when False a breach is logged
    :keyword bool trace: record per-iteration traces of every call
    :keyword bool check_invariants: assert offset consensus, shrinking data
        mean and the call count bound
    :keyword int table_limit: state table size of each call

    Returns:
    -------
    :return: EbqOutcome
    """
    params = {'budget': None,
              'enforce_precondition': True,
              'trace': False,
              'check_invariants': True,
              'table_limit': bq.DEFAULT_TABLE_LIMIT}
    params.update(kwargs)

    graph, spec = cfg.graph, cfg.spec
    L = spec.range_l
    g0 = bq.gamma0(cfg.rho, graph.n, spec)
    precondition = g0 <= spec.delta / 2. * (1. + _TOL)
    if not precondition:
        msg = 'gamma0 = {:.6g} exceeds delta / 2; pick rho <= {:.6g}'.format(
            g0, spec.delta / (2. * graph.n * (4. * L - spec.delta)))
        if params['enforce_precondition']:
            raise PreconditionError(msg)
        logger.warning('[EBQ-CADMM: %s]', msg)

    radius = accuracy_bound(cfg.rho, graph, spec)
    if L < 5. * radius:
        logger.warning('[EBQ-CADMM: L = %g is not large compared with the '
                       'error radius %g]', L, radius)

    run_kwargs = {'trace': params['trace'],
                  'table_limit': params['table_limit']}
    if params['budget'] is not None:
        run_kwargs['min_iter'] = params['budget']

    max_calls = call_bound(cfg.rbar, L)
    offsets = np.zeros(graph.n)
    calls = []
    call_cfg = cfg
    if params['budget'] is not None:
        call_cfg = cfg.replace(max_iter=params['budget'])

    while True:
        outcome = bq.run(call_cfg, **run_kwargs)
        calls.append(outcome)
        logger.debug('[EBQ-CADMM call %d: %s]', len(calls), outcome.kind)

        if outcome.kind != bq.CONVERGED or \
                abs(outcome.q_star) != spec.max_level:
            break

        if len(calls) >= max_calls:
            msg = 'EBQ-CADMM needs more than {} calls'.format(max_calls)
            if params['check_invariants'] and precondition:
                raise InvariantViolation(msg)
            logger.warning('[%s, stopping]', msg)
            break

        # each node shifts by the sign of its own converged level
        signs = np.sign(outcome.cycle_levels[0])
        offsets = offsets + signs * L
        if params['check_invariants'] and np.any(offsets != offsets[0]):
            raise InvariantViolation('offsets differ across nodes')

        data = cfg.r - offsets
        if params['check_invariants'] and precondition and \
                not abs(data.mean()) < abs(call_cfg.rbar):
            raise InvariantViolation('data mean did not shrink after call {}'
                                     .format(len(calls)))

        call_cfg = call_cfg.replace(r=data, init=None)

    return EbqOutcome(cfg, offsets, calls)
