"""
Seeded Monte Carlo harness for the consensus algorithms. A scenario
expands into independent runs; run j draws its graph, data and common
shift, in that order, from a generator seeded with (seed, j), so results
do not depend on run order or on the number of worker processes.

>>> from bq_consensus import Experiments, eIO
>>> sc = eIO.ScenarioConfig()
>>> sc['family'] = 'star'
>>> sc['n'] = 10
>>> sc['delta'] = 1.
>>> sc['range_l'] = 30.
>>> sc['algorithm'] = 'bq'
>>> sc['runs'] = 20
>>> records = Experiments.run_scenario(sc)
>>> kinds = [rec.kind for rec in records]
"""
import logging
import multiprocessing
import numpy as np
import pandas as pd

from ..Network import Graph
from ..Consensus import Quantizer
from ..Consensus import CADMM
from ..Consensus import BQ_CADMM as bq
from ..Consensus import EBQ_CADMM as ebq
from ..Consensus import Parameter_Select as ps
from ..exceptions import InvariantViolation, ValidationError
from . import Experiment_IO as eIO


logger = logging.getLogger(__name__)

FAILED = 'failed'

SWEEP_COLUMNS = ['family', 'n', 'm', 'rho', 'metric', 'value', 'runs', 'seed']
TABLE1_COLUMNS = ['family', 'n', 'm', 'decreasing', 'fixed', 'runs', 'seed']
ERROR_COLUMNS = ['algorithm', 'case', 'k', 'error']

DEFAULT_SWEEP_DATA = {'mean': 0., 'std': 10., 'common_std': 5., 'offset': 0.}
DEFAULT_SWEEP_QUANTIZER = {'delta': 1., 'range_l': 30.}
DEFAULT_SCHEDULE = {'factor': 10, 'block': 50, 'floor': 1e-4}


def run_rng(seed, run_index):
    """
    Independent generator of run run_index under a master seed
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed),
                                                         int(run_index)]))


def sample_data(data_spec, n, rng):
    """
    Draws r_i ~ N(mean, std^2), then one common shift r0 ~ N(0, common_std^2)
    added to every node, then the constant offset.

    Parameters:
    ----------
    :param dict data_spec: mean, std, common_std and offset
    :param int n: number of nodes
    :param np.random.Generator rng: run generator

    Returns:
    -------
    :return: np.ndarray data vector
    """
    params = {'mean': 0., 'std': 1., 'common_std': 0., 'offset': 0.}
    params.update(data_spec)
    r = rng.normal(params['mean'], params['std'], size=n)
    r = r + rng.normal(0., params['common_std'])
    return r + params['offset']


def scenario_graph(graph_params, rng):
    """
    Builds the graph of one run from a validated graph block
    """
    family = graph_params['family']
    if family == 'explicit':
        return Graph.build_graph(graph_params['n'],
                                 [tuple(edge) for edge in graph_params['edges']])
    elif family == 'file':
        return Graph.read_graph(graph_params['file'])
    return Graph.generate(family, graph_params['n'], rng, m=graph_params.get('m'))


def select_rho(rho_params, g, spec):
    """
    Resolves a rho block to a step size for graph g.

    Returns:
    -------
    :return: (rho, RhoSchedule or None); under the schedule policy rho is
        the terminal step size
    """
    policy = rho_params['policy']
    multiplier = rho_params.get('multiplier', 1.)
    if policy == 'fixed':
        return rho_params['value'], None
    elif policy == 'heuristic':
        return multiplier * ps.rho_heuristic(g.n, g.m), None
    elif policy == 'resolution':
        return multiplier * ps.rho_for_resolution(g.n, spec), None
    elif policy == 'gamma_max':
        rho = ps.rho_gamma_max(g.n, spec)
        if not np.isfinite(rho):
            rho = ps.rho_heuristic(g.n, g.m)
        return multiplier * rho, None

    rho0 = rho_params.get('rho0', ps.rho_heuristic(g.n, g.m))
    sched = ps.RhoSchedule(rho0, rho_params.get('factor', 10),
                           rho_params.get('block', 50),
                           rho_params.get('floor', 1e-4))
    return sched.final_rho, sched


class RunRecord(object):
    """
    Summary of a single scenario run. Attributes not reported by an
    algorithm stay None.

    consensus_error is |consensus_value - rbar| for every algorithm and
    None for unresolved runs. For cadmm runs error_bound is the max-norm
    stopping tolerance and bound_ok says the final max-norm error met it.

    Parameters:
    ----------
    :param int run: run index
    :param int seed: master seed
    :param str algorithm: cadmm, bq or ebq
    """
    fields = ('run', 'seed', 'algorithm', 'n', 'm', 'rho', 'rbar', 'kind',
              'k0', 'period', 'consensus_value', 'consensus_error',
              'error_bound', 'bound_ok', 'iterations', 'convergence_time',
              'rough_time_bound', 'forced_level', 't_star', 'calls',
              'call_bound', 'level_span', 'message')

    def __init__(self, run, seed, algorithm, **kwargs):
        for name in self.fields:
            setattr(self, name, None)
        self.run = run
        self.seed = seed
        self.algorithm = algorithm
        self.iterative_error = None
        for key, value in kwargs.items():
            if key not in self.fields:
                raise AttributeError('RunRecord has no field {}'.format(key))
            setattr(self, key, value)

    def set_outcome(self, outcome):
        """
        Copies the classification of a BQ, schedule or EBQ outcome
        """
        self.kind = outcome.kind
        self.consensus_value = outcome.consensus_value
        self.consensus_error = outcome.consensus_error
        self.convergence_time = outcome.convergence_time
        self.bound_ok = outcome.bound_ok
        if isinstance(outcome, ebq.EbqOutcome):
            last = outcome.calls[-1]
            self.k0 = last.k0
            self.period = last.period
            self.error_bound = outcome.radius if outcome.interior \
                else last.error_bound
            self.iterations = outcome.total_iterations
            self.t_star = outcome.t_star
            self.calls = len(outcome.calls)
            self.call_bound = outcome.call_bound
            self.level_span = last.level_span
        else:
            self.k0 = outcome.k0
            self.period = outcome.period
            self.error_bound = outcome.error_bound
            self.iterations = outcome.iterations
            self.level_span = outcome.level_span

    @property
    def resolved(self):
        return self.kind in (bq.CONVERGED, bq.CYCLIC)

    def to_dict(self):
        d = {name: getattr(self, name) for name in self.fields}
        if self.iterative_error is not None:
            d['iterative_error'] = list(self.iterative_error)
        return d

    def __repr__(self):
        return 'RunRecord(run={}, algorithm={}, kind={})'.format(self.run,
                                                                 self.algorithm,
                                                                 self.kind)


def bq_iterative_error(trace, delta, rbar):
    """
    ||Q_b(x^k) - 1 rbar|| / sqrt(n) along a BQ-CADMM trace
    """
    return np.array([CADMM.iterative_error(q * delta, rbar) for q in trace['q']])


def ebq_iterative_error(trace, delta, rbar):
    """
    ||Q_b(x^k) + t - 1 rbar|| / sqrt(n) along an EBQ-CADMM trace
    """
    return np.array([CADMM.iterative_error(q * delta + t, rbar)
                     for q, t in zip(trace['q'], trace['t'])])


def scenario_parameters(cfg, **kwargs):
    """
    Validated parameter blocks of a scenario with run block overrides.

    Parameters:
    ----------
    :param cfg: Config, ScenarioConfig, scenario dictionary or JSON file name
    :keyword int runs: override of run.runs
    :keyword int seed: override of run.seed
    :keyword int max_iter: override of run.max_iter

    Returns:
    -------
    :return: (dict) parameter dictionaries keyed by block name
    """
    config = eIO.Config(cfg)
    overrides = {key: value for key, value in kwargs.items()
                 if key in ('runs', 'seed', 'max_iter') and value is not None}
    if overrides:
        config.config.setdefault('run', {}).update(overrides)
    return config.validate()


def execute_run(params, run_index, trace=False):
    """
    Performs run run_index of a validated scenario.

    Parameters:
    ----------
    :param dict params: output of scenario_parameters()
    :param int run_index: run index
    :param bool trace: record the per-iteration trace

    Returns:
    -------
    :return: (RunRecord, outcome) where outcome is a CadmmRun, RunOutcome,
        ScheduleOutcome or EbqOutcome
    """
    run_params = params['run']
    seed = run_params['seed']
    trace = trace or run_params['trace']
    rng = run_rng(seed, run_index)
    g = scenario_graph(params['graph'], rng)
    r = sample_data(params['data'], g.n, rng)
    spec = Quantizer.QuantizerSpec(params['quantizer']['delta'],
                                   params['quantizer']['range_l'])
    rho, sched = select_rho(params['rho'], g, spec)

    algorithm = run_params['algorithm']
    record = RunRecord(run_index, seed, algorithm, n=g.n, m=g.m, rho=rho,
                       rbar=float(r.mean()))

    if algorithm == 'cadmm':
        outcome = CADMM.run_cadmm(g, rho, r, max_iter=run_params['max_iter'],
                                  tol=run_params['tol'], trace=trace)
        record.kind = bq.CONVERGED if outcome.converged else bq.UNRESOLVED
        record.iterations = outcome.iterations
        record.consensus_value = outcome.consensus_value
        record.error_bound = run_params['tol']
        if outcome.converged:
            record.consensus_error = float(abs(outcome.consensus_value -
                                               outcome.rbar))
            record.bound_ok = bool(outcome.max_error <= run_params['tol'])
            record.k0 = outcome.iterations
            record.convergence_time = outcome.iterations
        if trace:
            record.iterative_error = outcome.history['iterative_error'].tolist()
        return record, outcome

    cfg = bq.BqConfig(g, r, rho, spec, max_iter=run_params['max_iter'])
    if algorithm == 'bq':
        if sched is not None:
            outcome = ps.run_with_schedule(cfg, sched, trace=trace)
        else:
            outcome = bq.run(cfg, trace=trace)
        record.rough_time_bound = CADMM.rough_time_bound(g, g.spectral, rho, r,
                                                         spec)
        forced = bq.predict_forced_level(rho, g, spec, cfg.rbar)
        if forced is not None:
            record.forced_level = forced.level
        if trace:
            record.iterative_error = bq_iterative_error(
                outcome.trace, spec.delta, cfg.rbar).tolist()
    else:
        outcome = ebq.run_ebq(cfg, budget=run_params['inner_budget'],
                              enforce_precondition=run_params['enforce_precondition'],
                              trace=trace)
        if trace:
            record.iterative_error = ebq_iterative_error(
                outcome.trace, spec.delta, cfg.rbar).tolist()

    record.set_outcome(outcome)
    return record, outcome


def run_single(params, run_index):
    """
    Performs one run and returns its RunRecord. Exceptions other than
    invariant violations and input validation errors are recorded in the
    record with kind 'failed'.
    """
    try:
        record, _ = execute_run(params, run_index)
    except (InvariantViolation, ValidationError):
        raise
    except Exception as e:
        logger.warning('[Run %d failed: %s]', run_index, e)
        record = RunRecord(run_index, params['run']['seed'],
                           params['run']['algorithm'], kind=FAILED,
                           message='{}: {}'.format(type(e).__name__, e))
    return record


def _map(func, args, parallel):
    """
    Ordered map, over a process pool when parallel > 1
    """
    if parallel > 1:
        with multiprocessing.Pool(parallel) as pool:
            return pool.starmap(func, args)
    return [func(*arg) for arg in args]


def run_scenario(cfg, **kwargs):
    """
    Runs every repetition of a scenario and checks each resolved record
    against its consensus error bound.

    Parameters:
    ----------
    :param cfg: Config, ScenarioConfig, scenario dictionary or file name
    :keyword int runs: override of run.runs
    :keyword int seed: override of run.seed
    :keyword int max_iter: override of run.max_iter
    :keyword int parallel: worker processes (default 1)
    :keyword bool check_bounds: raise InvariantViolation when any record
        breaks its bound (default True)

    Returns:
    -------
    :return: list of RunRecord in run index order
    """
    params = {'runs': None,
              'seed': None,
              'max_iter': None,
              'parallel': 1,
              'check_bounds': True}
    params.update(kwargs)

    scenario = scenario_parameters(cfg, runs=params['runs'], seed=params['seed'],
                                   max_iter=params['max_iter'])
    runs = scenario['run']['runs']
    logger.info('[Running scenario %s: %s, %d runs]', scenario['name'],
                scenario['run']['algorithm'], runs)

    records = _map(run_single, [(scenario, j) for j in range(runs)],
                   params['parallel'])

    failed = [rec.run for rec in records if rec.kind == FAILED]
    if failed:
        logger.warning('[%d runs failed: %s]', len(failed), failed)

    if params['check_bounds']:
        broken = [rec.run for rec in records if rec.bound_ok is False]
        if broken:
            raise InvariantViolation('consensus error bound broken in runs {}'
                                     .format(broken))
    return records


def records_frame(records):
    """
    DataFrame of RunRecords without the iterative error traces
    """
    return pd.DataFrame([rec.to_dict() for rec in records],
                        columns=list(RunRecord.fields))


def _grid_cell(family, n, multipliers, run_index, seed, data, quantizer,
               max_iter):
    """
    One run of a rho sweep: a graph and data vector shared by every grid
    point
    """
    rng = run_rng(seed, run_index)
    g = Graph.generate(family, n, rng)
    r = sample_data(data, n, rng)
    spec = Quantizer.QuantizerSpec(quantizer['delta'], quantizer['range_l'])
    sp = g.spectral

    cells = []
    for mult in multipliers:
        rho = mult * ps.rho_heuristic(g.n, g.m)
        outcome = bq.run(bq.BqConfig(g, r, rho, spec, max_iter=max_iter))
        if outcome.bound_ok is False:
            raise InvariantViolation('{} n={} rho={:g} run {}: consensus error '
                                     '{} above bound {}'
                                     .format(family, n, rho, run_index,
                                             outcome.consensus_error,
                                             outcome.error_bound))
        cells.append({'kind': outcome.kind,
                      'period': outcome.period,
                      'level_span': outcome.level_span,
                      'time': outcome.convergence_time,
                      'rough_bound': CADMM.rough_time_bound(g, sp, rho, r, spec),
                      'm': g.m})
    return cells


def _sweep(metric_func, **kwargs):
    params = {'families': eIO.SWEEP_FAMILIES,
              'n_list': (10, 20, 50),
              'multipliers': eIO.DEFAULT_MULTIPLIERS,
              'runs': 1000,
              'seed': 0,
              'data': DEFAULT_SWEEP_DATA,
              'quantizer': DEFAULT_SWEEP_QUANTIZER,
              'max_iter': bq.DEFAULT_MAX_ITER,
              'parallel': 1}
    params.update(kwargs)
    if isinstance(params['families'], str):
        params['families'] = [params['families']]

    rows = []
    for family in params['families']:
        for n in params['n_list']:
            logger.info('[Sweep %s n=%d, %d runs]', family, n, params['runs'])
            args = [(family, n, params['multipliers'], j, params['seed'],
                     params['data'], params['quantizer'], params['max_iter'])
                    for j in range(params['runs'])]
            results = _map(_grid_cell, args, params['parallel'])
            m = results[0][0]['m']
            for i, mult in enumerate(params['multipliers']):
                cells = [res[i] for res in results]
                for metric, value in metric_func(cells):
                    rows.append((family, n, m, mult * ps.rho_heuristic(n, m),
                                 metric, value, params['runs'], params['seed']))
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def _cyclic_metrics(cells):
    cyclic = [cell for cell in cells if cell['kind'] == bq.CYCLIC]
    unresolved = [cell for cell in cells if cell['kind'] == bq.UNRESOLVED]
    mean_period = np.mean([cell['period'] for cell in cyclic]) if cyclic \
        else np.nan
    span = max(cell['level_span'] for cell in cyclic) if cyclic else 0
    return [('cyclic_fraction', len(cyclic) / float(len(cells))),
            ('unresolved_fraction', len(unresolved) / float(len(cells))),
            ('mean_period', float(mean_period)),
            ('max_level_span', float(span))]


def _time_metrics(cells):
    resolved = [cell for cell in cells if cell['time'] is not None]
    if not resolved:
        return [('mean_time', np.nan), ('bound_hit_fraction', np.nan)]
    times = np.array([cell['time'] for cell in resolved], dtype=float)
    within = [cell['time'] <= cell['rough_bound'] for cell in resolved]
    return [('mean_time', float(times.mean())),
            ('bound_hit_fraction', float(np.mean(within)))]


def cyclic_probability_sweep(**kwargs):
    """
    Empirical probability of the cyclic outcome of BQ-CADMM over a grid
    of step sizes rho = multiplier * n / m.

    Parameters:
    ----------
    :keyword families: graph family or list of families (star,
        intermediate, complete)
    :keyword tuple n_list: node counts (default (10, 20, 50))
    :keyword tuple multipliers: grid of rho relative to n / m
    :keyword int runs: runs per family and n (default 1000)
    :keyword int seed: master seed
    :keyword dict data: data block (default N(0, 100) plus N(0, 25) shift)
    :keyword dict quantizer: delta and range_l (default 1 and 30)
    :keyword int max_iter: iteration cap per run
    :keyword int parallel: worker processes

    Returns:
    -------
    :return: pd.DataFrame with columns family, n, m, rho, metric, value,
        runs, seed; metrics cyclic_fraction, unresolved_fraction,
        mean_period and max_level_span
    """
    return _sweep(_cyclic_metrics, **kwargs)


def convergence_time_sweep(**kwargs):
    """
    Mean convergence time (k0, or k0 + T when cyclic) of BQ-CADMM over a
    grid of step sizes, and the fraction of runs finishing within the
    rough time bound. Keywords as in cyclic_probability_sweep().

    Returns:
    -------
    :return: pd.DataFrame with metrics mean_time and bound_hit_fraction
    """
    return _sweep(_time_metrics, **kwargs)


def _table1_cell(family, n, run_index, seed, data, quantizer, schedule,
                 fixed_rho, max_iter):
    rng = run_rng(seed, run_index)
    g = Graph.generate(family, n, rng)
    r = sample_data(data, n, rng)
    spec = Quantizer.QuantizerSpec(quantizer['delta'], quantizer['range_l'])
    sched = ps.RhoSchedule(ps.rho_heuristic(g.n, g.m), schedule['factor'],
                           schedule['block'], schedule['floor'])
    cfg = bq.BqConfig(g, r, sched.final_rho, spec, max_iter=max_iter)
    decreasing = ps.run_with_schedule(cfg, sched)
    fixed = bq.run(cfg.replace(rho=fixed_rho))
    for outcome in (decreasing, fixed):
        if outcome.bound_ok is False:
            raise InvariantViolation('{} n={} run {}: consensus error above '
                                     'bound'.format(family, n, run_index))
    return g.m, decreasing.convergence_time, fixed.convergence_time


def table1_comparison(**kwargs):
    """
    Mean convergence time of BQ-CADMM with the decreasing rho schedule,
    started at n / m, against a fixed step size equal to the schedule floor.

    Parameters:
    ----------
    :keyword families: graph families (default star, intermediate, complete)
    :keyword tuple n_list: node counts (default (20, 50, 100))
    :keyword int runs: runs per cell (default 100)
    :keyword int seed: master seed
    :keyword dict data: data block
    :keyword dict quantizer: delta and range_l
    :keyword dict schedule: factor, block and floor (default 10, 50, 1e-4)
    :keyword float fixed_rho: fixed baseline step size (default 1e-4)
    :keyword int max_iter: iteration cap per run
    :keyword int parallel: worker processes

    Returns:
    -------
    :return: pd.DataFrame with columns family, n, m, decreasing, fixed,
        runs, seed
    """
    params = {'families': eIO.SWEEP_FAMILIES,
              'n_list': (20, 50, 100),
              'runs': 100,
              'seed': 0,
              'data': DEFAULT_SWEEP_DATA,
              'quantizer': DEFAULT_SWEEP_QUANTIZER,
              'schedule': DEFAULT_SCHEDULE,
              'fixed_rho': 1e-4,
              'max_iter': bq.DEFAULT_MAX_ITER,
              'parallel': 1}
    params.update(kwargs)
    schedule = dict(DEFAULT_SCHEDULE)
    schedule.update(params['schedule'])

    rows = []
    for family in params['families']:
        for n in params['n_list']:
            logger.info('[Table comparison %s n=%d, %d runs]', family, n,
                        params['runs'])
            args = [(family, n, j, params['seed'], params['data'],
                     params['quantizer'], schedule, params['fixed_rho'],
                     params['max_iter']) for j in range(params['runs'])]
            results = _map(_table1_cell, args, params['parallel'])
            decreasing = [res[1] for res in results if res[1] is not None]
            fixed = [res[2] for res in results if res[2] is not None]
            rows.append((family, n, results[0][0],
                         float(np.mean(decreasing)) if decreasing else np.nan,
                         float(np.mean(fixed)) if fixed else np.nan,
                         params['runs'], params['seed']))
    return pd.DataFrame(rows, columns=TABLE1_COLUMNS)


def figure1_config(seed=42, runs=200):
    """
    EBQ-CADMM trajectories: n = 50, m = 100, L = 25, rho = 0.5,
    r_i ~ N(n, n^2), 50 iterations per call
    """
    sc = eIO.ScenarioConfig()
    sc['name'] = 'fig1'
    sc['family'] = 'random_connected'
    sc['n'] = 50
    sc['m'] = 100
    sc['mean'] = 50.
    sc['std'] = 50.
    sc['delta'] = 1.
    sc['range_l'] = 25.
    sc['policy'] = 'fixed'
    sc['value'] = 0.5
    sc['algorithm'] = 'ebq'
    sc['runs'] = runs
    sc['seed'] = seed
    sc['inner_budget'] = 50
    sc['enforce_precondition'] = False
    return sc


def figure1(**kwargs):
    """
    Runs the EBQ-CADMM trajectory scenario.

    Parameters:
    ----------
    :keyword int seed: master seed (default 42)
    :keyword int runs: repetitions (default 200)
    :keyword int parallel: worker processes

    Returns:
    -------
    :return: dict with 'records' (list of RunRecord), 'trajectory'
        (EBQ trace DataFrame of run 0) and 'outcome' (EbqOutcome of run 0)
    """
    params = {'seed': 42, 'runs': 200, 'parallel': 1}
    params.update(kwargs)
    scenario = scenario_parameters(figure1_config(params['seed'],
                                                  params['runs']))
    records = run_scenario(scenario, parallel=params['parallel'])
    _, outcome = execute_run(scenario, 0, trace=True)
    return {'records': records,
            'trajectory': eIO.ebq_trace_frame(outcome),
            'outcome': outcome}


def figure2(**kwargs):
    """
    Iterative error of BQ-CADMM, EBQ-CADMM and exact CADMM on one
    random connected graph (n = 75, m = 200, L = 30, rho = 0.5) for data
    r_i ~ N(0, n^2) and for the shifted data r + 2n.

    Parameters:
    ----------
    :keyword int seed: master seed (default 42)
    :keyword int max_iter: iteration cap per call

    Returns:
    -------
    :return: dict with 'errors' (DataFrame algorithm, case, k, error) and
        'outcomes' keyed by (algorithm, case)
    """
    params = {'seed': 42, 'n': 75, 'm': 200, 'range_l': 30., 'delta': 1.,
              'rho': 0.5, 'max_iter': bq.DEFAULT_MAX_ITER}
    params.update(kwargs)
    n = params['n']
    rng = run_rng(params['seed'], 0)
    g = Graph.generate('random_connected', n, rng, m=params['m'])
    r = sample_data({'mean': 0., 'std': float(n)}, n, rng)
    spec = Quantizer.QuantizerSpec(params['delta'], params['range_l'])

    frames = []
    outcomes = {}
    for case, data in (('r', r), ('r+2n', r + 2. * n)):
        cfg = bq.BqConfig(g, data, params['rho'], spec,
                          max_iter=params['max_iter'])
        bq_out = bq.run(cfg, trace=True)
        ebq_out = ebq.run_ebq(cfg, enforce_precondition=False, trace=True)
        horizon = max(len(bq_out.trace['k']), len(ebq_out.trace['k']))
        cadmm_out = CADMM.run_cadmm(g, params['rho'], data,
                                    max_iter=horizon - 1, tol=0.)

        errors = {'bq': bq_iterative_error(bq_out.trace, spec.delta, cfg.rbar),
                  'ebq': ebq_iterative_error(ebq_out.trace, spec.delta, cfg.rbar),
                  'cadmm': cadmm_out.history['iterative_error']}
        for algorithm, err in errors.items():
            frames.append(pd.DataFrame({'algorithm': algorithm, 'case': case,
                                        'k': np.arange(len(err)), 'error': err},
                                       columns=ERROR_COLUMNS))
        outcomes[('bq', case)] = bq_out
        outcomes[('ebq', case)] = ebq_out
        outcomes[('cadmm', case)] = cadmm_out

    return {'errors': pd.concat(frames, ignore_index=True),
            'outcomes': outcomes}


def figure3(**kwargs):
    """
    Cyclic probability sweep over star, intermediate and complete graphs
    """
    return cyclic_probability_sweep(**kwargs)


def figure4(**kwargs):
    """
    Convergence time sweep over star, intermediate and complete graphs
    """
    return convergence_time_sweep(**kwargs)


def table1(**kwargs):
    return table1_comparison(**kwargs)
