"""
Command line entry point of bq_consensus.

    bq-consensus validate scenario.json
    bq-consensus run scenario.json --seed 7 --runs 100 --out results/
    bq-consensus run batch.nam --parallel 4
    bq-consensus sweep sweep.json --out results/
    bq-consensus reproduce fig1 --seed 42 --out results/
    bq-consensus graph-gen --family intermediate --n 20 --seed 1 --out graphs/

Exit status is 0 on success, 1 for invalid input and 2 for any other
failure. Diagnostics go to standard error; results go to files.
"""
import argparse
import json
import logging
import os
import sys

from .Consensus import CADMM
from .Network import Graph
from .Experiments import Experiment_IO as eIO
from .Experiments import Experiments
from .exceptions import ConfigError, ValidationError
from .nam_file import NamFile


logger = logging.getLogger(__name__)

SUBCOMMANDS = ('run', 'sweep', 'reproduce', 'graph-gen', 'validate')
PRESETS = ('fig1', 'fig2', 'fig3', 'fig4', 'table1')

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2


class CliInvocation(object):
    """
    Parsed command line request

    Parameters:
    ----------
    :param str subcommand: run, sweep, reproduce, graph-gen or validate
    :param str config_path: scenario JSON or .nam file, or preset name for
        reproduce
    :param str output_dir: directory for result files, created if absent
    :param dict overrides: seed, runs and max_iter given on the command line
    :param kwargs: parallel, hdf5, and the graph-gen family, n and m
    """
    def __init__(self, subcommand, config_path=None, output_dir='.',
                 overrides=None, **kwargs):
        if subcommand not in SUBCOMMANDS:
            raise ConfigError('subcommand', '{!r} is not one of {}'
                              .format(subcommand, SUBCOMMANDS))
        params = {'parallel': 1, 'hdf5': False, 'family': None, 'n': None,
                  'm': None}
        params.update(kwargs)

        self.subcommand = subcommand
        self.config_path = config_path
        self.output_dir = output_dir
        self.overrides = {key: value for key, value in (overrides or {}).items()
                          if value is not None}
        self.parallel = params['parallel']
        self.hdf5 = params['hdf5']
        self.family = params['family']
        self.n = params['n']
        self.m = params['m']

    @classmethod
    def from_args(cls, args):
        overrides = {'seed': getattr(args, 'seed', None),
                     'runs': getattr(args, 'runs', None),
                     'max_iter': getattr(args, 'max_iter', None)}
        return cls(args.command, getattr(args, 'config', None),
                   getattr(args, 'out', '.'), overrides,
                   parallel=getattr(args, 'parallel', 1),
                   hdf5=getattr(args, 'hdf5', False),
                   family=getattr(args, 'family', None),
                   n=getattr(args, 'n', None),
                   m=getattr(args, 'm', None))

    def output(self, fname):
        """
        Path of a result file, creating the output directory
        """
        if not os.path.isdir(self.output_dir):
            os.makedirs(self.output_dir)
        return os.path.join(self.output_dir, fname)

    def scenario_files(self):
        if self.config_path.lower().endswith('.nam'):
            return NamFile(self.config_path).scenarios
        return [self.config_path]


def build_parser():
    parser = argparse.ArgumentParser(
        prog='bq-consensus',
        description='Quantized distributed average consensus with '
                    'BQ-CADMM and EBQ-CADMM')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true',
                           help='warnings and errors only')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='master seed override')
    common.add_argument('--runs', type=int, help='repetition count override')
    common.add_argument('--max-iter', dest='max_iter', type=int,
                        help='iteration cap override')
    common.add_argument('--out', default='.', help='output directory')
    common.add_argument('--parallel', type=int, default=1,
                        help='worker processes')

    sub = parser.add_subparsers(dest='command')
    sub.required = True

    run = sub.add_parser('run', parents=[common],
                         help='run a scenario JSON or a .nam batch')
    run.add_argument('config', help='scenario .json or .nam file')
    run.add_argument('--hdf5', action='store_true',
                     help='archive traces and summaries in <name>.hdf5')

    sweep = sub.add_parser('sweep', parents=[common],
                           help='rho sweep described by a sweep block')
    sweep.add_argument('config', help='scenario .json file with a sweep block')

    reproduce = sub.add_parser('reproduce', parents=[common],
                               help='run a preset experiment')
    reproduce.add_argument('config', choices=PRESETS, metavar='preset',
                           help='one of {}'.format(', '.join(PRESETS)))
    reproduce.add_argument('--hdf5', action='store_true',
                           help='archive traces and summaries')

    gen = sub.add_parser('graph-gen', help='write a graph JSON file')
    gen.add_argument('--family', required=True, choices=Graph.FAMILIES)
    gen.add_argument('--n', type=int, required=True, help='node count')
    gen.add_argument('--m', type=int, help='edge count for random_connected')
    gen.add_argument('--seed', type=int, default=0, help='generator seed')
    gen.add_argument('--out', default='.', help='output directory')

    validate = sub.add_parser('validate', help='check a scenario file')
    validate.add_argument('config', help='scenario .json or .nam file')
    return parser


def _run(inv):
    for path in inv.scenario_files():
        scenario = Experiments.scenario_parameters(path, **inv.overrides)
        name = scenario['name']
        records = Experiments.run_scenario(scenario, parallel=inv.parallel)
        eIO.write_records(records, inv.output('{}.jsonl'.format(name)))

        if scenario['run']['trace']:
            _, outcome = Experiments.execute_run(scenario, 0, trace=True)
            _write_trace(outcome, inv.output('{}_trace.csv'.format(name)))

        if inv.hdf5:
            h5 = eIO.HDF5Write(inv.output('{}.hdf5'.format(name)))
            for j in range(scenario['run']['runs']):
                _, outcome = Experiments.execute_run(scenario, j, trace=True)
                h5.write_outcome(j, outcome)


def _write_trace(outcome, fname):
    if isinstance(outcome, CADMM.CadmmRun):
        eIO.write_table(eIO.cadmm_trajectory_frame(outcome), fname)
    elif hasattr(outcome, 'calls'):
        eIO.write_table(eIO.ebq_trace_frame(outcome), fname)
    else:
        eIO.write_table(eIO.bq_trace_frame(outcome), fname)


def _sweep(inv):
    config = eIO.Config(inv.config_path)
    if 'sweep' not in config.config:
        raise ConfigError('sweep', 'a sweep block is required')
    scenario = Experiments.scenario_parameters(config, **inv.overrides)
    sweep = scenario['sweep']
    run = scenario['run']
    kwargs = {'families': sweep['families'],
              'n_list': sweep['n_list'],
              'multipliers': sweep['multipliers'],
              'runs': run['runs'],
              'seed': run['seed'],
              'max_iter': run['max_iter'],
              'data': scenario['data'],
              'quantizer': scenario['quantizer'],
              'parallel': inv.parallel}
    if sweep['kind'] == 'cyclic':
        df = Experiments.cyclic_probability_sweep(**kwargs)
    else:
        df = Experiments.convergence_time_sweep(**kwargs)
    eIO.write_table(df, inv.output('{}_sweep.csv'.format(scenario['name'])))


def _reproduce(inv):
    preset = inv.config_path
    kwargs = {'seed': inv.overrides.get('seed', 42 if preset in ('fig1', 'fig2')
                                        else 0)}
    if preset != 'fig2':
        kwargs['parallel'] = inv.parallel
        if 'runs' in inv.overrides:
            kwargs['runs'] = inv.overrides['runs']
    if preset in ('fig2', 'fig3', 'fig4', 'table1') and 'max_iter' in inv.overrides:
        kwargs['max_iter'] = inv.overrides['max_iter']

    if preset == 'fig1':
        result = Experiments.figure1(**kwargs)
        Experiments.figure1_config(kwargs['seed'], kwargs.get('runs', 200)) \
            .write(inv.output('fig1_scenario.json'))
        eIO.write_records(result['records'], inv.output('fig1.jsonl'))
        eIO.write_table(result['trajectory'], inv.output('fig1_trajectory.csv'))
        eIO.write_json(result['outcome'].to_dict(), inv.output('fig1_outcome.json'))
        if inv.hdf5:
            eIO.HDF5Write(inv.output('fig1.hdf5')).write_outcome(0, result['outcome'])

    elif preset == 'fig2':
        result = Experiments.figure2(**kwargs)
        eIO.write_table(result['errors'], inv.output('fig2_errors.csv'))
        summary = {'{}/{}'.format(algorithm, case): outcome.to_dict()
                   for (algorithm, case), outcome
                   in sorted(result['outcomes'].items())}
        eIO.write_json(summary, inv.output('fig2_outcomes.json'))
        if inv.hdf5:
            h5 = eIO.HDF5Write(inv.output('fig2.hdf5'))
            h5.write_table('errors', result['errors'])

    else:
        func = {'fig3': Experiments.figure3,
                'fig4': Experiments.figure4,
                'table1': Experiments.table1}[preset]
        df = func(**kwargs)
        eIO.write_table(df, inv.output('{}.csv'.format(preset)))
        if inv.hdf5:
            eIO.HDF5Write(inv.output('{}.hdf5'.format(preset))).write_table(preset, df)


def _graph_gen(inv):
    seed = inv.overrides.get('seed', 0)
    g = Graph.generate(inv.family, inv.n, seed, m=inv.m)
    Graph.write_graph(g, inv.output('{}_n{}_seed{}.json'.format(inv.family,
                                                               inv.n, seed)))


def _validate(inv):
    for path in inv.scenario_files():
        config = eIO.Config(path)
        config.validate()
        sys.stdout.write('valid: {}\n'.format(config.name))


def dispatch(inv):
    """
    Executes a CliInvocation and maps failures to exit status

    :param CliInvocation inv: parsed request
    :return: (int) 0 on success, 1 on invalid input, 2 on other failures
    """
    commands = {'run': _run,
                'sweep': _sweep,
                'reproduce': _reproduce,
                'graph-gen': _graph_gen,
                'validate': _validate}
    try:
        commands[inv.subcommand](inv)
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error('invalid input: %s', e)
        return EXIT_INVALID
    except Exception as e:
        logger.error('%s: %s', type(e).__name__, e)
        logger.debug('traceback', exc_info=True)
        return EXIT_FAILURE
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s %(message)s')
    return dispatch(CliInvocation.from_args(args))


if __name__ == '__main__':
    sys.exit(main())
