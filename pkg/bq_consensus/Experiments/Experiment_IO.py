"""
Input and output control for consensus experiments. Config reads and
validates a scenario JSON file; ScenarioConfig is the dictionary based
builder for users who loop many scenarios; the writer functions and classes
produce the JSONL, CSV and HDF5 result files.

A scenario file is made of blocks:

    {"name": "fig1",
     "graph": {"family": "random_connected", "n": 50, "m": 100},
     "data": {"mean": 50, "std": 50},
     "quantizer": {"delta": 1, "range_l": 25},
     "rho": {"policy": "fixed", "value": 0.5},
     "run": {"algorithm": "ebq", "runs": 200, "seed": 42, "inner_budget": 50}}

>>> from bq_consensus import eIO
>>>
>>> config = eIO.Config("fig1.json")
>>> sc = eIO.ScenarioConfig()
>>> sc['family'] = 'star'
>>> sc['n'] = 20
>>> sc['delta'] = 1.
>>> sc['range_l'] = 30.
>>> sc['algorithm'] = 'bq'
>>> config = eIO.Config(sc.config)
"""
import copy
import json
import logging
import numbers
import numpy as np
import pandas as pd
import h5py as H

from ..Consensus.Quantizer import QuantizerSpec
from ..Consensus.Parameter_Select import RhoSchedule
from ..Network import Graph
from ..exceptions import ConfigError, QuantizerSpecError, PreconditionError


logger = logging.getLogger(__name__)

GRAPH_FAMILIES = ('star', 'complete', 'random_connected', 'intermediate',
                  'explicit', 'file')
RHO_POLICIES = ('fixed', 'heuristic', 'schedule', 'resolution', 'gamma_max')
ALGORITHMS = ('cadmm', 'bq', 'ebq')
SWEEP_KINDS = ('cyclic', 'time')
SWEEP_FAMILIES = ('star', 'intermediate', 'complete')
DEFAULT_MULTIPLIERS = (1e-3, 1e-2, 1e-1, 0.2, 0.5, 1., 2., 5., 10., 1e2)

BLOCKS = ('graph', 'data', 'quantizer', 'rho', 'run', 'sweep')


class Config(object):
    """
    Class to open, parse and validate scenario configuration files.
    Parameter types and block membership are checked field by field, and
    unknown blocks or fields raise a ConfigError naming them.

    Parameters:
    ----------
    :param fname: scenario JSON file name, or a dictionary built by
        ScenarioConfig().config, or None for an empty parser

    Returns:
    -------
    :return: graph_parameters (dict), data_parameters (dict),
        quantizer_parameters (dict), rho_parameters (dict),
        run_parameters (dict), sweep_parameters (dict)
    """
    def __init__(self, fname):

        if isinstance(fname, ScenarioConfig):
            fname = fname.config

        if isinstance(fname, str):
            self.config = self._reader(fname)
        elif isinstance(fname, Config):
            self.config = copy.deepcopy(fname.config)
        elif isinstance(fname, dict):
            self.config = copy.deepcopy(fname)
        elif fname is None:
            self.config = {}
        else:
            raise TypeError('input data not a dictionary or file name')

        self._strtype = ('NAME', 'FAMILY', 'FILE', 'POLICY', 'ALGORITHM', 'KIND')
        self._inttype = ('N', 'M', 'FACTOR', 'BLOCK', 'RUNS', 'SEED',
                         'MAX_ITER', 'INNER_BUDGET')
        self._floattype = ('MEAN', 'STD', 'COMMON_STD', 'OFFSET', 'DELTA',
                           'RANGE_L', 'VALUE', 'MULTIPLIER', 'RHO0', 'FLOOR',
                           'TOL')
        self._booltype = ('ENFORCE_PRECONDITION', 'TRACE')
        self._listtype = ('EDGES', 'FAMILIES', 'N_LIST', 'MULTIPLIERS')
        self._required = {'graph': ('FAMILY',),
                          'quantizer': ('DELTA', 'RANGE_L'),
                          'run': ('ALGORITHM',)}
        self.validgraphparams = ('FAMILY', 'N', 'M', 'EDGES', 'FILE')
        self.validdataparams = ('MEAN', 'STD', 'COMMON_STD', 'OFFSET')
        self.validquantizerparams = ('DELTA', 'RANGE_L')
        self.validrhoparams = ('POLICY', 'VALUE', 'MULTIPLIER', 'RHO0',
                               'FACTOR', 'BLOCK', 'FLOOR')
        self.validrunparams = ('ALGORITHM', 'RUNS', 'SEED', 'MAX_ITER',
                               'INNER_BUDGET', 'ENFORCE_PRECONDITION', 'TOL',
                               'TRACE')
        self.validsweepparams = ('KIND', 'FAMILIES', 'N_LIST', 'MULTIPLIERS')

    def _reader(self, fname):
        """
        reads in the scenario JSON file
        """
        with open(fname) as f:
            try:
                config = json.load(f)
            except ValueError as e:
                raise ConfigError(fname, 'invalid JSON: {}'.format(e))
        if not isinstance(config, dict):
            raise ConfigError(fname, 'top level must be a JSON object')
        return config

    @property
    def valid_blocks(self):
        return {'graph': self.validgraphparams,
                'data': self.validdataparams,
                'quantizer': self.validquantizerparams,
                'rho': self.validrhoparams,
                'run': self.validrunparams,
                'sweep': self.validsweepparams}

    @property
    def name(self):
        name = self.config.get('name', 'scenario')
        if not isinstance(name, str) or not name:
            raise ConfigError('name', 'must be a non empty string')
        return name

    def check_blocks(self):
        """
        Rejects unknown top level keys and non object blocks
        """
        for key, value in self.config.items():
            if key == 'name':
                continue
            if key not in BLOCKS:
                raise ConfigError(key, 'unknown configuration block, expected '
                                  'one of {}'.format(('name',) + BLOCKS))
            if not isinstance(value, dict):
                raise ConfigError(key, 'block must be a JSON object')

    def get_block(self, blockname):
        """
        Method to isolate an input block from a configuration for parsing

        Parameters:
        ----------
        :param str blockname: block name, e.g. 'graph'

        Returns:
        -------
        :return: (dict) parameters contained within the block, empty when
            the block is absent
        """
        self.check_blocks()
        return self.config.get(blockname, {})

    def parametertype(self, pname, param, blockname=''):
        """
        Method takes a parameter name and value and checks the value type

        Parameters:
        ----------
        :param str pname: parameter name
        :param param: parameter value as read from JSON
        :param str blockname: block name, used in error messages

        Returns:
        -------
        :return: (pname, param) (tuple) upper case parameter name, value
        """
        pname = pname.strip().upper()
        field = self.field_name(blockname, pname)

        if pname in self._strtype:
            if not isinstance(param, str):
                raise ConfigError(field, 'expected a string, got {!r}'.format(param))

        elif pname in self._inttype:
            if isinstance(param, bool) or not isinstance(param, numbers.Integral):
                if isinstance(param, float) and param.is_integer():
                    param = int(param)
                else:
                    raise ConfigError(field, 'expected an integer, got {!r}'
                                      .format(param))
            param = int(param)

        elif pname in self._floattype:
            if isinstance(param, bool) or not isinstance(param, numbers.Real):
                raise ConfigError(field, 'expected a number, got {!r}'.format(param))
            param = float(param)
            if not np.isfinite(param):
                raise ConfigError(field, 'must be finite')

        elif pname in self._booltype:
            if not isinstance(param, bool):
                raise ConfigError(field, 'expected true or false, got {!r}'
                                  .format(param))

        elif pname in self._listtype:
            if isinstance(param, tuple):
                param = list(param)
            if not isinstance(param, list):
                raise ConfigError(field, 'expected a list, got {!r}'.format(param))

        else:
            raise ConfigError(field, 'parameter name {} is not valid'.format(pname))

        return pname, param

    def field_name(self, blockname, pname):
        if blockname:
            return '{}.{}'.format(blockname, pname.lower())
        return pname.lower()

    def check_if_valid(self, blockname, pname, validparams):
        """
        Method checks if a specific parameter is valid for the block it was
        supplied to in the configuration.

        Parameters:
        ----------
        :param str blockname: name of the input block
        :param str pname: upper case parameter name
        :param tuple validparams: valid parameter names for the block
        """
        if pname in validparams:
            return
        raise ConfigError(self.field_name(blockname, pname),
                          'not a valid parameter for the {} block, expected '
                          'one of {}'.format(blockname,
                                             [p.lower() for p in validparams]))

    def adjust_pname(self, pname):
        """
        Sets parameter names lowercase to follow PEP-8

        :param str pname: parameter name
        """
        return pname.lower()

    def check_model_parameters(self, blockname, block_dict):
        """
        Check for required parameters of a block

        :param str blockname: block name
        :param dict block_dict: parsed parameters of the block
        :raise ConfigError: if a required parameter is not supplied
        """
        for key in self._required.get(blockname, ()):
            if key.lower() not in block_dict:
                raise ConfigError(self.field_name(blockname, key),
                                  'is a required parameter')

    def _parse_block(self, blockname, defaults=None):
        block_dict = {}
        for pname, param in self.get_block(blockname).items():
            if param is None:
                # null selects the default
                continue
            pname, param = self.parametertype(pname, param, blockname)
            self.check_if_valid(blockname, pname, self.valid_blocks[blockname])
            block_dict[self.adjust_pname(pname)] = param
        self.check_model_parameters(blockname, block_dict)
        if defaults:
            for key, value in defaults.items():
                block_dict.setdefault(key, value)
        return block_dict

    def graph_parameters(self):
        """
        Reads the graph block: family, node count, edge count, explicit
        edges or a graph JSON file
        """
        graph = self._parse_block('graph')
        family = graph['family'] = graph['family'].lower()
        if family not in GRAPH_FAMILIES:
            raise ConfigError('graph.family', '{!r} is not one of {}'
                              .format(family, GRAPH_FAMILIES))

        if family == 'file':
            if 'file' not in graph:
                raise ConfigError('graph.file', 'is required for the file family')
            return graph

        if 'n' not in graph:
            raise ConfigError('graph.n', 'is a required parameter')
        n = graph['n']
        if n < 2:
            raise ConfigError('graph.n', 'must be at least 2, got {}'.format(n))

        if family == 'random_connected':
            if 'm' not in graph:
                raise ConfigError('graph.m', 'is required for random_connected')
            m = graph['m']
            if not n - 1 <= m <= Graph.max_edge_count(n):
                raise ConfigError('graph.m', 'm={} outside [{}, {}] for n={}'
                                  .format(m, n - 1, Graph.max_edge_count(n), n))
        elif 'm' in graph:
            raise ConfigError('graph.m', 'only valid for the random_connected '
                              'family')

        if family == 'explicit':
            if 'edges' not in graph:
                raise ConfigError('graph.edges', 'is required for the explicit '
                                  'family')
        elif 'edges' in graph:
            raise ConfigError('graph.edges', 'only valid for the explicit family')
        return graph

    def data_parameters(self):
        """
        Reads the data block: r_i ~ N(mean, std^2) + N(0, common_std^2) + offset
        """
        data = self._parse_block('data', {'mean': 0., 'std': 1.,
                                          'common_std': 0., 'offset': 0.})
        for key in ('std', 'common_std'):
            if data[key] < 0:
                raise ConfigError('data.{}'.format(key), 'must be non negative')
        return data

    def quantizer_parameters(self):
        """
        Reads the quantizer block and checks L is a multiple of delta
        """
        quantizer = self._parse_block('quantizer')
        try:
            QuantizerSpec(quantizer['delta'], quantizer['range_l'])
        except QuantizerSpecError as e:
            raise ConfigError('quantizer.range_l', str(e))
        return quantizer

    def rho_parameters(self):
        """
        Reads the rho block: the step size policy and its parameters
        """
        rho = self._parse_block('rho', {'policy': 'heuristic',
                                        'multiplier': 1.,
                                        'factor': 10,
                                        'block': 50,
                                        'floor': 1e-4})
        policy = rho['policy'] = rho['policy'].lower()
        if policy not in RHO_POLICIES:
            raise ConfigError('rho.policy', '{!r} is not one of {}'
                              .format(policy, RHO_POLICIES))
        if policy == 'fixed':
            if 'value' not in rho:
                raise ConfigError('rho.value', 'is required for the fixed policy')
            if not rho['value'] > 0:
                raise ConfigError('rho.value', 'must be positive')
        if not rho['multiplier'] > 0:
            raise ConfigError('rho.multiplier', 'must be positive')
        if policy == 'schedule':
            try:
                RhoSchedule(rho.get('rho0', 1.), rho['factor'], rho['block'],
                            rho['floor'])
            except PreconditionError as e:
                field = 'rho.rho0'
                for key in ('factor', 'block', 'floor'):
                    if key in str(e):
                        field = 'rho.{}'.format(key)
                raise ConfigError(field, str(e))
        return rho

    def run_parameters(self):
        """
        Reads the run block: algorithm, repetitions, seed and iteration caps
        """
        run = self._parse_block('run', {'runs': 1,
                                        'seed': 0,
                                        'max_iter': 10 ** 6,
                                        'inner_budget': None,
                                        'enforce_precondition': True,
                                        'tol': 1e-8,
                                        'trace': False})
        algorithm = run['algorithm'] = run['algorithm'].lower()
        if algorithm not in ALGORITHMS:
            raise ConfigError('run.algorithm', '{!r} is not one of {}'
                              .format(algorithm, ALGORITHMS))
        for key in ('runs', 'max_iter'):
            if run[key] < 1:
                raise ConfigError('run.{}'.format(key), 'must be at least 1')
        if run['seed'] < 0:
            raise ConfigError('run.seed', 'must be non negative')
        if run['inner_budget'] is not None and run['inner_budget'] < 1:
            raise ConfigError('run.inner_budget', 'must be at least 1')
        if not run['tol'] > 0:
            raise ConfigError('run.tol', 'must be positive')
        return run

    def sweep_parameters(self):
        """
        Reads the sweep block used by the sweep command
        """
        sweep = self._parse_block('sweep', {'kind': 'cyclic',
                                            'families': list(SWEEP_FAMILIES),
                                            'n_list': [10, 20, 50],
                                            'multipliers': list(DEFAULT_MULTIPLIERS)})
        if sweep['kind'] not in SWEEP_KINDS:
            raise ConfigError('sweep.kind', '{!r} is not one of {}'
                              .format(sweep['kind'], SWEEP_KINDS))
        for family in sweep['families']:
            if family not in SWEEP_FAMILIES:
                raise ConfigError('sweep.families', '{!r} is not one of {}'
                                  .format(family, SWEEP_FAMILIES))
        for n in sweep['n_list']:
            if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 2:
                raise ConfigError('sweep.n_list', 'entries must be integers >= 2')
        for mult in sweep['multipliers']:
            if isinstance(mult, bool) or not isinstance(mult, numbers.Real) \
                    or not mult > 0:
                raise ConfigError('sweep.multipliers', 'entries must be positive')
        return sweep

    def validate(self):
        """
        Parses every block and builds explicit or file graphs so that all
        validation errors surface before a run starts.

        :return: (dict) parameter dictionaries keyed by block name
        """
        params = {'name': self.name,
                  'graph': self.graph_parameters(),
                  'data': self.data_parameters(),
                  'quantizer': self.quantizer_parameters(),
                  'rho': self.rho_parameters(),
                  'run': self.run_parameters()}
        if 'sweep' in self.config:
            params['sweep'] = self.sweep_parameters()

        graph = params['graph']
        if graph['family'] == 'explicit':
            Graph.build_graph(graph['n'], graph['edges'])
        elif graph['family'] == 'file':
            g = Graph.read_graph(graph['file'])
            graph['n'] = g.n
            graph['edges'] = [list(edge) for edge in g.edges]
            graph['family'] = 'explicit'
            graph.pop('file')
        return params


class ScenarioConfig(dict):
    """
    OO class to build scenario configurations. Recommended for the super
    user who is looping many scenarios. Keys are parameter names in any
    case; values are type checked as they are set.

    >>> from bq_consensus import eIO
    >>> sc = eIO.ScenarioConfig()
    >>> sc['name'] = 'star20'
    >>> sc['family'] = 'star'
    >>> sc['n'] = 20
    >>> sc['delta'] = 1.
    >>> sc['range_l'] = 30.
    >>> sc['algorithm'] = 'bq'
    >>> d = sc.config  # nested block dictionary that Config accepts
    """
    def __init__(self):
        self.__formats = Config(None)
        super(ScenarioConfig, self).__init__()

    def __setitem__(self, key, value):
        """
        Override method that does an initial parameter check before setting
        to the dictionary
        """
        key, value = self.__formats.parametertype(key, value)
        super(ScenarioConfig, self).__setitem__(key, value)

    def __getitem__(self, key):
        """
        Override method that assures the key is in uppercase notation
        """
        return super(ScenarioConfig, self).__getitem__(key.upper())

    def __contains__(self, key):
        return super(ScenarioConfig, self).__contains__(key.upper())

    def update(self, *args, **kwargs):
        for key, value in dict(*args, **kwargs).items():
            self[key] = value

    @property
    def config(self):
        """
        Property method that creates the nested configuration dictionary

        Returns:
        -------
        :return: (dict) block structured configuration
        """
        config = {}
        if 'NAME' in self:
            config['name'] = self['NAME']
        for blockname, valid in self.__formats.valid_blocks.items():
            block = self.__get_parameters(valid)
            if block:
                config[blockname] = block
        for blockname in self.__formats._required:
            self.__formats.check_model_parameters(blockname,
                                                  config.get(blockname, {}))
        return config

    def __get_parameters(self, valid_parameters):
        return {key.lower(): value for key, value in self.items()
                if key in valid_parameters}

    def write(self, fname):
        """
        Writes a scenario JSON file with user supplied parameters

        :param str fname: configuration file name to write
        """
        write_json(self.config, fname)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dumps(obj):
    """
    Deterministic JSON text for result objects
    """
    return json.dumps(_jsonable(obj), sort_keys=True)


def write_json(obj, fname):
    logger.info('[Writing to: %s]', fname)
    with open(fname, 'w') as f:
        f.write(json.dumps(_jsonable(obj), sort_keys=True, indent=2))
        f.write('\n')


class RecordWriter(object):
    """
    Writer for per-run JSONL record files, one JSON object per line in
    run index order.

    Parameters:
    ----------
    :param str fi: output file name
    :keyword bool overwrite: truncate an existing file (default True)
    """
    def __init__(self, fi, **kwargs):
        defaults = {'overwrite': True}
        defaults.update(kwargs)
        self.filename = fi
        if defaults['overwrite']:
            self._writer(fi, [], wtype='w')

    def _writer(self, fi, data, wtype='a'):
        with open(fi, wtype) as f:
            for line in data:
                f.write(line)

    def write_records(self, records):
        """
        Appends records to the file

        :param list records: RunRecord objects or dictionaries
        """
        logger.info('[Writing to: %s]', self.filename)
        lines = []
        for record in records:
            d = record.to_dict() if hasattr(record, 'to_dict') else record
            lines.append(dumps(d) + '\n')
        self._writer(self.filename, lines)


def write_records(records, fname):
    RecordWriter(fname).write_records(records)


def write_table(df, fname):
    """
    Writes a pandas DataFrame to CSV without the index
    """
    logger.info('[Writing to: %s]', fname)
    df.to_csv(fname, index=False)


def _long_frame(k, arrays):
    """
    Flattens (K x n) arrays into a k, node, ... long table
    """
    n_rows, n = arrays[next(iter(arrays))].shape
    frame = {'k': np.repeat(k, n), 'node': np.tile(np.arange(n), n_rows)}
    for key, value in arrays.items():
        frame[key] = value.reshape(-1)
    return pd.DataFrame(frame)


def bq_trace_frame(outcome):
    """
    Trace table of a BQ-CADMM outcome: k, node, x, q_level, alpha
    """
    tr = outcome.trace
    if tr is None:
        raise ValueError('outcome was run without trace=True')
    return _long_frame(tr['k'], {'x': tr['x'],
                                 'q_level': tr['q'] * outcome.delta,
                                 'alpha': tr['a'] * outcome.rho * outcome.delta})


def ebq_trace_frame(outcome):
    """
    Trace table of an EBQ-CADMM outcome: k, call, node, x, q_level, alpha,
    t and value = q_level + t
    """
    tr = outcome.trace
    if tr is None:
        raise ValueError('outcome was run without trace=True')
    n = tr['x'].shape[1]
    q_level = tr['q'] * outcome.delta
    t = np.repeat(tr['t'][:, None], n, axis=1)
    df = _long_frame(tr['k'], {'x': tr['x'],
                               'q_level': q_level,
                               'alpha': tr['a'] * outcome.rho * outcome.delta,
                               't': t,
                               'value': q_level + t})
    df.insert(1, 'call', np.repeat(tr['call'], n))
    return df


def cadmm_trajectory_frame(cadmm_run):
    """
    Trajectory table of a traced CADMM run: k, node, x, alpha
    """
    hist = cadmm_run.history
    if not len(hist['x']):
        raise ValueError('CADMM run was made without trace=True')
    return _long_frame(np.arange(len(hist['x'])), {'x': hist['x'],
                                                   'alpha': hist['alpha']})


class HDF5Write(object):
    """
    Class to archive outcome arrays and summaries in an HDF5 file for later
    processing and analysis. Each run is stored under results/<run>/.

    Parameters:
    ----------
    :param str fname: HDF5 file name
    :keyword bool overwrite: start a new file (default True)
    """
    def __init__(self, fname, **kwargs):
        defaults = {'overwrite': True}
        defaults.update(kwargs)
        self.fname = fname
        mode = 'w' if defaults['overwrite'] else 'a'
        with H.File(fname, mode):
            pass

    def write_outcome(self, run, outcome):
        """
        Stores trace arrays (when present) and the outcome summary

        Parameters:
        ----------
        :param int run: run index
        :param outcome: RunOutcome, ScheduleOutcome, EbqOutcome or CadmmRun
        """
        group = 'results/{}'.format(run)
        summary = outcome.to_dict()
        with H.File(self.fname, 'r+') as h:
            g = h.require_group(group)
            trace = outcome.trace
            if trace is not None:
                for key, value in trace.items():
                    g.create_dataset(key, data=value)
            g.attrs['summary'] = dumps(summary)
            for key in ('kind', 'k0', 'period', 'rbar', 'consensus_value',
                        'consensus_error'):
                value = summary.get(key)
                if value is not None:
                    g.attrs[key] = value

    def write_table(self, name, df):
        """
        Stores a numeric DataFrame column by column under tables/<name>/
        """
        with H.File(self.fname, 'r+') as h:
            for column in df.columns:
                values = df[column].values
                if values.dtype == object:
                    values = values.astype('S')
                h.create_dataset('tables/{}/{}'.format(name, column), data=values)
