import json
import numpy as np
import pandas as pd
import pytest

from bq_consensus import BQ_CADMM as bq, EBQ_CADMM as ebq, Graph
from bq_consensus import eIO, Experiment_output
from bq_consensus.Consensus.BQ_CADMM import BqConfig
from bq_consensus.exceptions import ConfigError


def scenario(**blocks):
    config = {'name': 'unit',
              'graph': {'family': 'star', 'n': 6},
              'quantizer': {'delta': 1, 'range_l': 30},
              'run': {'algorithm': 'bq'}}
    for key, value in blocks.items():
        if value is None:
            config.pop(key)
        else:
            config[key] = value
    return config


def field_of(config):
    with pytest.raises(ConfigError) as err:
        eIO.Config(config).validate()
    return err.value.field


class TestConfig:
    def test_defaults(self):
        params = eIO.Config(scenario()).validate()
        assert params['name'] == 'unit'
        assert params['data'] == {'mean': 0., 'std': 1., 'common_std': 0.,
                                  'offset': 0.}
        assert params['rho']['policy'] == 'heuristic'
        assert params['run']['runs'] == 1
        assert params['run']['max_iter'] == 10 ** 6
        assert params['run']['enforce_precondition'] is True
        assert 'sweep' not in params

    def test_case_insensitive_names(self):
        params = eIO.Config(scenario(graph={'FAMILY': 'Star', 'N': 6})).validate()
        assert params['graph'] == {'family': 'star', 'n': 6}

    def test_integral_float(self):
        params = eIO.Config(scenario(graph={'family': 'star', 'n': 6.0})).validate()
        assert params['graph']['n'] == 6
        assert isinstance(params['graph']['n'], int)

    def test_null_selects_default(self):
        params = eIO.Config(scenario(run={'algorithm': 'bq',
                                          'runs': None})).validate()
        assert params['run']['runs'] == 1

    def test_validated_dict_revalidates(self):
        params = eIO.Config(scenario()).validate()
        again = eIO.Config({key: value for key, value in params.items()})
        assert again.validate() == params

    def test_unknown_block(self):
        assert field_of(scenario(plots={})) == 'plots'

    def test_unknown_field(self):
        assert field_of(scenario(graph={'family': 'star', 'n': 6,
                                        'weights': [1]})) == 'graph.weights'

    def test_wrong_type(self):
        assert field_of(scenario(graph={'family': 'star', 'n': 'ten'})) == 'graph.n'

    def test_bool_is_not_int(self):
        assert field_of(scenario(run={'algorithm': 'bq', 'runs': True})) == \
            'run.runs'

    def test_missing_required(self):
        assert field_of(scenario(run={'runs': 3})) == 'run.algorithm'
        assert field_of(scenario(quantizer={'delta': 1})) == 'quantizer.range_l'

    def test_missing_block(self):
        assert field_of(scenario(graph=None)) == 'graph.family'

    def test_unknown_family(self):
        assert field_of(scenario(graph={'family': 'ring', 'n': 6})) == \
            'graph.family'

    def test_edge_count_range(self):
        too_few = {'family': 'random_connected', 'n': 10, 'm': 8}
        too_many = {'family': 'random_connected', 'n': 10, 'm': 46}
        assert field_of(scenario(graph=too_few)) == 'graph.m'
        assert field_of(scenario(graph=too_many)) == 'graph.m'

    def test_m_only_for_random_connected(self):
        assert field_of(scenario(graph={'family': 'star', 'n': 6, 'm': 5})) == \
            'graph.m'

    def test_small_n(self):
        assert field_of(scenario(graph={'family': 'star', 'n': 1})) == 'graph.n'

    def test_range_not_multiple(self):
        assert field_of(scenario(quantizer={'delta': 0.7, 'range_l': 2})) == \
            'quantizer.range_l'

    def test_negative_std(self):
        assert field_of(scenario(data={'std': -1})) == 'data.std'

    def test_fixed_rho_requires_value(self):
        assert field_of(scenario(rho={'policy': 'fixed'})) == 'rho.value'

    def test_schedule_factor(self):
        assert field_of(scenario(rho={'policy': 'schedule', 'factor': 1})) == \
            'rho.factor'

    def test_runs_positive(self):
        assert field_of(scenario(run={'algorithm': 'bq', 'runs': 0})) == 'run.runs'

    def test_unknown_algorithm(self):
        assert field_of(scenario(run={'algorithm': 'gossip'})) == 'run.algorithm'

    def test_sweep_block(self):
        params = eIO.Config(scenario(sweep={'kind': 'time',
                                            'n_list': [5]})).validate()
        assert params['sweep']['kind'] == 'time'
        assert params['sweep']['families'] == list(eIO.SWEEP_FAMILIES)
        assert field_of(scenario(sweep={'families': ['ring']})) == \
            'sweep.families'

    def test_explicit_graph(self):
        graph = {'family': 'explicit', 'n': 3, 'edges': [[0, 1], [1, 2]]}
        params = eIO.Config(scenario(graph=graph)).validate()
        assert params['graph']['edges'] == [[0, 1], [1, 2]]

    def test_explicit_graph_disconnected(self):
        from bq_consensus.exceptions import DisconnectedGraphError
        graph = {'family': 'explicit', 'n': 4, 'edges': [[0, 1], [2, 3]]}
        with pytest.raises(DisconnectedGraphError):
            eIO.Config(scenario(graph=graph)).validate()

    def test_file_graph(self, tmp_path):
        fname = str(tmp_path / 'g.json')
        Graph.write_graph(Graph.generate('star', 4), fname)
        params = eIO.Config(scenario(graph={'family': 'file',
                                            'file': fname})).validate()
        assert params['graph']['family'] == 'explicit'
        assert params['graph']['n'] == 4
        assert len(params['graph']['edges']) == 3

    def test_read_file(self, tmp_path):
        fname = tmp_path / 'unit.json'
        fname.write_text(json.dumps(scenario()))
        assert eIO.Config(str(fname)).validate()['name'] == 'unit'

    def test_read_bad_json(self, tmp_path):
        fname = tmp_path / 'bad.json'
        fname.write_text('{"graph": ')
        with pytest.raises(ConfigError):
            eIO.Config(str(fname))


class TestScenarioConfig:
    def build(self):
        sc = eIO.ScenarioConfig()
        sc['name'] = 'built'
        sc['family'] = 'star'
        sc['n'] = 6
        sc['delta'] = 1.
        sc['range_l'] = 30.
        sc['algorithm'] = 'bq'
        sc['runs'] = 3
        return sc

    def test_config(self):
        config = self.build().config
        assert config == {'name': 'built',
                          'graph': {'family': 'star', 'n': 6},
                          'quantizer': {'delta': 1., 'range_l': 30.},
                          'run': {'algorithm': 'bq', 'runs': 3}}

    def test_case_insensitive(self):
        sc = self.build()
        assert sc['N'] == 6
        assert 'range_l' in sc

    def test_type_checked(self):
        sc = eIO.ScenarioConfig()
        with pytest.raises(ConfigError):
            sc['n'] = 'six'
        with pytest.raises(ConfigError):
            sc['colour'] = 'red'

    def test_missing_required(self):
        sc = eIO.ScenarioConfig()
        sc['family'] = 'star'
        with pytest.raises(ConfigError):
            sc.config

    def test_write(self, tmp_path):
        fname = str(tmp_path / 'built.json')
        self.build().write(fname)
        params = eIO.Config(fname).validate()
        assert params['run']['runs'] == 3

    def test_config_accepts_builder(self):
        assert eIO.Config(self.build()).validate()['graph']['n'] == 6


class TestWriters:
    def test_dumps_sorted(self):
        text = eIO.dumps({'b': np.int64(2), 'a': np.array([1.5, 2.])})
        assert text == '{"a": [1.5, 2.0], "b": 2}'

    def test_write_records(self, tmp_path):
        fname = str(tmp_path / 'runs.jsonl')
        eIO.write_records([{'run': 0, 'kind': 'converged'},
                           {'run': 1, 'kind': 'cyclic'}], fname)
        lines = open(fname).read().splitlines()
        assert [json.loads(line)['run'] for line in lines] == [0, 1]

    def test_record_writer_overwrite(self, tmp_path):
        fname = str(tmp_path / 'runs.jsonl')
        eIO.write_records([{'run': 0}], fname)
        eIO.write_records([{'run': 5}], fname)
        assert open(fname).read() == '{"run": 5}\n'
        eIO.RecordWriter(fname, overwrite=False).write_records([{'run': 6}])
        assert len(open(fname).read().splitlines()) == 2

    def test_bq_trace_frame(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5), trace=True)
        df = eIO.bq_trace_frame(out)
        assert list(df.columns) == ['k', 'node', 'x', 'q_level', 'alpha']
        assert len(df) == 2 * (out.iterations + 1)
        row = df[(df['k'] == 1) & (df['node'] == 1)].iloc[0]
        assert row['q_level'] == 1.
        assert row['alpha'] == pytest.approx(0.25)

    def test_bq_trace_frame_requires_trace(self, two_node, spec_5):
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5))
        with pytest.raises(ValueError):
            eIO.bq_trace_frame(out)

    def test_ebq_trace_frame(self, two_node, spec_5):
        out = ebq.run_ebq(BqConfig(two_node, [12., 14.], 0.01, spec_5),
                          trace=True)
        df = eIO.ebq_trace_frame(out)
        assert list(df.columns) == ['k', 'call', 'node', 'x', 'q_level',
                                    'alpha', 't', 'value']
        last = df[df['k'] == df['k'].max()]
        np.testing.assert_allclose(last['value'], [13., 13.])

    def test_hdf5_round_trip(self, tmp_path, two_node, spec_5):
        fname = str(tmp_path / 'runs.hdf5')
        out = bq.run(BqConfig(two_node, [0.3, 1.7], 0.25, spec_5), trace=True)
        h5 = eIO.HDF5Write(fname)
        h5.write_outcome(0, out)
        h5.write_table('summary', pd.DataFrame({'n': [2], 'family': ['pair']}))

        reader = Experiment_output.HDF5Reader(fname)
        assert reader.keys() == ['0']
        np.testing.assert_array_equal(reader.get_data(0, 'q'), out.trace['q'])
        assert reader.get_summary(0)['kind'] == 'converged'
        assert reader.get_data_by_path('tables/summary/n')[0] == 2
