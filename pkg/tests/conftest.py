import numpy as np
import pytest

from bq_consensus import CADMM, Graph, Quantizer


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run the long acceptance suites')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long running acceptance suite')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def two_node():
    return Graph.build_graph(2, [(0, 1)])


@pytest.fixture
def path3():
    return Graph.build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def k3():
    return Graph.generate('complete', 3)


@pytest.fixture
def spec_5():
    return Quantizer.QuantizerSpec(delta=1., range_l=5.)


@pytest.fixture
def spec_30():
    return Quantizer.QuantizerSpec(delta=1., range_l=30.)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def _exchanged(x, spec):
    return np.asarray(Quantizer.round_quantize(
        Quantizer.project(x, spec.range_l), spec.delta))


@pytest.fixture
def projection_step():
    """
    Quantized CADMM kept in real units: neighbors exchange Q(T_X(x)), the
    primal update is the projected CADMM step and the duals are summed
    edge by edge. Returns (x', Q(T_X(x')), alpha').
    """
    def step(x, alpha, g, rho, r, spec):
        sent = _exchanged(x, spec)
        s = CADMM.cadmm_step(CADMM.CadmmState(sent, alpha), g, rho, r,
                             spec=spec)
        sent_new = _exchanged(s.x, spec)
        alpha_new = np.array(alpha, dtype=float)
        for i, j in g.edges:
            alpha_new[i] += rho * (sent_new[i] - sent_new[j])
            alpha_new[j] -= rho * (sent_new[i] - sent_new[j])
        return s.x, sent_new, alpha_new
    return step
