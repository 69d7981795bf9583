"""
Graph.py hosts the fixed, undirected network topologies the consensus
algorithms run on. A Graph is validated on construction (connected, no
self-loops, no duplicate edges) and lazily exposes the incidence matrices,
the signed and signless Laplacians and the spectral quantities used by the
rate and error bound formulas.

Arcs are enumerated edge-major with the (low -> high) direction first, so
edge e = (i, j), i < j, owns arcs 2e = (i -> j) and 2e + 1 = (j -> i).

>>> from bq_consensus import Graph
>>>
>>> g = Graph.build_graph(3, [(0, 1), (1, 2)])
>>> g.degrees
array([1, 2, 1])
>>> Graph.matrices(g).Lminus
array([[ 1., -1.,  0.],
       [-1.,  2., -1.],
       [ 0., -1.,  1.]])
>>> Graph.spectral(g).lambda2_minus
1.0
>>> star = Graph.generate('star', 5, rng=42)
"""
import json
import logging
import numbers
import numpy as np
import networkx as nx
from scipy import linalg

from ..exceptions import DisconnectedGraphError, SelfLoopError, \
    DuplicateEdgeError, NodeCountError, InfeasibleEdgeCountError, \
    MalformedEdgeError, GraphValidationError, ConfigError


logger = logging.getLogger(__name__)

FAMILIES = ('star', 'complete', 'random_connected', 'intermediate')


def _readonly(arr):
    arr.flags.writeable = False
    return arr


def intermediate_edge_count(n):
    """
    Edge count of the intermediate density family, ceil((n + 2)(n - 1) / 4),
    half way between a star and a complete graph.

    :param int n: number of nodes
    :return: (int) m
    """
    return ((n + 2) * (n - 1) + 3) // 4


def max_edge_count(n):
    return n * (n - 1) // 2


class GraphMatrices(object):
    """
    Incidence, Laplacian and degree matrices of a Graph. Built by
    matrices(g); all arrays are read only.

    Parameters:
    ----------
    :param Graph graph: validated Graph object
    """
    def __init__(self, graph):
        n = graph.n
        m = graph.m
        Mminus = np.zeros((n, 2 * m))
        for l, (tail, head) in enumerate(graph.arc_order):
            Mminus[tail, l] = 1.
            Mminus[head, l] = -1.
        Mplus = np.abs(Mminus)

        self.__Mminus = _readonly(Mminus)
        self.__Mplus = _readonly(Mplus)
        self.__Lminus = _readonly(0.5 * Mminus.dot(Mminus.T))
        self.__Lplus = _readonly(0.5 * Mplus.dot(Mplus.T))
        self.__W = _readonly(np.diag(graph.degrees.astype(float)))
        self.__A = _readonly(graph.adjacency.astype(float))
        self.__Lminus_int = _readonly(np.diag(graph.degrees) - graph.adjacency)
        self.__Lminus_pinv = None

    @property
    def Mminus(self):
        """
        n x 2m oriented incidence matrix
        """
        return self.__Mminus

    @property
    def Mplus(self):
        """
        n x 2m unoriented incidence matrix
        """
        return self.__Mplus

    @property
    def Lminus(self):
        """
        signed Laplacian, W - A
        """
        return self.__Lminus

    @property
    def Lplus(self):
        """
        signless Laplacian, W + A
        """
        return self.__Lplus

    @property
    def W(self):
        return self.__W

    @property
    def A(self):
        return self.__A

    @property
    def Lminus_int(self):
        """
        signed Laplacian as an int64 matrix for exact lattice updates
        """
        return self.__Lminus_int

    @property
    def Lminus_pinv(self):
        """
        Moore-Penrose pseudoinverse of the signed Laplacian
        """
        if self.__Lminus_pinv is None:
            self.__Lminus_pinv = _readonly(linalg.pinvh(self.__Lminus))
        return self.__Lminus_pinv


class SpectralInfo(object):
    """
    Eigenvalue summary of the signed and signless Laplacians

    Parameters:
    ----------
    :param np.ndarray eig_minus: ascending eigenvalues of Lminus
    :param np.ndarray eig_plus: ascending eigenvalues of Lplus
    """
    def __init__(self, eig_minus, eig_plus):
        self.eig_minus = _readonly(np.asarray(eig_minus))
        self.eig_plus = _readonly(np.asarray(eig_plus))

    @property
    def lambda2_minus(self):
        """
        algebraic connectivity, second smallest eigenvalue of Lminus
        """
        return float(self.eig_minus[1])

    @property
    def lambdan_minus(self):
        return float(self.eig_minus[-1])

    @property
    def lambdan_plus(self):
        return float(self.eig_plus[-1])

    def __repr__(self):
        return 'SpectralInfo(lambda2_minus={:.6g}, lambdan_minus={:.6g}, ' \
               'lambdan_plus={:.6g})'.format(self.lambda2_minus,
                                             self.lambdan_minus,
                                             self.lambdan_plus)


class Graph(object):
    """
    Immutable, connected, undirected network topology. Use build_graph()
    or generate() rather than calling the constructor directly; the
    constructor trusts that the edge list has been validated.

    Parameters:
    ----------
    :param int n: number of nodes
    :param list edges: sorted list of (i, j) tuples with i < j
    """
    def __init__(self, n, edges):
        self.__n = n
        self.__edges = tuple(edges)

        neighbors = [[] for _ in range(n)]
        for i, j in self.__edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        self.__neighbors = tuple(tuple(sorted(nbr)) for nbr in neighbors)
        self.__degrees = _readonly(np.array([len(nbr) for nbr in neighbors],
                                            dtype=np.int64))

        arcs = []
        for i, j in self.__edges:
            arcs.append((i, j))
            arcs.append((j, i))
        self.__arc_order = tuple(arcs)

        adjacency = np.zeros((n, n), dtype=np.int64)
        for i, j in self.__edges:
            adjacency[i, j] = 1
            adjacency[j, i] = 1
        self.__adjacency = _readonly(adjacency)

        self.__matrices = None
        self.__spectral = None

    @property
    def n(self):
        return self.__n

    @property
    def m(self):
        return len(self.__edges)

    @property
    def edges(self):
        """
        canonical (sorted, low endpoint first) edge tuple
        """
        return self.__edges

    @property
    def neighbors(self):
        return self.__neighbors

    @property
    def degrees(self):
        return self.__degrees

    @property
    def arc_order(self):
        """
        2m directed arcs, edge-major, low -> high arc first
        """
        return self.__arc_order

    @property
    def adjacency(self):
        return self.__adjacency

    @property
    def matrices(self):
        if self.__matrices is None:
            self.__matrices = GraphMatrices(self)
        return self.__matrices

    @property
    def spectral(self):
        if self.__spectral is None:
            mats = self.matrices
            self.__spectral = SpectralInfo(linalg.eigvalsh(mats.Lminus),
                                           linalg.eigvalsh(mats.Lplus))
        return self.__spectral

    def to_networkx(self):
        """
        Returns a networkx.Graph copy of the topology
        """
        g = nx.Graph()
        g.add_nodes_from(range(self.__n))
        g.add_edges_from(self.__edges)
        return g

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.__n == other.n and self.__edges == other.edges

    def __ne__(self, other):
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return eq
        return not eq

    def __hash__(self):
        return hash((self.__n, self.__edges))

    def __repr__(self):
        return 'Graph(n={}, m={})'.format(self.__n, self.m)


def build_graph(n, edge_list):
    """
    Validates a node count and a list of unordered node pairs and returns
    a Graph with canonical edge and arc ordering.

    Parameters:
    ----------
    :param int n: node count, n >= 2
    :param list edge_list: iterable of (i, j) node pairs, 0 <= i, j < n

    Returns:
    -------
    :return: Graph
    """
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise NodeCountError('node count must be an integer, got {!r}'.format(n))
    n = int(n)
    if n < 2:
        raise NodeCountError('node count must be at least 2, got {}'.format(n))

    seen = set()
    edges = []
    for pair in edge_list:
        try:
            i, j = pair
        except (TypeError, ValueError):
            raise MalformedEdgeError('edge {!r} is not a node pair'.format(pair))

        for node in (i, j):
            if isinstance(node, bool) or not isinstance(node, numbers.Integral):
                raise MalformedEdgeError('edge {!r} has a non integer '
                                         'endpoint'.format(pair))
            if not 0 <= node < n:
                raise MalformedEdgeError('edge {!r} references a node outside '
                                         '[0, {})'.format(pair, n))
        i, j = int(i), int(j)
        if i == j:
            raise SelfLoopError('self-loop at node {}'.format(i))

        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdgeError('duplicate edge {}'.format(key))
        seen.add(key)
        edges.append(key)

    edges.sort()
    nxg = nx.Graph()
    nxg.add_nodes_from(range(n))
    nxg.add_edges_from(edges)
    if not nx.is_connected(nxg):
        n_comp = nx.number_connected_components(nxg)
        raise DisconnectedGraphError('graph has {} connected components'
                                     .format(n_comp))

    return Graph(n, edges)


def _random_connected_edges(n, m, rng):
    """
    Starts from the complete graph and removes uniformly random edges,
    putting an edge back and re-sampling whenever its removal disconnects
    the graph.
    """
    nxg = nx.complete_graph(n)
    edges = sorted(nxg.edges())
    while len(edges) > m:
        idx = int(rng.integers(len(edges)))
        u, v = edges[idx]
        nxg.remove_edge(u, v)
        if nx.has_path(nxg, u, v):
            edges.pop(idx)
        else:
            nxg.add_edge(u, v)
    return edges


def generate(kind, n, rng=None, m=None):
    """
    Generates a Graph of one of the supported families.

    Parameters:
    ----------
    :param str kind: star, complete, random_connected or intermediate
    :param int n: number of nodes
    :param rng: numpy Generator or integer seed, used by the random families
    :param int m: edge count for random_connected

    Returns:
    -------
    :return: Graph
    """
    if not isinstance(kind, str):
        raise ConfigError('family', 'graph family must be a string, got {!r}'
                          .format(kind))
    kind = kind.lower()
    if kind not in FAMILIES:
        raise GraphValidationError('unknown graph family {!r}, expected one '
                                   'of {}'.format(kind, FAMILIES))
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 2:
        raise NodeCountError('node count must be an integer >= 2, got {!r}'
                             .format(n))

    if kind == 'star':
        return build_graph(n, [(0, j) for j in range(1, n)])

    elif kind == 'complete':
        return build_graph(n, [(i, j) for i in range(n)
                               for j in range(i + 1, n)])

    if kind == 'intermediate':
        m = intermediate_edge_count(n)
    elif m is None:
        raise InfeasibleEdgeCountError('random_connected requires an edge '
                                       'count m')

    if not n - 1 <= m <= max_edge_count(n):
        raise InfeasibleEdgeCountError('edge count m={} outside [{}, {}] for '
                                       'n={}'.format(m, n - 1,
                                                     max_edge_count(n), n))

    rng = np.random.default_rng(rng)
    edges = _random_connected_edges(n, m, rng)
    logger.debug('[Generated %s graph: n=%d, m=%d]', kind, n, m)
    return build_graph(n, edges)


def matrices(g):
    """
    Returns the GraphMatrices of g; computed once per Graph
    """
    return g.matrices


def spectral(g):
    """
    Returns the SpectralInfo of g; computed once per Graph
    """
    return g.spectral


def graph_to_dict(g):
    return {'n': g.n, 'edges': [[i, j] for i, j in g.edges]}


def graph_from_dict(d):
    """
    Builds a Graph from a {"n": int, "edges": [[i, j], ...]} mapping

    :param dict d: graph mapping
    :return: Graph
    """
    if not isinstance(d, dict) or 'n' not in d or 'edges' not in d:
        raise GraphValidationError('graph JSON requires "n" and "edges" keys')
    unknown = set(d) - {'n', 'edges'}
    if unknown:
        raise GraphValidationError('unknown graph JSON keys: {}'
                                   .format(sorted(unknown)))
    return build_graph(d['n'], [tuple(pair) if isinstance(pair, list) else pair
                                 for pair in d['edges']])


def write_graph(g, fname):
    """
    Writes a Graph to a JSON file

    :param Graph g: graph to serialize
    :param str fname: output file name
    """
    logger.info('[Writing to: %s]', fname)
    with open(fname, 'w') as f:
        json.dump(graph_to_dict(g), f, sort_keys=True)
        f.write('\n')


def read_graph(fname):
    """
    Reads a Graph from a JSON file

    :param str fname: graph JSON file
    :return: Graph
    """
    with open(fname) as f:
        try:
            d = json.load(f)
        except ValueError as e:
            raise GraphValidationError('{} is not valid JSON: {}'.format(fname, e))
    return graph_from_dict(d)
