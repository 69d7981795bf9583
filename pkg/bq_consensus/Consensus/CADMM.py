"""
Exact (unquantized) consensus ADMM for distributed averaging. This is the
baseline the quantized algorithms are compared against and the source of
the G-norm convergence diagnostics.

Per node and iteration:

    x_i' = (rho|N_i| x_i + rho sum_j x_j - alpha_i + r_i) / (1 + 2 rho|N_i|)
    alpha' = alpha + rho Lminus x'

The dual update uses the new x, matching the 3n x 3n transition matrix
returned by transition_matrix().

>>> from bq_consensus import Graph, CADMM
>>> g = Graph.build_graph(2, [(0, 1)])
>>> s = CADMM.CadmmState.zeros(2)
>>> s = CADMM.cadmm_step(s, g, 0.5, [0., 2.])
>>> s.x, s.alpha
(array([0., 1.]), array([-0.5,  0.5]))
"""
import logging
import numpy as np

from .Quantizer import project
from ..exceptions import ColumnSpaceError, PreconditionError


logger = logging.getLogger(__name__)

DEFAULT_MUS = (1.1, 1.5, 2., 4., 8.)


class CadmmState(object):
    """
    Primal/dual state of the exact CADMM iteration

    Parameters:
    ----------
    :param np.ndarray x: primal n-vector
    :param np.ndarray alpha: dual n-vector
    :param int k: iteration index
    """
    def __init__(self, x, alpha, k=0):
        self.x = np.array(x, dtype=float)
        self.alpha = np.array(alpha, dtype=float)
        self.k = int(k)
        if self.x.shape != self.alpha.shape:
            raise ValueError('x and alpha must have the same shape')

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n), 0)

    def stack(self, r):
        """
        Returns the stacked 3n vector s = [x; alpha; r]
        """
        return np.concatenate([self.x, self.alpha, np.asarray(r, dtype=float)])


class DualPair(object):
    """
    Edge-space variables of the G-norm analysis: z = 1/2 Mplus x and the
    row space element beta of Mminus with Mminus beta = alpha
    """
    def __init__(self, z, beta):
        self.z = z
        self.beta = beta


class RateInfo(object):
    """
    Q-linear contraction constant delta for a given mu > 1
    """
    def __init__(self, delta_rate, mu):
        self.delta_rate = delta_rate
        self.mu = mu

    def __repr__(self):
        return 'RateInfo(delta_rate={:.6g}, mu={})'.format(self.delta_rate,
                                                            self.mu)


def _check_rho(rho):
    if not rho > 0:
        raise PreconditionError('rho must be positive, got {}'.format(rho))


def cadmm_step(s, g, rho, r, spec=None):
    """
    One synchronous CADMM iteration for distributed averaging.

    Parameters:
    ----------
    :param CadmmState s: current state
    :param Graph g: network topology
    :param float rho: ADMM step size
    :param np.ndarray r: local data vector
    :param QuantizerSpec spec: optional; when given, neighbors exchange
        the projections T_X(x) (constrained least squares form)

    Returns:
    -------
    :return: CadmmState at k + 1
    """
    _check_rho(rho)
    mats = g.matrices
    r = np.asarray(r, dtype=float)
    denom = 1. + 2. * rho * g.degrees

    x_sent = s.x if spec is None else project(s.x, spec.range_l)
    x_new = (rho * mats.Lplus.dot(x_sent) - s.alpha + r) / denom

    x_dual = x_new if spec is None else project(x_new, spec.range_l)
    alpha_new = s.alpha + rho * mats.Lminus.dot(x_dual)
    return CadmmState(x_new, alpha_new, s.k + 1)


def fixed_point(r):
    """
    Optimal primal/dual pair of the averaging problem

    :param np.ndarray r: data vector
    :return: (x*, alpha*) = (1 rbar, r - 1 rbar)
    """
    r = np.asarray(r, dtype=float)
    rbar = r.mean()
    x_star = np.full(r.shape, rbar)
    return x_star, r - x_star


def transition_matrix(g, rho):
    """
    3n x 3n matrix D with s^{k+1} = D s^k, s = [x; alpha; r]:

        D = [[rho D0 Lplus,           -D0,                D0          ],
             [rho^2 Lminus D0 Lplus,  I - rho Lminus D0,  rho Lminus D0],
             [0,                      0,                  I           ]]

    with D0 = (I + 2 rho W)^-1.
    """
    _check_rho(rho)
    mats = g.matrices
    n = g.n
    eye = np.eye(n)
    D0 = np.diag(1. / (1. + 2. * rho * g.degrees))
    LmD0 = mats.Lminus.dot(D0)

    D = np.zeros((3 * n, 3 * n))
    D[:n, :n] = rho * D0.dot(mats.Lplus)
    D[:n, n:2 * n] = -D0
    D[:n, 2 * n:] = D0
    D[n:2 * n, :n] = rho ** 2 * LmD0.dot(mats.Lplus)
    D[n:2 * n, n:2 * n] = eye - rho * LmD0
    D[n:2 * n, 2 * n:] = rho * LmD0
    D[2 * n:, 2 * n:] = eye
    return D


def delta_rate(sp, rho, mu=2.):
    """
    Contraction constant of the G-norm error,

        delta = min{(mu - 1) l2 / (mu ln+),  2 rho l2 / (rho^2 ln+ l2 + mu)}

    with l2 = lambda_2(Lminus) and ln+ = lambda_n(Lplus).

    Parameters:
    ----------
    :param SpectralInfo sp: spectral summary of the graph
    :param float rho: step size
    :param float mu: free parameter, mu > 1

    Returns:
    -------
    :return: RateInfo
    """
    _check_rho(rho)
    if not mu > 1:
        raise PreconditionError('mu must be greater than 1, got {}'.format(mu))
    l2 = sp.lambda2_minus
    lnp = sp.lambdan_plus
    first = (mu - 1.) * l2 / (mu * lnp)
    second = 2. * rho * l2 / (rho ** 2 * lnp * l2 + mu)
    return RateInfo(min(first, second), mu)


def best_delta_rate(sp, rho, mus=DEFAULT_MUS):
    """
    Scans mu and returns the RateInfo with the largest delta
    """
    return max((delta_rate(sp, rho, mu) for mu in mus),
               key=lambda info: info.delta_rate)


def r_linear_envelope(sp, rho, delta):
    """
    Factor c with ||s^{k+1} - s*|| <= c ||u^k - u*||_G,
    c = 1 + sqrt(2 rho lambda_n(Lminus) / (1 + delta))
    """
    return 1. + np.sqrt(2. * rho * sp.lambdan_minus / (1. + delta))


def dual_pair(s, g, tol=1e-8):
    """
    Recovers (z, beta) from a CADMM state. beta = Mminus^T (2 Lminus)^+ alpha
    lies in the row space of Mminus.

    Parameters:
    ----------
    :param CadmmState s: state
    :param Graph g: topology
    :param float tol: column space residual tolerance, relative to
        max(1, ||alpha||)

    Returns:
    -------
    :return: DualPair
    """
    mats = g.matrices
    alpha = s.alpha
    pinv = mats.Lminus_pinv
    residual = alpha - mats.Lminus.dot(pinv.dot(alpha))
    if np.linalg.norm(residual) > tol * max(1., np.linalg.norm(alpha)):
        raise ColumnSpaceError('alpha is outside the column space of Lminus, '
                               'residual {:.3e}'.format(np.linalg.norm(residual)))

    z = 0.5 * mats.Mplus.T.dot(s.x)
    beta = mats.Mminus.T.dot(0.5 * pinv.dot(alpha))
    return DualPair(z, beta)


def g_norm(z, beta, rho):
    """
    sqrt(rho ||z||^2 + ||beta||^2 / rho)
    """
    return float(np.sqrt(rho * z.dot(z) + beta.dot(beta) / rho))


def g_norm_error(s, g, rho, r):
    """
    Distance ||u^k - u*||_G between the state and the optimum, with
    G = diag(rho I, I / rho) on the stacked edge variables u = (z, beta).

    Parameters:
    ----------
    :param CadmmState s: state; alpha must lie in the column space of Lminus
    :param Graph g: topology
    :param float rho: step size
    :param np.ndarray r: data vector

    Returns:
    -------
    :return: float
    """
    _check_rho(rho)
    x_star, alpha_star = fixed_point(r)
    u = dual_pair(s, g)
    u_star = dual_pair(CadmmState(x_star, alpha_star), g)
    return g_norm(u.z - u_star.z, u.beta - u_star.beta, rho)


def g_norm_difference(s1, s0, g, rho):
    """
    ||u^{k+1} - u^k||_G between two consecutive states
    """
    u1 = dual_pair(s1, g)
    u0 = dual_pair(s0, g)
    return g_norm(u1.z - u0.z, u1.beta - u0.beta, rho)


def iterative_error(values, rbar):
    """
    Root mean square distance from consensus on the average,
    ||v - 1 rbar|| / sqrt(n)
    """
    values = np.asarray(values, dtype=float)
    return float(np.linalg.norm(values - rbar) / np.sqrt(values.size))


def rough_time_bound(g, sp, rho, r, spec):
    """
    Rough estimate of the BQ-CADMM convergence time from zero initialization,

        (n T_X(rbar)^2 + ||r - 1 T_X(rbar)||^2 / (2 rho^2 lambda_2)) / delta^2

    Parameters:
    ----------
    :param Graph g: topology
    :param SpectralInfo sp: spectral summary of g
    :param float rho: step size
    :param np.ndarray r: data vector
    :param QuantizerSpec spec: quantizer

    Returns:
    -------
    :return: float iteration estimate
    """
    _check_rho(rho)
    r = np.asarray(r, dtype=float)
    t_rbar = project(r.mean(), spec.range_l)
    dev = r - t_rbar
    total = g.n * t_rbar ** 2 + dev.dot(dev) / (2. * rho ** 2 * sp.lambda2_minus)
    return float(total / spec.delta ** 2)


class CadmmRun(object):
    """
    Result of run_cadmm()

    Parameters:
    ----------
    :param CadmmState state: final state
    :param bool converged: True if the max-norm tolerance was met
    :param dict history: optional per-iteration arrays, keys 'x', 'alpha',
        'g_norm', 'g_diff' and 'iterative_error'
    """
    def __init__(self, state, converged, rbar, history):
        self.state = state
        self.converged = converged
        self.rbar = rbar
        self.history = history

    @property
    def iterations(self):
        return self.state.k

    @property
    def max_error(self):
        return float(np.max(np.abs(self.state.x - self.rbar)))

    @property
    def consensus_value(self):
        return float(self.state.x.mean())

    @property
    def trace(self):
        """
        Non empty per-iteration arrays of the history, None without trace
        """
        if not len(self.history['x']):
            return None
        return {key: value for key, value in self.history.items()
                if len(value)}

    def to_dict(self):
        """
        JSON ready summary of the run
        """
        return {'kind': 'converged' if self.converged else 'unresolved',
                'iterations': self.iterations,
                'rbar': float(self.rbar),
                'consensus_value': self.consensus_value,
                'consensus_error': abs(self.consensus_value - self.rbar),
                'max_error': self.max_error}


def run_cadmm(g, rho, r, **kwargs):
    """
    Runs the exact CADMM baseline until ||x - 1 rbar||_inf <= tol or
    max_iter iterations.

    Parameters:
    ----------
    :param Graph g: topology
    :param float rho: step size
    :param np.ndarray r: data vector
    :keyword int max_iter: iteration cap (default 100000)
    :keyword float tol: max-norm stopping tolerance (default 1e-8)
    :keyword np.ndarray x0: initial primal vector (alpha0 = 0)
    :keyword QuantizerSpec spec: run the projected form
    :keyword bool trace: record x and alpha per iteration
    :keyword bool g_norms: record G-norm errors and differences

    Returns:
    -------
    :return: CadmmRun
    """
    params = {'max_iter': 100000,
              'tol': 1e-8,
              'x0': None,
              'spec': None,
              'trace': False,
              'g_norms': False}
    params.update(kwargs)

    r = np.asarray(r, dtype=float)
    rbar = r.mean()
    target = rbar if params['spec'] is None else \
        project(rbar, params['spec'].range_l)
    x0 = np.zeros(g.n) if params['x0'] is None else params['x0']
    s = CadmmState(x0, np.zeros(g.n), 0)

    history = {'x': [], 'alpha': [], 'g_norm': [], 'g_diff': [],
               'iterative_error': []}

    def record(state, previous):
        if params['trace']:
            history['x'].append(state.x.copy())
            history['alpha'].append(state.alpha.copy())
        history['iterative_error'].append(iterative_error(state.x, rbar))
        if params['g_norms']:
            history['g_norm'].append(g_norm_error(state, g, rho, r))
            if previous is not None:
                history['g_diff'].append(g_norm_difference(state, previous,
                                                           g, rho))

    logger.info('[Running CADMM, n=%d, rho=%g]', g.n, rho)
    record(s, None)
    converged = False
    while s.k < params['max_iter']:
        s_new = cadmm_step(s, g, rho, r, spec=params['spec'])
        record(s_new, s)
        s = s_new
        if np.max(np.abs(s.x - target)) <= params['tol']:
            converged = True
            break

    history = {key: np.array(value) for key, value in history.items()}
    return CadmmRun(s, converged, rbar, history)
