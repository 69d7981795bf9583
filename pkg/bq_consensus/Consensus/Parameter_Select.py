"""
Step size policies for BQ-CADMM: the n / m heuristic, the ceilings that
guarantee a consensus accuracy, and the decreasing rho schedule that runs
fixed blocks of iterations while dividing rho by an integer factor.

>>> from bq_consensus import Parameter_Select as ps
>>> ps.rho_heuristic(50, 100)
0.5
>>> sched = ps.RhoSchedule(rho0=1.)
>>> sched.stages
[1.0, 0.1, 0.01, 0.001]
>>> sched.final_rho
0.0001
"""
import logging
import math
import numbers

from . import BQ_CADMM as bq
from ..exceptions import PreconditionError


logger = logging.getLogger(__name__)


def rho_heuristic(n, m=None):
    """
    rho = n / m, or 1 when the edge count is unknown
    """
    if m is None:
        return 1.
    return float(n) / m


def rho_for_resolution(n, spec):
    """
    Largest rho keeping the convergent and cyclic errors within one
    quantization resolution, delta / (8 n L)
    """
    return spec.delta / (8. * n * spec.range_l)


def rho_gamma_max(n, spec):
    """
    Largest rho with gamma0 = delta / 2, delta / (2 n (4L - delta)).
    Returns math.inf when 4L <= delta, where every rho qualifies.
    """
    if 4. * spec.range_l <= spec.delta:
        return math.inf
    return spec.delta / (2. * n * (4. * spec.range_l - spec.delta))


class RhoSchedule(object):
    """
    Decreasing step size schedule. Stage j uses rho0 / factor**j and runs
    block iterations while its value is above floor; the first value at
    or below floor runs until convergence or cycling is detected.

    Parameters:
    ----------
    :param float rho0: initial step size
    :param int factor: integer divisor per stage, >= 2
    :param int block: iterations per stage, >= 1
    :param float floor: terminal threshold > 0
    """
    def __init__(self, rho0, factor=10, block=50, floor=1e-4):
        if isinstance(rho0, bool) or not rho0 > 0 or not math.isfinite(rho0):
            raise PreconditionError('rho0 must be positive, got {}'.format(rho0))
        if isinstance(factor, bool) or not isinstance(factor, numbers.Integral) \
                or factor < 2:
            raise PreconditionError('factor must be an integer >= 2, got {!r}'
                                    .format(factor))
        if isinstance(block, bool) or not isinstance(block, numbers.Integral) \
                or block < 1:
            raise PreconditionError('block must be an integer >= 1, got {!r}'
                                    .format(block))
        if not floor > 0:
            raise PreconditionError('floor must be positive, got {}'.format(floor))

        self.__rho0 = float(rho0)
        self.__factor = int(factor)
        self.__block = int(block)
        self.__floor = float(floor)

    @property
    def rho0(self):
        return self.__rho0

    @property
    def factor(self):
        return self.__factor

    @property
    def block(self):
        return self.__block

    @property
    def floor(self):
        return self.__floor

    def value(self, j):
        return self.__rho0 / self.__factor ** j

    @property
    def stages(self):
        """
        Step sizes of the fixed-length stages
        """
        rhos = []
        j = 0
        while self.value(j) > self.__floor:
            rhos.append(self.value(j))
            j += 1
        return rhos

    @property
    def final_rho(self):
        return self.value(len(self.stages))

    def to_dict(self):
        return {'rho0': self.__rho0, 'factor': self.__factor,
                'block': self.__block, 'floor': self.__floor}

    def __repr__(self):
        return 'RhoSchedule(rho0={}, factor={}, block={}, floor={})'.format(
            self.__rho0, self.__factor, self.__block, self.__floor)


class ScheduleOutcome(object):
    """
    RunOutcome of the final stage of a schedule, with iteration counts
    that include the fixed-length stages. Unknown attributes are looked up
    on the final stage outcome.

    Parameters:
    ----------
    :param RunOutcome final: outcome of the terminal stage
    :param list stage_rhos: step sizes of the fixed-length stages
    :param list stage_boundaries: iteration index each stage starts at
    """
    def __init__(self, final, stage_rhos, stage_boundaries):
        self.final = final
        self.stage_rhos = stage_rhos
        self.stage_boundaries = stage_boundaries

    def __getattr__(self, name):
        if name == 'final':
            raise AttributeError(name)
        return getattr(self.final, name)

    @property
    def offset(self):
        """
        Iterations spent in the fixed-length stages
        """
        return self.stage_boundaries[-1]

    @property
    def iterations(self):
        return self.offset + self.final.iterations

    @property
    def convergence_time(self):
        t = self.final.convergence_time
        if t is None:
            return None
        return self.offset + t

    def to_dict(self):
        d = self.final.to_dict()
        d['iterations'] = self.iterations
        d['stage_rhos'] = list(self.stage_rhos)
        d['stage_boundaries'] = list(self.stage_boundaries)
        return d


def run_with_schedule(cfg, sched, **kwargs):
    """
    Runs BQ-CADMM under a decreasing step size schedule. Local variables
    carry over between stages; the dual lattice is rescaled exactly,
    a <- a * factor, so alpha = rho delta a is unchanged as a real.

    Parameters:
    ----------
    :param BqConfig cfg: configuration; cfg.rho is ignored
    :param RhoSchedule sched: schedule
    :param kwargs: passed to BQ_CADMM.run for the terminal stage

    Returns:
    -------
    :return: ScheduleOutcome
    """
    check = kwargs.get('check_invariants', True)
    state = cfg.init
    boundaries = []
    k = 0
    for rho in sched.stages:
        boundaries.append(k)
        logger.debug('[Schedule stage rho=%g, iterations %d-%d]', rho, k,
                     k + sched.block)
        state = bq.advance(cfg.replace(rho=rho, init=state), sched.block,
                           check_invariants=check)
        state = bq.IntState(state.q, state.a * sched.factor, state.x, state.k)
        k += sched.block
    boundaries.append(k)

    final = bq.run(cfg.replace(rho=sched.final_rho, init=state), **kwargs)
    return ScheduleOutcome(final, sched.stages, boundaries)
