"""
Rounding quantizer Q, projection T_X onto [-L, L] and the finite-bit bounded
quantizer Q_b = Q o T_X. Quantizer outputs are integer multiples of the
resolution delta; the *_level functions return the integer multiple itself,
which is what the BQ-CADMM engine carries in its state.

Ties follow the half-open interval rule (t - 1/2)delta < x <= (t + 1/2)delta,
so an exact half rounds down.

>>> from bq_consensus import Quantizer
>>> spec = Quantizer.QuantizerSpec(delta=1., range_l=25.)
>>> spec.n_levels, Quantizer.bit_width(spec)
(51, 6)
>>> Quantizer.bounded_quantize(7.3, Quantizer.QuantizerSpec(1., 5.))
5.0
"""
import math
import numpy as np

from ..exceptions import (NonFiniteInputError, PreconditionError,
                          QuantizerSpecError)

MAX_INT_LEVEL = 2 ** 62


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError('quantizer input must be finite')


def _scalar_or_array(arr):
    if arr.ndim == 0:
        return arr.item()
    return arr


class QuantizerSpec(object):
    """
    Resolution and range of a bounded quantizer. L must be a positive
    integer multiple of delta.

    Parameters:
    ----------
    :param float delta: quantization resolution, delta > 0
    :param float range_l: quantizer half range L > 0
    """
    def __init__(self, delta, range_l):
        for name, value in (('delta', delta), ('range_l', range_l)):
            if isinstance(value, bool):
                raise QuantizerSpecError('{} must be a number'.format(name))
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise QuantizerSpecError('{} must be a number, got {!r}'
                                         .format(name, value))
            if not math.isfinite(value) or value <= 0:
                raise QuantizerSpecError('{} must be finite and positive, got {}'
                                         .format(name, value))

        delta = float(delta)
        range_l = float(range_l)
        ratio = range_l / delta
        max_level = int(round(ratio))
        if max_level < 1 or abs(ratio - max_level) > 1e-9 * max(1., ratio):
            raise QuantizerSpecError('range_l / delta must be a positive '
                                     'integer, got {}'.format(ratio))

        self.__delta = delta
        self.__range_l = range_l
        self.__max_level = max_level

    @property
    def delta(self):
        return self.__delta

    @property
    def range_l(self):
        return self.__range_l

    @property
    def max_level(self):
        """
        L / delta, the largest level magnitude
        """
        return self.__max_level

    @property
    def n_levels(self):
        return 2 * self.__max_level + 1

    @property
    def bit_width(self):
        # ceil(log2(levels)) in exact integer arithmetic
        return (self.n_levels - 1).bit_length()

    def to_dict(self):
        return {'delta': self.__delta, 'range_l': self.__range_l}

    def __eq__(self, other):
        if not isinstance(other, QuantizerSpec):
            return NotImplemented
        return (self.__delta, self.__range_l) == (other.delta, other.range_l)

    def __ne__(self, other):
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return eq
        return not eq

    def __hash__(self):
        return hash((self.__delta, self.__range_l))

    def __repr__(self):
        return 'QuantizerSpec(delta={}, range_l={})'.format(self.__delta,
                                                            self.__range_l)


def _ceil_level(x, delta):
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    return np.ceil(x / delta - 0.5)


def round_level(x, delta):
    """
    Integer level t of the rounding quantizer, t = ceil(x / delta - 1/2)

    Parameters:
    ----------
    :param x: float or np.ndarray of finite values
    :param float delta: resolution

    Returns:
    -------
    :return: int or np.ndarray of int64
    """
    levels = _ceil_level(x, delta)
    if np.any(np.abs(levels) >= MAX_INT_LEVEL):
        raise PreconditionError('quantizer level of x / delta does not fit '
                                'in int64, |level| >= 2**62')
    return _scalar_or_array(levels.astype(np.int64))


def round_quantize(x, delta):
    """
    Rounding quantizer Q(x) = t * delta. The level stays a float here so
    any finite x is accepted.
    """
    return _scalar_or_array(_ceil_level(x, delta) * delta)


def project(x, range_l):
    """
    Projection T_X of x onto [-L, L]

    Parameters:
    ----------
    :param x: float or np.ndarray of finite values
    :param float range_l: half range L

    Returns:
    -------
    :return: float or np.ndarray
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    return _scalar_or_array(np.clip(x, -range_l, range_l))


def bounded_level(x, spec):
    """
    Integer level of the bounded quantizer, Q_b(x) / delta, always inside
    [-L / delta, L / delta]
    """
    levels = np.asarray(round_level(project(x, spec.range_l), spec.delta))
    levels = np.clip(levels, -spec.max_level, spec.max_level)
    return _scalar_or_array(levels)


def bounded_quantize(x, spec):
    """
    Bounded quantizer Q_b(x) = Q(T_X(x))

    Parameters:
    ----------
    :param x: float or np.ndarray
    :param QuantizerSpec spec: quantizer specification

    Returns:
    -------
    :return: float or np.ndarray of lattice points in [-L, L]
    """
    return _scalar_or_array(np.asarray(bounded_level(x, spec)) * spec.delta)


def bit_width(spec):
    """
    Number of bits needed to transmit one bounded quantizer output,
    ceil(log2(2L / delta + 1))
    """
    return spec.bit_width
