"""Signed reals stored as (sign, log|x|) so huge weights never overflow."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp


@dataclass(frozen=True)
class LogScaledReal:
    sign: int
    log: float  # log|x|; -inf for zero

    @classmethod
    def zero(cls):
        return cls(0, -math.inf)

    @classmethod
    def from_float(cls, x):
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log, sign=1):
        return cls(sign if log > -math.inf else 0, float(log))

    @classmethod
    def sum_logs(cls, logs, signs=None):
        """Stable ``sum(signs * exp(logs))``."""
        logs = np.asarray(logs, dtype=float)
        if logs.size == 0:
            return cls.zero()
        val, sgn = logsumexp(logs, b=signs, return_sign=True)
        if sgn == 0 or val == -math.inf:
            return cls.zero()
        return cls(int(sgn), float(val))

    def __mul__(self, other):
        if not isinstance(other, LogScaledReal):
            other = LogScaledReal.from_float(other)
        if self.sign == 0 or other.sign == 0:
            return LogScaledReal.zero()
        return LogScaledReal(self.sign * other.sign, self.log + other.log)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogScaledReal):
            other = LogScaledReal.from_float(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScaledReal")
        return self * LogScaledReal(other.sign, -other.log)

    def __neg__(self):
        return LogScaledReal(-self.sign, self.log)

    def __add__(self, other):
        if not isinstance(other, LogScaledReal):
            other = LogScaledReal.from_float(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        return LogScaledReal.sum_logs([self.log, other.log], [self.sign, other.sign])

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LogScaledReal):
            other = LogScaledReal.from_float(other)
        return self + (-other)

    def __float__(self):
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log)
        except OverflowError:
            return self.sign * math.inf

    @property
    def log10(self):
        return self.log / math.log(10)

    def __lt__(self, other):
        return float(self - other) < 0

    def __le__(self, other):
        return float(self - other) <= 0
