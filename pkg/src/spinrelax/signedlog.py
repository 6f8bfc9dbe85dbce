"""Signed values stored as (sign, natural log of magnitude).

Cosine products on large lattices span hundreds of decades, far outside the
double range, so correlators are carried in this representation until the
very end. Fields may be scalars or equally shaped numpy arrays; all
operations broadcast.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG10E = float(np.log10(np.e))


@dataclass(frozen=True)
class SignedLogValue:
    sign: np.ndarray | int
    logmag: np.ndarray | float

    @classmethod
    def from_linear(cls, value) -> SignedLogValue:
        v = np.asarray(value, dtype=np.float64)
        sign = np.sign(v).astype(np.int8)
        with np.errstate(divide="ignore"):
            logmag = np.log(np.abs(v))
        if v.ndim == 0:
            return cls(int(sign), float(logmag))
        return cls(sign, logmag)

    @classmethod
    def one(cls, shape=()) -> SignedLogValue:
        if shape == ():
            return cls(1, 0.0)
        return cls(np.ones(shape, dtype=np.int8), np.zeros(shape))

    def to_linear(self):
        """Linear value; magnitudes below the double range become signed zero."""
        s = np.asarray(self.sign)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            out = np.where(s == 0, 0.0, s * np.exp(np.asarray(self.logmag, dtype=np.float64)))
        return float(out) if out.ndim == 0 else out

    @property
    def log10(self):
        """log10 of the magnitude (-inf for exact zero)."""
        lm = np.where(np.asarray(self.sign) == 0, -np.inf, np.asarray(self.logmag) * LOG10E)
        return float(lm) if lm.ndim == 0 else lm

    @property
    def shape(self):
        return np.shape(self.logmag)

    def __len__(self):
        return len(self.logmag)

    def __getitem__(self, item) -> SignedLogValue:
        return SignedLogValue(np.asarray(self.sign)[item], np.asarray(self.logmag)[item])

    def __neg__(self) -> SignedLogValue:
        return SignedLogValue(-np.asarray(self.sign), self.logmag)

    def __mul__(self, other) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_linear(other)
        sign = np.asarray(self.sign) * np.asarray(other.sign)
        logmag = np.asarray(self.logmag, dtype=np.float64) + np.asarray(other.logmag)
        logmag = np.where(sign == 0, -np.inf, logmag)
        return _wrap(sign, logmag)

    __rmul__ = __mul__

    def __add__(self, other) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_linear(other)
        sa, sb = np.broadcast_arrays(np.asarray(self.sign, dtype=np.int8), np.asarray(other.sign, dtype=np.int8))
        la = np.where(sa == 0, -np.inf, self.logmag)
        lb = np.where(sb == 0, -np.inf, other.logmag)
        hi = np.maximum(la, lb)
        lo = np.minimum(la, lb)
        with np.errstate(invalid="ignore", divide="ignore"):
            gap = np.where(np.isinf(hi), -np.inf, lo - hi)
            same = sa * sb >= 0
            mag = np.where(same, hi + np.log1p(np.exp(gap)), hi + np.log1p(-np.exp(gap)))
        lead = np.where(la >= lb, sa, sb)
        lead = np.where(lead == 0, np.where(sa == 0, sb, sa), lead)
        zero = np.isneginf(mag) | np.isnan(mag) | (lead == 0)
        sign = np.where(zero, 0, lead).astype(np.int8)
        mag = np.where(zero, -np.inf, mag)
        return _wrap(sign, mag)

    __radd__ = __add__

    def __sub__(self, other) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            other = SignedLogValue.from_linear(other)
        return self + (-other)


def _wrap(sign, logmag) -> SignedLogValue:
    sign = np.asarray(sign, dtype=np.int8)
    logmag = np.asarray(logmag, dtype=np.float64)
    if sign.ndim == 0 and logmag.ndim == 0:
        return SignedLogValue(int(sign), float(logmag))
    return SignedLogValue(sign, logmag)


def from_kernel(sign, logmag) -> SignedLogValue:
    return _wrap(sign, logmag)
