"""Truncated Taylor jets with numpy-array coefficients.

``Jet.coeffs[k]`` is the normalized Taylor coefficient ``f^(k)(x0) / k!``;
the trailing axes broadcast over many expansion points at once, so one jet
can carry a whole evaluation grid.
"""
from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 8


class Jet:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[0] - 1 > MAX_ORDER:
            raise ValueError(f"jet order must be between 0 and {MAX_ORDER}")
        self.coeffs = coeffs

    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        c = np.zeros((order + 1,) + tuple(shape))
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def derivative(self, k: int) -> np.ndarray:
        """The k-th derivative at the expansion point(s)."""
        return self.coeffs[k] * math.factorial(k)

    def derivatives(self) -> list[np.ndarray]:
        return [self.derivative(k) for k in range(self.order + 1)]

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jets of different order")
            return other
        c = np.zeros_like(self.coeffs)
        c = c + 0.0 * np.asarray(other)  # broadcast scalars and arrays
        c[0] = c[0] + other
        return Jet(c)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coeffs + self._lift(other).coeffs)
        c = self.coeffs.copy() + 0.0 * np.asarray(other)
        c[0] = c[0] + other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other, dtype=float))
        a, b = self.coeffs, self._lift(other).coeffs
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(self.order + 1):
            out[k] = sum(a[i] * b[k - i] for i in range(k + 1))
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / np.asarray(other, dtype=float))
        a, b = self.coeffs, self._lift(other).coeffs
        q = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(self.order + 1):
            acc = a[k] - sum(b[i] * q[k - i] for i in range(1, k + 1))
            q[k] = acc / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("jets support non-negative integer powers only")
        result = Jet.constant(1.0, self.order, self.coeffs.shape[1:])
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.coeffs.shape[1:]})"


def _pair(a: Jet, c0, s0, sign: float) -> tuple[Jet, Jet]:
    """Coupled recurrences for (c, s) with c' = sign * s * a', s' = c * a'."""
    n = a.order
    da = np.array([k * a.coeffs[k] for k in range(n + 1)])
    c = np.zeros_like(a.coeffs)
    s = np.zeros_like(a.coeffs)
    c[0], s[0] = c0, s0
    for k in range(1, n + 1):
        s[k] = sum(da[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = sign * sum(da[j] * s[k - j] for j in range(1, k + 1)) / k
    return Jet(c), Jet(s)


def exp(a: Jet) -> Jet:
    n = a.order
    e = np.zeros_like(a.coeffs)
    e[0] = np.exp(a.coeffs[0])
    for k in range(1, n + 1):
        e[k] = sum(j * a.coeffs[j] * e[k - j] for j in range(1, k + 1)) / k
    return Jet(e)


def sin(a: Jet) -> Jet:
    return _pair(a, np.cos(a.coeffs[0]), np.sin(a.coeffs[0]), -1.0)[1]


def cos(a: Jet) -> Jet:
    return _pair(a, np.cos(a.coeffs[0]), np.sin(a.coeffs[0]), -1.0)[0]


def sinh(a: Jet) -> Jet:
    return _pair(a, np.cosh(a.coeffs[0]), np.sinh(a.coeffs[0]), 1.0)[1]


def cosh(a: Jet) -> Jet:
    return _pair(a, np.cosh(a.coeffs[0]), np.sinh(a.coeffs[0]), 1.0)[0]


def tanh(a: Jet) -> Jet:
    # t' = (1 - t^2) a'; stays finite for large arguments, unlike sinh/cosh.
    n = a.order
    t = np.zeros_like(a.coeffs)
    v = np.zeros_like(a.coeffs)  # v = 1 - t^2
    t[0] = np.tanh(a.coeffs[0])
    v[0] = 1.0 - t[0] ** 2
    for k in range(1, n + 1):
        t[k] = sum(j * a.coeffs[j] * v[k - j] for j in range(1, k + 1)) / k
        v[k] = -sum(t[i] * t[k - i] for i in range(k + 1))
    return Jet(t)
