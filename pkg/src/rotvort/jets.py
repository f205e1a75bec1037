"""Multivariate polynomials truncated at degree three.

A :class:`Jet` stores ``f(y) = c0 + sum_j c1[j] y_j + sum_jh c2[j,h] y_j y_h
+ sum_jhk c3[j,h,k] y_j y_h y_k`` with fully symmetric coefficient tensors,
so the sums run over all ordered index tuples.
"""

from __future__ import annotations

import numpy as np
from scipy.special import binom


def sym2(t):
    return 0.5 * (t + t.T)


def sym3(t):
    return (
        t
        + t.transpose(0, 2, 1)
        + t.transpose(1, 0, 2)
        + t.transpose(1, 2, 0)
        + t.transpose(2, 0, 1)
        + t.transpose(2, 1, 0)
    ) / 6.0


class Jet:
    __slots__ = ("c0", "c1", "c2", "c3")

    def __init__(self, c0, c1, c2, c3):
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3

    @classmethod
    def constant(cls, value, n, dtype=complex):
        return cls(
            dtype(value),
            np.zeros(n, dtype),
            np.zeros((n, n), dtype),
            np.zeros((n, n, n), dtype),
        )

    @classmethod
    def linear(cls, value, grad, dtype=complex):
        grad = np.asarray(grad, dtype=dtype)
        n = grad.shape[0]
        out = cls.constant(value, n, dtype)
        out.c1 = grad.copy()
        return out

    @property
    def n(self):
        return self.c1.shape[0]

    def copy(self):
        return Jet(self.c0, self.c1.copy(), self.c2.copy(), self.c3.copy())

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c0 + other, self.c1, self.c2, self.c3)
        return Jet(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2, self.c3 + other.c3)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c0, -self.c1, -self.c2, -self.c3)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c0 * other, self.c1 * other, self.c2 * other, self.c3 * other)
        f, g = self, other
        c1 = f.c0 * g.c1 + g.c0 * f.c1
        c2 = f.c0 * g.c2 + g.c0 * f.c2 + sym2(np.multiply.outer(f.c1, g.c1))
        c3 = (
            f.c0 * g.c3
            + g.c0 * f.c3
            + sym3(np.multiply.outer(f.c1, g.c2) + np.multiply.outer(f.c2, g.c1))
        )
        return Jet(f.c0 * g.c0, c1, c2, c3)

    __rmul__ = __mul__

    def __pow__(self, p):
        """Real power about a nonzero constant term (binomial series)."""
        if self.c0 == 0:
            raise ZeroDivisionError("power series needs a nonzero constant term")
        base = self.c0**p
        u = (self - self.c0) * (1.0 / self.c0)
        u2 = u * u
        u3 = u2 * u
        return base * (1.0 + binom(p, 1) * u + binom(p, 2) * u2 + binom(p, 3) * u3)

    def degree(self, k):
        return (self.c0, self.c1, self.c2, self.c3)[k]

    def __call__(self, y):
        y = np.asarray(y)
        return (
            self.c0
            + self.c1 @ y
            + np.einsum("jh,j,h->", self.c2, y, y)
            + np.einsum("jhk,j,h,k->", self.c3, y, y, y)
        )


def variables(origin, basis):
    """Jets for ``z = origin + basis @ y`` (one jet per component of ``z``)."""
    basis = np.asarray(basis)
    dtype = complex if np.iscomplexobj(basis) else float
    return [Jet.linear(origin[i], basis[i], dtype) for i in range(basis.shape[0])]
