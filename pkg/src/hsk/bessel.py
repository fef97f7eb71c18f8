"""Bessel functions J_n(2*sqrt(theta)) for integer orders n = 0..n_max.

Values come from Miller's backward recurrence, normalized with
``J_0^2 + 2 * sum_{m>=1} J_m^2 = 1``. An ascending power series serves as an
independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import kahan_sum

__all__ = [
    "BesselTable",
    "bessel_row",
    "bessel_series_oracle",
    "recurrence_residual",
    "bessel_tail_bound",
    "bessel_weighted_tail_bound",
]

RESCALE_AT = 1e100


@dataclass(frozen=True)
class BesselTable:
    theta: float
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    @property
    def z(self) -> float:
        """Half the Bessel argument, sqrt(theta)."""
        return math.sqrt(self.theta)

    def parseval_residual(self) -> float:
        v = self.values
        return abs(v[0] ** 2 + 2.0 * kahan_sum(v[1:] ** 2) - 1.0)

    def tail_bound(self, n: int | None = None) -> float:
        """Certified upper bound on sum_{k>n} J_k^2 (default n = n_max)."""
        return bessel_tail_bound(self.theta, self.n_max if n is None else n)


def _log_term(z: float, k: int) -> float:
    return 2.0 * (k * math.log(z) - math.lgamma(k + 1.0))


def bessel_tail_bound(theta: float, n: int) -> float:
    """Upper bound on sum_{k>n} J_k(2z)^2 with z = sqrt(theta).

    Uses |J_k(2z)| <= z^k / k!, whose squares decrease geometrically once
    k + 1 > z, so the tail is at most the first term over (1 - ratio).
    """
    z = math.sqrt(theta)
    k = n + 1
    # enter the geometric regime before bounding
    extra = 0.0
    while (z / (k + 1)) ** 2 >= 0.5:
        extra += math.exp(_log_term(z, k))
        k += 1
    ratio = (z / (k + 1)) ** 2
    return extra + math.exp(_log_term(z, k)) / (1.0 - ratio)


def bessel_weighted_tail_bound(theta: float, n: int) -> float:
    """Upper bound on sum_{k>n} (k+1) J_k(2z)^2."""
    z = math.sqrt(theta)
    k = n + 1
    extra = 0.0
    while (k + 2) / (k + 1) * (z / (k + 1)) ** 2 >= 0.5:
        extra += (k + 1) * math.exp(_log_term(z, k))
        k += 1
    ratio = (k + 2) / (k + 1) * (z / (k + 1)) ** 2
    return extra + (k + 1) * math.exp(_log_term(z, k)) / (1.0 - ratio)


def _miller(z: float, n_start: int) -> np.ndarray:
    vals = np.zeros(n_start + 2)
    vals[n_start] = 1.0
    # J_{n-1} = (n/z) J_n - J_{n+1}
    for n in range(n_start, 0, -1):
        vals[n - 1] = (n / z) * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > RESCALE_AT:
            vals[n - 1 :] /= RESCALE_AT
    return vals[: n_start + 1]


def bessel_row(theta: float, n_max: int, n_start: int | None = None) -> BesselTable:
    """Table of J_n(2*sqrt(theta)) for n = 0..n_max."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    z = math.sqrt(theta)
    if n_start is None:
        n_start = n_max + max(30, math.ceil(4.0 * z) + 20)
    raw = _miller(z, n_start)
    norm2 = raw[0] ** 2 + 2.0 * kahan_sum(raw[1:] ** 2)
    # Parseval fixes the scale only; J_0 + 2 * sum J_{2m} = 1 fixes the sign.
    sign = math.copysign(1.0, raw[0] + 2.0 * kahan_sum(raw[2::2]))
    vals = raw[: n_max + 1] * (sign / math.sqrt(norm2))
    if not np.all(np.isfinite(vals)):
        raise OverflowError("backward recurrence overflowed")
    vals.setflags(write=False)
    return BesselTable(theta=float(theta), values=vals)


def bessel_series_oracle(nu: int, z: float, eps: float = 1e-16) -> float:
    """J_nu(2z) from sum_k (-1)^k z^(nu+2k) / (k! (nu+k)!).

    Independent of :func:`bessel_row`. Cancellation grows with |z|; the
    absolute error stays near ``eps`` only for moderate arguments (|z| <= 2).
    """
    if abs(z) > 20:
        raise ValueError("series oracle is limited to |z| <= 20")
    if nu < 0:
        raise ValueError("nu must be non-negative")
    if eps <= 0:
        raise ValueError("eps must be positive")
    term = 1.0
    for j in range(1, nu + 1):
        term *= z / j
    terms = [term]
    partial = term
    k = 0
    zz = z * z
    while term != 0.0:
        nxt = -term * zz / ((k + 1) * (nu + k + 1))
        if abs(nxt) < eps * abs(partial) and abs(nxt) <= abs(term):
            break
        terms.append(nxt)
        partial += nxt
        term = nxt
        k += 1
    return kahan_sum(terms)


def recurrence_residual(table: BesselTable, n: int) -> float:
    """v_{n+2} - ((n+1)/sqrt(theta)) v_{n+1} + v_n."""
    if not 0 <= n <= table.n_max - 2:
        raise IndexError(f"n={n} outside 0..{table.n_max - 2}")
    v = table.values
    return float(v[n + 2] - ((n + 1) / table.z) * v[n + 1] + v[n])
