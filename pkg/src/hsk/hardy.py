"""Operators on the Hardy space H^2 of the circle for Laurent-polynomial
symbols.

Matrices are truncations in the basis {1, z, z^2, ...} with entry
(m, n) = <Op z^n, z^m>. With this convention

* Toeplitz:  T_f[m, n] = f^(m - n)
* Hankel:    Gamma_f = J R_- M_f with (J h)(z) = conj(z) h(conj(z)), so
             Gamma_f[m, n] = f^(-(m + n + 1))

where f^(k) is the k-th Fourier coefficient. ``R_+ W R_+`` for the kernel
W = (f(s) g(t) - f(t) g(s)) / (1 - s conj(t)) is computed three ways: by
quadrature of the kernel, from Toeplitz commutators, and from Hankel
products. For f = conj(g) all three agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import Lcg64, numerical_rank

__all__ = [
    "LaurentPolynomial",
    "conj_symbol",
    "toeplitz_matrix",
    "hardy_hankel_matrix",
    "w_kernel_matrix",
    "quadrature_nodes",
    "toeplitz_identity_matrix",
    "hankel_product_matrix",
    "finite_rank_check",
    "rational_symbol",
    "random_trig_polynomial",
    "max_pairwise_deviation",
]


@dataclass(frozen=True)
class LaurentPolynomial:
    """sum_{n=low}^{low+len(coeffs)-1} coeffs[n - low] z^n, stored trimmed."""

    low: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        nz = np.flatnonzero(c)
        low = int(self.low)
        if nz.size == 0:
            c, low = np.zeros(0, dtype=complex), 0
        else:
            low, c = low + int(nz[0]), c[nz[0] : nz[-1] + 1]
        c.setflags(write=False)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, terms: dict[int, complex]) -> "LaurentPolynomial":
        if not terms:
            return cls(0, [])
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in terms.items():
            c[k - lo] += v
        return cls(lo, c)

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "LaurentPolynomial":
        return cls(n, [c])

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def degree(self) -> int:
        """max |n| over the support (0 for the zero polynomial)."""
        return 0 if self.is_zero else max(abs(self.low), abs(self.high))

    def coef(self, n) -> np.ndarray | complex:
        """Fourier coefficient(s) at integer index array ``n``."""
        n = np.asarray(n)
        idx = n - self.low
        ok = (idx >= 0) & (idx < len(self.coeffs))
        out = np.zeros(n.shape, dtype=complex)
        out[ok] = self.coeffs[idx[ok]]
        return out if out.ndim else complex(out)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros_like(z)
        powers = np.arange(self.low, self.high + 1)
        return np.sum(self.coeffs * z[..., None] ** powers, axis=-1)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        if self.is_zero or other.is_zero:
            return LaurentPolynomial(0, [])
        return LaurentPolynomial(self.low + other.low, np.convolve(self.coeffs, other.coeffs))

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        d = {}
        for p in (self, other):
            for k, v in zip(range(p.low, p.high + 1), p.coeffs):
                d[k] = d.get(k, 0.0) + v
        return LaurentPolynomial.from_dict(d)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.low, -self.coeffs)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)


def conj_symbol(f: LaurentPolynomial) -> LaurentPolynomial:
    """Pointwise conjugate on the circle: coefficient n becomes conj(c_{-n})."""
    if f.is_zero:
        return f
    return LaurentPolynomial(-f.high, np.conj(f.coeffs[::-1]))


def toeplitz_matrix(f: LaurentPolynomial, n: int) -> np.ndarray:
    """T_f truncated to N x N: entry (m, n) = f^(m - n)."""
    if n < 1:
        raise ValueError("N must be at least 1")
    idx = np.arange(n)
    return np.asarray(f.coef(idx[:, None] - idx[None, :]), dtype=complex)


def hardy_hankel_matrix(f: LaurentPolynomial, n: int, rows: int | None = None) -> np.ndarray:
    """Gamma_f truncated: entry (m, n) = f^(-(m + n + 1))."""
    if n < 1:
        raise ValueError("N must be at least 1")
    rows = n if rows is None else rows
    m = np.arange(rows)[:, None]
    k = np.arange(n)[None, :]
    return np.asarray(f.coef(-(m + k + 1)), dtype=complex)


def quadrature_nodes(f: LaurentPolynomial, g: LaurentPolynomial, n: int) -> int:
    """Smallest node count for which :func:`w_kernel_matrix` is exact."""
    return 2 * (f.degree + g.degree + n) + 3


def w_kernel_matrix(f: LaurentPolynomial, g: LaurentPolynomial, n: int,
                    nodes: int | None = None) -> np.ndarray:
    """R_+ W R_+ by uniform quadrature of the kernel on the torus.

    The second grid is offset by half a step so the removable singularity on
    the diagonal is never evaluated; the integrand is a trigonometric
    polynomial, so the rule is exact above the node threshold.
    """
    need = quadrature_nodes(f, g, n)
    nodes = need if nodes is None else nodes
    if nodes < need:
        raise ValueError(f"{nodes} nodes is below the exactness threshold {need}")
    # Nodes s_j = e^{2 pi i j/M} and t_l = e^{2 pi i (l + 1/2)/M}. Every
    # exponential is read from a table of e^{i pi r/M} at an integer-reduced
    # phase r, which keeps the rounding independent of the frequency.
    m2 = 2 * nodes
    table = np.exp(1j * math.pi * np.arange(m2) / nodes)
    j = np.arange(nodes)
    even = 2 * j  # phase index of s_j
    odd = 2 * j + 1  # phase index of t_l

    def evaluate(p: LaurentPolynomial, phase: np.ndarray) -> np.ndarray:
        if p.is_zero:
            return np.zeros(phase.shape, dtype=complex)
        powers = np.arange(p.low, p.high + 1)
        return table[np.outer(phase, powers) % m2] @ p.coeffs

    fs, gs = evaluate(f, even), evaluate(g, even)
    ft, gt = evaluate(f, odd), evaluate(g, odd)
    num = fs[:, None] * gt[None, :] - ft[None, :] * gs[:, None]
    den = 1.0 - table[(even[:, None] - odd[None, :]) % m2]
    w = num / den
    k = np.arange(n)
    left = np.conj(table[np.outer(k, even) % m2])  # e^{-i m theta_j}
    right = table[np.outer(odd, k) % m2]  # e^{i n phi_l}
    return (left @ w @ right) / (nodes * nodes)


def _product_block(g: LaurentPolynomial, f: LaurentPolynomial, n: int) -> np.ndarray:
    # (T_g T_f)[m, n] = sum_{k>=0} g^(m - k) f^(k - n); every nonzero term has
    # k < n + max degree + 1, so summing that far is the full infinite sum.
    kk = n + max(g.degree, f.degree) + 1
    m = np.arange(n)
    k = np.arange(kk)
    tg = np.asarray(g.coef(m[:, None] - k[None, :]), dtype=complex)
    tf = np.asarray(f.coef(k[:, None] - m[None, :]), dtype=complex)
    return tg @ tf


def toeplitz_identity_matrix(f: LaurentPolynomial, g: LaurentPolynomial, n: int) -> np.ndarray:
    """(T_{gf} - T_g T_f) - (T_{fg} - T_f T_g) with exact operator products."""
    gf = g * f
    fg = f * g
    return (toeplitz_matrix(gf, n) - _product_block(g, f, n)) - (
        toeplitz_matrix(fg, n) - _product_block(f, g, n)
    )


def _gram(f: LaurentPolynomial, n: int) -> np.ndarray:
    # Gamma_f^* Gamma_f; rows k of Gamma_f vanish once k + 1 > -low
    rows = max(-f.low, 0) if not f.is_zero else 0
    if rows == 0:
        return np.zeros((n, n), dtype=complex)
    h = hardy_hankel_matrix(f, n, rows=rows)
    return h.conj().T @ h


def hankel_product_matrix(f: LaurentPolynomial, g: LaurentPolynomial, n: int) -> np.ndarray:
    """Gamma_f^* Gamma_f - Gamma_g^* Gamma_g, truncated to N x N."""
    if n < 1:
        raise ValueError("N must be at least 1")
    return _gram(f, n) - _gram(g, n)


def rational_symbol(a: complex, degree: int) -> LaurentPolynomial:
    """Taylor truncation sum_{k=1}^{degree} a^(k-1) z^k of z / (1 - a z)."""
    if abs(a) >= 1:
        raise ValueError(f"|a| must be below 1, got {abs(a)}")
    c = np.zeros(degree + 1, dtype=complex)
    c[1:] = complex(a) ** np.arange(degree)
    return LaurentPolynomial(0, c)


def _default_degree(a: complex) -> int:
    if a == 0:
        return 1
    return max(1, math.ceil(math.log(1e-12) / math.log(abs(a))))


def finite_rank_check(a: complex, degree: int | None, n: int, tol: float = 1e-8) -> int:
    """Numerical rank of R_+ W R_+ for g = z / (1 - a z) (truncated) and f = conj(g)."""
    if abs(a) >= 1:
        raise ValueError(f"|a| must be below 1, got {abs(a)}")
    degree = _default_degree(a) if degree is None else degree
    if a != 0 and abs(a) ** degree > 1e-12:
        raise ValueError(f"truncation degree {degree} leaves |a|^D = {abs(a) ** degree:.2e} > 1e-12")
    g = rational_symbol(a, degree)
    return numerical_rank(hankel_product_matrix(conj_symbol(g), g, n), tol)


def random_trig_polynomial(degree: int, seed: int) -> LaurentPolynomial:
    """Coefficients n = -degree..degree, real then imaginary part, from
    :class:`~hsk.numerics.Lcg64` uniforms on [-1, 1)."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    rng = Lcg64(seed)
    u = rng.uniforms(2 * (2 * degree + 1))
    c = np.array(u[0::2]) + 1j * np.array(u[1::2])
    return LaurentPolynomial(-degree, c)


def max_pairwise_deviation(*mats: np.ndarray) -> float:
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            worst = max(worst, float(np.max(np.abs(mats[i] - mats[j]))))
    return worst
