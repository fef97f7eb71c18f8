"""Discrete kernels K(x, y) = (A(x)B(y) - A(y)B(x)) / (x - y) and their
factorization through a Hankel matrix, K = ±Γ².

Given a(x) = [A(x), B(x)] with a(x+1) = S_x a(x), the kernel satisfies
K(x+1, y+1) - K(x, y) = <C a(x), a(y)> where C = (S_y^T F S_x - F)/(x - y).
When C is a constant symmetric matrix of rank one with eigenpair
(lam, [alpha, beta]), K(x, y) = -sgn(lam) sum_k phi(x+k) phi(y+k) with
phi = |lam|^(1/2) (alpha A + beta B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bessel import bessel_row, bessel_tail_bound, bessel_weighted_tail_bound
from .hankel import (
    EPS,
    HankelSymbol,
    hankel_square_block,
    rounding_allowance,
    trace_formula,
)
from .numerics import eig2, kahan_sum

__all__ = [
    "F",
    "CoefficientSequence",
    "AffineRecurrence",
    "GeneralRecurrence",
    "ConditionReport",
    "FactorizationReport",
    "ConditionError",
    "kernel_entry",
    "check_affine_conditions",
    "check_general_conditions",
    "default_sample_pairs",
    "recurrence_defect",
    "extract_symbol",
    "lyapunov_residual",
    "difference_identity_residual",
    "verify_factorization",
    "kernel_matrix",
    "trace_check",
    "bessel_coefficients",
    "bessel_recurrence",
]

F = np.array([[0.0, -1.0], [1.0, 0.0]])
F.setflags(write=False)

CONSTANT_C_TOL = 1e-10


class ConditionError(ValueError):
    """Symbol extraction was attempted from a failed condition report."""


@dataclass(frozen=True)
class CoefficientSequence:
    """a(x) = [A(x), B(x)] for x = 0..x_max.

    ``tail`` bounds sum_{x>x_max} |a(x)|^2 and ``weighted_tail`` (optional)
    bounds sum_{x>x_max} (x+1) |a(x)|^2.
    """

    values: np.ndarray
    tail: float = 0.0
    weighted_tail: float | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"coefficients must have shape (n, 2), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.tail < 0:
            raise ValueError("tail bound must be non-negative")

    @property
    def x_max(self) -> int:
        return len(self.values) - 1

    @property
    def A(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def B(self) -> np.ndarray:
        return self.values[:, 1]

    def __len__(self) -> int:
        return len(self.values)

    def scaled(self, c: float) -> "CoefficientSequence":
        wt = None if self.weighted_tail is None else c * c * self.weighted_tail
        return CoefficientSequence(c * self.values, c * c * self.tail, wt)


@dataclass(frozen=True)
class AffineRecurrence:
    """a(x+1) = (L x + M) a(x)."""

    L: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", np.array(self.L, dtype=float).reshape(2, 2))
        object.__setattr__(self, "M", np.array(self.M, dtype=float).reshape(2, 2))

    def step(self, x: int) -> np.ndarray:
        return self.L * x + self.M

    def as_general(self) -> "GeneralRecurrence":
        return GeneralRecurrence(self.step)


@dataclass(frozen=True)
class GeneralRecurrence:
    """a(x+1) = S_x a(x) for an arbitrary rule x -> S_x."""

    rule: Callable[[int], np.ndarray]

    def step(self, x: int) -> np.ndarray:
        return np.asarray(self.rule(x), dtype=float).reshape(2, 2)


@dataclass
class ConditionReport:
    C: np.ndarray
    symmetry_defect: float
    lam: float
    lam2: float
    eigenvector: np.ndarray
    tol: float
    det_L: float | None = None
    det_M: float | None = None
    constancy_defect: float | None = None
    reasons: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.reasons

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def sign(self) -> int:
        """Sign in K = sign * Gamma^2, i.e. -sgn(lam)."""
        return -1 if self.lam > 0 else 1


def _judge(report: ConditionReport) -> ConditionReport:
    tol = report.tol
    r = report.reasons
    if report.det_L is not None and abs(report.det_L) > tol:
        r.append("det L ≠ 0")
    if report.det_M is not None and abs(report.det_M - 1.0) > tol:
        r.append("det M ≠ 1")
    if report.constancy_defect is not None:
        scale = max(1.0, float(np.max(np.abs(report.C))))
        if report.constancy_defect > CONSTANT_C_TOL * scale:
            r.append("C not constant")
    if report.symmetry_defect > tol:
        r.append("C not symmetric")
    if abs(report.lam) <= tol:
        r.append("λ=0")
    elif abs(report.lam2) > tol * max(1.0, abs(report.lam)):
        r.append("λ₂ ≠ 0")
    return report


def _eigen_part(c: np.ndarray):
    defect = abs(c[0, 1] - c[1, 0])
    sym = 0.5 * (c + c.T)
    lam1, lam2, v1, _ = eig2(sym)
    return defect, lam1, lam2, v1


def check_affine_conditions(rec: AffineRecurrence, tol: float = 1e-10) -> ConditionReport:
    """Check det L = 0, det M = 1 and that C = M^T F L is symmetric with
    eigenvalues (lam != 0, 0)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = rec.M.T @ F @ rec.L + 0.0
    defect, lam1, lam2, v1 = _eigen_part(c)
    report = ConditionReport(
        C=c, symmetry_defect=defect, lam=lam1, lam2=lam2, eigenvector=v1, tol=tol,
        det_L=float(np.linalg.det(rec.L)), det_M=float(np.linalg.det(rec.M)),
    )
    return _judge(report)


def default_sample_pairs(n: int = 8) -> list[tuple[int, int]]:
    return [(x, y) for x in range(n + 1) for y in range(n + 1) if x != y]


def _pair_c(rec: GeneralRecurrence, x: int, y: int) -> np.ndarray:
    return (rec.step(y).T @ F @ rec.step(x) - F) / (x - y) + 0.0


def check_general_conditions(rec: GeneralRecurrence,
                             pairs: Sequence[tuple[int, int]] | None = None,
                             tol: float = 1e-10) -> ConditionReport:
    """Check that (S_y^T F S_x - F)/(x - y) is the same symmetric rank-one
    matrix over all sample pairs."""
    if isinstance(rec, AffineRecurrence):
        rec = rec.as_general()
    pairs = default_sample_pairs() if pairs is None else list(pairs)
    if not pairs:
        raise ValueError("need at least one sample pair")
    if any(x == y for x, y in pairs):
        raise ValueError("sample pairs must have x != y")
    c = _pair_c(rec, *pairs[0])
    deviation = 0.0
    for x, y in pairs[1:]:
        deviation = max(deviation, float(np.max(np.abs(_pair_c(rec, x, y) - c))))
    defect, lam1, lam2, v1 = _eigen_part(c)
    report = ConditionReport(
        C=c, symmetry_defect=defect, lam=lam1, lam2=lam2, eigenvector=v1, tol=tol,
        constancy_defect=deviation,
    )
    return _judge(report)


def recurrence_defect(a: CoefficientSequence, rec) -> float:
    """max_x |a(x+1) - S_x a(x)| / max(1, |a(x+1)|) over the stored range."""
    worst = 0.0
    for x in range(a.x_max):
        pred = rec.step(x) @ a.values[x]
        err = float(np.max(np.abs(a.values[x + 1] - pred)))
        worst = max(worst, err / max(1.0, float(np.max(np.abs(a.values[x + 1])))))
    return worst


def kernel_entry(a: CoefficientSequence, x: int, y: int) -> float:
    """<F a(x), a(y)> / (x - y) for x != y."""
    if x == y:
        raise ValueError("kernel_entry is undefined on the diagonal; use kernel_matrix")
    n = len(a)
    if not (0 <= x < n and 0 <= y < n):
        raise IndexError(f"({x}, {y}) outside 0..{n - 1}")
    ax, ay = a.values[x], a.values[y]
    # swapping x and y negates numerator and denominator exactly, so the
    # result is bitwise symmetric
    return float((ax[0] * ay[1] - ay[0] * ax[1]) / (x - y))


def extract_symbol(report: ConditionReport, a: CoefficientSequence) -> tuple[HankelSymbol, int]:
    """phi(x) = |lam|^(1/2) (alpha A(x) + beta B(x)) and the sign -sgn(lam)."""
    if not report.passed:
        raise ConditionError("conditions failed: " + ", ".join(report.reasons))
    alpha, beta = report.eigenvector
    scale = math.sqrt(abs(report.lam))
    phi = scale * (alpha * a.A + beta * a.B)
    # |alpha A + beta B|^2 <= |a|^2 for a unit eigenvector
    tail = abs(report.lam) * a.tail
    wt = None if a.weighted_tail is None else abs(report.lam) * a.weighted_tail
    return HankelSymbol(phi, tail, wt), report.sign


def lyapunov_residual(Phi: Callable[[int, int], float], phi: Sequence[float], x: int, y: int) -> float:
    """Phi(x+1, y+1) - Phi(x, y) + phi(x) phi(y); zero exactly when the
    discrete Lyapunov equation holds at (x, y)."""
    if x < 0 or y < 0 or x >= len(phi) or y >= len(phi):
        raise IndexError(f"({x}, {y}) outside the symbol range")
    return Phi(x + 1, y + 1) - Phi(x, y) + phi[x] * phi[y]


def difference_identity_residual(a: CoefficientSequence, rec, x: int, y: int) -> float:
    """K(x+1, y+1) - K(x, y) - <C a(x), a(y)>.

    C is M^T F L for an affine recurrence, and (S_y^T F S_x - F)/(x - y) at
    this pair for a general one.
    """
    if x == y:
        raise ValueError("x must differ from y")
    if isinstance(rec, AffineRecurrence):
        c = rec.M.T @ F @ rec.L
    else:
        c = _pair_c(rec, x, y)
    lhs = kernel_entry(a, x + 1, y + 1) - kernel_entry(a, x, y)
    return float(lhs - a.values[y] @ (c @ a.values[x]))


@dataclass
class FactorizationReport:
    """Off-diagonal comparison of K with sign * sum_{k<K} phi(x+k) phi(y+k).

    ``errors`` holds |K - sign * partial sum| (zero on the diagonal), ``tail``
    the Cauchy-Schwarz bound on the omitted terms, ``rounding`` the
    floating-point allowance.
    """

    size: int
    k_tail: int
    errors: np.ndarray
    tail: np.ndarray
    rounding: np.ndarray

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))

    @property
    def argmax(self) -> tuple[int, int]:
        i = int(np.argmax(self.errors))
        return divmod(i, self.size)

    @property
    def max_tail_bound(self) -> float:
        return float(np.max(self.tail))

    @property
    def max_rounding(self) -> float:
        return float(np.max(self.rounding))

    @property
    def certified_bound(self) -> float:
        return float(np.max(self.tail + self.rounding))

    def within(self, tail_factor: float = 1.0) -> bool:
        """Per-cell check errors <= tail_factor * tail + rounding."""
        return bool(np.all(self.errors <= tail_factor * self.tail + self.rounding))


def _offdiag_kernel(a: CoefficientSequence, n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.zeros((n, n))
    mag = np.zeros((n, n))
    for x in range(n):
        for y in range(x + 1, n):
            k[x, y] = k[y, x] = kernel_entry(a, x, y)
            ax, ay = a.values[x], a.values[y]
            mag[x, y] = mag[y, x] = (abs(ax[0] * ay[1]) + abs(ay[0] * ax[1])) / (y - x)
    return k, mag


def _require_tail(phi: HankelSymbol, k_tail: int) -> None:
    if k_tail < 1 or phi.tail_from(k_tail) > 1e-14:
        raise ValueError(
            f"k_tail={k_tail} leaves a symbol tail of {phi.tail_from(max(k_tail, 0)):.3e} > 1e-14"
        )


def verify_factorization(a: CoefficientSequence, phi: HankelSymbol, sign: int,
                         n: int, k_tail: int) -> FactorizationReport:
    """Compare K(x, y) with sign * sum_{k<k_tail} phi(x+k) phi(y+k) for all
    0 <= x != y < n."""
    _require_tail(phi, k_tail)
    if n > len(a):
        raise ValueError(f"size {n} exceeds the {len(a)} stored coefficients")
    values, bound = hankel_square_block(phi, n, k_tail)
    k, mag = _offdiag_kernel(a, n)
    tail = np.sqrt(np.array([[phi.tail_from(x + k_tail) * phi.tail_from(y + k_tail)
                              for y in range(n)] for x in range(n)]))
    rounding = (bound - tail) + rounding_allowance(1.0) * mag
    errors = np.abs(k - sign * values)
    off = ~np.eye(n, dtype=bool)
    return FactorizationReport(
        size=n, k_tail=k_tail, errors=np.where(off, errors, 0.0),
        tail=np.where(off, tail, 0.0), rounding=np.where(off, rounding, 0.0),
    )


def kernel_matrix(a: CoefficientSequence, phi: HankelSymbol, sign: int,
                  n: int, k_tail: int) -> np.ndarray:
    """N x N matrix of K with the diagonal filled in by sign * sum phi(x+k)^2."""
    _require_tail(phi, k_tail)
    if n > len(a):
        raise ValueError(f"size {n} exceeds the {len(a)} stored coefficients")
    if n - 1 + k_tail - 1 > phi.n_max:
        raise ValueError(f"symbol too short for n={n}, k_tail={k_tail}")
    k, _ = _offdiag_kernel(a, n)
    for x in range(n):
        seg = phi.phi[x : x + k_tail]
        k[x, x] = sign * kahan_sum(seg * seg)
    return k


def trace_check(a: CoefficientSequence, phi: HankelSymbol, sign: int,
                n: int, k_tail: int) -> tuple[float, float, float]:
    """Compare sum_{x<n} K(x, x) with sign * sum_{x<n+k_tail} (x+1) phi(x)^2.

    Returns ``(diagonal_sum, formula_value, bound)`` where ``bound`` covers
    both truncations plus rounding: the diagonal misses
    sum_{x<n} T(x + k_tail) <= n T(k_tail) inside the block and at most
    sum_{m>=n} (m+1) phi(m)^2 from rows x >= n.
    """
    kmat = kernel_matrix(a, phi, sign, n, k_tail)
    diag_sum = kahan_sum(np.diag(kmat))
    value, formula_rem = trace_formula(phi, n + k_tail)
    diag_rem = (n * phi.tail_from(k_tail) + phi.weighted_tail_from(n)
                + rounding_allowance(abs(diag_sum), n * k_tail))
    return diag_sum, sign * value, diag_rem + formula_rem


def bessel_coefficients(theta: float, x_max: int) -> CoefficientSequence:
    """a(x) = [sqrt(theta) J_x, J_{x+1}] at argument 2 sqrt(theta)."""
    table = bessel_row(theta, x_max + 1)
    j = table.values
    st = math.sqrt(theta)
    vals = np.column_stack([st * j[:-1], j[1:]])
    # theta J_x^2 + J_{x+1}^2 summed over x > x_max
    tail = (theta + 1.0) * bessel_tail_bound(theta, x_max)
    wtail = (theta + 1.0) * bessel_weighted_tail_bound(theta, x_max)
    return CoefficientSequence(vals, tail * (1 + 4 * EPS), wtail * (1 + 4 * EPS))


def bessel_recurrence(theta: float) -> AffineRecurrence:
    """(L, M) with a(x+1) = (L x + M) a(x) for the Bessel coefficients."""
    st = math.sqrt(theta)
    L = [[0.0, 0.0], [0.0, 1.0 / st]]
    M = [[0.0, st], [-1.0 / st, 1.0 / st]]
    return AffineRecurrence(L, M)
