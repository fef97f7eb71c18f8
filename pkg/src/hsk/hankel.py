"""Hankel matrices [phi(m+n)] built from real symbols, their squares, the
trace formula trace(Gamma^2) = sum (x+1) phi(x)^2, and spectral
multiplicity accounting for finite truncations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import kahan_sum, kahan_sum_axis0, operator_norm, sym_eigen

__all__ = [
    "HankelSymbol",
    "SpectralReport",
    "Cluster",
    "MultiplicityRow",
    "hankel_matrix",
    "hankel_square_entry",
    "trace_formula",
    "spectral_report",
    "hilbert_symbol",
    "cluster_eigenvalues",
    "rounding_allowance",
]

EPS = np.finfo(float).eps


def rounding_allowance(abs_total: float, n_terms: int = 1) -> float:
    """Floating-point allowance for a compensated sum of products.

    Each product carries one rounding, the compensated sum about two more,
    plus ``n_terms * eps^2`` growth. The factor 4 covers input rounding of the
    factors themselves.
    """
    return (4.0 + n_terms * EPS) * EPS * abs_total


@dataclass(frozen=True)
class HankelSymbol:
    """Real symbol phi(0..n_max) with certified tail bounds.

    ``tail`` bounds sum_{n>n_max} phi(n)^2; ``weighted_tail``, when known,
    bounds sum_{n>n_max} (n+1) phi(n)^2.
    """

    phi: np.ndarray
    tail: float = 0.0
    weighted_tail: float | None = None

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        if self.tail < 0:
            raise ValueError("tail bound must be non-negative")
        if self.weighted_tail is not None and self.weighted_tail < 0:
            raise ValueError("weighted tail bound must be non-negative")

    @property
    def n_max(self) -> int:
        return len(self.phi) - 1

    def __len__(self) -> int:
        return len(self.phi)

    def tail_from(self, n: int) -> float:
        """Upper bound on sum_{m>=n} phi(m)^2."""
        stored = self.phi[n:] if n <= self.n_max else self.phi[:0]
        s = kahan_sum(stored * stored)
        return s + rounding_allowance(s, len(stored)) + self.tail

    def weighted_tail_from(self, n: int) -> float:
        """Upper bound on sum_{m>=n} (m+1) phi(m)^2 (needs ``weighted_tail``)."""
        if self.weighted_tail is None:
            raise ValueError("symbol carries no weighted tail bound")
        m = np.arange(n, len(self.phi), dtype=float)
        stored = self.phi[n:] if n <= self.n_max else self.phi[:0]
        s = kahan_sum((m + 1.0) * stored * stored)
        return s + rounding_allowance(s, len(stored)) + self.weighted_tail

    def scaled(self, c: float) -> "HankelSymbol":
        wt = None if self.weighted_tail is None else c * c * self.weighted_tail
        return HankelSymbol(c * self.phi, c * c * self.tail, wt)


def hankel_matrix(phi: HankelSymbol, n: int) -> np.ndarray:
    """N x N matrix with entry (m, n) = phi(m + n)."""
    if n < 1:
        raise ValueError("size must be at least 1")
    if phi.n_max < 2 * n - 2:
        raise ValueError(
            f"symbol of length {len(phi)} too short for a {n}x{n} Hankel matrix"
        )
    idx = np.arange(n)
    return phi.phi[idx[:, None] + idx[None, :]].copy()


def hankel_square_entry(phi: HankelSymbol, x: int, y: int, k_tail: int) -> tuple[float, float]:
    """Partial sum sum_{k<k_tail} phi(x+k) phi(y+k) and a bound on the rest.

    The bound is the Cauchy-Schwarz estimate sqrt(T(x+K) T(y+K)) with T the
    certified tail of phi, plus a rounding allowance for the partial sum.
    """
    if max(x, y) + k_tail - 1 > phi.n_max:
        raise ValueError(
            f"symbol of length {len(phi)} too short for x={x}, y={y}, k_tail={k_tail}"
        )
    prods = phi.phi[x : x + k_tail] * phi.phi[y : y + k_tail]
    value = kahan_sum(prods)
    tail = math.sqrt(phi.tail_from(x + k_tail) * phi.tail_from(y + k_tail))
    return value, tail + rounding_allowance(float(np.sum(np.abs(prods))), k_tail)


def hankel_square_block(phi: HankelSymbol, n: int, k_tail: int) -> tuple[np.ndarray, np.ndarray]:
    """All entries of :func:`hankel_square_entry` for 0 <= x, y < n at once."""
    if n - 1 + k_tail - 1 > phi.n_max:
        raise ValueError(f"symbol of length {len(phi)} too short for n={n}, k_tail={k_tail}")
    idx = np.arange(n)
    # rows of the stack run over k, so the compensated sum is in ascending k
    cols = np.stack([phi.phi[idx + k] for k in range(k_tail)])
    prods = cols[:, :, None] * cols[:, None, :]
    values = kahan_sum_axis0(prods)
    tails = np.array([phi.tail_from(x + k_tail) for x in range(n)])
    bound = np.sqrt(tails[:, None] * tails[None, :])
    bound = bound + rounding_allowance(1.0, k_tail) * np.sum(np.abs(prods), axis=0)
    return values, bound


def trace_formula(phi: HankelSymbol, n_terms: int) -> tuple[float, float]:
    """sum_{x<n_terms} (x+1) phi(x)^2 and a certified bound on the remainder."""
    if phi.weighted_tail is None:
        raise ValueError("trace formula needs a weighted tail bound sum (n+1) phi(n)^2")
    if n_terms < 0:
        raise ValueError("n_terms must be non-negative")
    w = np.arange(1, len(phi) + 1, dtype=float) * phi.phi * phi.phi
    head = w[:n_terms]
    value = kahan_sum(head)
    rest = kahan_sum(w[n_terms:])
    remainder = rest + rounding_allowance(rest, len(w)) + phi.weighted_tail
    return value, remainder + rounding_allowance(value, n_terms)


@dataclass(frozen=True)
class Cluster:
    center: float
    lo: float
    hi: float
    count: int


@dataclass(frozen=True)
class MultiplicityRow:
    """Accounting for one eigenvalue cluster s^2 of the squared truncation."""

    square: float
    nu_square: int
    nu_plus: int
    nu_minus: int

    @property
    def consistent(self) -> bool:
        return self.nu_square == self.nu_plus + self.nu_minus

    @property
    def mpt_flag(self) -> bool:
        return abs(self.nu_plus - self.nu_minus) > 1


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    square_eigenvalues: np.ndarray
    clusters: list[Cluster]
    square_clusters: list[Cluster]
    rows: list[MultiplicityRow]
    norm: float
    mapping_residual: float
    kernel_dimension: int
    threshold: float
    status: str = "ok"
    warnings: list[str] = field(default_factory=list)

    @property
    def mpt_flags(self) -> list[MultiplicityRow]:
        return [r for r in self.rows if r.mpt_flag]


def cluster_eigenvalues(w: np.ndarray, tol: float) -> tuple[list[Cluster], bool]:
    """Group sorted eigenvalues whose neighbours are within ``tol``.

    Returns the clusters and whether chaining made any cluster wider than
    ``tol`` (i.e. the tolerance is not resolving the spectral gaps).
    """
    w = np.sort(np.asarray(w, dtype=float))
    clusters = []
    degenerate = False
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            part = w[start:i]
            clusters.append(Cluster(kahan_sum(part) / len(part), part[0], part[-1], len(part)))
            if part[-1] - part[0] > tol:
                degenerate = True
            start = i
    return clusters, degenerate


def spectral_report(phi: HankelSymbol, n: int, cluster_tol: float = 1e-8,
                    threshold: float = 1e-8) -> SpectralReport:
    """Eigenvalues of the N x N truncation and of its square, with
    multiplicities nu(s) + nu(-s) compared against nu(s^2)."""
    if n < 2:
        raise ValueError("spectral report needs N >= 2")
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")
    gamma = hankel_matrix(phi, n)
    w = sym_eigen(gamma)[0]
    sq = gamma @ gamma
    sq = 0.5 * (sq + sq.T)
    w2 = sym_eigen(sq)[0]
    norm = float(max(abs(w[0]), abs(w[-1])))
    tol1 = cluster_tol * max(1.0, norm)
    tol2 = cluster_tol * max(1.0, norm * norm)
    clusters, deg1 = cluster_eigenvalues(w, tol1)
    sq_clusters, deg2 = cluster_eigenvalues(w2, tol2)

    mapping = float(np.max(np.abs(np.sort(w2) - np.sort(w * w))))

    rows = []
    for cl in sq_clusters:
        if cl.center <= threshold:
            continue
        lo, hi = cl.lo - tol2, cl.hi + tol2
        hits = w[(w * w >= lo) & (w * w <= hi)]
        rows.append(MultiplicityRow(
            square=cl.center,
            nu_square=cl.count,
            nu_plus=int(np.count_nonzero(hits > 0)),
            nu_minus=int(np.count_nonzero(hits < 0)),
        ))
    rows.reverse()

    kernel_dim = int(np.count_nonzero(np.abs(w) <= tol1))
    report = SpectralReport(
        eigenvalues=w, square_eigenvalues=w2, clusters=clusters,
        square_clusters=sq_clusters, rows=rows, norm=norm,
        mapping_residual=mapping, kernel_dimension=kernel_dim, threshold=threshold,
    )
    if deg1 or deg2:
        report.status = "degenerate-clustering"
        report.warnings.append("cluster_tol does not resolve the spectral gaps")
    if kernel_dim:
        report.warnings.append(
            f"kernel dimension {kernel_dim} of the truncation is a truncation artifact"
        )
    for r in rows:
        if r.mpt_flag:
            report.warnings.append(
                f"|nu(s) - nu(-s)| = {abs(r.nu_plus - r.nu_minus)} > 1 at s^2 = {r.square:.6g}"
            )
    return report


def hilbert_symbol(n_max: int) -> HankelSymbol:
    """phi(k) = 1/(k+1), whose Hankel matrices are the Hilbert matrices.

    The tail sum_{k>n_max} (k+1)^-2 is at most 1/(n_max+1); the weighted sum
    diverges, so no weighted bound is attached.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    k = np.arange(n_max + 1, dtype=float)
    return HankelSymbol(1.0 / (k + 1.0), tail=1.0 / (n_max + 1), weighted_tail=None)


def hankel_norm(phi: HankelSymbol, n: int) -> float:
    return operator_norm(hankel_matrix(phi, n))
