"""Dense matrix kernel: Jacobi eigensolver, 2x2 eigenpairs, norms, rank and
compensated summation.

Matrices are plain numpy arrays. All routines are pure functions of their
inputs and reduce in a fixed order, so results are bit-reproducible for a
given input.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

__all__ = [
    "EigenError",
    "symmetry_defect",
    "sym_eigen",
    "herm_eigvals",
    "eig2",
    "singular_values",
    "numerical_rank",
    "operator_norm",
    "kahan_sum",
    "kahan_sum_axis0",
    "Lcg64",
]

JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class EigenError(ValueError):
    """Raised for inputs outside an eigensolver's contract."""


def symmetry_defect(a: np.ndarray) -> float:
    """Largest entrywise |a[m, n] - conj(a[n, m])|."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Circle-method tournament: each round pairs every index exactly once, and
    # n - 1 rounds cover every (p, q) pair, i.e. one cyclic sweep.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _normalize_signs(v: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs + 0.0  # + 0.0 clears negative zeros


def _pair_rotations(app, aqq, apq) -> np.ndarray:
    # Rotation [[c, -s], [s, c]] per pair annihilating the (p, q) entry.
    active = apq != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(active, (aqq - app) / (2.0 * apq), 0.0)
    t = np.where(
        active, np.sign(tau + (tau == 0)) / (np.abs(tau) + np.hypot(1.0, tau)), 0.0
    )
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    rot = np.empty((c.size, 2, 2))
    rot[:, 0, 0] = c
    rot[:, 0, 1] = -s
    rot[:, 1, 0] = s
    rot[:, 1, 1] = c
    return rot


def _rotate_pairs(a: np.ndarray, rot: np.ndarray) -> np.ndarray:
    # rows (2i, 2i+1) <- rot[i] @ rows (2i, 2i+1); an odd last row is untouched
    k2 = 2 * rot.shape[0]
    out = a.copy() if k2 < a.shape[0] else None
    rotated = np.matmul(rot, a[:k2].reshape(rot.shape[0], 2, a.shape[1]))
    if out is None:
        return rotated.reshape(a.shape)
    out[:k2] = rotated.reshape(k2, a.shape[1])
    return out


def sym_eigen(a, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi.

    Each sweep visits every off-diagonal pair once, grouped into rounds of
    disjoint rotations that are applied together. Sweeping stops once the
    off-diagonal Frobenius norm is at most ``1e-13 * ||a||_F``.

    Returns ``(w, v)`` with eigenvalues ``w`` in descending order and
    orthonormal eigenvectors in the columns of ``v``; each column has its
    largest-magnitude entry positive (lowest index wins ties).
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EigenError(f"sym_eigen needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    fro = float(np.linalg.norm(a))
    if symmetry_defect(a) > tol * fro:
        raise EigenError(
            f"symmetry defect {symmetry_defect(a):.3e} exceeds {tol:.1e}*||A||_F"
        )
    a = 0.5 * (a + a.T)
    vt = np.eye(n)
    if fro == 0.0 or n == 1:
        return np.diag(a).copy(), vt

    # Working copies are kept in "pair order": the rows of the current round's
    # pairs are adjacent, so all rotations of a round are one batched matmul.
    layouts = []
    for p, q in _round_robin(n):
        rest = np.setdiff1d(np.arange(n), np.concatenate([p, q]))
        layouts.append(np.concatenate([np.column_stack([p, q]).ravel(), rest]))
    target = JACOBI_OFF_TOL * fro
    offdiag = ~np.eye(n, dtype=bool)
    where = np.arange(n)  # where[i] = current row holding original index i
    for _ in range(JACOBI_MAX_SWEEPS):
        if float(np.linalg.norm(a[offdiag])) <= target:
            break
        for layout in layouts:
            g = where[layout]
            i0, i1 = g[0 : 2 * (n // 2) : 2], g[1 : 2 * (n // 2) : 2]
            rot = _pair_rotations(a[i0, i0], a[i1, i1], a[i0, i1])
            # R P A P^T R^T via row gather, rotate, transposed gather, rotate
            a = _rotate_pairs(a.take(g, axis=0), rot)
            a = _rotate_pairs(a.T.take(g, axis=0), rot)
            k = 2 * rot.shape[0]
            a[np.arange(0, k, 2), np.arange(1, k, 2)] = 0.0
            a[np.arange(1, k, 2), np.arange(0, k, 2)] = 0.0
            vt = _rotate_pairs(vt.take(g, axis=0), rot)
            where = np.empty(n, dtype=np.intp)
            where[layout] = np.arange(n)
    else:
        raise EigenError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], _normalize_signs(vt.T[:, order])


def _real_embedding(h: np.ndarray) -> np.ndarray:
    # [[Re, -Im], [Im, Re]] is real symmetric for Hermitian h and carries
    # every eigenvalue of h twice.
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def herm_eigvals(h, tol: float = 1e-12) -> np.ndarray:
    """Eigenvalues (descending) of a real symmetric or complex Hermitian matrix."""
    h = np.asarray(h)
    if not np.iscomplexobj(h) or not np.any(h.imag):
        return sym_eigen(np.real(h), tol)[0]
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise EigenError(f"herm_eigvals needs a square matrix, got shape {h.shape}")
    if symmetry_defect(h) > tol * float(np.linalg.norm(h)):
        raise EigenError("matrix is not Hermitian within tolerance")
    w = sym_eigen(_real_embedding(0.5 * (h + h.conj().T)), tol)[0]
    # Each eigenvalue appears twice in the embedding; the Jacobi output is
    # sorted, so the pairs are adjacent.
    return w[::2].copy()


def eig2(c) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Closed-form eigenpairs of a symmetric 2x2 matrix.

    Returns ``(lam1, lam2, v1, v2)`` with ``|lam1| >= |lam2|`` and unit
    eigenvectors, sign-normalized like :func:`sym_eigen`.
    """
    c = np.asarray(c, dtype=float)
    a, b, b2, d = c[0, 0], c[0, 1], c[1, 0], c[1, 1]
    scale = max(abs(a), abs(b), abs(b2), abs(d))
    if abs(b - b2) > 1e-12 * scale:
        raise EigenError(f"eig2: symmetry defect {abs(b - b2):.3e}")
    b = 0.5 * (b + b2)
    if scale == 0.0:
        return 0.0, 0.0, np.array([1.0, 0.0]), np.array([0.0, 1.0])
    mean = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), b)
    lam1 = mean + rad if mean >= 0.0 else mean - rad
    det = a * d - b * b
    lam2 = det / lam1 if lam1 != 0.0 else 0.0

    def vec(lam: float) -> np.ndarray:
        u1 = np.array([b, lam - a])
        u2 = np.array([lam - d, b])
        u = u1 if np.hypot(*u1) >= np.hypot(*u2) else u2
        nrm = math.hypot(u[0], u[1])
        if nrm == 0.0:
            # only reachable when c is a multiple of the identity
            u, nrm = np.array([1.0, 0.0]), 1.0
        return _normalize_signs((u / nrm)[:, None])[:, 0]

    v1 = vec(lam1)
    v2 = np.array([-v1[1], v1[0]])
    v2 = _normalize_signs(v2[:, None])[:, 0]
    return float(lam1), float(lam2), v1, v2


def singular_values(a) -> np.ndarray:
    """Singular values (descending) via the symmetric eigenproblem of
    ``[[0, A], [A*, 0]]``, whose eigenvalues are +/- the singular values."""
    a = np.asarray(a)
    if a.size == 0:
        raise EigenError("singular_values of an empty matrix")
    r, c = a.shape
    jw = np.zeros((r + c, r + c), dtype=a.dtype if np.iscomplexobj(a) else float)
    jw[:r, r:] = a
    jw[r:, :r] = a.conj().T
    w = herm_eigvals(jw)
    k = min(r, c)
    return np.maximum(w[:k], 0.0)


def numerical_rank(a, tol: float) -> int:
    """Number of singular values above ``tol * sigma_max``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    sv = singular_values(a)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def operator_norm(a) -> float:
    """Spectral norm (largest singular value).

    Symmetric/Hermitian input goes through its own eigenvalues, anything else
    through the largest eigenvalue of ``A* A``.
    """
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.shape[0] == a.shape[1] and symmetry_defect(a) <= 1e-14 * float(np.max(np.abs(a))):
        w = herm_eigvals(0.5 * (a + a.conj().T))
        return float(max(abs(w[0]), abs(w[-1])))
    g = a.conj().T @ a
    return math.sqrt(max(float(herm_eigvals(0.5 * (g + g.conj().T))[0]), 0.0))


def kahan_sum(values: Iterable[float]) -> float:
    """Compensated left-to-right sum (Neumaier's variant of Kahan)."""
    total = 0.0
    comp = 0.0
    for x in values:
        x = float(x)
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp


def kahan_sum_axis0(values: np.ndarray) -> np.ndarray:
    """Elementwise compensated sum over the leading axis, ascending index."""
    values = np.asarray(values, dtype=float)
    total = np.zeros(values.shape[1:])
    comp = np.zeros(values.shape[1:])
    for x in values:
        t = total + x
        big = np.abs(total) >= np.abs(x)
        comp += np.where(big, (total - t) + x, (x - t) + total)
        total = t
    return total + comp


class Lcg64:
    """64-bit linear congruential generator.

    ``state <- 6364136223846793005 * state + 1442695040888963407 (mod 2**64)``;
    the state is advanced before each draw, and the high 53 bits map to
    ``[-1, 1)``.
    """

    MULT = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self.MASK

    def next_u64(self) -> int:
        self.state = (self.MULT * self.state + self.INC) & self.MASK
        return self.state

    def uniform(self) -> float:
        return 2.0 * ((self.next_u64() >> 11) / float(1 << 53)) - 1.0

    def uniforms(self, n: int) -> list[float]:
        return [self.uniform() for _ in range(n)]

