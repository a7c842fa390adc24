"""Symmetric eigendecomposition and graph Fourier transforms.

Spectra are indexed by eigen-index ``k``, never keyed by eigenvalue: with
repeated eigenvalues an eigenvalue-keyed spectrum is multi-valued, while an
index into a fixed, deterministic basis is always well defined.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NonSquareInputError,
    NotSymmetricError,
)

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 100
# "auto" switches from Jacobi to LAPACK above this size.
JACOBI_MAX_N = 256
_CLUSTER_RTOL = 1e-9
# Entries below this are solver noise (about 1e-12 in large degenerate blocks)
# and must not decide an eigenvector's sign.
_SIGN_EPS = 1e-9
_RITZ_SEED = 0x5EED


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues and orthonormal eigenvectors (column ``k`` is ``u_k``)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class Spectrum:
    coefficients: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class Spectrum2D:
    """Twin-GFT coefficients; entry ``(k1, k2)`` pairs factor eigen-indices."""

    coefficients: np.ndarray
    eigenvalues1: np.ndarray
    eigenvalues2: np.ndarray


def _round_robin_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint index pairs covering every (p, q) once per sweep (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for a in range(m // 2):
            p, q = players[a], players[m - 1 - a]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def jacobi_eigh(m: np.ndarray, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a symmetric matrix.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the ``n // 2`` rotations of a round touch disjoint rows and can be
    applied together. Stops once the off-diagonal Frobenius norm drops to
    ``tol * ||m||_F``.

    Returns:
        (eigenvalues, eigenvectors), unsorted.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    target = tol * np.linalg.norm(a)
    rounds = _round_robin_rounds(n)

    def off_norm() -> float:
        # Direct norm; ||A||² - ||diag||² cancels catastrophically near convergence.
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    for _ in range(max_sweeps):
        if off_norm() <= target:
            return a.diagonal().copy(), v
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                # Huge |theta| means a negligible rotation; t -> 1/(2 theta).
                t = np.where(
                    np.abs(theta) > 1e150,
                    0.5 / theta,
                    np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)),
                )
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * c - aq * s
            a[:, q] = ap * s + aq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    if off_norm() <= target:
        return a.diagonal().copy(), v
    raise NoConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        nz = np.flatnonzero(np.abs(out[:, k]) > _SIGN_EPS)
        if nz.size and out[nz[0], k] < 0:
            out[:, k] = -out[:, k]
    return out


def _canonical_cluster_basis(block: np.ndarray) -> np.ndarray:
    """Basis of span(block) that does not depend on which basis was given.

    Compresses a fixed diagonal ``D`` onto the eigenspace: for any other basis
    ``block @ Q`` the compression becomes ``Qᵀ (blockᵀ D block) Q``, so
    ``block @ eigvecs(blockᵀ D block)`` is basis-independent. ``D`` has
    pseudo-random entries, which keeps its Ritz values distinct even on
    highly symmetric graphs.
    """
    weights = np.random.default_rng(_RITZ_SEED).random(block.shape[0])
    ritz = block.T @ (weights[:, None] * block)
    _, w = np.linalg.eigh(0.5 * (ritz + ritz.T))
    basis = _fix_signs(block @ w)
    # Descending lexicographic order on the rounded entries.
    order = np.lexsort(-np.round(basis, 9)[::-1])
    return basis[:, order]


def canonicalize(values: np.ndarray, vectors: np.ndarray) -> Eigensystem:
    """Sort ascending, make repeated-eigenvalue blocks canonical, fix signs.

    Eigenvalues closer than ``1e-9 * max(1, max|λ|)`` are treated as one
    eigenspace; its basis is rebuilt from the eigenspace projector and its
    vectors ordered lexicographically (descending) by their entries rounded
    to 1e-9.
    """
    order = np.argsort(values, kind="stable")
    values = np.asarray(values, dtype=float)[order]
    vectors = np.asarray(vectors, dtype=float)[:, order]
    n = values.shape[0]
    gap = _CLUSTER_RTOL * max(1.0, float(np.max(np.abs(values))) if n else 1.0)
    out = np.empty_like(vectors)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] <= gap:
            stop += 1
        if stop - start == 1:
            out[:, start:stop] = _fix_signs(vectors[:, start:stop])
        else:
            out[:, start:stop] = _canonical_cluster_basis(vectors[:, start:stop])
        start = stop
    return Eigensystem(values, out)


def eigendecompose_symmetric(
    m: np.ndarray, tol: float = DEFAULT_TOL, method: str = "auto"
) -> Eigensystem:
    """Eigendecomposition of a symmetric matrix in canonical form.

    Args:
        m: square matrix, symmetric to within ``tol * max(1, max|m|)``.
        tol: symmetry tolerance and Jacobi stopping threshold.
        method: ``"jacobi"``, ``"lapack"``, or ``"auto"`` (Jacobi up to
            ``JACOBI_MAX_N`` rows, LAPACK beyond).

    Raises:
        NotSymmetricError, NonSquareInputError, NoConvergenceError
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise NonSquareInputError(f"expected a non-empty square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > tol * scale:
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    sym = 0.5 * (m + m.T)
    if method == "auto":
        method = "jacobi" if sym.shape[0] <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        values, vectors = jacobi_eigh(sym, tol)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(sym)
    else:
        raise ValueError(f"unknown method {method!r}")
    return canonicalize(values, vectors)


def _check_len(n: int, eig: Eigensystem, what: str) -> None:
    if n != eig.n:
        raise DimensionMismatchError(f"{what} has length {n}, eigensystem has dimension {eig.n}")


def gft(f: np.ndarray, eig: Eigensystem) -> Spectrum:
    """Forward GFT: coefficient ``k`` is ``<f, u_k>``."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 1:
        raise DimensionMismatchError(f"signal must be 1-D, got shape {f.shape}")
    _check_len(f.shape[0], eig, "signal")
    return Spectrum(eig.eigenvectors.T @ f, eig.eigenvalues.copy())


def igft(s: Spectrum | np.ndarray, eig: Eigensystem) -> np.ndarray:
    coeffs = np.asarray(s.coefficients if isinstance(s, Spectrum) else s, dtype=float)
    if coeffs.ndim != 1:
        raise DimensionMismatchError(f"spectrum must be 1-D, got shape {coeffs.shape}")
    _check_len(coeffs.shape[0], eig, "spectrum")
    return eig.eigenvectors @ coeffs


def twin_gft(f: np.ndarray, eig1: Eigensystem, eig2: Eigensystem) -> Spectrum2D:
    """Twin GFT of an ``n1 × n2`` signal on ``G1 □ G2``: ``U1ᵀ F U2``.

    Two dense products, ``O(n1² n2 + n1 n2²)``, instead of the
    ``O(n1² n2²)`` full product-graph transform.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (eig1.n, eig2.n):
        raise DimensionMismatchError(f"signal shape {f.shape} != ({eig1.n}, {eig2.n})")
    coeffs = eig1.eigenvectors.T @ f @ eig2.eigenvectors
    return Spectrum2D(coeffs, eig1.eigenvalues.copy(), eig2.eigenvalues.copy())


def itwin_gft(s: Spectrum2D | np.ndarray, eig1: Eigensystem, eig2: Eigensystem) -> np.ndarray:
    coeffs = np.asarray(s.coefficients if isinstance(s, Spectrum2D) else s, dtype=float)
    if coeffs.shape != (eig1.n, eig2.n):
        raise DimensionMismatchError(f"spectrum shape {coeffs.shape} != ({eig1.n}, {eig2.n})")
    return eig1.eigenvectors @ coeffs @ eig2.eigenvectors.T


def product_eigensystem(eig1: Eigensystem, eig2: Eigensystem) -> Eigensystem:
    """Eigensystem of ``L1 ⊕ L2`` assembled from the factors.

    Pair ``(k1, k2)`` contributes eigenvalue ``λ1[k1] + λ2[k2]`` with
    eigenvector ``u1[:, k1] ⊗ u2[:, k2]``. Pairs are sorted by that sum,
    ties broken by ``(k1, k2)``. The factor basis is kept as-is, so
    :func:`product_pairs` gives the pair behind each product index.
    """
    sums = (eig1.eigenvalues[:, None] + eig2.eigenvalues[None, :]).ravel()
    k1, k2 = product_pairs(eig1, eig2)
    vectors = np.einsum("ik,jk->ijk", eig1.eigenvectors[:, k1], eig2.eigenvectors[:, k2])
    order = _product_order(eig1, eig2)
    return Eigensystem(sums[order], vectors.reshape(eig1.n * eig2.n, -1))


def _product_order(eig1: Eigensystem, eig2: Eigensystem) -> np.ndarray:
    sums = (eig1.eigenvalues[:, None] + eig2.eigenvalues[None, :]).ravel()
    # Flat index already encodes (k1, k2) lexicographically; stable sort keeps it.
    return np.argsort(sums, kind="stable")


def product_pairs(eig1: Eigensystem, eig2: Eigensystem) -> tuple[np.ndarray, np.ndarray]:
    """Factor indices ``(k1, k2)`` of each product eigen-index, in sorted order."""
    order = _product_order(eig1, eig2)
    return np.divmod(order, eig2.n)
