"""Chapter (or word) dissimilarities and 2-D embeddings: classical MDS and SMACOF."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import EmptyDocument, NonConvergence
from .stats import TermDocMatrix

logger = logging.getLogger(__name__)

METRICS = ("cosine", "euclidean")
WEIGHTINGS = ("tfidf", "count", "relative")
NEGATIVE_MASS_WARN = 1e-10


def _kernel_set(backend):
    return _kernels.BACKENDS[backend or _kernels.BACKEND]


@dataclass(frozen=True)
class DissimilarityMatrix:
    labels: tuple
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != len(self.labels):
            raise ValueError("dissimilarities must be a square matrix matching the labels")
        if not np.array_equal(d, d.T):
            raise ValueError("dissimilarity matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            raise ValueError("dissimilarity matrix must have a zero diagonal")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("dissimilarities must be finite and non-negative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "d", d)

    @classmethod
    def from_points(cls, points, labels: Sequence | None = None) -> "DissimilarityMatrix":
        pts = np.asarray(points, dtype=np.float64)
        d = _kernels.pairwise_distances_numpy(pts)
        d = (d + d.T) / 2
        np.fill_diagonal(d, 0.0)
        return cls(tuple(labels) if labels is not None else tuple(range(1, len(pts) + 1)), d)

    def __len__(self):
        return len(self.labels)


@dataclass
class Embedding2D:
    labels: tuple
    coords: np.ndarray
    eigenvalues: np.ndarray | None = None
    stress: float | None = None
    iterations: int = 0
    stress_history: list[float] = field(default_factory=list)
    negative_mass: float = 0.0
    sweeps: int = 0
    stop_reason: str = ""

    def diagnostics(self) -> dict:
        return {
            "eigenvalues": None if self.eigenvalues is None else [float(v) for v in self.eigenvalues],
            "stress": self.stress,
            "iterations": self.iterations,
            "negative_eigenvalue_mass": self.negative_mass,
            "jacobi_sweeps": self.sweeps,
            "stop_reason": self.stop_reason,
        }


def _unit_rows(v: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(v * v, axis=1))
    out = np.zeros_like(v)
    nz = norms > 0
    out[nz] = v[nz] / norms[nz, None]
    return out


def cosine_dissimilarity(vectors: np.ndarray) -> np.ndarray:
    """``1 - cos`` between rows, clamped to [0, 2].

    Rows with the same direction get exactly 0. Two all-zero rows count as
    identical (0); a zero row against a non-zero row counts as orthogonal (1).
    """
    u = _unit_rows(np.asarray(vectors, dtype=np.float64))
    d = 1.0 - u @ u.T
    _, group = np.unique(u, axis=0, return_inverse=True)
    group = np.ravel(group)
    d[group[:, None] == group[None, :]] = 0.0
    zero = ~np.any(u != 0, axis=1)
    both = zero[:, None] & zero[None, :]
    one = zero[:, None] ^ zero[None, :]
    d[both] = 0.0
    d[one] = 1.0
    d = np.clip((d + d.T) / 2, 0.0, 2.0)
    np.fill_diagonal(d, 0.0)
    return d


def euclidean_dissimilarity(vectors: np.ndarray) -> np.ndarray:
    d = _kernels.pairwise_distances_numpy(np.asarray(vectors, dtype=np.float64))
    d = (d + d.T) / 2
    np.fill_diagonal(d, 0.0)
    return d


def chapter_vectors(matrix: TermDocMatrix, weighting: str = "tfidf") -> np.ndarray:
    """Rows are chapters, columns are terms."""
    if weighting not in WEIGHTINGS:
        raise ValueError(f"unknown weighting {weighting!r}")
    if np.any(matrix.doc_lengths == 0):
        empty = [matrix.docs[j] for j in np.flatnonzero(matrix.doc_lengths == 0)]
        raise EmptyDocument(f"chapters without tokens: {empty}")
    if weighting == "count":
        return matrix.counts.toarray().T.astype(np.float64)
    if weighting == "relative":
        return matrix.tf_matrix().T
    return matrix.tfidf_matrix().T


def chapter_dissimilarity(matrix: TermDocMatrix, metric: str = "cosine",
                          weighting: str | None = None) -> DissimilarityMatrix:
    """Cosine over tf-idf vectors by default; Euclidean defaults to relative frequencies."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if weighting is None:
        weighting = "tfidf" if metric == "cosine" else "relative"
    v = chapter_vectors(matrix, weighting)
    d = cosine_dissimilarity(v) if metric == "cosine" else euclidean_dissimilarity(v)
    return DissimilarityMatrix(matrix.docs, d)


def word_dissimilarity(matrix: TermDocMatrix, top_n: int = 50) -> DissimilarityMatrix:
    """Cosine between the chapter-distribution profiles of the ``top_n`` most frequent lemmas."""
    totals = np.asarray(matrix.counts.sum(axis=1)).ravel()
    order = sorted(range(len(matrix.terms)), key=lambda i: (-totals[i], matrix.terms[i]))[:top_n]
    tf = matrix.tf_matrix()
    d = cosine_dissimilarity(tf[order])
    return DissimilarityMatrix(tuple(matrix.terms[i] for i in order), d)


def double_center(d: np.ndarray) -> np.ndarray:
    """``-1/2 J D^2 J`` with ``J = I - 11'/n``."""
    d2 = np.asarray(d, dtype=np.float64) ** 2
    row = d2.mean(axis=1, keepdims=True)
    col = d2.mean(axis=0, keepdims=True)
    b = -0.5 * (d2 - row - col + d2.mean())
    return (b + b.T) / 2


def _fix_signs(coords: np.ndarray) -> np.ndarray:
    for k in range(coords.shape[1]):
        col = coords[:, k]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            coords[:, k] = -col
    return coords


def classical_mds(D: DissimilarityMatrix, dims: int = 2, tol: float = 1e-12,
                  max_sweeps: int = 100, backend: str | None = None) -> Embedding2D:
    n = len(D)
    if n < 2:
        raise ValueError("classical MDS needs at least two points")
    jacobi = _kernel_set(backend)[0]
    b = double_center(D.d)
    vals, vecs, sweeps, off = jacobi(b, tol, max_sweeps)
    if sweeps < 0:
        raise NonConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]

    total = np.sum(np.abs(vals))
    neg_mass = float(np.sum(-vals[vals < 0]) / total) if total > 0 else 0.0
    if neg_mass > NEGATIVE_MASS_WARN:
        logger.warning("dissimilarities are not Euclidean: negative eigenvalue mass %.3g", neg_mass)

    coords = np.zeros((n, dims))
    for k in range(min(dims, n)):
        if vals[k] > 0:
            coords[:, k] = vecs[:, k] * np.sqrt(vals[k])
    coords -= coords.mean(axis=0)
    coords = _fix_signs(coords)
    emb = Embedding2D(D.labels, coords, eigenvalues=vals, negative_mass=neg_mass, sweeps=sweeps)
    emb.stress = stress(D, emb, backend=backend)
    return emb


def stress(D: DissimilarityMatrix, embedding: Embedding2D, backend: str | None = None) -> float:
    """Raw stress: sum over pairs of (dissimilarity - embedded distance)^2."""
    if tuple(embedding.labels) != tuple(D.labels):
        raise ValueError("embedding labels do not match the dissimilarity matrix")
    return _kernel_set(backend)[2](D.d, embedding.coords)


def smacof(D: DissimilarityMatrix, init: Embedding2D, max_iter: int = 500, eps: float = 1e-9,
           backend: str | None = None) -> Embedding2D:
    """Stress majorization by repeated Guttman transforms, starting from ``init``.

    Stops when the relative stress decrease drops below ``eps``, when stress
    reaches 0, or after ``max_iter`` transforms. ``stress_history[0]`` is the
    initial stress; the returned coordinates are the best iterate seen.
    """
    if tuple(init.labels) != tuple(D.labels):
        raise ValueError("initial embedding labels do not match the dissimilarity matrix")
    _, guttman, raw_stress = _kernel_set(backend)
    x = np.array(init.coords, dtype=np.float64, copy=True)
    x -= x.mean(axis=0)
    s = raw_stress(D.d, x)
    history = [s]
    reason = "max_iter"
    for _ in range(max_iter):
        if s == 0.0:
            reason = "zero_stress"
            break
        x_new = guttman(D.d, x)
        s_new = raw_stress(D.d, x_new)
        if s_new > s:
            # rounding noise past the minimum; keep the better iterate
            reason = "increase"
            break
        history.append(s_new)
        x, prev, s = x_new, s, s_new
        if (prev - s) / prev < eps:
            reason = "eps"
            break
    else:
        if s == 0.0:
            reason = "zero_stress"
    x -= x.mean(axis=0)
    return Embedding2D(
        D.labels, x, eigenvalues=init.eigenvalues, stress=history[-1],
        iterations=len(history) - 1, stress_history=history,
        negative_mass=init.negative_mass, sweeps=init.sweeps, stop_reason=reason,
    )
