"""Hot loops for the MDS module: cyclic Jacobi, Guttman transform, raw stress.

Every kernel exists twice. ``*_numpy`` is plain vectorised numpy; ``*_numba``
is the same arithmetic as an ``@njit`` loop nest. The module-level names
(``jacobi_eigh``, ``guttman_transform``, ``raw_stress``) point at the numba
versions unless ``CORPUS_LENS_DISABLE_NUMBA`` is set to a truthy value or
numba cannot be imported.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("CORPUS_LENS_DISABLE_NUMBA", "").lower() not in ("", "0", "false", "no")
HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c


def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return np.sqrt(s)


# numpy path

def jacobi_eigh_numpy(a, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi on a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps, off_norm)``; eigenvectors
    are columns, unsorted. ``sweeps == -1`` means the limit was hit.
    Convergence: off-diagonal Frobenius norm <= ``tol`` * Frobenius norm.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.sqrt(np.sum(a * a))
    for sweep in range(max_sweeps + 1):
        offdiag = a - np.diag(np.diag(a))
        off = np.sqrt(np.sum(offdiag * offdiag))
        if off <= tol * scale:
            return np.diag(a).copy(), v, sweep, off
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(a[p, p], a[q, q], apq)
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, -1, off


def pairwise_distances_numpy(x):
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def guttman_transform_numpy(d, x):
    n = x.shape[0]
    dist = pairwise_distances_numpy(x)
    ratio = np.zeros_like(d)
    mask = dist > 0.0
    ratio[mask] = d[mask] / dist[mask]
    b = -ratio
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return b @ x / n


def raw_stress_numpy(d, x):
    dist = pairwise_distances_numpy(x)
    iu = np.triu_indices(d.shape[0], k=1)
    r = d[iu] - dist[iu]
    return float(np.sum(r * r))


# numba path

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _rotation_nb = _jit(_rotation)
    _off_norm_nb = _jit(_off_norm)

    @numba.njit(cache=True, nogil=True)
    def _jacobi_nb(a, tol, max_sweeps):
        n = a.shape[0]
        v = np.eye(n)
        scale = 0.0
        for i in range(n):
            for j in range(n):
                scale += a[i, j] * a[i, j]
        scale = np.sqrt(scale)
        off = 0.0
        for sweep in range(max_sweeps + 1):
            off = _off_norm_nb(a)
            if off <= tol * scale:
                return sweep, off, v
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    c, s = _rotation_nb(a[p, p], a[q, q], apq)
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[k, q] = s * akp + c * akq
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - s * aqk
                        a[q, k] = s * apk + c * aqk
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - s * vkq
                        v[k, q] = s * vkp + c * vkq
        return -1, off, v

    def jacobi_eigh_numba(a, tol=1e-12, max_sweeps=100):
        a = np.array(a, dtype=np.float64, copy=True)
        sweeps, off, v = _jacobi_nb(a, float(tol), int(max_sweeps))
        return np.diag(a).copy(), v, sweeps, off

    @numba.njit(cache=True, nogil=True)
    def _guttman_nb(d, x):
        n, k = x.shape
        out = np.zeros((n, k))
        for i in range(n):
            bii = 0.0
            for j in range(n):
                if i == j:
                    continue
                dist = 0.0
                for c in range(k):
                    diff = x[i, c] - x[j, c]
                    dist += diff * diff
                dist = np.sqrt(dist)
                if dist > 0.0:
                    bij = -d[i, j] / dist
                    bii -= bij
                    for c in range(k):
                        out[i, c] += bij * x[j, c]
            for c in range(k):
                out[i, c] += bii * x[i, c]
        return out / n

    @numba.njit(cache=True, nogil=True)
    def _stress_nb(d, x):
        n, k = x.shape
        s = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                dist = 0.0
                for c in range(k):
                    diff = x[i, c] - x[j, c]
                    dist += diff * diff
                r = d[i, j] - np.sqrt(dist)
                s += r * r
        return s

    def guttman_transform_numba(d, x):
        return _guttman_nb(np.ascontiguousarray(d, dtype=np.float64),
                           np.ascontiguousarray(x, dtype=np.float64))

    def raw_stress_numba(d, x):
        return float(_stress_nb(np.ascontiguousarray(d, dtype=np.float64),
                                np.ascontiguousarray(x, dtype=np.float64)))


BACKENDS = {
    "numpy": (jacobi_eigh_numpy, guttman_transform_numpy, raw_stress_numpy),
}
if HAVE_NUMBA:
    BACKENDS["numba"] = (jacobi_eigh_numba, guttman_transform_numba, raw_stress_numba)

jacobi_eigh, guttman_transform, raw_stress = BACKENDS[BACKEND]
