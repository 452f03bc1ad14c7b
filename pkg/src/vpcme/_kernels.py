"""Hot numeric kernels with two interchangeable backends.

The numba backend JIT-compiles the scalar loops below; the numpy backend
runs vectorized equivalents of the same arithmetic. Selection happens once
at import time through the ``VPCME_BACKEND`` environment variable:

    VPCME_BACKEND=auto   (default) numba when importable, else numpy
    VPCME_BACKEND=numba  require the JIT backend
    VPCME_BACKEND=numpy  force the pure-numpy fallback

Both backends implement identical tie-breaking and routing rules, so they
are interchangeable up to floating-point summation order.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

ENV_FLAG = "VPCME_BACKEND"


# ---------------------------------------------------------------------------
# Jacobi eigendecomposition of a symmetric matrix.
# Cyclic sweeps; convergence when the off-diagonal Frobenius norm drops below
# tol * ||A||_F, hard cap on sweep count. Returns the (unsorted) diagonal and
# the accumulated rotation matrix V with eigenvectors in columns.
# ---------------------------------------------------------------------------


def _jacobi_scalar(a, tol, max_sweeps):
    k = a.shape[0]
    v = np.eye(k)
    norm_a = 0.0
    for p in range(k):
        for q in range(k):
            norm_a += a[p, q] * a[p, q]
    norm_a = np.sqrt(norm_a)
    if norm_a == 0.0:
        return np.zeros(k), v
    threshold = tol * norm_a
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(k):
            for q in range(k):
                if p != q:
                    off += a[p, q] * a[p, q]
        if np.sqrt(off) < threshold:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                # a pivot too small to perturb the diagonal is flushed to
                # zero; this also keeps tau = diff / (2 apq) from overflowing
                guard = 100.0 * abs(apq)
                if abs(a[p, p]) + guard == abs(a[p, p]) and abs(a[q, q]) + guard == abs(a[q, q]):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for r in range(k):
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * arq
                    a[r, q] = s * arp + c * arq
                for r in range(k):
                    apr = a[p, r]
                    aqr = a[q, r]
                    a[p, r] = c * apr - s * aqr
                    a[q, r] = s * apr + c * aqr
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(k):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = c * vrp - s * vrq
                    v[r, q] = s * vrp + c * vrq
    diag = np.empty(k)
    for p in range(k):
        diag[p] = a[p, p]
    return diag, v


def _jacobi_numpy(a, tol, max_sweeps):
    k = a.shape[0]
    v = np.eye(k)
    norm_a = np.sqrt(np.sum(a * a))
    if norm_a == 0.0:
        return np.zeros(k), v
    threshold = tol * norm_a
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off < threshold:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                guard = 100.0 * abs(apq)
                if abs(a[p, p]) + guard == abs(a[p, p]) and abs(a[q, q]) + guard == abs(a[q, q]):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                v_p = v[:, p].copy()
                v_q = v[:, q].copy()
                v[:, p] = c * v_p - s * v_q
                v[:, q] = s * v_p + c * v_q
    return np.diag(a).copy(), v


# ---------------------------------------------------------------------------
# k-nearest-neighbor index search, squared Euclidean distance.
# Ties broken by lower training index. The self variant excludes each row's
# own index; the query variant searches plain nearest neighbors.
# ---------------------------------------------------------------------------


def _knn_scalar(train, queries, k, exclude_diag):
    m = queries.shape[0]
    n = train.shape[0]
    d = train.shape[1]
    out = np.empty((m, k), np.int64)
    best_d = np.empty(k)
    best_i = np.empty(k, np.int64)
    for i in range(m):
        count = 0
        for j in range(n):
            if exclude_diag and j == i:
                continue
            dist = 0.0
            for t in range(d):
                diff = queries[i, t] - train[j, t]
                dist += diff * diff
            if count < k:
                pos = count
                while pos > 0 and best_d[pos - 1] > dist:
                    best_d[pos] = best_d[pos - 1]
                    best_i[pos] = best_i[pos - 1]
                    pos -= 1
                best_d[pos] = dist
                best_i[pos] = j
                count += 1
            elif dist < best_d[k - 1]:
                pos = k - 1
                while pos > 0 and best_d[pos - 1] > dist:
                    best_d[pos] = best_d[pos - 1]
                    best_i[pos] = best_i[pos - 1]
                    pos -= 1
                best_d[pos] = dist
                best_i[pos] = j
            # equal distance to the current k-th neighbor keeps the earlier
            # index: j only ever increases, so strict < is the whole tie rule
        for t in range(k):
            out[i, t] = best_i[t]
    return out


def _knn_numpy(train, queries, k, exclude_diag):
    m = queries.shape[0]
    n, d = train.shape
    out = np.empty((m, k), np.int64)
    block = max(1, int(8_000_000 // max(1, n * d)))
    for start in range(0, m, block):
        stop = min(start + block, m)
        chunk = queries[start:stop]
        d2 = ((chunk[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
        if exclude_diag:
            rows = np.arange(start, stop)
            d2[np.arange(stop - start), rows] = np.inf
        order = np.argsort(d2, axis=1, kind="stable")
        out[start:stop] = order[:, :k]
    return out


# ---------------------------------------------------------------------------
# Pair routing for constraint sampling. Consumes a pre-drawn block of
# uniforms (two per attempt), maps each to an instance index by inverse-CDF
# lookup on the cumulative weights, and routes the pair to the must or
# cannot list by comparing the label-overlap ratio against theta. Attempts
# with i == j are rejected but still consume their uniforms; pairs whose
# list is already full are discarded. Stops early once both lists are full.
# ---------------------------------------------------------------------------


def _route_pairs_scalar(cumw, uniforms, labels, sizes, theta, target_must, target_cannot):
    n = sizes.shape[0]
    r = labels.shape[1]
    max_attempts = uniforms.shape[0] // 2
    must = np.empty((target_must, 2), np.int64)
    cannot = np.empty((target_cannot, 2), np.int64)
    n_must = 0
    n_cannot = 0
    for a in range(max_attempts):
        if n_must >= target_must and n_cannot >= target_cannot:
            break
        i = np.searchsorted(cumw, uniforms[2 * a], side="right")
        if i > n - 1:
            i = n - 1
        j = np.searchsorted(cumw, uniforms[2 * a + 1], side="right")
        if j > n - 1:
            j = n - 1
        if i == j:
            continue
        inter = 0
        for t in range(r):
            inter += labels[i, t] & labels[j, t]
        denom = (sizes[i] + sizes[j]) / 2.0
        if denom == 0.0:
            ratio = 1.0
        else:
            ratio = inter / denom
        if ratio >= theta:
            if n_must < target_must:
                must[n_must, 0] = i
                must[n_must, 1] = j
                n_must += 1
        else:
            if n_cannot < target_cannot:
                cannot[n_cannot, 0] = i
                cannot[n_cannot, 1] = j
                n_cannot += 1
    return must[:n_must].copy(), cannot[:n_cannot].copy()


def _route_pairs_numpy(cumw, uniforms, labels, sizes, theta, target_must, target_cannot):
    n = sizes.shape[0]
    max_attempts = uniforms.shape[0] // 2
    if max_attempts == 0 or (target_must == 0 and target_cannot == 0):
        return np.empty((0, 2), np.int64), np.empty((0, 2), np.int64)
    idx = np.minimum(np.searchsorted(cumw, uniforms[: 2 * max_attempts], side="right"), n - 1)
    ii = idx[0::2]
    jj = idx[1::2]
    valid = ii != jj
    ii = ii[valid]
    jj = jj[valid]
    inter = np.einsum("ij,ij->i", labels[ii].astype(np.int64), labels[jj].astype(np.int64))
    denom = (sizes[ii] + sizes[jj]) / 2.0
    ratio = np.where(denom == 0.0, 1.0, inter / np.where(denom == 0.0, 1.0, denom))
    to_must = ratio >= theta
    # selecting the first target_k pairs of each kind reproduces the
    # sequential semantics: later pairs never influence earlier routing
    must_idx = np.flatnonzero(to_must)[:target_must]
    cannot_idx = np.flatnonzero(~to_must)[:target_cannot]
    must = np.stack([ii[must_idx], jj[must_idx]], axis=1) if must_idx.size else np.empty((0, 2), np.int64)
    cannot = np.stack([ii[cannot_idx], jj[cannot_idx]], axis=1) if cannot_idx.size else np.empty((0, 2), np.int64)
    return must.astype(np.int64), cannot.astype(np.int64)


# ---------------------------------------------------------------------------
# Backend wiring.
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    _jacobi_njit = njit(cache=True)(_jacobi_scalar)
    _knn_njit = njit(cache=True)(_knn_scalar)
    _route_pairs_njit = njit(cache=True)(_route_pairs_scalar)


def _wrap_jacobi(impl):
    def jacobi_eigh(a, tol=1e-10, max_sweeps=100):
        return impl(np.array(a, dtype=np.float64, copy=True), float(tol), int(max_sweeps))

    return jacobi_eigh


def _wrap_knn(impl):
    def knn_exclude_self(points, k):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        return impl(pts, pts, int(k), True)

    def knn_query(train, queries, k):
        return impl(
            np.ascontiguousarray(train, dtype=np.float64),
            np.ascontiguousarray(queries, dtype=np.float64),
            int(k),
            False,
        )

    return knn_exclude_self, knn_query


def _wrap_route(impl):
    def route_pairs(cumw, uniforms, labels, sizes, theta, target_must, target_cannot):
        return impl(
            np.ascontiguousarray(cumw, dtype=np.float64),
            np.ascontiguousarray(uniforms, dtype=np.float64),
            np.ascontiguousarray(labels, dtype=np.uint8),
            np.ascontiguousarray(sizes, dtype=np.int64),
            float(theta),
            int(target_must),
            int(target_cannot),
        )

    return route_pairs


def _build_backend(name):
    if name == "numba":
        knn_self, knn_q = _wrap_knn(_knn_njit)
        return {
            "jacobi_eigh": _wrap_jacobi(_jacobi_njit),
            "knn_exclude_self": knn_self,
            "knn_query": knn_q,
            "route_pairs": _wrap_route(_route_pairs_njit),
        }
    knn_self, knn_q = _wrap_knn(_knn_numpy)
    return {
        "jacobi_eigh": _wrap_jacobi(_jacobi_numpy),
        "knn_exclude_self": knn_self,
        "knn_query": knn_q,
        "route_pairs": _wrap_route(_route_pairs_numpy),
    }


def available_backends():
    names = ["numpy"]
    if HAVE_NUMBA:
        names.insert(0, "numba")
    return names


def backend_impls(name):
    """Kernel table for an explicit backend, regardless of the active one."""
    if name not in available_backends():
        raise ImportError(f"backend {name!r} is not available (numba missing?)")
    return _build_backend(name)


def _resolve_backend():
    choice = os.environ.get(ENV_FLAG, "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if choice in ("numba", "numpy"):
        if choice == "numba" and not HAVE_NUMBA:
            raise ImportError(f"{ENV_FLAG}=numba requested but numba is not importable")
        return choice
    raise ValueError(f"{ENV_FLAG} must be 'auto', 'numba' or 'numpy', got {choice!r}")


ACTIVE_BACKEND = _resolve_backend()

_impls = _build_backend(ACTIVE_BACKEND)
jacobi_eigh = _impls["jacobi_eigh"]
knn_exclude_self = _impls["knn_exclude_self"]
knn_query = _impls["knn_query"]
route_pairs = _impls["route_pairs"]


def active_backend():
    return ACTIVE_BACKEND
