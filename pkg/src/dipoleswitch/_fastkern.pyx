# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: sector Hamiltonian fill, pair reduction, concurrence.

Mirrors the contracts of ``_purekern``; see that module for the docs. The
4x4 eigenproblems go straight to LAPACK's dsyev to avoid per-call Python
overhead in sweep loops.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_lapack cimport dgesvd, dsyev

cnp.import_array()


def fill_block(masks, couplings, omega, lookup):
    masks_arr = np.ascontiguousarray(masks, dtype=np.int64)
    coup_arr = np.ascontiguousarray(couplings, dtype=np.float64)
    omega_arr = np.ascontiguousarray(omega, dtype=np.float64)
    lookup_arr = np.ascontiguousarray(lookup, dtype=np.int64)
    cdef cnp.int64_t[::1] ms = masks_arr
    cdef double[:, ::1] j_ij = coup_arr
    cdef double[::1] om = omega_arr
    cdef cnp.int64_t[::1] lk = lookup_arr
    cdef Py_ssize_t d = ms.shape[0]
    cdef Py_ssize_t n = j_ij.shape[0]
    out = np.zeros((d, d), dtype=np.float64)
    cdef double[:, ::1] h = out
    cdef Py_ssize_t r, i, j
    cdef cnp.int64_t m, hop
    cdef double acc, jij
    with nogil:
        for r in range(d):
            m = ms[r]
            acc = 0.0
            for i in range(n):
                acc += om[i] * ((m >> i) & 1)
            h[r, r] = acc
            # each off-diagonal element is written once from its own row:
            # bit i occupied, bit j empty moves the excitation i -> j
            for i in range(n):
                if not ((m >> i) & 1):
                    continue
                for j in range(n):
                    if j == i or ((m >> j) & 1):
                        continue
                    jij = j_ij[i, j]
                    if jij == 0.0:
                        continue
                    hop = (<cnp.int64_t>1 << i) | (<cnp.int64_t>1 << j)
                    h[r, lk[m ^ hop]] = jij
    return out


def pair_rho(vectors, weights, pos_i, pos_j):
    vec_arr = np.ascontiguousarray(vectors, dtype=np.float64)
    w_arr = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:, ::1] v = vec_arr
    cdef double[::1] w = w_arr
    cdef Py_ssize_t nstates = v.shape[0]
    cdef Py_ssize_t dim = v.shape[1]
    cdef Py_ssize_t nrest = dim >> 2
    cdef int pi = pos_i, pj = pos_j
    cdef int lo = min(pi, pj), hi = max(pi, pj)
    cdef cnp.int64_t off_i = (<cnp.int64_t>1) << pi
    cdef cnp.int64_t off_j = (<cnp.int64_t>1) << pj
    cdef cnp.int64_t lo_mask = ((<cnp.int64_t>1) << lo) - 1
    cdef cnp.int64_t hi_mask = ((<cnp.int64_t>1) << hi) - 1
    out = np.zeros((4, 4), dtype=np.float64)
    cdef double[:, ::1] rho = out
    cdef Py_ssize_t k, r, a, b
    cdef cnp.int64_t base, t
    cdef double wk
    cdef double amp[4]
    with nogil:
        for k in range(nstates):
            wk = w[k]
            if wk == 0.0:
                continue
            for r in range(nrest):
                t = ((<cnp.int64_t>r >> lo) << (lo + 1)) | (<cnp.int64_t>r & lo_mask)
                base = ((t >> hi) << (hi + 1)) | (t & hi_mask)
                amp[0] = v[k, base]
                amp[1] = v[k, base | off_j]
                amp[2] = v[k, base | off_i]
                amp[3] = v[k, base | off_i | off_j]
                for a in range(4):
                    for b in range(a, 4):
                        rho[a, b] += wk * amp[a] * amp[b]
    for a in range(1, 4):
        for b in range(a):
            out[a, b] = out[b, a]
    return out


cdef double _concurrence_one(const double* rho_in) noexcept nogil:
    """Wootters concurrence of one real symmetric 4x4 density matrix.

    The lambda's are taken as the singular values of
    sqrt(rho_tilde) * sqrt(rho), which equal the eigenvalues of the Hermitian
    matrix R and stay accurate for (near-)pure inputs where square-rooting
    the eigenvalues of the product matrix would amplify roundoff to ~1e-8.
    """
    cdef double a[16]
    cdef double s[16]
    cdef double st[16]
    cdef double b[16]
    cdef double w[4]
    cdef double sv[4]
    cdef double work[68]
    cdef double dummy[1]
    cdef int four = 4, one = 1, info = 0, lwork = 68
    cdef char jobz_v = b'V', uplo = b'U', job_n = b'N'
    cdef int i, j, k
    cdef double sw, acc, total

    for i in range(16):
        a[i] = rho_in[i]
    dsyev(&jobz_v, &uplo, &four, a, &four, w, work, &lwork, &info)
    if info != 0:
        return -1.0

    # sqrt(rho) = V diag(sqrt(max(w, 0))) V^T; column j of V is a[i + 4*j]
    for i in range(16):
        s[i] = 0.0
    for j in range(4):
        sw = sqrt(w[j]) if w[j] > 0.0 else 0.0
        if sw == 0.0:
            continue
        for i in range(4):
            for k in range(4):
                s[i * 4 + k] += sw * a[i + 4 * j] * a[k + 4 * j]

    # sqrt(rho_tilde)[i, j] = f_i f_j sqrt(rho)[3 - i, 3 - j], f = (-1, 1, 1, -1)
    for i in range(4):
        for j in range(4):
            sw = s[(3 - i) * 4 + (3 - j)]
            if (i == 0) != (j == 0):
                sw = -sw
            if (i == 3) != (j == 3):
                sw = -sw
            st[i * 4 + j] = sw

    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc += st[i * 4 + k] * s[k * 4 + j]
            b[i * 4 + j] = acc

    # dgesvd reads b column-major, i.e. b^T; singular values are the same
    dgesvd(&job_n, &job_n, &four, &four, b, &four, sv, dummy, &one,
           dummy, &one, work, &lwork, &info)
    if info != 0:
        return -1.0
    total = 0.0
    for i in range(4):
        total += sv[i]
    # dgesvd returns singular values in descending order
    acc = 2.0 * sv[0] - total
    if acc < 0.0:
        acc = 0.0
    if acc > 1.0:
        acc = 1.0
    return acc


def concurrence_batch(rhos):
    rho_arr = np.ascontiguousarray(rhos, dtype=np.float64)
    cdef double[:, :, ::1] r = rho_arr
    cdef Py_ssize_t m = r.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t k
    cdef bint failed = False
    with nogil:
        for k in range(m):
            res[k] = _concurrence_one(&r[k, 0, 0])
            if res[k] < 0.0:
                failed = True
    if failed:
        raise np.linalg.LinAlgError("dsyev failed on a 4x4 density matrix")
    return out
