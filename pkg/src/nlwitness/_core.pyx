# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the Monte Carlo sweep.

Same contracts as ``_kernels_py``; eigenvalues and singular values come
from LAPACK through scipy's Cython bindings.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport NAN, sqrt, log, cos, sin, pow
from libc.stdint cimport uint64_t, int64_t
from scipy.linalg.cython_lapack cimport zheev, zgesvd

cnp.import_array()

cdef enum:
    NSTAT = 4


cdef double _min_eig(double complex *a, int n, double *w, double complex *work,
                     int lwork, double *rwork) noexcept nogil:
    cdef char jobz = b'N'
    cdef char uplo = b'L'
    cdef int info = 0
    zheev(&jobz, &uplo, &n, a, &n, w, work, &lwork, rwork, &info)
    if info != 0:
        return NAN
    return w[0]


cdef double _nuclear(double complex *a, int m, int n, double *s, double complex *work,
                     int lwork, double *rwork) noexcept nogil:
    cdef char job = b'N'
    cdef int info = 0
    cdef int one = 1
    cdef double complex dummy = 0
    cdef int k = m if m < n else n
    cdef int i
    cdef double tot = 0.0
    zgesvd(&job, &job, &m, &n, a, &m, s, &dummy, &one, &dummy, &one, work, &lwork, rwork, &info)
    if info != 0:
        return NAN
    for i in range(k):
        tot += s[i]
    return tot


def min_eigvalsh(const double complex[:, :, ::1] mats):
    cdef Py_ssize_t N = mats.shape[0]
    cdef int d = <int>mats.shape[1]
    cdef double[::1] out = np.empty(N)
    cdef double complex[::1, :] a = np.empty((d, d), dtype=np.complex128, order='F')
    cdef double[::1] w = np.empty(d)
    cdef int lwork = 4 * d
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef double[::1] rwork = np.empty(max(1, 3 * d - 2))
    cdef Py_ssize_t t, i, j
    with nogil:
        for t in range(N):
            # column-major buffer of the Hermitian part (lower triangle is read)
            for j in range(d):
                for i in range(j, d):
                    a[i, j] = 0.5 * (mats[t, i, j] + mats[t, j, i].conjugate())
            out[t] = _min_eig(&a[0, 0], d, &w[0], &work[0], lwork, &rwork[0])
    return np.asarray(out)


def pt_stats(const double complex[:, :, ::1] rhos, int dA, int dB,
             const double complex[::1] phi, const double complex[:, ::1] psis):
    cdef Py_ssize_t N = rhos.shape[0]
    cdef int d = dA * dB
    cdef Py_ssize_t K = psis.shape[0]
    cdef double[:, ::1] out = np.empty((N, NSTAT + K))
    cdef double complex[:, ::1] R = np.empty((d, d), dtype=np.complex128)
    cdef double complex[::1, :] a = np.empty((d, d), dtype=np.complex128, order='F')
    cdef double complex[::1] eta = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] em = np.empty(d, dtype=np.complex128)
    cdef double[::1] w = np.empty(d)
    cdef int lwork = 4 * d + 2 * (dA if dA > dB else dB)
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef double[::1] rwork = np.empty(max(3 * d - 2, 5 * d))
    cdef Py_ssize_t t, i, j, ia, ib, ja, jb, k
    cdef double complex acc
    cdef double lhs, nrm
    with nogil:
        for t in range(N):
            # R[(ia,ib),(ja,jb)] = rho[(ia,jb),(ja,ib)]
            for ia in range(dA):
                for ib in range(dB):
                    for ja in range(dA):
                        for jb in range(dB):
                            R[ia * dB + ib, ja * dB + jb] = rhos[t, ia * dB + jb, ja * dB + ib]
            for j in range(d):
                for i in range(j, d):
                    a[i, j] = 0.5 * (R[i, j] + R[j, i].conjugate())
            out[t, 0] = _min_eig(&a[0, 0], d, &w[0], &work[0], lwork, &rwork[0])
            lhs = 0.0
            nrm = 0.0
            for i in range(d):
                acc = 0
                for j in range(d):
                    acc = acc + R[i, j] * phi[j]
                eta[i] = acc
                lhs += (phi[i].conjugate() * acc).real
                nrm += acc.real * acc.real + acc.imag * acc.imag
            out[t, 1] = lhs
            out[t, 2] = nrm
            # eta reshaped to dA x dB, stored column-major for zgesvd
            for ia in range(dA):
                for ib in range(dB):
                    em[ib * dA + ia] = eta[ia * dB + ib]
            nrm = _nuclear(&em[0], dA, dB, &w[0], &work[0], lwork, &rwork[0])
            out[t, 3] = nrm * nrm
            for k in range(K):
                acc = 0
                for i in range(d):
                    acc = acc + psis[k, i].conjugate() * eta[i]
                out[t, NSTAT + k] = acc.real * acc.real + acc.imag * acc.imag
    return np.asarray(out)


# ---------------------------------------------------------------------------
# Counter-based per-sample random streams (SplitMix64) and ball sampling

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_PI = 6.283185307179586


cdef inline uint64_t _fmix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t *state) noexcept nogil:
    state[0] = state[0] + GOLDEN
    return <double>(_fmix(state[0]) >> 11) * (1.0 / 9007199254740992.0)


cdef void _normals(uint64_t *state, double *out, int k) noexcept nogil:
    cdef int p
    cdef double u1, u2, r
    for p in range(0, k, 2):
        u1 = _uniform(state)
        u2 = _uniform(state)
        r = sqrt(-2.0 * log(1.0 - u1))
        out[p] = r * cos(TWO_PI * u2)
        if p + 1 < k:
            out[p + 1] = r * sin(TWO_PI * u2)


def stream_keys(uint64_t seed, uint64_t stream, const uint64_t[::1] ordinals):
    cdef Py_ssize_t n = ordinals.shape[0], t
    cdef uint64_t[::1] out = np.empty(n, dtype=np.uint64)
    cdef uint64_t k = _fmix(_fmix(seed + GOLDEN) + stream + GOLDEN)
    for t in range(n):
        out[t] = _fmix(k + ordinals[t] + GOLDEN)
    return np.asarray(out)


def sample_ball_batch(const double complex[:, ::1] center, double radius, int method,
                      uint64_t seed, uint64_t stream, const uint64_t[::1] ordinals,
                      int max_tries):
    cdef int d = <int>center.shape[0]
    cdef Py_ssize_t n = ordinals.shape[0]
    cdef double complex[:, :, ::1] out = np.zeros((n, d, d), dtype=np.complex128)
    cdef int64_t[::1] tries = np.full(n, -1, dtype=np.int64)
    cdef uint64_t[::1] keys = stream_keys(seed, stream, ordinals)
    cdef double[::1] z = np.empty(2 * d * d + 2)
    cdef double complex[:, ::1] cand = np.empty((d, d), dtype=np.complex128)
    cdef double complex[::1, :] a = np.empty((d, d), dtype=np.complex128, order='F')
    cdef double[::1] w = np.empty(d)
    cdef int lwork = 4 * d
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef double[::1] rwork = np.empty(max(1, 3 * d - 2))
    cdef int m = d * (d - 1) // 2
    cdef double expo = 1.0 / (d * d - 1)
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)
    cdef uint64_t state
    cdef Py_ssize_t t
    cdef int attempt, i, j, k, q
    cdef double tr, nrm, u, r, dist
    cdef double complex acc
    cdef bint ok
    with nogil:
        for t in range(n):
            state = keys[t]
            for attempt in range(1, max_tries + 1):
                if method == 0:
                    _normals(&state, &z[0], d * d)
                    u = _uniform(&state)
                    for i in range(d):
                        for j in range(d):
                            cand[i, j] = 0
                    tr = 0.0
                    for i in range(d):
                        tr += z[i]
                    for i in range(d):
                        cand[i, i] = z[i] - tr / d
                    q = 0
                    for i in range(d):
                        for j in range(i + 1, d):
                            cand[i, j] = (z[d + q] + 1j * z[d + m + q]) * inv_sqrt2
                            cand[j, i] = cand[i, j].conjugate()
                            q += 1
                    nrm = 0.0
                    for i in range(d):
                        for j in range(d):
                            nrm += cand[i, j].real * cand[i, j].real + cand[i, j].imag * cand[i, j].imag
                    r = radius * pow(u, expo) / sqrt(nrm)
                    for i in range(d):
                        for j in range(d):
                            cand[i, j] = center[i, j] + r * cand[i, j]
                    for j in range(d):
                        for i in range(j, d):
                            a[i, j] = cand[i, j]
                    ok = _min_eig(&a[0, 0], d, &w[0], &work[0], lwork, &rwork[0]) >= 0.0
                else:
                    _normals(&state, &z[0], 2 * d * d)
                    # cand = G G^dagger with G[i, j] = z[2(i d + j)] + i z[2(i d + j) + 1]
                    tr = 0.0
                    for i in range(d):
                        for j in range(d):
                            acc = 0
                            for k in range(d):
                                acc = acc + (z[2 * (i * d + k)] + 1j * z[2 * (i * d + k) + 1]) * \
                                    (z[2 * (j * d + k)] - 1j * z[2 * (j * d + k) + 1])
                            cand[i, j] = acc
                        tr += cand[i, i].real
                    dist = 0.0
                    for i in range(d):
                        for j in range(d):
                            cand[i, j] = cand[i, j] / tr
                            acc = cand[i, j] - center[i, j]
                            dist += acc.real * acc.real + acc.imag * acc.imag
                    ok = sqrt(dist) <= radius
                if ok:
                    for i in range(d):
                        for j in range(d):
                            out[t, i, j] = cand[i, j]
                    tries[t] = attempt
                    break
    return np.asarray(out), np.asarray(tries)
