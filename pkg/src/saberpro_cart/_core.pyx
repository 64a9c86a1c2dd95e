# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-search kernels.

Mirrors ``_core_py`` expression for expression; both backends must return
bit-identical (gain, value) pairs. Divisions are written with explicit double
casts so cdivision never turns them into integer division.
"""


def numeric_best(const double[::1] svals, const unsigned char[::1] slabs,
                 long miss_s, long miss_u, long tot_s, long tot_u):
    cdef long n = tot_s + tot_u
    cdef double ps = (<double> tot_s) / (<double> n)
    cdef double pu = (<double> tot_u) / (<double> n)
    cdef double g_parent = 1.0 - ps * ps - pu * pu

    cdef double best_gain = 0.0
    cdef double best_thr = 0.0
    cdef long pre_s = 0
    cdef long pre_u = 0
    cdef Py_ssize_t k = svals.shape[0]
    cdef Py_ssize_t i = 0
    cdef double v, pts, ptu, g_t, pfs, pfu, g_f, gain
    cdef long nf_s, nf_u, nt_s, nt_u, nt, nf

    while i < k:
        v = svals[i]
        nf_s = pre_s + miss_s
        nf_u = pre_u + miss_u
        nt_s = tot_s - nf_s
        nt_u = tot_u - nf_u
        nt = nt_s + nt_u
        nf = nf_s + nf_u
        if nt > 0 and nf > 0:
            pts = (<double> nt_s) / (<double> nt)
            ptu = (<double> nt_u) / (<double> nt)
            g_t = 1.0 - pts * pts - ptu * ptu
            pfs = (<double> nf_s) / (<double> nf)
            pfu = (<double> nf_u) / (<double> nf)
            g_f = 1.0 - pfs * pfs - pfu * pfu
            gain = g_parent - ((<double> nt) / (<double> n)) * g_t \
                - ((<double> nf) / (<double> n)) * g_f
            if gain > best_gain:
                best_gain = gain
                best_thr = v
        while i < k and svals[i] == v:
            if slabs[i]:
                pre_s += 1
            else:
                pre_u += 1
            i += 1
    return best_gain, best_thr


def categorical_best(const int[::1] codes, const unsigned char[::1] labs,
                     long long[::1] cnt_s, long long[::1] cnt_u,
                     int[::1] order, long tot_s, long tot_u):
    cdef Py_ssize_t n_node = codes.shape[0]
    cdef long n = tot_s + tot_u
    cdef double ps = (<double> tot_s) / (<double> n)
    cdef double pu = (<double> tot_u) / (<double> n)
    cdef double g_parent = 1.0 - ps * ps - pu * pu

    cdef Py_ssize_t i
    cdef int c
    cdef Py_ssize_t n_order = 0
    for i in range(n_node):
        c = codes[i]
        if cnt_s[c] + cnt_u[c] == 0:
            order[n_order] = c
            n_order += 1
        if labs[i]:
            cnt_s[c] += 1
        else:
            cnt_u[c] += 1

    cdef double best_gain = 0.0
    cdef int best_code = -1
    cdef long nt_s, nt_u, nf_s, nf_u, nt, nf
    cdef double pts, ptu, g_t, pfs, pfu, g_f, gain
    for i in range(n_order):
        c = order[i]
        nt_s = cnt_s[c]
        nt_u = cnt_u[c]
        nf_s = tot_s - nt_s
        nf_u = tot_u - nt_u
        nt = nt_s + nt_u
        nf = nf_s + nf_u
        if nt > 0 and nf > 0:
            pts = (<double> nt_s) / (<double> nt)
            ptu = (<double> nt_u) / (<double> nt)
            g_t = 1.0 - pts * pts - ptu * ptu
            pfs = (<double> nf_s) / (<double> nf)
            pfu = (<double> nf_u) / (<double> nf)
            g_f = 1.0 - pfs * pfs - pfu * pfu
            gain = g_parent - ((<double> nt) / (<double> n)) * g_t \
                - ((<double> nf) / (<double> n)) * g_f
            if gain > best_gain:
                best_gain = gain
                best_code = c
    # dirty reset so the scratch arrays are clean for the next node
    for i in range(n_order):
        c = order[i]
        cnt_s[c] = 0
        cnt_u[c] = 0
    return best_gain, best_code
