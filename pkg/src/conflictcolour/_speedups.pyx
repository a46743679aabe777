# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors `_kernels_py` operation-for-operation; see the
docstrings there for semantics. Keep the two in lockstep."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def keep_pass(cnp.int32_t[::1] k_dst, cnp.int32_t[::1] k_cdst,
              cnp.int32_t[::1] k_src, cnp.int32_t[::1] k_csrc,
              cnp.uint8_t[::1] live, cnp.uint8_t[::1] coloured,
              double act_over_l, Py_ssize_t m,
              double[::1] keep_out, cnp.int32_t[::1] t_out):
    cdef Py_ssize_t i = 0, j, key
    cdef Py_ssize_t n_entries = k_dst.shape[0]
    cdef cnp.int32_t d, cd, s
    cdef long count
    cdef double factor
    while i < n_entries:
        d = k_dst[i]
        cd = k_cdst[i]
        s = k_src[i]
        j = i
        count = 0
        while j < n_entries and k_dst[j] == d and k_cdst[j] == cd and k_src[j] == s:
            if coloured[s] == 0 and live[s * m + k_csrc[j]] != 0:
                count += 1
            j += 1
        if count > 0 and coloured[d] == 0 and live[d * m + cd] != 0:
            key = d * m + cd
            t_out[key] += count
            factor = 1.0 - act_over_l * count
            if factor < 0.0:
                factor = 0.0
            keep_out[key] *= factor
        i = j


def apply_removals(cnp.int64_t[::1] removal_off,
                   cnp.int32_t[::1] r_dst, cnp.int32_t[::1] r_cdst,
                   cnp.int64_t[::1] assigned, cnp.uint8_t[::1] start_unc,
                   cnp.uint8_t[::1] live_before, cnp.uint8_t[::1] live,
                   Py_ssize_t m):
    cdef Py_ssize_t s, e, lo, hi
    cdef Py_ssize_t n = assigned.shape[0]
    cdef cnp.int64_t a
    cdef cnp.int32_t d, cd
    cdef Py_ssize_t total = 0

    for s in range(n):
        a = assigned[s]
        if a < 0:
            continue
        lo = removal_off[s * m + a]
        hi = removal_off[s * m + a + 1]
        for e in range(lo, hi):
            d = r_dst[e]
            cd = r_cdst[e]
            if start_unc[d] != 0 and live_before[d * m + cd] != 0:
                total += 1

    ev_d_arr = np.empty(total, dtype=np.int32)
    ev_c_arr = np.empty(total, dtype=np.int32)
    ev_s_arr = np.empty(total, dtype=np.int32)
    cdef cnp.int32_t[::1] ev_d = ev_d_arr
    cdef cnp.int32_t[::1] ev_c = ev_c_arr
    cdef cnp.int32_t[::1] ev_s = ev_s_arr
    cdef Py_ssize_t w = 0

    for s in range(n):
        a = assigned[s]
        if a < 0:
            continue
        lo = removal_off[s * m + a]
        hi = removal_off[s * m + a + 1]
        for e in range(lo, hi):
            d = r_dst[e]
            cd = r_cdst[e]
            if start_unc[d] != 0 and live_before[d * m + cd] != 0:
                ev_d[w] = d
                ev_c[w] = cd
                ev_s[w] = <cnp.int32_t> s
                live[d * m + cd] = 0
                w += 1
    return ev_d_arr, ev_c_arr, ev_s_arr


def brute_force_search(cnp.int64_t[::1] cand_off, cnp.int64_t[::1] cand_cols,
                       cnp.int64_t[::1] grp_off,
                       cnp.int64_t[::1] g_u, cnp.int64_t[::1] g_cu,
                       cnp.int64_t[::1] g_cv, Py_ssize_t n):
    choice_arr = np.full(n, -1, dtype=np.int64)
    pos_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] choice = choice_arr
    cdef cnp.int64_t[::1] pos = pos_arr
    cdef Py_ssize_t v = 0, e
    cdef cnp.int64_t lo, hi, p, c
    cdef bint placed, ok
    while True:
        if v == n:
            return choice_arr.copy()
        lo = cand_off[v]
        hi = cand_off[v + 1]
        placed = False
        p = pos[v]
        while p < hi - lo:
            c = cand_cols[lo + p]
            ok = True
            for e in range(grp_off[v], grp_off[v + 1]):
                if choice[g_u[e]] == g_cu[e] and c == g_cv[e]:
                    ok = False
                    break
            if ok:
                choice[v] = c
                pos[v] = p + 1
                placed = True
                break
            p += 1
        if placed:
            v += 1
            if v < n:
                pos[v] = 0
        else:
            choice[v] = -1
            pos[v] = 0
            v -= 1
            if v < 0:
                return None
