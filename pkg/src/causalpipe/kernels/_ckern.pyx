# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels: d-separation reachability and ancestral closures.

Mirrors the pure-Python implementations in ``_pykern.py`` (same signatures,
same CSR adjacency convention); selected preferentially at import by
``causalpipe.kernels``.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPL = "cython"


def ancestor_mask(int n,
                  cnp.int32_t[::1] par_indptr,
                  cnp.int32_t[::1] par_idx,
                  cnp.uint8_t[::1] seed_mask):
    out_arr = np.zeros(n, dtype=np.uint8)
    stack_arr = np.empty(n if n > 0 else 1, dtype=np.int32)
    cdef cnp.uint8_t[::1] out = out_arr
    cdef cnp.int32_t[::1] stack = stack_arr
    cdef int top = 0
    cdef int v, k, p
    for v in range(n):
        if seed_mask[v]:
            out[v] = 1
            stack[top] = v
            top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        for k in range(par_indptr[v], par_indptr[v + 1]):
            p = par_idx[k]
            if not out[p]:
                out[p] = 1
                stack[top] = p
                top += 1
    return out_arr


def descendant_mask(int n,
                    cnp.int32_t[::1] chi_indptr,
                    cnp.int32_t[::1] chi_idx,
                    cnp.uint8_t[::1] seed_mask):
    return ancestor_mask(n, chi_indptr, chi_idx, seed_mask)


def dsep_reachable(int n,
                   cnp.int32_t[::1] par_indptr,
                   cnp.int32_t[::1] par_idx,
                   cnp.int32_t[::1] chi_indptr,
                   cnp.int32_t[::1] chi_idx,
                   cnp.uint8_t[::1] x_mask,
                   cnp.uint8_t[::1] z_mask):
    anc_arr = ancestor_mask(n, par_indptr, par_idx, z_mask)
    # (node, direction) states, deduplicated at push time so the stack is
    # bounded by 2n entries; direction 0 = trail leaves upward (from child),
    # 1 = trail arrives downward (from parent).
    visited_arr = np.zeros(2 * n if n > 0 else 1, dtype=np.uint8)
    reach_arr = np.zeros(n if n > 0 else 1, dtype=np.uint8)
    stack_arr = np.empty(2 * n if n > 0 else 1, dtype=np.int32)

    cdef cnp.uint8_t[::1] anc_z = anc_arr
    cdef cnp.uint8_t[::1] visited = visited_arr
    cdef cnp.uint8_t[::1] reachable = reach_arr
    cdef cnp.int32_t[::1] stack = stack_arr
    cdef int top = 0
    cdef int v, d, k, s

    for v in range(n):
        if x_mask[v] and not visited[2 * v]:
            visited[2 * v] = 1
            stack[top] = 2 * v
            top += 1

    while top > 0:
        top -= 1
        s = stack[top]
        v = s >> 1
        d = s & 1
        if not z_mask[v]:
            reachable[v] = 1
        if d == 0 and not z_mask[v]:
            for k in range(par_indptr[v], par_indptr[v + 1]):
                if not visited[2 * par_idx[k]]:
                    visited[2 * par_idx[k]] = 1
                    stack[top] = 2 * par_idx[k]
                    top += 1
            for k in range(chi_indptr[v], chi_indptr[v + 1]):
                if not visited[2 * chi_idx[k] + 1]:
                    visited[2 * chi_idx[k] + 1] = 1
                    stack[top] = 2 * chi_idx[k] + 1
                    top += 1
        elif d == 1:
            if not z_mask[v]:
                for k in range(chi_indptr[v], chi_indptr[v + 1]):
                    if not visited[2 * chi_idx[k] + 1]:
                        visited[2 * chi_idx[k] + 1] = 1
                        stack[top] = 2 * chi_idx[k] + 1
                        top += 1
            if anc_z[v]:
                for k in range(par_indptr[v], par_indptr[v + 1]):
                    if not visited[2 * par_idx[k]]:
                        visited[2 * par_idx[k]] = 1
                        stack[top] = 2 * par_idx[k]
                        top += 1
    return reach_arr[:n]
