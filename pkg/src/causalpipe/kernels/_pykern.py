"""Pure-Python graph kernels: the fallback when the compiled extension is absent.

All functions operate on CSR adjacency (indptr/indices int32 arrays) plus
uint8 node masks, the same calling convention as the Cython twin in
``_ckern.pyx``. Nodes are 0..n-1; bidirected edges are expected to already be
expanded into synthetic fork nodes by the caller.
"""
from __future__ import annotations

import numpy as np

IMPL = "python"


def ancestor_mask(n, par_indptr, par_idx, seed_mask):
    """Seed nodes plus every node with a directed path into a seed."""
    out = np.array(seed_mask, dtype=np.uint8, copy=True)
    stack = [int(v) for v in np.flatnonzero(seed_mask)]
    while stack:
        v = stack.pop()
        for k in range(par_indptr[v], par_indptr[v + 1]):
            p = par_idx[k]
            if not out[p]:
                out[p] = 1
                stack.append(int(p))
    return out


def descendant_mask(n, chi_indptr, chi_idx, seed_mask):
    """Seed nodes plus every node reachable by a directed path from a seed."""
    return ancestor_mask(n, chi_indptr, chi_idx, seed_mask)


def dsep_reachable(n, par_indptr, par_idx, chi_indptr, chi_idx, x_mask, z_mask):
    """Nodes connected to X by an active trail given Z (reachability method).

    Returns a uint8 mask; X itself is marked. d-separation of (X, Y | Z)
    holds iff the returned mask is zero on every Y node.
    """
    anc_z = ancestor_mask(n, par_indptr, par_idx, z_mask)

    UP, DOWN = 0, 1
    visited = np.zeros((n, 2), dtype=np.uint8)
    reachable = np.zeros(n, dtype=np.uint8)
    stack = [(int(v), UP) for v in np.flatnonzero(x_mask)]
    while stack:
        v, d = stack.pop()
        if visited[v, d]:
            continue
        visited[v, d] = 1
        if not z_mask[v]:
            reachable[v] = 1
        if d == UP and not z_mask[v]:
            for k in range(par_indptr[v], par_indptr[v + 1]):
                stack.append((int(par_idx[k]), UP))
            for k in range(chi_indptr[v], chi_indptr[v + 1]):
                stack.append((int(chi_idx[k]), DOWN))
        elif d == DOWN:
            if not z_mask[v]:
                for k in range(chi_indptr[v], chi_indptr[v + 1]):
                    stack.append((int(chi_idx[k]), DOWN))
            if anc_z[v]:
                for k in range(par_indptr[v], par_indptr[v + 1]):
                    stack.append((int(par_idx[k]), UP))
    return reachable
