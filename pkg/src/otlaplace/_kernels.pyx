# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled assignment kernel: shortest augmenting path, O(n^3).

Mirrors ``_kernels_py.solve_assignment`` operation for operation (same scan
order, same tie-breaks) so results are bit-identical across the two
implementations.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "cython"


def solve_assignment(cost):
    """Minimum-cost perfect matching of a square cost matrix.

    Returns (col4row, total); see the fallback implementation for the
    determinism contract.
    """
    cost_arr = np.ascontiguousarray(cost, dtype=np.float64)
    if cost_arr.ndim != 2 or cost_arr.shape[0] != cost_arr.shape[1]:
        raise ValueError("cost matrix must be square")
    if not np.isfinite(cost_arr).all():
        raise ValueError("cost matrix must be finite")

    cdef double[:, ::1] c = cost_arr
    cdef Py_ssize_t n = c.shape[0]

    u_arr = np.zeros(n)
    v_arr = np.zeros(n)
    shortest_arr = np.empty(n)
    col4row_arr = np.full(n, -1, dtype=np.intp)
    row4col_arr = np.full(n, -1, dtype=np.intp)
    path_arr = np.empty(n, dtype=np.intp)
    remaining_arr = np.empty(n, dtype=np.intp)
    scanned_rows_arr = np.empty(n, dtype=np.uint8)
    scanned_cols_arr = np.empty(n, dtype=np.uint8)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] shortest = shortest_arr
    cdef Py_ssize_t[::1] col4row = col4row_arr
    cdef Py_ssize_t[::1] row4col = row4col_arr
    cdef Py_ssize_t[::1] path = path_arr
    cdef Py_ssize_t[::1] remaining = remaining_arr
    cdef unsigned char[::1] scanned_rows = scanned_rows_arr
    cdef unsigned char[::1] scanned_cols = scanned_cols_arr

    cdef Py_ssize_t cur_row, i, j, k, idx, sink, num_remaining, tmp
    cdef double min_val, lowest, r, total
    cdef double INF = np.inf

    for cur_row in range(n):
        for k in range(n):
            shortest[k] = INF
            remaining[k] = k
            scanned_rows[k] = 0
            scanned_cols[k] = 0
        num_remaining = n
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            scanned_rows[i] = 1
            idx = -1
            lowest = INF
            for k in range(num_remaining):
                j = remaining[k]
                r = (min_val + c[i, j] - u[i]) - v[j]
                if r < shortest[j]:
                    path[j] = i
                    shortest[j] = r
                if shortest[j] < lowest:
                    lowest = shortest[j]
                    idx = k
            if idx == -1 or lowest == INF:
                raise RuntimeError("assignment problem is infeasible")
            j = remaining[idx]
            min_val = lowest
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
            scanned_cols[j] = 1
            remaining[idx] = remaining[num_remaining - 1]
            num_remaining -= 1

        u[cur_row] += min_val
        for k in range(n):
            if scanned_rows[k] and k != cur_row:
                u[k] += min_val - shortest[col4row[k]]
        for k in range(n):
            if scanned_cols[k]:
                v[k] -= min_val - shortest[k]

        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            tmp = col4row[i]
            col4row[i] = j
            j = tmp
            if i == cur_row:
                break

    # numpy pairwise summation, matching the fallback bit for bit
    total = float(cost_arr[np.arange(n), col4row_arr].sum())
    return col4row_arr, total
