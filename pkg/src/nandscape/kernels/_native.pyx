# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Native evaluation kernel on packed 64-bit words.

Each signal is a row of W = ceil(2**m / 64) words; bit p of the row is the
signal value on input pattern p. NAND runs word-parallel. Pooled table lookups
walk rows, assembling the k-bit table index from the input words. Bits beyond
2**m in NAND outputs are garbage and are masked off by the Python wrapper.
"""

import numpy as np

from libc.stdint cimport int32_t, uint64_t

cdef uint64_t ALL = <uint64_t>0xFFFFFFFFFFFFFFFF


cdef inline uint64_t _ext_word(int i, int w) nogil:
    # word w of external input i's pattern (bit p of pattern = bit i of p)
    if i == 0:
        return <uint64_t>0xAAAAAAAAAAAAAAAA
    elif i == 1:
        return <uint64_t>0xCCCCCCCCCCCCCCCC
    elif i == 2:
        return <uint64_t>0xF0F0F0F0F0F0F0F0
    elif i == 3:
        return <uint64_t>0xFF00FF00FF00FF00
    elif i == 4:
        return <uint64_t>0xFFFF0000FFFF0000
    elif i == 5:
        return <uint64_t>0xFFFFFFFF00000000
    return ALL if (w >> (i - 6)) & 1 else <uint64_t>0


def run_plan(int m, int n_slots,
             const int32_t[:, ::1] ops,
             const int32_t[::1] tbl_srcs,
             const int32_t[::1] tbl_in_arity,
             const int32_t[::1] tbl_out_arity,
             list tbl_words,
             const int32_t[::1] out_slots):
    cdef int n_rows = 1 << m
    cdef int W = (n_rows + 63) >> 6
    sig_np = np.zeros((n_slots, W), dtype=np.uint64)
    cdef uint64_t[:, ::1] sig = sig_np
    cdef const uint64_t[:, ::1] tw
    cdef int i, w, opi, kind, a, b, out, k, o, j, jj, p, s
    cdef uint64_t q, bit

    for i in range(m):
        for w in range(W):
            sig[i, w] = _ext_word(i, w)
    for w in range(W):
        sig[m + 1, w] = ALL

    cdef int n_ops = ops.shape[0]
    for opi in range(n_ops):
        kind = ops[opi, 0]
        a = ops[opi, 1]
        b = ops[opi, 2]
        out = ops[opi, 3]
        if kind == 0:
            for w in range(W):
                sig[out, w] = ~(sig[a, w] & sig[b, w])
        else:
            k = tbl_in_arity[a]
            o = tbl_out_arity[a]
            tw = tbl_words[a]
            for p in range(n_rows):
                q = 0
                for j in range(k):
                    s = tbl_srcs[b + j]
                    q |= ((sig[s, p >> 6] >> (p & 63)) & <uint64_t>1) << j
                for jj in range(o):
                    bit = (tw[jj, <Py_ssize_t>(q >> 6)] >> (q & 63)) & <uint64_t>1
                    sig[out + jj, p >> 6] |= bit << (p & 63)

    out_np = np.empty((out_slots.shape[0], W), dtype=np.uint64)
    cdef uint64_t[:, ::1] res = out_np
    for i in range(out_slots.shape[0]):
        s = out_slots[i]
        for w in range(W):
            res[i, w] = sig[s, w]
    return out_np
