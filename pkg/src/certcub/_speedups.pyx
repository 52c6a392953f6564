# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: expression VM and pairwise summation."""

import numpy as np
from libc.math cimport sin, cos, exp, log, sqrt, fabs, pow, floor

# opcodes; keep in sync with certcub._program
cdef enum:
    OP_CONST = 0
    OP_X = 1
    OP_Y = 2
    OP_NEG = 3
    OP_SIN = 4
    OP_COS = 5
    OP_EXP = 6
    OP_LOG = 7
    OP_SQRT = 8
    OP_ABS = 9
    OP_ADD = 10
    OP_SUB = 11
    OP_MUL = 12
    OP_DIV = 13
    OP_POW = 14

NAME = "cython"


BLOCK = 256


cdef inline void _fail(int* errs, Py_ssize_t i, int code) nogil:
    if errs[i] == 0:
        errs[i] = code


def eval_program(const long long[:] code, const double[:] consts, int depth,
                 const double[:] xs, const double[:] ys):
    """Run a postfix program at every (xs[k], ys[k]).

    Points are processed in blocks, one instruction at a time across the
    block. Returns ``(out, err, where)``; ``err`` is 0 on success, otherwise
    the first domain-error code hit at the lowest failing point index
    ``where``.
    """
    cdef Py_ssize_t npts = xs.shape[0]
    cdef Py_ssize_t ncode = code.shape[0]
    cdef Py_ssize_t block = BLOCK
    out_arr = np.empty(npts, dtype=np.float64)
    cdef double[:] out = out_arr
    stack_arr = np.empty((max(depth, 1), block), dtype=np.float64)
    cdef double[:, ::1] st = stack_arr
    errs_arr = np.zeros(block, dtype=np.intc)
    cdef int[::1] errs = errs_arr
    cdef Py_ssize_t k0, n, i, pc
    cdef int sp, any_err
    cdef long long op
    cdef double u, v
    cdef double* a
    cdef double* b
    for k0 in range(0, npts, block):
        n = min(block, npts - k0)
        sp = 0
        any_err = 0
        pc = 0
        while pc < ncode:
            op = code[pc]
            if op == OP_CONST:
                u = consts[code[pc + 1]]
                a = &st[sp, 0]
                for i in range(n):
                    a[i] = u
                sp += 1
            elif op == OP_X:
                a = &st[sp, 0]
                for i in range(n):
                    a[i] = xs[k0 + i]
                sp += 1
            elif op == OP_Y:
                a = &st[sp, 0]
                for i in range(n):
                    a[i] = ys[k0 + i]
                sp += 1
            elif op <= OP_ABS:
                a = &st[sp - 1, 0]
                if op == OP_NEG:
                    for i in range(n):
                        a[i] = -a[i]
                elif op == OP_SIN:
                    for i in range(n):
                        a[i] = sin(a[i])
                elif op == OP_COS:
                    for i in range(n):
                        a[i] = cos(a[i])
                elif op == OP_EXP:
                    for i in range(n):
                        a[i] = exp(a[i])
                elif op == OP_LOG:
                    for i in range(n):
                        if not a[i] > 0:
                            _fail(&errs[0], i, 1)
                            any_err = 1
                            a[i] = 0.0
                        else:
                            a[i] = log(a[i])
                elif op == OP_SQRT:
                    for i in range(n):
                        if a[i] < 0:
                            _fail(&errs[0], i, 4)
                            any_err = 1
                            a[i] = 0.0
                        else:
                            a[i] = sqrt(a[i])
                else:
                    for i in range(n):
                        a[i] = fabs(a[i])
            else:
                a = &st[sp - 2, 0]
                b = &st[sp - 1, 0]
                sp -= 1
                if op == OP_ADD:
                    for i in range(n):
                        a[i] = a[i] + b[i]
                elif op == OP_SUB:
                    for i in range(n):
                        a[i] = a[i] - b[i]
                elif op == OP_MUL:
                    for i in range(n):
                        a[i] = a[i] * b[i]
                elif op == OP_DIV:
                    for i in range(n):
                        if b[i] == 0:
                            _fail(&errs[0], i, 2)
                            any_err = 1
                            a[i] = 0.0
                        else:
                            a[i] = a[i] / b[i]
                else:
                    for i in range(n):
                        u = a[i]
                        v = b[i]
                        if u == 0 and v < 0:
                            _fail(&errs[0], i, 3)
                            any_err = 1
                            a[i] = 0.0
                        elif u < 0 and v != floor(v):
                            _fail(&errs[0], i, 5)
                            any_err = 1
                            a[i] = 0.0
                        elif v == 2.0:
                            a[i] = u * u
                        else:
                            a[i] = pow(u, v)
            pc += 2
        if any_err:
            for i in range(n):
                if errs[i]:
                    return out_arr, errs[i], k0 + i
        a = &st[0, 0]
        for i in range(n):
            out[k0 + i] = a[i]
    return out_arr, 0, -1


cdef double _pairwise(const double[:] x, Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t mid
    if hi - lo == 1:
        return x[lo]
    mid = lo + (hi - lo) // 2
    return _pairwise(x, lo, mid) + _pairwise(x, mid, hi)


def pairwise_sum(const double[:] x):
    """Fixed-shape binary tree sum; bit-identical to the pure-Python fallback."""
    if x.shape[0] == 0:
        return 0.0
    return _pairwise(x, 0, x.shape[0])
