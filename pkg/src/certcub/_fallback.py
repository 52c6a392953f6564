"""Pure numpy implementations of the compiled kernels in ``_speedups``."""

import numpy as np

from ._program import (
    OP_ABS, OP_ADD, OP_CONST, OP_COS, OP_DIV, OP_EXP, OP_LOG, OP_MUL, OP_NEG,
    OP_POW, OP_SIN, OP_SQRT, OP_SUB, OP_X, OP_Y,
)

NAME = "python"

_UNARY = {
    OP_NEG: np.negative,
    OP_SIN: np.sin,
    OP_COS: np.cos,
    OP_EXP: np.exp,
    OP_ABS: np.abs,
}


def _first(mask):
    return int(np.flatnonzero(mask)[0])


def eval_program(code, consts, depth, xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    stack = []
    # track the earliest failing point across instructions so the reported
    # index matches the point-major compiled VM
    err, where = 0, xs.shape[0]
    alive = np.ones(xs.shape[0], dtype=bool)

    def fail(code_, mask):
        nonlocal err, where
        mask = mask & alive
        if mask.any():
            k = _first(mask)
            if k < where:
                err, where = code_, k
            alive[mask] = False

    with np.errstate(all="ignore"):
        for pc in range(0, len(code), 2):
            op = int(code[pc])
            if op == OP_CONST:
                stack.append(np.full(xs.shape, consts[int(code[pc + 1])]))
            elif op == OP_X:
                stack.append(xs.copy())
            elif op == OP_Y:
                stack.append(ys.copy())
            elif op in _UNARY:
                stack[-1] = _UNARY[op](stack[-1])
            elif op == OP_LOG:
                u = stack[-1]
                fail(1, ~(u > 0))
                stack[-1] = np.log(np.where(u > 0, u, 1.0))
            elif op == OP_SQRT:
                u = stack[-1]
                fail(4, u < 0)
                stack[-1] = np.sqrt(np.where(u < 0, 0.0, u))
            else:
                v = stack.pop()
                u = stack[-1]
                if op == OP_ADD:
                    r = u + v
                elif op == OP_SUB:
                    r = u - v
                elif op == OP_MUL:
                    r = u * v
                elif op == OP_DIV:
                    fail(2, v == 0)
                    r = u / np.where(v == 0, 1.0, v)
                elif op == OP_POW:
                    fail(3, (u == 0) & (v < 0))
                    fail(5, (u < 0) & (v != np.floor(v)))
                    r = np.power(u, v)
                else:
                    raise ValueError(f"unknown opcode {op}")
                stack[-1] = r
    if err:
        return np.empty(xs.shape[0]), err, where
    return stack[0] if stack else np.empty(0), 0, -1


def weighted_sum_2d(vals, wt, ws):
    return float(np.asarray(wt) @ (np.asarray(vals) @ np.asarray(ws)))


def pairwise_sum(x):
    x = [float(v) for v in x]

    def rec(lo, hi):
        if hi - lo == 1:
            return x[lo]
        mid = lo + (hi - lo) // 2
        return rec(lo, mid) + rec(mid, hi)

    return rec(0, len(x)) if x else 0.0
