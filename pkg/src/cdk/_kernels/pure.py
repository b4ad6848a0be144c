"""Pure-Python interpreter for compiled expression programs."""
import math

import numpy as np

from .opcodes import ADD, CONST, COORD, COS, EXP, MUL, OUT, POW, SCALE, SIN


def run_program(ops, args, consts, points, ncomp, max_stack):
    """Evaluate the program at every row of ``points``.

    Returns an array of shape ``(len(points), ncomp)``.
    """
    ops = [int(o) for o in ops]
    args = [int(a) for a in args]
    consts = [float(c) for c in consts]
    pts = np.asarray(points, dtype=np.float64)
    out = np.empty((pts.shape[0], ncomp), dtype=np.float64)
    prog = list(zip(ops, args))
    sin, cos, exp = math.sin, math.cos, math.exp
    for row in range(pts.shape[0]):
        x = pts[row].tolist()
        stack = []
        push, pop = stack.append, stack.pop
        res = [0.0] * ncomp
        for op, arg in prog:
            if op == COORD:
                push(x[arg])
            elif op == CONST:
                push(consts[arg])
            elif op == ADD:
                s = 0.0
                for _ in range(arg):
                    s += pop()
                push(s)
            elif op == MUL:
                p = 1.0
                for _ in range(arg):
                    p *= pop()
                push(p)
            elif op == SCALE:
                stack[-1] *= consts[arg]
            elif op == POW:
                stack[-1] = stack[-1] ** arg
            elif op == SIN:
                stack[-1] = sin(stack[-1])
            elif op == COS:
                stack[-1] = cos(stack[-1])
            elif op == EXP:
                stack[-1] = exp(stack[-1])
            elif op == OUT:
                res[arg] = pop()
            else:
                raise ValueError(f"bad opcode {op}")
        out[row] = res
    return out
