# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled interpreter for expression programs (see opcodes.py)."""
import numpy as np

from libc.math cimport sin, cos, exp, pow
from libc.stdlib cimport malloc, free

cdef enum:
    CONST = 0
    COORD = 1
    ADD = 2
    MUL = 3
    SCALE = 4
    POW = 5
    SIN = 6
    COS = 7
    EXP = 8
    OUT = 9


def run_program(ops, args, consts, points, int ncomp, int max_stack):
    cdef const int[::1] op_v = np.ascontiguousarray(ops, dtype=np.intc)
    cdef const int[::1] arg_v = np.ascontiguousarray(args, dtype=np.intc)
    cdef const double[::1] c_v = np.ascontiguousarray(consts, dtype=np.float64)
    cdef const double[:, ::1] x = np.ascontiguousarray(points, dtype=np.float64)
    result = np.empty((x.shape[0], ncomp), dtype=np.float64)
    cdef double[:, ::1] out = result
    cdef Py_ssize_t n_ops = op_v.shape[0]
    cdef Py_ssize_t row, i
    cdef int sp, op, arg, k
    cdef double acc
    cdef double* stack = <double*> malloc((max_stack + 1) * sizeof(double))
    if stack == NULL:
        raise MemoryError()
    try:
        with nogil:
            for row in range(x.shape[0]):
                sp = 0
                for i in range(n_ops):
                    op = op_v[i]
                    arg = arg_v[i]
                    if op == COORD:
                        stack[sp] = x[row, arg]
                        sp += 1
                    elif op == CONST:
                        stack[sp] = c_v[arg]
                        sp += 1
                    elif op == ADD:
                        acc = 0.0
                        for k in range(arg):
                            sp -= 1
                            acc += stack[sp]
                        stack[sp] = acc
                        sp += 1
                    elif op == MUL:
                        acc = 1.0
                        for k in range(arg):
                            sp -= 1
                            acc *= stack[sp]
                        stack[sp] = acc
                        sp += 1
                    elif op == SCALE:
                        stack[sp - 1] *= c_v[arg]
                    elif op == POW:
                        stack[sp - 1] = pow(stack[sp - 1], arg)
                    elif op == SIN:
                        stack[sp - 1] = sin(stack[sp - 1])
                    elif op == COS:
                        stack[sp - 1] = cos(stack[sp - 1])
                    elif op == EXP:
                        stack[sp - 1] = exp(stack[sp - 1])
                    elif op == OUT:
                        sp -= 1
                        out[row, arg] = stack[sp]
    finally:
        free(stack)
    return result
