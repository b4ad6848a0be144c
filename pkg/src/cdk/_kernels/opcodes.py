"""Stack-machine opcodes shared by both kernels."""

CONST = 0  # push consts[arg]
COORD = 1  # push x[arg]
ADD = 2    # pop arg values, push their sum
MUL = 3    # pop arg values, push their product
SCALE = 4  # top *= consts[arg]
POW = 5    # top = top ** arg
SIN = 6
COS = 7
EXP = 8
OUT = 9    # pop into output column arg
