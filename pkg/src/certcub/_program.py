"""Opcode table for compiled expression programs (shared by both backends)."""

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

UNARY_OPS = {
    "neg": OP_NEG,
    "sin": OP_SIN,
    "cos": OP_COS,
    "exp": OP_EXP,
    "log": OP_LOG,
    "sqrt": OP_SQRT,
    "abs": OP_ABS,
}
BINARY_OPS = {"add": OP_ADD, "sub": OP_SUB, "mul": OP_MUL, "div": OP_DIV, "pow": OP_POW}

ERROR_MESSAGES = {
    1: "log of non-positive value",
    2: "division by zero",
    3: "zero raised to a negative power",
    4: "sqrt of negative value",
    5: "negative base raised to a non-integer power",
}
