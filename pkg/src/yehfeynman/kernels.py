"""Kernel presets and a small expression language for kernels and atoms.

Expressions are ordinary arithmetic over the variables ``s`` and ``t``; the
extents ``S`` and ``T`` and the constants ``pi`` and ``e`` are also in scope.
Both ``**`` and ``^`` denote powers. Allowed functions: sin, cos, tan, exp,
log, sqrt, abs, sinh, cosh, tanh.
"""
from __future__ import annotations

import ast
import operator

import numpy as np

from .grid import GridFunction, GridSpec, sample_function

__all__ = ["parse_expression", "expression_function", "PRESETS", "preset", "resolve_kernels"]

_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_expression(text: str) -> ast.Expression:
    """Parse and validate an expression; raise ValueError on anything unsupported."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load, ast.operator, ast.unaryop)):
            continue
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            continue
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            continue
        if isinstance(node, ast.Name) and node.id in {"s", "t", "S", "T", "pi", "e"} | set(_FUNCS):
            continue
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            continue
        raise ValueError(f"unsupported syntax in expression {text!r}: {ast.dump(node)}")
    return tree


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise ValueError(f"{node.id!r} is a function, not a value")
        return env[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_eval(node.operand, env))
    if isinstance(node, ast.Call):
        return _FUNCS[node.func.id](_eval(node.args[0], env))
    raise ValueError(f"unsupported node {ast.dump(node)}")  # unreachable after validation


def expression_function(text: str, S: float = 1.0, T: float = 1.0):
    """Compile ``text`` to a vectorised callable ``f(s, t)``."""
    tree = parse_expression(text)

    def fn(s, t):
        env = {"s": s, "t": t, "S": S, "T": T, "pi": np.pi, "e": np.e}
        return _eval(tree, env)

    fn.__name__ = f"expr[{text}]"
    return fn


# Expression sources for the named kernel families. Order matters for
# "k1k2-pair": (k1, k2, h) with k1 * k2 == h**2.
PRESETS: dict[str, tuple[str, ...]] = {
    "one": ("1",),
    "H4": (
        "sin(s)^2 * cos(t)",
        "sin(s) * cos(s) * cos(t)",
        "sin(s) * sin(t) * cos(t)",
        "sin(s) * cos(t)^2",
    ),
    "trig-pair": (
        "sin(2*pi*s/T) * sin(2*pi*t/T) - cos(2*pi*s/T) * cos(2*pi*t/T)",
        "sin(2*pi*s/T) * cos(2*pi*t/T) + cos(2*pi*s/T) * sin(2*pi*t/T)",
    ),
    "k1k2-pair": (
        "4 * sin(2*pi*s/T)^2 * sin(2*pi*t/T)^2",
        "4 * cos(2*pi*s/T)^2 * cos(2*pi*t/T)^2",
        "sin(4*pi*s/T) * sin(4*pi*t/T)",
    ),
}


def preset(name: str, grid: GridSpec) -> list[GridFunction]:
    """Sample the kernels of preset ``name`` on ``grid``."""
    try:
        sources = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown kernel preset {name!r}; known: {sorted(PRESETS)}") from None
    return [sample_function(expression_function(src, grid.S, grid.T), grid) for src in sources]


def resolve_kernels(entries, grid: GridSpec) -> list[GridFunction]:
    """Expand a list of preset names and/or expressions into grid functions."""
    if isinstance(entries, str):
        entries = [entries]
    out = []
    for entry in entries:
        if entry in PRESETS:
            out.extend(preset(entry, grid))
        else:
            out.append(sample_function(expression_function(entry, grid.S, grid.T), grid))
    return out
