"""Tiny arithmetic expression grammar shared by scenario files, atlas files
and CLI coordinate arguments.

Supported: + - * / ^ (also **), unary minus, numeric literals, `pi` and `e`,
a whitelist of elementary functions, and caller-declared variable names.
Expressions are parsed with :mod:`ast` and evaluated by a recursive walker;
nothing outside the whitelist can execute.
"""

from __future__ import annotations

import ast
import math
from typing import Callable, Mapping, Sequence

from .errors import ConstructionError

_FUNCTIONS: Mapping[str, Callable[[float], float]] = {
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sqrt": math.sqrt,
    "log": math.log,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "asinh": math.asinh,
    "atan": math.atan,
    "abs": abs,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def _evaluate(node: ast.AST, env: Mapping[str, float]) -> float:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, env)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)):
            return float(node.value)
        raise ConstructionError(f"non-numeric literal {node.value!r}")
    if isinstance(node, ast.Name):
        if node.id in env:
            return float(env[node.id])
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        raise ConstructionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _evaluate(node.operand, env)
        return v if isinstance(node.op, ast.UAdd) else -v
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ConstructionError("only whitelisted functions are allowed")
        if node.keywords or len(node.args) != 1:
            raise ConstructionError("functions take exactly one positional argument")
        return _FUNCTIONS[node.func.id](_evaluate(node.args[0], env))
    raise ConstructionError(f"unsupported syntax: {ast.dump(node)}")


def _validate(node: ast.AST, names: Sequence[str]) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body, names)
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConstructionError(f"non-numeric literal {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id not in names and node.id not in _CONSTANTS:
            raise ConstructionError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _validate(node.left, names)
        _validate(node.right, names)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _validate(node.operand, names)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ConstructionError("only whitelisted functions are allowed")
        if node.keywords or len(node.args) != 1:
            raise ConstructionError("functions take exactly one positional argument")
        _validate(node.args[0], names)
    else:
        raise ConstructionError(f"unsupported syntax: {ast.dump(node)}")


def compile_expression(text: str, variables: Sequence[str]) -> Callable[..., float]:
    """Compile ``text`` into a function of the given positional variables."""
    source = text.strip().replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConstructionError(f"cannot parse expression {text!r}: {exc}") from exc
    names = tuple(variables)
    _validate(tree, names)

    def fn(*args: float) -> float:
        if len(args) != len(names):
            raise ConstructionError(f"expression expects {len(names)} arguments, got {len(args)}")
        return _evaluate(tree, dict(zip(names, args)))

    fn.__name__ = "expr"
    fn.source = text.strip()  # type: ignore[attr-defined]
    return fn


def parse_number(text: str) -> float:
    """Evaluate a constant expression such as ``pi/2`` or ``-1.5e-3``."""
    return compile_expression(text, ())()


def parse_tuple(text: str) -> tuple[float, ...]:
    """Comma-separated constant expressions, e.g. ``pi/2, 0, 1``."""
    parts = [chunk for chunk in text.split(",") if chunk.strip()]
    return tuple(parse_number(chunk) for chunk in parts)
