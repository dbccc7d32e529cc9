"""Safe filter expressions over metric columns.

Used to pick which scored pairs go to human review, e.g.
``r2 < 0.8 and fcs == 1``. Supported: comparisons on the metric columns,
numeric literals, and/or/not, parentheses. A row whose referenced column is
absent (e.g. gs after a checker outage) never passes.
"""

from __future__ import annotations

import ast
from collections.abc import Callable, Mapping

ALLOWED_NAMES = frozenset({"fcs", "gs", "r1", "r2", "rn", "bs", "cosine"})


class FilterError(ValueError):
    pass


class _Absent:
    """Sentinel that fails every comparison."""


_ABSENT = _Absent()

_COMPARATORS = {
    ast.Lt: lambda a, b: a < b,
    ast.LtE: lambda a, b: a <= b,
    ast.Gt: lambda a, b: a > b,
    ast.GtE: lambda a, b: a >= b,
    ast.Eq: lambda a, b: a == b,
    ast.NotEq: lambda a, b: a != b,
}


def _eval(node: ast.AST, row: Mapping[str, float | None]) -> object:
    if isinstance(node, ast.Expression):
        return _eval(node.body, row)
    if isinstance(node, ast.BoolOp):
        values = (_eval(v, row) for v in node.values)
        if isinstance(node.op, ast.And):
            return all(v is True for v in values)
        return any(v is True for v in values)
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.Not):
            return _eval(node.operand, row) is not True
        if isinstance(node.op, ast.USub):
            operand = _eval(node.operand, row)
            if isinstance(operand, (int, float)):
                return -operand
        raise FilterError("only 'not' and numeric negation are allowed")
    if isinstance(node, ast.Compare):
        left = _eval(node.left, row)
        for op, comparator in zip(node.ops, node.comparators):
            right = _eval(comparator, row)
            if left is _ABSENT or right is _ABSENT:
                return False
            fn = _COMPARATORS.get(type(op))
            if fn is None:
                raise FilterError(f"unsupported comparison {type(op).__name__}")
            if not fn(left, right):
                return False
            left = right
        return True
    if isinstance(node, ast.Name):
        if node.id not in ALLOWED_NAMES:
            raise FilterError(
                f"unknown column {node.id!r}; expected one of {sorted(ALLOWED_NAMES)}"
            )
        value = row.get(node.id)
        return _ABSENT if value is None else value
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        raise FilterError(f"unsupported literal {node.value!r}")
    raise FilterError(f"unsupported syntax: {type(node).__name__}")


def compile_filter(expression: str) -> Callable[[Mapping[str, float | None]], bool]:
    """Parse once, evaluate per row. Raises FilterError on invalid syntax."""
    try:
        tree = ast.parse(expression, mode="eval")
    except SyntaxError as exc:
        raise FilterError(f"invalid filter expression: {exc.msg}") from exc

    # Validate eagerly so bad expressions fail at configuration time.
    _eval(tree, {name: 0.0 for name in ALLOWED_NAMES})

    def predicate(row: Mapping[str, float | None]) -> bool:
        return _eval(tree, row) is True

    return predicate
