"""Arithmetic expression language for user-defined breach probability functions.

Grammar (precedence low to high, binaries left-associative unless noted):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom (('^' | '**') unary)?        # right-associative
    atom   := NUMBER | IDENT | '(' expr ')'

Only the variables ``z``, ``v``, ``L``, ``L_i`` and ``alpha`` may appear.
Division and power nodes keep their source position so runtime failures can
point back at the offending operator.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .errors import SecplannerError

ALLOWED_VARIABLES = ("z", "v", "L", "L_i", "alpha")

MAX_SOURCE_LENGTH = 4096


class BpfSyntaxError(SecplannerError):
    code = "syntax_error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})", details={"position": position})
        self.position = position


class UnknownIdentifier(SecplannerError):
    code = "unknown_identifier"

    def __init__(self, name: str, position: int):
        super().__init__(
            f"unknown identifier {name!r} (at position {position}); "
            f"allowed variables: {', '.join(ALLOWED_VARIABLES)}",
            details={"name": name, "position": position},
        )
        self.name = name
        self.position = position


class DivisionByZero(SecplannerError):
    code = "division_by_zero"

    def __init__(self, position: int, bindings: Mapping[str, float]):
        witness = {k: float(x) for k, x in bindings.items()}
        super().__init__(
            f"division by zero (operator at position {position})",
            details={"position": position, "bindings": witness},
        )
        self.position = position
        self.bindings = witness


class NonFiniteResult(SecplannerError):
    code = "non_finite_result"

    def __init__(self, position: int, bindings: Mapping[str, float]):
        witness = {k: float(x) for k, x in bindings.items()}
        super().__init__(
            f"expression produced a non-finite value (operator at position {position})",
            details={"position": position, "bindings": witness},
        )
        self.position = position
        self.bindings = witness


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"
    pos: int  # source position of the operator


Node = Union[Num, Var, Neg, BinOp]

_TOKEN_RE = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | op | end
    text: str
    pos: int


def _tokenize(source: str) -> Iterator[Token]:
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise BpfSyntaxError(f"unexpected character {source[pos]!r}", pos)
        assert match.lastgroup is not None
        yield Token(match.lastgroup, match.group(), pos)
        pos = match.end()
    yield Token("end", "", n)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = list(_tokenize(source))
        self.index = 0
        self.variables: set[str] = set()

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect_op(self, text: str) -> Token:
        token = self.current
        if token.kind != "op" or token.text != text:
            raise BpfSyntaxError(f"expected {text!r}", token.pos)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "end":
            raise BpfSyntaxError(f"unexpected {self.current.text!r}", self.current.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance()
            node = BinOp(op.text, node, self.term(), op.pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance()
            node = BinOp(op.text, node, self.unary(), op.pos)
        return node

    def unary(self) -> Node:
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.current.kind == "op" and self.current.text in ("^", "**"):
            op = self.advance()
            # recurse through unary so exponents may carry a sign: 2^-3
            return BinOp("^", base, self.unary(), op.pos)
        return base

    def atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Num(float(token.text))
        if token.kind == "ident":
            self.advance()
            if token.text not in ALLOWED_VARIABLES:
                raise UnknownIdentifier(token.text, token.pos)
            self.variables.add(token.text)
            return Var(token.text)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if token.kind == "end":
            raise BpfSyntaxError("unexpected end of expression", token.pos)
        raise BpfSyntaxError(f"unexpected {token.text!r}", token.pos)


@dataclass(frozen=True)
class BpfExpression:
    """A parsed expression over the allowed breach-probability variables."""

    source: str
    root: Node
    variables: frozenset[str] = field(default_factory=frozenset)

    def evaluate(self, bindings: Mapping[str, float]) -> float:
        """Evaluate with IEEE float arithmetic; the result is finite or an error."""
        missing = self.variables - bindings.keys()
        if missing:
            raise ValueError(f"missing bindings for: {', '.join(sorted(missing))}")
        return _eval(self.root, bindings)

    def to_source(self) -> str:
        """Serialize back to parseable text (fully parenthesized)."""
        return _serialize(self.root)

    def __str__(self) -> str:
        return self.source


def parse_bpf(source: str) -> BpfExpression:
    """Parse expression text into an immutable AST."""
    if not source or not source.strip():
        raise BpfSyntaxError("empty expression", 0)
    if len(source) > MAX_SOURCE_LENGTH:
        raise BpfSyntaxError(f"expression longer than {MAX_SOURCE_LENGTH} characters", MAX_SOURCE_LENGTH)
    parser = _Parser(source)
    root = parser.parse()
    return BpfExpression(source=source, root=root, variables=frozenset(parser.variables))


def eval_expression(expr: BpfExpression, bindings: Mapping[str, float]) -> float:
    return expr.evaluate(bindings)


def _eval(node: Node, bindings: Mapping[str, float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return float(bindings[node.name])
    if isinstance(node, Neg):
        return -_eval(node.operand, bindings)
    left = _eval(node.left, bindings)
    right = _eval(node.right, bindings)
    if node.op == "+":
        result = left + right
    elif node.op == "-":
        result = left - right
    elif node.op == "*":
        result = left * right
    elif node.op == "/":
        if right == 0.0:
            raise DivisionByZero(node.pos, bindings)
        result = left / right
    else:  # ^
        try:
            result = left**right
        except ZeroDivisionError:
            raise DivisionByZero(node.pos, bindings) from None
        except (OverflowError, ValueError):
            raise NonFiniteResult(node.pos, bindings) from None
        if isinstance(result, complex):
            raise NonFiniteResult(node.pos, bindings)
    if not math.isfinite(result):
        raise NonFiniteResult(node.pos, bindings)
    return result


def _serialize(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_serialize(node.operand)})"
    return f"({_serialize(node.left)} {node.op} {_serialize(node.right)})"
