"""Closed-form surface definitions: parsing, evaluation and Taylor jets."""
import logging
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from models.errors import (
    ExpressionSyntaxError,
    JetDomainError,
    NotAnImmersion,
    UnknownIdentifierError,
)
from models.geometry import Immersion, ImmersionJet
from models.models import Backend
from services import jet as jets
from services.jet import Jet
from services.oracle import fd_jet

logger = logging.getLogger(__name__)

COORDINATES = ("x1", "x2", "x3", "x4")
SURFACE_PARAMETERS = ("u1", "u2")
FUNCTIONS = {
    "sqrt": jets.sqrt,
    "log": jets.log,
    "exp": jets.exp,
    "sin": jets.sin,
    "cos": jets.cos,
}
CONSTANTS = {"pi": math.pi}


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    name: str
    argument: "Expression"


Expression = Union[Const, Param, Neg, BinOp, Call]


# tokens

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)

_BINDING = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BINDING = 25


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text):
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN.match(stripped, position)
        if match is None or match.end() == position:
            offset = len(stripped) - len(stripped[position:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character '{stripped[offset]}'", offset)
        kind = match.lastgroup
        start = match.start(kind)
        yield _Token(kind, match.group(kind), start)
        position = match.end()
    yield _Token("end", "", len(stripped))


class _Parser:
    """Top-down operator precedence parser over the token stream."""

    def __init__(self, text, parameters):
        self.tokens = list(_tokenize(text))
        self.index = 0
        self.parameters = parameters

    @property
    def token(self):
        return self.tokens[self.index]

    def advance(self):
        current = self.tokens[self.index]
        self.index += 1
        return current

    def lbp(self, token):
        if token.kind == "op":
            return _BINDING.get(token.text, 0)
        return 0

    def expression(self, rbp=0):
        left = self.nud(self.advance())
        while rbp < self.lbp(self.token):
            left = self.led(self.advance(), left)
        return left

    def expect(self, text):
        if self.token.kind != "op" or self.token.text != text:
            found = self.token.text or "end of input"
            raise ExpressionSyntaxError(f"expected '{text}', found {found!r}", self.token.position)
        return self.advance()

    def nud(self, token):
        if token.kind == "number":
            value = float(token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError("number out of range", token.position)
            return Const(value)
        if token.kind == "name":
            if token.text in FUNCTIONS:
                self.expect("(")
                argument = self.expression()
                self.expect(")")
                return Call(token.text, argument)
            if token.text in CONSTANTS:
                return Const(CONSTANTS[token.text])
            if token.text in self.parameters:
                return Param(token.text)
            raise UnknownIdentifierError(token.text, token.position)
        if token.kind == "op" and token.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if token.kind == "op" and token.text == "-":
            return Neg(self.expression(_UNARY_BINDING))
        if token.kind == "op" and token.text == "+":
            return self.expression(_UNARY_BINDING)
        found = token.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected {found!r}", token.position)

    def led(self, token, left):
        if token.text == "^":
            # right associative
            return BinOp("^", left, self.expression(_BINDING["^"] - 1))
        return BinOp(token.text, left, self.expression(_BINDING[token.text]))


def parse(text, parameters=COORDINATES + SURFACE_PARAMETERS):
    parser = _Parser(text, tuple(parameters))
    tree = parser.expression()
    if parser.token.kind != "end":
        raise ExpressionSyntaxError(f"unexpected {parser.token.text!r}", parser.token.position)
    return tree


def to_text(node):
    """Canonical, fully parenthesized rendering; parse(to_text(e)) == e."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    return f"{node.name}({to_text(node.argument)})"


def identifiers(node):
    if isinstance(node, Param):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, Neg):
        return identifiers(node.operand)
    if isinstance(node, BinOp):
        return identifiers(node.left) | identifiers(node.right)
    return identifiers(node.argument)


def _apply(op, left, right):
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if not isinstance(right, Jet):
            return left * jets.reciprocal(right)
        return left / right
    if isinstance(left, Jet) or isinstance(right, Jet):
        return left ** right
    if left < 0 and not float(right).is_integer():
        raise JetDomainError(f"non-integer power of negative value {left!r}")
    if left == 0 and right < 0:
        raise JetDomainError("division by zero")
    return float(left) ** float(right)


def evaluate(node, env, point=None):
    """Evaluate over floats or jets; domain failures name the offending node."""
    try:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Param):
            return env[node.name]
        if isinstance(node, Neg):
            return -evaluate(node.operand, env, point)
        if isinstance(node, BinOp):
            return _apply(node.op, evaluate(node.left, env, point), evaluate(node.right, env, point))
        return FUNCTIONS[node.name](evaluate(node.argument, env, point))
    except JetDomainError as e:
        if getattr(e, "located", False):
            raise
        located = JetDomainError(f"{e} in {to_text(node)} at {point}")
        located.located = True
        raise located from e


def jet3(e, p, parameters=SURFACE_PARAMETERS, order=3):
    env = {name: Jet.variable(i, float(p[i]), order) for i, name in enumerate(parameters)}
    result = jets.lift(evaluate(e, env, tuple(p)), order)
    if not result.isfinite():
        raise JetDomainError(f"non-finite jet of {to_text(e)} at {tuple(p)}")
    return result


def value_at(e, p, parameters=SURFACE_PARAMETERS):
    return float(evaluate(e, dict(zip(parameters, (float(x) for x in p))), tuple(p)))


# immersions

def _bind(text, parameters):
    tree = parse(text)
    unknown = identifiers(tree) - set(parameters)
    if unknown:
        raise UnknownIdentifierError(sorted(unknown)[0])
    return tree


def parametric_immersion(coordinates, domain):
    if len(coordinates) != 4:
        raise ValueError("a parametric immersion needs four coordinate expressions")
    trees = tuple(_bind(text, SURFACE_PARAMETERS) for text in coordinates)
    return Immersion(trees, SURFACE_PARAMETERS, tuple(tuple(map(float, d)) for d in domain))


def graph_immersion(free, dependent, domain):
    """Graph over two ambient coordinates; the other two are expressions in them."""
    free = tuple(free)
    if len(free) != 2 or any(name not in COORDINATES for name in free) or free[0] == free[1]:
        raise ValueError(f"graph form needs two distinct free coordinates, got {free!r}")
    missing = [name for name in COORDINATES if name not in free and name not in dependent]
    if missing:
        raise ValueError(f"graph form is missing expressions for {missing}")
    trees = tuple(Param(name) if name in free else _bind(dependent[name], free) for name in COORDINATES)
    return Immersion(trees, free, tuple(tuple(map(float, d)) for d in domain))


def bind_field(texts, immersion):
    """Parse a four-component vector field over the immersion's parameters."""
    if len(texts) != 4:
        raise ValueError("a vector field needs four component expressions")
    return tuple(_bind(text, immersion.parameters) for text in texts)


def bind_scalar(text, immersion):
    return _bind(text, immersion.parameters)


def field_jets(trees, p, parameters, backend=Backend.jet, fd_step=1e-2, order=3):
    if backend == Backend.fd:
        return fd_jet(lambda q: np.array([value_at(t, q, parameters) for t in trees]), p, fd_step)
    return tuple(jet3(t, p, parameters, order) for t in trees)


def immersion_point(M, p):
    return np.array([value_at(t, p, M.parameters) for t in M.coordinates])


def immersion_jet(M, p, backend=Backend.jet, fd_step=1e-2, order=3):
    p = tuple(float(x) for x in p)
    coordinates = field_jets(M.coordinates, p, M.parameters, backend, fd_step, order)
    result = ImmersionJet(p, tuple(coordinates))
    if order >= 1:
        tangents = np.array(result.tangents())
        singular = np.linalg.svd(tangents, compute_uv=False)
        if singular[-1] <= 1e-12 * max(singular[0], 1.0):
            raise NotAnImmersion(f"not an immersion at {p}")
    logger.debug("immersion jet at %s via %s backend", p, Backend(backend).value)
    return result
