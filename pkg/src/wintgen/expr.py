"""Scalar expressions of (u, v) and their exact 2-jets.

Grammar (EBNF)::

    expression = term , { ( "+" | "-" ) , term } ;
    term       = unary , { ( "*" | "/" ) , unary } ;
    unary      = ( "-" | "+" ) , unary | power ;
    power      = atom , [ ( "^" | "**" ) , unary ] ;
    atom       = number | "u" | "v" | "pi" | "e"
               | function , "(" , expression , ")"
               | "(" , expression , ")" ;
    function   = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "abs" ;
    number     = digits , [ "." , [ digits ] ] , [ exponent ]
               | "." , digits , [ exponent ] ;
    exponent   = ( "e" | "E" ) , [ "+" | "-" ] , digits ;

Binary ``+ - * /`` associate to the left; ``^`` associates to the right
(``2^3^2 == 2^(3^2)``) and binds tighter than unary minus, so ``-u^2`` is
``-(u^2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("u", "v")


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"literal must be finite and non-negative, got {self.value!r}")


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


Expression = Union[Num, Const, Var, Neg, Call, BinOp]


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>\*\*|[-+*/^()])"
)
_SPACE = re.compile(r"\s+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _offset(self, index):
        return len(self.text[:index].encode("utf-8"))

    def _tokenize(self, text):
        tokens = []
        i = 0
        while i < len(text):
            m = _SPACE.match(text, i)
            if m:
                i = m.end()
                continue
            m = _TOKEN.match(text, i)
            if not m:
                raise ParseError(f"unexpected character {text[i]!r}", self._offset(i))
            kind = m.lastgroup
            value = m.group()
            if kind == "op" and value == "**":
                value = "^"
            tokens.append((kind, value, self._offset(i)))
            i = m.end()
        tokens.append(("end", "", self._offset(len(text))))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        kind, text, offset = self.peek()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {found}", offset)
        return self.advance()

    def parse(self):
        node = self.expression()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", offset)
        return node

    def expression(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, offset = self.advance()
        if kind == "num":
            try:
                return Num(float(text))
            except ValueError:
                raise ParseError(f"literal {text!r} out of range", offset) from None
        if kind == "name":
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expression()
                self.expect(")")
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", offset)
        if kind == "op" and text == "(":
            node = self.expression()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", offset)


def parse(text: str) -> Expression:
    """Parse ``text`` into an expression tree.

    Raises :class:`ParseError` (with a byte offset) on malformed input or
    unknown identifiers.
    """
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY_PREC = 3
_ATOM_PREC = 5


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _UNARY_PREC
    return _ATOM_PREC


def _wrap(node, needed):
    s = to_string(node)
    return f"({s})" if _prec(node) < needed else s


def _format_number(x: float) -> str:
    # shortest round-trip repr; integral values lose the trailing ".0"
    if x.is_integer() and x < 1e16:
        return str(int(x))
    return repr(x)


def to_string(node: Expression) -> str:
    """Render with the minimal parentheses that re-parse to the same tree."""
    if isinstance(node, Num):
        return _format_number(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _UNARY_PREC)
    if node.op == "^":
        return f"{_wrap(node.left, _ATOM_PREC)}^{_wrap(node.right, _UNARY_PREC)}"
    p = _PREC[node.op]
    sep = f" {node.op} " if p == 1 else node.op
    return f"{_wrap(node.left, p)}{sep}{_wrap(node.right, p + 1)}"


def variables(node: Expression) -> set:
    """Names of the free variables in ``node``."""
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Num, Const)):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables(node.operand if isinstance(node, Neg) else node.arg)
    return variables(node.left) | variables(node.right)


# --------------------------------------------------------------------------
# Jets
# --------------------------------------------------------------------------

class ScalarJet2:
    """Value and all partial derivatives of order <= 2 of a scalar in (u, v)."""

    __slots__ = ("value", "du", "dv", "duu", "duv", "dvv")

    def __init__(self, value, du=0.0, dv=0.0, duu=0.0, duv=0.0, dvv=0.0):
        self.value = value
        self.du = du
        self.dv = dv
        self.duu = duu
        self.duv = duv
        self.dvv = dvv

    @classmethod
    def constant(cls, c):
        return cls(float(c))

    @classmethod
    def variable(cls, name, at):
        if name == "u":
            return cls(float(at), 1.0, 0.0)
        return cls(float(at), 0.0, 1.0)

    def astuple(self):
        return (self.value, self.du, self.dv, self.duu, self.duv, self.dvv)

    def is_constant(self):
        return self.du == 0 and self.dv == 0 and self.duu == 0 and self.duv == 0 and self.dvv == 0

    def __repr__(self):
        return "ScalarJet2(%r, du=%r, dv=%r, duu=%r, duv=%r, dvv=%r)" % self.astuple()

    def __eq__(self, other):
        return isinstance(other, ScalarJet2) and self.astuple() == other.astuple()

    __hash__ = None

    def __add__(self, o):
        if not isinstance(o, ScalarJet2):
            return ScalarJet2(self.value + o, self.du, self.dv, self.duu, self.duv, self.dvv)
        return ScalarJet2(self.value + o.value, self.du + o.du, self.dv + o.dv,
                          self.duu + o.duu, self.duv + o.duv, self.dvv + o.dvv)

    __radd__ = __add__

    def __neg__(self):
        return ScalarJet2(-self.value, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, ScalarJet2):
            return ScalarJet2(self.value * o, self.du * o, self.dv * o,
                              self.duu * o, self.duv * o, self.dvv * o)
        f, g = self, o
        return ScalarJet2(
            f.value * g.value,
            f.du * g.value + f.value * g.du,
            f.dv * g.value + f.value * g.dv,
            f.duu * g.value + 2.0 * f.du * g.du + f.value * g.duu,
            f.duv * g.value + f.du * g.dv + f.dv * g.du + f.value * g.duv,
            f.dvv * g.value + 2.0 * f.dv * g.dv + f.value * g.dvv,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, ScalarJet2):
            o = ScalarJet2.constant(o)
        return self * o.reciprocal()

    def __rtruediv__(self, o):
        return ScalarJet2.constant(o) * self.reciprocal()

    def compose(self, f0, f1, f2):
        """Jet of phi(self) given phi, phi', phi'' evaluated at ``self.value``."""
        return ScalarJet2(
            f0,
            f1 * self.du,
            f1 * self.dv,
            f2 * self.du * self.du + f1 * self.duu,
            f2 * self.du * self.dv + f1 * self.duv,
            f2 * self.dv * self.dv + f1 * self.dvv,
        )

    def reciprocal(self):
        x = self.value
        if x == 0:
            raise ValueError("division by zero")
        r = 1.0 / x
        return self.compose(r, -r * r, 2.0 * r * r * r)

    def __pow__(self, o):
        if not isinstance(o, ScalarJet2):
            o = ScalarJet2.constant(o)
        if o.is_constant():
            return self._pow_const(o.value)
        if self.value <= 0:
            raise ValueError("variable exponent needs a positive base")
        return (o * self.apply("log")).apply("exp")

    def _pow_const(self, c):
        x = self.value
        if c == 0:
            return ScalarJet2.constant(1.0)
        if c == 1:
            return ScalarJet2(*self.astuple())
        integral = float(c).is_integer()
        if x < 0 and not integral:
            raise ValueError("negative base with non-integer exponent")
        if x == 0 and c < 2:
            raise ValueError("power is not twice differentiable at zero base")
        f1 = c * x ** (c - 1)
        f2 = c * (c - 1) * (1.0 if c == 2 else x ** (c - 2))
        return self.compose(x ** c, f1, f2)

    def apply(self, name):
        """Chain rule for one of the named unary functions."""
        x = self.value
        if name == "sin":
            s, c = math.sin(x), math.cos(x)
            return self.compose(s, c, -s)
        if name == "cos":
            s, c = math.sin(x), math.cos(x)
            return self.compose(c, -s, -c)
        if name == "tan":
            c = math.cos(x)
            if c == 0:
                raise ValueError("tan pole")
            t = math.tan(x)
            sec2 = 1.0 + t * t
            return self.compose(t, sec2, 2.0 * t * sec2)
        if name == "exp":
            ex = math.exp(x)
            return self.compose(ex, ex, ex)
        if name == "log":
            if x <= 0:
                raise ValueError("log of non-positive value")
            r = 1.0 / x
            return self.compose(math.log(x), r, -r * r)
        if name == "sqrt":
            if x <= 0:
                raise ValueError("sqrt of non-positive value")
            s = math.sqrt(x)
            return self.compose(s, 0.5 / s, -0.25 / (s * x))
        if name == "abs":
            if x == 0:
                raise ValueError("abs is not differentiable at 0")
            sgn = 1.0 if x > 0 else -1.0
            return self.compose(abs(x), sgn, 0.0)
        raise ValueError(f"unknown function {name!r}")


_ARITH = (ValueError, ZeroDivisionError, OverflowError)


def eval_jet(expr: Expression, u: float, v: float) -> ScalarJet2:
    """Exact value and partial derivatives (order <= 2) of ``expr`` at (u, v).

    Raises :class:`DomainError` carrying the offending sub-expression when the
    point lies outside the domain of some function (sqrt/log of a
    non-positive value, division by zero, abs at 0, ...).
    """
    return _jet(expr, float(u), float(v))


def _jet(node, u, v):
    if type(node) is BinOp:
        return _jet_binop(node, u, v)
    if isinstance(node, Num):
        return ScalarJet2(node.value)
    if isinstance(node, Var):
        return ScalarJet2.variable(node.name, u if node.name == "u" else v)
    if isinstance(node, Const):
        return ScalarJet2(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -_jet(node.operand, u, v)
    if isinstance(node, Call):
        arg = _jet(node.arg, u, v)
        try:
            return arg.apply(node.func)
        except _ARITH as exc:
            raise DomainError(f"{exc} in {to_string(node)}", node) from None
    return _jet_binop(node, u, v)


def _jet_binop(node, u, v):
    a = _jet(node.left, u, v)
    b = _jet(node.right, u, v)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    try:
        if op == "/":
            return a / b
        return a ** b
    except _ARITH as exc:
        raise DomainError(f"{exc} in {to_string(node)}", node) from None


_MATH = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "log": math.log, "sqrt": math.sqrt, "abs": abs,
}


def evaluate(expr: Expression, u: float, v: float) -> float:
    """Plain floating-point value of ``expr`` at (u, v)."""
    return _value(expr, float(u), float(v))


def _value(node, u, v):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return u if node.name == "u" else v
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_value(node.operand, u, v)
    if isinstance(node, Call):
        x = _value(node.arg, u, v)
        if (node.func == "log" and x <= 0) or (node.func == "sqrt" and x < 0):
            raise DomainError(f"{node.func} of {x!r} in {to_string(node)}", node)
        return _MATH[node.func](x)
    a = _value(node.left, u, v)
    b = _value(node.right, u, v)
    try:
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        if a < 0 and not float(b).is_integer():
            raise ValueError("negative base with non-integer exponent")
        return a ** b
    except _ARITH as exc:
        raise DomainError(f"{exc} in {to_string(node)}", node) from None
