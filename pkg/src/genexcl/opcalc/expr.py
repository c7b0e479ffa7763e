"""Operator expressions in the generators ``e`` and ``e+``.

Concrete syntax::

    expr    := ["-"] term (("+"|"-") term)*
    term    := scalar? factor ("*"? factor)*
    factor  := atom ("^" uint)?
    atom    := "e" | "e+" | "1" | "(" expr ")" | "[" expr "," expr "]" | "{" expr "," expr "}"
    scalar  := ["-"] int ["/" uint]

``e+`` is a single token only when the ``+`` immediately follows the ``e``;
``e + e`` is a sum and ``e+e`` is the product ``e+ e``.  A bare integer other
than ``1`` (or any ``p/q``) with no factor after it is a multiple of the
identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "ANNIHILATE",
    "CREATE",
    "Generator",
    "One",
    "ScalarMul",
    "Sum",
    "Product",
    "Power",
    "Commutator",
    "AntiCommutator",
    "OpExpr",
    "ParseError",
    "parse",
    "to_text",
]

ANNIHILATE = "e"
CREATE = "e+"


@dataclass(frozen=True)
class Generator:
    kind: str

    def __post_init__(self):
        if self.kind not in (ANNIHILATE, CREATE):
            raise ValueError(f"unknown generator {self.kind!r}")


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class ScalarMul:
    coeff: Fraction
    expr: "OpExpr"

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))


@dataclass(frozen=True)
class Sum:
    terms: tuple["OpExpr", ...]


@dataclass(frozen=True)
class Product:
    factors: tuple["OpExpr", ...]


@dataclass(frozen=True)
class Power:
    base: "OpExpr"
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or int(self.exponent) != self.exponent or self.exponent < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {self.exponent!r}")


@dataclass(frozen=True)
class Commutator:
    left: "OpExpr"
    right: "OpExpr"


@dataclass(frozen=True)
class AntiCommutator:
    left: "OpExpr"
    right: "OpExpr"


OpExpr = Union[Generator, One, ScalarMul, Sum, Product, Power, Commutator, AntiCommutator]


class ParseError(ValueError):
    """Lexical or syntax error at byte ``offset`` of the source text."""

    def __init__(self, offset: int, expected: str, text: str = ""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"at offset {offset}: expected {expected}")

    def diagnostic(self) -> str:
        """Two-line caret display of the error position."""
        return f"{self.text}\n{' ' * self.offset}^ expected {self.expected}"


_TOKEN_RE = re.compile(r"\s*(?:(e\+)|(e)|(\d+)|([-+*/^()\[\]{},]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    try:
        text.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ParseError(exc.start, "ASCII input", text) from None
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(start, "a generator, number, operator or bracket", text)
        if m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("gen", CREATE, start))
        elif m.group(2):
            tokens.append(("gen", ANNIHILATE, start))
        elif m.group(3):
            tokens.append(("int", m.group(3), start))
        else:
            tokens.append((m.group(4), m.group(4), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str):
        if self.tok[0] != kind:
            self.fail(what)
        return self.advance()

    def fail(self, what: str):
        raise ParseError(self.tok[2], what, self.text)

    def starts_factor(self) -> bool:
        kind, value, _ = self.tok
        return kind in ("gen", "(", "[", "{") or (kind == "int" and value == "1")

    def parse(self) -> OpExpr:
        node = self.expr()
        if self.tok[0] != "eof":
            self.fail("'+', '-', a factor or end of input")
        return node

    def expr(self) -> OpExpr:
        terms = [self.term(negate=False, signed=True)]
        while self.tok[0] in ("+", "-"):
            negate = self.advance()[0] == "-"
            terms.append(self.term(negate=negate, signed=True))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self, negate: bool, signed: bool) -> OpExpr:
        coeff = None
        if signed and self.tok[0] == "-":
            self.advance()
            negate = not negate
            coeff = self.scalar() if self.tok[0] == "int" else Fraction(1)
        elif self.tok[0] == "int" and not self._one_atom():
            coeff = self.scalar()
        factors = []
        if coeff is not None and self.tok[0] == "*":
            self.advance()
            if not self.starts_factor():
                self.fail("a factor after '*'")
        while self.starts_factor():
            factors.append(self.factor())
            if self.tok[0] == "*":
                self.advance()
                if not self.starts_factor():
                    self.fail("a factor after '*'")
        if not factors:
            if coeff is None:
                self.fail("a term")
            body: OpExpr = One()
        else:
            body = factors[0] if len(factors) == 1 else Product(tuple(factors))
        if negate:
            coeff = -(coeff if coeff is not None else Fraction(1))
        if coeff is None or (coeff == 1 and factors):
            return body
        return ScalarMul(coeff, body)

    def _one_atom(self) -> bool:
        # a lone "1" not followed by "/" is the identity atom, not a scalar
        kind, value, _ = self.tok
        nxt = self.tokens[self.i + 1][0]
        return kind == "int" and value == "1" and nxt != "/"

    def scalar(self) -> Fraction:
        num = int(self.expect("int", "an integer")[1])
        if self.tok[0] == "/":
            self.advance()
            den_tok = self.expect("int", "a positive integer denominator")
            den = int(den_tok[1])
            if den == 0:
                raise ParseError(den_tok[2], "a nonzero denominator", self.text)
            return Fraction(num, den)
        return Fraction(num)

    def factor(self) -> OpExpr:
        node = self.atom()
        if self.tok[0] == "^":
            self.advance()
            exp = int(self.expect("int", "a nonnegative integer exponent")[1])
            node = Power(node, exp)
        return node

    def atom(self) -> OpExpr:
        kind, value, _ = self.tok
        if kind == "gen":
            self.advance()
            return Generator(value)
        if kind == "int" and value == "1":
            self.advance()
            return One()
        if kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")", "')'")
            return inner
        if kind in ("[", "{"):
            self.advance()
            left = self.expr()
            self.expect(",", "','")
            right = self.expr()
            if kind == "[":
                self.expect("]", "']'")
                return Commutator(left, right)
            self.expect("}", "'}'")
            return AntiCommutator(left, right)
        self.fail("'e', 'e+', '1', '(', '[' or '{'")


def parse(text: str) -> OpExpr:
    """Parse operator-expression text into an AST.

    >>> parse("e e+")
    Product(factors=(Generator(kind='e'), Generator(kind='e+')))
    """
    return _Parser(text).parse()


def to_text(node: OpExpr) -> str:
    """Render an AST back to parseable text (fully parenthesized where needed)."""
    if isinstance(node, Generator):
        return node.kind
    if isinstance(node, One):
        return "1"
    if isinstance(node, ScalarMul):
        return f"{node.coeff} ({to_text(node.expr)})"
    if isinstance(node, Sum):
        return " + ".join(f"({to_text(t)})" for t in node.terms)
    if isinstance(node, Product):
        return " ".join(f"({to_text(f)})" for f in node.factors)
    if isinstance(node, Power):
        return f"({to_text(node.base)})^{node.exponent}"
    if isinstance(node, Commutator):
        return f"[{to_text(node.left)}, {to_text(node.right)}]"
    if isinstance(node, AntiCommutator):
        return f"{{{to_text(node.left)}, {to_text(node.right)}}}"
    raise TypeError(f"not an operator expression: {node!r}")
