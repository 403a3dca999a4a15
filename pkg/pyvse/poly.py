"""
Exact polynomial arithmetic in the ring QQ[A, B, F, X, Y, Z, M, o].

Polynomials are elements of a sympy sparse ring over QQ with the
lexicographic order A > B > F > X > Y > Z > M > o. Monomials are exponent
8-tuples, so Python tuple comparison is exactly the monomial order.

Two text forms are understood:

* the canonical form written by :func:`format` and read by :func:`parse`,
  e.g. ``A*B^2 - 1/2*Z*o + 3``;
* the expression form read by :func:`parse_expression`, which also allows
  parentheses, powers of groups and juxtaposition of single letter
  variables (``o(16(Z^2 - 1)o^2 - 32)``), used for transcribed reference data.
"""

import math
import re
from typing import Mapping, NamedTuple, Optional, Union

from loguru import logger
from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, ring

from pyvse.errors import PolynomialSyntaxError

VARIABLES = ("A", "B", "F", "X", "Y", "Z", "M", "o")
M_INDEX = VARIABLES.index("M")
O_INDEX = VARIABLES.index("o")

RING, *GENERATORS = ring(",".join(VARIABLES), QQ, lex)

Polynomial = PolyElement
Monomial = tuple[int, ...]
Rational = QQ.dtype


def variable(name: str) -> Polynomial:
    if name not in VARIABLES:
        raise ValueError(f"Unknown ring variable '{name}', expected one of {VARIABLES}")
    return GENERATORS[VARIABLES.index(name)]


def monomial(**exponents: int) -> Polynomial:
    powers = [0] * len(VARIABLES)
    for name, exponent in exponents.items():
        powers[VARIABLES.index(name)] = exponent
    return RING.from_dict({tuple(powers): QQ(1)})


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def substitute(
    p: Polynomial, assignment: Mapping[str, Union[Polynomial, int]]
) -> Polynomial:
    """Simultaneously replace ring variables by polynomials."""
    if not assignment:
        return p
    replacements = [
        (variable(name), RING(value)) for name, value in sorted(assignment.items())
    ]
    return p.compose(replacements)


def truncate_M(p: Polynomial, k: int) -> Polynomial:
    """Drop every term whose M-exponent exceeds k (computation modulo M^(k+1))."""
    if k < 0:
        raise ValueError(f"Truncation level must be non-negative, got {k}")
    return RING.from_dict(
        {monom: coeff for monom, coeff in p.items() if monom[M_INDEX] <= k}
    )


def m_degree(p: Polynomial) -> int:
    return max((monom[M_INDEX] for monom in p.itermonoms()), default=0)


def compare(m1: Monomial, m2: Monomial) -> int:
    if len(m1) != len(VARIABLES) or len(m2) != len(VARIABLES):
        raise ValueError("Monomials must have exactly 8 exponents")
    return (m1 > m2) - (m1 < m2)


def content_free(p: Polynomial) -> Polynomial:
    """Divide by the positive rational content; the sign is kept."""
    if not p:
        return p
    coefficients = p.coeffs()
    numerator = math.gcd(*(int(c.numerator) for c in coefficients))
    denominator = math.lcm(*(int(c.denominator) for c in coefficients))
    return p.quo_ground(QQ(numerator, denominator))


def canonical_sign(p: Polynomial) -> Polynomial:
    if p and p.LC < 0:
        return -p
    return p


class Token(NamedTuple):
    kind: str
    text: str
    position: int


_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<variable>[ABFXYZMo])|(?P<operator>[-+*/^()]))"
)


def _tokenize(text: str) -> list[Token]:
    text = text.replace("−", "-")
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN.match(text, position)
        if match is None:
            offset = len(text[position:]) - len(text[position:].lstrip())
            bad = position + offset
            raise PolynomialSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        position = match.end()
    return tokens


def _is_operator(tokens: list[Token], index: int, symbol: str) -> bool:
    return (
        index < len(tokens)
        and tokens[index].kind == "operator"
        and tokens[index].text == symbol
    )


def _expect_number(tokens: list[Token], index: int, end: int, what: str) -> int:
    if index >= len(tokens):
        raise PolynomialSyntaxError(f"expected {what}", end)
    if tokens[index].kind != "number":
        raise PolynomialSyntaxError(
            f"expected {what} but found {tokens[index].text!r}",
            tokens[index].position,
        )
    return int(tokens[index].text)


def _canonical_term(
    tokens: list[Token], index: int, end: int
) -> tuple[Polynomial, int]:
    coefficient = QQ(1)
    exponents = [0] * len(VARIABLES)
    if index < len(tokens) and tokens[index].kind == "number":
        numerator = int(tokens[index].text)
        index += 1
        denominator = 1
        if _is_operator(tokens, index, "/"):
            denominator = _expect_number(tokens, index + 1, end, "a denominator")
            if denominator == 0:
                raise PolynomialSyntaxError("zero denominator", tokens[index + 1].position)
            index += 2
        coefficient = QQ(numerator, denominator)
        if not _is_operator(tokens, index, "*"):
            return RING.ground_new(coefficient), index
        index += 1

    while True:
        if index >= len(tokens):
            raise PolynomialSyntaxError("expected a variable", end)
        token = tokens[index]
        if token.kind != "variable":
            raise PolynomialSyntaxError(
                f"expected a variable but found {token.text!r}", token.position
            )
        index += 1
        power = 1
        if _is_operator(tokens, index, "^"):
            power = _expect_number(tokens, index + 1, end, "an exponent")
            index += 2
        exponents[VARIABLES.index(token.text)] += power
        if not _is_operator(tokens, index, "*"):
            break
        index += 1
    return RING.from_dict({tuple(exponents): coefficient}), index


def parse(text: str) -> Polynomial:
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialSyntaxError("empty polynomial", 0)
    result = RING.zero
    index = 0
    while index < len(tokens):
        token = tokens[index]
        sign = 1
        if token.kind == "operator" and token.text in "+-":
            sign = -1 if token.text == "-" else 1
            index += 1
        elif index > 0:
            raise PolynomialSyntaxError(
                f"expected '+' or '-' but found {token.text!r}", token.position
            )
        term, index = _canonical_term(tokens, index, len(text))
        result += term if sign > 0 else -term
    return result


def _format_coefficient(coefficient: Rational) -> str:
    numerator, denominator = int(coefficient.numerator), int(coefficient.denominator)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def format(p: Polynomial) -> str:
    """Canonical text: terms in descending lex order, coefficient first."""
    if not p:
        return "0"
    pieces = []
    for monom, coefficient in p.terms():
        factors = [
            name if exponent == 1 else f"{name}^{exponent}"
            for name, exponent in zip(VARIABLES, monom)
            if exponent
        ]
        magnitude = abs(coefficient)
        if factors and magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coefficient(magnitude)] + factors)
        if not pieces:
            pieces.append(f"-{body}" if coefficient < 0 else body)
        else:
            pieces.append(f" - {body}" if coefficient < 0 else f" + {body}")
    return "".join(pieces)


class _ExpressionParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def _current(self) -> Optional[Token]:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def _accept(self, symbol: str) -> bool:
        if _is_operator(self.tokens, self.index, symbol):
            self.index += 1
            return True
        return False

    def _starts_factor(self) -> bool:
        token = self._current()
        return token is not None and (
            token.kind in ("number", "variable") or token.text == "("
        )

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolynomialSyntaxError("empty expression", 0)
        value = self._sum()
        token = self._current()
        if token is not None:
            raise PolynomialSyntaxError(f"unexpected {token.text!r}", token.position)
        return value

    def _sum(self) -> Polynomial:
        negate = False
        if self._accept("-"):
            negate = True
        else:
            self._accept("+")
        value = self._product()
        if negate:
            value = -value
        while True:
            if self._accept("+"):
                value = value + self._product()
            elif self._accept("-"):
                value = value - self._product()
            else:
                return value

    def _product(self) -> Polynomial:
        value = self._power()
        while True:
            if self._accept("*"):
                value = value * self._power()
            elif self._accept("/"):
                token = self._current()
                divisor = self._power()
                if not divisor or not divisor.is_ground:
                    position = token.position if token else len(self.text)
                    raise PolynomialSyntaxError(
                        "division is only allowed by a nonzero constant", position
                    )
                value = value.quo_ground(divisor.LC)
            elif self._starts_factor():
                value = value * self._power()
            else:
                return value

    def _power(self) -> Polynomial:
        base = self._primary()
        if self._accept("^"):
            exponent = _expect_number(
                self.tokens, self.index, len(self.text), "an exponent"
            )
            self.index += 1
            base = base**exponent
        return base

    def _primary(self) -> Polynomial:
        token = self._current()
        if token is None:
            raise PolynomialSyntaxError("unexpected end of expression", len(self.text))
        if token.kind == "number":
            self.index += 1
            return RING.ground_new(QQ(int(token.text)))
        if token.kind == "variable":
            self.index += 1
            return variable(token.text)
        if token.text == "(":
            self.index += 1
            value = self._sum()
            if not self._accept(")"):
                current = self._current()
                position = current.position if current else len(self.text)
                raise PolynomialSyntaxError("missing ')'", position)
            return value
        raise PolynomialSyntaxError(f"unexpected {token.text!r}", token.position)


def parse_expression(text: str) -> Polynomial:
    """Read a math-style expression (parentheses, implicit products) exactly."""
    value = _ExpressionParser(text).parse()
    logger.debug(f"Parsed expression with {len(value)} terms")
    return value
