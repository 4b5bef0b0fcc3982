"""Branching predicate language for checkpoint applicability.

Checkpoints carry a small boolean expression over release-profile attributes
("has_batch == true", "hosting in ['cloud', 'hybrid'] and not legacy_stack").
The grammar, in precedence order (loosest first):

    expr       := or
    or         := and ("or" and)*
    and        := unary ("and" unary)*
    unary      := "not" unary | primary
    primary    := comparison | "true" | "false" | "(" expr ")"
    comparison := ident (("==" | "!=") literal | "in" "[" literal ("," literal)* "]")

Identifiers are [a-z_][a-z0-9_]*, strings are single-quoted, integers are
decimal.  Evaluation is strict: a predicate that names an attribute missing
from the profile raises UnknownAttribute instead of defaulting to false, so a
typo can never silently drop a checkpoint from an assessment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import PredicateSyntaxError, UnknownAttribute

Value = Union[bool, int, str]


# --- AST ----------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool


@dataclass(frozen=True, slots=True)
class Compare:
    attribute: str
    op: str  # "==" or "!="
    value: Value


@dataclass(frozen=True, slots=True)
class InSet:
    attribute: str
    values: tuple[Value, ...]


@dataclass(frozen=True, slots=True)
class Not:
    child: "Predicate"


@dataclass(frozen=True, slots=True)
class And:
    parts: tuple["Predicate", ...]


@dataclass(frozen=True, slots=True)
class Or:
    parts: tuple["Predicate", ...]


Predicate = Union[BoolLit, Compare, InSet, Not, And, Or]


# --- tokenizer ------------------------------------------------------------------

_KEYWORDS = {"and", "or", "not", "in", "true", "false"}
_IDENT_RE = re.compile(r"[a-z_][a-z0-9_]*")
_INT_RE = re.compile(r"-?[0-9]+")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # ident / int / string / punct / keyword / end
    text: str
    offset: int  # byte offset into the source
    value: Value = ""


def _byte_offset(src: str, index: int) -> int:
    return len(src[:index].encode("utf-8"))


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            i += 1
            continue
        at = _byte_offset(src, i)
        if ch in "()[],":
            tokens.append(_Token("punct", ch, at))
            i += 1
            continue
        if src.startswith("==", i) or src.startswith("!=", i):
            tokens.append(_Token("punct", src[i : i + 2], at))
            i += 2
            continue
        if ch == "'":
            end = src.find("'", i + 1)
            if end < 0:
                raise PredicateSyntaxError(
                    "unterminated string literal", at, "closing \"'\""
                )
            text = src[i : end + 1]
            tokens.append(_Token("string", text, at, value=src[i + 1 : end]))
            i = end + 1
            continue
        m = _INT_RE.match(src, i)
        if m and (ch.isdigit() or ch == "-"):
            tokens.append(_Token("int", m.group(), at, value=int(m.group())))
            i = m.end()
            continue
        m = _IDENT_RE.match(src, i)
        if m:
            word = m.group()
            kind = "keyword" if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, at))
            i = m.end()
            continue
        raise PredicateSyntaxError(
            f"unexpected character {ch!r}", at, "a token"
        )
    tokens.append(_Token("end", "", _byte_offset(src, n)))
    return tokens


# --- parser ---------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_punct(self, text: str, expected: str) -> None:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            raise PredicateSyntaxError(
                f"unexpected {_describe(tok)}", tok.offset, expected
            )
        self.advance()

    def parse_expr(self) -> Predicate:
        parts = [self.parse_and()]
        while self._eat_keyword("or"):
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Predicate:
        parts = [self.parse_unary()]
        while self._eat_keyword("and"):
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self) -> Predicate:
        if self._eat_keyword("not"):
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Predicate:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.advance()
            return BoolLit(tok.text == "true")
        if tok.kind == "punct" and tok.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect_punct(")", "')'")
            return inner
        if tok.kind == "ident":
            return self.parse_comparison()
        raise PredicateSyntaxError(
            f"unexpected {_describe(tok)}",
            tok.offset,
            "an attribute name, 'true', 'false', 'not' or '('",
        )

    def parse_comparison(self) -> Predicate:
        attr = self.advance().text
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("==", "!="):
            self.advance()
            value = self._literal()
            return Compare(attr, tok.text, value)
        if tok.kind == "keyword" and tok.text == "in":
            self.advance()
            self.expect_punct("[", "'['")
            values = [self._literal()]
            while True:
                nxt = self.peek()
                if nxt.kind == "punct" and nxt.text == ",":
                    self.advance()
                    values.append(self._literal())
                    continue
                self.expect_punct("]", "',' or ']'")
                break
            return InSet(attr, tuple(values))
        raise PredicateSyntaxError(
            f"unexpected {_describe(tok)}", tok.offset, "'==', '!=' or 'in'"
        )

    def _literal(self) -> Value:
        tok = self.peek()
        if tok.kind in ("string", "int"):
            self.advance()
            return tok.value
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.advance()
            return tok.text == "true"
        raise PredicateSyntaxError(
            f"unexpected {_describe(tok)}",
            tok.offset,
            "a string, integer, 'true' or 'false'",
        )

    def _eat_keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text == word:
            self.advance()
            return True
        return False


def _describe(tok: _Token) -> str:
    if tok.kind == "end":
        return "end of input"
    return f"{tok.kind} {tok.text!r}"


def parse_predicate(source: str) -> Predicate:
    """Parse predicate source text into an AST.

    Raises PredicateSyntaxError (with byte offset and an expected-token hint)
    on malformed input, including trailing garbage.
    """
    parser = _Parser(_tokenize(source))
    expr = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise PredicateSyntaxError(
            f"unexpected {_describe(trailing)}", trailing.offset, "end of input"
        )
    return expr


# --- evaluation -------------------------------------------------------------------

def _same(a: Value, b: Value) -> bool:
    # bool is a subclass of int in Python; keep the two kinds distinct so
    # `flag == 1` never matches a boolean attribute.
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def evaluate(predicate: Predicate, attributes: Mapping[str, Value]) -> bool:
    """Evaluate a predicate against profile attributes.

    Deliberately avoids short-circuiting so that an undefined attribute is
    reported no matter where it sits in the expression.
    """
    if isinstance(predicate, BoolLit):
        return predicate.value
    if isinstance(predicate, Compare):
        if predicate.attribute not in attributes:
            raise UnknownAttribute(predicate.attribute)
        actual = attributes[predicate.attribute]
        hit = _same(actual, predicate.value)
        return hit if predicate.op == "==" else not hit
    if isinstance(predicate, InSet):
        if predicate.attribute not in attributes:
            raise UnknownAttribute(predicate.attribute)
        actual = attributes[predicate.attribute]
        return any(_same(actual, v) for v in predicate.values)
    if isinstance(predicate, Not):
        return not evaluate(predicate.child, attributes)
    if isinstance(predicate, And):
        results = [evaluate(p, attributes) for p in predicate.parts]
        return all(results)
    if isinstance(predicate, Or):
        results = [evaluate(p, attributes) for p in predicate.parts]
        return any(results)
    raise TypeError(f"not a predicate node: {predicate!r}")


def referenced_attributes(predicate: Predicate) -> set[str]:
    """Collect every attribute name the predicate mentions."""
    if isinstance(predicate, (Compare, InSet)):
        return {predicate.attribute}
    if isinstance(predicate, Not):
        return referenced_attributes(predicate.child)
    if isinstance(predicate, (And, Or)):
        out: set[str] = set()
        for part in predicate.parts:
            out |= referenced_attributes(part)
        return out
    return set()


# --- printing ---------------------------------------------------------------------

def _render_literal(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"'{value}'"


def _precedence(predicate: Predicate) -> int:
    if isinstance(predicate, Or):
        return 1
    if isinstance(predicate, And):
        return 2
    if isinstance(predicate, Not):
        return 3
    return 4


def to_source(predicate: Predicate) -> str:
    """Render a predicate back to source text.

    The output reparses to a structurally identical AST: nested same-level
    groups keep their parentheses, everything else relies on precedence.
    """
    if isinstance(predicate, BoolLit):
        return "true" if predicate.value else "false"
    if isinstance(predicate, Compare):
        return f"{predicate.attribute} {predicate.op} {_render_literal(predicate.value)}"
    if isinstance(predicate, InSet):
        inner = ", ".join(_render_literal(v) for v in predicate.values)
        return f"{predicate.attribute} in [{inner}]"
    if isinstance(predicate, Not):
        child = to_source(predicate.child)
        if _precedence(predicate.child) < _precedence(predicate):
            child = f"({child})"
        return f"not {child}"
    if isinstance(predicate, (And, Or)):
        word = " and " if isinstance(predicate, And) else " or "
        own = _precedence(predicate)
        rendered = []
        for part in predicate.parts:
            text = to_source(part)
            if _precedence(part) <= own:
                text = f"({text})"
            rendered.append(text)
        return word.join(rendered)
    raise TypeError(f"not a predicate node: {predicate!r}")
