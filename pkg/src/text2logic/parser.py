"""Text syntax for formulas.

Grammar (loosest binding first)::

    iff     := implies ( "<->" implies )*        left-associative
    implies := xor ( "->" implies )?             right-associative
    xor     := or ( "XOR" or )*                  left-associative
    or      := and ( "OR" and )*                 n-ary
    and     := unary ( "AND" unary )*            n-ary
    unary   := "NOT" unary | primary
    primary := IDENT | "TRUE" | "FALSE" | "(" iff ")"

Keywords are upper case (``AND``, not ``and``). Each operator has ASCII,
symbolic, Unicode and LaTeX spellings (see ``_OPERATOR_SPELLINGS``). An unparenthesised chain of the
same n-ary operator becomes one flat node; a parenthesised operand is kept as
its own node, which is what makes ``parse(to_text(f)) == f`` hold exactly.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

from .logic import (
    And,
    Atom,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Vocabulary,
    Xor,
)


class ParseErrorKind(enum.Enum):
    SYNTAX = "Syntax"
    UNKNOWN_SYMBOL = "UnknownSymbol"
    EMPTY = "Empty"


class ParseError(ValueError):
    def __init__(
        self,
        kind: ParseErrorKind,
        position: int,
        detail: str,
        offending: Optional[str] = None,
    ):
        super().__init__(f"{kind.value} at {position}: {detail}")
        self.kind = kind
        self.position = position
        self.detail = detail
        self.offending = offending


@dataclass(frozen=True)
class Token:
    kind: str  # one of the operator names, "IDENT", "LPAREN", "RPAREN", "TRUE", "FALSE", "EOF"
    text: str
    pos: int


_OPERATOR_SPELLINGS = {
    "NOT": ["NOT", "!", "¬", "~", r"\neg", r"\lnot"],
    "AND": ["AND", "&&", "&", "∧", r"\land", r"\wedge"],
    "OR": ["OR", "||", "|", "∨", r"\lor", r"\vee"],
    "XOR": ["XOR", "^", "⊕", r"\oplus", r"\veebar"],
    "IMPLIES": ["IMPLIES", "->", "=>", "→", "⇒", r"\rightarrow", r"\to", r"\Rightarrow"],
    "IFF": ["IFF", "<->", "<=>", "↔", "⇔", r"\leftrightarrow", r"\Leftrightarrow", r"\iff"],
}
_CONSTANTS = {"TRUE": "TRUE", "FALSE": "FALSE", "⊤": "TRUE", "⊥": "FALSE"}

_KEYWORDS = {
    spelling: name
    for name, spellings in _OPERATOR_SPELLINGS.items()
    for spelling in spellings
    if spelling.isalpha()
}
_SYMBOLIC = sorted(
    (
        (spelling, name)
        for name, spellings in _OPERATOR_SPELLINGS.items()
        for spelling in spellings
        if not spelling.isalpha()
    ),
    key=lambda item: -len(item[0]),
)
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
# LaTeX operators are matched as whole control words so "\to" does not eat "\top"
_LATEX_RE = re.compile(r"\\[A-Za-z]+")

# operator spellings that rarely occur in English prose; "!" and "~" are left out
OPERATOR_HINT_RE = re.compile(
    r"<->|->|<=>|=>|[¬∧∨⊕→↔⇒⇔&|]|\b(?:AND|OR|NOT|XOR|IFF|IMPLIES)\b"
    r"|\\(?:land|lor|neg|lnot|wedge|vee|oplus|rightarrow|leftrightarrow|to|iff)\b"
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    latex_ops = {s: name for s, name in _SYMBOLIC if s.startswith("\\")}
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(Token("LPAREN", ch, i))
            i += 1
            continue
        if ch == ")":
            tokens.append(Token("RPAREN", ch, i))
            i += 1
            continue
        if ch in _CONSTANTS:
            tokens.append(Token(_CONSTANTS[ch], ch, i))
            i += 1
            continue
        m = _WORD_RE.match(text, i)
        if m:
            word = m.group()
            if word in _KEYWORDS:
                tokens.append(Token(_KEYWORDS[word], word, i))
            elif word in _CONSTANTS:
                tokens.append(Token(_CONSTANTS[word], word, i))
            else:
                tokens.append(Token("IDENT", word, i))
            i = m.end()
            continue
        if ch == "\\":
            m = _LATEX_RE.match(text, i)
            if m and m.group() in latex_ops:
                tokens.append(Token(latex_ops[m.group()], m.group(), i))
                i = m.end()
                continue
        for spelling, name in _SYMBOLIC:
            if not spelling.startswith("\\") and text.startswith(spelling, i):
                tokens.append(Token(name, spelling, i))
                i += len(spelling)
                break
        else:
            raise ParseError(
                ParseErrorKind.SYNTAX, i, f"unexpected character {ch!r}", ch
            )
    tokens.append(Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, vocab: Optional[Vocabulary]):
        self.text = text
        self.vocab = vocab
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, detail: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(ParseErrorKind.SYNTAX, tok.pos, detail, tok.text or None)

    def parse(self) -> Formula:
        f = self.iff()
        if self.tok.kind != "EOF":
            raise self.fail(f"unexpected {self.tok.text!r}")
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.tok.kind == "IFF":
            self.advance()
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.xor()
        if self.tok.kind == "IMPLIES":
            self.advance()
            return Implies(f, self.implies())
        return f

    def xor(self) -> Formula:
        f = self.or_()
        while self.tok.kind == "XOR":
            self.advance()
            f = Xor(f, self.or_())
        return f

    def or_(self) -> Formula:
        args = [self.and_()]
        while self.tok.kind == "OR":
            self.advance()
            args.append(self.and_())
        return args[0] if len(args) == 1 else Or(*args)

    def and_(self) -> Formula:
        args = [self.unary()]
        while self.tok.kind == "AND":
            self.advance()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(*args)

    def unary(self) -> Formula:
        if self.tok.kind == "NOT":
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.advance()
        if tok.kind == "IDENT":
            if self.vocab is not None and tok.text not in self.vocab:
                raise ParseError(
                    ParseErrorKind.UNKNOWN_SYMBOL,
                    tok.pos,
                    f"symbol {tok.text!r} is not declared",
                    tok.text,
                )
            return Atom(tok.text)
        if tok.kind == "TRUE":
            return Const(True)
        if tok.kind == "FALSE":
            return Const(False)
        if tok.kind == "LPAREN":
            f = self.iff()
            if self.tok.kind != "RPAREN":
                raise self.fail("expected ')'")
            self.advance()
            return f
        if tok.kind == "EOF":
            raise self.fail("unexpected end of input", tok)
        raise self.fail(f"unexpected {tok.text!r}", tok)


def parse(text: str, vocab: Optional[Vocabulary] = None) -> Formula:
    """Parse ``text``; with ``vocab``, undeclared atoms are rejected."""
    if not text.strip():
        raise ParseError(ParseErrorKind.EMPTY, 0, "empty formula")
    return _Parser(text, vocab).parse()


# -- printing -----------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Xor: 3, Or: 4, And: 5, Not: 6, Atom: 7, Const: 7}


def _prec(f: Formula) -> int:
    return _PREC[type(f)]


def to_text(f: Formula) -> str:
    """ASCII rendering with the fewest parentheses that still round-trip."""

    def wrap(g: Formula, needs: bool) -> str:
        s = to_text(g)
        return f"({s})" if needs else s

    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return "TRUE" if f.value else "FALSE"
    if isinstance(f, Not):
        return "NOT " + wrap(f.arg, _prec(f.arg) < _prec(f))
    if isinstance(f, (And, Or)):
        op = " AND " if isinstance(f, And) else " OR "
        # a same-operator child must stay parenthesised or it would be flattened
        return op.join(wrap(g, _prec(g) <= _prec(f)) for g in f.args)
    p = _prec(f)
    op = {Xor: " XOR ", Implies: " -> ", Iff: " <-> "}[type(f)]
    if isinstance(f, Implies):
        left_needs, right_needs = _prec(f.left) <= p, _prec(f.right) < p
    else:
        left_needs, right_needs = _prec(f.left) < p, _prec(f.right) <= p
    return wrap(f.left, left_needs) + op + wrap(f.right, right_needs)
