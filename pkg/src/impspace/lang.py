"""IMP abstract syntax, concrete syntax, the length metric, and the bitstring codec.

IMP is a minimal imperative language: ``skip``, register assignment,
sequencing, conditionals, and ``while`` loops over registers ``x[0]``,
``x[1]``, ... holding unbounded natural numbers.  The concrete syntax is
fully parenthesized, so every valid text has exactly one syntax tree:

    P ::= skip | x[N] := A | (P; P) | (if B then P else P) | (while B do P)
    A ::= N | x[N] | (A + A) | (A - A) | (A * A)
    B ::= true | false | (A = A) | (A < A) | ¬B | (B ∨ B) | (B ∧ B)
    N ::= decimal numeral without leading zeros

The module also provides the bijection between natural numbers and finite
bitstrings in canonical order (sorted by length, then lexicographically),
which is how register contents are turned into program output.
"""

from __future__ import annotations

from dataclasses import dataclass


# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Num:
    """Numeral literal (nonnegative, canonical decimal form)."""

    value: int


@dataclass(frozen=True, slots=True)
class Reg:
    """Register reference ``x[index]`` used as an arithmetic expression."""

    index: int


@dataclass(frozen=True, slots=True)
class Add:
    left: "Arith"
    right: "Arith"


@dataclass(frozen=True, slots=True)
class Sub:
    """Truncated subtraction: values below zero clamp to zero."""

    left: "Arith"
    right: "Arith"


@dataclass(frozen=True, slots=True)
class Mul:
    left: "Arith"
    right: "Arith"


Arith = Num | Reg | Add | Sub | Mul


@dataclass(frozen=True, slots=True)
class TrueLit:
    pass


@dataclass(frozen=True, slots=True)
class FalseLit:
    pass


@dataclass(frozen=True, slots=True)
class Eq:
    left: Arith
    right: Arith


@dataclass(frozen=True, slots=True)
class Lt:
    left: Arith
    right: Arith


@dataclass(frozen=True, slots=True)
class Not:
    operand: "Bool"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Bool"
    right: "Bool"


@dataclass(frozen=True, slots=True)
class And:
    left: "Bool"
    right: "Bool"


Bool = TrueLit | FalseLit | Eq | Lt | Not | Or | And


@dataclass(frozen=True, slots=True)
class Skip:
    pass


@dataclass(frozen=True, slots=True)
class Assign:
    """``x[target] := value``; the target is a register index."""

    target: int
    value: Arith


@dataclass(frozen=True, slots=True)
class Seq:
    first: "Program"
    second: "Program"


@dataclass(frozen=True, slots=True)
class If:
    cond: Bool
    then: "Program"
    orelse: "Program"


@dataclass(frozen=True, slots=True)
class While:
    cond: Bool
    body: "Program"


Program = Skip | Assign | Seq | If | While

SKIP = Skip()
TRUE = TrueLit()
FALSE = FalseLit()


# ---------------------------------------------------------------------------
# Length metric
# ---------------------------------------------------------------------------

def digit_count(n: int) -> int:
    """Number of decimal digits of a nonnegative integer (0 has one digit)."""
    if n < 0:
        raise ValueError("negative value has no numeral")
    return len(str(n))


def arith_length(a: Arith) -> int:
    t = type(a)
    if t is Num:
        return digit_count(a.value)
    if t is Reg:
        return 1 + digit_count(a.index)
    return 1 + arith_length(a.left) + arith_length(a.right)


def bool_length(b: Bool) -> int:
    t = type(b)
    if t is TrueLit or t is FalseLit:
        return 1
    if t is Not:
        return 1 + bool_length(b.operand)
    if t is Eq or t is Lt:
        return 1 + arith_length(b.left) + arith_length(b.right)
    return 1 + bool_length(b.left) + bool_length(b.right)


def program_length(p: Program) -> int:
    """Syntax-tree size of a program.

    Every construct counts 1 plus its children, except that a numeral with
    d digits counts d and a register counts 1 plus its index numeral.
    """
    t = type(p)
    if t is Skip:
        return 1
    if t is Assign:
        return 2 + digit_count(p.target) + arith_length(p.value)
    if t is Seq:
        return 1 + program_length(p.first) + program_length(p.second)
    if t is If:
        return (1 + bool_length(p.cond)
                + program_length(p.then) + program_length(p.orelse))
    return 1 + bool_length(p.cond) + program_length(p.body)


# ---------------------------------------------------------------------------
# Natural number <-> bitstring codec
# ---------------------------------------------------------------------------

def nat_to_string(n: int) -> str:
    """The n-th bitstring in canonical order (by length, then lexicographic).

    Index 0 is the empty string; strings of all zeros sit at indexes of the
    form 2**k - 1.
    """
    if n < 0:
        raise ValueError("bitstring index must be nonnegative")
    length = (n + 1).bit_length() - 1
    if length == 0:
        return ""
    offset = n - ((1 << length) - 1)
    return format(offset, "b").zfill(length)


def string_to_nat(bits: str) -> int:
    """Position of a bitstring in canonical order; inverse of nat_to_string."""
    if not bits:
        return 0
    if any(c not in "01" for c in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return (1 << len(bits)) - 1 + int(bits, 2)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_arith(a: Arith) -> str:
    match a:
        case Num(value):
            return str(value)
        case Reg(index):
            return f"x[{index}]"
        case Add(left, right):
            return f"({render_arith(left)} + {render_arith(right)})"
        case Sub(left, right):
            return f"({render_arith(left)} - {render_arith(right)})"
        case Mul(left, right):
            return f"({render_arith(left)} * {render_arith(right)})"
    raise TypeError(f"not an arithmetic expression: {a!r}")


def render_bool(b: Bool) -> str:
    match b:
        case TrueLit():
            return "true"
        case FalseLit():
            return "false"
        case Eq(left, right):
            return f"({render_arith(left)} = {render_arith(right)})"
        case Lt(left, right):
            return f"({render_arith(left)} < {render_arith(right)})"
        case Not(operand):
            return f"¬{render_bool(operand)}"
        case Or(left, right):
            return f"({render_bool(left)} ∨ {render_bool(right)})"
        case And(left, right):
            return f"({render_bool(left)} ∧ {render_bool(right)})"
    raise TypeError(f"not a boolean expression: {b!r}")


def render(p: Program) -> str:
    """Canonical fully parenthesized text of a program; parse(render(p)) == p."""
    match p:
        case Skip():
            return "skip"
        case Assign(target, value):
            return f"x[{target}] := {render_arith(value)}"
        case Seq(first, second):
            return f"({render(first)}; {render(second)})"
        case If(cond, then, orelse):
            return f"(if {render_bool(cond)} then {render(then)} else {render(orelse)})"
        case While(cond, body):
            return f"(while {render_bool(cond)} do {render(body)})"
    raise TypeError(f"not a program: {p!r}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class ImpSyntaxError(ValueError):
    """Raised for text not generated by the grammar; carries the offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


_KEYWORDS = {"skip", "if", "then", "else", "while", "do", "true", "false", "x"}

# Multi-character symbols first so maximal munch applies.
_SYMBOLS = (":=", "||", "&&", ";", "=", "<", "+", "-", "*", "(", ")", "[", "]",
            "¬", "∨", "∧", "!")
_ALIASES = {"!": "¬", "||": "∨", "&&": "∧"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            lexeme = text[i:j]
            if len(lexeme) > 1 and lexeme[0] == "0":
                raise ImpSyntaxError(f"numeral with leading zero: {lexeme}", i)
            tokens.append((lexeme, i))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word not in _KEYWORDS:
                raise ImpSyntaxError(f"unknown word: {word}", i)
            tokens.append((word, i))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append((_ALIASES.get(sym, sym), i))
                i += len(sym)
                break
        else:
            raise ImpSyntaxError(f"unexpected character: {c!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def offset(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return len(self.text)

    def fail(self, message: str):
        raise ImpSyntaxError(message, self.offset())

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, wanted: str) -> None:
        tok = self.peek()
        if tok != wanted:
            self.fail(f"expected {wanted!r}, found {tok!r}")
        self.pos += 1

    def numeral(self) -> int:
        tok = self.peek()
        if tok is None or not tok.isdigit():
            self.fail(f"expected numeral, found {tok!r}")
        self.pos += 1
        return int(tok)

    def register(self) -> int:
        self.expect("x")
        self.expect("[")
        index = self.numeral()
        self.expect("]")
        return index

    def program(self) -> Program:
        tok = self.peek()
        if tok == "skip":
            self.pos += 1
            return SKIP
        if tok == "x":
            target = self.register()
            self.expect(":=")
            return Assign(target, self.arith())
        if tok == "(":
            self.pos += 1
            inner = self.peek()
            if inner == "if":
                self.pos += 1
                cond = self.boolean()
                self.expect("then")
                then = self.program()
                self.expect("else")
                orelse = self.program()
                self.expect(")")
                return If(cond, then, orelse)
            if inner == "while":
                self.pos += 1
                cond = self.boolean()
                self.expect("do")
                body = self.program()
                self.expect(")")
                return While(cond, body)
            first = self.program()
            self.expect(";")
            second = self.program()
            self.expect(")")
            return Seq(first, second)
        self.fail(f"expected a program, found {tok!r}")

    def arith(self) -> Arith:
        tok = self.peek()
        if tok is not None and tok.isdigit():
            return Num(self.numeral())
        if tok == "x":
            return Reg(self.register())
        if tok == "(":
            self.pos += 1
            left = self.arith()
            op = self.take()
            if op not in ("+", "-", "*"):
                self.pos -= 1
                self.fail(f"expected arithmetic operator, found {op!r}")
            right = self.arith()
            self.expect(")")
            if op == "+":
                return Add(left, right)
            if op == "-":
                return Sub(left, right)
            return Mul(left, right)
        self.fail(f"expected an arithmetic expression, found {tok!r}")

    def boolean(self) -> Bool:
        tok = self.peek()
        if tok == "true":
            self.pos += 1
            return TRUE
        if tok == "false":
            self.pos += 1
            return FALSE
        if tok == "¬":
            self.pos += 1
            return Not(self.boolean())
        if tok == "(":
            # '(' may open an arithmetic comparison or a boolean connective;
            # try the comparison, and on failure rewind and take the other path.
            mark = self.pos
            try:
                self.pos += 1
                left = self.arith()
                op = self.take()
                if op not in ("=", "<"):
                    self.pos -= 1
                    self.fail(f"expected comparison operator, found {op!r}")
                right = self.arith()
                self.expect(")")
                return Eq(left, right) if op == "=" else Lt(left, right)
            except ImpSyntaxError as arith_err:
                self.pos = mark
                try:
                    self.pos += 1
                    left_b = self.boolean()
                    op = self.take()
                    if op not in ("∨", "∧"):
                        self.pos -= 1
                        self.fail(f"expected boolean operator, found {op!r}")
                    right_b = self.boolean()
                    self.expect(")")
                    return Or(left_b, right_b) if op == "∨" else And(left_b, right_b)
                except ImpSyntaxError as bool_err:
                    raise (bool_err if bool_err.position >= arith_err.position
                           else arith_err) from None
        self.fail(f"expected a boolean expression, found {tok!r}")


def parse(text: str) -> Program:
    """Parse the unique syntax tree of a fully parenthesized program text.

    Whitespace between tokens is insignificant.  ASCII aliases ``!``, ``||``
    and ``&&`` are accepted for ``¬``, ``∨`` and ``∧`` (the renderer always
    emits the canonical glyphs).  Raises ImpSyntaxError, with the text
    offset, for anything outside the grammar, including numerals with
    leading zeros.
    """
    parser = _Parser(text)
    prog = parser.program()
    if parser.peek() is not None:
        parser.fail(f"trailing input after program: {parser.peek()!r}")
    return prog


def parse_arith(text: str) -> Arith:
    parser = _Parser(text)
    expr = parser.arith()
    if parser.peek() is not None:
        parser.fail(f"trailing input after expression: {parser.peek()!r}")
    return expr


def parse_bool(text: str) -> Bool:
    parser = _Parser(text)
    expr = parser.boolean()
    if parser.peek() is not None:
        parser.fail(f"trailing input after expression: {parser.peek()!r}")
    return expr
