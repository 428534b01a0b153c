"""A small expression language for fields ``x(t, z)`` holomorphic in ``z``.

Grammar (whitespace insignificant, ``#`` starts a comment)::

    coords := expr (',' expr)*
    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' integer)?
    base   := number | 't' | 'z' index | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'sin' | 'cos'
    number := decimal literal with optional 'i' suffix (imaginary)

Everything the grammar admits is entire in the state variables
``z0 .. z{n-1}``: there is no ``conj``/``abs``/``re``/``im`` and a
denominator may depend on ``t`` only. Violations are rejected at parse
time.

A field file holds the coordinate list plus a domain block::

    z1, -z0
    domain { t0=0, A=0.5, center=[0, 0], radius=2, p=2 }
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, EvaluationError, FieldSyntaxError, ParameterError
from .lincomplex import Box, Interval, cvector

__all__ = [
    "Node",
    "Const",
    "Time",
    "State",
    "Neg",
    "BinOp",
    "Pow",
    "Call",
    "FieldExpr",
    "Field",
    "parse_field",
    "parse_field_file",
    "load_field",
    "eval_field",
]

FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}
FORBIDDEN = {"conj", "abs", "re", "im", "real", "imag", "arg", "log", "sqrt"}


class Node:
    """Base of the expression tree."""

    has_state = False

    def evaluate(self, t, z):
        raise NotImplementedError

    def to_source(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Node):
    value: complex

    def evaluate(self, t, z):
        return complex(self.value)

    def to_source(self):
        v = complex(self.value)
        if v.imag == 0:
            s = repr(float(v.real))
            return f"({s})" if s.startswith("-") else s
        sign = "-" if np.signbit(v.imag) else "+"
        return f"({v.real!r}{sign}{abs(v.imag)!r}i)"


@dataclass(frozen=True)
class Time(Node):
    def evaluate(self, t, z):
        return t

    def to_source(self):
        return "t"


@dataclass(frozen=True)
class State(Node):
    index: int

    has_state = True

    def evaluate(self, t, z):
        return z[..., self.index]

    def to_source(self):
        return f"z{self.index}"


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    @property
    def has_state(self):
        return self.arg.has_state

    def evaluate(self, t, z):
        return -self.arg.evaluate(t, z)

    def to_source(self):
        return f"(-{self.arg.to_source()})"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def has_state(self):
        return self.left.has_state or self.right.has_state

    def evaluate(self, t, z):
        a = self.left.evaluate(t, z)
        b = self.right.evaluate(t, z)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        return a / b

    def to_source(self):
        return f"({self.left.to_source()} {self.op} {self.right.to_source()})"


def _ipow(a, k: int):
    result = 1.0 + 0j
    base = a
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int

    @property
    def has_state(self):
        return self.base.has_state

    def evaluate(self, t, z):
        return _ipow(self.base.evaluate(t, z), self.exponent)

    def to_source(self):
        return f"({self.base.to_source()})^{self.exponent}"


@dataclass(frozen=True)
class Call(Node):
    name: str
    arg: Node

    @property
    def has_state(self):
        return self.arg.has_state

    def evaluate(self, t, z):
        return FUNCS[self.name](np.asarray(self.arg.evaluate(t, z), dtype=complex))

    def to_source(self):
        return f"{self.name}({self.arg.to_source()})"


# --------------------------------------------------------------------------
# tokenizer and parser

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?:i(?![A-Za-z0-9_]))?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _strip_comments(source: str) -> str:
    return re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), source)


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise FieldSyntaxError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        else:
            for i, ch in enumerate(text):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, source: str, n: int):
        self.toks = _tokenize(source)
        self.i = 0
        self.n = n

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return FieldSyntaxError(msg, tok.line, tok.col)

    def take(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text):
        if self.tok.text != text:
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.take()

    def coords(self) -> list[Node]:
        out = [self.expr()]
        while self.tok.text == ",":
            self.take()
            out.append(self.expr())
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return out

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            at = self.tok
            rhs = self.factor()
            if op == "/" and rhs.has_state:
                raise self.error("state variable in denominator", at)
            node = BinOp(op, node, rhs)
        return node

    def factor(self) -> Node:
        if self.tok.text in ("+", "-"):
            sign = self.take().text
            arg = self.factor()
            return Neg(arg) if sign == "-" else arg
        node = self.base()
        if self.tok.text == "^":
            self.take()
            tok = self.tok
            if tok.kind != "number" or not tok.text.isdigit():
                raise self.error("exponent must be a non-negative integer literal", tok)
            self.take()
            node = Pow(node, int(tok.text))
        return node

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.take()
            if tok.text.endswith("i"):
                return Const(complex(0.0, float(tok.text[:-1])))
            return Const(complex(float(tok.text)))
        if tok.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            name = tok.text
            if name.lower() in FORBIDDEN:
                raise self.error(f"forbidden non-holomorphic function {name!r}", tok)
            self.take()
            if name == "t":
                return Time()
            m = re.fullmatch(r"z(\d+)", name)
            if m:
                idx = int(m.group(1))
                if idx >= self.n:
                    raise self.error(f"unknown identifier {name!r} (state dimension is {self.n})", tok)
                return State(idx)
            if name in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            raise self.error(f"unknown identifier {name!r}", tok)
        shown = tok.text or "end of input"
        raise self.error(f"unexpected {shown!r}")


@dataclass(frozen=True)
class FieldExpr:
    """One expression tree per output coordinate, over state dimension ``n``."""

    coords: tuple
    n: int

    def __post_init__(self):
        if len(self.coords) != self.n:
            raise ParameterError(f"{len(self.coords)} coordinates for state dimension {self.n}")

    def __call__(self, t, z):
        """Evaluate on a batch: ``z`` of shape ``(..., n)``, ``t`` broadcastable to ``(...)``."""
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(t.shape, z.shape[:-1])
        with np.errstate(all="ignore"):
            cols = [np.broadcast_to(c.evaluate(t, z), shape) for c in self.coords]
        return np.stack(cols, axis=-1).astype(complex)

    def to_source(self) -> str:
        return ", ".join(c.to_source() for c in self.coords)

    def _combine(self, other, op):
        if self.n != other.n:
            raise ParameterError("field expressions of different dimension")
        return FieldExpr(tuple(BinOp(op, a, b) for a, b in zip(self.coords, other.coords)), self.n)

    def scaled(self, alpha) -> "FieldExpr":
        return FieldExpr(tuple(BinOp("*", Const(complex(alpha)), c) for c in self.coords), self.n)


def parse_field(source: str, n: int) -> FieldExpr:
    """Parse a comma-separated coordinate list into a :class:`FieldExpr`."""
    if n < 1:
        raise ParameterError(f"state dimension must be positive, got {n}")
    coords = _Parser(_strip_comments(source), n).coords()
    if len(coords) != n:
        raise FieldSyntaxError(f"expected {n} coordinates, found {len(coords)}", 1, 1)
    return FieldExpr(tuple(coords), n)


@dataclass(frozen=True, eq=False)
class Field:
    """A field ``x : I x B(center, radius) -> C^n`` given by an expression."""

    expr: FieldExpr
    domain: Box

    def __post_init__(self):
        if self.expr.n != self.domain.dim:
            raise ParameterError(
                f"expression dimension {self.expr.n} != domain dimension {self.domain.dim}"
            )

    @classmethod
    def from_source(cls, source: str, domain: Box) -> "Field":
        return cls(parse_field(source, domain.dim), domain)

    @classmethod
    def zero(cls, domain: Box) -> "Field":
        return cls(FieldExpr((Const(0j),) * domain.dim, domain.dim), domain)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, t, xi):
        return eval_field(self, t, xi)

    def source(self) -> str:
        return self.expr.to_source()

    def _other(self, other):
        if not isinstance(other, Field):
            return None
        if other.domain != self.domain:
            raise ParameterError("field arithmetic needs identical domains")
        return other

    def __add__(self, other):
        if self._other(other) is None:
            return NotImplemented
        return Field(self.expr._combine(other.expr, "+"), self.domain)

    def __sub__(self, other):
        if self._other(other) is None:
            return NotImplemented
        return Field(self.expr._combine(other.expr, "-"), self.domain)

    def __mul__(self, alpha):
        if not np.isscalar(alpha):
            return NotImplemented
        return Field(self.expr.scaled(alpha), self.domain)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def eval_field(f: Field, t, xi) -> np.ndarray:
    """Evaluate ``f`` at ``(t, xi)``; ``xi`` may be a batch of shape ``(..., n)``.

    Raises :class:`DomainError` for the first sample outside the closed
    domain and :class:`EvaluationError` on a non-finite result.
    """
    xi = np.asarray(xi, dtype=complex)
    t = np.asarray(t, dtype=float)
    box = f.domain
    iv = box.interval
    tol = 1e-12 * max(1.0, iv.A, abs(iv.t0))
    dist = np.asarray(box.distance(xi))
    shape = np.broadcast_shapes(t.shape, dist.shape)
    tb = np.broadcast_to(t, shape)
    db = np.broadcast_to(dist, shape)
    bad = (tb < iv.lo - tol) | (tb > iv.hi + tol) | (db > box.radius * (1 + 1e-12))
    if bad.any():
        k = tuple(np.argwhere(bad)[0])
        tt, dd = float(tb[k]), float(db[k])
        raise DomainError(
            f"point (t={tt:.6g}, |xi - center|={dd:.6g}) outside domain "
            f"[{iv.lo:.6g}, {iv.hi:.6g}] x B({box.radius:.6g})",
            t=tt,
            distance=dd,
        )
    out = f.expr(t, xi)
    if not np.all(np.isfinite(out)):
        k = tuple(np.argwhere(~np.isfinite(out))[0][:-1])
        raise EvaluationError(f"non-finite field value at t={float(tb[k]):.6g}", node=float(tb[k]))
    return out


# --------------------------------------------------------------------------
# field files

_DOMAIN = re.compile(r"domain\s*\{(?P<body>[^}]*)\}", re.DOTALL)
_ITEM = re.compile(r"(?P<key>\w+)\s*=\s*(?P<val>\[[^\]]*\]|[^,}\s][^,}]*)")


def _complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    return complex(s)


def parse_field_file(text: str) -> Field:
    """Parse field-file text (coordinate list plus ``domain { ... }`` block)."""
    text = _strip_comments(text)
    m = _DOMAIN.search(text)
    if m is None:
        raise FieldSyntaxError("missing 'domain { ... }' block", 1, 1)
    items = {}
    for it in _ITEM.finditer(m.group("body")):
        items[it.group("key")] = it.group("val").strip()
    missing = {"t0", "A", "center", "radius"} - items.keys()
    if missing:
        line = text.count("\n", 0, m.start()) + 1
        raise FieldSyntaxError(f"domain block lacks {sorted(missing)}", line, 1)
    try:
        center_txt = items["center"].strip("[] ")
        center = [_complex(c) for c in center_txt.split(",") if c.strip()]
        box = Box(
            Interval(float(items["t0"]), float(items["A"])),
            cvector(center),
            float(items["radius"]),
            float(items.get("p", 2.0)),
        )
    except ValueError as exc:
        line = text.count("\n", 0, m.start()) + 1
        raise FieldSyntaxError(f"bad domain block: {exc}", line, 1) from exc
    # blank the block out in place so coordinate error positions stay valid
    blanked = text[: m.start()] + re.sub(r"[^\n]", " ", m.group()) + text[m.end() :]
    return Field(parse_field(blanked, box.dim), box)


def load_field(path) -> Field:
    return parse_field_file(Path(path).read_text(encoding="utf-8"))
