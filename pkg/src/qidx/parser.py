"""Expression mini-language for Laurent symbols.

Grammar:

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := var ['^' int] | literal | '(' expr ')'
    var    := 'z' | 'z1' | 'z2' | ... (1-based coordinates)
    literal:= decimal number, optionally suffixed with 'i'; bare 'i' is 1i

Powers are nonzero integers and may be negative ("z1^-3").  The dimension
is inferred from the highest coordinate used; plain 'z' is one-dimensional.
Mixing 'z' with indexed variables is rejected.  Lowering to the coefficient
map is exact.
"""

from __future__ import annotations

import re

from .errors import DimError, ParseError
from .symbol import LaurentPoly

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?|i)"
    r"|(?P<var>z\d*)"
    r"|(?P<op>[-+*^()])"
    r")"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup is None and not m.group().strip():
            pos = m.end()
            continue
        kind = m.lastgroup
        text = m.group(kind) if kind else ""
        if kind:
            tokens.append((kind, text, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.plain_z = False
        self.max_var = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", pos)
        self.take()

    # each node is a list of (exponent-map-over-var-index, complex) pairs;
    # exponent maps are dicts {axis: power} resolved to tuples at the end
    def parse(self):
        out = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos)
        return out

    def expr(self):
        sign = 1.0
        kind, text, _ = self.peek()
        if kind == "op" and text in "+-":
            self.take()
            sign = -1.0 if text == "-" else 1.0
        node = [(k, sign * c) for k, c in self.term()]
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                s = -1.0 if text == "-" else 1.0
                node = node + [(k, s * c) for k, c in rhs]
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == "*":
                self.take()
                node = _merge_mul(node, self.factor())
            else:
                return node

    def factor(self):
        kind, text, pos = self.take()
        if kind == "num":
            return [({}, _literal(text))]
        if kind == "var":
            axis = self._axis(text, pos)
            power = 1
            k2, t2, _ = self.peek()
            if k2 == "op" and t2 == "^":
                self.take()
                power = self._power()
            return [({axis: power}, 1.0 + 0j)]
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)

    def _power(self) -> int:
        sign = 1
        kind, text, pos = self.take()
        if kind == "op" and text in "+-":
            sign = -1 if text == "-" else 1
            kind, text, pos = self.take()
        if kind != "num" or not re.fullmatch(r"\d+", text):
            raise ParseError("expected an integer power", pos)
        power = sign * int(text)
        if power == 0:
            raise ParseError("powers must be nonzero integers", pos)
        return power

    def _axis(self, text: str, pos: int) -> int:
        if text == "z":
            if self.max_var:
                raise DimError("cannot mix plain z with indexed variables")
            self.plain_z = True
            return 0
        idx = int(text[1:])
        if idx < 1:
            raise ParseError("variable indices are 1-based", pos)
        if self.plain_z:
            raise DimError("cannot mix plain z with indexed variables")
        self.max_var = max(self.max_var, idx)
        return idx - 1


def _literal(text: str) -> complex:
    if text == "i":
        return 1j
    if text.endswith("i"):
        return complex(0.0, float(text[:-1]))
    return complex(float(text), 0.0)


def _merge_mul(a, b):
    out = []
    for ka, ca in a:
        for kb, cb in b:
            k = dict(ka)
            for axis, p in kb.items():
                k[axis] = k.get(axis, 0) + p
            out.append((k, ca * cb))
    return out


def parse_expression(src: str, dim: int | None = None) -> LaurentPoly:
    """Parse an expression into a symbol.

    ``dim`` forces a target dimension (constants and lower-dimensional
    expressions are embedded by right-padding exponents with zeros).
    """
    p = _Parser(src)
    node = p.parse()
    inferred = 1 if p.plain_z or p.max_var == 0 else p.max_var
    terms: dict = {}
    for kmap, c in node:
        k = tuple(kmap.get(axis, 0) for axis in range(inferred))
        terms[k] = terms.get(k, 0) + c
    poly = LaurentPoly(inferred, terms)
    if dim is not None:
        if inferred > dim:
            raise DimError(f"expression uses {inferred} variables, expected {dim}")
        poly = poly.promote(dim)
    return poly


def format_poly(a: LaurentPoly) -> str:
    """Render a symbol as an expression the parser accepts (round-trips)."""
    if not a.terms:
        return "0"
    parts = []
    for k, c in sorted(a.terms.items()):
        vars_part = "*".join(
            (("z" if a.dim == 1 else f"z{i + 1}") + (f"^{e}" if e != 1 else ""))
            for i, e in enumerate(k)
            if e != 0
        )
        coeff = _format_coeff(c, omit_one=bool(vars_part))
        if coeff and vars_part:
            parts.append(f"{coeff}*{vars_part}")
        else:
            parts.append(coeff or vars_part)
    return " + ".join(parts)


def _format_coeff(c: complex, omit_one: bool) -> str:
    if c.imag == 0.0:
        if omit_one and c.real == 1.0:
            return ""
        return repr(c.real) if c.real >= 0 else f"(-{-c.real!r})"
    if c.real == 0.0:
        return f"{c.imag!r}i" if c.imag >= 0 else f"(-{-c.imag!r}i)"
    im = f"+{c.imag!r}i" if c.imag >= 0 else f"-{-c.imag!r}i"
    re = repr(c.real) if c.real >= 0 else f"-{-c.real!r}"
    return f"({re}{im})"
