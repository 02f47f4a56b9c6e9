"""
Text and JSON forms of QAHD expressions.

Grammar:
  expr        := signed_term (('+'|'-') signed_term)*  |  '0'
  signed_term := [coeff '*'] term
  coeff       := a | ai | a+bi | a-bi                  (decimal reals)
  term        := xplus(λ,k) | xminus(λ,k) | pfplus(n,k) | pfminus(n,k)
               | delta(m) | xplusi0(λ,k) | xminusi0(λ,k)

xplusi0 / xminusi0 are expanded through expand_i0 while parsing.
"""
import re
import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import InvalidTerm, ParseError
from .qahd_algebra import (
    Family,
    PF_FAMILIES,
    POWER_FAMILIES,
    QahdExpr,
    QahdTerm,
    canonicalize,
    delta,
    expand_i0,
    pfminus,
    pfplus,
    xminus,
    xplus,
)

logger = logging.getLogger("services.expr_text")

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_UNUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RX = re.compile(
    rf"(?P<re>{_NUM})(?P<im>[+-]{_UNUM})i|(?P<only>{_NUM})(?P<imag>i)?"
)
_INT_RX = re.compile(r"\d+")
_NAME_RX = re.compile(r"[a-z][a-z0-9]*")

_FAMILY_ORDER = {f: i for i, f in enumerate(Family)}


# ---------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------
def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return repr(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def format_term(term: QahdTerm) -> str:
    fam = term.family
    if fam in POWER_FAMILIES:
        return f"{fam.value}({format_complex(term.degree)},{term.k})"
    if fam in PF_FAMILIES:
        return f"{fam.value}({term.n},{term.k})"
    return f"delta({term.m})"


def term_sort_key(term: QahdTerm) -> Tuple:
    lam = term.degree if term.degree is not None else 0j
    return (_FAMILY_ORDER[term.family], lam.real, lam.imag, term.n or 0, term.k, term.m or 0)


def format_expr(expr: QahdExpr) -> str:
    if expr.is_zero():
        return "0"
    parts = [
        f"{format_complex(c)}*{format_term(t)}"
        for t, c in sorted(expr.items(), key=lambda tc: term_sort_key(tc[0]))
    ]
    return " + ".join(parts)


# ---------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------
class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str, expected: str = None):
        offset = len(self.text[: self.pos].encode("utf-8"))
        raise ParseError(message, offset, expected)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail(f"unexpected {self.peek()!r}" if self.peek() else "unexpected end of input", repr(ch))
        self.pos += 1

    def complex_literal(self) -> complex:
        self.skip_ws()
        m = _COMPLEX_RX.match(self.text, self.pos)
        if not m:
            self.fail("malformed number", "complex literal like 1.5, 2i, 1-0.5i")
        self.pos = m.end()
        return self._literal_value(m)

    def integer(self) -> int:
        self.skip_ws()
        m = _INT_RX.match(self.text, self.pos)
        if not m:
            self.fail("malformed integer", "nonnegative integer")
        self.pos = m.end()
        return int(m.group(0))

    def term(self) -> List[Tuple[QahdTerm, complex]]:
        self.skip_ws()
        m = _NAME_RX.match(self.text, self.pos)
        if not m:
            self.fail("missing term", "one of " + ", ".join(_TERM_BUILDERS))
        name = m.group(0)
        if name not in _TERM_BUILDERS:
            self.fail(f"unknown term {name!r}", "one of " + ", ".join(_TERM_BUILDERS))
        self.pos = m.end()
        self.expect("(")
        readers, build = _TERM_BUILDERS[name]
        args = []
        for i, reader in enumerate(readers):
            if i:
                self.expect(",")
            args.append(reader(self))
        self.expect(")")
        return build(*args)

    def coefficient(self) -> Optional[complex]:
        """A literal followed by '*', or None with the position untouched."""
        self.skip_ws()
        start = self.pos
        m = _COMPLEX_RX.match(self.text, self.pos)
        if m and m.group(0):
            self.pos = m.end()
            if self.peek() == "*":
                self.pos += 1
                return self._literal_value(m)
        self.pos = start
        return None

    def signed_term(self, sign: float) -> List[Tuple[QahdTerm, complex]]:
        coeff = self.coefficient()
        if coeff is None and self.peek() and self.peek() in "+-":
            if self.peek() == "-":
                sign = -sign
            self.pos += 1
            # "- 2*delta(0)": the literal may follow the sign after blanks
            coeff = self.coefficient()
        if coeff is None:
            coeff = 1.0 + 0j
        return [(t, sign * coeff * c) for t, c in self.term()]

    @staticmethod
    def _literal_value(m: "re.Match") -> complex:
        if m.group("re") is not None:
            return complex(float(m.group("re")), float(m.group("im")))
        value = float(m.group("only"))
        return complex(0.0, value) if m.group("imag") else complex(value, 0.0)

    def expression(self) -> QahdExpr:
        if not self.text.strip():
            self.fail("empty expression", "term")
        if self.text.strip() == "0":
            return QahdExpr()
        raw = self.signed_term(1.0)
        while True:
            ch = self.peek()
            if not ch:
                break
            if ch not in "+-":
                self.fail(f"unexpected {ch!r}", "'+', '-' or end of input")
            self.pos += 1
            raw.extend(self.signed_term(1.0 if ch == "+" else -1.0))
        return canonicalize(raw)


def _wrap(factory: Callable[..., QahdTerm]) -> Callable[..., List[Tuple[QahdTerm, complex]]]:
    return lambda *args: [(factory(*args), 1.0)]


def _i0(sign: str) -> Callable[..., List[Tuple[QahdTerm, complex]]]:
    return lambda lam, k: list(expand_i0(sign, lam, k).items())


_TERM_BUILDERS: Dict[str, Tuple[Tuple[Callable, ...], Callable]] = {
    "xplus": ((_Parser.complex_literal, _Parser.integer), _wrap(xplus)),
    "xminus": ((_Parser.complex_literal, _Parser.integer), _wrap(xminus)),
    "pfplus": ((_Parser.integer, _Parser.integer), _wrap(pfplus)),
    "pfminus": ((_Parser.integer, _Parser.integer), _wrap(pfminus)),
    "delta": ((_Parser.integer,), _wrap(delta)),
    "xplusi0": ((_Parser.complex_literal, _Parser.integer), _i0("plus")),
    "xminusi0": ((_Parser.complex_literal, _Parser.integer), _i0("minus")),
}


def parse_complex(text: str) -> complex:
    parser = _Parser(text)
    value = parser.complex_literal()
    if parser.peek():
        parser.fail(f"unexpected {parser.peek()!r}", "end of number")
    return value


def parse_expr(text: str) -> QahdExpr:
    expr = _Parser(text).expression()
    logger.debug("Parsed %r into %d terms", text, len(expr))
    return expr


# ---------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------
def complex_to_json(z: complex) -> Dict[str, float]:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj: Any) -> complex:
    if isinstance(obj, dict):
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    return complex(obj)


def term_to_json(term: QahdTerm) -> Dict[str, Any]:
    out: Dict[str, Any] = {"family": term.family.value}
    if term.family in POWER_FAMILIES:
        out["degree"] = complex_to_json(term.degree)
    if term.family in PF_FAMILIES:
        out["n"] = term.n
    if term.family is Family.DELTA:
        out["m"] = term.m
    else:
        out["k"] = term.k
    return out


def expr_to_json(expr: QahdExpr) -> List[Dict[str, Any]]:
    rows = []
    for term, coeff in sorted(expr.items(), key=lambda tc: term_sort_key(tc[0])):
        row = term_to_json(term)
        row["coeff"] = complex_to_json(coeff)
        rows.append(row)
    return rows


def expr_from_json(rows: List[Dict[str, Any]]) -> QahdExpr:
    raw = []
    for row in rows:
        try:
            fam = Family(row["family"])
        except (KeyError, ValueError) as e:
            raise InvalidTerm(f"bad family in {row!r}") from e
        term = QahdTerm(
            fam,
            degree=complex_from_json(row["degree"]) if "degree" in row else None,
            n=row.get("n"),
            k=row.get("k", 0),
            m=row.get("m"),
        )
        raw.append((term, complex_from_json(row.get("coeff", 1.0))))
    return canonicalize(raw)
