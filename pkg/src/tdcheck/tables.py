"""Bundled module tables: basis labels, coefficient grammar, parser, printer.

A table file describes, for one diameter d, the 2^d basis labels (one line
per row block) and the action of the two generators on that basis.  Entries
look like

    lr2 : th1*lr2 + (y1 - eps0)*r2 + (beta+1)^-1*lr3

i.e. a sum of coefficient*label terms.  Coefficients are expressions over
integer literals, the named scalars th0..thd, ths0..thsd, y1..yd, beta,
eps0..eps(d-2), parentheses and + - * / ^ with integer (possibly negative)
exponents.  Precedence, tightest first: ^, unary -, * and /, binary + and -.

The printer emits a canonical form and parsing is loss-free: re-serializing a
parsed bundled table reproduces the file byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

FORMAT_VERSION = "module-table v1"

MAX_TABLE_D = 5


class TableError(ValueError):
    pass


class ParseError(TableError):
    def __init__(self, msg: str, line: int = None, col: int = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(msg + where)


class EvaluationError(TableError):
    pass


# ---------------------------------------------------------------------------
# Basis labels


@dataclass(frozen=True)
class BasisLabel:
    """A basis label: 'phi' or a word in l/r with positive exponents."""

    parts: Tuple[Tuple[str, int], ...]  # e.g. (('l',1),('r',2)) for "lr2"

    def __str__(self) -> str:
        if not self.parts:
            return "phi"
        return "".join(s + (str(e) if e > 1 else "") for s, e in self.parts)

    @property
    def row_index(self) -> int:
        """Row block: total r-degree minus total l-degree."""
        return sum(e if s == "r" else -e for s, e in self.parts)


PHI = BasisLabel(())

_LABEL_RE = re.compile(r"([lr])([0-9]*)")


def parse_label(text: str) -> BasisLabel:
    if text == "phi":
        return PHI
    parts = []
    pos = 0
    for m in _LABEL_RE.finditer(text):
        if m.start() != pos:
            raise TableError(f"bad basis label {text!r}")
        sym, digits = m.group(1), m.group(2)
        if digits == "":
            exp = 1
        else:
            exp = int(digits)
            if exp < 2:
                raise TableError(f"bad basis label {text!r}: exponent {exp} not canonical")
        if parts and parts[-1][0] == sym:
            raise TableError(f"bad basis label {text!r}: repeated symbol run")
        parts.append((sym, exp))
        pos = m.end()
    if pos != len(text) or not parts:
        raise TableError(f"bad basis label {text!r}")
    return BasisLabel(tuple(parts))


def power_label(sym: str, exp: int) -> BasisLabel:
    """r^h (or l^h) as a label; exponent 0 gives phi."""
    if exp == 0:
        return PHI
    return BasisLabel(((sym, exp),))


def chain_label(lexp: int, rexp: int) -> BasisLabel:
    """l^a r^b with a >= 0 < b, the labels walked by the weight certificate."""
    if lexp == 0:
        return power_label("r", rexp)
    return BasisLabel((("l", lexp), ("r", rexp)))


# ---------------------------------------------------------------------------
# Coefficient expressions


@dataclass(frozen=True)
class Num:
    value: int  # nonnegative; negatives are wrapped in Neg


@dataclass(frozen=True)
class Name:
    text: str


@dataclass(frozen=True)
class Neg:
    child: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


Expr = Union[Num, Name, Neg, Add, Sub, Mul, Div, Pow]

ONE = Num(1)

_NAME_RE = re.compile(r"^(th|ths|y|eps)([0-9]+)$")


def check_scalar_name(text: str, d: int) -> None:
    """Reject identifiers that are not legal scalar names for diameter d."""
    if text == "beta":
        if d < 3:
            raise TableError(f"unknown scalar name {text!r}: beta needs d >= 3")
        return
    m = _NAME_RE.match(text)
    if not m:
        raise TableError(f"unknown scalar name {text!r}")
    prefix, idx = m.group(1), int(m.group(2))
    ok = {
        "th": 0 <= idx <= d,
        "ths": 0 <= idx <= d,
        "y": 1 <= idx <= d,
        "eps": d >= 2 and 0 <= idx <= d - 2,
    }[prefix]
    if not ok:
        raise TableError(f"unknown scalar name {text!r} for d={d}")


def evaluate(expr: Expr, env: Dict[str, object], field) -> object:
    """Evaluate an expression tree at concrete scalars."""
    if isinstance(expr, Num):
        return field.from_int(expr.value)
    if isinstance(expr, Name):
        try:
            return env[expr.text]
        except KeyError:
            raise EvaluationError(f"no value bound for {expr.text!r}") from None
    if isinstance(expr, Neg):
        return field.neg(evaluate(expr.child, env, field))
    if isinstance(expr, Add):
        return field.add(evaluate(expr.left, env, field), evaluate(expr.right, env, field))
    if isinstance(expr, Sub):
        return field.sub(evaluate(expr.left, env, field), evaluate(expr.right, env, field))
    if isinstance(expr, Mul):
        return field.mul(evaluate(expr.left, env, field), evaluate(expr.right, env, field))
    if isinstance(expr, Div):
        den = evaluate(expr.right, env, field)
        if field.is_zero(den):
            raise EvaluationError(f"division by zero in {format_expr(expr)!r}")
        return field.div(evaluate(expr.left, env, field), den)
    if isinstance(expr, Pow):
        base = evaluate(expr.base, env, field)
        e = expr.exp
        if e < 0:
            if field.is_zero(base):
                raise EvaluationError(f"zero base with negative power in {format_expr(expr)!r}")
            base = field.inv(base)
            e = -e
        acc = field.one
        for _ in range(e):
            acc = field.mul(acc, base)
        return acc
    raise TypeError(f"not an expression node: {expr!r}")


# Printer precedence; higher binds tighter.
_PREC_SUM, _PREC_PROD, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(expr: Expr) -> int:
    if isinstance(expr, (Add, Sub)):
        return _PREC_SUM
    if isinstance(expr, (Mul, Div)):
        return _PREC_PROD
    if isinstance(expr, Neg):
        return _PREC_NEG
    if isinstance(expr, Pow):
        return _PREC_POW
    return _PREC_ATOM


def format_expr(expr: Expr) -> str:
    """Canonical text with minimal parentheses."""
    if isinstance(expr, Num):
        return str(expr.value)
    if isinstance(expr, Name):
        return expr.text
    if isinstance(expr, Neg):
        inner = format_expr(expr.child)
        if _prec(expr.child) < _PREC_NEG:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(expr, (Add, Sub)):
        op = "+" if isinstance(expr, Add) else "-"
        left = format_expr(expr.left)
        if _prec(expr.left) < _PREC_SUM:
            left = f"({left})"
        right = format_expr(expr.right)
        if _prec(expr.right) <= _PREC_SUM:
            right = f"({right})"
        return left + op + right
    if isinstance(expr, (Mul, Div)):
        op = "*" if isinstance(expr, Mul) else "/"
        left = format_expr(expr.left)
        if _prec(expr.left) < _PREC_PROD:
            left = f"({left})"
        right = format_expr(expr.right)
        if _prec(expr.right) <= _PREC_PROD:
            right = f"({right})"
        return left + op + right
    if isinstance(expr, Pow):
        base = format_expr(expr.base)
        if _prec(expr.base) < _PREC_ATOM:
            base = f"({base})"
        return f"{base}^{expr.exp}"
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------------------
# Tokenizer / recursive-descent parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>[0-9]+)|(?P<ident>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^():]))"
)


class _Tokens:
    def __init__(self, text: str, line_no: int):
        self.text = text
        self.line_no = line_no
        self.toks: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise ParseError(
                    f"unexpected character {rest[0]!r}", line_no, pos + 1
                )
            if m.group("num"):
                self.toks.append(("num", m.group("num"), m.start("num")))
            elif m.group("ident"):
                self.toks.append(("ident", m.group("ident"), m.start("ident")))
            else:
                self.toks.append(("op", m.group("op"), m.start("op")))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Tuple[str, str, int]:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of entry", self.line_no, len(self.text))
        self.i += 1
        return t

    def expect_op(self, op: str):
        t = self.next()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}, found {t[1]!r}", self.line_no, t[2] + 1)

    def error(self, msg: str, tok=None) -> ParseError:
        col = (tok[2] + 1) if tok else len(self.text)
        return ParseError(msg, self.line_no, col)


class _ExprParser:
    """Recursive descent over one entry line; d is needed for name checking."""

    def __init__(self, toks: _Tokens, d: int):
        self.t = toks
        self.d = d

    # expr := ['-'] prod (('+'|'-') prod)*
    def expr(self) -> Expr:
        node = self.signed_prod()
        while True:
            nxt = self.t.peek()
            if nxt and nxt[0] == "op" and nxt[1] in "+-":
                self.t.next()
                rhs = self.prod()
                node = Add(node, rhs) if nxt[1] == "+" else Sub(node, rhs)
            else:
                return node

    def signed_prod(self) -> Expr:
        nxt = self.t.peek()
        if nxt and nxt[0] == "op" and nxt[1] == "-":
            # leading minus of a sum: applies to the first factor only
            return self.prod(lead_neg=True)
        return self.prod()

    # prod := factor (('*'|'/') factor)*
    def prod(self, lead_neg: bool = False) -> Expr:
        node = self.factor(lead_neg=lead_neg)
        while True:
            nxt = self.t.peek()
            if nxt and nxt[0] == "op" and nxt[1] in "*/":
                self.t.next()
                rhs = self.factor()
                node = Mul(node, rhs) if nxt[1] == "*" else Div(node, rhs)
            else:
                return node

    # factor := ['-'] power
    def factor(self, lead_neg: bool = False) -> Expr:
        if lead_neg:
            self.t.expect_op("-")
            return Neg(self.power())
        nxt = self.t.peek()
        if nxt and nxt[0] == "op" and nxt[1] == "-":
            self.t.next()
            return Neg(self.power())
        return self.power()

    # power := atom ['^' ['-'] int]
    def power(self) -> Expr:
        base = self.atom()
        nxt = self.t.peek()
        if nxt and nxt[0] == "op" and nxt[1] == "^":
            self.t.next()
            sign = 1
            nxt = self.t.peek()
            if nxt and nxt[0] == "op" and nxt[1] == "-":
                self.t.next()
                sign = -1
            tok = self.t.next()
            if tok[0] != "num":
                raise self.t.error("exponent must be an integer", tok)
            return Pow(base, sign * int(tok[1]))
        return base

    def atom(self) -> Expr:
        tok = self.t.next()
        kind, text, pos = tok
        if kind == "num":
            return Num(int(text))
        if kind == "ident":
            try:
                check_scalar_name(text, self.d)
            except TableError as e:
                raise self.t.error(str(e), tok) from None
            return Name(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.t.expect_op(")")
            return node
        raise self.t.error(f"unexpected token {text!r}", tok)


# ---------------------------------------------------------------------------
# Action entries: label : term + term - term ...
#
# Each term is [coeff*]LABEL with the label as the last *-factor; coefficient
# expressions with top-level sums must be parenthesized.


def _is_label_token(text: str) -> bool:
    if text == "phi":
        return True
    return bool(re.fullmatch(r"(?:[lr][0-9]*)+", text))


def _parse_term(p: _ExprParser, basis: set) -> Tuple[Expr, BasisLabel]:
    """One product chain whose final '*'-factor is a basis label."""
    factors: List[Tuple[str, Expr, object]] = []  # (op, node-or-None, token)
    op = "*"
    while True:
        tok = p.t.peek()
        if tok is None:
            break
        kind, text, _ = tok
        if kind == "ident" and _is_label_token(text):
            p.t.next()
            label_tok = tok
            nxt = p.t.peek()
            if nxt and nxt[0] == "op" and nxt[1] in "*/^":
                raise p.t.error("basis label must end its term", nxt)
            if op != "*":
                raise p.t.error("basis label cannot sit under division", label_tok)
            label = parse_label(text)
            if label not in basis:
                raise p.t.error(f"label {text!r} not in basis", label_tok)
            coeff: Expr = ONE
            for k, (fop, node, _tok) in enumerate(factors):
                if k == 0:
                    coeff = node
                elif fop == "*":
                    coeff = Mul(coeff, node)
                else:
                    coeff = Div(coeff, node)
            return coeff, label
        node = p.factor()
        factors.append((op, node, tok))
        nxt = p.t.peek()
        if nxt and nxt[0] == "op" and nxt[1] in "*/":
            p.t.next()
            op = nxt[1]
            continue
        raise p.t.error("entry term must end with a basis label", nxt or tok)
    raise p.t.error("entry term must end with a basis label")


def _parse_entry(
    line: str, line_no: int, d: int, basis: set
) -> Tuple[BasisLabel, List[Tuple[Expr, BasisLabel]]]:
    toks = _Tokens(line, line_no)
    head = toks.next()
    if head[0] != "ident" or not _is_label_token(head[1]):
        raise toks.error("entry must start with a basis label", head)
    source = parse_label(head[1])
    if source not in basis:
        raise toks.error(f"label {head[1]!r} not in basis", head)
    toks.expect_op(":")
    p = _ExprParser(toks, d)
    terms: List[Tuple[Expr, BasisLabel]] = []
    negate = False
    nxt = toks.peek()
    if nxt and nxt[0] == "op" and nxt[1] == "-":
        toks.next()
        negate = True
    while True:
        coeff, label = _parse_term(p, basis)
        if negate:
            coeff = Neg(coeff)
        terms.append((coeff, label))
        nxt = toks.peek()
        if nxt is None:
            break
        if nxt[0] == "op" and nxt[1] in "+-":
            toks.next()
            negate = nxt[1] == "-"
            continue
        raise toks.error(f"unexpected token {nxt[1]!r} after term", nxt)
    return source, terms


def _format_term(coeff: Expr, label: BasisLabel) -> Tuple[str, str]:
    """(sign, body) with sign '+' or '-'; Neg coefficients print as '- body'."""
    sign = "+"
    if isinstance(coeff, Neg):
        sign = "-"
        coeff = coeff.child
    if coeff == ONE:
        return sign, str(label)
    body = format_expr(coeff)
    if _prec(coeff) < _PREC_PROD:
        body = f"({body})"
    return sign, f"{body}*{str(label)}"


_WRAP_WIDTH = 100


def _format_entry(source: BasisLabel, terms: Sequence[Tuple[Expr, BasisLabel]]) -> List[str]:
    pieces = [_format_term(c, l) for c, l in terms]
    sign0, body0 = pieces[0]
    first = f"{source} : " + (body0 if sign0 == "+" else f"-{body0}")
    lines = [first]
    for sign, body in pieces[1:]:
        chunk = f" {sign} {body}"
        if len(lines[-1]) + len(chunk) > _WRAP_WIDTH and len(lines[-1]) > 4:
            lines.append("    " + chunk.lstrip())
        else:
            lines[-1] += chunk
    return lines


# ---------------------------------------------------------------------------
# Module tables

Action = Dict[BasisLabel, List[Tuple[Expr, BasisLabel]]]


@dataclass
class ModuleTable:
    d: int
    basis: List[BasisLabel]
    basis_rows: List[List[BasisLabel]]  # row blocks as laid out in the file
    a_action: Action
    astar_action: Action
    version: str = FORMAT_VERSION

    def row_of(self, label: BasisLabel) -> int:
        return label.row_index

    def index_of(self, label: BasisLabel) -> int:
        return self.basis.index(label)

    def coefficient_slots(self) -> List[Tuple[str, BasisLabel, int]]:
        """All (action, source, term index) coordinates, for mutation tests."""
        out = []
        for name, action in (("a", self.a_action), ("astar", self.astar_action)):
            for src in self.basis:
                for k in range(len(action[src])):
                    out.append((name, src, k))
        return out

    def with_negated_coefficient(self, action: str, source: BasisLabel, k: int) -> "ModuleTable":
        """Copy of the table with one coefficient's sign flipped."""
        def patch(act: Action, flip: bool) -> Action:
            new = {}
            for src, terms in act.items():
                terms = list(terms)
                if flip and src == source:
                    c, l = terms[k]
                    c = c.child if isinstance(c, Neg) else Neg(c)
                    terms[k] = (c, l)
                new[src] = terms
            return new

        return ModuleTable(
            d=self.d,
            basis=list(self.basis),
            basis_rows=[list(r) for r in self.basis_rows],
            a_action=patch(self.a_action, action == "a"),
            astar_action=patch(self.astar_action, action == "astar"),
            version=self.version,
        )


def _validate_structure(table: ModuleTable):
    d = table.d
    if len(table.basis) != 2**d:
        raise TableError(f"basis has {len(table.basis)} labels, expected {2**d}")
    if len(set(table.basis)) != len(table.basis):
        raise TableError("basis labels are not pairwise distinct")
    if len(table.basis_rows) != d + 1:
        raise TableError(f"basis has {len(table.basis_rows)} rows, expected {d + 1}")
    for j, row in enumerate(table.basis_rows):
        for label in row:
            if label.row_index != j:
                raise TableError(
                    f"label {label} sits in row {j} but has row index {label.row_index}"
                )
    for gen, action in (("a", table.a_action), ("astar", table.astar_action)):
        prefix = "th" if gen == "a" else "ths"
        if set(action) != set(table.basis):
            raise TableError(f"action {gen} does not cover the basis exactly")
        for src, terms in action.items():
            if not terms:
                raise TableError(f"action {gen}: empty entry for {src}")
            diag_coeff, diag_label = terms[0]
            want = Name(f"{prefix}{src.row_index}")
            if diag_label != src or diag_coeff != want:
                raise TableError(
                    f"action {gen}: entry for {src} must start with {want.text}*{src}"
                )
            for _, tgt in terms:
                if tgt not in set(table.basis):
                    raise TableError(f"action {gen}: target {tgt} not in basis")


def parse_table(text: str) -> ModuleTable:
    """Parse one table file; structural invariants are checked."""
    raw_lines = text.splitlines()
    # join continuation lines (indented) onto their entry line
    logical: List[Tuple[int, str]] = []
    for no, line in enumerate(raw_lines, start=1):
        if not line.strip():
            continue
        if line[0] in " \t" and logical:
            logical[-1] = (logical[-1][0], logical[-1][1] + " " + line.strip())
        else:
            logical.append((no, line.rstrip()))
    if not logical or logical[0][1] != f"# {FORMAT_VERSION}":
        raise ParseError(f"missing format header '# {FORMAT_VERSION}'", 1)
    version = logical[0][1][2:]
    body = logical[1:]
    if not body or not re.fullmatch(r"d = [0-9]+", body[0][1]):
        raise ParseError("expected 'd = <int>' after the header", body[0][0] if body else 2)
    d = int(body[0][1].split("=")[1])
    if d > MAX_TABLE_D:
        raise ParseError(f"no module tables beyond d = {MAX_TABLE_D}", body[0][0])

    sections: Dict[str, List[Tuple[int, str]]] = {}
    current = None
    for no, line in body[1:]:
        if line.startswith("["):
            if line not in ("[basis]", "[action a]", "[action astar]"):
                raise ParseError(f"unknown section {line!r}", no)
            current = line[1:-1]
            sections[current] = []
        else:
            if current is None:
                raise ParseError("content before any section", no)
            sections[current].append((no, line))
    for wanted in ("basis", "action a", "action astar"):
        if wanted not in sections:
            raise ParseError(f"missing section [{wanted}]")

    basis_rows: List[List[BasisLabel]] = []
    basis: List[BasisLabel] = []
    for no, line in sections["basis"]:
        row = []
        for word in line.split():
            try:
                label = parse_label(word)
            except TableError as e:
                raise ParseError(str(e), no) from None
            row.append(label)
            basis.append(label)
        basis_rows.append(row)
    basis_set = set(basis)

    def parse_action(key: str) -> Action:
        action: Action = {}
        order: List[BasisLabel] = []
        for no, line in sections[key]:
            src, terms = _parse_entry(line, no, d, basis_set)
            if src in action:
                raise ParseError(f"duplicate entry for {src}", no)
            action[src] = terms
            order.append(src)
        if order != basis:
            raise ParseError(f"[{key}] entries must follow basis order exactly")
        return action

    table = ModuleTable(
        d=d,
        basis=basis,
        basis_rows=basis_rows,
        a_action=parse_action("action a"),
        astar_action=parse_action("action astar"),
        version=version,
    )
    _validate_structure(table)
    return table


def serialize_table(table: ModuleTable) -> str:
    out = [f"# {table.version}", f"d = {table.d}", ""]
    out.append("[basis]")
    for row in table.basis_rows:
        out.append(" ".join(str(l) for l in row))
    for key, action in (("action a", table.a_action), ("action astar", table.astar_action)):
        out.append("")
        out.append(f"[{key}]")
        for src in table.basis:
            out.extend(_format_entry(src, action[src]))
    return "\n".join(out) + "\n"


def bundled_table_text(d: int, assets: Optional[Path] = None) -> str:
    if not 0 <= d <= MAX_TABLE_D:
        raise TableError(f"no module table for d = {d}")
    name = f"d{d}.txt"
    if assets is not None:
        return (Path(assets) / name).read_text()
    return resources.files("tdcheck.data").joinpath(name).read_text()


def load_table(d: int, assets: Optional[Path] = None) -> ModuleTable:
    """Parse the bundled (or overridden) table for diameter d."""
    table = parse_table(bundled_table_text(d, assets))
    if table.d != d:
        raise TableError(f"asset for d={d} declares d={table.d}")
    return table
