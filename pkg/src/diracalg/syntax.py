"""Text syntax: expression and operator parsing, lowering, JSON encoding, problem files."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .bivariate import Axis, BivDist, Poly2
from .boundary import BoundaryProblem
from .distribution import Dist
from .errors import DiracAlgError, ForbiddenProductError, InvalidProblemError, ParseError
from .ground import Poly
from .operators import IdOp, StieltjesCond
from .piecewise import Piecewise
from .scalars import format_rational, parse_rational

Value = Union[Poly, Piecewise, Dist, BivDist]

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "sym", "end"
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m or m.end() == pos:
            break
        if m.group(1):
            tokens.append(Token("num", m.group(1), m.start(1)))
        elif m.group(2):
            tokens.append(Token("name", m.group(2), m.start(2)))
        elif m.group(3):
            tokens.append(Token("sym", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


# ---------------------------------------------------------------------------
# expression AST

@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int


@dataclass(frozen=True)
class Var:
    name: str
    pos: int


@dataclass(frozen=True)
class Call:
    """``H(arg)`` (order -1) or ``delta^{order}(arg)``."""
    name: str
    order: int
    arg: object
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: int


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: int


class _Parser:
    def __init__(self, src: str, names: set[str]):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0
        self.names = names

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, self.src, tok.pos)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.kind in ("sym", "name") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected '{text}' but found '{found}'")
        return t

    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected '{self.tok.text}'")
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "sym" and self.tok.text in "+-":
            op = self.advance()
            node = BinOp(op.text, node, self.term(), op.pos)
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "sym" and self.tok.text in "*/":
            op = self.advance()
            node = BinOp(op.text, node, self.unary(), op.pos)
        return node

    def unary(self):
        if self.tok.kind == "sym" and self.tok.text in "+-":
            op = self.advance()
            inner = self.unary()
            return inner if op.text == "+" else Neg(inner, op.pos)
        return self.power()

    def power(self):
        node = self.atom()
        if self.tok.kind == "sym" and self.tok.text == "^":
            op = self.advance()
            if self.tok.kind != "num":
                raise self.error("exponent must be a nonnegative integer")
            node = Pow(node, int(self.advance().text), op.pos)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(Fraction(int(t.text)), t.pos)
        if t.kind == "sym" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            if t.text in ("H", "delta"):
                return self.call()
            if t.text in self.names:
                self.advance()
                return Var(t.text, t.pos)
            raise self.error(f"unknown name '{t.text}'")
        if t.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected '{t.text}'")

    def call(self):
        t = self.advance()
        order = -1
        if t.text == "delta":
            order = 0
            if self.accept("'"):
                order = 1
                while self.accept("'"):
                    order += 1
            elif self.accept("^"):
                if self.accept("{"):
                    if self.tok.kind != "num":
                        raise self.error("expected a derivative order")
                    order = int(self.advance().text)
                    self.expect("}")
                elif self.tok.kind == "num":
                    order = int(self.advance().text)
                else:
                    raise self.error("expected a derivative order")
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        return Call(t.text, order, arg, t.pos)


def parse_expr(src: str):
    return _Parser(src, {"x", "xi"}).parse()


# ---------------------------------------------------------------------------
# lowering

def _linear(node, src: str) -> tuple[Fraction, Fraction, Fraction]:
    """Evaluate a Heaviside/Dirac argument as ``cx*x + cxi*xi + c0``."""
    if isinstance(node, Num):
        return (Fraction(0), Fraction(0), node.value)
    if isinstance(node, Var):
        return (Fraction(1), Fraction(0), Fraction(0)) if node.name == "x" else (Fraction(0), Fraction(1), Fraction(0))
    if isinstance(node, Neg):
        a, b, c = _linear(node.operand, src)
        return (-a, -b, -c)
    if isinstance(node, BinOp):
        l = _linear(node.left, src)
        r = _linear(node.right, src)
        if node.op == "+":
            return tuple(p + q for p, q in zip(l, r))
        if node.op == "-":
            return tuple(p - q for p, q in zip(l, r))
        if node.op == "/" and r[0] == 0 and r[1] == 0 and r[2] != 0:
            return tuple(p / r[2] for p in l)
        if node.op == "*":
            if l[0] == 0 and l[1] == 0:
                return tuple(l[2] * q for q in r)
            if r[0] == 0 and r[1] == 0:
                return tuple(r[2] * p for p in l)
    raise ParseError("argument must be linear, like x-a, a-x or x-xi", src, getattr(node, "pos", None))


def _generator(node: Call, src: str) -> BivDist:
    cx, cxi, c0 = _linear(node.arg, src)
    is_delta = node.name == "delta"
    k = max(node.order, 0)
    sign = Fraction(1)

    def bad(msg="unsupported argument"):
        return ParseError(msg, src, node.pos)

    if (cx, cxi) in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        axis = Axis.X if cxi == 0 else Axis.XI
        lead = cx + cxi
        a = -c0 / lead
        if _is_bare_variable(node.arg):
            raise bad(f"write the jump point explicitly, e.g. {node.name}({axis.value}-0)")
        if is_delta:
            sign = Fraction(1) if lead == 1 else Fraction((-1) ** k)
            return BivDist.delta(axis, a, k) * sign
        step = BivDist.step(axis, a)
        return step if lead == 1 else BivDist.const(1) - step
    if (cx, cxi) in ((1, -1), (-1, 1)) and c0 == 0:
        if is_delta:
            sign = Fraction(1) if cx == 1 else Fraction((-1) ** k)
            return BivDist.diag_delta(k) * sign
        step = BivDist.diag_step()
        return step if cx == 1 else BivDist.const(1) - step
    raise bad()


def _is_bare_variable(node) -> bool:
    return isinstance(node, Var)


def _eval(node, src: str) -> BivDist:
    if isinstance(node, Num):
        return BivDist.const(node.value)
    if isinstance(node, Var):
        key = (1, 0) if node.name == "x" else (0, 1)
        return BivDist.from_poly2(Poly2({key: 1}))
    if isinstance(node, Neg):
        return -_eval(node.operand, src)
    if isinstance(node, Call):
        return _generator(node, src)
    if isinstance(node, Pow):
        base = _eval(node.base, src)
        out = BivDist.const(1)
        try:
            for _ in range(node.exponent):
                out = out * base
        except ForbiddenProductError as exc:
            raise ParseError(_forbidden(exc), src, node.pos) from None
        return out
    if isinstance(node, BinOp):
        left = _eval(node.left, src)
        right = _eval(node.right, src)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            try:
                return left * right
            except ForbiddenProductError as exc:
                raise ParseError(_forbidden(exc), src, node.pos) from None
        scalar = _as_scalar(right)
        if scalar is None or scalar == 0:
            raise ParseError("can only divide by a nonzero number", src, node.pos)
        return left * (1 / scalar)
    raise TypeError(node)


def _forbidden(exc: ForbiddenProductError) -> str:
    msg = str(exc)
    rule = "product of distributions is undefined"
    return msg if msg.startswith(rule) else f"{rule}: {msg}"


def _as_scalar(v: BivDist) -> Optional[Fraction]:
    if not v:
        return Fraction(0)
    if len(v.terms) == 1:
        (key, c), = v.terms.items()
        if key == (None, None, ()) and set(c.terms) == {(0, 0)}:
            return c.terms[(0, 0)]
    return None


def lower_value(v: BivDist) -> Value:
    """Pick the smallest structure containing ``v``."""
    if v.depends_on(Axis.XI):
        return v
    d = v.to_univariate(Axis.X)
    if d.diracs:
        return d
    if d.pw.steps:
        return d.pw
    return d.pw.base


def lower(ast, src: str = "") -> Value:
    return lower_value(_eval(ast, src))


def parse_value(src: str) -> Value:
    return lower(parse_expr(src), src)


def to_biv(v: Value) -> BivDist:
    return BivDist.lift(v, Axis.X)


def kind_of(v) -> str:
    if isinstance(v, Poly):
        return "ground"
    if isinstance(v, Piecewise):
        return "piecewise"
    if isinstance(v, Dist):
        return "distribution"
    if isinstance(v, BivDist):
        return "bivariate"
    if isinstance(v, Fraction):
        return "scalar"
    raise TypeError(type(v).__name__)


def format_value(v) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(v)


# ---------------------------------------------------------------------------
# operators

class _OpParser(_Parser):
    def __init__(self, src: str):
        super().__init__(src, {"x", "D", "I"})

    def atom(self):
        t = self.tok
        if t.kind == "name" and t.text == "ev":
            self.advance()
            self.expect("(")
            start = self.tok.pos
            neg = bool(self.accept("-"))
            if self.tok.kind != "num":
                raise self.error("expected a rational evaluation point")
            num = int(self.advance().text)
            den = 1
            if self.accept("/"):
                if self.tok.kind != "num":
                    raise self.error("expected a denominator")
                den = int(self.advance().text)
                if den == 0:
                    raise ParseError("zero denominator", self.src, start)
            self.expect(")")
            return Call("ev", 0, Num(Fraction(-num if neg else num, den), start), t.pos)
        if t.kind == "name" and t.text in ("H", "delta", "xi"):
            raise self.error(f"'{t.text}' is not allowed in an operator")
        return super().atom()


def parse_op_ast(src: str):
    return _OpParser(src).parse()


def _eval_op(node, src: str) -> IdOp:
    if isinstance(node, Num):
        return IdOp.mult(node.value)
    if isinstance(node, Var):
        if node.name == "x":
            return IdOp.mult(Poly.x())
        return IdOp.D() if node.name == "D" else IdOp.I()
    if isinstance(node, Call):
        return IdOp.ev(node.arg.value)
    if isinstance(node, Neg):
        return -_eval_op(node.operand, src)
    if isinstance(node, Pow):
        return _eval_op(node.base, src) ** node.exponent
    if isinstance(node, BinOp):
        left = _eval_op(node.left, src)
        right = _eval_op(node.right, src)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        scalar = _op_scalar(right)
        if scalar is None or scalar == 0:
            raise ParseError("can only divide by a nonzero number", src, node.pos)
        return left * (1 / scalar)
    raise TypeError(node)


def _op_scalar(op: IdOp) -> Optional[Fraction]:
    if not op:
        return Fraction(0)
    if set(op.terms) == {("D", 0, 0)}:
        return op.terms[("D", 0, 0)]
    return None


def parse_op(src: str) -> IdOp:
    return _eval_op(parse_op_ast(src), src)


def parse_poly(src: str) -> Poly:
    v = parse_value(src)
    if not isinstance(v, Poly):
        raise ParseError(f"expected a polynomial in x, got a {kind_of(v)} element", src, 0)
    return v


def parse_piecewise(src: str) -> Piecewise:
    v = parse_value(src)
    if isinstance(v, Poly):
        return Piecewise(v)
    if not isinstance(v, Piecewise):
        raise ParseError(f"expected a piecewise function of x, got a {kind_of(v)} element", src, 0)
    return v


# ---------------------------------------------------------------------------
# problem files

@dataclass
class ProblemFile:
    problem: BoundaryProblem
    interval: tuple[Fraction, Fraction]
    force: Optional[Piecewise] = None
    source: str = ""


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_problem(text: str, source: str = "<problem>") -> ProblemFile:
    T = None
    conds: list[StieltjesCond] = []
    fundamental: list[Poly] = []
    interval = None
    force = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"{source}:{lineno}: expected 'key: value'")
        key, value = (s.strip() for s in line.split(":", 1))
        try:
            if key == "T":
                T = parse_op(value)
            elif key == "cond":
                conds.append(StieltjesCond.from_op(parse_op(value)))
            elif key == "fundamental":
                fundamental = [parse_poly(p) for p in _split_top_level(value)]
            elif key == "interval":
                ends = _split_top_level(value)
                if len(ends) != 2:
                    raise ParseError("interval needs two endpoints", value, 0)
                interval = (parse_rational(ends[0]), parse_rational(ends[1]))
            elif key == "force":
                force = parse_piecewise(value)
            else:
                raise ParseError(f"unknown key '{key}'")
        except (ParseError, ValueError) as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
    if T is None:
        raise ParseError(f"{source}: missing 'T:' line")
    try:
        bp = BoundaryProblem(T, conds, fundamental)
    except InvalidProblemError as exc:
        raise InvalidProblemError(f"{source}: {exc}") from None
    return ProblemFile(bp, interval or bp.interval_hint(), force, source)


def format_problem(pfile: ProblemFile) -> str:
    from .operators import format_op
    from .ground import format_poly
    lines = [f"T: {format_op(pfile.problem.T)}"]
    lines += [f"cond: {c}" for c in pfile.problem.conds]
    lines.append("fundamental: " + ", ".join(format_poly(u) for u in pfile.problem.fundamental))
    lines.append(f"interval: {format_rational(pfile.interval[0])}, {format_rational(pfile.interval[1])}")
    if pfile.force is not None:
        lines.append(f"force: {pfile.force}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON

def poly_to_json(p: Poly) -> list[str]:
    return [format_rational(c) for c in p.coeffs]


def poly_from_json(data: list[str]) -> Poly:
    return Poly(parse_rational(c) for c in data)


def poly2_to_json(p: Poly2) -> list[dict]:
    return [{"x": i, "xi": j, "c": format_rational(c)} for i, j, c in p.monomials()]


def poly2_from_json(data: list[dict]) -> Poly2:
    return Poly2({(t["x"], t["xi"]): parse_rational(t["c"]) for t in data})


def _opt_rat(a: Optional[Fraction]) -> Optional[str]:
    return None if a is None else format_rational(a)


def _opt_parse(a: Optional[str]) -> Optional[Fraction]:
    return None if a is None else parse_rational(a)


def value_to_json(v) -> dict:
    if isinstance(v, Fraction):
        return {"kind": "scalar", "text": format_rational(v), "value": format_rational(v)}
    kind = kind_of(v)
    if isinstance(v, BivDist):
        body: dict = {"pw2": [], "diagonal": [], "tensorial_x": [], "tensorial_xi": []}
        from .bivariate import _key_order
        for key in sorted(v.terms, key=_key_order):
            hx, hxi, gen = key
            entry = {"coef": poly2_to_json(v.terms[key]), "hx": _opt_rat(hx), "hxi": _opt_rat(hxi)}
            g = gen[0] if gen else None
            if g is None:
                body["pw2"].append(entry)
            elif g == "Hd":
                body["diagonal"].append({**entry, "kind": "step"})
            elif g == "dd":
                body["diagonal"].append({**entry, "kind": "delta", "order": gen[1]})
            else:
                entry.update({"at": format_rational(gen[1]), "order": gen[2]})
                body["tensorial_x" if g == "dx" else "tensorial_xi"].append(entry)
        return {"kind": kind, "text": str(v), "value": body}
    d = Dist(v) if not isinstance(v, Dist) else v
    body = {
        "base": poly_to_json(d.pw.base),
        "steps": [{"at": format_rational(a), "coef": poly_to_json(f)} for a, f in d.pw.steps],
    }
    if kind == "distribution":
        body["diracs"] = [{"at": format_rational(a), "order": k, "coef": format_rational(c)}
                          for (a, k), c in d.diracs]
    return {"kind": kind, "text": str(v), "value": body}


def value_from_json(data: dict):
    kind = data["kind"]
    body = data["value"]
    if kind == "scalar":
        return parse_rational(body)
    if kind == "bivariate":
        raw = []
        for entry in body["pw2"]:
            raw.append((poly2_from_json(entry["coef"]), _opt_parse(entry["hx"]), _opt_parse(entry["hxi"]), ()))
        for entry in body["diagonal"]:
            gen = ("Hd",) if entry["kind"] == "step" else ("dd", entry["order"])
            raw.append((poly2_from_json(entry["coef"]), _opt_parse(entry["hx"]), _opt_parse(entry["hxi"]), gen))
        for tag, name in (("dx", "tensorial_x"), ("dxi", "tensorial_xi")):
            for entry in body[name]:
                gen = (tag, parse_rational(entry["at"]), entry["order"])
                raw.append((poly2_from_json(entry["coef"]), _opt_parse(entry["hx"]), _opt_parse(entry["hxi"]), gen))
        return BivDist(raw)
    pw = Piecewise(poly_from_json(body["base"]),
                   [(parse_rational(s["at"]), poly_from_json(s["coef"])) for s in body["steps"]])
    if kind == "ground":
        return pw.base
    if kind == "piecewise":
        return pw
    return Dist(pw, [((parse_rational(t["at"]), t["order"]), parse_rational(t["coef"])) for t in body["diracs"]])


__all__ = [
    "DiracAlgError", "ParseError", "ProblemFile", "Value", "format_problem", "format_value", "kind_of",
    "lower", "lower_value", "parse_expr", "parse_op", "parse_piecewise", "parse_poly", "parse_problem",
    "parse_value", "to_biv", "value_from_json", "value_to_json",
]


def load_schema(name: str) -> dict:
    """Load one of the shipped JSON schemas (``expression``, ``problem`` or ``sample``)."""
    import json
    from importlib.resources import files
    return json.loads(files("diracalg").joinpath("schemas", f"{name}.schema.json").read_text("utf-8"))
