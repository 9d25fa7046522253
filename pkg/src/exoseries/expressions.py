"""The ODE input language F(x, y, delta(y,1), ..., delta(y,n)).

The grammar is deliberately small: complex constants built from integers,
decimals, integer ratios ``p/q`` and the imaginary unit ``i``; the variable
``x``; the unknown ``y`` and its Euler derivatives ``delta(y, j)``; ``+ - *``
and integer powers ``^``.  Named holomorphic coefficient functions of x may
appear if the surrounding file declares them as truncated power series; no
closed-form function library exists on purpose, so truncation stays sound by
construction.

Three consumers of a parsed tree:

* ``substitute_jet`` evaluates F along a jet tuple, giving the residual
  exotic series of a candidate solution;
* ``partial_series`` evaluates dF/dy_i along the jet;
* ``expand_multiseries`` Taylor-expands F around a polynomial partial sum in
  shifted unknowns u_j (the slot u_j stands for (delta+m)^j u, substituted
  with an explicit x^m factor), producing the multivariate series the
  reduction consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .errors import ConfigurationError, OdeSyntaxError, TruncationError
from .exotic import ExoticSeries, JetTuple
from .laurent import LaurentSeries
from .multiseries import MultiSeries
from .scalars import DEFAULT_PREC, EXACT

# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class IUnit:
    pass


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Jet:
    j: int


@dataclass(frozen=True)
class Coeff:
    name: str


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


@dataclass(frozen=True)
class OdeExpression:
    """A parsed equation left-hand side together with its order."""

    ast: object
    order: int
    coeff_series: dict | None = None  # name -> LaurentSeries in x (pole_order <= 0)

    def to_text(self) -> str:
        return _print(self.ast, 0)

    def coeff(self, name: str) -> LaurentSeries:
        if not self.coeff_series or name not in self.coeff_series:
            raise ConfigurationError(f"undeclared coefficient function {name!r}")
        return self.coeff_series[name]


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_SINGLE = set("+-*^(),")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        if ch in _SINGLE:
            tokens.append((ch, ch, pos))
            pos += 1
            continue
        if ch == "/":
            tokens.append(("/", ch, pos))
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            if pos < n and text[pos] == "." :
                pos += 1
                while pos < n and text[pos].isdigit():
                    pos += 1
            tokens.append(("num", text[start:pos], start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(("name", text[start:pos], start))
            continue
        raise OdeSyntaxError(f"unexpected character {ch!r}", offset=pos)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise OdeSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}" if tok[0] != "end"
                else f"expected {kind!r}, found end of input",
                offset=tok[2])
        return self.advance()

    # expr := term (('+'|'-') term)*
    def parse_expr(self):
        node = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    # term := factor ('*' factor)*
    def parse_term(self):
        node = self.parse_factor()
        while self.peek()[0] == "*":
            self.advance()
            node = Mul(node, self.parse_factor())
        return node

    # factor := '-' factor | power
    def parse_factor(self):
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    # power := atom ('^' integer)?
    def parse_power(self):
        node = self.parse_atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.expect("num")
            if "." in tok[1]:
                raise OdeSyntaxError("powers must be integers", offset=tok[2])
            return Pow(node, int(tok[1]))
        return node

    def parse_atom(self):
        tok = self.peek()
        kind, lexeme, offset = tok
        if kind == "num":
            self.advance()
            value = Fraction(lexeme)
            if self.peek()[0] == "/" and self.tokens[self.pos + 1][0] == "num":
                self.advance()
                den = self.advance()
                if "." in den[1]:
                    raise OdeSyntaxError("ratio denominators must be integers",
                                         offset=den[2])
                value = value / int(den[1])
            return Num(value)
        if kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if kind == "name":
            self.advance()
            if lexeme == "i":
                return IUnit()
            if lexeme == "x":
                return Var()
            if lexeme == "y":
                return Jet(0)
            if lexeme == "delta":
                self.expect("(")
                name = self.expect("name")
                if name[1] != "y":
                    raise OdeSyntaxError("delta applies to y", offset=name[2])
                self.expect(",")
                order = self.expect("num")
                if "." in order[1]:
                    raise OdeSyntaxError("derivative order must be an integer",
                                         offset=order[2])
                self.expect(")")
                return Jet(int(order[1]))
            return Coeff(lexeme)
        raise OdeSyntaxError(
            f"unexpected token {lexeme!r}" if kind != "end"
            else "unexpected end of input",
            offset=offset)


def parse_ode(text: str, coeff_series: dict | None = None,
              declared_order: int | None = None) -> OdeExpression:
    """Parse an expression; the order n is the largest j in delta(y, j)."""
    parser = _Parser(text)
    ast = parser.parse_expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise OdeSyntaxError(f"trailing input {tok[1]!r}", offset=tok[2])
    order = _max_jet(ast)
    if declared_order is not None:
        if order > declared_order:
            raise OdeSyntaxError(
                f"delta(y,{order}) exceeds the declared order {declared_order}")
        order = declared_order
    return OdeExpression(ast, order, coeff_series or {})


def _max_jet(node) -> int:
    if isinstance(node, Jet):
        return node.j
    if isinstance(node, (Add, Sub, Mul)):
        return max(_max_jet(node.left), _max_jet(node.right))
    if isinstance(node, Neg):
        return _max_jet(node.operand)
    if isinstance(node, Pow):
        return _max_jet(node.base)
    return 0


# ---------------------------------------------------------------------------
# Printing (round-trips through parse_ode)
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _print(node, context: int) -> str:
    if isinstance(node, Num):
        v = node.value
        body = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if v < 0:
            return body if context < _PREC_UNARY else f"({body})"
        return body
    if isinstance(node, IUnit):
        return "i"
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Jet):
        return "y" if node.j == 0 else f"delta(y,{node.j})"
    if isinstance(node, Coeff):
        return node.name
    if isinstance(node, Add):
        body = f"{_print(node.left, _PREC_ADD)} + {_print(node.right, _PREC_ADD)}"
        return body if context <= _PREC_ADD else f"({body})"
    if isinstance(node, Sub):
        body = f"{_print(node.left, _PREC_ADD)} - {_print(node.right, _PREC_MUL)}"
        return body if context <= _PREC_ADD else f"({body})"
    if isinstance(node, Mul):
        body = f"{_print(node.left, _PREC_MUL)}*{_print(node.right, _PREC_MUL)}"
        return body if context <= _PREC_MUL else f"({body})"
    if isinstance(node, Neg):
        body = f"-{_print(node.operand, _PREC_UNARY)}"
        return body if context <= _PREC_MUL else f"({body})"
    if isinstance(node, Pow):
        return f"{_print(node.base, _PREC_ATOM)}^{node.exponent}"
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Symbolic differentiation in the jet variables
# ---------------------------------------------------------------------------


def _is_zero_node(node) -> bool:
    return isinstance(node, Num) and node.value == 0


def _add(a, b):
    if _is_zero_node(a):
        return b
    if _is_zero_node(b):
        return a
    return Add(a, b)


def _mul(a, b):
    if _is_zero_node(a) or _is_zero_node(b):
        return ZERO
    if isinstance(a, Num) and a.value == 1:
        return b
    if isinstance(b, Num) and b.value == 1:
        return a
    return Mul(a, b)


def differentiate(node, i: int):
    """d/dy_i of the expression tree (the jet slots are independent)."""
    if isinstance(node, (Num, IUnit, Var, Coeff)):
        return ZERO
    if isinstance(node, Jet):
        return ONE if node.j == i else ZERO
    if isinstance(node, Add):
        return _add(differentiate(node.left, i), differentiate(node.right, i))
    if isinstance(node, Sub):
        da, db = differentiate(node.left, i), differentiate(node.right, i)
        if _is_zero_node(db):
            return da
        if _is_zero_node(da):
            return Neg(db)
        return Sub(da, db)
    if isinstance(node, Mul):
        return _add(_mul(differentiate(node.left, i), node.right),
                    _mul(node.left, differentiate(node.right, i)))
    if isinstance(node, Neg):
        d = differentiate(node.operand, i)
        return ZERO if _is_zero_node(d) else Neg(d)
    if isinstance(node, Pow):
        if node.exponent == 0:
            return ZERO
        d = differentiate(node.base, i)
        if _is_zero_node(d):
            return ZERO
        power = node.base if node.exponent == 2 else Pow(node.base, node.exponent - 1)
        return _mul(Num(Fraction(node.exponent)), _mul(power, d))
    raise TypeError(f"not an AST node: {node!r}")


def y_degree(node) -> int:
    """Total polynomial degree of the expression in the jet variables."""
    if isinstance(node, Jet):
        return 1
    if isinstance(node, (Add, Sub)):
        return max(y_degree(node.left), y_degree(node.right))
    if isinstance(node, Mul):
        return y_degree(node.left) + y_degree(node.right)
    if isinstance(node, Neg):
        return y_degree(node.operand)
    if isinstance(node, Pow):
        return node.exponent * y_degree(node.base)
    return 0


# ---------------------------------------------------------------------------
# Evaluation along a jet tuple
# ---------------------------------------------------------------------------


def _lift_coeff_series(series: LaurentSeries, eta, backend: str, prec: int,
                       name: str) -> ExoticSeries:
    """A declared coefficient series in x, as a t-constant exotic series."""
    if series.lo < 0:
        raise ConfigurationError(
            f"coefficient function {name!r} must be holomorphic in x")
    grades = {}
    for idx, c in enumerate(series.coeffs):
        k = series.lo + idx
        if backend == scalars.FLOAT and c.backend == EXACT:
            c = c.to_float(prec)
        elif c.backend != backend:
            raise ConfigurationError(
                f"coefficient function {name!r} uses the float backend but the "
                "pipeline is exact")
        grades[k] = LaurentSeries.constant(c, prec=prec)
    return ExoticSeries(grades, eta, series.trunc_order, backend, prec)


def _eval_exotic(node, F: OdeExpression, phi_jet: JetTuple,
                 eta, backend: str, prec: int) -> ExoticSeries:
    if isinstance(node, Num):
        return ExoticSeries.constant(
            scalars.make_scalar(node.value, 0, backend, prec), eta, None, prec)
    if isinstance(node, IUnit):
        return ExoticSeries.constant(
            scalars.imag_unit(backend, prec), eta, None, prec)
    if isinstance(node, Var):
        one_ = LaurentSeries.constant(scalars.one(backend, prec), prec=prec)
        return ExoticSeries.x_monomial(1, one_, eta)
    if isinstance(node, Jet):
        if node.j > phi_jet.order:
            raise ConfigurationError(
                f"jet component {node.j} missing (order {phi_jet.order})")
        return phi_jet[node.j]
    if isinstance(node, Coeff):
        return _lift_coeff_series(F.coeff(node.name), eta, backend, prec,
                                  node.name)
    if isinstance(node, Add):
        return (_eval_exotic(node.left, F, phi_jet, eta, backend, prec)
                .add(_eval_exotic(node.right, F, phi_jet, eta, backend, prec)))
    if isinstance(node, Sub):
        return (_eval_exotic(node.left, F, phi_jet, eta, backend, prec)
                .sub(_eval_exotic(node.right, F, phi_jet, eta, backend, prec)))
    if isinstance(node, Mul):
        return (_eval_exotic(node.left, F, phi_jet, eta, backend, prec)
                .mul(_eval_exotic(node.right, F, phi_jet, eta, backend, prec)))
    if isinstance(node, Neg):
        return _eval_exotic(node.operand, F, phi_jet, eta, backend, prec).neg()
    if isinstance(node, Pow):
        return _eval_exotic(node.base, F, phi_jet, eta, backend, prec).pow(
            node.exponent)
    raise TypeError(f"not an AST node: {node!r}")


def substitute_jet(F: OdeExpression, phi_jet: JetTuple,
                   trunc_k: int | None = None) -> ExoticSeries:
    """Evaluate F along the jet; the residual series of a candidate solution.

    If ``trunc_k`` is given the inputs must support it; a silently shallower
    result is never returned.
    """
    phi = phi_jet[0]
    result = _eval_exotic(F.ast, F, phi_jet, phi.eta, phi.backend, phi.prec)
    if trunc_k is not None:
        if result.trunc_k is not None and result.trunc_k < trunc_k:
            raise TruncationError(
                f"inputs support the residual only to x^{result.trunc_k}, "
                f"x^{trunc_k} was requested")
        result = result.truncate_k(trunc_k)
    return result


def partial_series(F: OdeExpression, phi_jet: JetTuple, i: int,
                   trunc_k: int | None = None) -> ExoticSeries:
    """The exotic series of dF/dy_i evaluated along the jet."""
    if not 0 <= i <= F.order:
        raise ValueError(f"partial index {i} outside 0..{F.order}")
    dF = OdeExpression(differentiate(F.ast, i), F.order, F.coeff_series)
    return substitute_jet(dF, phi_jet, trunc_k)


def evaluate_numeric(F: OdeExpression, x_value, jet_values):
    """Evaluate F at numeric x and jet values (mpmath complex arithmetic)."""
    import mpmath

    def walk(node):
        if isinstance(node, Num):
            return mpmath.mpf(node.value.numerator) / node.value.denominator
        if isinstance(node, IUnit):
            return mpmath.mpc(0, 1)
        if isinstance(node, Var):
            return x_value
        if isinstance(node, Jet):
            return jet_values[node.j]
        if isinstance(node, Coeff):
            series = F.coeff(node.name)
            acc = mpmath.mpc(0)
            for e, c in series.support():
                cz = (c.to_float(128).z if isinstance(c, scalars.ExactComplex)
                      else c.z)
                acc += cz * x_value ** e
            return acc
        if isinstance(node, Add):
            return walk(node.left) + walk(node.right)
        if isinstance(node, Sub):
            return walk(node.left) - walk(node.right)
        if isinstance(node, Mul):
            return walk(node.left) * walk(node.right)
        if isinstance(node, Neg):
            return -walk(node.operand)
        if isinstance(node, Pow):
            return walk(node.base) ** node.exponent
        raise TypeError(f"not an AST node: {node!r}")

    return walk(F.ast)


# ---------------------------------------------------------------------------
# Taylor expansion around a partial sum, in the shifted unknowns
# ---------------------------------------------------------------------------


class JetPolynomial:
    """Polynomial in u_0..u_n with exotic-series coefficients (internal)."""

    __slots__ = ("nvars", "terms", "bound", "eta", "backend", "prec")

    def __init__(self, nvars: int, terms: dict, bound: int | None,
                 eta, backend: str, prec: int):
        self.nvars = nvars
        self.terms = {q: s for q, s in terms.items() if not s.is_zero
                      or s.trunc_k is not None}
        self.bound = bound
        self.eta = eta
        self.backend = backend
        self.prec = prec

    @classmethod
    def from_exotic(cls, s: ExoticSeries, nvars: int, bound: int | None):
        q0 = (0,) * nvars
        return cls(nvars, {q0: s}, bound, s.eta, s.backend, s.prec)

    def add(self, other: "JetPolynomial") -> "JetPolynomial":
        out = dict(self.terms)
        for q, s in other.terms.items():
            out[q] = out[q].add(s) if q in out else s
        return JetPolynomial(self.nvars, out, self.bound, self.eta,
                             self.backend, self.prec)

    def neg(self) -> "JetPolynomial":
        return JetPolynomial(self.nvars, {q: s.neg() for q, s in self.terms.items()},
                             self.bound, self.eta, self.backend, self.prec)

    def sub(self, other):
        return self.add(other.neg())

    def mul(self, other: "JetPolynomial") -> "JetPolynomial":
        out: dict = {}
        for qa, sa in self.terms.items():
            for qb, sb in other.terms.items():
                q = tuple(a + b for a, b in zip(qa, qb))
                if self.bound is not None and sum(q) > self.bound:
                    continue
                prod = sa.mul(sb)
                out[q] = out[q].add(prod) if q in out else prod
        return JetPolynomial(self.nvars, out, self.bound, self.eta,
                             self.backend, self.prec)

    def pow(self, n: int) -> "JetPolynomial":
        result = JetPolynomial.from_exotic(
            ExoticSeries.constant(scalars.one(self.backend, self.prec),
                                  self.eta, None, self.prec),
            self.nvars, self.bound)
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return result


def _eval_jetpoly(node, F: OdeExpression, substitution: dict,
                  nvars: int, bound: int | None, eta, backend: str,
                  prec: int) -> JetPolynomial:
    def lift(s: ExoticSeries) -> JetPolynomial:
        return JetPolynomial.from_exotic(s, nvars, bound)

    if isinstance(node, Num):
        return lift(ExoticSeries.constant(
            scalars.make_scalar(node.value, 0, backend, prec), eta, None, prec))
    if isinstance(node, IUnit):
        return lift(ExoticSeries.constant(scalars.imag_unit(backend, prec),
                                          eta, None, prec))
    if isinstance(node, Var):
        one_ = LaurentSeries.constant(scalars.one(backend, prec), prec=prec)
        return lift(ExoticSeries.x_monomial(1, one_, eta))
    if isinstance(node, Jet):
        return substitution[node.j]
    if isinstance(node, Coeff):
        return lift(_lift_coeff_series(F.coeff(node.name), eta, backend, prec,
                                       node.name))
    if isinstance(node, Add):
        return (_eval_jetpoly(node.left, F, substitution, nvars, bound, eta,
                              backend, prec)
                .add(_eval_jetpoly(node.right, F, substitution, nvars, bound,
                                   eta, backend, prec)))
    if isinstance(node, Sub):
        return (_eval_jetpoly(node.left, F, substitution, nvars, bound, eta,
                              backend, prec)
                .sub(_eval_jetpoly(node.right, F, substitution, nvars, bound,
                                   eta, backend, prec)))
    if isinstance(node, Mul):
        return (_eval_jetpoly(node.left, F, substitution, nvars, bound, eta,
                              backend, prec)
                .mul(_eval_jetpoly(node.right, F, substitution, nvars, bound,
                                   eta, backend, prec)))
    if isinstance(node, Neg):
        return _eval_jetpoly(node.operand, F, substitution, nvars, bound, eta,
                             backend, prec).neg()
    if isinstance(node, Pow):
        return _eval_jetpoly(node.base, F, substitution, nvars, bound, eta,
                             backend, prec).pow(node.exponent)
    raise TypeError(f"not an AST node: {node!r}")


def expand_jet_polynomial(F: OdeExpression, center: JetTuple, m: int,
                          degree_bound: int | None = None) -> JetPolynomial:
    """F with y_j replaced by center_j + x^m * u_j, as a u-polynomial."""
    n = F.order
    if center.order < n:
        raise ConfigurationError(
            f"center jet has order {center.order}, the equation needs {n}")
    deg = y_degree(F.ast)
    if degree_bound is None:
        degree_bound = max(4, deg)
    if degree_bound < deg:
        raise TruncationError(
            f"degree bound {degree_bound} would drop degree-{deg} terms")
    phi0 = center[0]
    eta, backend, prec = phi0.eta, phi0.backend, phi0.prec
    nvars = n + 1
    one_ = LaurentSeries.constant(scalars.one(backend, prec), prec=prec)
    xm = ExoticSeries.x_monomial(m, one_, eta) if m > 0 else ExoticSeries.constant(
        scalars.one(backend, prec), eta, None, prec)
    substitution = {}
    for j in range(nvars):
        unit = tuple(1 if idx == j else 0 for idx in range(nvars))
        terms = {(0,) * nvars: center[j], unit: xm}
        substitution[j] = JetPolynomial(nvars, terms, degree_bound, eta,
                                        backend, prec)
    return _eval_jetpoly(F.ast, F, substitution, nvars, degree_bound, eta,
                         backend, prec)


def flatten_jet_polynomial(poly: JetPolynomial,
                           degree_bound: int | None = None) -> MultiSeries:
    """Flatten to a MultiSeries in (t, x, u_0..u_n); u-degrees are graded."""
    nvars = poly.nvars
    variables = ("t", "x") + tuple(f"u{j}" for j in range(nvars))
    graded = tuple(range(2, 2 + nvars))
    terms = {}
    for q, exo in poly.terms.items():
        for k in sorted(exo.grades):
            for e, c in exo.grades[k].support():
                terms[(e, k) + q] = c
    return MultiSeries(variables, terms, degree_bound, graded,
                       poly.backend, poly.prec)


def expand_multiseries(F: OdeExpression, center: JetTuple,
                       degree_bound: int | None = None,
                       m: int | None = None) -> MultiSeries:
    """Multivariate expansion of F around the partial sum.

    The result lives in (t, x, u_0, ..., u_n); its degree-one slice in the
    u variables carries x^m * dF/dy_i along the center.
    """
    if m is None:
        grades = center[0].grades
        m = max(grades) if grades else 0
    poly = expand_jet_polynomial(F, center, m, degree_bound)
    return flatten_jet_polynomial(poly, degree_bound)
