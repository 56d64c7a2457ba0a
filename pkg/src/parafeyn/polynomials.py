"""Exact Symanzik polynomials with rational, kinematics-linear coefficients.

A coefficient is a finite rational combination of kinematic symbols (1, s_I,
m_c^2).  Polynomials are stored sparsely as {exponent vector: coefficient}
over a fixed, sorted tuple of edge ids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import GraphValidationError, KinematicsError
from .graphs import Graph, GraphLike, _as_graph, spanning_trees, spanning_two_forests
from .kinematics import UNIT, KinematicConfig, KinSymbol, invariant, mass_sq


class LinearForm:
    """Immutable rational combination of kinematic symbols."""

    __slots__ = ("items", "_hash")

    def __init__(self, items: Union[Mapping[KinSymbol, Fraction], Iterable] = ()):
        if isinstance(items, Mapping):
            items = items.items()
        acc: dict[KinSymbol, Fraction] = {}
        for sym, w in items:
            acc[sym] = acc.get(sym, Fraction(0)) + Fraction(w)
        self.items = tuple(sorted(((s, w) for s, w in acc.items() if w != 0),
                                  key=lambda t: t[0].sort_key()))
        self._hash = hash(self.items)

    @classmethod
    def scalar(cls, value) -> "LinearForm":
        return cls([(UNIT, Fraction(value))])

    @classmethod
    def symbol(cls, sym: KinSymbol, weight=1) -> "LinearForm":
        return cls([(sym, Fraction(weight))])

    def is_zero(self) -> bool:
        return not self.items

    def is_scalar(self) -> bool:
        return all(s.kind == "1" for s, _ in self.items)

    def scalar_value(self) -> Fraction:
        if not self.is_scalar():
            raise ValueError("coefficient is not a pure number")
        return self.items[0][1] if self.items else Fraction(0)

    def symbols(self) -> tuple[KinSymbol, ...]:
        return tuple(s for s, _ in self.items)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.items + other.items)

    def __neg__(self) -> "LinearForm":
        return LinearForm((s, -w) for s, w in self.items)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def scale(self, r) -> "LinearForm":
        r = Fraction(r)
        return LinearForm((s, w * r) for s, w in self.items)

    def __mul__(self, other: "LinearForm") -> "LinearForm":
        if self.is_scalar():
            return other.scale(self.scalar_value())
        if other.is_scalar():
            return self.scale(other.scalar_value())
        raise ValueError("product of two kinematic coefficients is not linear")

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.items == other.items

    def __hash__(self):
        return self._hash

    def evaluate(self, kin: Optional[KinematicConfig]) -> float:
        total = 0.0
        for s, w in self.items:
            if s.kind == "1":
                total += float(w)
            else:
                if kin is None:
                    raise KinematicsError(f"missing value for {s}")
                total += float(w) * kin.value(s)
        return total

    def __str__(self):
        if not self.items:
            return "0"
        parts = []
        for i, (s, w) in enumerate(self.items):
            sign = "-" if w < 0 else "+"
            mag = abs(w)
            if s.kind == "1":
                body = _fmt_num(mag)
            elif mag == 1:
                body = str(s)
            else:
                body = f"{_fmt_num(mag)}*{s}"
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self):
        return f"LinearForm({self})"


def _fmt_num(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


Exponent = tuple[int, ...]


class GraphPolynomial:
    """Sparse polynomial in edge variables x_e with LinearForm coefficients."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[int], terms: Mapping[Exponent, LinearForm] = ()):
        self.variables = tuple(variables)
        if list(self.variables) != sorted(set(self.variables)):
            raise ValueError("variables must be distinct and sorted")
        clean = {}
        n = len(self.variables)
        for exp, c in dict(terms).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError("exponent vector has wrong arity")
            if not isinstance(c, LinearForm):
                c = LinearForm.scalar(c)
            if not c.is_zero():
                clean[exp] = c
        self.terms = clean

    # -- construction helpers ---------------------------------------------

    @classmethod
    def zero(cls, variables=()) -> "GraphPolynomial":
        return cls(variables, {})

    @classmethod
    def constant(cls, c, variables=()) -> "GraphPolynomial":
        if not isinstance(c, LinearForm):
            c = LinearForm.scalar(c)
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def monomial(cls, variables: Sequence[int], powers: Mapping[int, int], coeff=1) -> "GraphPolynomial":
        variables = tuple(variables)
        exp = tuple(powers.get(v, 0) for v in variables)
        return cls(variables, {exp: coeff if isinstance(coeff, LinearForm) else LinearForm.scalar(coeff)})

    def with_variables(self, variables: Sequence[int]) -> "GraphPolynomial":
        """Re-express over a superset of variables (new ones appear with exponent 0)."""
        variables = tuple(sorted(set(variables)))
        missing = set(self.variables) - set(variables)
        if missing:
            live = {v for exp in self.terms for v, k in zip(self.variables, exp) if k}
            if missing & live:
                raise ValueError(f"variables {sorted(missing & live)} still occur")
        pos = {v: i for i, v in enumerate(self.variables)}
        terms = {}
        for exp, c in self.terms.items():
            terms[tuple(exp[pos[v]] if v in pos else 0 for v in variables)] = c
        return GraphPolynomial(variables, terms)

    # -- arithmetic ----------------------------------------------------------

    def _aligned(self, other: "GraphPolynomial"):
        vs = tuple(sorted(set(self.variables) | set(other.variables)))
        return self.with_variables(vs), other.with_variables(vs), vs

    def __add__(self, other: "GraphPolynomial") -> "GraphPolynomial":
        a, b, vs = self._aligned(other)
        terms = dict(a.terms)
        for exp, c in b.terms.items():
            terms[exp] = terms[exp] + c if exp in terms else c
        return GraphPolynomial(vs, terms)

    def __neg__(self) -> "GraphPolynomial":
        return GraphPolynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "GraphPolynomial") -> "GraphPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "GraphPolynomial":
        if not isinstance(other, GraphPolynomial):
            other = GraphPolynomial.constant(other)
        a, b, vs = self._aligned(other)
        terms: dict[Exponent, LinearForm] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                exp = tuple(i + j for i, j in zip(e1, e2))
                c = c1 * c2
                terms[exp] = terms[exp] + c if exp in terms else c
        return GraphPolynomial(vs, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GraphPolynomial):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        raise TypeError("GraphPolynomial is unhashable")

    # -- inspection ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def degree(self) -> int:
        """Total degree; raises if the polynomial is not homogeneous."""
        degs = self.degrees()
        if len(degs) != 1:
            raise ValueError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def min_degree_in(self, variables: Iterable[int]) -> Optional[int]:
        """Least partial degree in the given variables (None for the zero polynomial)."""
        idx = [i for i, v in enumerate(self.variables) if v in set(variables)]
        if not self.terms:
            return None
        return min(sum(e[i] for i in idx) for e in self.terms)

    def is_multilinear(self) -> bool:
        return all(k <= 1 for e in self.terms for k in e)

    def symbols(self) -> set[KinSymbol]:
        return {s for c in self.terms.values() for s in c.symbols()}

    # -- substitution ----------------------------------------------------------

    def substitute_value(self, var: int, value) -> "GraphPolynomial":
        """Set x_var to a rational constant and drop the variable."""
        if var not in self.variables:
            raise KeyError(f"x{var} is not a variable of this polynomial")
        i = self.variables.index(var)
        value = Fraction(value)
        vs = self.variables[:i] + self.variables[i + 1:]
        terms: dict[Exponent, LinearForm] = {}
        for exp, c in self.terms.items():
            k = exp[i]
            if k and value == 0:
                continue
            c = c.scale(value ** k) if k else c
            new = exp[:i] + exp[i + 1:]
            terms[new] = terms[new] + c if new in terms else c
        return GraphPolynomial(vs, terms)

    def restrict_to_zero(self, var: int) -> "GraphPolynomial":
        return self.substitute_value(var, 0)

    def rename(self, mapping: Mapping[int, int]) -> "GraphPolynomial":
        """Rename variables (mapping must be injective on the variables)."""
        new_vars = [mapping.get(v, v) for v in self.variables]
        if len(set(new_vars)) != len(new_vars):
            raise ValueError("variable renaming is not injective")
        order = sorted(range(len(new_vars)), key=lambda i: new_vars[i])
        terms = {tuple(e[i] for i in order): c for e, c in self.terms.items()}
        return GraphPolynomial(tuple(new_vars[i] for i in order), terms)

    def substitute_monomials(self, images: Mapping[int, Mapping[int, int]],
                             variables: Sequence[int]) -> "GraphPolynomial":
        """Pull back along x_v -> prod_c y_c^{images[v][c]} (a monomial map)."""
        variables = tuple(variables)
        pos = {c: i for i, c in enumerate(variables)}
        rows = []
        for v in self.variables:
            row = [0] * len(variables)
            for c, k in images[v].items():
                row[pos[c]] += k
            rows.append(row)
        terms: dict[Exponent, LinearForm] = {}
        for exp, c in self.terms.items():
            new = [0] * len(variables)
            for k, row in zip(exp, rows):
                if k:
                    for j, r in enumerate(row):
                        new[j] += k * r
            new = tuple(new)
            terms[new] = terms[new] + c if new in terms else c
        return GraphPolynomial(variables, terms)

    def factor_monomial(self, variables: Iterable[int]) -> tuple[dict[int, int], "GraphPolynomial"]:
        """Divide out the largest power of each listed variable that divides every term."""
        if self.is_zero():
            raise ValueError("cannot factor the zero polynomial")
        out = {}
        terms = dict(self.terms)
        for v in variables:
            i = self.variables.index(v)
            k = min(e[i] for e in terms)
            out[v] = k
            if k:
                terms = {e[:i] + (e[i] - k,) + e[i + 1:]: c for e, c in terms.items()}
        return out, GraphPolynomial(self.variables, terms)

    # -- numerics --------------------------------------------------------------

    def evaluate(self, x, kin: Optional[KinematicConfig] = None) -> float:
        """Exact substitution of the point, then floating evaluation of the coefficients."""
        if isinstance(x, Mapping):
            try:
                vals = [Fraction(x[v]) for v in self.variables]
            except KeyError as exc:
                raise KinematicsError(f"missing value for x{exc.args[0]}") from None
        else:
            vals = [Fraction(t) for t in x]
            if len(vals) != len(self.variables):
                raise KinematicsError(
                    f"expected {len(self.variables)} edge values, got {len(vals)}")
        total = 0.0
        for exp, c in self.terms.items():
            mono = Fraction(1)
            for val, k in zip(vals, exp):
                if k:
                    mono *= val ** k
            total += float(mono) * c.evaluate(kin)
        return total

    def compile(self, kin: Optional[KinematicConfig] = None) -> "NumericPolynomial":
        exps = np.array(list(self.terms.keys()), dtype=np.int64).reshape(len(self.terms), len(self.variables))
        coeffs = np.array([c.evaluate(kin) for c in self.terms.values()], dtype=float)
        return NumericPolynomial(self.variables, coeffs, exps)

    # -- text --------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, (exp, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                f"x{v}" if k == 1 else f"x{v}^{k}"
                for v, k in zip(self.variables, exp) if k)
            neg = len(c.items) == 1 and c.items[0][1] < 0
            cc = -c if neg else c
            if len(cc.items) > 1:
                coef = f"({cc})"
            else:
                coef = str(cc)
            if mono:
                body = mono if coef == "1" else f"{coef}*{mono}"
            else:
                body = coef
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"GraphPolynomial({self.variables}, {self})"


@dataclass(frozen=True)
class NumericPolynomial:
    """Float-coefficient polynomial for vectorised evaluation."""

    variables: tuple[int, ...]
    coeffs: np.ndarray
    exps: np.ndarray

    def __call__(self, values: np.ndarray) -> np.ndarray:
        """Evaluate at rows of ``values`` (shape (M, len(variables)))."""
        values = np.asarray(values, dtype=float)
        out = np.zeros(values.shape[0])
        cache: dict[tuple[int, int], np.ndarray] = {}
        for c, exp in zip(self.coeffs, self.exps):
            term = np.full(values.shape[0], c)
            for j in np.nonzero(exp)[0]:
                k = int(exp[j])
                key = (int(j), k)
                if key not in cache:
                    cache[key] = values[:, j] ** k
                term = term * cache[key]
            out += term
        return out


# -- graph polynomials -------------------------------------------------------

def _edge_vars(g: Graph) -> tuple[int, ...]:
    return tuple(sorted(g.edge_ids))


def _psi_connected(g: Graph) -> GraphPolynomial:
    vs = _edge_vars(g)
    terms: dict[Exponent, LinearForm] = {}
    one = LinearForm.scalar(1)
    for tree in spanning_trees(g):
        exp = tuple(0 if v in tree else 1 for v in vs)
        terms[exp] = terms[exp] + one if exp in terms else one
    return GraphPolynomial(vs, terms)


def _components(g: Graph) -> list[Graph]:
    return [g.induced(c) for c in g.components()]


def first_symanzik(g: GraphLike) -> GraphPolynomial:
    """psi_G: sum over spanning trees T of prod_{e not in T} x_e; products over components."""
    g = _as_graph(g)
    out = GraphPolynomial.constant(1, ())
    for comp in _components(g):
        out = out * _psi_connected(comp)
    return out.with_variables(_edge_vars(g))


def first_symanzik_oracle(g: Graph) -> GraphPolynomial:
    """Brute force: test every edge subset of size |V|-1 for being a spanning tree."""
    import itertools

    g = _as_graph(g)
    if not g.is_connected():
        raise GraphValidationError("first_symanzik_oracle: graph is disconnected")
    vs = _edge_vars(g)
    n_tree = len(g.vertices) - 1
    terms: dict[Exponent, LinearForm] = {}
    for combo in itertools.combinations(g.edges, n_tree):
        adj: dict[int, set] = {v: set() for v in g.vertices}
        ok = True
        for e in combo:
            a, b = e.ends
            if a == b:
                ok = False
                break
            adj[a].add(b)
            adj[b].add(a)
        if not ok:
            continue
        seen = {g.vertices[0]}
        stack = [g.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(g.vertices):
            continue
        ids = {e.id for e in combo}
        exp = tuple(0 if v in ids else 1 for v in vs)
        terms[exp] = terms.get(exp, LinearForm()) + LinearForm.scalar(1)
    return GraphPolynomial(vs, terms)


def _phi_connected(g: Graph, legs, universe: tuple[int, ...]) -> GraphPolynomial:
    """phi of a connected graph whose legs are ``legs`` (labels drawn from ``universe``).

    For a component of a disconnected graph the flow through a cut is named by
    the side that avoids the component's own highest leg label.
    """
    vs = _edge_vars(g)
    own = {leg.label for leg in legs}
    terms: dict[Exponent, LinearForm] = {}
    for t1, t2 in spanning_two_forests(g):
        labels = {leg.label for leg in legs if leg.at in t1.vertices}
        if own and own != set(universe) and max(own) in labels:
            labels = own - labels
        sym = invariant(labels, universe) if universe else None
        if sym is None:
            continue
        used = t1.edges | t2.edges
        exp = tuple(0 if v in used else 1 for v in vs)
        c = LinearForm.symbol(sym)
        terms[exp] = terms[exp] + c if exp in terms else c
    return GraphPolynomial(vs, terms)


def second_symanzik(g: GraphLike) -> GraphPolynomial:
    """phi_G: sum over spanning 2-forests of s_{I(T1)} times the complementary edge variables.

    For disconnected graphs phi = sum_i phi_i prod_{j != i} psi_j.
    """
    g = _as_graph(g)
    universe = g.leg_labels
    comps = _components(g)
    psis = [_psi_connected(c) for c in comps]
    out = GraphPolynomial.zero(())
    for i, comp in enumerate(comps):
        legs = [leg for leg in g.legs if leg.at in comp.vertices]
        term = _phi_connected(comp, legs, universe)
        for j, p in enumerate(psis):
            if j != i:
                term = term * p
        out = out + term
    return out.with_variables(_edge_vars(g))


def mass_polynomial(g: GraphLike) -> GraphPolynomial:
    """sum_e m_{c(e)}^2 x_e."""
    g = _as_graph(g)
    vs = _edge_vars(g)
    out = GraphPolynomial.zero(vs)
    for e in g.edges:
        out = out + GraphPolynomial.monomial(vs, {e.id: 1}, LinearForm.symbol(mass_sq(e.colour)))
    return out


def xi_polynomial(g: GraphLike) -> GraphPolynomial:
    """Xi_G = phi_G + psi_G * sum_e m_{c(e)}^2 x_e."""
    g = _as_graph(g)
    return second_symanzik(g) + first_symanzik(g) * mass_polynomial(g)


def restrict_to_zero(p: GraphPolynomial, e: int) -> GraphPolynomial:
    return p.restrict_to_zero(e)


def evaluate(p: GraphPolynomial, x, kin: Optional[KinematicConfig] = None) -> float:
    return p.evaluate(x, kin)


# -- parsing of the text rendering ------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(x)(\d+)|(s)\[([\d,\s]*)\]|(msq)\[(\d+)\]|(\^)|([()+\-*/]))")


def parse_polynomial(text: str, variables: Optional[Sequence[int]] = None) -> GraphPolynomial:
    """Parse the text rendering produced by ``str(GraphPolynomial)``.

    Juxtaposed variables (``x3x4``) are read as products.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("x", int(m.group(3))))
        elif m.group(4):
            key = tuple(int(t) for t in m.group(5).replace(" ", "").split(",") if t)
            tokens.append(("sym", KinSymbol("s", key)))
        elif m.group(6):
            tokens.append(("sym", mass_sq(int(m.group(7)))))
        elif m.group(8):
            tokens.append(("^", None))
        else:
            tokens.append((m.group(9), None))
    seen_vars = sorted({t[1] for t in tokens if t[0] == "x"})
    vs = tuple(sorted(set(variables))) if variables is not None else tuple(seen_vars)
    i = 0

    def peek():
        return tokens[i][0] if i < len(tokens) else None

    def take():
        nonlocal i
        if i >= len(tokens):
            raise ValueError("unexpected end of polynomial")
        i += 1
        return tokens[i - 1]

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take()[0] == "-" else 1
        acc = term() * sign
        while peek() in ("+", "-"):
            s = -1 if take()[0] == "-" else 1
            acc = acc + term() * s
        return acc

    def term():
        acc = factor()
        while peek() in ("*", "/", "x", "num", "sym", "("):
            if peek() == "/":
                take()
                den = take()
                if den[0] != "num":
                    raise ValueError("only numeric denominators are supported")
                acc = acc * Fraction(1, den[1])
                continue
            if peek() == "*":
                take()
            acc = acc * factor()
        return acc

    def factor():
        kind, val = take()
        if kind == "num":
            base = GraphPolynomial.constant(val, vs)
        elif kind == "x":
            if val not in vs:
                raise ValueError(f"x{val} is not a declared variable")
            base = GraphPolynomial.monomial(vs, {val: 1})
        elif kind == "sym":
            base = GraphPolynomial.constant(LinearForm.symbol(val), vs)
        elif kind == "(":
            base = expr()
            if take()[0] != ")":
                raise ValueError("unbalanced parenthesis")
        elif kind == "-":
            return factor() * -1
        else:
            raise ValueError(f"unexpected token {kind!r}")
        if peek() == "^":
            take()
            k = take()
            if k[0] != "num":
                raise ValueError("exponent must be an integer")
            out = GraphPolynomial.constant(1, vs)
            for _ in range(k[1]):
                out = out * base
            base = out
        return base

    result = expr()
    if i != len(tokens):
        raise ValueError("trailing input in polynomial")
    return result.with_variables(vs)
