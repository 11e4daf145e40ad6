"""Exact sparse supercommutative polynomials over the rationals.

Sign conventions (frozen, used by every module):

* Products follow the Koszul rule: moving an odd generator past an odd
  generator costs a factor -1.  Monomials are stored in normal order, i.e.
  generators sorted by ``(kind, name)`` with kinds ordered
  base < fiber < momentum.
* ``deriv(p, g, "left")`` removes ``g`` after moving it to the front of each
  monomial, ``deriv(p, g, "right")`` after moving it to the back.  For
  homogeneous ``p`` the two agree up to ``(-1)**(|g|*(|p|+1))``.
* The odd bracket over conjugate pairs ``(q, p)`` is
  ``(F, G) = sum dF/dq|_r * dG/dp|_l - dF/dp|_r * dG/dq|_l``.  Hence
  ``(q, p) = 1`` and ``(F, q) = -dF/dp|_r``.
* Multivectors on a manifold with coordinates ``x^a`` are polynomials in the
  odd degree-1 symbols ``eta_a`` standing for ``d/dx^a``.  The
  Schouten-Nijenhuis bracket is the odd bracket over the pairs
  ``(eta_a, x^a)``: ``[v, f] = v(f)`` and on vector fields it is the Lie
  bracket.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import kernel

KINDS = ("base", "fiber", "momentum")
_KIND_RANK = {k: i for i, k in enumerate(KINDS)}


class AlgebraError(ValueError):
    """Raised on malformed algebraic input (unknown generators, bad degrees)."""


class PolyParseError(AlgebraError):
    def __init__(self, message, text="", column=None):
        self.text = text
        self.column = column
        where = f" at column {column}" if column is not None else ""
        super().__init__(f"{message}{where}: {text!r}")


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int = 0
    kind: str = "base"

    def __post_init__(self):
        if not self.name.isidentifier():
            raise AlgebraError(f"generator name {self.name!r} is not an identifier")
        if self.kind not in _KIND_RANK:
            raise AlgebraError(f"unknown generator kind {self.kind!r}")

    @property
    def parity(self) -> int:
        return self.degree % 2

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class GeneratorSet:
    """An ordered, duplicate-free set of generators (the normal order)."""

    __slots__ = ("generators", "_index", "odd_positions", "_hash")

    def __init__(self, generators: Iterable[Generator]):
        gens = sorted(generators, key=lambda g: (_KIND_RANK[g.kind], g.name))
        seen = set()
        for g in gens:
            if g.name in seen:
                raise AlgebraError(f"duplicate generator name {g.name!r}")
            seen.add(g.name)
        self.generators = tuple(gens)
        self._index = {g.name: i for i, g in enumerate(gens)}
        self.odd_positions = tuple(i for i, g in enumerate(gens) if g.odd)
        self._hash = hash(self.generators)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and (
            self is other or self.generators == other.generators
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "GeneratorSet(%s)" % ", ".join(
            f"{g.name}:{g.degree}" for g in self.generators
        )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def __getitem__(self, name: str) -> Generator:
        return self.generators[self.index(name)]

    def var(self, name: str) -> "GPoly":
        i = self.index(name)
        key = tuple(1 if j == i else 0 for j in range(len(self.generators)))
        return GPoly(self, {key: 1})

    def vars(self, *names: str) -> list["GPoly"]:
        return [self.var(n) for n in names]

    def const(self, c) -> "GPoly":
        c = _coerce(c)
        if not c:
            return GPoly(self, {})
        return GPoly(self, {(0,) * len(self.generators): c})

    def zero(self) -> "GPoly":
        return GPoly(self, {})

    def one(self) -> "GPoly":
        return self.const(1)

    def union(self, other: "GeneratorSet") -> "GeneratorSet":
        merged = {g.name: g for g in self.generators}
        for g in other.generators:
            if g.name in merged and merged[g.name] != g:
                raise AlgebraError(f"conflicting declarations of {g.name!r}")
            merged[g.name] = g
        return GeneratorSet(merged.values())

    def parse(self, text: str) -> "GPoly":
        return parse_poly(text, self)


def _coerce(c):
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class GPoly:
    """Immutable polynomial in graded generators with rational coefficients."""

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens: GeneratorSet, terms: dict):
        self.gens = gens
        self.terms = terms
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_monomials(cls, gens: GeneratorSet, items: Mapping) -> "GPoly":
        """Build from ``{(name, ...): coeff}`` with names in written order."""
        acc = gens.zero()
        for names, c in items.items():
            mono = gens.const(c)
            for n in names:
                mono = mono * gens.var(n)
            acc = acc + mono
        return acc

    # arithmetic -----------------------------------------------------------
    def _lift(self, other) -> "GPoly":
        if isinstance(other, GPoly):
            if other.gens != self.gens:
                raise AlgebraError("polynomials over different generator sets")
            return other
        return self.gens.const(other)

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        return GPoly(self.gens, kernel.add_scaled(dict(self.terms), other.terms, 1))

    __radd__ = __add__

    def __neg__(self):
        return GPoly(self.gens, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        return GPoly(self.gens, kernel.add_scaled(dict(self.terms), other.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GPoly):
            if other.gens != self.gens:
                raise AlgebraError("polynomials over different generator sets")
            return GPoly(
                self.gens,
                kernel.mul_terms(self.terms, other.terms, self.gens.odd_positions),
            )
        try:
            c = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    def __rmul__(self, other):
        try:
            c = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    def scale(self, c) -> "GPoly":
        c = _coerce(c)
        if not c:
            return self.gens.zero()
        if c == 1:
            return self
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if type(w) is Fraction and w.denominator == 1:
                w = w.numerator
            out[k] = w
        return GPoly(self.gens, out)

    def __truediv__(self, c):
        return self.scale(Fraction(1) / _coerce(c))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise AlgebraError("only non-negative integer powers are supported")
        out = self.gens.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GPoly):
            return self.gens == other.gens and self.terms == other.terms
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == self.gens.const(other).terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # grading --------------------------------------------------------------
    def _key_degree(self, key) -> int:
        return sum(e * g.degree for e, g in zip(key, self.gens.generators) if e)

    def degrees(self) -> set[int]:
        return {self._key_degree(k) for k in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int | None:
        """Total degree of a homogeneous polynomial; ``None`` for zero."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise AlgebraError(f"inhomogeneous polynomial with degrees {sorted(ds)}")
        return ds.pop()

    @property
    def parity(self) -> int | None:
        ps = {d % 2 for d in self.degrees()}
        if not ps:
            return None
        if len(ps) > 1:
            raise AlgebraError("polynomial of mixed parity")
        return ps.pop()

    def poly_degree(self, names: Iterable[str] | None = None) -> int:
        """Largest total exponent over ``names`` (all generators by default)."""
        if names is None:
            pos = range(len(self.gens))
        else:
            pos = [self.gens.index(n) for n in names]
        return max((sum(k[i] for i in pos) for k in self.terms), default=0)

    # structure ------------------------------------------------------------
    def free_names(self) -> set[str]:
        used = set()
        for key in self.terms:
            for i, e in enumerate(key):
                if e:
                    used.add(self.gens.generators[i].name)
        return used

    def constant_term(self):
        return self.terms.get((0,) * len(self.gens), 0)

    def is_constant(self) -> bool:
        zero = (0,) * len(self.gens)
        return all(k == zero for k in self.terms)

    def monomials(self):
        """Yield ``(names_with_powers, coeff)`` in canonical print order."""
        gens = self.gens.generators
        for key in sorted(self.terms, reverse=True):
            yield tuple((gens[i].name, e) for i, e in enumerate(key) if e), self.terms[key]

    def embed(self, gens: GeneratorSet) -> "GPoly":
        """Re-express over another generator set containing every used name."""
        if gens == self.gens:
            return self
        src = self.gens.generators
        pos = []
        for i, g in enumerate(src):
            if g.name in gens:
                if gens[g.name].degree != g.degree:
                    raise AlgebraError(f"degree mismatch for {g.name!r} on embedding")
                pos.append((i, gens.index(g.name)))
        used = self.free_names()
        missing = used - {src[i].name for i, _ in pos}
        if missing:
            raise AlgebraError(f"generators {sorted(missing)} absent from target set")
        n = len(gens)
        # relative order of the kept generators may change; rebuild by products
        order_kept = [j for _, j in pos]
        if order_kept == sorted(order_kept):
            out = {}
            for key, c in self.terms.items():
                new = [0] * n
                for i, j in pos:
                    new[j] = key[i]
                out[tuple(new)] = c
            return GPoly(gens, out)
        return substitute(self, {}, gens, check=False)

    def deriv(self, name: str, side: str = "left") -> "GPoly":
        return deriv(self, name, side)

    def subs(self, mapping: Mapping[str, "GPoly"], target: GeneratorSet | None = None):
        return substitute(self, mapping, target, check=False)

    def evaluate(self, values: Mapping[str, object]) -> "GPoly":
        """Substitute rational numbers for even generators."""
        target = GeneratorSet(g for g in self.gens if g.name not in values)
        mapping = {}
        for name, v in values.items():
            if name not in self.gens:
                continue
            if self.gens[name].odd:
                raise AlgebraError(f"cannot evaluate odd generator {name!r}")
            mapping[name] = target.const(v)
        return substitute(self, mapping, target, check=False)

    # rendering ------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"GPoly({format_poly(self)!r})"


# ---------------------------------------------------------------------------
# operations

def mul(a: GPoly, b: GPoly) -> GPoly:
    return a * b


def deriv(p: GPoly, name: str, side: str = "left") -> GPoly:
    if side not in ("left", "right"):
        raise AlgebraError(f"side must be 'left' or 'right', not {side!r}")
    pos = p.gens.index(name)
    g = p.gens.generators[pos]
    return GPoly(
        p.gens,
        kernel.deriv_terms(p.terms, pos, g.odd, side == "right", p.gens.odd_positions),
    )


def substitute(
    p: GPoly,
    mapping: Mapping[str, GPoly],
    target: GeneratorSet | None = None,
    check: bool = True,
) -> GPoly:
    """Algebra morphism sending each generator to its image.

    Generators absent from ``mapping`` are sent to the generator of the same
    name in ``target``.  With ``check`` the images must be homogeneous of the
    source generator's degree.
    """
    target = p.gens if target is None else target
    src = p.gens.generators
    images = []
    for g in src:
        if g.name in mapping:
            img = mapping[g.name]
            if not isinstance(img, GPoly):
                img = target.const(img)
            elif img.gens != target:
                raise AlgebraError(f"image of {g.name!r} lives over another generator set")
            if check and img.terms:
                ds = img.degrees()
                if ds != {g.degree}:
                    if len(ds) > 1:
                        raise AlgebraError(f"degree-inhomogeneous image for {g.name!r}")
                    raise AlgebraError(
                        f"image of {g.name!r} has degree {ds.pop()}, expected {g.degree}"
                    )
            images.append(img)
        elif g.name in target:
            if target[g.name].degree != g.degree:
                raise AlgebraError(f"degree mismatch for {g.name!r}")
            images.append(None)
        else:
            images.append(False)
    cache: dict = {}
    out = {}
    for key, c in p.terms.items():
        mono = None
        for i, e in enumerate(key):
            if not e:
                continue
            img = images[i]
            if img is False:
                raise AlgebraError(f"no image for generator {src[i].name!r}")
            ck = (i, e)
            fac = cache.get(ck)
            if fac is None:
                base = target.var(src[i].name) if img is None else img
                fac = base ** e
                cache[ck] = fac
            mono = fac if mono is None else mono * fac
            if not mono.terms:
                break
        if mono is None:
            mono = target.one()
        kernel.add_scaled(out, mono.terms, c)
    return GPoly(target, out)


@dataclass(frozen=True)
class OddPairing:
    """Conjugate pairs ``(position, momentum)`` with degrees summing to 1."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        seen = set()
        for q, p in self.pairs:
            for n in (q, p):
                if n in seen:
                    raise AlgebraError(f"generator {n!r} appears in two pairs")
                seen.add(n)

    def validate(self, gens: GeneratorSet):
        for q, p in self.pairs:
            if gens[q].degree + gens[p].degree != 1:
                raise AlgebraError(f"pair ({q}, {p}) does not have total degree 1")

    @property
    def names(self) -> set[str]:
        return {n for pair in self.pairs for n in pair}


def odd_bracket(F: GPoly, G: GPoly, pairing: OddPairing) -> GPoly:
    if F.gens != G.gens:
        raise AlgebraError("polynomials over different generator sets")
    pairing.validate(F.gens)
    names = pairing.names
    stray = (F.free_names() | G.free_names()) - names
    if stray:
        raise AlgebraError(f"unpaired generators {sorted(stray)} in bracket arguments")
    out = F.gens.zero()
    for q, p in pairing.pairs:
        Fq = deriv(F, q, "right")
        if Fq.terms:
            Gp = deriv(G, p, "left")
            if Gp.terms:
                out = out + Fq * Gp
        Fp = deriv(F, p, "right")
        if Fp.terms:
            Gq = deriv(G, q, "left")
            if Gq.terms:
                out = out - Fp * Gq
    return out


def schouten(U: GPoly, V: GPoly, pairs: Iterable[tuple[str, str]]) -> GPoly:
    """Schouten-Nijenhuis bracket; ``pairs`` lists ``(coordinate, eta)``."""
    pairs = tuple(pairs)
    return odd_bracket(U, V, OddPairing(tuple((eta, x) for x, eta in pairs)))


# ---------------------------------------------------------------------------
# text form

def _fmt_coeff(c) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_poly(p: GPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for mono, c in p.monomials():
        neg = c < 0
        a = -c if neg else c
        factors = [n if e == 1 else f"{n}^{e}" for n, e in mono]
        if not factors:
            body = _fmt_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _fmt_coeff(a) + "*" + "*".join(factors)
        parts.append(("-" if neg else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def parse_poly(text: str, gens: GeneratorSet) -> GPoly:
    """Parse the polynomial grammar.

    Grammar: sums and differences of products of factors; a factor is an
    integer literal, a rational literal ``n/d`` between integer literals, a
    declared generator name, a parenthesised expression, or a factor raised
    to a non-negative integer power with ``^``.  Products are read left to
    right, so odd generators pick up Koszul signs from their written order.
    """
    if not isinstance(text, str):
        raise PolyParseError("polynomial must be a string", str(text))
    if "**" in text:
        raise PolyParseError("use '^' for powers", text, text.index("**"))
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolyParseError("syntax error", text, exc.offset) from None
    return _build(tree.body, gens, text)


def _build(node, gens, text):
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Div):
            num, den = node.left, node.right
            sign = 1
            if isinstance(num, ast.UnaryOp) and isinstance(num.op, ast.USub) and _is_int(num.operand):
                sign, num = -1, num.operand
            if _is_int(num) and _is_int(den):
                if den.value == 0:
                    raise PolyParseError("zero denominator", text, node.col_offset)
                return gens.const(Fraction(sign * num.value, den.value))
            raise PolyParseError(
                "'/' is allowed only between integer literals", text, node.col_offset
            )
        if isinstance(node.op, ast.Pow):
            if not _is_int(node.right):
                raise PolyParseError("exponent must be a non-negative integer", text,
                                     node.col_offset)
            base = _build(node.left, gens, text)
            return base ** node.right.value
        left = _build(node.left, gens, text)
        right = _build(node.right, gens, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        raise PolyParseError("unsupported operator", text, node.col_offset)
    if isinstance(node, ast.UnaryOp):
        inner = _build(node.operand, gens, text)
        if isinstance(node.op, ast.USub):
            return -inner
        if isinstance(node.op, ast.UAdd):
            return inner
        raise PolyParseError("unsupported unary operator", text, node.col_offset)
    if isinstance(node, ast.Name):
        if node.id not in gens:
            raise PolyParseError(f"undeclared generator {node.id!r}", text, node.col_offset)
        return gens.var(node.id)
    if _is_int(node):
        return gens.const(node.value)
    raise PolyParseError("unsupported syntax", text, getattr(node, "col_offset", None))


def _is_int(node) -> bool:
    return (
        isinstance(node, ast.Constant)
        and type(node.value) is int
    )
