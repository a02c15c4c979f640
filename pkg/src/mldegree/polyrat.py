"""Sparse multivariate polynomials and rational functions.

Coefficients live in one of two domains: ``"exact"`` (``fractions.Fraction``)
or ``"complex"`` (Python ``complex``).  Polynomials are immutable; every
operation returns a new object.  Terms are stored in a dict keyed by exponent
tuples and listed in graded-lexicographic order (highest first).
"""

from __future__ import annotations

import ast
from fractions import Fraction
from numbers import Number
from typing import Iterable, NamedTuple, Sequence

EXACT = "exact"
COMPLEX = "complex"
DOMAINS = (EXACT, COMPLEX)


class DomainError(ValueError):
    """Operands disagree on variable count or coefficient domain."""


def grlex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


def _coerce(c, domain: str):
    if domain == EXACT:
        if isinstance(c, Fraction):
            return c
        if isinstance(c, int):
            return Fraction(c)
        if isinstance(c, float):
            return Fraction(c)
        if isinstance(c, complex):
            raise DomainError("complex coefficient in exact polynomial")
        return Fraction(c)
    return complex(c)


class Polynomial:
    """Sparse polynomial in ``nvars`` variables.

    >>> x = Polynomial.variable(0, 1)
    >>> str((x + 1) * (x - 1))
    'x0^2 - 1'
    """

    __slots__ = ("nvars", "terms", "domain", "_hash")

    def __init__(self, nvars: int, terms=None, domain: str = EXACT):
        if domain not in DOMAINS:
            raise DomainError(f"unknown domain {domain!r}")
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) < nvars:
                exps = exps + (0,) * (nvars - len(exps))
            elif len(exps) > nvars:
                if any(exps[nvars:]):
                    raise DomainError("monomial uses more variables than nvars")
                exps = exps[:nvars]
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = _coerce(c, domain)
            if exps in clean:
                c = clean[exps] + c
            if c == 0:
                clean.pop(exps, None)
            else:
                clean[exps] = c
        self.nvars = nvars
        self.terms = clean
        self.domain = domain
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, nvars: int, domain: str = EXACT) -> "Polynomial":
        return cls(nvars, {}, domain)

    @classmethod
    def constant(cls, c, nvars: int, domain: str = EXACT) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c}, domain)

    @classmethod
    def variable(cls, index: int, nvars: int, domain: str = EXACT) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1}, domain)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1, domain: str = EXACT) -> "Polynomial":
        return cls(len(exps), {tuple(exps): coeff}, domain)

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> int:
        if not self.terms:
            return -1
        return max(e[index] for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, _coerce(0, self.domain))

    def max_coeff(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def used_variables(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    # conversions
    def to_complex(self) -> "Polynomial":
        if self.domain == COMPLEX:
            return self
        return Polynomial(self.nvars, {e: complex(c) for e, c in self.terms.items()}, COMPLEX)

    def extend(self, nvars: int) -> "Polynomial":
        """Same polynomial viewed in ``nvars >= self.nvars`` variables."""
        if nvars < self.nvars:
            raise DomainError("cannot shrink variable count")
        return Polynomial(nvars, self.terms, self.domain)

    # arithmetic
    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise DomainError(f"variable counts differ: {self.nvars} vs {other.nvars}")
        if self.domain != other.domain:
            raise DomainError(f"domains differ: {self.domain} vs {other.domain}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, Number):
            if self.domain == EXACT and isinstance(other, complex):
                raise DomainError("complex scalar with exact polynomial")
            return Polynomial.constant(other, self.nvars, self.domain)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.nvars, terms, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()}, self.domain)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, terms, self.domain)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(1, self.nvars, self.domain)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise ZeroDivisionError("polynomial divided by zero")
            if self.domain == EXACT:
                if isinstance(other, complex):
                    raise DomainError("complex scalar with exact polynomial")
                inv = 1 / Fraction(other)
            else:
                inv = 1 / complex(other)
            return self * inv
        if isinstance(other, (Polynomial, RationalFunction)):
            return RationalFunction(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return RationalFunction(self._lift(other)) / self
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Number):
            other = Polynomial.constant(other, self.nvars, self.domain)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.domain == other.domain
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.domain, frozenset(self.terms.items())))
        return self._hash

    # calculus and evaluation
    def diff(self, index: int) -> "Polynomial":
        if not 0 <= index < self.nvars:
            raise IndexError(f"variable index {index} out of range for {self.nvars} variables")
        terms = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                e2 = list(e)
                e2[index] = k - 1
                terms[tuple(e2)] = c * k
        return Polynomial(self.nvars, terms, self.domain)

    def __call__(self, point: Sequence):
        """Evaluate at ``point``; stays exact for exact coefficients and rational input."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for e, c in self.sorted_terms():
            t = c
            for xi, k in zip(point, e):
                if k:
                    t = t * xi**k
            total = total + t
        return total

    def compose(self, substitutions: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute polynomial ``substitutions[i]`` for variable ``i``."""
        if len(substitutions) != self.nvars:
            raise ValueError("need one substitution per variable")
        nv = substitutions[0].nvars
        dom = substitutions[0].domain
        result = Polynomial.zero(nv, dom)
        for e, c in self.terms.items():
            t = Polynomial.constant(c if dom == self.domain else complex(c), nv, dom)
            for s, k in zip(substitutions, e):
                if k:
                    t = t * s**k
            result = result + t
        return result

    def monomial_content(self) -> tuple[tuple[int, ...], "Polynomial"]:
        """Split into ``x^a * rest`` with ``a`` the componentwise minimum exponent."""
        if not self.terms:
            return (0,) * self.nvars, self
        a = tuple(min(e[i] for e in self.terms) for i in range(self.nvars))
        rest = {tuple(x - y for x, y in zip(e, a)): c for e, c in self.terms.items()}
        return a, Polynomial(self.nvars, rest, self.domain)

    def scalar_ratio(self, other: "Polynomial", rtol: float = 1e-13):
        """Return ``r`` with ``self == r * other``, or ``None``."""
        if self.nvars != other.nvars or self.is_zero() or other.is_zero():
            return None
        if set(self.terms) != set(other.terms):
            return None
        e0, c0 = self.leading_term()
        r = c0 / other.terms[e0]
        if self.domain == EXACT and other.domain == EXACT:
            ok = all(self.terms[e] == r * c for e, c in other.terms.items())
        else:
            scale = max(self.max_coeff(), 1e-300)
            ok = all(abs(self.terms[e] - r * c) <= rtol * scale for e, c in other.terms.items())
        return r if ok else None

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if self.domain == COMPLEX:
                cs = f"({c.real:.17g}{c.imag:+.17g}j)"
                sign, mag = "+", cs
            else:
                sign = "-" if c < 0 else "+"
                mag = str(abs(c))
            if mono:
                body = mono if mag == "1" else f"{mag}*{mono}"
            else:
                body = mag
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.format()!r}, {self.domain})"


class RationalFunction:
    """Quotient of two polynomials; the denominator is never zero."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: Polynomial, denominator: Polynomial | None = None):
        if denominator is None:
            denominator = Polynomial.constant(1, numerator.nvars, numerator.domain)
        numerator._check(denominator)
        if denominator.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.numerator = numerator
        self.denominator = denominator

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @property
    def domain(self) -> str:
        return self.numerator.domain

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError("rational function has a nonconstant denominator")
        return self.numerator / self.denominator.constant_term()

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def to_complex(self) -> "RationalFunction":
        return RationalFunction(self.numerator.to_complex(), self.denominator.to_complex())

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, Number):
            return RationalFunction(self.numerator._lift(other))
        return NotImplemented

    def _make(self, num: Polynomial, den: Polynomial) -> "RationalFunction":
        # cancel a shared monomial content, and the whole thing when num == r*den
        a_n, _ = num.monomial_content()
        a_d, _ = den.monomial_content()
        common = tuple(min(x, y) for x, y in zip(a_n, a_d))
        if any(common) and not num.is_zero():
            num = Polynomial(num.nvars, {tuple(x - y for x, y in zip(e, common)): c for e, c in num.terms.items()}, num.domain)
            den = Polynomial(den.nvars, {tuple(x - y for x, y in zip(e, common)): c for e, c in den.terms.items()}, den.domain)
        if num.is_zero():
            return RationalFunction(num, Polynomial.constant(1, num.nvars, num.domain))
        r = num.scalar_ratio(den)
        if r is not None:
            return RationalFunction(Polynomial.constant(r, num.nvars, num.domain))
        return RationalFunction(num, den)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.denominator == other.denominator:
            return self._make(self.numerator + other.numerator, self.denominator)
        return self._make(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._make(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.numerator.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return self._make(self.numerator * other.denominator, self.denominator * other.numerator)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("integer powers only")
        if k < 0:
            return RationalFunction(self.denominator**-k, self.numerator**-k)
        return RationalFunction(self.numerator**k, self.denominator**k)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return (self.numerator * other.denominator) == (other.numerator * self.denominator)

    __hash__ = None

    def diff(self, index: int) -> "RationalFunction":
        n, d = self.numerator, self.denominator
        if d.is_constant():
            return RationalFunction(n.diff(index), d)
        return self._make(n.diff(index) * d - n * d.diff(index), d * d)

    def __call__(self, point: Sequence):
        den = self.denominator(point)
        if den == 0:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.numerator(point) / den

    def format(self, names: Sequence[str] | None = None) -> str:
        if self.denominator.is_constant() and self.denominator.constant_term() == 1:
            return self.numerator.format(names)
        return f"({self.numerator.format(names)})/({self.denominator.format(names)})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RationalFunction({self.format()!r})"


# --------------------------------------------------------------------------
# functional interface


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_diff(p: Polynomial, var_index: int) -> Polynomial:
    return p.diff(var_index)


def poly_eval(p: Polynomial, point: Sequence) -> complex:
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, expected {p.nvars}")
    return complex(p.to_complex()([complex(z) for z in point]))


def _univariate_index(*polys: Polynomial) -> int:
    used = set()
    for p in polys:
        if p.domain != EXACT:
            raise DomainError("univariate gcd needs exact coefficients")
        used |= p.used_variables()
    if len(used) > 1:
        raise DomainError(f"polynomials are not univariate (variables {sorted(used)})")
    return used.pop() if used else 0


def _to_dense(p: Polynomial, idx: int) -> list[Fraction]:
    deg = p.degree()
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        coeffs[e[idx] if p.nvars else 0] = c
    return coeffs  # ascending powers


def _from_dense(coeffs: Sequence[Fraction], idx: int, nvars: int) -> Polynomial:
    terms = {}
    for k, c in enumerate(coeffs):
        e = [0] * nvars
        if nvars:
            e[idx] = k
        terms[tuple(e)] = c
    return Polynomial(nvars, terms, EXACT)


def _dense_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    b = list(b)
    while b and b[-1] == 0:
        b.pop()
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, bc in enumerate(b):
            a[i + shift] -= f * bc
        while a and a[-1] == 0:
            a.pop()
    return q, a


def univariate_divmod(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Exact Euclidean division ``a = q*b + r`` with ``deg r < deg b``."""
    a._check(b)
    idx = _univariate_index(a, b)
    q, r = _dense_divmod(_to_dense(a, idx), _to_dense(b, idx))
    return _from_dense(q, idx, a.nvars), _from_dense(r, idx, a.nvars)


def univariate_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd of two univariate exact polynomials by the Euclidean algorithm."""
    a._check(b)
    idx = _univariate_index(a, b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    u, v = _to_dense(a, idx), _to_dense(b, idx)
    while v:
        _, r = _dense_divmod(u, v)
        u, v = v, r
    while u and u[-1] == 0:
        u.pop()
    lead = u[-1]
    return _from_dense([c / lead for c in u], idx, a.nvars)


class ClearedSum(NamedTuple):
    numerator: Polynomial
    multiplier: Polynomial
    spurious_factors: list[Polynomial]


def clear_denominators(summands: Sequence[RationalFunction]) -> ClearedSum:
    """Write ``sum(summands)`` as ``numerator / multiplier``.

    The multiplier is the lcm of the monomial parts of the denominators times
    the product of their distinct (up to scalars) non-monomial parts.  The
    variables and non-monomial factors appearing in it are returned as
    spurious factors: zeros of those are artefacts of clearing.
    """
    if not summands:
        raise ValueError("clear_denominators needs at least one summand")
    nvars, domain = summands[0].nvars, summands[0].domain
    for s in summands:
        if s.nvars != nvars or s.domain != domain:
            raise DomainError("summands must share variables and domain")

    live = [s for s in summands if not s.numerator.is_zero()]
    factors: list[Polynomial] = []
    split = []
    amax = [0] * nvars
    for s in live:
        a, rest = s.denominator.monomial_content()
        amax = [max(x, y) for x, y in zip(amax, a)]
        if rest.is_constant():
            split.append((a, None, rest.constant_term()))
            continue
        for k, f in enumerate(factors):
            r = rest.scalar_ratio(f)
            if r is not None:
                split.append((a, k, r))
                break
        else:
            factors.append(rest)
            split.append((a, len(factors) - 1, 1))

    one = Polynomial.constant(1, nvars, domain)
    multiplier = Polynomial.monomial(amax, 1, domain) if nvars else one
    for f in factors:
        multiplier = multiplier * f

    numerator = Polynomial.zero(nvars, domain)
    for s, (a, k, scale) in zip(live, split):
        cof = Polynomial.monomial([x - y for x, y in zip(amax, a)], 1, domain) if nvars else one
        for j, f in enumerate(factors):
            if j != k:
                cof = cof * f
        numerator = numerator + (s.numerator * cof) / scale

    spurious = [Polynomial.variable(i, nvars, domain) for i in range(nvars) if amax[i]]
    spurious += factors
    return ClearedSum(numerator, multiplier, spurious)


# --------------------------------------------------------------------------
# text format


class ParseError(ValueError):
    """Malformed polynomial text."""


def parse_rational(text: str, names: Sequence[str], domain: str = EXACT) -> RationalFunction:
    """Parse ``"2*x*(1+x)^3 + 1"``-style text over the variables ``names``.

    Coefficients are integers or ratios of integers; ``^`` and ``**`` both mean
    a nonnegative integer power (negative powers produce rational functions).
    """
    nvars = len(names)
    index = {n: i for i, n in enumerate(names)}
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None

    def const(c) -> RationalFunction:
        return RationalFunction(Polynomial.constant(c, nvars, domain))

    def walk(node) -> RationalFunction:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            v = node.value
            if isinstance(v, bool) or not isinstance(v, (int, float, complex)):
                raise ParseError(f"unsupported literal {v!r} in {text!r}")
            if isinstance(v, float):
                v = Fraction(str(v)) if domain == EXACT else v
            if isinstance(v, complex) and domain == EXACT:
                raise ParseError(f"complex literal in exact polynomial {text!r}")
            return const(v)
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise ParseError(f"unknown variable {node.id!r} in {text!r}")
            return RationalFunction(Polynomial.variable(index[node.id], nvars, domain))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                sign = 1
                if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                    sign, exp = -1, exp.operand
                if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)):
                    raise ParseError(f"exponents must be integer literals in {text!r}")
                return walk(node.left) ** (sign * exp.value)
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                return left / right
        raise ParseError(f"unsupported syntax in {text!r}")

    return walk(tree)


def parse_polynomial(text: str, names: Sequence[str], domain: str = EXACT) -> Polynomial:
    rf = parse_rational(text, names, domain)
    if not rf.is_polynomial():
        raise ParseError(f"{text!r} is not a polynomial")
    return rf.as_polynomial()


def variables(names: Iterable[str] | int, domain: str = EXACT) -> list[Polynomial]:
    """Convenience: the coordinate polynomials for ``names`` (or a count)."""
    n = names if isinstance(names, int) else len(list(names))
    return [Polynomial.variable(i, n, domain) for i in range(n)]


def log_derivative(q: RationalFunction, index: int) -> list[RationalFunction]:
    """Summands of ``(dq/dt) / q`` for ``t`` = variable ``index``.

    Monomial content of numerator and denominator is peeled off first, so
    ``x*(1-y)`` contributes ``1/x`` to the x-derivative and
    ``-1/(1-y)``-style terms only to the y-derivative.  Zero summands are
    dropped.
    """
    if q.is_zero():
        raise ValueError("log derivative of the zero function")
    nvars, dom = q.nvars, q.domain
    out = []
    for part, sign in ((q.numerator, 1), (q.denominator, -1)):
        a, rest = part.monomial_content()
        if a[index]:
            out.append(RationalFunction(
                Polynomial.constant(sign * a[index], nvars, dom),
                Polynomial.variable(index, nvars, dom),
            ))
        if not rest.is_constant():
            d = rest.diff(index)
            if not d.is_zero():
                out.append(RationalFunction(d * sign, rest))
    return out
