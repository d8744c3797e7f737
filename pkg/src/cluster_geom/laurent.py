"""Sparse multivariate Laurent polynomials over arbitrary-precision integers.

Terms are stored as {exponent tuple: nonzero int coefficient}.  The canonical
term order used for serialization and leading-term selection is graded
lexicographic, read descending: higher total degree first, ties broken by the
lexicographically larger exponent tuple.

Exponents are kept below 2**62 in magnitude; crossing that bound raises
ExponentOverflow rather than silently producing huge objects.
"""

from __future__ import annotations

from math import comb

EXPONENT_LIMIT = 1 << 62


class ExponentOverflow(ArithmeticError):
    pass


def _check_exponents(exps):
    for e in exps:
        if abs(e) >= EXPONENT_LIMIT:
            raise ExponentOverflow(f"exponent {e} exceeds the supported range")


def _grlex_key(exps):
    return (sum(exps), exps)


class LaurentPolynomial:
    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars, terms=None):
        cleaned = {}
        for exps, coeff in (terms or {}).items():
            if coeff == 0:
                continue
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError("exponent vector length mismatch")
            if not all(isinstance(e, int) for e in exps) or not isinstance(coeff, int):
                raise TypeError("exponents and coefficients must be integers")
            _check_exponents(exps)
            cleaned[exps] = coeff
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPolynomial is immutable")

    @classmethod
    def _raw(cls, nvars, terms):
        # trusted constructor: terms already cleaned
        self = object.__new__(cls)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", terms)
        return self

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars, c):
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars):
        return cls.constant(nvars, 1)

    @classmethod
    def monomial(cls, exps, coeff=1):
        exps = tuple(exps)
        _check_exponents(exps)
        return cls._raw(len(exps), {exps: coeff} if coeff else {})

    @classmethod
    def variable(cls, nvars, i):
        return cls.monomial(tuple(1 if j == i else 0 for j in range(nvars)), 1)

    def terms(self):
        """Terms as ((exponents, coefficient), ...) in descending canonical order."""
        return tuple(
            (e, self._terms[e])
            for e in sorted(self._terms, key=_grlex_key, reverse=True)
        )

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def is_one(self):
        return self._terms == {(0,) * self.nvars: 1}

    def n_terms(self):
        return len(self._terms)

    def leading(self):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=_grlex_key)
        return e, self._terms[e]

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), 0)

    def min_exponents(self):
        """Componentwise minimum of all exponent vectors (zero poly: origin)."""
        if not self._terms:
            return (0,) * self.nvars
        cols = zip(*self._terms)
        return tuple(min(c) for c in cols)

    def max_abs_exponent(self):
        return max((abs(e) for exps in self._terms for e in exps), default=0)

    def max_total_degree(self):
        return max((sum(e) for e in self._terms), default=0)

    def has_nonnegative_coefficients(self):
        return all(c > 0 for c in self._terms.values())

    def _require_same_ring(self, other):
        if not isinstance(other, LaurentPolynomial):
            raise TypeError("expected a LaurentPolynomial")
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        self._require_same_ring(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPolynomial._raw(self.nvars, out)

    def __neg__(self):
        return LaurentPolynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPolynomial.zero(self.nvars)
            return LaurentPolynomial._raw(
                self.nvars, {e: other * c for e, c in self._terms.items()}
            )
        self._require_same_ring(other)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out = {}
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
        if out:
            _check_exponents(max(out, key=_grlex_key))
            _check_exponents(min(out, key=_grlex_key))
        return LaurentPolynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, a):
        if not isinstance(a, int) or a < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = LaurentPolynomial.one(self.nvars)
        base = self
        while a:
            if a & 1:
                result = result * base
            a >>= 1
            if a:
                base = base * base
        return result

    def shift(self, exps):
        """Multiply by the monomial z^exps."""
        exps = tuple(exps)
        out = {tuple(x + y for x, y in zip(e, exps)): c for e, c in self._terms.items()}
        for e in out:
            _check_exponents(e)
        return LaurentPolynomial._raw(self.nvars, out)

    def substitute_linear(self, transform):
        """Apply the monomial map z^m -> z^{T(m)} for a linear T given as a
        callable on exponent tuples.  T must be injective on the support."""
        out = {}
        for e, c in self._terms.items():
            te = tuple(transform(e))
            _check_exponents(te)
            if te in out:
                raise ValueError("monomial substitution collided on the support")
            out[te] = c
        return LaurentPolynomial._raw(self.nvars, out)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPolynomial)
            and self.nvars == other.nvars
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def to_str(self, names=None):
        """Canonical text form, e.g. "3*x1^2*x2^-1 + 1"."""
        if not self._terms:
            return "0"
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        chunks = []
        for exps, coeff in self.terms():
            factors = [
                f"{names[i]}^{e}" if e != 1 else names[i]
                for i, e in enumerate(exps)
                if e != 0
            ]
            if not factors:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(coeff))] + factors)
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(chunks)

    def __repr__(self):
        return f"<LaurentPolynomial {self.to_str()}>"


def binomial_power(v, a):
    """Expansion of (1 + z^v)^a for a >= 0."""
    if not isinstance(a, int) or a < 0:
        raise ValueError("binomial_power needs a nonnegative integer exponent")
    v = tuple(v)
    n = len(v)
    terms = {}
    for j in range(a + 1):
        e = tuple(j * x for x in v)
        _check_exponents(e)
        terms[e] = terms.get(e, 0) + comb(a, j)
    return LaurentPolynomial._raw(n, {e: c for e, c in terms.items() if c})


def exact_divide(p, q):
    """The Laurent polynomial r with q * r = p, or None if none exists.

    Both exponents are shifted so the divisor and dividend become ordinary
    polynomials with componentwise-minimal exponent zero; single-divisor
    reduction with the graded-lex leading term then either terminates with
    zero remainder (success) or proves no quotient exists.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if p.nvars != q.nvars:
        raise ValueError("variable count mismatch")
    if p.is_zero():
        return LaurentPolynomial.zero(p.nvars)
    sp = p.min_exponents()
    sq = q.min_exponents()
    phat = {tuple(x - y for x, y in zip(e, sp)): c for e, c in p.items()}
    qhat = {tuple(x - y for x, y in zip(e, sq)): c for e, c in q.items()}
    qlead = max(qhat, key=_grlex_key)
    qlc = qhat[qlead]
    quotient = {}
    rem = dict(phat)
    while rem:
        e = max(rem, key=_grlex_key)
        c = rem[e]
        diff = tuple(x - y for x, y in zip(e, qlead))
        if any(d < 0 for d in diff) or c % qlc != 0:
            return None
        f = c // qlc
        quotient[diff] = f
        for eq, cq in qhat.items():
            t = tuple(x + y for x, y in zip(diff, eq))
            s = rem.get(t, 0) - f * cq
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    shift_back = tuple(x - y for x, y in zip(sp, sq))
    return LaurentPolynomial._raw(
        p.nvars, {tuple(x + y for x, y in zip(e, shift_back)): c for e, c in quotient.items()}
    )


class RationalExpression:
    """A fraction of Laurent polynomials.  No automatic gcd reduction is
    performed; Laurent-ness is decided by a single exact division on demand."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = LaurentPolynomial.one(num.nvars)
        if num.nvars != den.nvars:
            raise ValueError("variable count mismatch")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalExpression is immutable")

    @classmethod
    def from_monomial(cls, exps, coeff=1):
        return cls(LaurentPolynomial.monomial(exps, coeff))

    @property
    def nvars(self):
        return self.num.nvars

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            other = RationalExpression(other)
        return RationalExpression(self.num * other.num, self.den * other.den)

    def __add__(self, other):
        if isinstance(other, LaurentPolynomial):
            other = RationalExpression(other)
        return RationalExpression(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def as_laurent(self):
        """The equal Laurent polynomial, or None when the fraction is not one."""
        return exact_divide(self.num, self.den)

    def equals(self, other):
        """Exact equality as rational functions (cross multiplication)."""
        return self.num * other.den == other.num * self.den

    def to_str(self, names=None):
        if self.den.is_one():
            return self.num.to_str(names)
        return f"({self.num.to_str(names)}) / ({self.den.to_str(names)})"

    def __repr__(self):
        return f"<RationalExpression {self.to_str()}>"


# ---------------------------------------------------------------------------
# Mutation pullbacks.  A mutation at an unfrozen index k acts on functions by
# a monomial-wise binomial twist:
#
#   A-side (dual-lattice characters):  z^m -> z^m (1 + z^{v_k})^{-<d_k e_k, m>}
#   X-side (lattice characters):       z^n -> z^n (1 + z^{e_k})^{-[n, e_k]}
#
# The inverse maps are the same twists with the opposite exponent sign, in the
# data of the same source seed.
# ---------------------------------------------------------------------------

def _as_expression(expr):
    if isinstance(expr, LaurentPolynomial):
        return RationalExpression(expr)
    if isinstance(expr, RationalExpression):
        return expr
    raise TypeError("expected a LaurentPolynomial or RationalExpression")


def monomial_twist(expr, v, g):
    """Apply z^m -> z^m (1 + z^v)^{g(m)} to a rational expression.

    Negative powers of the binomial are routed into the denominator; no
    reduction is attempted.
    """
    expr = _as_expression(expr)
    v = tuple(v)

    def twist_poly(p):
        if p.is_zero():
            return p, 0
        exps = {m: g(m) for m, _ in p.items()}
        floor = max(0, max(-e for e in exps.values()))
        out = LaurentPolynomial.zero(p.nvars)
        for m, c in p.items():
            out = out + binomial_power(v, exps[m] + floor).shift(m) * c
        return out, floor

    num, fn = twist_poly(expr.num)
    den, fd = twist_poly(expr.den)
    if fn >= fd:
        den = den * binomial_power(v, fn - fd)
    else:
        num = num * binomial_power(v, fd - fn)
    return RationalExpression(num, den)


def _a_side_exponent(seed, k):
    dk = seed.fixed.d[k]
    ek = seed.e_vector(k)
    scaled = tuple(dk * x for x in ek)

    def a_of(m):
        val = seed.pair_with_dual(scaled, m)
        if val.__class__ is not int:
            if val.denominator != 1:
                raise ValueError("pairing <d_k e_k, m> is not integral")
            val = int(val)
        return val

    return a_of


def pullback_A(seed, k, expr):
    """Pullback of a dual-side function along the mutation at k (source seed
    data): z^m -> z^m (1 + z^{v_k})^{-<d_k e_k, m>}."""
    if k in seed.fixed.frozen:
        raise ValueError(f"index {k} is frozen")
    a_of = _a_side_exponent(seed, k)
    return monomial_twist(expr, seed.v_vector(k), lambda m: -a_of(m))


def inverse_pullback_A(seed, k, expr):
    """Inverse of pullback_A in the same seed's data: the opposite twist.

    This expresses a function on this seed's torus in the coordinates of the
    mutated neighbour (up to the harmless linear double-mutation change of
    monomial basis)."""
    if k in seed.fixed.frozen:
        raise ValueError(f"index {k} is frozen")
    a_of = _a_side_exponent(seed, k)
    return monomial_twist(expr, seed.v_vector(k), a_of)


def _x_side_exponent(seed, k):
    dk = seed.fixed.d[k]
    ek = seed.e_vector(k)

    def a_of(n):
        val = seed.skew_pair(n, ek) * dk
        if val.__class__ is not int:
            if val.denominator != 1:
                raise ValueError("bracket [n, e_k] is not integral")
            val = int(val)
        return val

    return a_of


def pullback_X(seed, k, expr):
    """Pullback of a lattice-side function along the mutation at k:
    z^n -> z^n (1 + z^{e_k})^{-[n, e_k]}."""
    if k in seed.fixed.frozen:
        raise ValueError(f"index {k} is frozen")
    a_of = _x_side_exponent(seed, k)
    return monomial_twist(expr, seed.e_vector(k), lambda n: -a_of(n))


def inverse_pullback_X(seed, k, expr):
    if k in seed.fixed.frozen:
        raise ValueError(f"index {k} is frozen")
    a_of = _x_side_exponent(seed, k)
    return monomial_twist(expr, seed.e_vector(k), a_of)
