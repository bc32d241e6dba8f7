"""Exact coefficient rings for motivic series of nodal curves.

Everything in this package that looks like a power series is in fact a
rational class: a Laurent polynomial in q and a second weight variable
(L, the class of the affine line, or t, the weight variable) divided by
a monomial in the two special factors

    (1 - q)          and          (1 - q*L)    (resp. (1 - q*t^2)).

Keeping classes in this localized form instead of truncating power
series makes every identity check exact: two classes are equal iff their
canonical forms coincide, with no truncation order to configure.

Also provided here:

* ``VertexClass`` - the square-zero ring on vertex variables Q^v, with
  the exponential sending Q^v to 1 + Q^v (sums of disjointly supported
  classes go to products),
* ``ULaurent`` and ``u_convert`` - Laurent polynomials in the variable
  u = q/(1-q)^2 and the constructive extraction of u-coefficients from
  a rational class with L = 1.

All values are immutable after construction and safe to share between
threads. Coefficients are arbitrary-precision integers.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping


class RingError(ValueError):
    """A value left the ring (bad substitution, non-expressible series)."""


def _merge(terms):
    """Collect an iterable of ((iq, jy), coeff) into a zero-free dict."""
    out = {}
    for key, c in terms:
        c = out.get(key, 0) + c
        if c:
            out[key] = c
        elif key in out:
            del out[key]
    return out


class _Localized:
    """num / ((1-q)^a * (1-q*y^k)^b) with num a Laurent polynomial in q, y.

    ``y`` is the second variable (class attribute VAR) and ``k`` its
    coupling power in the second denominator factor (class attribute
    COUPLE): L couples as 1 - q*L, t couples as 1 - q*t^2.

    Instances are canonical: common factors of (1-q) and (1-q*y^k) are
    divided out of the numerator at construction, so equality is plain
    structural equality.
    """

    VAR = "y"
    COUPLE = 1
    __slots__ = ("num", "den_q", "den_qy")

    def __init__(self, num=None, den_q=0, den_qy=0):
        if den_q < 0 or den_qy < 0:
            raise ValueError("denominator exponents must be nonnegative")
        terms = dict(num) if num else {}
        for key, c in terms.items():
            if not isinstance(c, int):
                raise TypeError(f"coefficients must be int, got {type(c).__name__}")
        terms = {k: c for k, c in terms.items() if c}
        # canonical form: peel denominator factors that divide the numerator
        while den_q > 0 and terms:
            quot = _divide_one_minus_q(terms)
            if quot is None:
                break
            terms, den_q = quot, den_q - 1
        while den_qy > 0 and terms:
            quot = _divide_one_minus_qy(terms, self.COUPLE)
            if quot is None:
                break
            terms, den_qy = quot, den_qy - 1
        if not terms:
            den_q = den_qy = 0
        object.__setattr__(self, "num", terms)
        object.__setattr__(self, "den_q", den_q)
        object.__setattr__(self, "den_qy", den_qy)

    def __setattr__(self, name, value):
        raise AttributeError("ring elements are immutable")

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({(0, 0): 1})

    @classmethod
    def monomial(cls, iq, jy=0, coeff=1):
        """coeff * q^iq * y^jy (negative exponents allowed)."""
        return cls({(iq, jy): coeff})

    @classmethod
    def from_int(cls, n):
        return cls({(0, 0): n} if n else {})

    # -- ring operations ---------------------------------------------

    def _coerce(self, other):
        if isinstance(other, int):
            return type(self).from_int(other)
        if type(other) is not type(self):
            raise TypeError(f"cannot mix {type(self).__name__} with {type(other).__name__}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        a = max(self.den_q, other.den_q)
        b = max(self.den_qy, other.den_qy)
        n1 = _mul_terms(self.num, _den_terms(a - self.den_q, b - self.den_qy, self.COUPLE))
        n2 = _mul_terms(other.num, _den_terms(a - other.den_q, b - other.den_qy, self.COUPLE))
        return type(self)(_merge(itertools.chain(n1.items(), n2.items())), a, b)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({k: -c for k, c in self.num.items()}, self.den_q, self.den_qy)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return type(self)(
            _mul_terms(self.num, other.num),
            self.den_q + other.den_q,
            self.den_qy + other.den_qy,
        )

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = type(self).one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = type(self).from_int(other)
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.num == other.num
            and self.den_q == other.den_q
            and self.den_qy == other.den_qy
        )

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.num.items()), self.den_q, self.den_qy))

    def is_zero(self):
        return not self.num

    def is_polynomial(self):
        return self.den_q == 0 and self.den_qy == 0

    # -- substitutions -----------------------------------------------

    def substitute_q_one(self):
        """Evaluate q = 1. Signals RingError on a non-polynomial class."""
        if self.den_q or self.den_qy:
            raise RingError("q = 1 on a class with uncancelled denominator")
        terms = _merge(((0, j), c) for (i, j), c in self.num.items())
        return type(self)(terms)

    def substitute_y_one(self):
        """Evaluate the second variable to 1; (1-q*y^k) folds into (1-q)."""
        terms = _merge(((i, 0), c) for (i, j), c in self.num.items())
        return type(self)(terms, self.den_q + self.den_qy, 0)

    def scale_q(self, c):
        """q -> c*q for an integer scalar, on polynomial classes only."""
        if self.den_q or self.den_qy:
            raise RingError("q -> c*q on a class with uncancelled denominator")
        if c == 0:
            raise ValueError("scalar must be nonzero")
        out = {}
        for (i, j), coeff in self.num.items():
            if i >= 0:
                out[(i, j)] = coeff * c**i
            elif c in (1, -1):
                out[(i, j)] = coeff * c ** (i % 2)
            else:
                raise RingError("negative q-exponent under q -> c*q with |c| != 1")
        return type(self)(out)

    # -- rendering ----------------------------------------------------

    def _num_str(self):
        if not self.num:
            return "0"
        parts = []
        for (i, j), c in sorted(self.num.items()):
            factors = []
            if i:
                factors.append("q" if i == 1 else f"q^{i}")
            if j:
                factors.append(self.VAR if j == 1 else f"{self.VAR}^{j}")
            mag = abs(c)
            if mag != 1 or not factors:
                factors.insert(0, str(mag))
            mono = "*".join(factors)
            if not parts:
                parts.append(mono if c > 0 else f"-{mono}")
            else:
                parts.append(f"+ {mono}" if c > 0 else f"- {mono}")
        return " ".join(parts)

    def _den_str(self):
        facs = []
        if self.den_q:
            facs.append("(1-q)" if self.den_q == 1 else f"(1-q)^{self.den_q}")
        if self.den_qy:
            base = f"(1-q*{self.VAR})" if self.COUPLE == 1 else f"(1-q*{self.VAR}^{self.COUPLE})"
            facs.append(base if self.den_qy == 1 else f"{base}^{self.den_qy}")
        return "*".join(facs)

    def __str__(self):
        den = self._den_str()
        if not den:
            return self._num_str()
        num = self._num_str()
        if len(self.num) > 1:
            num = f"({num})"
        return f"{num} / ({den})"

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def to_json(self):
        """JSON-friendly canonical form mirroring the internal map."""
        return {
            "num": [[i, j, c] for (i, j), c in sorted(self.num.items())],
            "den_q": self.den_q,
            f"den_q{self.VAR}": self.den_qy,
        }


class RationalQL(_Localized):
    """Class in Z[q^{+-1}, L^{+-1}] localized at (1-q), (1-q*L)."""

    VAR = "L"
    COUPLE = 1
    __slots__ = ()

    def substitute_L_one(self):
        return self.substitute_y_one()

    def substitute_L_tsq(self):
        """Map L -> t^2, landing in the weight-polynomial ring."""
        terms = {(i, 2 * j): c for (i, j), c in self.num.items()}
        return WeightPoly(terms, self.den_q, self.den_qy)


class WeightPoly(_Localized):
    """Class in Z[q^{+-1}, t^{+-1}] localized at (1-q), (1-q*t^2)."""

    VAR = "t"
    COUPLE = 2
    __slots__ = ()


def qL(iq=1, jL=1, coeff=1):
    """Shorthand monomial coeff * q^iq * L^jL."""
    return RationalQL.monomial(iq, jL, coeff)


ONE = RationalQL.one()
ZERO = RationalQL.zero()


def inv_1q_1qL(power_q=1, power_qL=1):
    """The class 1 / ((1-q)^power_q * (1-q*L)^power_qL)."""
    return RationalQL({(0, 0): 1}, power_q, power_qL)


# ----------------------------------------------------------------------
# numerator division helpers

def _mul_terms(t1, t2):
    if not t1 or not t2:
        return {}
    out = {}
    for (i1, j1), c1 in t1.items():
        for (i2, j2), c2 in t2.items():
            key = (i1 + i2, j1 + j2)
            c = out.get(key, 0) + c1 * c2
            if c:
                out[key] = c
            elif key in out:
                del out[key]
    return out


def _den_terms(a, b, couple):
    """Expanded numerator form of (1-q)^a * (1-q*y^k)^b."""
    out = {(0, 0): 1}
    for _ in range(a):
        out = _mul_terms(out, {(0, 0): 1, (1, 0): -1})
    for _ in range(b):
        out = _mul_terms(out, {(0, 0): 1, (1, couple): -1})
    return out


def _divide_linear(columns):
    """Divide sum_m col[m] * x^m by (1 - x), columnwise.

    ``columns`` maps a residual key to {x_exponent: coeff}. Returns the
    quotient in the same shape, or None when not divisible (some column
    sums to a nonzero value at x = 1).
    """
    quot = {}
    for key, col in columns.items():
        lo, hi = min(col), max(col)
        run = 0
        qcol = {}
        for m in range(lo, hi + 1):
            run += col.get(m, 0)
            if m < hi and run:
                qcol[m] = run
        if run != 0:
            return None
        if qcol:
            quot[key] = qcol
    return quot


def _divide_one_minus_q(terms):
    """terms / (1-q), or None when not divisible."""
    cols = {}
    for (i, j), c in terms.items():
        cols.setdefault(j, {})[i] = c
    quot = _divide_linear(cols)
    if quot is None:
        return None
    return {(i, j): c for j, col in quot.items() for i, c in col.items()}


def _divide_one_minus_qy(terms, couple):
    """terms / (1 - q*y^couple), or None when not divisible.

    Change coordinates to w = q*y^couple: q^i y^j = w^a * q^b * y^r with
    j = couple*a + r (0 <= r < couple) and b = i - a, then divide by
    (1 - w) along the a-direction.
    """
    cols = {}
    for (i, j), c in terms.items():
        r = j % couple
        a = (j - r) // couple
        cols.setdefault((i - a, r), {})[a] = c
    quot = _divide_linear(cols)
    if quot is None:
        return None
    out = {}
    for (b, r), col in quot.items():
        for a, c in col.items():
            out[(b + a, couple * a + r)] = c
    return out


# ----------------------------------------------------------------------
# the square-zero vertex ring

class VertexClass:
    """Element of the square-zero ring on vertex variables Q^v.

    A value is a finite map from vertex-id subsets S to RationalQL
    coefficients (of the squarefree monomial Q^S = prod_{v in S} Q^v);
    absent subsets are zero. The host vertex universe is fixed per value
    and products of overlapping monomials vanish.
    """

    __slots__ = ("universe", "coeffs")

    def __init__(self, universe, coeffs=None):
        object.__setattr__(self, "universe", frozenset(universe))
        clean = {}
        for key, val in (coeffs or {}).items():
            key = frozenset(key)
            if not key <= self.universe:
                raise ValueError(f"subset {sorted(key)} not inside the vertex universe")
            if isinstance(val, int):
                val = RationalQL.from_int(val)
            if not val.is_zero():
                clean[key] = val
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("VertexClass values are immutable")

    def coefficient(self, subset):
        return self.coeffs.get(frozenset(subset), ZERO)

    def _check(self, other):
        if not isinstance(other, VertexClass):
            raise TypeError("expected a VertexClass")
        if other.universe != self.universe:
            raise ValueError("vertex universes differ")

    def __add__(self, other):
        self._check(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return VertexClass(
            self.universe,
            {k: self.coefficient(k) + other.coefficient(k) for k in keys},
        )

    def __mul__(self, other):
        self._check(other)
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                if k1 & k2:
                    continue  # Q^v squares to zero
                key = k1 | k2
                out[key] = out.get(key, ZERO) + v1 * v2
        return VertexClass(self.universe, out)

    def __eq__(self, other):
        if not isinstance(other, VertexClass):
            return NotImplemented
        return self.universe == other.universe and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.universe, frozenset(self.coeffs.items())))

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for key in sorted(self.coeffs, key=lambda s: (len(s), sorted(s))):
            mono = "*".join(f"Q^{v}" for v in sorted(key)) if key else "1"
            bits.append(f"{mono}: {self.coeffs[key]}")
        return "; ".join(bits)

    def to_json(self):
        return [
            {"subset": sorted(key), "value": val.to_json()}
            for key, val in sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        ]


def vertex_exp(f: VertexClass) -> VertexClass:
    """Exponential of the square-zero vertex ring.

    Sends Q^v to 1 + Q^v and sums to products; concretely the coefficient
    of Q^S in exp(f) is the sum over set partitions S = union of blocks
    of the product of f's coefficients on the blocks, and the constant
    term is 1. Requires f to have zero constant term.
    """
    if not f.coefficient(()).is_zero():
        raise RingError("vertex exponential needs a zero constant term")
    support = set().union(*f.coeffs.keys()) if f.coeffs else set()
    cache = {frozenset(): ONE}

    def exp_on(subset):
        subset = frozenset(subset)
        try:
            return cache[subset]
        except KeyError:
            pass
        # fix the smallest element; sum over the block containing it
        pivot = min(subset)
        rest = sorted(subset - {pivot})
        total = ZERO
        for r in range(len(rest) + 1):
            for extra in itertools.combinations(rest, r):
                block = frozenset((pivot, *extra))
                fb = f.coeffs.get(block)
                if fb is None:
                    continue
                total = total + fb * exp_on(subset - block)
        cache[subset] = total
        return total

    out = {frozenset(): ONE}
    for r in range(1, len(support) + 1):
        for subset in itertools.combinations(sorted(support), r):
            val = exp_on(frozenset(subset))
            if not val.is_zero():
                out[frozenset(subset)] = val
    return VertexClass(f.universe, out)


# ----------------------------------------------------------------------
# the u-ring, u = q/(1-q)^2

class ULaurent:
    """Laurent polynomial in u = q/(1-q)^2 with integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        for e, c in (coeffs or {}).items():
            if not isinstance(c, int):
                raise TypeError("ULaurent coefficients must be int")
            if c:
                clean[int(e)] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("ULaurent values are immutable")

    @classmethod
    def monomial(cls, exponent, coeff=1):
        return cls({exponent: coeff})

    @classmethod
    def one(cls):
        return cls({0: 1})

    def coefficient(self, exponent):
        return self.coeffs.get(exponent, 0)

    def __add__(self, other):
        if isinstance(other, int):
            other = ULaurent({0: other})
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return ULaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return ULaurent({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = ULaurent({0: other})
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = ULaurent({0: other})
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return ULaurent(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = ULaurent({0: other})
        if not isinstance(other, ULaurent):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def is_zero(self):
        return not self.coeffs

    def min_exponent(self):
        return min(self.coeffs) if self.coeffs else None

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in sorted(self.coeffs.items()):
            mono = "1" if e == 0 else ("u" if e == 1 else f"u^{e}")
            if abs(c) != 1 or e == 0:
                mono = f"{abs(c)}*{mono}" if e != 0 else str(abs(c))
            if not parts:
                parts.append(mono if c > 0 else f"-{mono}")
            else:
                parts.append(f"+ {mono}" if c > 0 else f"- {mono}")
        return " ".join(parts)

    def __repr__(self):
        return f"ULaurent({self})"


def u_power(m: int) -> RationalQL:
    """u^m = q^m / (1-q)^{2m} as a rational class (m may be negative)."""
    if m >= 0:
        return RationalQL({(m, 0): 1}, 2 * m, 0)
    return RationalQL(_den_terms(-2 * m, 0, 1), 0, 0) * RationalQL.monomial(m, 0)


def u_convert(f: RationalQL, genus: int = None) -> ULaurent:
    """Write an L-free rational class as a Laurent polynomial in u.

    Works by repeatedly peeling the lowest u-power: the q-adic valuation
    of f names the candidate exponent m, the matching numerator
    coefficient names c_m, and f - c_m*u^m strictly raises the valuation.
    Raises RingError when f is not u-expressible (peeling does not
    terminate or hits a fractional coefficient), or when ``genus`` is
    given and a u-exponent below 1 - genus shows up.
    """
    if any(j for (_, j) in f.num) or f.den_qy:
        raise RingError("u-conversion needs an L-free class")
    out = {}
    budget = (max(i for (i, _) in f.num) - min(i for (i, _) in f.num) if f.num else 0)
    budget += f.den_q + 8
    work = f
    for _ in range(budget + 1):
        if work.is_zero():
            result = ULaurent(out)
            if genus is not None and result.coeffs and result.min_exponent() < 1 - genus:
                raise RingError(
                    f"u-exponent {result.min_exponent()} below the bound {1 - genus}"
                )
            return result
        m = min(i for (i, _) in work.num)
        c = work.num[(m, 0)]
        out[m] = c
        work = work - u_power(m) * c
        if work.num and min(i for (i, _) in work.num) <= m:
            raise RingError("not expressible in u: valuation did not increase")
    raise RingError("not expressible in u: peeling did not terminate")
