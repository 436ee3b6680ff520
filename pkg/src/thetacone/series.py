"""Exact arithmetic in the truncated monoid algebra and its Laurent extensions.

Curve classes are tuples of nonnegative ints over the chosen effective
generators.  A truncation ideal is a weight vector plus a bound: a class beta
is killed when weights . beta >= bound, which keeps the surviving monomials
finite and the radical equal to the maximal monomial ideal.

``TruncatedSeries`` is an element of k[P]/I with Fraction coefficients;
``LaurentElement`` additionally carries an integer lattice exponent per term
(elements of chamber rings A_I (x) k[Lambda]).  All operations are exact --
no floats anywhere.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError

CurveClass = tuple  # tuple[int, ...] over the effective generators
LatticeExp = tuple  # tuple[int, ...] exponent of z


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(k, a):
    return tuple(k * x for x in a)


def zero_vec(n):
    return (0,) * n


def is_effective(beta):
    return all(x >= 0 for x in beta)


@dataclass(frozen=True)
class TruncationIdeal:
    """I = { beta in P : <weights, beta> >= bound }, with sqrt(I) = m."""

    weights: tuple
    bound: int

    def __post_init__(self):
        if self.bound < 1:
            raise ValidationError("truncation bound must be >= 1")
        if any(w < 1 for w in self.weights):
            raise ValidationError("truncation weights must all be >= 1")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def rank(self):
        return len(self.weights)

    def weight(self, beta):
        if len(beta) != len(self.weights):
            raise ValidationError(
                "class of rank %d against ideal of rank %d" % (len(beta), len(self.weights))
            )
        return sum(w * b for w, b in zip(self.weights, beta))

    def contains(self, beta):
        return self.weight(beta) >= self.bound

    def classes_below(self):
        """All beta in P \\ I, lexicographically sorted."""
        out = []

        def rec(prefix, used):
            if len(prefix) == len(self.weights):
                out.append(tuple(prefix))
                return
            w = self.weights[len(prefix)]
            c = 0
            while used + c * w < self.bound:
                rec(prefix + [c], used + c * w)
                c += 1

        rec([], 0)
        return sorted(out)


class TruncatedSeries:
    """Element of A_I = k[P]/I with exact rational coefficients."""

    __slots__ = ("ideal", "terms")

    def __init__(self, ideal, terms=None):
        self.ideal = ideal
        merged = {}
        for beta, c in (terms or {}).items():
            beta = tuple(int(x) for x in beta)
            if not is_effective(beta):
                raise ValidationError("curve class %s is not effective" % (beta,))
            if ideal.contains(beta):
                continue
            c = Fraction(c)
            if c:
                merged[beta] = merged.get(beta, Fraction(0)) + c
        self.terms = {b: c for b, c in merged.items() if c}

    @classmethod
    def zero(cls, ideal):
        return cls(ideal)

    @classmethod
    def one(cls, ideal):
        return cls.monomial(ideal, zero_vec(ideal.rank))

    @classmethod
    def monomial(cls, ideal, beta, coeff=1):
        return cls(ideal, {tuple(beta): Fraction(coeff)})

    def items(self):
        return sorted(self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.ideal == other.ideal and self.terms == other.terms
        if other == 0:
            return not self.terms
        if other == 1:
            return self.terms == {zero_vec(self.ideal.rank): Fraction(1)}
        return NotImplemented

    def __hash__(self):
        return hash((self.ideal, tuple(self.items())))

    def _check(self, other):
        if self.ideal != other.ideal:
            raise ValidationError("mixing series over different truncation ideals")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.monomial(self.ideal, zero_vec(self.ideal.rank), other)
        self._check(other)
        terms = dict(self.terms)
        for b, c in other.terms.items():
            terms[b] = terms.get(b, Fraction(0)) + c
        return TruncatedSeries(self.ideal, terms)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return TruncatedSeries(self.ideal, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.monomial(self.ideal, zero_vec(self.ideal.rank), other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries(self.ideal, {b: c * other for b, c in self.terms.items()})
        self._check(other)
        terms = {}
        for b1, c1 in self.terms.items():
            for b2, c2 in other.terms.items():
                b = vec_add(b1, b2)
                if self.ideal.contains(b):
                    continue
                terms[b] = terms.get(b, Fraction(0)) + c1 * c2
        return TruncatedSeries(self.ideal, terms)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        if n < 0:
            raise ValidationError("negative powers of truncated series")
        result = TruncatedSeries.one(self.ideal)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def min_weight(self):
        """m-adic order: least weight of a surviving term (None if zero)."""
        if not self.terms:
            return None
        return min(self.ideal.weight(b) for b in self.terms)

    def format(self, class_names=None):
        if not self.terms:
            return "0"
        parts = []
        for beta, c in self.items():
            mono = format_class(beta, class_names)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append("%s*%s" % (c, mono))
        return " + ".join(parts)

    def __repr__(self):
        return "TruncatedSeries(%s)" % self.format()


def format_class(beta, class_names=None):
    if not any(beta):
        return "1"
    parts = []
    for i, b in enumerate(beta):
        if b == 0:
            continue
        name = class_names[i] if class_names else "C%d" % (i + 1)
        parts.append("t^%s" % name if b == 1 else "t^(%d%s)" % (b, name))
    return "*".join(parts)


class LaurentElement:
    """Element of A_I (x) k[Lambda]: finite sum of c * t^beta * z^m."""

    __slots__ = ("ideal", "lattice_rank", "terms")

    def __init__(self, ideal, lattice_rank, terms=None):
        self.ideal = ideal
        self.lattice_rank = lattice_rank
        merged = {}
        for (m, beta), c in (terms or {}).items():
            m = tuple(int(x) for x in m)
            beta = tuple(int(x) for x in beta)
            if len(m) != lattice_rank:
                raise ValidationError("lattice exponent %s has wrong rank" % (m,))
            if not is_effective(beta):
                raise ValidationError("curve class %s is not effective" % (beta,))
            if ideal.contains(beta):
                continue
            c = Fraction(c)
            if c:
                merged[(m, beta)] = merged.get((m, beta), Fraction(0)) + c
        self.terms = {k: c for k, c in merged.items() if c}

    @classmethod
    def zero(cls, ideal, lattice_rank):
        return cls(ideal, lattice_rank)

    @classmethod
    def one(cls, ideal, lattice_rank):
        return cls.monomial(ideal, lattice_rank, zero_vec(lattice_rank))

    @classmethod
    def monomial(cls, ideal, lattice_rank, m, beta=None, coeff=1):
        if beta is None:
            beta = zero_vec(ideal.rank)
        return cls(ideal, lattice_rank, {(tuple(m), tuple(beta)): Fraction(coeff)})

    def items(self):
        # canonical order: lexicographic on (beta, m)
        return sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, LaurentElement):
            return (
                self.ideal == other.ideal
                and self.lattice_rank == other.lattice_rank
                and self.terms == other.terms
            )
        if other == 0:
            return not self.terms
        if other == 1:
            key = (zero_vec(self.lattice_rank), zero_vec(self.ideal.rank))
            return self.terms == {key: Fraction(1)}
        return NotImplemented

    def __hash__(self):
        return hash((self.ideal, self.lattice_rank, tuple(self.items())))

    def _check(self, other):
        if self.ideal != other.ideal or self.lattice_rank != other.lattice_rank:
            raise ValidationError("mixing Laurent elements over incompatible rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentElement.monomial(
                self.ideal, self.lattice_rank, zero_vec(self.lattice_rank), coeff=other
            )
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return LaurentElement(self.ideal, self.lattice_rank, terms)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return LaurentElement(
            self.ideal, self.lattice_rank, {k: -c for k, c in self.terms.items()}
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentElement.monomial(
                self.ideal, self.lattice_rank, zero_vec(self.lattice_rank), coeff=other
            )
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentElement(
                self.ideal, self.lattice_rank, {k: c * other for k, c in self.terms.items()}
            )
        self._check(other)
        terms = {}
        for (m1, b1), c1 in self.terms.items():
            for (m2, b2), c2 in other.terms.items():
                b = vec_add(b1, b2)
                if self.ideal.contains(b):
                    continue
                key = (vec_add(m1, m2), b)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return LaurentElement(self.ideal, self.lattice_rank, terms)

    def __rmul__(self, other):
        return self.__mul__(other)

    def is_nilpotent(self):
        """x == 0 mod m: every term carries a nonzero curve class."""
        return all(any(beta) for (_, beta) in self.terms)

    def is_one_unit(self):
        """x == 1 mod m."""
        key = (zero_vec(self.lattice_rank), zero_vec(self.ideal.rank))
        rest = {k: c for k, c in self.terms.items() if k != key}
        return self.terms.get(key) == 1 and all(any(beta) for (_, beta) in rest)

    def inverse(self):
        """Inverse of a 1-unit (geometric series, finite mod I)."""
        if not self.is_one_unit():
            raise ValidationError("only 1-units are invertible here")
        n = self - 1
        result = LaurentElement.one(self.ideal, self.lattice_rank)
        power = LaurentElement.one(self.ideal, self.lattice_rank)
        sign = 1
        for _ in range(self.ideal.bound + 1):
            power = power * n
            sign = -sign
            if not power:
                break
            result = result + power * sign
        return result

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        result = LaurentElement.one(self.ideal, self.lattice_rank)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def format(self, class_names=None, var="z"):
        if not self.terms:
            return "0"
        parts = []
        for (m, beta), c in self.items():
            factors = []
            if c != 1 or (not any(m) and not any(beta)):
                factors.append(str(c))
            cls = format_class(beta, class_names)
            if cls != "1":
                factors.append(cls)
            if any(m):
                exp = ",".join(str(x) for x in m)
                factors.append("%s^(%s)" % (var, exp) if len(m) > 1 else "%s^%s" % (var, exp))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return "LaurentElement(%s)" % self.format()


def exp_nilpotent(x):
    """exp of a Laurent element that vanishes mod m; finite sum mod I."""
    if not x.is_nilpotent():
        raise ValidationError("exp needs a nilpotent argument (== 0 mod m)")
    result = LaurentElement.one(x.ideal, x.lattice_rank)
    power = LaurentElement.one(x.ideal, x.lattice_rank)
    fact = 1
    for k in range(1, x.ideal.bound + 1):
        power = power * x
        if not power:
            break
        fact *= k
        result = result + power * Fraction(1, fact)
    return result


def log_unit(f):
    """log of a 1-unit mod I; inverse of exp_nilpotent."""
    if not f.is_one_unit():
        raise ValidationError("log needs a 1-unit argument (== 1 mod m)")
    x = f - 1
    result = LaurentElement.zero(f.ideal, f.lattice_rank)
    power = LaurentElement.one(f.ideal, f.lattice_rank)
    for k in range(1, f.ideal.bound + 1):
        power = power * x
        if not power:
            break
        result = result + power * Fraction((-1) ** (k + 1), k)
    return result


def series_to_laurent(s, lattice_rank):
    return LaurentElement(
        s.ideal,
        lattice_rank,
        {(zero_vec(lattice_rank), beta): c for beta, c in s.terms.items()},
    )


def laurent_to_series(x):
    """Project a z-free Laurent element back to A_I."""
    terms = {}
    for (m, beta), c in x.terms.items():
        if any(m):
            raise ValidationError("element has nonzero lattice exponents")
        terms[beta] = c
    return TruncatedSeries(x.ideal, terms)
