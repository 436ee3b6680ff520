"""The theta module and its product.

R_I is the free A_I-module on theta generators indexed by integral points of
the CY subcomplex; the product is assembled from candidate classes and a
table of supplied punctured-invariant counts.  theta_0 is the unit.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .lattice import height, support
from .pair import grading
from .series import TruncatedSeries, format_class, vec_add, zero_vec
from .solver import assemble_product, candidates


def _normalize_key(p, q, r, beta):
    p, q, r, beta = tuple(p), tuple(q), tuple(r), tuple(beta)
    if q < p:
        p, q = q, p
    return (p, q, r, beta)


class InvariantTable:
    """Counts N^beta_pqr, symmetrized in (p, q).

    Entries whose class pairs nontrivially with K_X + D are rejected at load:
    their moduli have nonzero virtual dimension, so the count is zero by
    definition and a nonzero entry is an input error.
    """

    def __init__(self, pair, entries=None):
        self.pair = pair
        self.entries = {}
        for (p, q, r, beta), value in (entries or {}).items():
            self.add(p, q, r, beta, value)

    def add(self, p, q, r, beta, value):
        value = Fraction(value)
        if self.pair.beta_dot_kxd(beta) != 0:
            raise ValidationError(
                "entry beta=%s has beta.(K_X+D) = %d != 0; such counts vanish"
                % (beta, self.pair.beta_dot_kxd(beta))
            )
        key = _normalize_key(p, q, r, beta)
        if key in self.entries and self.entries[key] != value:
            raise ValidationError("conflicting table entries for %s" % (key,))
        self.entries[key] = value

    def lookup(self, p, q, r, beta):
        return self.entries.get(_normalize_key(p, q, r, beta))

    def perturbed(self, key, delta=1):
        """Copy with one entry changed by delta (adversarial testing)."""
        key = _normalize_key(*key)
        if key not in self.entries:
            raise ValidationError("cannot perturb absent entry %s" % (key,))
        table = InvariantTable(self.pair)
        table.entries = dict(self.entries)
        table.entries[key] += Fraction(delta)
        return table

    def items(self):
        return sorted(self.entries.items())

    def __len__(self):
        return len(self.entries)


class ThetaElement:
    """Finite A_I-combination of theta generators."""

    __slots__ = ("ideal", "terms")

    def __init__(self, ideal, terms=None):
        self.ideal = ideal
        self.terms = {}
        for p, s in (terms or {}).items():
            if s:
                self.terms[tuple(p)] = s

    @classmethod
    def zero(cls, ideal):
        return cls(ideal)

    @classmethod
    def generator(cls, ideal, p, coeff=1):
        return cls(ideal, {tuple(p): TruncatedSeries.monomial(ideal, zero_vec(ideal.rank), coeff)})

    def items(self):
        return sorted(self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, ThetaElement):
            return self.ideal == other.ideal and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ideal, tuple(self.items())))

    def __add__(self, other):
        if other == 0:
            return self
        terms = dict(self.terms)
        for p, s in other.terms.items():
            terms[p] = terms.get(p, TruncatedSeries.zero(self.ideal)) + s
        return ThetaElement(self.ideal, terms)

    def __radd__(self, other):
        return self.__add__(other) if other == 0 else NotImplemented

    def __neg__(self):
        return ThetaElement(self.ideal, {p: -s for p, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, series):
        return ThetaElement(self.ideal, {p: s * series for p, s in self.terms.items()})

    def format(self, class_names=None):
        if not self.terms:
            return "0"
        parts = []
        for p, s in self.items():
            coeff = s.format(class_names)
            name = "theta[%s]" % ",".join(str(x) for x in p)
            parts.append(name if coeff == "1" else "(%s)*%s" % (coeff, name))
        return " + ".join(parts)

    def __repr__(self):
        return "ThetaElement(%s)" % self.format()


class ThetaRing:
    """Products, tables and checks for one pair at one truncation ideal."""

    def __init__(self, pair, trop, ideal):
        if ideal.rank != pair.rank:
            raise ValidationError("ideal rank does not match the curve-class lattice")
        self.pair = pair
        self.trop = trop
        self.ideal = ideal

    def generator(self, p):
        return ThetaElement.generator(self.ideal, p)

    def zeroth_product(self, p, q):
        """theta_p . theta_q at I = m: theta_{p+q} if a common cone holds, else 0."""
        for pt in (p, q):
            if not self.trop.cy_sub.contains_point(pt):
                raise ValidationError("%s is not an integral point of B" % (pt,))
        s = vec_add(p, q)
        if support(s) in self.trop.cy_sub.cones:
            return self.generator(s)
        return ThetaElement.zero(self.ideal)

    def candidates(self, p, q):
        return candidates(self.pair, self.trop, p, q, self.ideal)

    def product(self, p, q, table):
        cands = self.candidates(p, q)
        parts = assemble_product(self.pair, cands, table, self.ideal)
        return ThetaElement(self.ideal, {r: s for r, s in parts})

    def element_product(self, x, y, table):
        out = ThetaElement.zero(self.ideal)
        for p, sp in x.items():
            for q, sq in y.items():
                out = out + self.product(p, q, table).scale(sp * sq)
        return out

    def mult_table(self, points, table):
        """Symmetric table of products over the given generators."""
        points = sorted(tuple(p) for p in points)
        out = {}
        for i, p in enumerate(points):
            for q in points[i:]:
                prod = self.product(p, q, table)
                out[(p, q)] = prod
                out[(q, p)] = prod
        return points, out

    def associativity_check(self, points, table):
        """Violations of ((p1 p2) p3) = (p1 (p2 p3)) over all triples.

        Returns a list of (p1, p2, p3, r, beta, lhs, rhs) discrepancies;
        empty means associative mod I on these points.
        """
        points = sorted(tuple(p) for p in points)
        violations = []
        for p1 in points:
            for p2 in points:
                for p3 in points:
                    lhs = self.element_product(self.product(p1, p2, table),
                                               self.generator(p3), table)
                    rhs = self.element_product(self.generator(p1),
                                               self.product(p2, p3, table), table)
                    if lhs == rhs:
                        continue
                    diff = lhs - rhs
                    for r, series in diff.items():
                        for beta, c in series.items():
                            l = lhs.terms.get(r)
                            lc = l.terms.get(beta, Fraction(0)) if l else Fraction(0)
                            violations.append((p1, p2, p3, r, beta, lc, lc - c))
        return violations

    def reduce_mod_m(self, x):
        """Drop every term with beta != 0: the zeroth-order degeneration."""
        zero = zero_vec(self.ideal.rank)
        terms = {}
        for p, s in x.terms.items():
            c = s.terms.get(zero)
            if c:
                terms[p] = TruncatedSeries.monomial(self.ideal, zero, c)
        return ThetaElement(self.ideal, terms)

    def graded_points(self, max_degree):
        """Degeneration mode: integral points of Cone B(Z) grouped by degree.

        Degree-d points correspond to points of B(1/d Z) by dividing by d.
        """
        cf = self.pair.central_fiber
        if cf is None:
            raise ValidationError("graded output needs a central fiber")
        # degree bounds height: every multiplicity is >= 1
        pts = self.trop.cy_sub.integral_points(max_degree)
        by_degree = {}
        for p in pts:
            d = grading(self.trop, p)
            if 0 < d <= max_degree:
                by_degree.setdefault(d, []).append(p)
        return {d: sorted(v) for d, v in sorted(by_degree.items())}

    def relations(self, points, table):
        """Presentation lines theta_p theta_q - sum alpha_pqr theta_r."""
        points, table_out = self.mult_table(points, table)
        lines = []
        names = self.pair.class_names
        for i, p in enumerate(points):
            for q in points[i:]:
                prod = table_out[(p, q)]
                lhs = "theta[%s]*theta[%s]" % (
                    ",".join(map(str, p)),
                    ",".join(map(str, q)),
                )
                lines.append("%s = %s" % (lhs, prod.format(names)))
        return lines
