"""Basis-subset cone complexes and the integral affine structure across facets.

The tropicalization of a simple normal crossings pair is face-closed:
every cone is spanned by a subset of the dual basis vectors of the divisor
components, so a cone is just a subset of component indices (0-based here).
Lattice vectors are int tuples in the dual divisor lattice.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .errors import InconsistentStrataError, NotInComplexError, ValidationError
from .linalg import det


def support(v):
    return frozenset(i for i, x in enumerate(v) if x)


def height(v):
    return sum(v)


def unit_vector(i, m):
    return tuple(1 if j == i else 0 for j in range(m))


class ConeComplex:
    """A face-closed, intersection-closed set of basis-subset cones."""

    def __init__(self, cones, m):
        self.m = int(m)
        cs = {frozenset(c) for c in cones}
        cs.add(frozenset())
        for c in cs:
            if any(i < 0 or i >= self.m for i in c):
                raise ValidationError("cone %s out of range for m=%d" % (sorted(c), self.m))
        # face closure; subsets of members are members, which also gives
        # closure under intersections
        closed = set()
        for c in cs:
            for k in range(len(c) + 1):
                closed.update(frozenset(s) for s in combinations(sorted(c), k))
        self.cones = frozenset(closed)
        self.dim = max((len(c) for c in self.cones), default=0)

    @classmethod
    def build(cls, strata, m, forbidden=()):
        """Face-and-intersection closure of the declared strata.

        ``forbidden`` marks index sets the caller knows to have empty
        intersection; the build fails if closure would include one.
        """
        complex_ = cls(strata, m)
        bad = {frozenset(c) for c in forbidden} & complex_.cones
        if bad:
            raise InconsistentStrataError(
                "closure contains cones declared empty: %s" % sorted(sorted(c) for c in bad)
            )
        return complex_

    def __contains__(self, cone):
        return frozenset(cone) in self.cones

    def __eq__(self, other):
        return (
            isinstance(other, ConeComplex)
            and self.m == other.m
            and self.cones == other.cones
        )

    def __hash__(self):
        return hash((self.m, self.cones))

    def __len__(self):
        return len(self.cones)

    def sorted_cones(self):
        return sorted(self.cones, key=lambda c: (len(c), sorted(c)))

    def maximal_cones(self):
        return sorted(
            (c for c in self.cones if not any(c < d for d in self.cones)),
            key=lambda c: sorted(c),
        )

    def codim1_cones(self):
        return sorted(
            (c for c in self.cones if len(c) == self.dim - 1), key=lambda c: sorted(c)
        )

    def cofaces(self, cone, codim=None):
        """Cones containing ``cone``; restrict to given cardinality if asked."""
        cone = frozenset(cone)
        out = [c for c in self.cones if cone <= c]
        if codim is not None:
            out = [c for c in out if len(c) == self.dim - codim]
        return sorted(out, key=lambda c: sorted(c))

    def min_cone(self, v):
        """The minimal cone containing a nonnegative lattice vector."""
        if len(v) != self.m:
            raise ValidationError("vector %s has wrong length" % (v,))
        if any(x < 0 for x in v):
            raise NotInComplexError("vector %s has negative coordinates" % (v,))
        supp = support(v)
        if supp not in self.cones:
            raise NotInComplexError(
                "support %s of %s is not a cone of the complex" % (sorted(supp), v)
            )
        return supp

    def contains_point(self, v):
        try:
            self.min_cone(v)
        except NotInComplexError:
            return False
        return True

    def integral_points(self, max_height):
        """All B(Z) points of coordinate sum <= max_height, lex sorted."""
        if max_height < 0:
            raise ValidationError("height must be >= 0")
        points = []

        def rec(prefix, remaining):
            if len(prefix) == self.m:
                v = tuple(prefix)
                if support(v) in self.cones:
                    points.append(v)
                return
            for c in range(remaining + 1):
                rec(prefix + [c], remaining - c)

        rec([], max_height)
        return sorted(points)

    def dual_graph_connected(self):
        """Maximal cones connected through shared codimension-one faces."""
        maxc = self.maximal_cones()
        if len(maxc) <= 1:
            return True
        adj = {i: set() for i in range(len(maxc))}
        for i, a in enumerate(maxc):
            for j in range(i + 1, len(maxc)):
                if len(a & maxc[j]) == self.dim - 1:
                    adj[i].add(j)
                    adj[j].add(i)
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(maxc)


@dataclass(frozen=True)
class AffineChart:
    """Identification of Lambda_sigma1 with Lambda_sigma2 fixing Lambda_rho.

    ``images`` maps each generator index of sigma1 to its image vector in the
    ambient lattice (supported on sigma2).
    """

    rho: frozenset
    sigma1: frozenset
    sigma2: frozenset
    m: int
    images: dict = field(compare=False)

    def apply(self, v):
        if len(v) != self.m:
            raise ValidationError("vector has wrong length")
        bad = support(v) - self.sigma1
        if bad:
            raise ValidationError(
                "vector %s is not supported on sigma1=%s" % (v, sorted(self.sigma1))
            )
        out = (0,) * self.m
        for i in sorted(self.sigma1):
            if v[i]:
                out = tuple(a + v[i] * b for a, b in zip(out, self.images[i]))
        return out

    def matrix_on_bases(self):
        """Images of sigma1 generators in sigma2-generator coordinates."""
        cols = []
        s2 = sorted(self.sigma2)
        for i in sorted(self.sigma1):
            img = self.images[i]
            if support(img) - self.sigma2:
                raise ValidationError("image of generator %d leaves sigma2" % i)
            cols.append(tuple(img[j] for j in s2))
        # rows indexed by sigma2 generators, columns by sigma1 generators
        return [tuple(col[r] for col in cols) for r in range(len(s2))]

    def is_unimodular(self):
        return abs(det(self.matrix_on_bases())) == 1


def parallel_transport(rho, sigma1, sigma2, stratum_numbers, m, complex=None):
    """Transport across the facet rho from sigma1 to sigma2.

    ``stratum_numbers`` maps each generator index j of rho to the
    intersection number of the j-th component with the curve stratum of rho.
    The extra generator u1 of sigma1 goes to
    u2 = -u1' - sum_j (D_j . Z_rho) D_j*, identity on Lambda_rho.
    """
    rho, sigma1, sigma2 = frozenset(rho), frozenset(sigma1), frozenset(sigma2)
    if not (rho < sigma1 and rho < sigma2):
        raise ValidationError("rho must be a proper face of both maximal cones")
    if len(sigma1) != len(rho) + 1 or len(sigma2) != len(rho) + 1:
        raise ValidationError("rho must have codimension one in sigma1 and sigma2")
    if sigma1 == sigma2:
        raise ValidationError("sigma1 and sigma2 must differ")
    if complex is not None:
        for c in (rho, sigma1, sigma2):
            if c not in complex:
                raise NotInComplexError("cone %s not in complex" % sorted(c))
        maximal = set(map(frozenset, complex.maximal_cones()))
        if sigma1 not in maximal or sigma2 not in maximal:
            raise ValidationError("sigma1 and sigma2 must be maximal")
    missing = [j for j in rho if j not in stratum_numbers]
    if missing:
        raise ValidationError(
            "missing intersection numbers for rho generators %s" % sorted(missing)
        )
    (u1,) = sigma1 - rho
    (u1p,) = sigma2 - rho
    u2 = [0] * m
    u2[u1p] -= 1
    for j in rho:
        u2[j] -= int(stratum_numbers[j])
    images = {j: unit_vector(j, m) for j in rho}
    images[u1] = tuple(u2)
    chart = AffineChart(rho=rho, sigma1=sigma1, sigma2=sigma2, m=m, images=images)
    if not chart.is_unimodular():
        raise ValidationError("transport is not a lattice isomorphism")
    return chart
