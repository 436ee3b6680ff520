"""Declarative model of an snc pair (X, D) or degeneration, and its tropicalization.

The descriptor is pure lattice data: component names, which boundary strata
are nonempty, a curve-class lattice with its intersection pairing against the
components, discrepancies a_i (K_X = sum (a_i - 1) D_i), curve classes of the
one-dimensional strata, and optionally the central-fiber multiplicities of a
degeneration.  Nothing is verified against an actual variety.
"""

from dataclasses import dataclass, field

from .errors import ValidationError
from .lattice import ConeComplex, support


@dataclass(frozen=True)
class PairDescriptor:
    name: str
    dim: int
    components: tuple
    strata: tuple  # tuple of frozensets of component indices
    class_names: tuple
    intersection_matrix: tuple  # rows: classes, cols: components
    discrepancies: tuple  # a_i >= 0 per component
    stratum_classes: dict = field(default_factory=dict)  # codim-1 cone -> class coeffs
    central_fiber: tuple = None  # multiplicities of X_0, degeneration mode only
    kxd_nef: bool = False  # user-asserted, gates associativity expectations
    minus_kxd_nef: bool = False
    forbidden_strata: tuple = ()

    def __post_init__(self):
        m = len(self.components)
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "strata", tuple(frozenset(s) for s in self.strata))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(
            self,
            "intersection_matrix",
            tuple(tuple(int(x) for x in row) for row in self.intersection_matrix),
        )
        object.__setattr__(self, "discrepancies", tuple(int(a) for a in self.discrepancies))
        object.__setattr__(
            self,
            "stratum_classes",
            {frozenset(k): tuple(int(x) for x in v) for k, v in self.stratum_classes.items()},
        )
        object.__setattr__(
            self, "forbidden_strata", tuple(frozenset(s) for s in self.forbidden_strata)
        )
        if len(set(self.components)) != m:
            raise ValidationError("component names must be distinct")
        if len(self.strata) != len(set(self.strata)):
            raise ValidationError("duplicate strata: one stratum per index set")
        if len(self.discrepancies) != m:
            raise ValidationError("need one discrepancy per component")
        if any(a < 0 for a in self.discrepancies):
            raise ValidationError("discrepancies a_i must be >= 0")
        if len(self.intersection_matrix) != len(self.class_names):
            raise ValidationError("intersection matrix rows must match class names")
        for row in self.intersection_matrix:
            if len(row) != m:
                raise ValidationError("intersection matrix columns must match components")
        for cls in self.stratum_classes.values():
            if len(cls) != len(self.class_names):
                raise ValidationError("stratum class has wrong rank")
        if self.central_fiber is not None:
            cf = tuple(int(x) for x in self.central_fiber)
            object.__setattr__(self, "central_fiber", cf)
            if len(cf) != m or any(x < 1 for x in cf):
                raise ValidationError("central fiber needs a positive multiplicity per component")
            for k, row in enumerate(self.intersection_matrix):
                pairing = sum(c * e for c, e in zip(cf, row))
                if pairing != 0:
                    raise ValidationError(
                        "class %s meets the central fiber (pairing %d != 0); "
                        "fiber classes must be contracted" % (self.class_names[k], pairing)
                    )

    @property
    def m(self):
        return len(self.components)

    @property
    def rank(self):
        return len(self.class_names)

    def component_index(self, name):
        try:
            return self.components.index(name)
        except ValueError:
            raise ValidationError("unknown component %r" % (name,))

    def class_index(self, name):
        try:
            return self.class_names.index(name)
        except ValueError:
            raise ValidationError("unknown curve class %r" % (name,))

    def beta_dot_component(self, beta, i):
        """Intersection number (sum_k beta_k C_k) . D_i."""
        return sum(b * self.intersection_matrix[k][i] for k, b in enumerate(beta))

    def beta_dot_kxd(self, beta):
        """beta . (K_X + D) with K_X + D = sum a_i D_i."""
        return sum(a * self.beta_dot_component(beta, i) for i, a in enumerate(self.discrepancies))

    def stratum_class(self, rho):
        rho = frozenset(rho)
        if rho not in self.stratum_classes:
            raise ValidationError(
                "no curve class declared for stratum %s" % sorted(rho)
            )
        return self.stratum_classes[rho]

    def stratum_numbers(self, rho):
        """D_j . Z_rho for the generators j of rho, by linearity from the class."""
        cls = self.stratum_class(rho)
        return {j: self.beta_dot_component(cls, j) for j in frozenset(rho)}


@dataclass(frozen=True)
class TropicalSpace:
    full: ConeComplex
    cy_sub: ConeComplex
    n: int
    pair: PairDescriptor

    def cy_points(self, max_height):
        return self.cy_sub.integral_points(max_height)


def tropicalize(pair):
    """Cone complex of the pair plus the log Calabi-Yau subcomplex."""
    full = ConeComplex.build(pair.strata, pair.m, forbidden=pair.forbidden_strata)
    zero_disc = {i for i, a in enumerate(pair.discrepancies) if a == 0}
    cy = ConeComplex([c for c in full.cones if c <= zero_disc], pair.m)
    return TropicalSpace(full=full, cy_sub=cy, n=pair.dim, pair=pair)


def maximality_check(trop):
    """True iff the CY subcomplex is pure of dimension dim X."""
    maxc = trop.cy_sub.maximal_cones()
    if not maxc or maxc == [frozenset()]:
        return trop.n == 0
    return all(len(c) == trop.n for c in maxc)


def grading(trop, p):
    """Degree <X_0, p> of a point of Cone B(Z) in degeneration mode."""
    cf = trop.pair.central_fiber
    if cf is None:
        raise ValidationError("grading needs a central fiber (degeneration mode)")
    if not trop.full.contains_point(p):
        raise ValidationError("point %s is not in the cone complex" % (p,))
    return sum(c * x for c, x in zip(cf, p))


def stratum_of(pair, p):
    """Index set of the stratum Z_p: components paired positively with p."""
    if len(p) != pair.m:
        raise ValidationError("point has wrong length")
    return support(p)
