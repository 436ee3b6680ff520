"""Rank-2 wall structures: chamber geometry, crossings, consistency, completion.

Two modes.  ``planar``: walls are rays or full lines through the origin of
Z^2, the chart is global, and consistency means the path-ordered product of
the crossing maps around the origin is the identity mod I.  ``looijenga``:
the ambient is the CY subcomplex of a surface pair; maximal cones carry their
own charts glued by parallel transport, each boundary ray twists monomials by
the curve class of its stratum (the kink), and consistency is checked as
compatibility of broken-line lifts across every crossing (see lines.py).

Crossing convention, pinned by the acceptance examples: crossing a boundary
with support direction d, a monomial z^(m, beta) picks up

    z^(m, beta)  |->  z^(T m, beta + kink * <n, m>) * f^(<n, m>)

with n the primitive conormal positive on the side the path comes from,
evaluated before transport.  Path-ordered products compose like pullbacks:
the first wall crossed acts outermost.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .errors import ScatteringError, ValidationError
from .series import LaurentElement, exp_nilpotent, vec_add, vec_scale, zero_vec


def cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def dot2(a, b):
    return a[0] * b[0] + a[1] * b[1]


def primitive(v):
    if tuple(v) == (0, 0):
        raise ValidationError("zero direction")
    g = gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g)


def _angle_cmp(a, b):
    """Counterclockwise order starting at direction (1, 0)."""

    def half(d):
        return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = cross2(a, b)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def _mat_apply(mat, v):
    return (mat[0][0] * v[0] + mat[0][1] * v[1], mat[1][0] * v[0] + mat[1][1] * v[1])


def _mat_inv(mat):
    a, b = mat[0]
    c, d = mat[1]
    det = a * d - b * c
    if det not in (1, -1):
        raise ScatteringError("transport matrix is not unimodular")
    return ((d * det, -b * det), (-c * det, a * det))


@dataclass(frozen=True)
class Wall:
    """A codimension-one ray (or planar line) with its attached function.

    ``terms`` lists (k, beta, coeff); the function is 1 + sum c t^beta z^(k d)
    with d the primitive support direction, and every term needs beta != 0.
    kind is "planar" (direction in Z^2, optionally a full line), "rho" (wall
    on the boundary ray of the complex indexed by ``ray``), or "interior"
    (direction strictly inside the maximal cone ``cone``; coordinates are
    taken along the sorted generators of the cone).
    """

    kind: str
    terms: tuple
    direction: tuple = None
    line: bool = False
    ray: int = None
    cone: frozenset = None

    def __post_init__(self):
        object.__setattr__(
            self,
            "terms",
            tuple(
                (int(k), tuple(int(x) for x in beta), Fraction(c))
                for k, beta, c in self.terms
            ),
        )
        for _k, beta, _c in self.terms:
            if not any(beta):
                raise ValidationError("wall function must be 1 mod m: term with beta=0")
        if self.kind == "planar":
            if self.direction is None:
                raise ValidationError("planar wall needs a direction")
            object.__setattr__(self, "direction", primitive(tuple(self.direction)))
        elif self.kind == "rho":
            if self.ray is None:
                raise ValidationError("rho wall needs its ray index")
            if self.line:
                raise ValidationError("rays of the complex are not lines")
        elif self.kind == "interior":
            if self.cone is None or self.direction is None:
                raise ValidationError("interior wall needs cone and direction")
            d = primitive(tuple(self.direction))
            if d[0] < 1 or d[1] < 1:
                raise ValidationError("interior wall direction must be strictly inside the cone")
            object.__setattr__(self, "direction", d)
            object.__setattr__(self, "cone", frozenset(self.cone))
        else:
            raise ValidationError("unknown wall kind %r" % (self.kind,))


@dataclass(frozen=True)
class WallStructure:
    """A finite set of walls in one of the two modes."""

    mode: str  # "planar" | "looijenga"
    walls: tuple
    class_names: tuple = ()  # planar: names of the formal curve classes
    pair: object = None  # looijenga: PairDescriptor
    trop: object = None  # looijenga: TropicalSpace

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if self.mode == "planar":
            for w in self.walls:
                if w.kind != "planar":
                    raise ValidationError("planar structure with non-planar wall")
        elif self.mode == "looijenga":
            if self.pair is None or self.trop is None:
                raise ValidationError("looijenga structure needs pair and tropical space")
            for w in self.walls:
                if w.kind == "planar":
                    raise ValidationError("looijenga structure with planar wall")
        else:
            raise ValidationError("unknown mode %r" % (self.mode,))

    @property
    def rank(self):
        return self.pair.rank if self.pair is not None else len(self.class_names)

    def names(self):
        return self.pair.class_names if self.pair is not None else self.class_names

    def kinks(self):
        """Boundary ray index -> twisting curve class [Z_rho] (looijenga)."""
        if self.mode != "looijenga":
            return {}
        rays = {i for c in self.trop.cy_sub.codim1_cones() for i in c}
        return {i: self.pair.stratum_class(frozenset([i])) for i in sorted(rays)}


@dataclass(frozen=True)
class Chamber:
    index: int
    lo: tuple  # sector boundary directions in this chamber's chart, ccw lo->hi
    hi: tuple
    cone: tuple = None  # looijenga: (ray_in, ray_out) in cycle order

    def contains_closed(self, v):
        return cross2(self.lo, v) >= 0 and cross2(v, self.hi) >= 0

    def contains_open(self, v):
        return cross2(self.lo, v) > 0 and cross2(v, self.hi) > 0


@dataclass(frozen=True)
class Crossing:
    frm: int
    to: int  # counterclockwise neighbor
    d_from: tuple  # support direction in the frm chart
    d_to: tuple  # support direction in the to chart
    transport: tuple = None  # 2x2 rows, frm chart -> to chart; None = identity
    kink: tuple = None  # twisting curve class, or None
    fn_terms: tuple = ()  # merged wall terms (k, beta, coeff) on this support
    rho: int = None  # component index when this is a ray of the complex

    def n_from(self):
        d = self.d_from
        return (d[1], -d[0])

    def n_to(self):
        d = self.d_to
        return (-d[1], d[0])


class ChamberComplex:
    """Cyclic chamber decomposition of the plane or of the cone complex."""

    def __init__(self, structure):
        self.structure = structure
        self.mode = structure.mode
        self.rank = structure.rank
        self.chambers = []
        self.crossings = []
        if self.mode == "planar":
            self._build_planar()
        else:
            self._build_looijenga()

    # -- construction -------------------------------------------------

    def _build_planar(self):
        dirs = {(1, 0), (0, 1), (-1, 0), (0, -1)}
        fn_by_dir = {}
        for w in self.structure.walls:
            supports = [w.direction]
            if w.line:
                supports.append((-w.direction[0], -w.direction[1]))
            for d in supports:
                dirs.add(d)
                fn_by_dir.setdefault(d, []).extend(w.terms)
        order = sorted(dirs, key=cmp_to_key(_angle_cmp))
        n = len(order)
        for i, d in enumerate(order):
            self.chambers.append(Chamber(index=i, lo=d, hi=order[(i + 1) % n]))
        for i in range(n):
            d = order[(i + 1) % n]
            self.crossings.append(
                Crossing(
                    frm=i,
                    to=(i + 1) % n,
                    d_from=d,
                    d_to=d,
                    fn_terms=tuple(fn_by_dir.get(d, ())),
                )
            )

    def _cone_cycle(self):
        cy = self.structure.trop.cy_sub
        maxc = cy.maximal_cones()
        if not maxc or any(len(c) != 2 for c in maxc):
            raise ValidationError("looijenga mode needs a rank-2 CY subcomplex")
        by_ray = {}
        for c in maxc:
            for i in c:
                by_ray.setdefault(i, []).append(c)
        if any(len(v) != 2 for v in by_ray.values()):
            raise ValidationError("every ray must lie in exactly two maximal cones")
        start = min(maxc, key=lambda c: sorted(c))
        cycle = []
        cone = start
        ray_in, ray_out = min(start), max(start)
        while True:
            cycle.append((ray_in, ray_out))
            nxt = next(c for c in by_ray[ray_out] if c != cone)
            (other,) = nxt - {ray_out}
            cone, ray_in, ray_out = nxt, ray_out, other
            if cone == start:
                if (ray_in, ray_out) != cycle[0]:
                    cycle.append((ray_in, ray_out))
                break
            if len(cycle) > len(maxc):
                raise ValidationError("maximal cones do not form a single cycle")
        if len(cycle) != len(maxc):
            raise ValidationError("maximal cones do not form a single cycle")
        return cycle

    def _build_looijenga(self):
        pair = self.structure.pair
        cycle = self._cone_cycle()
        cone_pos = {frozenset(gens): cp for cp, gens in enumerate(cycle)}
        interior = {}
        rho_fn = {}
        for w in self.structure.walls:
            if w.kind == "interior":
                cp = cone_pos.get(w.cone)
                if cp is None:
                    raise ValidationError(
                        "wall cone %s is not a maximal cone" % sorted(w.cone)
                    )
                ray_in, ray_out = cycle[cp]
                c0, c1 = sorted(w.cone)
                d = w.direction if (ray_in, ray_out) == (c0, c1) else (w.direction[1], w.direction[0])
                interior.setdefault(cp, {}).setdefault(d, []).extend(w.terms)
            else:
                if w.ray not in {g for gens in cycle for g in gens}:
                    raise ValidationError("wall ray %d is not a ray of the complex" % w.ray)
                rho_fn.setdefault(w.ray, []).extend(w.terms)

        idx = 0
        for cp, gens in enumerate(cycle):
            bounds = [(1, 0)] + sorted(interior.get(cp, {}), key=cmp_to_key(_angle_cmp)) + [(0, 1)]
            for s in range(len(bounds) - 1):
                self.chambers.append(
                    Chamber(index=idx, lo=bounds[s], hi=bounds[s + 1], cone=gens)
                )
                idx += 1
        n = len(self.chambers)
        for i, ch in enumerate(self.chambers):
            if ch.hi != (0, 1):
                cp = next(cp for cp, gens in enumerate(cycle) if gens == ch.cone)
                self.crossings.append(
                    Crossing(
                        frm=i,
                        to=(i + 1) % n,
                        d_from=ch.hi,
                        d_to=ch.hi,
                        fn_terms=tuple(interior[cp][ch.hi]),
                    )
                )
            else:
                ray = ch.cone[1]
                kink = pair.stratum_class(frozenset([ray]))
                if not any(kink):
                    raise ValidationError("kink class of ray %d is zero" % ray)
                k = pair.beta_dot_component(kink, ray)
                self.crossings.append(
                    Crossing(
                        frm=i,
                        to=(i + 1) % n,
                        d_from=(0, 1),
                        d_to=(1, 0),
                        transport=((-k, 1), (-1, 0)),
                        kink=kink,
                        fn_terms=tuple(rho_fn.get(ray, ())),
                        rho=ray,
                    )
                )

    # -- chart helpers -------------------------------------------------

    def chamber_lattice_rep(self, chamber, v):
        """Chart coordinates of a lattice point supported on the chamber's cone."""
        ch = self.chambers[chamber] if isinstance(chamber, int) else chamber
        if self.mode == "planar":
            if len(v) != 2:
                raise ValidationError("planar points live in Z^2")
            return tuple(v)
        ray_in, ray_out = ch.cone
        for i, x in enumerate(v):
            if x and i not in (ray_in, ray_out):
                return None
        return (v[ray_in], v[ray_out])

    def chart_to_lattice(self, chamber, m):
        ch = self.chambers[chamber] if isinstance(chamber, int) else chamber
        if self.mode == "planar":
            return tuple(m)
        ray_in, ray_out = ch.cone
        v = [0] * self.structure.pair.m
        v[ray_in] = m[0]
        v[ray_out] = m[1]
        return tuple(v)

    def fn_in_chart(self, crossing, side, ideal):
        """Wall function as a rank-2 element in the chart of ``side``."""
        d = crossing.d_to if side == "to" else crossing.d_from
        terms = {}
        for k, beta, c in crossing.fn_terms:
            key = (vec_scale(k, d), tuple(beta))
            terms[key] = terms.get(key, 0) + c
        one = (zero_vec(2), zero_vec(self.rank))
        terms[one] = terms.get(one, 0) + 1
        return LaurentElement(ideal, 2, terms)

    # -- crossing maps ---------------------------------------------------

    def cross_monomial(self, crossing, m, beta, orientation):
        """Transport and kink twist; returns (m', beta', ell), comes-from ell."""
        if orientation == +1:
            ell = dot2(crossing.n_from(), m)
            mp = _mat_apply(crossing.transport, m) if crossing.transport else tuple(m)
        else:
            ell = dot2(crossing.n_to(), m)
            mp = (
                _mat_apply(_mat_inv(crossing.transport), m)
                if crossing.transport
                else tuple(m)
            )
        bp = vec_add(beta, vec_scale(ell, crossing.kink)) if crossing.kink else tuple(beta)
        return mp, bp, ell

    def cross_element(self, crossing, x, orientation, ideal):
        """The crossing map on a chamber-ring element.

        Orientation +1 maps the frm chart to the to chart (counterclockwise
        travel); -1 the other way.  Monomials pointing back into the side
        the path comes from pick up positive wall powers.
        """
        dest = "to" if orientation == +1 else "from"
        fn = self.fn_in_chart(crossing, dest, ideal)
        out = LaurentElement.zero(ideal, 2)
        for (m, beta), c in x.terms.items():
            mp, bp, ell = self.cross_monomial(crossing, m, beta, orientation)
            if any(b < 0 for b in bp):
                raise ScatteringError(
                    "kink twist made a curve class negative at exponent %s" % (m,)
                )
            term = LaurentElement.monomial(ideal, 2, mp, bp, c)
            if ell and crossing.fn_terms:
                term = term * fn**ell
            out = out + term
        return out

    def loop_automorphism(self, ideal, basepoint=0):
        """Path-ordered product of one ccw loop: images of z^e1, z^e2.

        Planar only (one global chart).  The first crossing along the loop
        acts outermost, as pullbacks of functions compose.
        """
        if self.mode != "planar":
            raise ValidationError("loop automorphisms need the planar chart")
        n = len(self.crossings)
        order = [self.crossings[(basepoint + i) % n] for i in range(n)]
        images = []
        for e in ((1, 0), (0, 1)):
            x = LaurentElement.monomial(ideal, 2, e)
            for cr in reversed(order):
                x = self.cross_element(cr, x, +1, ideal)
            images.append(x)
        return images

    def loop_transport(self, m, beta, basepoint=0):
        """One ccw loop of pure transports and kinks applied to (m, beta).

        With all wall functions trivial this is the affine monodromy of the
        charts composed with the kink twists.
        """
        n = len(self.crossings)
        for i in range(n):
            cr = self.crossings[(basepoint + i) % n]
            m, beta, _ = self.cross_monomial(cr, m, beta, +1)
        return m, beta


def cross(structure, selector, x, side, ideal):
    """Single crossing automorphism for a wall or a kink ray.

    ``selector``: a planar direction, a boundary-ray component index, or a
    (cone, direction) pair for interior walls.  side=+1 uses the conormal
    n = rot90(direction); side=-1 the opposite.  The two are mutually inverse.
    """
    cc = ChamberComplex(structure)
    crossing = None
    for cr in cc.crossings:
        if structure.mode == "planar":
            if cr.d_from == primitive(tuple(selector)):
                crossing = cr
                break
        elif isinstance(selector, int):
            if cr.rho == selector:
                crossing = cr
                break
        else:
            cone, direction = selector
            ch = cc.chambers[cr.frm]
            if (
                cr.rho is None
                and ch.cone is not None
                and frozenset(ch.cone) == frozenset(cone)
            ):
                c0, c1 = sorted(cone)
                d = tuple(direction)
                if ch.cone != (c0, c1):
                    d = (d[1], d[0])
                if cr.d_from == primitive(d):
                    crossing = cr
                    break
    if crossing is None:
        raise ValidationError("no crossing matches selector %r" % (selector,))
    orientation = -1 if side == +1 else +1
    return cc.cross_element(crossing, x, orientation, ideal)


@dataclass
class ConsistencyReport:
    consistent: bool
    mode: str
    defects: list

    def __bool__(self):
        return self.consistent


def consistency_check(structure, ideal, max_point_height=2):
    """Is the structure consistent mod I?

    Planar: the path-ordered product around the origin must be the identity;
    defects are reported as the images of the chart coordinates.  Looijenga:
    theta products of all integral points up to the given height must be
    independent of the endpoint chamber, a visible theta with a vanishing
    coefficient counting as zero.  Endpoint independence is the operational
    content of consistency for the twisted cone charts; comparing raw lift
    sums through the crossing maps is wrong at finite truncation because
    backward-pointing monomials can re-enter the truncation window.
    """
    cc = ChamberComplex(structure)
    if structure.mode == "planar":
        images = cc.loop_automorphism(ideal)
        defects = []
        for e, img in zip(((1, 0), (0, 1)), images):
            if img != LaurentElement.monomial(ideal, 2, e):
                defects.append((e, img))
        return ConsistencyReport(not defects, "planar", defects)

    from .lines import endpoint_independence_defects  # deferred import

    defects = endpoint_independence_defects(
        structure, ideal, max_point_height=max_point_height
    )
    return ConsistencyReport(not defects, "looijenga", defects)


def _leading_defects(images, ideal):
    """Lowest-weight defect layer of a loop automorphism, as (m, beta) -> s.

    At its leading order the defect is a product of elementary transforms
    z^w -> z^w (1 + s t^beta z^m)^<n, w> with n = -rot90(m) the comes-from
    conormal of the ray through m; s is read off the images of z^e1, z^e2.
    """
    per_exp = {}
    for e, img in images:
        delta = img - LaurentElement.monomial(ideal, 2, e)
        for (m, beta), c in delta.terms.items():
            rel = (m[0] - e[0], m[1] - e[1])
            per_exp.setdefault((rel, beta), {})[e] = c
    if not per_exp:
        return {}
    weight = min(ideal.weight(beta) for (_, beta) in per_exp)
    defects = {}
    for (m, beta), by_e in sorted(per_exp.items()):
        if ideal.weight(beta) != weight:
            continue
        c1 = by_e.get((1, 0), Fraction(0))
        c2 = by_e.get((0, 1), Fraction(0))
        if m == (0, 0):
            raise ScatteringError("central defect t^%s cannot be carried by a ray" % (beta,))
        if c1 * m[0] + c2 * m[1] != 0:
            raise ScatteringError("defect at z^%s t^%s is not tropical" % (m, beta))
        d = primitive(m)
        n = (d[1], -d[0])
        s = None
        for ci, ni in ((c1, n[0]), (c2, n[1])):
            if ni:
                cand = Fraction(ci, ni)
                if s is None:
                    s = cand
                elif s != cand:
                    raise ScatteringError("defect at z^%s t^%s is not elementary" % (m, beta))
        if s:
            defects[(m, beta)] = s
    return defects


def complete(structure, ideal, max_rounds=None):
    """Order-by-order completion to a consistent structure.

    Planar: Kontsevich-Soibelman insertion; each leading loop-defect term
    s t^beta z^m is cancelled by multiplying 1 - s t^beta z^m into a ray
    supported on R>=0 m.  Idempotent, and returns the input unchanged when
    it is already consistent.  Looijenga structures are returned unchanged
    when consistent; repairing an inconsistent twisted cone structure is not
    supported.
    """
    if structure.mode == "looijenga":
        report = consistency_check(structure, ideal)
        if report.consistent:
            return structure
        raise ScatteringError(
            "completion of inconsistent cone structures with kinks is not "
            "implemented; %d crossing defects found" % len(report.defects)
        )
    walls = list(structure.walls)
    last_weight = 0
    rounds = 0
    limit = max_rounds if max_rounds is not None else ideal.bound + 2
    while True:
        current = replace(structure, walls=tuple(walls))
        cc = ChamberComplex(current)
        images = list(zip(((1, 0), (0, 1)), cc.loop_automorphism(ideal)))
        if all(img == LaurentElement.monomial(ideal, 2, e) for e, img in images):
            return current
        defects = _leading_defects(images, ideal)
        if not defects:
            raise ScatteringError("loop defect with no extractable elementary layer")
        weight = min(ideal.weight(beta) for (_, beta) in defects)
        if weight <= last_weight:
            raise ScatteringError("completion stalled at weight %d" % weight)
        last_weight = weight
        for (m, beta), s in sorted(defects.items()):
            d = primitive(m)
            k = m[0] // d[0] if d[0] else m[1] // d[1]
            new_term = (k, beta, -s)
            for i, w in enumerate(walls):
                if w.kind == "planar" and w.direction == d and not w.line:
                    walls[i] = replace(w, terms=w.terms + (new_term,))
                    break
            else:
                walls.append(Wall(kind="planar", direction=d, terms=(new_term,)))
        rounds += 1
        if rounds > limit:
            raise ScatteringError("completion did not stabilize")


def canonical_walls(pair, trop, entries, ideal):
    """Assemble the canonical structure from per-ray invariant input.

    ``entries``: iterables (support, beta, u_p, index, count) where support
    is a boundary-ray component index or a (cone, direction) pair; u_p must
    be a positive multiple of the support direction.  Each entry contributes
    a factor exp(index * count * t^beta z^-u_p); functions on a common
    support are multiplied.  Entries with beta in I are dropped, reported in
    the returned notices.
    """
    sums = {}
    notices = []
    for support, beta, u_p, k_index, count in entries:
        beta = tuple(int(x) for x in beta)
        if ideal.contains(beta):
            notices.append("dropped entry with beta=%s already in I" % (beta,))
            continue
        if isinstance(support, int):
            d_lattice = tuple(1 if i == support else 0 for i in range(pair.m))
            key = ("rho", support)
        else:
            cone, direction = support
            cone = tuple(sorted(frozenset(cone)))
            direction = primitive(tuple(direction))
            d_lattice = [0] * pair.m
            d_lattice[cone[0]] = direction[0]
            d_lattice[cone[1]] = direction[1]
            d_lattice = tuple(d_lattice)
            key = ("interior", cone, direction)
        u_p = tuple(int(x) for x in u_p)
        mult = None
        ok = True
        for i, x in enumerate(u_p):
            if d_lattice[i]:
                q, r = divmod(x, d_lattice[i])
                if r or (mult is not None and mult != q):
                    ok = False
                    break
                mult = q
            elif x:
                ok = False
                break
        if not ok or mult is None or mult < 1:
            raise ValidationError(
                "u_p=%s is not a positive multiple of the support direction" % (u_p,)
            )
        arg = sums.setdefault(key, LaurentElement.zero(ideal, 1))
        sums[key] = arg + LaurentElement.monomial(
            ideal, 1, (-mult,), beta, Fraction(k_index) * Fraction(count)
        )
    walls = []
    for key in sorted(sums, key=str):
        fn = exp_nilpotent(sums[key])
        terms = tuple((m[0], beta, c) for (m, beta), c in fn.items() if any(m) or any(beta))
        if not terms:
            notices.append("support %s produced the trivial function" % (key,))
            continue
        if key[0] == "rho":
            walls.append(Wall(kind="rho", ray=key[1], terms=terms))
        else:
            walls.append(
                Wall(kind="interior", cone=frozenset(key[1]), direction=key[2], terms=terms)
            )
    structure = WallStructure(mode="looijenga", walls=tuple(walls), pair=pair, trop=trop)
    return structure, notices
