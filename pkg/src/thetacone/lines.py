"""Broken lines: enumeration, lifts, and theta products as sums over pairs.

A broken line for an integral direction p ends at a chosen generic point Q.
It comes in from infinity carrying the monomial z^p and travels with velocity
-m for its current monomial m; at each boundary it either continues straight
or bends to another term of the crossing image of its monomial.  Sums of the
final monomials over all lines are the local lifts of the theta functions,
and products of thetas are read off from pairs of lines ending at a common
endpoint, expanded back in the lift basis.

Enumeration is exact: chains of crossings are searched abstractly with the
truncation ideal pruning the curve-class budget, then each chain is validated
backward from Q with rational arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
import random

from .errors import ScatteringError, ValidationError
from .lattice import height
from .scattering import ChamberComplex, cross2, _mat_apply, _mat_inv
from .series import (
    LaurentElement,
    TruncatedSeries,
    vec_add,
    vec_sub,
    zero_vec,
)


@dataclass(frozen=True)
class BrokenLine:
    asymptotic_p: tuple  # lattice vector of the incoming direction
    endpoint: tuple  # (chamber index, (Fraction, Fraction)) in that chart
    segments: tuple  # ((chamber, m_chart, beta, coeff), ...) from infinity to Q

    @property
    def final_monomial(self):
        ch, m, beta, c = self.segments[-1]
        return (m, beta, c)


class _Degenerate(ScatteringError):
    """Endpoint hit a vertex or a tie; resample and retry."""


def _ray_hit(point, direction, ray):
    """First parameter t with point + t*direction on R>=0 * ray.

    Returns (t, s) where s is the coordinate along the ray, or (None, None)
    when parallel.
    """
    den = cross2(direction, ray)
    if den == 0:
        return None, None
    t = Fraction(-cross2(point, ray), den)
    hit = (point[0] + t * direction[0], point[1] + t * direction[1])
    if ray[0]:
        s = Fraction(hit[0], ray[0])
    else:
        s = Fraction(hit[1], ray[1])
    return t, s


def sample_endpoint(cc, chamber_idx, rng):
    """A generic rational point in the open chamber."""
    ch = cc.chambers[chamber_idx]
    a = Fraction(rng.randint(1001, 4999), 983)
    b = Fraction(rng.randint(1001, 4999), 1009)
    return (
        a * ch.lo[0] + b * ch.hi[0],
        a * ch.lo[1] + b * ch.hi[1],
    )


def _moves(cc, chamber_idx):
    n = len(cc.chambers)
    return (
        (cc.crossings[chamber_idx], +1, (chamber_idx + 1) % n),
        (cc.crossings[(chamber_idx - 1) % n], -1, (chamber_idx - 1) % n),
    )


def _validate_chain(cc, events, endpoint):
    """Backward rational walk from the endpoint; bend points or None.

    Checks that each claimed crossing really is the first boundary met, that
    no bend sits at the origin, and raises on exact ties (degenerate
    endpoint, resample).
    """
    cur = endpoint
    bends = []
    for crossing, orient, dest, m_after, _beta, _coeff in reversed(events):
        ch = cc.chambers[dest]
        d_sup = ch.lo if orient == +1 else ch.hi
        d_other = ch.hi if orient == +1 else ch.lo
        t_sup, s_sup = _ray_hit(cur, m_after, d_sup)
        if t_sup is None or t_sup <= 0:
            return None
        if s_sup == 0:
            raise _Degenerate("bend at the origin")
        if s_sup < 0:
            return None
        t_other, s_other = _ray_hit(cur, m_after, d_other)
        if t_other is not None and 0 < t_other and s_other >= 0:
            if t_other == t_sup:
                raise _Degenerate("segment through a vertex")
            if t_other < t_sup:
                return None
        hit = (cur[0] + t_sup * m_after[0], cur[1] + t_sup * m_after[1])
        bends.append((dest, hit))
        if crossing.transport:
            mat = _mat_inv(crossing.transport) if orient == +1 else crossing.transport
            hit = _mat_apply(mat, hit)
        cur = hit
    return list(reversed(bends))


def enumerate_lines(cc_or_structure, p, endpoint, ideal):
    """All broken lines for direction p ending at the given endpoint.

    ``endpoint`` is (chamber index, (Fraction, Fraction)).  Finiteness mod I:
    every bend and every kink crossing strictly increases the curve-class
    weight, and straight runs cross each boundary at most once.
    """
    cc = (
        cc_or_structure
        if isinstance(cc_or_structure, ChamberComplex)
        else ChamberComplex(cc_or_structure)
    )
    qch, qpt = endpoint
    if not cc.chambers[qch].contains_open(qpt):
        raise ValidationError("endpoint %s is not interior to chamber %d" % (qpt, qch))
    p = tuple(p)
    zero_beta = zero_vec(cc.rank)
    if not any(p):
        seg = (qch, (0, 0), zero_beta, Fraction(1))
        return [BrokenLine(asymptotic_p=p, endpoint=endpoint, segments=(seg,))]
    max_steps = (ideal.bound + 2) * (len(cc.chambers) + 2)
    results = []

    def record(start, events):
        bends = _validate_chain(cc, events, qpt)
        if bends is None:
            return
        segments = [(start[0], start[1], zero_beta, Fraction(1))]
        for crossing, orient, dest, m_after, beta, coeff in events:
            segments.append((dest, m_after, beta, coeff))
        results.append(
            BrokenLine(asymptotic_p=p, endpoint=endpoint, segments=tuple(segments))
        )

    def dfs(start, ch_idx, m, beta, coeff, events):
        if ch_idx == qch:
            record(start, events)
        if len(events) >= max_steps:
            raise ScatteringError("broken-line search exceeded its step budget")
        ch = cc.chambers[ch_idx]
        for crossing, orient, nbr in _moves(cc, ch_idx):
            if orient == +1 and cross2(m, ch.hi) <= 0:
                continue
            if orient == -1 and cross2(m, ch.lo) >= 0:
                continue
            mp, bp, ell = cc.cross_monomial(crossing, m, beta, orient)
            if ell < 1:
                continue
            if any(b < 0 for b in bp):
                continue
            fn = cc.fn_in_chart(crossing, "to" if orient == +1 else "from", ideal)
            power = fn**ell
            for (mf, bf), cf in sorted(power.terms.items()):
                m2 = vec_add(mp, mf)
                b2 = vec_add(bp, bf)
                if m2 == (0, 0) or ideal.contains(b2):
                    continue
                dfs(
                    start,
                    nbr,
                    m2,
                    b2,
                    coeff * cf,
                    events + [(crossing, orient, nbr, m2, b2, coeff * cf)],
                )

    for ch in cc.chambers:
        m0 = cc.chamber_lattice_rep(ch, p)
        if m0 is None or not ch.contains_closed(m0):
            continue
        dfs((ch.index, m0), ch.index, m0, zero_beta, Fraction(1), [])

    results.sort(key=lambda l: (l.segments[-1][2], l.segments[-1][1], len(l.segments)))
    return results


def replay_check(cc, line, ideal):
    """Re-validate a line's monomials by replaying every crossing map."""
    segs = line.segments
    if len(segs) == 1:
        return True
    first = segs[0]
    if first[2] != zero_vec(cc.rank) or first[3] != 1:
        return False
    for (ch1, m1, b1, c1), (ch2, m2, b2, c2) in zip(segs, segs[1:]):
        step = None
        for crossing, orient, nbr in _moves(cc, ch1):
            if nbr == ch2:
                mp, bp, ell = cc.cross_monomial(crossing, m1, b1, orient)
                if ell < 1:
                    continue
                fn = cc.fn_in_chart(crossing, "to" if orient == +1 else "from", ideal)
                image = LaurentElement.monomial(ideal, 2, mp, bp, c1) * fn**ell
                if image.terms.get((tuple(m2), tuple(b2))) == c2:
                    step = True
                    break
        if not step:
            return False
    return True


def lift(cc, p, endpoint, ideal):
    """Sum of final monomials of all broken lines for p at the endpoint."""
    total = LaurentElement.zero(ideal, 2)
    for line in enumerate_lines(cc, p, endpoint, ideal):
        m, beta, c = line.final_monomial
        total = total + LaurentElement.monomial(ideal, 2, m, beta, c)
    return total


def _endpoint_in_chamber(cc, chamber_idx, seed):
    for attempt in range(6):
        rng = random.Random(seed + 1013 * attempt)
        qpt = sample_endpoint(cc, chamber_idx, rng)
        if cc.chambers[chamber_idx].contains_open(qpt):
            return (chamber_idx, qpt)
    raise ScatteringError("could not sample an interior endpoint")


def _leading(element, ideal):
    key = min(
        element.terms,
        key=lambda k: (ideal.weight(k[1]), k[1], k[0]),
    )
    return key[0], key[1], element.terms[key]


def _expand_in_lifts(cc, product, get_lift, candidate_rs, ideal):
    """Write a chamber-ring element as sum alpha_r * lift(theta_r).

    ``candidate_rs`` lists the allowed theta indices; pass None in planar
    mode, where the leading exponent of every lift is the index itself and
    candidates can be discovered on the fly.
    """
    leads = {}
    lifts = {}

    def ensure(r):
        if r in lifts:
            return
        lf = get_lift(r)
        lifts[r] = lf
        if lf:
            m, beta, c = _leading(lf, ideal)
            leads.setdefault(m, []).append((r, beta, c))

    if candidate_rs is not None:
        for r in candidate_rs:
            ensure(r)
    alphas = {}
    remaining = product
    guard = 0
    while remaining:
        m, beta, c = _leading(remaining, ideal)
        if candidate_rs is None:
            ensure(tuple(m))
        matches = []
        for r, b0, c0 in leads.get(m, ()):
            shift = vec_sub(beta, b0)
            if all(x >= 0 for x in shift):
                matches.append((r, shift, c / c0))
        if not matches:
            raise ScatteringError(
                "product term z^%s t^%s has no matching theta lift "
                "(inconsistent structure or candidate set too small)" % (m, beta)
            )
        if len(matches) > 1:
            raise ScatteringError(
                "ambiguous theta expansion at z^%s t^%s: candidates %s"
                % (m, beta, sorted(r for r, _, _ in matches))
            )
        r, shift, coeff = matches[0]
        alphas.setdefault(r, {})
        alphas[r][shift] = alphas[r].get(shift, Fraction(0)) + coeff
        piece = LaurentElement.monomial(ideal, 2, (0, 0), shift, coeff) * lifts[r]
        remaining = remaining - piece
        guard += 1
        if guard > 10000:
            raise ScatteringError("lift expansion did not terminate")
    out = {}
    for r, terms in alphas.items():
        series = TruncatedSeries(ideal, terms)
        if series:
            out[r] = series
    return out


def _candidate_points(cc, p, q, ideal, extra_height):
    if cc.mode == "planar":
        return None
    hmax = height(p) + height(q) + ideal.bound + extra_height
    return cc.structure.trop.cy_sub.integral_points(hmax)


def _product_at_endpoint(cc, p, q, ideal, ch_idx, seed, extra_height):
    """(alphas, visible) at one generic endpoint of the given chamber.

    ``visible`` records the candidate indices whose lift is nonzero there;
    an alpha missing for a visible index really is zero at this endpoint.
    """
    for attempt in range(6):
        endpoint = _endpoint_in_chamber(cc, ch_idx, seed + 104729 * attempt)
        try:
            lifted = {}

            def get_lift(r):
                if r not in lifted:
                    lifted[r] = lift(cc, r, endpoint, ideal)
                return lifted[r]

            product = get_lift(p) * get_lift(q)
            rs = _candidate_points(cc, p, q, ideal, extra_height)
            alphas = _expand_in_lifts(cc, product, get_lift, rs, ideal)
            visible = {r for r, lf in lifted.items() if lf}
            return alphas, visible
        except _Degenerate:
            continue
    raise ScatteringError("endpoint sampling kept degenerating")


def endpoint_samples(structure, count):
    """Evenly spread chamber indices for endpoint sampling."""
    cc = ChamberComplex(structure)
    n = len(cc.chambers)
    count = max(1, min(count, n))
    return sorted({(i * n) // count for i in range(count)})


def theta_product(structure, p, q, ideal, endpoints=3, seed=23, extra_height=0):
    """Structure constants of theta_p . theta_q from pairs of broken lines.

    Computes the product at several generic endpoints in distinct chambers
    and requires the answers to agree -- endpoint independence is the
    operational form of consistency.  A constant visible at one endpoint and
    absent at another counts as a genuine zero-vs-nonzero conflict.  Returns
    [(r, alpha_pqr)] sorted.
    """
    cc = ChamberComplex(structure)
    p, q = tuple(p), tuple(q)
    results = [
        _product_at_endpoint(cc, p, q, ideal, ch_idx, seed, extra_height)
        for ch_idx in endpoint_samples(structure, endpoints)
    ]
    merged = {}
    for r in sorted({r for alphas, _ in results for r in alphas}):
        values = []
        for alphas, visible in results:
            if r in alphas:
                values.append(alphas[r])
            elif r in visible:
                values.append(TruncatedSeries.zero(ideal))
        distinct = {tuple(v.items()) for v in values}
        if len(distinct) > 1:
            raise ScatteringError(
                "theta product depends on the endpoint at r=%s: %s"
                % (r, sorted(v.format() for v in values))
            )
        value = values[0]
        if value:
            merged[r] = value
    return sorted(merged.items())


def endpoint_independence_defects(structure, ideal, max_point_height=1, endpoints=3, seed=23):
    """Conflicting theta products across endpoint chambers.

    The checker behind looijenga-mode consistency: for every unordered pair
    of nonzero integral points up to the height bound, the structure
    constants computed at different endpoints must agree, counting a visible
    zero as zero.  Expansion failures are reported as defects too.
    """
    cc = ChamberComplex(structure)
    points = [
        p
        for p in structure.trop.cy_sub.integral_points(max_point_height)
        if any(p)
    ]
    defects = []
    chamber_ids = endpoint_samples(structure, endpoints)
    for i, p in enumerate(points):
        for q in points[i:]:
            results = []
            try:
                for ch_idx in chamber_ids:
                    results.append(
                        _product_at_endpoint(cc, p, q, ideal, ch_idx, seed, 0)
                    )
            except ScatteringError as err:
                defects.append({"pair": (p, q), "error": str(err)})
                continue
            for r in sorted({r for alphas, _ in results for r in alphas}):
                values = []
                for alphas, visible in results:
                    if r in alphas:
                        values.append(alphas[r])
                    elif r in visible:
                        values.append(TruncatedSeries.zero(ideal))
                if len({tuple(v.items()) for v in values}) > 1:
                    defects.append(
                        {
                            "pair": (p, q),
                            "r": r,
                            "values": [v.format() for v in values],
                        }
                    )
    return defects
