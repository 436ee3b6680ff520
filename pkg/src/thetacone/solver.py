"""Candidate curve classes for structure constants.

For fixed tangency points p, q the intersection constraints force, for every
component D_i,

    beta . D_i = <p, D_i> + <q, D_i> - <r, D_i>,

so r is determined by beta.  Enumerating beta over P \\ I and keeping the
solutions that define a point of the CY subcomplex, survive the virtual
dimension filter beta . (K_X + D) = 0, and can actually reach the puncture
stratum gives the full index set of the structure-constant sum.  The counts
N themselves are never computed here; they are user input.
"""

from dataclasses import dataclass

from .errors import MissingInvariantError, ValidationError
from .lattice import height, support
from .linalg import nonneg_kernel_rays
from .series import TruncatedSeries, is_effective, vec_add, vec_sub


@dataclass(frozen=True)
class Candidate:
    r: tuple
    beta: tuple
    forced_by_constants: bool  # beta = 0: constant maps, N = 1


@dataclass(frozen=True)
class CandidateSet:
    p: tuple
    q: tuple
    entries: tuple
    unbounded_family: bool


def _meets_stratum(pair, beta, i):
    """Can a curve of class beta != 0 meet the component D_i at all?

    Exact for surfaces: either the pairing is nonzero, or the class contains
    the boundary curve D_i itself.  In higher dimension we never prune.
    """
    if pair.beta_dot_component(beta, i) != 0:
        return True
    if pair.dim != 2:
        return True
    ray = frozenset([i])
    if ray not in pair.stratum_classes:
        return True
    di = pair.stratum_classes[ray]
    if not any(di):
        return True
    return is_effective(vec_sub(beta, di))


def has_kernel_family(pair):
    """True when some nonzero effective class pairs to zero with every D_i."""
    cols = list(zip(*pair.intersection_matrix)) if pair.intersection_matrix else []
    rows = [list(col) for col in cols]  # constraints: beta . D_i = 0 for all i
    if pair.rank == 0:
        return False
    return bool(nonneg_kernel_rays(rows, nvars=pair.rank))


def candidates(pair, trop, p, q, ideal):
    """All (r, beta) that can index structure constants of theta_p . theta_q."""
    if ideal.rank != pair.rank:
        raise ValidationError("ideal rank does not match the curve-class lattice")
    for name, pt in (("p", p), ("q", q)):
        if not trop.cy_sub.contains_point(pt):
            raise ValidationError("%s=%s is not an integral point of B" % (name, pt))
    pq = vec_add(p, q)
    entries = []
    for beta in ideal.classes_below():
        kxd = pair.beta_dot_kxd(beta)
        r = tuple(pq[i] - pair.beta_dot_component(beta, i) for i in range(pair.m))
        if any(x < 0 for x in r):
            continue
        supp = support(r)
        if supp not in trop.full.cones:
            continue
        if supp not in trop.cy_sub.cones:
            # S_I closure: such r can only come with a strictly negative
            # virtual-dimension pairing, so the dimension filter removes it
            assert kxd != 0, "S_I closure violated at r=%s beta=%s" % (r, beta)
            continue
        if kxd != 0:
            continue  # virtual dimension is -beta.(K_X+D); nonzero means N = 0
        if any(beta):
            if not all(_meets_stratum(pair, beta, i) for i in supp):
                continue
            entries.append(Candidate(r=r, beta=beta, forced_by_constants=False))
        else:
            entries.append(Candidate(r=r, beta=beta, forced_by_constants=True))
        if pair.central_fiber is not None:
            deg = lambda v: sum(c * x for c, x in zip(pair.central_fiber, v))
            assert deg(p) + deg(q) == deg(r), "grading broken at r=%s beta=%s" % (r, beta)
    entries.sort(key=lambda c: (height(c.r), c.r, c.beta))
    return CandidateSet(
        p=tuple(p),
        q=tuple(q),
        entries=tuple(entries),
        unbounded_family=has_kernel_family(pair),
    )


def assemble_product(pair, cands, table, ideal):
    """Structure constants alpha_pqr as truncated series, one per output r.

    Every non-forced candidate must be present in the invariant table; a
    missing entry is an error naming exactly the (p, q, r, beta) needed,
    never a silent zero.
    """
    by_r = {}
    missing = []
    for cand in cands.entries:
        if cand.forced_by_constants:
            coeff = 1
        else:
            coeff = table.lookup(cands.p, cands.q, cand.r, cand.beta)
            if coeff is None:
                missing.append((cands.p, cands.q, cand.r, cand.beta))
                continue
        if coeff == 0:
            continue
        series = by_r.setdefault(cand.r, {})
        series[cand.beta] = series.get(cand.beta, 0) + coeff
    if missing:
        raise MissingInvariantError(missing)
    out = []
    for r in sorted(by_r):
        s = TruncatedSeries(ideal, by_r[r])
        if s:
            out.append((r, s))
    return out
