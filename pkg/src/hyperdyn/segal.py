"""Series-norm algebra of decaying functions and its bump-function toolkit.

For a bounded weight tau the algebra consists of the compactly supported
functions f with finite series norm

    ||f||_tau = sum_{k>=0} sup |f * tau^k|.

Finiteness is certified by eps_f := sup of |tau| over the (closed) support
of f being < 1, which also yields the geometric tail bound

    sum_{k>K} sup |f tau^k|  <=  sup|f| * eps_f^{K+1} / (1 - eps_f)

used to truncate the series.  The module also builds the piecewise-linear
Urysohn bumps that realise an approximate identity for the algebra, and the
shifted norms ||.||_{tau o alpha^k} together with the exact transport
identity ||f o alpha||_{tau o alpha^{k+1}} = ||f||_{tau o alpha^k}.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

import numpy as np

from .errors import (
    EmptyRegion,
    InvalidParameters,
    NormDepthExceeded,
    NotInAlgebra,
    SetsNotSeparated,
    ZeroInput,
)
from .funcspace import (
    DEFAULT_REFINE,
    BoundedFunction,
    CompactSet,
    CompactlySupportedFunction,
    Constant,
    Homeomorphism,
    Product,
    Sum,
    region_abs_ge,
    region_abs_le,
    sample_points,
)

DEFAULT_REL_TOL = 1e-8
MAX_SERIES_DEPTH = 10_000


class SegalWeight:
    """A bounded weight together with its unit region {|tau| >= 1}."""

    __slots__ = ("tau", "unit_region")

    def __init__(self, tau: BoundedFunction, refine: int = DEFAULT_REFINE):
        self.tau = tau
        self.unit_region = tuple(region_abs_ge(tau, 1.0, refine))

    def shifted(self, alpha: Homeomorphism, k: int) -> "SegalWeight":
        return SegalWeight(self.tau.compose(alpha, k))

    def __repr__(self):
        return f"SegalWeight({self.tau!r})"


def _tau_fn(tau) -> BoundedFunction:
    return tau.tau if isinstance(tau, SegalWeight) else tau


def _support_grid(f: BoundedFunction, tau: BoundedFunction,
                  refine: int) -> np.ndarray:
    """Sample grid over supp f containing every breakpoint of f and tau."""
    sup = f.support
    if sup is None:
        raise InvalidParameters("series norms need a compactly supported function")
    lo, hi = sup
    bps = [np.array([lo, hi])]
    for g in (f, tau):
        b = g.breakpoints
        if b.size:
            bps.append(b[(b >= lo) & (b <= hi)])
    knots = np.unique(np.concatenate(bps))
    if knots.size == 1:
        return knots
    segs = [np.linspace(knots[i], knots[i + 1], refine + 1)
            for i in range(knots.size - 1)]
    return np.unique(np.concatenate(segs))


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

class MembershipResult:
    """Outcome of the membership test: either member(eps_f) or a witness
    point in the support where |tau| reaches 1."""

    __slots__ = ("is_member", "eps", "witness")

    def __init__(self, is_member: bool, eps: float | None, witness: float | None):
        self.is_member = is_member
        self.eps = eps
        self.witness = witness

    def __bool__(self):
        return self.is_member


def membership_check(f: BoundedFunction, tau, refine: int = DEFAULT_REFINE) -> MembershipResult:
    """Certify f against the weight: member iff sup of |tau| over supp f < 1.

    The certificate uses the closed support, which is what the tail bound
    needs; a witness may therefore sit on the support boundary where f
    itself vanishes.  Witnesses with |f| > 0 are preferred when they exist.
    """
    t = _tau_fn(tau)
    grid = _support_grid(f, t, refine)
    tvals = np.abs(t(grid))
    eps_f = float(tvals.max())
    if eps_f < 1.0:
        return MembershipResult(True, eps_f, None)
    bad = np.flatnonzero(tvals >= 1.0)
    fvals = np.abs(f(grid[bad]))
    pick = bad[int(np.argmax(fvals))] if fvals.max() > 0 else bad[0]
    return MembershipResult(False, None, float(grid[pick]))


class SegalElement:
    """A certified algebra member: the function plus its eps_f certificate."""

    __slots__ = ("f", "eps_f", "norm_cache")

    def __init__(self, f: BoundedFunction, eps_f: float):
        self.f = f
        self.eps_f = eps_f
        self.norm_cache = None

    @classmethod
    def certify(cls, f: BoundedFunction, tau, refine: int = DEFAULT_REFINE) -> "SegalElement":
        res = membership_check(f, tau, refine)
        if not res:
            raise NotInAlgebra(
                f"|tau| reaches {1.0} on the support (witness x={res.witness})")
        return cls(f, res.eps)


# ---------------------------------------------------------------------------
# the series norm
# ---------------------------------------------------------------------------

class SegalNormResult:
    __slots__ = ("value", "tail_bound", "depth", "terms")

    def __init__(self, value: float, tail_bound: float, depth: int,
                 terms: Sequence[float] = ()):
        self.value = value
        self.tail_bound = tail_bound
        self.depth = depth
        self.terms = tuple(terms)

    def __iter__(self):
        yield self.value
        yield self.tail_bound
        yield self.depth

    def __repr__(self):
        return f"SegalNormResult(value={self.value!r}, tail_bound={self.tail_bound!r}, depth={self.depth})"


def segal_norm(f: BoundedFunction, tau, rel_tol: float = DEFAULT_REL_TOL,
               refine: int = DEFAULT_REFINE,
               max_depth: int = MAX_SERIES_DEPTH) -> SegalNormResult:
    """Truncated series norm sum_k sup|f tau^k| with a geometric tail bound.

    Terms are added until the tail bound drops below rel_tol * value;
    eps_f >= 1 means the series cannot converge and raises NotInAlgebra,
    and exceeding ``max_depth`` raises NormDepthExceeded (eps_f close to 1).
    """
    if rel_tol <= 0:
        raise InvalidParameters("rel_tol must be positive")
    t = _tau_fn(tau)
    grid = _support_grid(f, t, refine)
    F = np.abs(f(grid))
    T = np.abs(t(grid))
    eps_f = float(T.max())
    if eps_f >= 1.0:
        raise NotInAlgebra(
            f"sup of |tau| over the support is {eps_f:.6g} >= 1; series diverges")
    sup_f = float(F.max())
    P = F.copy()
    value = sup_f
    terms = [sup_f]
    depth = 0
    while True:
        if eps_f == 0.0:
            return SegalNormResult(value, 0.0, depth, terms)
        tail = sup_f * eps_f ** (depth + 1) / (1.0 - eps_f)
        if tail <= rel_tol * value:
            return SegalNormResult(value, tail, depth, terms)
        if depth >= max_depth:
            raise NormDepthExceeded(
                f"series norm did not meet rel_tol={rel_tol} within {max_depth} terms "
                f"(eps_f={eps_f})")
        depth += 1
        P = P * T
        term = float(P.max())
        terms.append(term)
        value += term


def shifted_norm(f: BoundedFunction, tau, alpha: Homeomorphism, k: int,
                 rel_tol: float = DEFAULT_REL_TOL,
                 refine: int = DEFAULT_REFINE) -> SegalNormResult:
    """Series norm with the weight replaced by tau o alpha^k."""
    return segal_norm(f, _tau_fn(tau).compose(alpha, k), rel_tol, refine)


def is_invariant_under(tau, alpha: Homeomorphism, tol: float = 1e-12,
                       refine: int = DEFAULT_REFINE) -> bool:
    """Probe-grid check that tau o alpha == tau, the hypothesis under
    which the weighted translation is bounded for the series norm."""
    t = _tau_fn(tau)
    moved = t.compose(alpha, 1)
    grid = sample_points(Sum((t, moved)), max(refine, 64))
    pad = np.array([grid[0] - 7.3, grid[-1] + 7.3])
    grid = np.concatenate([grid, pad])
    return float(np.abs(t(grid) - moved(grid)).max()) <= tol


# ---------------------------------------------------------------------------
# bumps
# ---------------------------------------------------------------------------

class BumpSpec:
    """Data for a separating bump: target set K, the level eps1 below which
    the weight must stay on the bump support, the certified level eps2 >=
    sup of |tau| on K, and the integer window half-width N with K in [-N, N]."""

    __slots__ = ("K", "eps1", "eps2", "N")

    def __init__(self, K: CompactSet, eps1: float, eps2: float, N: int):
        if not (0.0 < eps2 < eps1 < 1.0):
            raise InvalidParameters("need 0 < eps2 < eps1 < 1")
        if N < 1 or int(N) != N:
            raise InvalidParameters("window half-width N must be a positive integer")
        lo, hi = K.hull
        if lo < -N or hi > N:
            raise InvalidParameters(f"K hull [{lo}, {hi}] exceeds the window [-{N}, {N}]")
        self.K = K
        self.eps1 = float(eps1)
        self.eps2 = float(eps2)
        self.N = int(N)


def _distance_to(x: float, intervals) -> float:
    d = math.inf
    for lo, hi in intervals:
        if x < lo:
            d = min(d, lo - x)
        elif x > hi:
            d = min(d, x - hi)
        else:
            return 0.0
    return d


def urysohn_bump(spec: BumpSpec, tau, refine: int = DEFAULT_REFINE) -> CompactlySupportedFunction:
    """Piecewise-linear bump equal to 1 on K and 0 on the bad set
    B = {|tau| >= eps1} union the complement of [-N-1, N+1].

    Realised as the distance quotient d(x,B) / (d(x,K) + d(x,B)) sampled at
    region endpoints plus ``refine`` points per gap; on a gap that runs
    directly from K to B the quotient is exactly linear, so the nodes
    reproduce it without error.
    """
    t = _tau_fn(tau)
    # the bump data promises K inside the certified sublevel set of |tau|
    kgrid = spec.K.grid()
    bps = t.breakpoints
    inside = [x for x in bps if spec.K.contains(float(x))]
    if inside:
        kgrid = np.unique(np.concatenate([kgrid, np.array(inside)]))
    sup_on_K = float(np.abs(t(kgrid)).max())
    if sup_on_K > spec.eps2:
        raise InvalidParameters(
            f"sup of |tau| over K is {sup_on_K:.6g} > eps2 = {spec.eps2:.6g}")

    lo_w, hi_w = -spec.N - 1.0, spec.N + 1.0
    bad = list(region_abs_ge(t, spec.eps1, refine))
    bad.append((-math.inf, lo_w))
    bad.append((hi_w, math.inf))
    bad.sort()
    B: list[tuple[float, float]] = []
    for lo, hi in bad:
        if B and lo <= B[-1][1]:
            B[-1] = (B[-1][0], max(B[-1][1], hi))
        else:
            B.append((lo, hi))

    for klo, khi in spec.K.intervals:
        for blo, bhi in B:
            if klo <= bhi and blo <= khi:
                raise SetsNotSeparated(
                    f"K interval [{klo}, {khi}] meets the bad set [{blo}, {bhi}]")

    anchors: dict[float, float] = {}
    for lo, hi in spec.K.intervals:
        anchors[lo] = 1.0
        anchors[hi] = 1.0
    for lo, hi in B:
        if math.isfinite(lo):
            anchors[lo] = 0.0
        if math.isfinite(hi):
            anchors[hi] = 0.0

    def quotient(x: float) -> float:
        dk = _distance_to(x, spec.K.intervals)
        db = _distance_to(x, B)
        return db / (dk + db)

    xs = sorted(anchors)
    nodes = [(x, anchors[x]) for x in xs]
    for p, q in zip(xs, xs[1:]):
        mid = 0.5 * (p + q)
        if _distance_to(mid, spec.K.intervals) == 0.0 or _distance_to(mid, B) == 0.0:
            continue  # interior of K (stays 1) or of B (stays 0)
        for s in np.linspace(p, q, refine + 2)[1:-1]:
            nodes.append((float(s), quotient(float(s))))
    return CompactlySupportedFunction(nodes)


# ---------------------------------------------------------------------------
# approximate identity
# ---------------------------------------------------------------------------

class ApproximateIdentityResult:
    __slots__ = ("mu", "achieved", "bump_spec", "series_depth", "eps")

    def __init__(self, mu, achieved, bump_spec, series_depth, eps):
        self.mu = mu
        self.achieved = achieved
        self.bump_spec = bump_spec
        self.series_depth = series_depth
        self.eps = eps

    def __iter__(self):
        yield self.mu
        yield self.achieved


def approximate_identity(f: BoundedFunction, tau, delta: float,
                         rel_tol: float = 1e-9, refine: int = DEFAULT_REFINE,
                         density: int = 64) -> ApproximateIdentityResult:
    """Construct a bump mu with ||f*mu - f||_tau < delta.

    Steps: pick the series cutoff N with geometric tail below delta/2, set
    eps = delta/(2N), take K = {|f| >= eps}, certify eps2 = 1 - eps/||f||_tau
    (so K sits inside {|tau| <= eps2}), choose eps1 as the midpoint of
    (eps2, 1), and build the separating bump.  ``achieved`` reports the
    measured norm of f*mu - f including its tail bound.

    When delta is large enough that eps would exceed sup|f|, the level is
    lowered to sup|f|/2 so that K stays nonempty; every estimate in the
    chain remains valid since only |f| >= level matters off K.
    """
    if delta <= 0:
        raise InvalidParameters("delta must be positive")
    if f.is_zero:
        raise ZeroInput("approximate identity needs a nonzero function")
    t = _tau_fn(tau)
    norm = segal_norm(f, t, rel_tol, refine)
    norm_upper = norm.value + norm.tail_bound

    grid = _support_grid(f, t, refine)
    sup_f = float(np.abs(f(grid)).max())
    eps_f = float(np.abs(t(grid)).max())

    depth_N = 1
    if eps_f > 0.0:
        while (sup_f * eps_f ** (depth_N + 1) / (1.0 - eps_f)) >= delta / 2.0:
            depth_N += 1
            if depth_N > MAX_SERIES_DEPTH:
                raise NormDepthExceeded("tail cutoff for the bump construction diverged")
    eps = delta / (2.0 * depth_N)
    level = min(eps, sup_f / 2.0)

    K_region = region_abs_ge(f, level, refine)
    K = CompactSet(K_region, density)
    eps2 = 1.0 - level / norm_upper
    eps1 = 0.5 * (eps2 + 1.0)
    lo, hi = K.hull
    window_N = max(1, math.ceil(max(abs(lo), abs(hi))))
    spec = BumpSpec(K, eps1, eps2, window_N)
    mu = urysohn_bump(spec, t, refine)

    drop = Product((f, Sum((mu, Constant(-1.0)))))  # f*mu - f, supported in supp f
    if drop.is_zero:
        achieved = 0.0
    else:
        res = segal_norm(drop, t, rel_tol, refine)
        achieved = res.value + res.tail_bound
    return ApproximateIdentityResult(mu, achieved, spec, depth_N, eps)


# ---------------------------------------------------------------------------
# dense sampling of the algebra
# ---------------------------------------------------------------------------

def dense_sample(tau, eps: float, seed: int, refine: int = DEFAULT_REFINE) -> CompactlySupportedFunction:
    """Pseudo-random piecewise-linear function supported inside {|tau| <= eps}.

    Membership is automatic: eps < 1 bounds the weight on the support.
    Deterministic for a fixed seed; raises EmptyRegion when the sublevel
    set has no interior to stand on.
    """
    if not (0.0 < eps < 1.0):
        raise InvalidParameters("eps must lie in (0, 1)")
    t = _tau_fn(tau)
    region = region_abs_le(t, eps, refine)
    bps = t.breakpoints
    if bps.size:
        win_lo, win_hi = float(bps[0]) - 5.0, float(bps[-1]) + 5.0
    else:
        win_lo, win_hi = -10.0, 10.0
    candidates = []
    for lo, hi in region:
        lo = max(lo, win_lo)
        hi = min(hi, win_hi)
        if hi - lo > 1e-9:
            candidates.append((lo, hi))
    if not candidates:
        raise EmptyRegion(f"{{|tau| <= {eps}}} has no usable interior")
    rng = random.Random(seed)
    lo, hi = candidates[rng.randrange(len(candidates))]
    length = hi - lo
    a = lo + 0.1 * length * rng.random()
    b = hi - 0.1 * length * rng.random()
    k = rng.randint(1, 4)
    xs = sorted(a + (b - a) * rng.random() for _ in range(k))
    while len(set(xs)) != len(xs) or (xs and (xs[0] <= a or xs[-1] >= b)):
        xs = sorted(a + (b - a) * rng.random() for _ in range(k))
    vals = [rng.uniform(-1.0, 1.0) for _ in range(k)]
    if max(abs(v) for v in vals) < 0.1:
        vals[0] = 0.5
    nodes = [(a, 0.0)] + list(zip(xs, vals)) + [(b, 0.0)]
    return CompactlySupportedFunction(nodes)
