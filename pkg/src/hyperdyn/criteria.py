"""Sup-over-compact-set weight products and the decay searches built on them.

For a weight sequence W, a homeomorphism alpha, an index j and a compact
set K, the two quantities everything reduces to are

    forward(j, r)  = sup_{t in K}  prod_{i=1..r} |w_{j+i}(alpha^{-i}(t))|
    backward(j, r) = sup_{t in K}  prod_{i=1..r} |w_{j+1-i}(alpha^{e(i)}(t))|^{-1}

with the backward exponent e(i) = i-1 by default; the alternative reading
e(i) = -i is available behind the ``exponent`` flag ("i-1" or "-i").

``find_subsequence`` hunts for a strictly increasing sequence of steps r_k
at which both products (max over a finite index set I) drop below a
decreasing threshold ladder; ``check_mixing`` instead demands that the full
tail of the sequence stays below a single threshold.  Both certify evidence
for the user-supplied (K, I) pair only -- the mathematical criteria
quantify over every compact K and finite I, which no scan can exhaust.

Sups are taken over the sample grid of K enlarged by every factor
breakpoint that lands inside K, so piecewise-linear weights whose extremes
sit on endpoints or nodes are evaluated exactly.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameters, NonInvertibleWeight
from .funcspace import (
    BoundedFunction,
    CompactSet,
    Homeomorphism,
    PiecewiseLinear,
    abs_bounds,
)
from .hilbert import (
    UNDERFLOW_FLOOR,
    ModuleVector,
    ProductValue,
    WeightSequence,
    module_norm,
)

SUBSEQUENCE_FOUND = "subsequence_found"
FULL_SEQUENCE_DECAY = "full_sequence_decay"
NOT_FOUND = "not_found_within_budget"

DEFAULT_THRESHOLDS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
DEFAULT_R_MAX = 500

_EXPONENTS = ("i-1", "-i")


def _check_exponent(exponent: str) -> str:
    if exponent not in _EXPONENTS:
        raise InvalidParameters(f"backward exponent must be one of {_EXPONENTS}")
    return exponent


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

class TraceRow:
    """Per-step record: the two sup-products for every index in the scan."""

    __slots__ = ("r", "forward", "backward", "log10_forward", "log10_backward")

    def __init__(self, r, forward, backward, log10_forward, log10_backward):
        self.r = r
        self.forward = tuple(forward)
        self.backward = tuple(backward)
        self.log10_forward = tuple(log10_forward)
        self.log10_backward = tuple(log10_backward)

    @property
    def forward_sup(self) -> float:
        return max(self.forward)

    @property
    def backward_sup(self) -> float:
        return max(self.backward)

    @property
    def underflowed(self) -> bool:
        vals = self.forward + self.backward
        logs = self.log10_forward + self.log10_backward
        return any(v == 0.0 and lg > -math.inf for v, lg in zip(vals, logs))


class CriterionReport:
    """Trace of a decay scan plus the verdict it supports."""

    __slots__ = ("kind", "indices", "trace", "thresholds", "subsequence",
                 "verdict", "exponent", "threshold", "r_window")

    def __init__(self, kind, indices, trace, thresholds, subsequence, verdict,
                 exponent="i-1", threshold=None, r_window=None):
        self.kind = kind
        self.indices = tuple(indices)
        self.trace = list(trace)
        self.thresholds = tuple(thresholds)
        self.subsequence = list(subsequence)
        self.verdict = verdict
        self.exponent = exponent
        self.threshold = threshold
        self.r_window = r_window

    @property
    def found(self) -> bool:
        return self.verdict in (SUBSEQUENCE_FOUND, FULL_SEQUENCE_DECAY)

    def __repr__(self):
        return (f"CriterionReport(kind={self.kind!r}, verdict={self.verdict!r}, "
                f"subsequence={self.subsequence!r})")


# ---------------------------------------------------------------------------
# grids carrying activation indices
# ---------------------------------------------------------------------------

def _activated_grid(base: np.ndarray, K: CompactSet, mapped: list[tuple[int, float]]):
    """Base grid (activation 0) plus mapped factor breakpoints inside K,
    each active only from the step that introduces its factor."""
    pts = [base]
    act = [np.zeros(base.size, dtype=int)]
    for i, x in mapped:
        if K.contains(x):
            pts.append(np.array([x]))
            act.append(np.array([i]))
    p = np.concatenate(pts)
    a = np.concatenate(act)
    order = np.argsort(p, kind="stable")
    return p[order], a[order]


def _forward_breakpoints(W: WeightSequence, alpha: Homeomorphism, j: int,
                         r_max: int) -> list[tuple[int, float]]:
    out = []
    fwd = Homeomorphism.identity()
    for i in range(1, r_max + 1):
        fwd = alpha.compose(fwd)  # alpha^i
        for x in W.weight(j + i).breakpoints:
            out.append((i, float(fwd(x))))
    return out


def _backward_breakpoints(W: WeightSequence, alpha: Homeomorphism, j: int,
                          r_max: int, exponent: str) -> list[tuple[int, float]]:
    out = []
    for i in range(1, r_max + 1):
        e = i - 1 if exponent == "i-1" else -i
        gamma_inv = alpha.iterate(-e)
        for x in W.weight(j + 1 - i).breakpoints:
            out.append((i, float(gamma_inv(x))))
    return out


# ---------------------------------------------------------------------------
# single products, from scratch
# ---------------------------------------------------------------------------

def _grid_product(value_arrays: Iterable[np.ndarray]) -> ProductValue:
    """Sup over the grid of a pointwise product given per-factor |values|.

    Direct multiplication is used for the value (full precision) with a
    parallel log10 accumulation to detect underflow.
    """
    prod = None
    logsum = None
    for vals in value_arrays:
        if prod is None:
            prod = np.ones_like(vals)
            logsum = np.zeros_like(vals)
        prod = prod * vals
        with np.errstate(divide="ignore"):
            logsum = logsum + np.log10(vals)
    if prod is None:
        return ProductValue(1.0, 0.0, False)
    sup = float(prod.max())
    suplog = float(logsum.max())
    if sup >= UNDERFLOW_FLOOR:
        return ProductValue(sup, suplog, False)
    if suplog == -math.inf:
        return ProductValue(0.0, -math.inf, False)
    return ProductValue(10.0 ** suplog if suplog > -320 else 0.0, suplog, True)


def forward_product_value(W: WeightSequence, alpha: Homeomorphism, j: int, r: int,
                          K: CompactSet) -> ProductValue:
    if r == 0:
        return ProductValue(1.0, 0.0, False)
    if r < 0:
        raise InvalidParameters("product length r must be nonnegative")
    pts, act = _activated_grid(K.grid(), K, _forward_breakpoints(W, alpha, j, r))
    arrays = (np.abs(W.weight(j + i)(alpha.iterate(-i)(pts))) for i in range(1, r + 1))
    return _grid_product(arrays)


def backward_product_value(W: WeightSequence, alpha: Homeomorphism, j: int, r: int,
                           K: CompactSet, exponent: str = "i-1") -> ProductValue:
    _check_exponent(exponent)
    W.require_invertible()
    if r == 0:
        return ProductValue(1.0, 0.0, False)
    if r < 0:
        raise InvalidParameters("product length r must be nonnegative")
    pts, act = _activated_grid(
        K.grid(), K, _backward_breakpoints(W, alpha, j, r, exponent))

    def arrays():
        for i in range(1, r + 1):
            e = i - 1 if exponent == "i-1" else -i
            vals = np.abs(W.weight(j + 1 - i)(alpha.iterate(e)(pts)))
            yield 1.0 / vals

    return _grid_product(arrays())


def forward_product(W: WeightSequence, alpha: Homeomorphism, j: int, r: int,
                    K: CompactSet) -> float:
    """sup over K's grid of prod_{i=1..r} |w_{j+i}(alpha^{-i}(t))|."""
    return forward_product_value(W, alpha, j, r, K).value


def backward_product(W: WeightSequence, alpha: Homeomorphism, j: int, r: int,
                     K: CompactSet, exponent: str = "i-1") -> float:
    """sup over K's grid of prod_{i=1..r} |w_{j+1-i}(alpha^{e(i)}(t))|^{-1}."""
    return backward_product_value(W, alpha, j, r, K, exponent).value


# ---------------------------------------------------------------------------
# incremental scan over r = 1..r_max
# ---------------------------------------------------------------------------

def scan_products(W: WeightSequence, alpha: Homeomorphism, I: Sequence[int],
                  K: CompactSet, r_max: int, exponent: str = "i-1") -> list[TraceRow]:
    """Trace of (forward, backward) sup products for every r = 1..r_max.

    Per-point running log sums make each step O(grid) instead of O(r*grid);
    the grid carries every mapped factor breakpoint, masked so that step r
    only sees points introduced by factors i <= r, which keeps the scan
    consistent with the from-scratch products to rounding.
    """
    _check_exponent(exponent)
    W.require_invertible()
    indices = sorted(set(int(j) for j in I))
    if not indices:
        raise InvalidParameters("index set I must be nonempty")
    if r_max < 1:
        raise InvalidParameters("r_max must be at least 1")
    base = K.grid()

    states = []
    for j in indices:
        fp, fa = _activated_grid(base, K, _forward_breakpoints(W, alpha, j, r_max))
        bp, ba = _activated_grid(base, K,
                                 _backward_breakpoints(W, alpha, j, r_max, exponent))
        states.append({
            "j": j,
            "fp": fp, "fa": fa, "flog": np.zeros(fp.size),
            "bp": bp, "ba": ba, "blog": np.zeros(bp.size),
        })

    inv_step = alpha.inverse()
    fwd_map = Homeomorphism.identity()       # alpha^{-i} applied to grid points
    bwd_map = Homeomorphism.identity()       # alpha^{e(i)} applied to grid points
    rows: list[TraceRow] = []
    for r in range(1, r_max + 1):
        fwd_map = inv_step.compose(fwd_map)
        if exponent == "i-1":
            if r > 1:
                bwd_map = alpha.compose(bwd_map)
        else:
            bwd_map = inv_step.compose(bwd_map)
        fvals, bvals, flogs, blogs = [], [], [], []
        for st in states:
            j = st["j"]
            with np.errstate(divide="ignore"):
                st["flog"] += np.log10(np.abs(W.weight(j + r)(fwd_map(st["fp"]))))
                st["blog"] -= np.log10(np.abs(W.weight(j + 1 - r)(bwd_map(st["bp"]))))
            flog = float(st["flog"][st["fa"] <= r].max())
            blog = float(st["blog"][st["ba"] <= r].max())
            flogs.append(flog)
            blogs.append(blog)
            fvals.append(10.0 ** flog if flog > -320 else 0.0)
            bvals.append(10.0 ** blog if blog > -320 else 0.0)
        rows.append(TraceRow(r, fvals, bvals, flogs, blogs))
    return rows


def _check_thresholds(thresholds: Sequence[float]) -> tuple[float, ...]:
    th = tuple(float(t) for t in thresholds)
    if not th or any(t <= 0 for t in th):
        raise InvalidParameters("thresholds must be positive")
    if any(b >= a for a, b in zip(th, th[1:])):
        raise InvalidParameters("thresholds must be strictly decreasing")
    return th


def find_subsequence(W: WeightSequence, alpha: Homeomorphism, I: Sequence[int],
                     K: CompactSet, thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
                     r_max: int = DEFAULT_R_MAX,
                     exponent: str = "i-1") -> CriterionReport:
    """Greedy first-hit search for steps r_1 < r_2 < ... taking both
    products below the successive thresholds.

    The verdict is ``subsequence_found`` once every rung of the ladder has
    been assigned a step, otherwise ``not_found_within_budget``; running out
    of budget is a verdict, not an error.
    """
    th = _check_thresholds(thresholds)
    rows = scan_products(W, alpha, I, K, r_max, exponent)
    subsequence: list[int] = []
    k = 0
    for row in rows:
        if k < len(th) and row.forward_sup <= th[k] and row.backward_sup <= th[k]:
            subsequence.append(row.r)
            k += 1
    verdict = SUBSEQUENCE_FOUND if k == len(th) else NOT_FOUND
    return CriterionReport("bilateral", sorted(set(int(j) for j in I)), rows, th,
                           subsequence, verdict, exponent)


def check_mixing(W: WeightSequence, alpha: Homeomorphism, I: Sequence[int],
                 K: CompactSet, threshold: float = 1e-6, r_window: int = 50,
                 r_max: int = DEFAULT_R_MAX,
                 exponent: str = "i-1") -> CriterionReport:
    """Full-sequence decay check: both products must stay below ``threshold``
    at every r in the closing window [r_max - r_window, r_max].

    Distinguishes genuine full-sequence decay from decay along a
    subsequence only.
    """
    if threshold <= 0:
        raise InvalidParameters("threshold must be positive")
    if not 0 <= r_window < r_max:
        raise InvalidParameters("need 0 <= r_window < r_max")
    rows = scan_products(W, alpha, I, K, r_max, exponent)
    window = [row for row in rows if row.r >= r_max - r_window]
    ok = all(row.forward_sup <= threshold and row.backward_sup <= threshold
             for row in window)
    verdict = FULL_SEQUENCE_DECAY if ok else NOT_FOUND
    return CriterionReport("mixing", sorted(set(int(j) for j in I)), rows, (),
                           [], verdict, exponent, threshold=threshold,
                           r_window=r_window)


# ---------------------------------------------------------------------------
# multiplier products
# ---------------------------------------------------------------------------

def _require_invertible_fn(b: BoundedFunction, floor: float) -> None:
    inf_abs, _ = abs_bounds(b)
    if inf_abs < floor:
        raise NonInvertibleWeight(
            f"multiplier weight has |inf| {inf_abs:.3g} < floor {floor:.3g}")


def multiplier_products(b: BoundedFunction, alpha: Homeomorphism, K: CompactSet,
                        n: int, floor: float = 1e-9) -> tuple[float, float]:
    """The two sups of the multiplier criterion at step n:

    forward  = sup_{t in K} prod_{j=0..n-1} |b(alpha^{j-n}(t))|
    backward = sup_{t in K} prod_{j=0..n-1} |b(alpha^{j}(t))|^{-1}
    """
    if n < 1:
        raise InvalidParameters("step n must be a positive integer")
    _require_invertible_fn(b, floor)
    bps = b.breakpoints

    fwd_mapped = []
    bwd_mapped = []
    for jj in range(n):
        to_fwd = alpha.iterate(n - jj)      # preimage map for b o alpha^{j-n}
        to_bwd = alpha.iterate(-jj)         # preimage map for b o alpha^{j}
        for x in bps:
            fwd_mapped.append((0, float(to_fwd(x))))
            bwd_mapped.append((0, float(to_bwd(x))))
    fpts, _ = _activated_grid(K.grid(), K, fwd_mapped)
    bpts, _ = _activated_grid(K.grid(), K, bwd_mapped)

    fwd = _grid_product(
        np.abs(b(alpha.iterate(jj - n)(fpts))) for jj in range(n))
    bwd = _grid_product(
        1.0 / np.abs(b(alpha.iterate(jj)(bpts))) for jj in range(n))
    return fwd.value, bwd.value


def multiplier_scan(b: BoundedFunction, alpha: Homeomorphism, K: CompactSet,
                    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
                    n_max: int = 200, floor: float = 1e-9) -> CriterionReport:
    """Threshold-ladder search over the multiplier products for n = 1..n_max."""
    th = _check_thresholds(thresholds)
    if n_max < 1:
        raise InvalidParameters("n_max must be at least 1")
    _require_invertible_fn(b, floor)
    rows = []
    subsequence: list[int] = []
    k = 0
    for n in range(1, n_max + 1):
        fwd, bwd = multiplier_products(b, alpha, K, n, floor)
        flog = math.log10(fwd) if fwd > 0 else -math.inf
        blog = math.log10(bwd) if bwd > 0 else -math.inf
        row = TraceRow(n, (fwd,), (bwd,), (flog,), (blog,))
        rows.append(row)
        if k < len(th) and fwd <= th[k] and bwd <= th[k]:
            subsequence.append(n)
            k += 1
    verdict = SUBSEQUENCE_FOUND if k == len(th) else NOT_FOUND
    return CriterionReport("multiplier", (), rows, th, subsequence, verdict)


# ---------------------------------------------------------------------------
# runaway condition
# ---------------------------------------------------------------------------

class RunawayResult:
    """Smallest N with alpha^n(K) disjoint from K for every n in [N, n_max],
    or None when no such N exists within the budget."""

    __slots__ = ("N", "n_max", "rows")

    def __init__(self, N, n_max, rows):
        self.N = N
        self.n_max = n_max
        self.rows = rows

    @property
    def escaped(self) -> bool:
        return self.N is not None


def _interval_image(alpha_n: Homeomorphism, intervals):
    out = []
    for lo, hi in intervals:
        a, b = alpha_n(lo), alpha_n(hi)
        out.append((min(a, b), max(a, b)))
    return sorted(out)


def _separation(A, B) -> float:
    """Smallest gap between two interval unions; <= 0 means they intersect."""
    gap = math.inf
    for lo1, hi1 in A:
        for lo2, hi2 in B:
            gap = min(gap, max(lo2 - hi1, lo1 - hi2))
    return gap


def runaway_check(alpha: Homeomorphism, K: CompactSet, n_max: int = 100) -> RunawayResult:
    """Exact interval arithmetic scan of alpha^n(K) against K.

    Closed intervals touching at a point count as intersecting.
    """
    if n_max < 1:
        raise InvalidParameters("n_max must be at least 1")
    rows = []
    last_violation = 0
    cur = Homeomorphism.identity()
    for n in range(1, n_max + 1):
        cur = alpha.compose(cur)
        sep = _separation(_interval_image(cur, K.intervals), K.intervals)
        disjoint = sep > 0
        rows.append((n, sep, disjoint))
        if not disjoint:
            last_violation = n
    N = last_violation + 1 if last_violation < n_max else None
    return RunawayResult(N, n_max, rows)


# ---------------------------------------------------------------------------
# the concrete mixing weight family
# ---------------------------------------------------------------------------

def mixing_weights(M: float, eps: float, **kw) -> WeightSequence:
    """Piecewise-linear weights that contract on the right half-line for
    positive indices and expand on the left half-line for the rest.

    For j >= 1:  w_j = 1+eps on (-inf, -1], 1-eps on [0, inf), linear between.
    For j <= 0:  w_j = 1+eps on (-inf,  0], 1-eps on [1, inf), linear between.

    Requires M > 1, 1+eps < M, 1-eps > 1/M and (1+eps)/(1-eps) < M, so that
    every weight satisfies ||w|| * ||w^{-1}|| < M and the family certifies
    decay of both orbit products.
    """
    if not (M > 1):
        raise InvalidParameters("M must exceed 1")
    if not (eps > 0):
        raise InvalidParameters("eps must be positive")
    if not (1 + eps < M):
        raise InvalidParameters(f"need 1+eps < M, got 1+eps={1+eps} >= M={M}")
    if not (1 - eps > 1 / M):
        raise InvalidParameters(f"need 1-eps > 1/M, got 1-eps={1-eps} <= 1/M={1/M}")
    if not ((1 + eps) / (1 - eps) < M):
        raise InvalidParameters(
            f"need (1+eps)/(1-eps) < M for the norm product bound, "
            f"got {(1+eps)/(1-eps)} >= {M}")
    pos = PiecewiseLinear([(-1.0, 1.0 + eps), (0.0, 1.0 - eps)])
    neg = PiecewiseLinear([(0.0, 1.0 + eps), (1.0, 1.0 - eps)])
    return WeightSequence({0: neg}, pos, neg, **kw)


# ---------------------------------------------------------------------------
# bridge to the dynamics: bounds the witness distances must obey
# ---------------------------------------------------------------------------

def witness_decay_bounds(u: ModuleVector, v: ModuleVector, W: WeightSequence,
                         alpha: Homeomorphism, r: int, density: int = 64,
                         exponent: str = "i-1") -> tuple[float, float]:
    """Upper bounds for the witness distances at step r:

    d_end  <= max_{j in supp u} forward(j, r, K_u)  * ||u||_2 =: bound_forward
    d_start <= max_{j in supp v} backward(j, r, K_v) * ||v||_2 =: bound_backward

    where K_u, K_v are the unions of the entry supports.
    """
    bound_fwd = 0.0
    if not u.is_empty:
        K_u = CompactSet([f.support for f in u.entries.values()], density)
        best = max(forward_product(W, alpha, j, r, K_u) for j in u.indices)
        bound_fwd = best * module_norm(u)
    bound_bwd = 0.0
    if not v.is_empty:
        K_v = CompactSet([f.support for f in v.entries.values()], density)
        best = max(backward_product(W, alpha, j, r, K_v, exponent) for j in v.indices)
        bound_bwd = best * module_norm(v)
    return bound_fwd, bound_bwd
