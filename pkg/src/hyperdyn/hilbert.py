"""Finitely supported vectors over C_0(R) and the weighted shift operators.

A ``ModuleVector`` is a bi-infinite sequence of compactly supported
functions with finitely many nonzero entries; its norm is

    ||a||_2 = sqrt( sup_x  sum_j |a_j(x)|^2 ),

computed over the union of the entry supports.  On these vectors act

* ``apply_shift``          (a)_j -> w_j * (a_{j-1} o alpha), iterated n times,
* ``apply_inverse_shift``  the exact inverse (needs invertible weights),

and on single functions the multiplication-composition operator

* ``apply_multiplier``          f -> b * (f o alpha), iterated n times,
* ``apply_inverse_multiplier``  its exact inverse.

n-fold applications are materialised as flat products of the shifted
weight factors, so evaluation cost grows linearly (not exponentially)
with the iteration count and never recurses.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping

import numpy as np

from .errors import InvalidParameters, NonInvertibleWeight, NonInvertibleWeights
from .funcspace import (
    DEFAULT_REFINE,
    RECIPROCAL_FLOOR,
    BoundedFunction,
    CompactlySupportedFunction,
    Homeomorphism,
    Product,
    Reciprocal,
    Sum,
    abs_bounds,
    sample_points,
)

#: products whose running magnitude drops below this report 0 with a flag
UNDERFLOW_FLOOR = 1e-300

#: default cap used to certify that sup_j ||w_j|| is finite
WEIGHT_BOUND_CAP = 1e12


# ---------------------------------------------------------------------------
# weight sequences
# ---------------------------------------------------------------------------

class WeightSequence:
    """Bi-infinite family of bounded weight functions w_j.

    Stored as an explicit table for |j| <= J and two default rules, one for
    j > J and one for j < -J, so criteria can reach weights at unboundedly
    large |j|.  On construction the sup of the sup norms is computed and
    checked against ``bound_cap``; if every weight is bounded away from zero
    (|inf| >= floor) the sequence carries an invertibility certificate and
    exposes exact reciprocal weights.
    """

    def __init__(self, table: Mapping[int, BoundedFunction],
                 default_pos: BoundedFunction, default_neg: BoundedFunction,
                 *, floor: float = RECIPROCAL_FLOOR,
                 bound_cap: float = WEIGHT_BOUND_CAP,
                 refine: int = DEFAULT_REFINE):
        self.table = dict(table)
        self.default_pos = default_pos
        self.default_neg = default_neg
        self.floor = float(floor)
        self.j_table = max((abs(j) for j in self.table), default=0)
        for j in range(-self.j_table, self.j_table + 1):
            if self.table and j not in self.table:
                raise InvalidParameters(
                    f"weight table has a gap at j={j}; it must cover all |j| <= {self.j_table}")

        forms = list(self.table.values()) + [default_pos, default_neg]
        ranges = [abs_bounds(w, refine) for w in forms]
        self.bound = max(hi for _, hi in ranges)
        if not math.isfinite(self.bound) or self.bound > bound_cap:
            raise InvalidParameters(
                f"weight sup norm {self.bound:.3g} exceeds the cap {bound_cap:.3g}")
        inf_abs = min(lo for lo, _ in ranges)
        self.invertible = inf_abs >= self.floor
        self.inverse_bound = (1.0 / inf_abs) if self.invertible else math.inf
        self._reciprocals: dict[int, BoundedFunction] = {}

    @classmethod
    def constant(cls, c: float, **kw) -> "WeightSequence":
        from .funcspace import Constant
        w = Constant(c)
        return cls({}, w, w, **kw)

    @classmethod
    def from_rule(cls, rule: Callable[[int], BoundedFunction], j_table: int,
                  default_pos: BoundedFunction, default_neg: BoundedFunction,
                  **kw) -> "WeightSequence":
        table = {j: rule(j) for j in range(-j_table, j_table + 1)}
        return cls(table, default_pos, default_neg, **kw)

    def weight(self, j: int) -> BoundedFunction:
        if j in self.table:
            return self.table[j]
        if j > self.j_table:
            return self.default_pos
        if j < -self.j_table:
            return self.default_neg
        return self.default_pos if j > 0 else self.default_neg

    def inverse_weight(self, j: int) -> BoundedFunction:
        if not self.invertible:
            raise NonInvertibleWeights(
                "weight sequence carries no invertibility certificate "
                f"(requires |inf| >= {self.floor:.3g} for every weight)")
        if j not in self._reciprocals:
            self._reciprocals[j] = Reciprocal(self.weight(j), floor=self.floor)
        return self._reciprocals[j]

    def require_invertible(self) -> None:
        if not self.invertible:
            raise NonInvertibleWeights(
                "operation requires invertible weights with bounded reciprocals")


# ---------------------------------------------------------------------------
# module vectors
# ---------------------------------------------------------------------------

class ModuleVector:
    """Finitely supported map j -> compactly supported function.

    Identically-zero entries are dropped; every stored entry must expose a
    compact support interval.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[int, BoundedFunction]):
        kept: dict[int, BoundedFunction] = {}
        for j, f in entries.items():
            if f.is_zero:
                continue
            if f.support is None:
                raise InvalidParameters(f"entry {j} has no compact support")
            kept[int(j)] = f
        self.entries = dict(sorted(kept.items()))

    @classmethod
    def empty(cls) -> "ModuleVector":
        return cls({})

    @classmethod
    def single(cls, j: int, f: BoundedFunction) -> "ModuleVector":
        return cls({j: f})

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(self.entries)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def support_hull(self) -> tuple[float, float] | None:
        sups = [f.support for f in self.entries.values()]
        if not sups:
            return None
        return (min(s[0] for s in sups), max(s[1] for s in sups))

    def add(self, other: "ModuleVector") -> "ModuleVector":
        return ModuleVector(_combine(self.entries, other.entries, negate=False))

    def sub(self, other: "ModuleVector") -> "ModuleVector":
        return ModuleVector(_combine(self.entries, other.entries, negate=True))

    def __repr__(self):
        return f"ModuleVector({self.entries!r})"


def _combine(a: Mapping[int, BoundedFunction], b: Mapping[int, BoundedFunction],
             *, negate: bool) -> dict[int, BoundedFunction]:
    out: dict[int, BoundedFunction] = dict(a)
    for j, g in b.items():
        h = g.negate() if negate else g
        if j not in out:
            out[j] = h
            continue
        f = out[j]
        if isinstance(f, CompactlySupportedFunction) and isinstance(g, CompactlySupportedFunction):
            # exact node arithmetic on the union node set
            out[j] = f.sub_exact(g) if negate else f.add_exact(g)
        else:
            out[j] = Sum((f, h))
    return out


def module_norm(a: ModuleVector, refine: int = DEFAULT_REFINE) -> float:
    """sqrt of the sup over x of sum_j |a_j(x)|^2.

    The sup is taken over the union of the per-entry sample grids, so it is
    exact whenever all entries are exact piecewise-linear (the summands are
    then convex per segment and peak at breakpoints).
    """
    if a.is_empty:
        return 0.0
    grids = [sample_points(f, refine) for f in a.entries.values()]
    grid = np.unique(np.concatenate(grids))
    total = np.zeros(grid.shape)
    for f in a.entries.values():
        vals = f(grid)
        total += vals * vals
    return math.sqrt(float(total.max()))


# ---------------------------------------------------------------------------
# shift operators
# ---------------------------------------------------------------------------

def _shift_entries(entries: Mapping[int, BoundedFunction], W: WeightSequence,
                   alpha: Homeomorphism, n: int) -> dict[int, BoundedFunction]:
    out: dict[int, BoundedFunction] = {}
    for j0, f in entries.items():
        j = j0 + n
        factors = [W.weight(j - p).compose(alpha, p) for p in range(n)]
        factors.append(f.compose(alpha, n))
        out[j] = Product(tuple(factors))
    return out


def _inverse_shift_entries(entries: Mapping[int, BoundedFunction], W: WeightSequence,
                           alpha: Homeomorphism, n: int) -> dict[int, BoundedFunction]:
    W.require_invertible()
    out: dict[int, BoundedFunction] = {}
    for j0, f in entries.items():
        j = j0 - n
        factors = [W.inverse_weight(j0 - n + p).compose(alpha, -p) for p in range(1, n + 1)]
        factors.append(f.compose(alpha, -n))
        out[j] = Product(tuple(factors))
    return out


def apply_shift(a: ModuleVector, W: WeightSequence, alpha: Homeomorphism,
                n: int) -> ModuleVector:
    """n-th power of the weighted forward shift.

    Entry j of the result is the flat product of the shifted weights
    w_j, (w_{j-1} o alpha), ..., (w_{j-n+1} o alpha^{n-1}) times
    a_{j-n} o alpha^n; supports transform exactly and the index set moves
    up by n.
    """
    if n < 1:
        raise InvalidParameters("shift power n must be a positive integer")
    return ModuleVector(_shift_entries(a.entries, W, alpha, n))


def apply_inverse_shift(a: ModuleVector, W: WeightSequence, alpha: Homeomorphism,
                        n: int) -> ModuleVector:
    """n-th power of the exact inverse of ``apply_shift`` (same parameters).

    Raises NonInvertibleWeights when the sequence lacks the invertibility
    certificate.
    """
    if n < 1:
        raise InvalidParameters("shift power n must be a positive integer")
    return ModuleVector(_inverse_shift_entries(a.entries, W, alpha, n))


class WitnessResult:
    """Outcome of the constructive transitivity experiment.

    ``vector`` is x = u + S^r v; ``d_start`` measures how close x starts to
    u and ``d_end`` how close the r-th shift image of x lands to v, both in
    the module norm.
    """

    __slots__ = ("vector", "d_start", "d_end")

    def __init__(self, vector: ModuleVector, d_start: float, d_end: float):
        self.vector = vector
        self.d_start = d_start
        self.d_end = d_end

    def __iter__(self):
        yield self.vector
        yield self.d_start
        yield self.d_end


def transitivity_witness(u: ModuleVector, v: ModuleVector, W: WeightSequence,
                         alpha: Homeomorphism, r: int,
                         refine: int = DEFAULT_REFINE) -> WitnessResult:
    """Build x = u + S^r v and measure both ends of the transit.

    d_start = ||x - u||_2 (how far the witness sits from u) and
    d_end = ||T^r x - v||_2 (how far its r-th image sits from v); for exact
    arithmetic these equal ||S^r v||_2 and ||T^r u||_2 respectively.
    """
    if r < 1:
        raise InvalidParameters("witness step r must be a positive integer")
    W.require_invertible()
    if u.is_empty and v.is_empty:
        return WitnessResult(ModuleVector.empty(), 0.0, 0.0)
    pulled = apply_inverse_shift(v, W, alpha, r) if not v.is_empty else ModuleVector.empty()
    x = u.add(pulled)
    d_start = module_norm(x.sub(u), refine)
    d_end = module_norm(apply_shift(x, W, alpha, r).sub(v), refine)
    return WitnessResult(x, d_start, d_end)


# ---------------------------------------------------------------------------
# multiplier operators on single functions
# ---------------------------------------------------------------------------

def apply_multiplier(f: BoundedFunction, b: BoundedFunction, alpha: Homeomorphism,
                     n: int) -> BoundedFunction:
    """n-th power of f -> b * (f o alpha): the flat product
    b * (b o alpha) * ... * (b o alpha^{n-1}) * (f o alpha^n)."""
    if n < 1:
        raise InvalidParameters("multiplier power n must be a positive integer")
    factors = [b.compose(alpha, p) for p in range(n)]
    factors.append(f.compose(alpha, n))
    return Product(tuple(factors))


def apply_inverse_multiplier(f: BoundedFunction, b: BoundedFunction,
                             alpha: Homeomorphism, n: int,
                             floor: float = RECIPROCAL_FLOOR) -> BoundedFunction:
    """Exact inverse of ``apply_multiplier``; requires b bounded away from 0."""
    if n < 1:
        raise InvalidParameters("multiplier power n must be a positive integer")
    inf_abs, _ = abs_bounds(b)
    if inf_abs < floor:
        raise NonInvertibleWeight(
            f"multiplier weight has |inf| {inf_abs:.3g} < floor {floor:.3g}")
    binv = Reciprocal(b, floor=floor)
    factors = [binv.compose(alpha, -p) for p in range(1, n + 1)]
    factors.append(f.compose(alpha, -n))
    return Product(tuple(factors))


# ---------------------------------------------------------------------------
# underflow-aware products of many scalars
# ---------------------------------------------------------------------------

class ProductValue:
    """A nonnegative product together with its log10 and an underflow flag.

    ``value`` is 0.0 either because some factor was exactly zero
    (log10 = -inf, flag off) or because the product fell below the double
    precision floor (flag on, log10 still meaningful).
    """

    __slots__ = ("value", "log10", "underflowed")

    def __init__(self, value: float, log10: float, underflowed: bool):
        self.value = value
        self.log10 = log10
        self.underflowed = underflowed


def product_of(factors) -> ProductValue:
    """Multiply |factors| directly while accumulating log10 magnitudes.

    Direct multiplication keeps full precision; the parallel log
    accumulation detects and reports underflow below ``UNDERFLOW_FLOOR``.
    """
    value = 1.0
    logsum = 0.0
    for raw in factors:
        f = abs(raw)
        if f == 0.0:
            return ProductValue(0.0, -math.inf, False)
        value *= f
        logsum += math.log10(f)
    if value != 0.0 and value >= UNDERFLOW_FLOOR:
        return ProductValue(value, logsum, False)
    return ProductValue(10.0 ** logsum if logsum > -320 else 0.0, logsum, True)
