"""Exact-as-possible arithmetic for continuous functions on the real line.

The concrete model is the pair of algebras C_b(R) (bounded continuous
functions, used for operator weights) and C_0(R) (functions vanishing at
infinity, used for the vectors the operators act on).  Every represented
function is one of a handful of closed forms:

* ``Constant``                   -- c
* ``PiecewiseLinear``            -- linear interpolation between nodes with
                                    constant tails beyond the node range
* ``ClampedAffine``              -- clamp(a*x + b, lo, hi)
* ``CompactlySupportedFunction`` -- piecewise linear, zero outside a compact
                                    support interval (the C_0 elements)
* ``Product`` / ``Sum``          -- lazy pointwise combinations
* ``Reciprocal``                 -- 1/f for f bounded away from zero

Linear forms admit exact sup norms and exact level-set regions; lazy
products and sums are handled by refined sampling between breakpoints
(``refine`` samples per linear segment, default 16), which is the documented
error model for every quantity derived from them.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameters

DEFAULT_REFINE = 16
RECIPROCAL_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# homeomorphisms of the line
# ---------------------------------------------------------------------------

class Homeomorphism:
    """Invertible affine self-map x -> a*x + b of the real line (a != 0).

    ``translation(c)`` builds the map x -> x - c, so composing a function
    with it moves mass to the right by c; this orientation is used
    consistently by every operator in the package.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: float, b: float):
        if a == 0 or not math.isfinite(a) or not math.isfinite(b):
            raise InvalidParameters("affine map requires finite a != 0 and finite b")
        self.a = float(a)
        self.b = float(b)

    @classmethod
    def translation(cls, c: float) -> "Homeomorphism":
        return cls(1.0, -float(c))

    @classmethod
    def affine(cls, a: float, b: float) -> "Homeomorphism":
        return cls(a, b)

    @classmethod
    def identity(cls) -> "Homeomorphism":
        return cls(1.0, 0.0)

    @property
    def kind(self) -> str:
        return "translation" if self.a == 1.0 else "affine"

    @property
    def is_identity(self) -> bool:
        return self.a == 1.0 and self.b == 0.0

    def __call__(self, x):
        return self.a * x + self.b

    def inverse(self) -> "Homeomorphism":
        return Homeomorphism(1.0 / self.a, -self.b / self.a)

    def compose(self, other: "Homeomorphism") -> "Homeomorphism":
        """self after other: x -> self(other(x))."""
        return Homeomorphism(self.a * other.a, self.a * other.b + self.b)

    def iterate(self, n: int) -> "Homeomorphism":
        """n-fold composition, n in Z; negative n uses the exact inverse."""
        if n == 0:
            return Homeomorphism.identity()
        if self.a == 1.0:
            return Homeomorphism(1.0, n * self.b)
        step = self if n > 0 else self.inverse()
        out = step
        for _ in range(abs(n) - 1):
            out = step.compose(out)
        return out

    def __repr__(self):
        if self.kind == "translation":
            return f"Homeomorphism.translation({-self.b!r})"
        return f"Homeomorphism.affine({self.a!r}, {self.b!r})"


# ---------------------------------------------------------------------------
# function forms
# ---------------------------------------------------------------------------

class BoundedFunction:
    """Base class for all represented elements of C_b(R)."""

    __slots__ = ()

    # -- evaluation ---------------------------------------------------------

    def _eval(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        out = self._eval(np.atleast_1d(xs))
        if xs.ndim == 0:
            return float(out[0])
        return out

    # -- structure ----------------------------------------------------------

    @property
    def breakpoints(self) -> np.ndarray:
        """Sorted x-values where the represented form changes behaviour."""
        raise NotImplementedError

    @property
    def tails(self) -> tuple[float, float]:
        """Constant values taken left/right of the breakpoint hull."""
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float] | None:
        """Compact support interval if one is known, else None."""
        return None

    @property
    def is_zero(self) -> bool:
        return False

    # -- algebra ------------------------------------------------------------

    def compose(self, alpha: Homeomorphism, n: int = 1) -> "BoundedFunction":
        """Return self o alpha^n with nodes mapped exactly (no resampling)."""
        if n == 0:
            return self
        return self._compose(alpha.iterate(n))

    def _compose(self, beta: Homeomorphism) -> "BoundedFunction":
        raise NotImplementedError

    def negate(self) -> "BoundedFunction":
        return Product((self,), coeff=-1.0)

    def reciprocal(self, floor: float = RECIPROCAL_FLOOR) -> "Reciprocal":
        return Reciprocal(self, floor=floor)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            other = Constant(float(other))
        if not isinstance(other, BoundedFunction):
            return NotImplemented
        return Product((self, other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Product((Constant(float(other)), self))
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, BoundedFunction):
            return Sum((self, other))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, BoundedFunction):
            return Sum((self, other.negate()))
        return NotImplemented


class Constant(BoundedFunction):
    __slots__ = ("value",)

    def __init__(self, value: float):
        if not math.isfinite(value):
            raise InvalidParameters("constant value must be finite")
        self.value = float(value)

    def _eval(self, xs):
        return np.full(xs.shape, self.value)

    @property
    def breakpoints(self):
        return np.empty(0)

    @property
    def tails(self):
        return (self.value, self.value)

    @property
    def is_zero(self):
        return self.value == 0.0

    def _compose(self, beta):
        return self

    def negate(self):
        return Constant(-self.value)

    def __repr__(self):
        return f"Constant({self.value!r})"


def _check_nodes(xs: np.ndarray, vals: np.ndarray, least: int) -> None:
    if xs.size < least:
        raise InvalidParameters(f"need at least {least} nodes, got {xs.size}")
    if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(vals)):
        raise InvalidParameters("nodes must be finite")
    if xs.size > 1 and not np.all(np.diff(xs) > 0):
        raise InvalidParameters("node x-values must be strictly increasing")


class PiecewiseLinear(BoundedFunction):
    """Linear interpolation between nodes, constant beyond the end nodes.

    Continuity forces the tails to equal the boundary node values; passing
    explicit tails that disagree is rejected.
    """

    __slots__ = ("xs", "vals")

    def __init__(self, nodes: Iterable[tuple[float, float]],
                 left_tail: float | None = None, right_tail: float | None = None):
        pts = sorted((float(x), float(v)) for x, v in nodes)
        xs = np.array([p[0] for p in pts])
        vals = np.array([p[1] for p in pts])
        _check_nodes(xs, vals, 1)
        if left_tail is not None and left_tail != vals[0]:
            raise InvalidParameters("left tail must equal the first node value")
        if right_tail is not None and right_tail != vals[-1]:
            raise InvalidParameters("right tail must equal the last node value")
        self.xs = xs
        self.vals = vals

    def _eval(self, xs):
        return np.interp(xs, self.xs, self.vals)

    @property
    def breakpoints(self):
        return self.xs

    @property
    def tails(self):
        return (float(self.vals[0]), float(self.vals[-1]))

    @property
    def is_zero(self):
        return bool(np.all(self.vals == 0.0))

    def _compose(self, beta):
        inv = beta.inverse()
        xs = inv(self.xs)
        vals = self.vals
        if inv.a < 0:
            xs, vals = xs[::-1], vals[::-1]
        return PiecewiseLinear(zip(xs, vals))

    def negate(self):
        return PiecewiseLinear(zip(self.xs, -self.vals))

    def __repr__(self):
        return f"PiecewiseLinear({list(zip(self.xs, self.vals))!r})"


class ClampedAffine(BoundedFunction):
    """clamp(a*x + b, lo, hi)."""

    __slots__ = ("a", "b", "lo", "hi")

    def __init__(self, a: float, b: float, lo: float, hi: float):
        if lo > hi:
            raise InvalidParameters("clamp bounds must satisfy lo <= hi")
        if not all(map(math.isfinite, (a, b, lo, hi))):
            raise InvalidParameters("clamped affine parameters must be finite")
        self.a, self.b, self.lo, self.hi = float(a), float(b), float(lo), float(hi)

    def _eval(self, xs):
        return np.clip(self.a * xs + self.b, self.lo, self.hi)

    @property
    def breakpoints(self):
        if self.a == 0.0:
            return np.empty(0)
        pts = sorted(((self.lo - self.b) / self.a, (self.hi - self.b) / self.a))
        return np.array(pts)

    @property
    def tails(self):
        if self.a == 0.0:
            c = min(max(self.b, self.lo), self.hi)
            return (c, c)
        return (self.lo, self.hi) if self.a > 0 else (self.hi, self.lo)

    def _compose(self, beta):
        return ClampedAffine(self.a * beta.a, self.a * beta.b + self.b, self.lo, self.hi)

    def negate(self):
        return ClampedAffine(-self.a, -self.b, -self.hi, -self.lo)

    def __repr__(self):
        return f"ClampedAffine({self.a!r}, {self.b!r}, {self.lo!r}, {self.hi!r})"


class CompactlySupportedFunction(BoundedFunction):
    """Piecewise-linear element of C_0(R): zero at and outside its support.

    Supports exact addition, subtraction and scalar scaling (the result is
    again piecewise linear on the union node set).
    """

    __slots__ = ("xs", "vals")

    def __init__(self, nodes: Iterable[tuple[float, float]]):
        pts = sorted((float(x), float(v)) for x, v in nodes)
        xs = np.array([p[0] for p in pts])
        vals = np.array([p[1] for p in pts])
        _check_nodes(xs, vals, 2)
        if vals[0] != 0.0 or vals[-1] != 0.0:
            raise InvalidParameters("support endpoints must carry the value 0")
        self.xs = xs
        self.vals = vals

    @classmethod
    def tent(cls, lo: float, peak: float, hi: float, height: float = 1.0):
        if not lo < peak < hi:
            raise InvalidParameters("tent requires lo < peak < hi")
        return cls([(lo, 0.0), (peak, height), (hi, 0.0)])

    def _eval(self, xs):
        return np.interp(xs, self.xs, self.vals, left=0.0, right=0.0)

    @property
    def breakpoints(self):
        return self.xs

    @property
    def tails(self):
        return (0.0, 0.0)

    @property
    def support(self):
        return (float(self.xs[0]), float(self.xs[-1]))

    @property
    def is_zero(self):
        return bool(np.all(self.vals == 0.0))

    def _compose(self, beta):
        inv = beta.inverse()
        xs = inv(self.xs)
        vals = self.vals
        if inv.a < 0:
            xs, vals = xs[::-1], vals[::-1]
        return CompactlySupportedFunction(zip(xs, vals))

    def scale(self, c: float) -> "CompactlySupportedFunction":
        return CompactlySupportedFunction(zip(self.xs, c * self.vals))

    def negate(self):
        return self.scale(-1.0)

    def add_exact(self, other: "CompactlySupportedFunction") -> "CompactlySupportedFunction":
        xs = np.union1d(self.xs, other.xs)
        vals = self(xs) + other(xs)
        vals[0] = 0.0
        vals[-1] = 0.0
        return CompactlySupportedFunction(zip(xs, vals))

    def sub_exact(self, other: "CompactlySupportedFunction") -> "CompactlySupportedFunction":
        return self.add_exact(other.negate())

    def __repr__(self):
        return f"CompactlySupportedFunction({list(zip(self.xs, self.vals))!r})"


class Product(BoundedFunction):
    """Lazy pointwise product coeff * f1 * f2 * ... (flattened, order kept).

    The support, if any factor has one, is the intersection of the factor
    supports; evaluation outside it is exactly zero through the compactly
    supported factor.
    """

    __slots__ = ("factors", "coeff")

    def __init__(self, factors: Sequence[BoundedFunction], coeff: float = 1.0):
        flat: list[BoundedFunction] = []
        c = float(coeff)
        for f in factors:
            if isinstance(f, Product):
                c *= f.coeff
                flat.extend(f.factors)
            else:
                flat.append(f)
        if not flat:
            raise InvalidParameters("product needs at least one factor")
        self.factors = tuple(flat)
        self.coeff = c

    def _eval(self, xs):
        out = np.full(xs.shape, self.coeff)
        for f in self.factors:
            out = out * f._eval(xs)
        return out

    @property
    def breakpoints(self):
        return _merge_breakpoints(self.factors)

    @property
    def tails(self):
        lt = rt = self.coeff
        for f in self.factors:
            l, r = f.tails
            lt *= l
            rt *= r
        return (lt, rt)

    @property
    def support(self):
        return _intersect_supports(self.factors)

    @property
    def is_zero(self):
        return self.coeff == 0.0 or any(f.is_zero for f in self.factors)

    def _compose(self, beta):
        return Product(tuple(f._compose(beta) for f in self.factors), coeff=self.coeff)

    def negate(self):
        return Product(self.factors, coeff=-self.coeff)

    def __repr__(self):
        return f"Product({self.factors!r}, coeff={self.coeff!r})"


class Sum(BoundedFunction):
    """Lazy pointwise sum (flattened, order kept)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[BoundedFunction]):
        flat: list[BoundedFunction] = []
        for t in terms:
            if isinstance(t, Sum):
                flat.extend(t.terms)
            else:
                flat.append(t)
        if not flat:
            raise InvalidParameters("sum needs at least one term")
        self.terms = tuple(flat)

    def _eval(self, xs):
        out = self.terms[0]._eval(xs)
        for t in self.terms[1:]:
            out = out + t._eval(xs)
        return out

    @property
    def breakpoints(self):
        return _merge_breakpoints(self.terms)

    @property
    def tails(self):
        lt = sum(t.tails[0] for t in self.terms)
        rt = sum(t.tails[1] for t in self.terms)
        return (lt, rt)

    @property
    def support(self):
        sups = [t.support for t in self.terms]
        if any(s is None for s in sups):
            return None
        return (min(s[0] for s in sups), max(s[1] for s in sups))

    @property
    def is_zero(self):
        return all(t.is_zero for t in self.terms)

    def _compose(self, beta):
        return Sum(tuple(t._compose(beta) for t in self.terms))

    def negate(self):
        return Sum(tuple(t.negate() for t in self.terms))

    def __repr__(self):
        return f"Sum({self.terms!r})"


class Reciprocal(BoundedFunction):
    """1/f for an f whose |inf| over the line is at least ``floor`` > 0."""

    __slots__ = ("inner", "floor")

    def __init__(self, inner: BoundedFunction, floor: float = RECIPROCAL_FLOOR):
        if floor <= 0:
            raise InvalidParameters("positivity floor must be > 0")
        inf_abs, _ = abs_bounds(inner)
        if inf_abs < floor:
            raise InvalidParameters(
                f"cannot invert: |inf| of the function is {inf_abs:.3g} < floor {floor:.3g}")
        self.inner = inner
        self.floor = float(floor)

    def _eval(self, xs):
        return 1.0 / self.inner._eval(xs)

    @property
    def breakpoints(self):
        return self.inner.breakpoints

    @property
    def tails(self):
        l, r = self.inner.tails
        return (1.0 / l, 1.0 / r)

    def _compose(self, beta):
        out = Reciprocal.__new__(Reciprocal)
        out.inner = self.inner._compose(beta)
        out.floor = self.floor
        return out

    def __repr__(self):
        return f"Reciprocal({self.inner!r})"


def _merge_breakpoints(fns: Iterable[BoundedFunction]) -> np.ndarray:
    parts = [f.breakpoints for f in fns]
    parts = [p for p in parts if p.size]
    if not parts:
        return np.empty(0)
    return np.unique(np.concatenate(parts))


def _intersect_supports(fns: Iterable[BoundedFunction]):
    lo, hi = -math.inf, math.inf
    seen = False
    for f in fns:
        s = f.support
        if s is not None:
            seen = True
            lo, hi = max(lo, s[0]), min(hi, s[1])
    if not seen:
        return None
    if hi < lo:  # disjoint factor supports: the product is identically zero
        return (lo, lo)
    return (lo, hi)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def evaluate(f: BoundedFunction, x):
    """Pointwise value of the represented form (scalar or array x)."""
    return f(x)


def compose_homeo(f: BoundedFunction, alpha: Homeomorphism, n: int = 1) -> BoundedFunction:
    """f o alpha^n; node positions are mapped exactly, never resampled."""
    return f.compose(alpha, n)


def pointwise_product(f: BoundedFunction, g: BoundedFunction) -> Product:
    return Product((f, g))


def pointwise_sum(f: BoundedFunction, g: BoundedFunction) -> Sum:
    return Sum((f, g))


def sample_points(f: BoundedFunction, refine: int = DEFAULT_REFINE) -> np.ndarray:
    """Breakpoints of f plus ``refine`` uniform samples per linear segment.

    The grid is confined to the support when the function has one.
    """
    bps = f.breakpoints
    if f.support is not None:
        lo, hi = f.support
        bps = np.unique(np.concatenate([bps[(bps >= lo) & (bps <= hi)], [lo, hi]]))
    if bps.size == 0:
        return np.array([0.0])
    if bps.size == 1:
        return bps
    segs = [np.linspace(bps[i], bps[i + 1], refine + 1) for i in range(bps.size - 1)]
    return np.unique(np.concatenate(segs))


def abs_bounds(f: BoundedFunction, refine: int = DEFAULT_REFINE) -> tuple[float, float]:
    """(inf |f|, sup |f|) over the whole line.

    Exact for the linear forms; sampled between breakpoints for lazy
    products/sums, in which case the infimum may be overestimated and the
    supremum underestimated by at most the segment sampling error.
    """
    if isinstance(f, Constant):
        return (abs(f.value), abs(f.value))
    if isinstance(f, (PiecewiseLinear, CompactlySupportedFunction)):
        av = np.abs(f.vals)
        sup = float(av.max())
        if isinstance(f, CompactlySupportedFunction):
            return (0.0, sup)
        crossing = bool(np.any(f.vals[:-1] * f.vals[1:] < 0))
        inf = 0.0 if crossing else float(av.min())
        return (inf, sup)
    if isinstance(f, ClampedAffine):
        lt, rt = f.tails
        if f.a == 0.0:
            return (abs(lt), abs(lt))
        lo, hi = min(lt, rt), max(lt, rt)
        inf = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
        return (inf, max(abs(lo), abs(hi)))
    if isinstance(f, Reciprocal):
        i, s = abs_bounds(f.inner, refine)
        return (1.0 / s if s > 0 else 0.0, 1.0 / i)
    # lazy forms: sampled
    vals = np.abs(f(sample_points(f, refine)))
    lt, rt = f.tails
    sup = max(float(vals.max()), abs(lt), abs(rt))
    inf = min(float(vals.min()), abs(lt), abs(rt))
    if f.support is not None:
        inf = 0.0
    return (inf, sup)


def sup_norm(f: BoundedFunction, refine: int = DEFAULT_REFINE) -> float:
    """Sup of |f| over the line: exact for linear forms, sampled otherwise."""
    return abs_bounds(f, refine)[1]


# ---------------------------------------------------------------------------
# compact sets
# ---------------------------------------------------------------------------

class CompactSet:
    """Finite union of disjoint closed bounded intervals with a sample grid.

    ``density`` is the number of sample points per unit length; interval
    endpoints are always part of the grid.  Overlapping or touching input
    intervals are merged on construction.
    """

    __slots__ = ("intervals", "density")

    def __init__(self, intervals: Iterable[tuple[float, float]], density: int = 64):
        ivs = sorted((float(lo), float(hi)) for lo, hi in intervals)
        if not ivs:
            raise InvalidParameters("compact set needs at least one interval")
        if density < 1 or int(density) != density:
            raise InvalidParameters("sample density must be a positive integer")
        for lo, hi in ivs:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InvalidParameters("compact set intervals must be bounded")
            if lo > hi:
                raise InvalidParameters(f"interval [{lo}, {hi}] is empty")
        merged = [list(ivs[0])]
        for lo, hi in ivs[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        self.intervals = tuple((lo, hi) for lo, hi in merged)
        self.density = int(density)

    @classmethod
    def interval(cls, lo: float, hi: float, density: int = 64) -> "CompactSet":
        return cls([(lo, hi)], density)

    @classmethod
    def point(cls, x: float, density: int = 64) -> "CompactSet":
        return cls([(x, x)], density)

    @property
    def hull(self) -> tuple[float, float]:
        return (self.intervals[0][0], self.intervals[-1][1])

    @property
    def diameter(self) -> float:
        lo, hi = self.hull
        return hi - lo

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def grid(self) -> np.ndarray:
        parts = []
        for lo, hi in self.intervals:
            if hi == lo:
                parts.append(np.array([lo]))
            else:
                n = max(1, math.ceil((hi - lo) * self.density))
                parts.append(np.linspace(lo, hi, n + 1))
        return np.unique(np.concatenate(parts))

    def __repr__(self):
        return f"CompactSet({list(self.intervals)!r}, density={self.density})"


def sup_over_set(f: BoundedFunction, K: CompactSet) -> float:
    """Max of |f| over K's sample grid, interval endpoints and any
    breakpoints of f that fall inside K always included."""
    pts = [K.grid()]
    bps = f.breakpoints
    if bps.size:
        inside = bps[np.fromiter((K.contains(x) for x in bps), dtype=bool, count=bps.size)]
        if inside.size:
            pts.append(inside)
    grid = np.unique(np.concatenate(pts)) if len(pts) > 1 else pts[0]
    return float(np.abs(f(grid)).max())


# ---------------------------------------------------------------------------
# level-set regions
# ---------------------------------------------------------------------------

def _as_linear_data(f: BoundedFunction):
    """(xs, vals) node data for forms that are globally piecewise linear
    with constant tails, or None when only sampling is available."""
    if isinstance(f, Constant):
        return np.array([0.0]), np.array([f.value])
    if isinstance(f, (PiecewiseLinear, CompactlySupportedFunction)):
        return f.xs, f.vals
    if isinstance(f, ClampedAffine):
        if f.a == 0.0:
            c = min(max(f.b, f.lo), f.hi)
            return np.array([0.0]), np.array([c])
        xs = f.breakpoints
        return xs, f(xs)
    return None


def _merge_intervals(ivs: list[tuple[float, float]]) -> list[tuple[float, float]]:
    ivs = sorted(ivs)
    out: list[list[float]] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def _segment_ge(p, q, v0, v1, s):
    """Subintervals of [p, q] where the linear value v >= s (v0 at p, v1 at q)."""
    if v0 == v1:
        return [(p, q)] if v0 >= s else []
    t = p + (s - v0) * (q - p) / (v1 - v0)
    t = min(max(t, p), q)
    if v1 > v0:
        return [(t, q)] if v1 >= s else []
    return [(p, t)] if v0 >= s else []


def _segment_le(p, q, v0, v1, s):
    if v0 == v1:
        return [(p, q)] if v0 <= s else []
    t = p + (s - v0) * (q - p) / (v1 - v0)
    t = min(max(t, p), q)
    if v1 > v0:
        return [(p, t)] if v0 <= s else []
    return [(t, q)] if v1 <= s else []


def _linear_abs_region(xs, vals, s, mode):
    """Exact {|f| >= s} or {|f| <= s} for piecewise-linear node data."""
    out: list[tuple[float, float]] = []
    lt, rt = vals[0], vals[-1]
    if mode == "ge":
        cond_tail = lambda v: abs(v) >= s
    else:
        cond_tail = lambda v: abs(v) <= s
    if cond_tail(lt):
        out.append((-math.inf, xs[0]))
    if cond_tail(rt):
        out.append((xs[-1], math.inf))
    for i in range(len(xs) - 1):
        p, q = float(xs[i]), float(xs[i + 1])
        v0, v1 = float(vals[i]), float(vals[i + 1])
        if mode == "ge":
            # |v| >= s  <=>  v >= s or v <= -s
            pieces = _segment_ge(p, q, v0, v1, s) + _segment_ge(p, q, -v0, -v1, s)
            out.extend(pieces)
        else:
            # |v| <= s  <=>  v <= s and v >= -s
            upper = _segment_le(p, q, v0, v1, s)
            lower = _segment_le(p, q, -v0, -v1, s)
            for lo1, hi1 in upper:
                for lo2, hi2 in lower:
                    lo, hi = max(lo1, lo2), min(hi1, hi2)
                    if lo <= hi:
                        out.append((lo, hi))
    if len(xs) == 1 and cond_tail(vals[0]):
        out.append((-math.inf, math.inf))
    return _merge_intervals(out)


def _bisect_boundary(g, lo, hi, tol=1e-12, iters=200):
    """Root of the continuous g on [lo, hi] with g(lo)*g(hi) <= 0."""
    flo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = g(mid)
        if hi - lo <= tol:
            return mid
        if (flo <= 0) == (fm <= 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sampled_abs_region(f, s, mode, refine):
    grid = sample_points(f, max(refine, 64))
    lt, rt = f.tails
    vals = np.abs(f(grid))
    g = (lambda x: abs(f(x)) - s)
    if mode == "ge":
        ok = vals >= s
        tail_ok = lambda v: abs(v) >= s
    else:
        ok = vals <= s
        tail_ok = lambda v: abs(v) <= s
    out: list[tuple[float, float]] = []
    if tail_ok(lt):
        out.append((-math.inf, float(grid[0])))
    if tail_ok(rt):
        out.append((float(grid[-1]), math.inf))
    i = 0
    n = grid.size
    while i < n:
        if not ok[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and ok[j + 1]:
            j += 1
        lo = float(grid[i])
        hi = float(grid[j])
        if i > 0:
            lo = _bisect_boundary(g, float(grid[i - 1]), lo)
        if j + 1 < n:
            hi = _bisect_boundary(g, hi, float(grid[j + 1]))
        out.append((lo, hi))
        i = j + 1
    return _merge_intervals(out)


def region_abs_ge(f: BoundedFunction, s: float,
                  refine: int = DEFAULT_REFINE) -> list[tuple[float, float]]:
    """{x : |f(x)| >= s} as a sorted list of disjoint closed intervals.

    Exact interval arithmetic for the linear forms; sampled with boundary
    bisection for lazy products/sums.  Endpoints may be +-inf.
    """
    if s <= 0:
        return [(-math.inf, math.inf)]
    data = _as_linear_data(f)
    if data is not None:
        return _linear_abs_region(*data, s, "ge")
    if isinstance(f, Reciprocal):
        return region_abs_le(f.inner, 1.0 / s, refine)
    return _sampled_abs_region(f, s, "ge", refine)


def region_abs_le(f: BoundedFunction, s: float,
                  refine: int = DEFAULT_REFINE) -> list[tuple[float, float]]:
    """{x : |f(x)| <= s}, same representation and exactness as region_abs_ge."""
    if s < 0:
        return []
    data = _as_linear_data(f)
    if data is not None:
        return _linear_abs_region(*data, s, "le")
    if isinstance(f, Reciprocal):
        if s <= 0:
            return []
        return region_abs_ge(f.inner, 1.0 / s, refine)
    return _sampled_abs_region(f, s, "le", refine)
