"""Finitely supported sequences measured in shifted series norms.

Entry j of such a sequence lives in the algebra weighted by tau o alpha^j,
and the sequence norm is the sup of the per-entry shifted norms

    ||s||_0 = sup_j ||s_j||_{tau o alpha^j}.

The same weighted shift that acts on module vectors acts here; the exact
norm-transport identity ||f o alpha||_{tau o alpha^{k+1}} = ||f||_{tau o
alpha^k} makes the unweighted shift an isometry for this norm, and the
decay of the witness distances is governed by the same orbit products as
in the module-norm case, weighted through the series norms.
"""

from __future__ import annotations

from typing import Mapping

from .errors import InvalidParameters, NotInDenseSet
from .funcspace import DEFAULT_REFINE, BoundedFunction, Homeomorphism
from .hilbert import (
    WeightSequence,
    WitnessResult,
    _combine,
    _inverse_shift_entries,
    _shift_entries,
)
from .segal import (
    DEFAULT_REL_TOL,
    _tau_fn,
    membership_check,
    shifted_norm,
)


class C0TauVector:
    """Finitely supported map j -> compactly supported function, certified
    entrywise against the shifted weights tau o alpha^j."""

    __slots__ = ("entries", "tau", "alpha")

    def __init__(self, entries: Mapping[int, BoundedFunction], tau,
                 alpha: Homeomorphism, check: bool = True,
                 refine: int = DEFAULT_REFINE):
        kept: dict[int, BoundedFunction] = {}
        for j, f in entries.items():
            if f.is_zero:
                continue
            if f.support is None:
                raise InvalidParameters(f"entry {j} has no compact support")
            kept[int(j)] = f
        self.entries = dict(sorted(kept.items()))
        self.tau = _tau_fn(tau)
        self.alpha = alpha
        if check:
            self.certify(refine)

    def certify(self, refine: int = DEFAULT_REFINE) -> None:
        for j, f in self.entries.items():
            res = membership_check(f, self.tau.compose(self.alpha, j), refine)
            if not res:
                raise NotInDenseSet(
                    f"entry {j} is not supported inside the shifted sublevel set "
                    f"(witness x={res.witness})")

    @classmethod
    def empty(cls, tau, alpha: Homeomorphism) -> "C0TauVector":
        return cls({}, tau, alpha)

    @classmethod
    def single(cls, j: int, f: BoundedFunction, tau, alpha: Homeomorphism) -> "C0TauVector":
        return cls({j: f}, tau, alpha)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def _replace(self, entries, check=False) -> "C0TauVector":
        return C0TauVector(entries, self.tau, self.alpha, check=check)

    def add(self, other: "C0TauVector") -> "C0TauVector":
        return self._replace(_combine(self.entries, other.entries, negate=False))

    def sub(self, other: "C0TauVector") -> "C0TauVector":
        return self._replace(_combine(self.entries, other.entries, negate=True))

    def __repr__(self):
        return f"C0TauVector({self.entries!r})"


def c0_norm(s: C0TauVector, rel_tol: float = DEFAULT_REL_TOL,
            refine: int = DEFAULT_REFINE) -> float:
    """sup over stored entries of the shifted series norms."""
    if s.is_empty:
        return 0.0
    return max(shifted_norm(f, s.tau, s.alpha, j, rel_tol, refine).value
               for j, f in s.entries.items())


def apply_shift_c0(s: C0TauVector, W: WeightSequence, n: int,
                   recertify: bool = False) -> C0TauVector:
    """Weighted shift acting on the sequence, same formula as on module
    vectors.  Entry memberships in the new shifted algebras follow from the
    norm-transport identity plus boundedness of the weights, so by default
    they are not recomputed; pass recertify=True to verify numerically.
    """
    if n < 1:
        raise InvalidParameters("shift power n must be a positive integer")
    out = _shift_entries(s.entries, W, s.alpha, n)
    return C0TauVector(out, s.tau, s.alpha, check=recertify)


def c0_witness(u: C0TauVector, v: C0TauVector, W: WeightSequence, r: int,
               rel_tol: float = DEFAULT_REL_TOL,
               refine: int = DEFAULT_REFINE) -> WitnessResult:
    """Transitivity witness x = u + S^r v measured in the sequence norm.

    d_start = ||x - u||_0 and d_end = ||T^r x - v||_0, with the dense-set
    condition (entries supported inside the shifted sublevel regions)
    rechecked on both inputs.
    """
    if r < 1:
        raise InvalidParameters("witness step r must be a positive integer")
    W.require_invertible()
    if (u.alpha.a, u.alpha.b) != (v.alpha.a, v.alpha.b):
        raise InvalidParameters("witness inputs must share the same homeomorphism")
    for name, vec in (("u", u), ("v", v)):
        try:
            vec.certify(refine)
        except NotInDenseSet as exc:
            raise NotInDenseSet(f"{name}: {exc}") from None
    if u.is_empty and v.is_empty:
        return WitnessResult(C0TauVector.empty(u.tau, u.alpha), 0.0, 0.0)
    if v.is_empty:
        pulled = v
    else:
        pulled = u._replace(_inverse_shift_entries(v.entries, W, u.alpha, r))
    x = u.add(pulled)
    d_start = c0_norm(x.sub(u), rel_tol, refine)
    shifted = apply_shift_c0(x, W, r)
    d_end = c0_norm(shifted.sub(v), rel_tol, refine)
    return WitnessResult(x, d_start, d_end)
