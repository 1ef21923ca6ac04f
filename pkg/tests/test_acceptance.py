"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion
lines; every tolerance is pinned here and nowhere else.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from hyperdyn.c0space import C0TauVector, apply_shift_c0, c0_norm, c0_witness
from hyperdyn.cli import main
from hyperdyn.criteria import (
    FULL_SEQUENCE_DECAY,
    SUBSEQUENCE_FOUND,
    check_mixing,
    find_subsequence,
    mixing_weights,
    multiplier_products,
    runaway_check,
    witness_decay_bounds,
)
from hyperdyn.funcspace import (
    CompactSet,
    CompactlySupportedFunction,
    Constant,
    Homeomorphism,
    PiecewiseLinear,
    region_abs_ge,
    sup_norm,
)
from hyperdyn.hilbert import (
    ModuleVector,
    WeightSequence,
    apply_inverse_multiplier,
    apply_inverse_shift,
    apply_multiplier,
    apply_shift,
    module_norm,
    transitivity_witness,
)
from hyperdyn.segal import approximate_identity, segal_norm, shifted_norm

TENT = CompactlySupportedFunction.tent(-1.0, 0.0, 1.0)
SHIFT1 = Homeomorphism.translation(1.0)
LADDER = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def report(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def random_member(rng, lo=-24, hi=24, denom=8):
    while True:
        xs = sorted({rng.randrange(lo, hi) / denom for _ in range(rng.randint(3, 5))})
        if len(xs) >= 3:
            break
    vals = [0.0] + [rng.uniform(-2.0, 2.0) for _ in xs[1:-1]] + [0.0]
    if max(abs(v) for v in vals) == 0.0:
        vals[1] = 1.0
    return CompactlySupportedFunction(zip(xs, vals))


def random_invertible_weights(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return WeightSequence.constant(rng.choice([0.5, 0.75, 1.5, 2.0]))
    if kind == 1:
        return mixing_weights(4.0, 0.5)
    table = {j: Constant(rng.choice([0.5, 1.0, 2.0])) for j in range(-2, 3)}
    return WeightSequence(table, Constant(1.25), Constant(0.75))


def nodes_error(f, g):
    xs = np.unique(np.concatenate([np.asarray(f.breakpoints, float),
                                   np.asarray(g.breakpoints, float)]))
    return float(np.max(np.abs(f(xs) - g(xs))))


def fit_slope(rs, logs):
    return float(np.polyfit(rs, logs, 1)[0])


# ---------------------------------------------------------------------------
# 1. criterion reproduction on the concrete mixing family
# ---------------------------------------------------------------------------

def test_criterion_1_decay_criterion_reproduction():
    W = mixing_weights(4.0, 0.5)
    K = CompactSet.interval(-2.0, 2.0, density=64)
    start = time.perf_counter()
    rep = find_subsequence(W, SHIFT1, [1, 2], K, LADDER, r_max=200)
    mix = check_mixing(W, SHIFT1, [1, 2], K, threshold=1e-6, r_window=50, r_max=200)
    elapsed = time.perf_counter() - start

    found = rep.verdict == SUBSEQUENCE_FOUND and rep.subsequence[-1] <= 200
    mixing_ok = mix.verdict == FULL_SEQUENCE_DECAY

    window = [row for row in rep.trace if 50 <= row.r <= 200]
    rs = np.array([row.r for row in window])
    slope_f = fit_slope(rs, [math.log10(row.forward_sup) for row in window])
    slope_b = fit_slope(rs, [math.log10(row.backward_sup) for row in window])
    want_f, want_b = math.log10(0.5), -math.log10(1.5)
    slopes_ok = (abs(slope_f - want_f) <= 0.05 * abs(want_f)
                 and abs(slope_b - want_b) <= 0.05 * abs(want_b))
    bounds_ok = all(
        row.forward_sup <= 1.5 ** 3 * 0.5 ** (row.r - 3) + 1e-15
        and row.backward_sup <= 2.0 ** 3 * (1 / 1.5) ** (row.r - 3) + 1e-15
        for row in rep.trace)
    fast = elapsed < 5.0
    report(1, found and mixing_ok and slopes_ok and bounds_ok and fast,
           f"subsequence at r={rep.subsequence}, mixing={mix.verdict}, "
           f"slopes ({slope_f:.5f}, {slope_b:.5f}) vs ({want_f:.5f}, {want_b:.5f}), "
           f"{elapsed:.2f} s")


# ---------------------------------------------------------------------------
# 2. constructive transitivity bound chain
# ---------------------------------------------------------------------------

def test_criterion_2_witness_bound_chain():
    W = mixing_weights(4.0, 0.5)
    u = ModuleVector.single(0, TENT)
    v = ModuleVector.single(0, TENT)
    ok = True
    detail = []
    for r in range(10, 101, 10):
        res = transitivity_witness(u, v, W, SHIFT1, r)
        bound_f, bound_b = witness_decay_bounds(u, v, W, SHIFT1, r)
        ok &= res.d_end <= bound_f + 1e-12
        ok &= res.d_start <= bound_b + 1e-12
        if r == 100:
            detail.append(f"r=100: d_end={res.d_end:.3g} <= {bound_f + 1e-12:.3g}, "
                          f"d_start={res.d_start:.3g} <= {bound_b + 1e-12:.3g}")
    final = transitivity_witness(u, v, W, SHIFT1, 120)
    decayed = final.d_start < 1e-6 and final.d_end < 1e-6
    report(2, ok and decayed,
           "; ".join(detail) + f"; r=120: d_start={final.d_start:.3g}, "
           f"d_end={final.d_end:.3g} (< 1e-6)")


# ---------------------------------------------------------------------------
# 3. inverse roundtrips
# ---------------------------------------------------------------------------

def test_criterion_3_shift_and_multiplier_roundtrips():
    rng = random.Random(12345)
    worst = 0.0
    for _ in range(100):
        entries = {j: random_member(rng)
                   for j in rng.sample(range(-3, 4), rng.randint(1, 3))}
        a = ModuleVector(entries)
        W = random_invertible_weights(rng)
        alpha = Homeomorphism.affine(rng.choice([0.5, 1.0, 2.0, -1.0]),
                                     rng.randrange(-8, 9) / 4)
        n = rng.randint(1, 10)
        st = apply_inverse_shift(apply_shift(a, W, alpha, n), W, alpha, n)
        ts = apply_shift(apply_inverse_shift(a, W, alpha, n), W, alpha, n)
        for j, f in a.entries.items():
            worst = max(worst, nodes_error(st.entries[j], f),
                        nodes_error(ts.entries[j], f))
    worst_m = 0.0
    for _ in range(100):
        f = random_member(rng)
        b = rng.choice([Constant(rng.choice([0.5, 1.5, 2.0])),
                        PiecewiseLinear([(-1.0, 1.5), (0.0, 0.5)])])
        alpha = Homeomorphism.affine(rng.choice([0.5, 1.0, 2.0, -1.0]),
                                     rng.randrange(-8, 9) / 4)
        n = rng.randint(1, 10)
        vu = apply_inverse_multiplier(apply_multiplier(f, b, alpha, n), b, alpha, n)
        uv = apply_multiplier(apply_inverse_multiplier(f, b, alpha, n), b, alpha, n)
        worst_m = max(worst_m, nodes_error(vu, f), nodes_error(uv, f))
    report(3, worst <= 1e-9 and worst_m <= 1e-9,
           f"100 shift roundtrips worst node error {worst:.3g}, "
           f"100 multiplier roundtrips worst {worst_m:.3g} (<= 1e-9)")


# ---------------------------------------------------------------------------
# 4. norm inequalities
# ---------------------------------------------------------------------------

def test_criterion_4_norm_inequalities():
    rng = random.Random(777)
    coord_violations = 0
    op_violations = 0
    for _ in range(200):
        entries = {j: random_member(rng)
                   for j in rng.sample(range(-4, 5), rng.randint(1, 4))}
        a = ModuleVector(entries)
        norm = module_norm(a)
        for f in a.entries.values():
            if sup_norm(f) > norm + 1e-12:
                coord_violations += 1
        W = random_invertible_weights(rng)
        if module_norm(apply_shift(a, W, SHIFT1, 1)) > W.bound * norm + 1e-9:
            op_violations += 1
    report(4, coord_violations == 0 and op_violations == 0,
           f"200 vectors: {coord_violations} coordinate-bound violations, "
           f"{op_violations} operator-bound violations")


# ---------------------------------------------------------------------------
# 5. series norm vs oracles
# ---------------------------------------------------------------------------

def test_criterion_5_series_norm_oracles():
    res = segal_norm(TENT, Constant(0.5), rel_tol=1e-8)
    geometric_ok = 2.0 - 1e-6 <= res.value <= 2.0 + 1e-6

    vee = PiecewiseLinear([(-4.0, 1.0), (0.0, 0.0), (4.0, 1.0)])
    got = segal_norm(TENT, vee, rel_tol=1e-8).value
    xs = np.linspace(-1.0, 1.0, 20001)
    F = np.abs(1.0 - np.abs(xs))
    T = np.abs(xs) / 4.0
    oracle = float(F.max())
    P = F.copy()
    for _ in range(60):
        P = P * T
        oracle += float(P.max())
    grid_ok = abs(got - oracle) <= 1e-4 * oracle
    report(5, geometric_ok and grid_ok,
           f"geometric value {res.value:.9f} in [2-1e-6, 2+1e-6]; "
           f"grid oracle {oracle:.9f} vs {got:.9f} "
           f"(rel {abs(got - oracle) / oracle:.2e} <= 1e-4)")


# ---------------------------------------------------------------------------
# 6. norm transport isometry
# ---------------------------------------------------------------------------

def test_criterion_6_norm_transport():
    rng = random.Random(31415)
    taus = [Constant(0.5),
            PiecewiseLinear([(-3.0, 0.9), (0.0, 0.0), (3.0, 0.9)]),
            PiecewiseLinear([(-2.0, 0.85), (2.0, 0.1)])]
    violations = 0
    worst = 0.0
    for _ in range(100):
        f = random_member(rng)
        tau = taus[rng.randrange(len(taus))]
        alpha = Homeomorphism.affine(rng.choice([0.5, 1.0, 2.0, -1.0]),
                                     rng.randrange(-4, 5) / 4)
        k = rng.randrange(-10, 11)
        lhs = shifted_norm(f.compose(alpha, 1), tau, alpha, k + 1).value
        rhs = shifted_norm(f, tau, alpha, k).value
        err = abs(lhs - rhs)
        worst = max(worst, err / (1.0 + rhs))
        if err > 1e-9 * (1.0 + rhs):
            violations += 1
    report(6, violations == 0,
           f"100 transported norms, 0 expected violations, got {violations} "
           f"(worst relative deviation {worst:.3g})")


# ---------------------------------------------------------------------------
# 7. approximate identity
# ---------------------------------------------------------------------------

def _bump_conclusions_hold(mu, spec, tau):
    for lo, hi in spec.K.intervals:
        idx = (mu.xs >= lo) & (mu.xs <= hi)
        if not np.all(mu.vals[idx] == 1.0):
            return False
        if mu(lo) != 1.0 or mu(hi) != 1.0:
            return False
    lo, hi = mu.support
    if lo < -spec.N - 1.0 or hi > spec.N + 1.0:
        return False
    bad = region_abs_ge(tau, spec.eps1)
    for k in range(len(mu.xs) - 1):
        if mu.vals[k] == 0.0 and mu.vals[k + 1] == 0.0:
            continue
        x0, x1 = mu.xs[k], mu.xs[k + 1]
        for blo, bhi in bad:
            if x0 < bhi and blo < x1:
                return False
    return True


def test_criterion_7_approximate_identity():
    rng = random.Random(271828)
    taus = [Constant(0.5),
            PiecewiseLinear([(-4.0, 1.0), (0.0, 0.0), (4.0, 1.0)]),
            PiecewiseLinear([(-3.0, 0.9), (3.0, 0.05)])]
    built = 0
    all_ok = True
    worst_margin = math.inf
    while built < 50:
        f = random_member(rng, lo=-10, hi=10, denom=4)
        tau = taus[rng.randrange(len(taus))]
        for delta in (0.1, 0.01):
            res = approximate_identity(f, tau, delta)
            all_ok &= res.achieved < delta
            all_ok &= _bump_conclusions_hold(res.mu, res.bump_spec, tau)
            worst_margin = min(worst_margin, delta - res.achieved)
        built += 1
    report(7, all_ok,
           f"50 members x deltas (0.1, 0.01): every bound met, "
           f"tightest margin {worst_margin:.3g}; bump conclusions verified exactly")


# ---------------------------------------------------------------------------
# 8. runaway condition
# ---------------------------------------------------------------------------

def _rational_runaway(c: Fraction, intervals, n_max):
    last = 0
    for n in range(1, n_max + 1):
        shift = n * c
        disjoint = all(not (lo1 - shift <= hi2 and lo2 <= hi1 - shift)
                       for lo1, hi1 in intervals for lo2, hi2 in intervals)
        if not disjoint:
            last = n
    return last + 1 if last < n_max else None


def test_criterion_8_runaway_condition():
    basic = runaway_check(SHIFT1, CompactSet.interval(0.0, 1.0), 10).N == 2
    ident = runaway_check(Homeomorphism.affine(1.0, 0.0),
                          CompactSet.interval(0.0, 1.0), 10).N is None
    rng = random.Random(4242)
    agree = 0
    for _ in range(50):
        c = Fraction(rng.randrange(-16, 17) or 4, 8)
        ivs = []
        start = Fraction(rng.randrange(-8, 8), 4)
        for _ in range(rng.randint(1, 3)):
            width = Fraction(rng.randrange(0, 9), 4)
            ivs.append((start, start + width))
            start += width + Fraction(rng.randrange(1, 9), 4)
        K = CompactSet([(float(lo), float(hi)) for lo, hi in ivs])
        got = runaway_check(Homeomorphism.translation(float(c)), K, 40).N
        if got == _rational_runaway(c, ivs, 40):
            agree += 1
    report(8, basic and ident and agree == 50,
           f"unit translation N=2, identity fails, {agree}/50 randomized "
           f"translations agree with the exact rational oracle")


# ---------------------------------------------------------------------------
# 9. multiplier criterion
# ---------------------------------------------------------------------------

def test_criterion_9_multiplier_criterion():
    b = PiecewiseLinear([(-1.0, 1.5), (0.0, 0.5)])
    K = CompactSet.interval(0.0, 1.0)
    f = CompactlySupportedFunction.tent(0.0, 0.5, 1.0)
    crossed_f = crossed_b = None
    orbit_ok = True
    for n in range(1, 101):
        fwd, bwd = multiplier_products(b, SHIFT1, K, n)
        if crossed_f is None and fwd < 1e-6:
            crossed_f = n
        if crossed_b is None and bwd < 1e-6:
            crossed_b = n
        if sup_norm(apply_multiplier(f, b, SHIFT1, n)) > fwd * sup_norm(f) + 1e-12:
            orbit_ok = False
    report(9, crossed_f is not None and crossed_b is not None and orbit_ok,
           f"forward < 1e-6 at n={crossed_f}, backward < 1e-6 at n={crossed_b} "
           f"(both <= 100); orbit sup norms below the product bound at every n")


# ---------------------------------------------------------------------------
# 10. bridge between the module norm and the sequence norm
# ---------------------------------------------------------------------------

def test_criterion_10_c0_bridge():
    tau = Constant(0.5)
    W1 = WeightSequence.constant(1.0)
    s = C0TauVector({0: TENT}, tau, SHIFT1)
    drift = abs(c0_norm(apply_shift_c0(s, W1, 1)) - c0_norm(s))
    invariant_ok = drift <= 1e-9

    W = mixing_weights(4.0, 0.5)
    u2 = ModuleVector.single(0, TENT)
    uc = C0TauVector({0: TENT}, tau, SHIFT1)
    rs = (80, 120, 160, 200)
    l2_start, c0_start, l2_fwd, c0_fwd = [], [], [], []
    for r in rs:
        l2_start.append(transitivity_witness(u2, u2, W, SHIFT1, r).d_start)
        c0_start.append(c0_witness(uc, uc, W, r).d_start)
        l2_fwd.append(module_norm(apply_shift(u2, W, SHIFT1, r)))
        c0_fwd.append(c0_norm(apply_shift_c0(uc, W, r)))
    rates_ok = True
    pairs = []
    for seq_a, seq_b in ((l2_start, c0_start), (l2_fwd, c0_fwd)):
        for i in range(len(rs) - 1):
            dr = rs[i + 1] - rs[i]
            ra = (seq_a[i + 1] / seq_a[i]) ** (1.0 / dr)
            rb = (seq_b[i + 1] / seq_b[i]) ** (1.0 / dr)
            pairs.append((ra, rb))
            rates_ok &= abs(ra - rb) <= 0.1 * ra
    report(10, invariant_ok and rates_ok,
           f"unit-weight norm drift {drift:.3g} (<= 1e-9); per-step decay rates "
           f"agree within 10%: " + ", ".join(f"({a:.4f} ~ {b:.4f})" for a, b in pairs))


# ---------------------------------------------------------------------------
# 11. determinism of the experiment runner
# ---------------------------------------------------------------------------

def test_criterion_11_deterministic_csv(tmp_path):
    cfg = tmp_path / "crit.cfg"
    cfg.write_text(
        "kind = criterion\n"
        "weights = mixing:M=4,eps=0.5\n"
        "alpha = translation:1\n"
        "K = [-2,2]\n"
        "I = 1,2\n"
        "r_max = 120\n")
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["run", str(cfg), "--out", str(out), "--seed", "9",
                     "--no-plot"]) == 0
        outs.append((out / "crit_trace.csv").read_bytes())
    identical = outs[0] == outs[1]
    report(11, identical,
           f"two runs with seed 9 produced byte-identical CSV "
           f"({len(outs[0])} bytes)")
