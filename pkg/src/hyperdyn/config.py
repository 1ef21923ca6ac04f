"""Flat key = value experiment configurations.

A config file is a sequence of ``key = value`` lines (blank lines and lines
starting with ``#`` are ignored).  There is no nesting and no
programmability; every file parses into a fully validated in-memory plan
before any computation starts, and unknown keys are errors.  The grammar is
documented in the repository README.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, HyperdynError
from .funcspace import (
    BoundedFunction,
    ClampedAffine,
    CompactSet,
    CompactlySupportedFunction,
    Constant,
    Homeomorphism,
    PiecewiseLinear,
)
from .criteria import DEFAULT_R_MAX, DEFAULT_THRESHOLDS, mixing_weights
from .hilbert import WeightSequence

KINDS = ("criterion", "mixing", "multiplier", "witness", "segal-norm",
         "approx-identity", "c0-witness", "runaway")


@dataclass
class ExperimentConfig:
    kind: str
    raw_lines: list[tuple[str, str]]
    weights: WeightSequence | None = None
    alpha: Homeomorphism | None = None
    tau: BoundedFunction | None = None
    b: BoundedFunction | None = None
    f: CompactlySupportedFunction | None = None
    K: CompactSet | None = None
    I: tuple[int, ...] = ()
    u: dict[int, CompactlySupportedFunction] = field(default_factory=dict)
    v: dict[int, CompactlySupportedFunction] = field(default_factory=dict)
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    threshold: float = 1e-6
    r_window: int = 50
    r_max: int = DEFAULT_R_MAX
    n_max: int = 100
    r_values: tuple[int, ...] = ()
    decay_threshold: float = 1e-6
    rel_tol: float = 1e-8
    delta: float = 0.1
    eps: float = 0.5
    density: int = 64
    seed: int = 0


def _fail(msg, line=None, field=None):
    raise ConfigError(msg, line=line, field=field)


def _float(text, line, field):
    try:
        return float(text)
    except ValueError:
        _fail(f"expected a number, got {text!r}", line, field)


def _int(text, line, field):
    try:
        return int(text)
    except ValueError:
        _fail(f"expected an integer, got {text!r}", line, field)


def _float_list(text, line, field):
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        _fail("expected a comma-separated list of numbers", line, field)
    return tuple(_float(p.strip(), line, field) for p in parts)


def _int_list(text, line, field):
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        _fail("expected a comma-separated list of integers", line, field)
    return tuple(_int(p.strip(), line, field) for p in parts)


def _pairs(text, line, field):
    """Parse "(x1,v1),(x2,v2),..." into a list of float pairs."""
    text = text.strip()
    out = []
    depth = 0
    cur = ""
    chunks = []
    for ch in text:
        if ch == "(":
            depth += 1
            if depth == 1:
                cur = ""
                continue
        elif ch == ")":
            depth -= 1
            if depth == 0:
                chunks.append(cur)
                continue
        elif depth == 0:
            if ch in ", ":
                continue
            _fail(f"malformed pair list {text!r}", line, field)
        cur += ch
    if depth != 0:
        _fail(f"unbalanced parentheses in {text!r}", line, field)
    for chunk in chunks:
        parts = chunk.split(",")
        if len(parts) != 2:
            _fail(f"expected (x,value) pairs, got ({chunk})", line, field)
        out.append((_float(parts[0], line, field), _float(parts[1], line, field)))
    if not out:
        _fail("expected at least one (x,value) pair", line, field)
    return out


def _split_spec(text, line, field):
    head, sep, rest = text.partition(":")
    if not sep:
        _fail(f"expected '<form>:<args>', got {text!r}", line, field)
    return head.strip(), rest.strip()


def parse_bounded_function(text, line=None, field=None) -> BoundedFunction:
    """constant:<c> | pwlinear:(x,v),... | clamp:a,b,lo,hi"""
    head, rest = _split_spec(text, line, field)
    try:
        if head == "constant":
            return Constant(_float(rest, line, field))
        if head == "pwlinear":
            return PiecewiseLinear(_pairs(rest, line, field))
        if head == "clamp":
            a, b, lo, hi = _float_list(rest, line, field)
            return ClampedAffine(a, b, lo, hi)
    except HyperdynError as exc:
        _fail(str(exc), line, field)
    except ValueError:
        _fail(f"clamp needs exactly 4 numbers, got {rest!r}", line, field)
    _fail(f"unknown function form {head!r} (expected constant/pwlinear/clamp)",
          line, field)


def parse_supported_function(text, line=None, field=None) -> CompactlySupportedFunction:
    """tent:lo,peak,hi[,height] | nodes:(x,v),..."""
    head, rest = _split_spec(text, line, field)
    try:
        if head == "tent":
            vals = _float_list(rest, line, field)
            if len(vals) == 3:
                return CompactlySupportedFunction.tent(*vals)
            if len(vals) == 4:
                return CompactlySupportedFunction.tent(vals[0], vals[1], vals[2], vals[3])
            _fail("tent needs lo,peak,hi[,height]", line, field)
        if head == "nodes":
            return CompactlySupportedFunction(_pairs(rest, line, field))
    except HyperdynError as exc:
        _fail(str(exc), line, field)
    _fail(f"unknown function form {head!r} (expected tent/nodes)", line, field)


def parse_alpha(text, line=None, field=None) -> Homeomorphism:
    head, rest = _split_spec(text, line, field)
    try:
        if head == "translation":
            return Homeomorphism.translation(_float(rest, line, field))
        if head == "affine":
            vals = _float_list(rest, line, field)
            if len(vals) != 2:
                _fail("affine needs exactly a,b", line, field)
            return Homeomorphism.affine(*vals)
    except HyperdynError as exc:
        _fail(str(exc), line, field)
    _fail(f"unknown map form {head!r} (expected translation/affine)", line, field)


def parse_compact_set(text, density, line=None, field=None) -> CompactSet:
    intervals = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if not (part.startswith("[") and part.endswith("]")):
            _fail(f"expected [lo,hi], got {part!r}", line, field)
        nums = part[1:-1].split(",")
        if len(nums) != 2:
            _fail(f"expected [lo,hi], got {part!r}", line, field)
        intervals.append((_float(nums[0], line, field), _float(nums[1], line, field)))
    if not intervals:
        _fail("compact set needs at least one interval", line, field)
    try:
        return CompactSet(intervals, density)
    except HyperdynError as exc:
        _fail(str(exc), line, field)


# keys accepted per kind (beyond the ones every kind accepts)
_COMMON = {"kind", "seed", "refine", "density"}
_KEYS = {
    "criterion": {"weights", "alpha", "K", "I", "thresholds", "r_max"},
    "mixing": {"weights", "alpha", "K", "I", "threshold", "r_window", "r_max"},
    "multiplier": {"b", "alpha", "K", "thresholds", "n_max"},
    "witness": {"weights", "alpha", "r_values", "decay_threshold"},
    "segal-norm": {"f", "tau", "rel_tol"},
    "approx-identity": {"f", "tau", "delta", "rel_tol"},
    "c0-witness": {"weights", "alpha", "tau", "r_values", "decay_threshold", "rel_tol"},
    "runaway": {"alpha", "K", "n_max"},
}
_REQUIRED = {
    "criterion": {"weights", "alpha", "K", "I"},
    "mixing": {"weights", "alpha", "K", "I"},
    "multiplier": {"b", "alpha", "K"},
    "witness": {"weights", "alpha", "r_values"},
    "segal-norm": {"f", "tau"},
    "approx-identity": {"f", "tau", "delta"},
    "c0-witness": {"weights", "alpha", "tau", "r_values"},
    "runaway": {"alpha", "K"},
}
_VECTOR_KINDS = {"witness", "c0-witness"}
_TABLE_WEIGHT_KEYS = {"weight.pos", "weight.neg"}


def _parse_weights(value, entries, lines, field="weights") -> WeightSequence:
    line = lines.get(field)
    head, _, rest = value.partition(":")
    head = head.strip()
    try:
        if head == "constant":
            return WeightSequence.constant(_float(rest, line, field))
        if head == "mixing":
            params = {}
            for part in rest.split(","):
                k, sep, v = part.partition("=")
                if not sep:
                    _fail(f"mixing weights need M=...,eps=..., got {part!r}", line, field)
                params[k.strip()] = _float(v.strip(), line, field)
            extra = set(params) - {"M", "eps"}
            if extra or set(params) != {"M", "eps"}:
                _fail(f"mixing weights take exactly M and eps, got {sorted(params)}",
                      line, field)
            return mixing_weights(params["M"], params["eps"])
        if head == "table":
            table = {}
            for key, (text, ln) in entries.items():
                if key in _TABLE_WEIGHT_KEYS:
                    continue
                j = _int(key.split(".", 1)[1], ln, key)
                table[j] = parse_bounded_function(text, ln, key)
            if "weight.pos" not in entries or "weight.neg" not in entries:
                _fail("table weights need weight.pos and weight.neg defaults",
                      line, field)
            pos = parse_bounded_function(*entries["weight.pos"], field="weight.pos")
            neg = parse_bounded_function(*entries["weight.neg"], field="weight.neg")
            return WeightSequence(table, pos, neg)
    except HyperdynError as exc:
        if isinstance(exc, ConfigError):
            raise
        _fail(str(exc), line, field)
    _fail(f"unknown weights form {head!r} (expected constant/mixing/table)",
          line, field)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a config; raises ConfigError with line/field
    diagnostics on any problem."""
    pairs: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            _fail(f"expected 'key = value', got {stripped!r}", line=lineno)
        pairs.append((key.strip(), value.strip(), lineno))

    seen: dict[str, tuple[str, int]] = {}
    for key, value, lineno in pairs:
        if key in seen:
            _fail(f"duplicate key {key!r}", line=lineno, field=key)
        seen[key] = (value, lineno)

    if "kind" not in seen:
        _fail("missing required key 'kind'")
    kind = seen["kind"][0]
    if kind not in KINDS:
        _fail(f"unknown kind {kind!r}; expected one of {KINDS}",
              line=seen["kind"][1], field="kind")

    allowed = _COMMON | _KEYS[kind]
    weight_entries = {}
    vector_entries: dict[str, dict[int, tuple[str, int]]] = {"u": {}, "v": {}}
    for key, (value, lineno) in seen.items():
        if key in allowed:
            continue
        if key.startswith("weight.") and "weights" in _KEYS[kind]:
            weight_entries[key] = (value, lineno)
            continue
        head, _, idx = key.partition(".")
        if head in ("u", "v") and kind in _VECTOR_KINDS and idx:
            vector_entries[head][_int(idx, lineno, key)] = (value, lineno)
            continue
        _fail(f"unknown key {key!r} for kind {kind!r}", line=lineno, field=key)

    lines = {k: v[1] for k, v in seen.items()}
    cfg = ExperimentConfig(kind=kind, raw_lines=[(k, v) for k, v, _ in pairs])

    if "seed" in seen:
        cfg.seed = _int(*seen["seed"], "seed")
    if "density" in seen:
        cfg.density = _int(*seen["density"], "density")
        if cfg.density < 1:
            _fail("density must be a positive integer", lines["density"], "density")

    for req in _REQUIRED[kind]:
        if req not in seen:
            _fail(f"kind {kind!r} requires key {req!r}", field=req)

    if "alpha" in seen:
        cfg.alpha = parse_alpha(*seen["alpha"], field="alpha")
    if "K" in seen:
        cfg.K = parse_compact_set(seen["K"][0], cfg.density, lines["K"], "K")
    if "I" in seen:
        cfg.I = _int_list(*seen["I"], "I")
    if "weights" in seen:
        cfg.weights = _parse_weights(seen["weights"][0], weight_entries, lines)
    if "tau" in seen:
        cfg.tau = parse_bounded_function(*seen["tau"], field="tau")
    if "b" in seen:
        cfg.b = parse_bounded_function(*seen["b"], field="b")
    if "f" in seen:
        cfg.f = parse_supported_function(*seen["f"], field="f")
    if "thresholds" in seen:
        cfg.thresholds = _float_list(*seen["thresholds"], "thresholds")
    if "threshold" in seen:
        cfg.threshold = _float(*seen["threshold"], "threshold")
    if "r_window" in seen:
        cfg.r_window = _int(*seen["r_window"], "r_window")
    if "r_max" in seen:
        cfg.r_max = _int(*seen["r_max"], "r_max")
    if "n_max" in seen:
        cfg.n_max = _int(*seen["n_max"], "n_max")
    if "r_values" in seen:
        cfg.r_values = _int_list(*seen["r_values"], "r_values")
        if any(r < 1 for r in cfg.r_values):
            _fail("r_values must be positive", lines["r_values"], "r_values")
        if list(cfg.r_values) != sorted(set(cfg.r_values)):
            _fail("r_values must be strictly increasing", lines["r_values"], "r_values")
    if "decay_threshold" in seen:
        cfg.decay_threshold = _float(*seen["decay_threshold"], "decay_threshold")
    if "rel_tol" in seen:
        cfg.rel_tol = _float(*seen["rel_tol"], "rel_tol")
    if "delta" in seen:
        cfg.delta = _float(*seen["delta"], "delta")

    if kind in _VECTOR_KINDS:
        for name in ("u", "v"):
            for j, (value, lineno) in vector_entries[name].items():
                cfg.__dict__[name][j] = parse_supported_function(value, lineno, f"{name}.{j}")
        if not cfg.u and not cfg.v:
            _fail(f"kind {kind!r} needs at least one u.<j> or v.<j> entry")
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
