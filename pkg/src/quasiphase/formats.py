"""State specifications and map export (CSV, JSON, PGM).

CSV values are written with 17 significant digits and JSON numbers with
Python's shortest round-trip ``repr``; both reproduce the stored doubles
exactly when read back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .fock_core import StateVector, TruncatedFockSpace, coherent_state, number_state, required_dim
from .quasiprob import GridSpec, QuasiDistributionMap

__all__ = [
    "StateSpec",
    "parse_complex",
    "FORMATS",
    "export_map",
    "to_csv",
    "to_json",
    "to_pgm",
    "read_csv",
    "read_json",
]

FORMATS = ("csv", "json", "pgm")
STATE_KINDS = ("fock", "coherent", "cat-even", "cat-odd", "superposition")


def parse_complex(text):
    """Parse '0.5', '-1+2j', '0.3-0.4i' or '1j' into a complex number."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        value = complex(cleaned)
    except ValueError:
        raise ValidationError(f"cannot parse complex number {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValidationError(f"complex number {text!r} is not finite")
    return value


@dataclass(frozen=True)
class StateSpec:
    """Initial-state description, e.g. ``fock:2``, ``coherent:0.5+0.2j``,
    ``cat-even:1``, ``cat-odd:1`` or ``superposition:1,0,0.5j`` (Fock amplitudes)."""

    kind: str
    params: tuple
    dim: int | None = None

    @classmethod
    def parse(cls, text, dim=None):
        kind, sep, rest = text.strip().partition(":")
        kind = kind.lower()
        if kind not in STATE_KINDS:
            raise ValidationError(f"unknown state kind {kind!r}; expected one of {', '.join(STATE_KINDS)}")
        if not sep or not rest:
            raise ValidationError(f"state {text!r} is missing its parameter (e.g. {kind}:1)")
        if kind == "fock":
            try:
                n = int(rest)
            except ValueError:
                raise ValidationError(f"Fock index must be an integer, got {rest!r}") from None
            if n < 0:
                raise ValidationError(f"Fock index must be nonnegative, got {n}")
            params = (n,)
        elif kind == "superposition":
            params = tuple(parse_complex(w) for w in rest.split(","))
            if all(w == 0 for w in params):
                raise ValidationError("superposition weights are all zero")
        else:
            params = (parse_complex(rest),)
        return cls(kind, params, dim)

    @property
    def radius(self):
        """Rough phase-space extent of the state, used to pick a default cutoff."""
        if self.kind == "fock":
            return math.sqrt(self.params[0] + 1)
        if self.kind == "superposition":
            return math.sqrt(len(self.params))
        return abs(self.params[0])

    def default_dim(self, alpha_abs=0.0, floor=64):
        if self.dim is not None:
            return self.dim
        need = required_dim(alpha_abs + self.radius)
        if self.kind == "fock":
            need = max(need, self.params[0] + 3)
        if self.kind == "superposition":
            need = max(need, len(self.params) + 2)
        return max(floor, need)

    def build(self, space=None):
        space = space or TruncatedFockSpace(self.default_dim())
        if self.kind == "fock":
            return number_state(space, self.params[0])
        if self.kind == "coherent":
            return coherent_state(space, self.params[0])
        if self.kind in ("cat-even", "cat-odd"):
            gamma = self.params[0]
            if gamma == 0 and self.kind == "cat-odd":
                raise ValidationError("odd cat state with gamma=0 is the zero vector")
            plus = coherent_state(space, gamma).amplitudes
            minus = coherent_state(space, -gamma).amplitudes
            sign = 1.0 if self.kind == "cat-even" else -1.0
            return StateVector.normalized(space, plus + sign * minus)
        if len(self.params) > space.dim:
            raise ValidationError(f"superposition has {len(self.params)} weights but dim={space.dim}")
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[: len(self.params)] = self.params
        return StateVector.normalized(space, amps)

    def __str__(self):
        if self.kind == "fock":
            return f"fock:{self.params[0]}"
        if self.kind == "superposition":
            return "superposition:" + ",".join(_fmt_complex(w) for w in self.params)
        return f"{self.kind}:{_fmt_complex(self.params[0])}"


def _fmt_complex(z):
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    return repr(z).strip("()")


def _unpack(obj):
    """Return (map, report-or-None)."""
    if isinstance(obj, QuasiDistributionMap):
        return obj, None
    recon = getattr(obj, "reconstructed", None)
    if isinstance(recon, QuasiDistributionMap):
        return recon, obj
    raise ValidationError(f"cannot export object of type {type(obj).__name__}")


def _g17(x):
    return format(float(x), ".17g")


def to_csv(obj):
    qmap, report = _unpack(obj)
    stderr = None if report is None else report.stderr
    lines = ["re_alpha,im_alpha,value" + (",stderr" if stderr is not None else "")]
    flat_err = None if stderr is None else np.ravel(stderr)
    for i, (alpha, v) in enumerate(zip(qmap.grid.points(), np.ravel(qmap.values))):
        row = [_g17(alpha.real), _g17(alpha.imag), _g17(v)]
        if flat_err is not None:
            row.append(_g17(flat_err[i]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def to_json(obj, calibrated_sign=None):
    qmap, report = _unpack(obj)
    if calibrated_sign is None:
        from .protocol import CALIBRATED_SIGN

        calibrated_sign = CALIBRATED_SIGN
    meta = qmap.metadata
    payload = {
        "kind": "report" if report is not None else "map",
        "grid": qmap.grid.to_dict(),
        "s": qmap.s,
        "dim": meta.get("dim"),
        "state": meta.get("state"),
        "calibrated_sign": calibrated_sign,
        "layout": "row-major, re fastest, im increasing by row",
        "values": [float(v) for v in np.ravel(qmap.values)],
    }
    if report is not None:
        payload["mode"] = meta.get("mode")
        payload["omega"] = meta.get("omega")
        if "shots" in meta:
            payload["shots"] = meta["shots"]
            payload["seed"] = meta["seed"]
        payload["reference"] = [float(v) for v in np.ravel(report.reference.values)]
        payload["max_abs_error"] = report.max_abs_error
        payload["rms_error"] = report.rms_error
        if report.stderr is not None:
            payload["stderr"] = [float(v) for v in np.ravel(report.stderr)]
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def to_pgm(obj, autoscale=False):
    """Plain (P2) greymap, top row = largest Im(alpha).

    By default values map linearly from [-2/pi, 2/pi] onto [0, 255] and are
    clamped; ``autoscale`` uses the map's own min and max instead.
    """
    qmap, _ = _unpack(obj)
    vals = qmap.values
    if autoscale:
        lo, hi = float(vals.min()), float(vals.max())
    else:
        hi = 2.0 / math.pi
        lo = -hi
    span = hi - lo
    if span > 0:
        scaled = (vals - lo) / span * 255.0
    else:
        scaled = np.zeros_like(vals)
    pixels = np.floor(np.clip(scaled, 0.0, 255.0) + 0.5).astype(int)
    g = qmap.grid
    lines = [
        "P2",
        f"# quasiphase s={qmap.s!r} grid={g.re_min!r}:{g.re_max!r}:{g.re_count},"
        f"{g.im_min!r}:{g.im_max!r}:{g.im_count} range={lo!r}:{hi!r}",
        f"{g.re_count} {g.im_count}",
        "255",
    ]
    for row in pixels[::-1]:
        lines.append(" ".join(str(p) for p in row))
    return "\n".join(lines) + "\n"


def export_map(obj, fmt, path, autoscale=False):
    """Write a map or reconstruction report to ``path`` in ``fmt``."""
    fmt = fmt.lower()
    if fmt == "csv":
        text = to_csv(obj)
    elif fmt == "json":
        text = to_json(obj)
    elif fmt == "pgm":
        text = to_pgm(obj, autoscale=autoscale)
    else:
        raise ValidationError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def read_csv(path):
    """Return a dict of column name -> float array."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array([[float(x) for x in r] for r in rows], dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def read_json(path):
    """Load a JSON export back into a :class:`QuasiDistributionMap`.

    Report-only fields (reference values, stderr, metrics) are kept in the
    map's metadata under ``"report"``.
    """
    with open(path, encoding="ascii") as fh:
        payload = json.load(fh)
    grid = GridSpec(**payload["grid"])
    meta = {"dim": payload.get("dim"), "state": payload.get("state"), "calibrated_sign": payload.get("calibrated_sign")}
    if payload.get("kind") == "report":
        meta["report"] = {
            k: payload[k]
            for k in ("reference", "stderr", "max_abs_error", "rms_error", "mode", "omega", "shots", "seed")
            if k in payload
        }
    return QuasiDistributionMap(payload["s"], grid, np.array(payload["values"], dtype=float), meta)
