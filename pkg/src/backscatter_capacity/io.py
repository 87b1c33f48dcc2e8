"""File formats: constellation JSON and CSV with a commented run manifest."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from importlib import metadata

import numpy as np

from .mi import DiscreteConstellation

PROB_TOL = 1e-9


class FormatError(ValueError):
    pass


def tool_version() -> str:
    try:
        return metadata.version("backscatter-capacity")
    except metadata.PackageNotFoundError:
        return "unknown"


def manifest(command: str, parameters: dict, seed=None) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": tool_version(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def manifest_lines(m: dict) -> list:
    """Header comment lines; the timestamp goes last so it is easy to ignore."""
    body = {k: v for k, v in m.items() if k != "timestamp"}
    return [f"# manifest: {json.dumps(body, sort_keys=True)}",
            f"# timestamp: {m.get('timestamp', '')}"]


def write_csv(path, header: list, rows, m: dict | None = None):
    with open(path, "w", newline="") as fh:
        if m is not None:
            for line in manifest_lines(m):
                fh.write(line + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(l for l in fh if not l.startswith("#")))


def constellation_to_dict(c: DiscreteConstellation, meta: dict | None = None) -> dict:
    d = {"points": [{"re": float(p.real), "im": float(p.imag), "prob": float(q)}
                    for p, q in zip(c.points, c.probs)]}
    if meta:
        d["metadata"] = meta
    return d


def constellation_from_dict(d: dict) -> DiscreteConstellation:
    try:
        pts = d["points"]
        z = np.array([complex(float(p["re"]), float(p["im"])) for p in pts])
        q = np.array([float(p["prob"]) for p in pts])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad constellation record: {exc}") from exc
    if z.size == 0:
        raise FormatError("constellation has no points")
    if abs(q.sum() - 1.0) > PROB_TOL:
        raise FormatError(f"probabilities sum to {q.sum():.12g}, not 1")
    if np.any(q < 0):
        raise FormatError("negative probability")
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise FormatError("point outside the unit disk")
    return DiscreteConstellation(z, q / q.sum())


def write_json(path, obj, m: dict | None = None):
    if m is not None:
        obj = {"manifest": m, **obj}
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def load_json(path) -> dict:
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        ctx = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}\n"
                          f"    {ctx}") from exc


def load_constellation(path) -> DiscreteConstellation:
    return constellation_from_dict(load_json(path))


def parse_range(text: str) -> np.ndarray:
    """``start:end:step`` in dB, inclusive of ``end`` (a bare number is one point)."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"bad range {text!r}; expected start:end:step") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise ValueError(f"bad range {text!r}; expected start:end:step")
    lo, hi, step = vals
    if step <= 0 or hi < lo or not all(map(math.isfinite, vals)):
        raise ValueError(f"bad range {text!r}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 10)
