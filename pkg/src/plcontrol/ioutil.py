"""File formats: complexes, maps, points and single-point homotopy tracks.

Complex files are JSON: {"vertices": [...], "simplices": [["a","b"], ...]},
with an optional "positions" table used by the SVG renderer.  Generator lists
are closed under faces automatically (a warning records when closure added
anything).  Map files point at their complexes: {"source": ..., "target": ...,
"vertex_map": {...}}, paths resolved relative to the map file.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

from .complexes import (
    MalformedInputError,
    Point,
    SimplicialComplex,
    canonical,
    closure_complex,
)
from .evaluators import Homotopy
from .maps import SimplicialMap, validate_map


class FileFormatError(ValueError):
    pass


def _load_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise FileFormatError(f"{path}: file not found") from None
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def load_complex(path: str | Path) -> SimplicialComplex:
    data = _load_json(path)
    if "simplices" not in data or not data["simplices"]:
        raise FileFormatError(f"{path}: missing or empty 'simplices' field")
    gens = [tuple(str(v) for v in s) for s in data["simplices"]]
    for g in gens:
        if len(set(g)) != len(g):
            raise FileFormatError(f"{path}: duplicate vertex inside simplex {list(g)}")
    order = [str(v) for v in data.get("vertices", [])]
    try:
        K = closure_complex(gens, vertex_order=order or None)
    except MalformedInputError as e:
        raise FileFormatError(f"{path}: {e}") from None
    listed = {tuple(sorted(g)) for g in gens}
    closure_added = sum(1 for s in K.simplices if tuple(sorted(s.vertices)) not in listed)
    if closure_added:
        warnings.warn(
            f"{path}: face closure added {closure_added} simplices not listed in the file",
            stacklevel=2,
        )
    if "positions" in data:
        K._cache["positions"] = {
            str(v): (float(xy[0]), float(xy[1])) for v, xy in data["positions"].items()
        }
    return K


def save_complex(K: SimplicialComplex, path: str | Path, positions: dict | None = None) -> None:
    data = {
        "vertices": list(K.vertex_order),
        "simplices": [list(s.vertices) for s in K.sorted_simplices()],
    }
    positions = positions or K._cache.get("positions")
    if positions:
        data["positions"] = {v: list(xy) for v, xy in positions.items()}
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def load_map(path: str | Path) -> SimplicialMap:
    path = Path(path)
    data = _load_json(path)
    for k in ("source", "target", "vertex_map"):
        if k not in data:
            raise FileFormatError(f"{path}: missing '{k}' field")
    src = load_complex(path.parent / data["source"])
    tgt = load_complex(path.parent / data["target"])
    try:
        f = SimplicialMap(src, tgt, {str(a): str(b) for a, b in data["vertex_map"].items()})
    except MalformedInputError as e:
        raise FileFormatError(f"{path}: {e}") from None
    bad = validate_map(f)
    if bad:
        raise FileFormatError(
            f"{path}: vertex map is not simplicial on {', '.join(str(s) for s in bad)}"
        )
    return f


def save_map(f: SimplicialMap, path: str | Path, source_name: str, target_name: str) -> None:
    data = {"source": source_name, "target": target_name, "vertex_map": dict(f.vertex_map)}
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def parse_point(K: SimplicialComplex, data: dict | str) -> Point:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise FileFormatError(f"point literal: {e.msg}") from None
    if "simplex" not in data or "coords" not in data:
        raise FileFormatError("point needs 'simplex' and 'coords' fields")
    s = K.simplex([str(v) for v in data["simplex"]])
    order = [s.vertices.index(str(v)) for v in data["simplex"]]
    coords = [0.0] * len(s.vertices)
    for pos, c in zip(order, data["coords"]):
        coords[pos] = float(c)
    return canonical(K, Point(s, tuple(coords)))


def load_track(path: str | Path, Y: SimplicialComplex) -> tuple[Homotopy, Point | None]:
    """A single-point homotopy into Y: {"times": [...], "points": [...]},
    interpolated piecewise linearly; optional "start" is a point of the
    lifting problem's source complex."""
    data = _load_json(path)
    times = [float(t) for t in data.get("times", [])]
    pts = [parse_point(Y, p) for p in data.get("points", [])]
    if len(times) != len(pts) or len(pts) < 2:
        raise FileFormatError(f"{path}: need matching 'times' and 'points' (at least two)")
    if times[0] != 0.0 or times[-1] != 1.0 or any(a >= b for a, b in zip(times, times[1:])):
        raise FileFormatError(f"{path}: times must increase from 0 to 1")
    from .complexes import combine_points

    Z = closure_complex([("z",)])

    def fn(_: Point, t: float) -> Point:
        t = min(max(t, 0.0), 1.0)
        for (t1, p1), (t2, p2) in zip(zip(times, pts), zip(times[1:], pts[1:])):
            if t <= t2:
                lam = (t - t1) / (t2 - t1)
                return combine_points(Y, [(1.0 - lam, p1), (lam, p2)])
        return pts[-1]

    H = Homotopy(domain=Z, codomain=Y, fn=fn, name=f"track {Path(path).name}")
    start = data.get("start")
    return H, start
