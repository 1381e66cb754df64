"""Loading models from the supported input formats."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ModelError
from .obstacles import ObstacleModel
from .precubical import GridSpec, PrecubicalSet, build_grid, complex_from_json
from .pvlang import compile_source

FORMATS = ("pv", "grid-json", "complex-json", "obstacle-json")


@dataclass
class LoadedModel:
    X: PrecubicalSet
    fmt: str
    grid: GridSpec | None = None
    obstacles: ObstacleModel | None = None

    def vertex(self, text: str):
        """Parse a vertex written as in reports (``"x,y"`` on grids, the raw id otherwise)."""
        text = text.strip()
        if self.fmt == "complex-json":
            v = text
        else:
            try:
                v = tuple(int(x) for x in text.split(",")) if text else ()
            except ValueError:
                raise ModelError(f"bad grid vertex {text!r}") from None
        if v not in self.X:
            raise ModelError(f"vertex {text!r} is not in the model")
        return v


def detect_format(path: str) -> str:
    if str(path).endswith(".pv"):
        return "pv"
    with open(path) as fh:
        data = json.load(fh)
    if "obstacles" in data:
        return "obstacle-json"
    if "cells" in data:
        return "complex-json"
    return "grid-json"


def load_model(path: str, fmt: str | None = None) -> LoadedModel:
    """Read ``path`` in format ``fmt``; ``OSError`` propagates, bad content raises :class:`ModelError`."""
    fmt = fmt or detect_format(path)
    with open(path) as fh:
        text = fh.read()
    return model_from_text(text, fmt)


def model_from_text(text: str, fmt: str) -> LoadedModel:
    if fmt == "pv":
        grid = compile_source(text)
        return LoadedModel(build_grid(grid), fmt, grid=grid)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON: {exc}") from None
    if fmt == "grid-json":
        try:
            grid = GridSpec.from_json(data)
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed grid JSON: {exc}") from None
        return LoadedModel(build_grid(grid), fmt, grid=grid)
    if fmt == "complex-json":
        return LoadedModel(complex_from_json(data), fmt)
    if fmt == "obstacle-json":
        M = ObstacleModel.from_json(data)
        grid = M.to_grid_spec()
        return LoadedModel(build_grid(grid), fmt, grid=grid, obstacles=M)
    raise ModelError(f"unknown format {fmt!r}")
