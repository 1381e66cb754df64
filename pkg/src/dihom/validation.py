"""Input validation helpers shared by the estimator layer."""

from __future__ import annotations

from .errors import DomainError, ModelError
from .linalg import Field, get_field
from .models import LoadedModel, model_from_text
from .obstacles import ObstacleModel
from .precubical import GridSpec, PrecubicalSet, build_grid, complex_from_json, is_proper
from .pvlang import PVProgram, semantics


def check_complex(X, require_proper: bool = True) -> LoadedModel:
    """Turn any supported model description into a :class:`LoadedModel`.

    Accepts a precubical set, a :class:`GridSpec`, an obstacle model, a parsed
    PV program, PV source text, or a complex/grid JSON dictionary.
    """
    if isinstance(X, LoadedModel):
        model = X
    elif isinstance(X, PrecubicalSet):
        model = LoadedModel(X, "complex")
    elif isinstance(X, GridSpec):
        model = LoadedModel(build_grid(X), "grid-json", grid=X)
    elif isinstance(X, ObstacleModel):
        grid = X.to_grid_spec()
        model = LoadedModel(build_grid(grid), "obstacle-json", grid=grid, obstacles=X)
    elif isinstance(X, PVProgram):
        grid = semantics(X)
        model = LoadedModel(build_grid(grid), "pv", grid=grid)
    elif isinstance(X, str):
        model = model_from_text(X, "pv")
    elif isinstance(X, dict):
        if "cells" in X:
            model = LoadedModel(complex_from_json(X), "complex-json")
        elif "obstacles" in X:
            return check_complex(ObstacleModel.from_json(X), require_proper)
        else:
            return check_complex(GridSpec.from_json(X), require_proper)
    else:
        raise TypeError(f"cannot interpret {type(X).__name__} as a model")
    if require_proper and not is_proper(model.X):
        raise ModelError("complex is not proper")
    if not model.X.is_acyclic():
        raise ModelError("complex has directed loops")
    return model


def check_pairs(model: LoadedModel, pairs) -> list:
    """Normalise vertex pairs; grid vertices may be lists or ``"x,y"`` strings."""
    out = []
    for pair in pairs:
        try:
            v, w = pair
        except (TypeError, ValueError):
            raise DomainError(f"expected a (from, to) pair, got {pair!r}") from None
        out.append((_vertex(model, v), _vertex(model, w)))
    return out


def _vertex(model: LoadedModel, v):
    if isinstance(v, str):
        return model.vertex(v)
    if isinstance(v, list):
        v = tuple(v)
    if isinstance(v, tuple):
        v = tuple(int(x) for x in v)
    if v not in model.X:
        raise DomainError(f"vertex {v!r} is not in the model")
    return v


def check_field(field) -> Field:
    try:
        return get_field(field)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def check_degree(max_degree) -> int:
    if int(max_degree) != max_degree or max_degree < 1:
        raise DomainError(f"max_degree must be a positive integer, got {max_degree!r}")
    return int(max_degree)
