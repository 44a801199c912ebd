# Copyright 2026 The slicecad Authors.
# SPDX-License-Identifier: Apache-2.0
"""Python access to the slicecad reconstruction library.

Sketches and models cross the boundary as JSON text; the helpers here decode
them into plain dicts.
"""

import json

from . import _core
from ._core import (
    SlicecadError,
    chamfer_distance,
    config_keys,
    constraint_residuals,
    default_config,
    generate_corpus,
    load_mesh,
    mesh_volume,
    normalize_config,
    render_sketch,
)

__all__ = [
    "SlicecadError",
    "chamfer_distance",
    "config_keys",
    "constraint_residuals",
    "default_config",
    "fit_loop",
    "generate_corpus",
    "load_mesh",
    "mesh_volume",
    "model_metrics",
    "normalize_config",
    "reconstruct",
    "render_sketch",
    "solve_sketch",
    "tessellate_model",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def reconstruct(path, config=None):
    out = _core.reconstruct(str(path), config)
    out["model"] = json.loads(out["model"])
    return out


def fit_loop(points, config=None, constrain=True):
    return json.loads(_core.fit_loop([tuple(p) for p in points], config, constrain))


def solve_sketch(sketch, pins=()):
    text, residual, iterations = _core.solve_sketch(_text(sketch), list(pins))
    return json.loads(text), residual, iterations


def tessellate_model(model):
    return _core.tessellate_model(_text(model))


def model_metrics(pred, gt, res=64, n=8192, seed=0):
    return _core.model_metrics(_text(pred), _text(gt), res, n, seed)
