"""Python interface to the qtgnn library.

Configurations are plain dicts of dotted keys, e.g. {"train.t_max": 20};
unset keys take their defaults.
"""

import json
import os

from . import _qtgnn
from ._qtgnn import (
    ArgumentError,
    ConfigError,
    DataError,
    ParseError,
    QtgnnError,
    bottleneck_distance,
    config_keys,
    evaluate_metrics,
    experiment_names,
    log_loss,
    partial_trace,
    persistence,
    roc_auc,
    von_neumann_entropy,
    wasserstein2,
)

__all__ = [
    "ArgumentError", "ConfigError", "DataError", "ParseError", "QtgnnError",
    "bottleneck_distance", "config", "config_keys", "embed", "encode", "evaluate",
    "evaluate_metrics", "experiment_names", "generate", "lab", "log_loss",
    "parse_edge_list", "partial_trace", "persistence", "roc_auc", "score", "train",
    "von_neumann_entropy", "wasserstein2",
]


def config(overrides=None, **kwargs):
    """Resolved configuration as a dict. Keyword arguments use '__' for '.'."""
    cfg = json.loads(_qtgnn.default_config())
    cfg.update(overrides or {})
    cfg.update({k.replace("__", "."): v for k, v in kwargs.items()})
    return json.loads(_qtgnn.resolve_config(json.dumps(cfg)))


def _json(cfg):
    return json.dumps(config(cfg))


def generate(cfg=None):
    """Write dataset.jsonl into cfg["run.output_dir"]; returns its path."""
    c = config(cfg)
    _qtgnn.generate(json.dumps(c))
    return os.path.join(c["run.output_dir"], "dataset.jsonl")


def train(dataset, cfg=None):
    c = config(cfg)
    _qtgnn.train(json.dumps(c), os.fspath(dataset))
    return os.path.join(c["run.output_dir"], "model.json")


def score(model, dataset, cfg=None, split="test"):
    c = config(cfg)
    _qtgnn.score(json.dumps(c), os.fspath(model), os.fspath(dataset), split)
    return os.path.join(c["run.output_dir"], "scores.jsonl")


def evaluate(scores, cfg=None):
    return _qtgnn.evaluate(_json(cfg), os.fspath(scores))


def embed(dataset, cfg=None, model=None):
    _qtgnn.embed(_json(cfg), os.fspath(dataset), None if model is None else os.fspath(model))


def lab(name, cfg=None):
    """Run a convergence-lab experiment; returns its verdict and CSV text."""
    return _qtgnn.run_experiment(name, _json(cfg))


def parse_edge_list(text, preprocessed=True):
    return _qtgnn.parse_edge_list(text, preprocessed)


def encode(text, theta_e):
    """Density matrix and qubit ids of a CSV edge list at encoding angle theta_e."""
    return _qtgnn.encode_edge_list(text, theta_e)
