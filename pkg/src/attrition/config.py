"""Run configuration: an INI file, then environment, then command-line overrides."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from attrition.dataset import POLICIES
from attrition.ensemble import AdaBoostParams, ForestParams
from attrition.errors import AttritionError, ConfigError
from attrition.evaluation import MODEL_KINDS, ModelSpec
from attrition.svm import SvmParams
from attrition.trees import CartParams

OUTPUT_ENV = "ATTRITION_OUTPUT_DIR"

# Every key the file may set, with its default.
DEFAULTS = {
    "data": {"path": "", "schema": "", "drop": "", "encoding": "integer"},
    "split": {"test_fraction": "0.30", "stratified": "false"},
    "run": {"seed": "0", "iterations": "3", "output_dir": "out", "models": "adaboost, svm, forest"},
    "adaboost": {"n_estimators": "1000", "learning_rate": "0.1"},
    "svm": {
        "C": "1", "kernel": "linear", "gamma_policy": "one_over_n_instances", "gamma": "",
        "tolerance": "0.001", "max_passes": "200",
    },
    "forest": {
        "n_trees": "100", "max_depth": "", "min_samples_leaf": "1",
        "features_per_split": "sqrt", "bootstrap": "true",
    },
}


@dataclass
class RunConfig:
    data_path: Path | None
    schema_path: Path | None
    drop: tuple[str, ...] | None
    encoding: str
    test_fraction: float
    stratified: bool
    seed: int
    iterations: int
    output_dir: Path
    models: list[ModelSpec] = field(default_factory=list)

    def model(self, name: str) -> ModelSpec:
        for spec in self.models:
            if spec.name == name:
                return spec
        raise ConfigError(f"model {name!r} is not configured (have {[m.name for m in self.models]})")


def _items(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _bool(section: str, key: str, value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got {value!r}")


def _num(section: str, key: str, value: str, kind=float):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected {kind.__name__}, got {value!r}") from None


def load_config(
    path: str | Path | None = None,
    overrides: Sequence[str] = (),
    env: dict | None = None,
) -> RunConfig:
    """Build a RunConfig.

    `overrides` are ``section.key=value`` strings and win over the
    environment (``ATTRITION_OUTPUT_DIR``), which wins over the file.
    Relative paths in the file are resolved against the file's directory.
    """
    env = os.environ if env is None else env
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_dict(DEFAULTS)
    base = Path.cwd()
    from_file: set[tuple[str, str]] = set()
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        fileparser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        fileparser.optionxform = str
        try:
            fileparser.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        for section in fileparser.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in fileparser.items(section):
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                parser.set(section, key, value)
                from_file.add((section, key))
        base = path.resolve().parent
    if env.get(OUTPUT_ENV):
        parser.set("run", "output_dir", env[OUTPUT_ENV])
        from_file.discard(("run", "output_dir"))
    for item in overrides:
        target, sep, value = item.partition("=")
        section, dot, key = target.strip().partition(".")
        if not sep or not dot or section not in DEFAULTS or key not in DEFAULTS[section]:
            raise ConfigError(f"bad override {item!r}; expected section.key=value")
        parser.set(section, key, value.strip())
        from_file.discard((section, key))

    def resolve(section, key):
        value = parser.get(section, key).strip()
        if not value:
            return None
        p = Path(value).expanduser()
        return p if p.is_absolute() or (section, key) not in from_file else base / p

    get = parser.get
    encoding = get("data", "encoding").strip()
    if encoding not in POLICIES:
        raise ConfigError(f"[data] encoding must be one of {POLICIES}")
    drop = get("data", "drop").strip()
    seed = _num("run", "seed", get("run", "seed"), int)
    if not 0 <= seed < 2**64:
        raise ConfigError("[run] seed must be a 64-bit unsigned integer")
    iterations = _num("run", "iterations", get("run", "iterations"), int)
    if iterations < 1:
        raise ConfigError("[run] iterations must be at least 1")
    test_fraction = _num("split", "test_fraction", get("split", "test_fraction"))
    if not 0 < test_fraction < 1:
        raise ConfigError("[split] test_fraction must be in (0, 1)")

    models = []
    try:
        for name in _items(get("run", "models")):
            if name not in MODEL_KINDS:
                raise ConfigError(f"[run] models: unknown model {name!r}; choose from {MODEL_KINDS}")
            models.append(ModelSpec(name, name, _model_params(parser, name)))
    except ConfigError:
        raise
    except AttritionError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc
    if not models:
        raise ConfigError("[run] models is empty")

    return RunConfig(
        data_path=resolve("data", "path"),
        schema_path=resolve("data", "schema"),
        drop=tuple(_items(drop)) if drop else None,
        encoding=encoding,
        test_fraction=test_fraction,
        stratified=_bool("split", "stratified", get("split", "stratified")),
        seed=seed,
        iterations=iterations,
        output_dir=resolve("run", "output_dir") or Path("out"),
        models=models,
    )


def _model_params(parser, kind):
    s = dict(parser.items(kind))
    if kind == "adaboost":
        return AdaBoostParams(
            n_estimators=_num(kind, "n_estimators", s["n_estimators"], int),
            learning_rate=_num(kind, "learning_rate", s["learning_rate"]),
        )
    if kind == "svm":
        gamma = s["gamma"].strip()
        return SvmParams(
            C=_num(kind, "C", s["C"]),
            kernel=s["kernel"].strip(),
            gamma_policy=s["gamma_policy"].strip(),
            gamma=_num(kind, "gamma", gamma) if gamma else None,
            tolerance=_num(kind, "tolerance", s["tolerance"]),
            max_passes=_num(kind, "max_passes", s["max_passes"], int),
        )
    depth = s["max_depth"].strip()
    fps = s["features_per_split"].strip()
    if fps in ("", "all"):
        fps = None
    elif fps != "sqrt":
        fps = _num(kind, "features_per_split", fps, int)
    return ForestParams(
        n_trees=_num(kind, "n_trees", s["n_trees"], int),
        cart=CartParams(
            max_depth=_num(kind, "max_depth", depth, int) if depth else None,
            min_samples_leaf=_num(kind, "min_samples_leaf", s["min_samples_leaf"], int),
            features_per_split=fps,
        ),
        bootstrap=_bool(kind, "bootstrap", s["bootstrap"]),
    )
