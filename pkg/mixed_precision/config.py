"""
Run configuration: schema validation, defaults and typed accessors.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

from .allocator import ResourceConstraint, constraint_from_dict
from .allocator.brute_force import MAX_BIT_SPAN, MAX_QUANTIZERS
from .configuration_loader import DEFAULT_LOG_LEVEL, DEFAULT_OUTPUT_DIRECTORY, ConfigurationLoader
from .engine import DEFAULT_SCHEDULES, ModelSpec, TrainConfig
from .errors import ConfigError, ConstraintError, ContractError
from .io import DatasetSelector, write_effective_config
from .io.synthetic import BLOBS, SYNTHETIC_KINDS, TWO_MOONS
from .quantsim import DEFAULT_B_MAX, DEFAULT_B_MIN, QuantizationMode

logger = logging.getLogger(__name__)

EFFECTIVE_CONFIG_NAME = "effective_config.json"

NUMBER = (int, float)


class Setting(NamedTuple):
    types: Tuple[type, ...]
    default: Any


RUN_CONFIG_SCHEMA: Dict[str, Dict[str, Setting]] = {
    "model": {
        "layer_widths": Setting((list,), [2, 64, 8, 64, 2]),
        "activation": Setting((str,), "relu"),
        "seed": Setting((int,), 0),
        "per_channel_weights": Setting((bool,), True),
    },
    "constraint": {
        "kind": Setting((str,), "avg_bitwidth"),
        "beta": Setting(NUMBER, 4.0),
        "beta_w": Setting(NUMBER, None),
        "beta_a": Setting(NUMBER, None),
        "b_min": Setting((int,), DEFAULT_B_MIN),
        "b_max": Setting((int,), DEFAULT_B_MAX),
    },
    "train": {
        "iterations": Setting((int,), 2000),
        "phase1_fraction": Setting(NUMBER, 0.5),
        "reallocation_period": Setting((int,), 50),
        "learning_rate": Setting(NUMBER, 0.05),
        "momentum": Setting(NUMBER, 0.9),
        "alpha_learning_rate": Setting(NUMBER, 0.01),
        "gamma": Setting(NUMBER, 0.9),
        "sensitivity_period": Setting((int,), 2),
        "mode": Setting((str,), "hard"),
        "allocator": Setting((str,), "greedy"),
        "selection": Setting((str,), "marginal_gain"),
        "batch_size": Setting((int,), 32),
        "seed": Setting((int,), 0),
        "clip_sensitivities": Setting((bool,), True),
        "separate_probe_batch": Setting((bool,), False),
        "log_period": Setting((int,), 10),
        "eval_period": Setting((int,), 100),
    },
    "dataset": {
        "kind": Setting((str,), TWO_MOONS),
        "n": Setting((int,), 1000),
        "noise": Setting(NUMBER, 0.1),
        "seed": Setting((int,), 0),
        "centers": Setting((int,), 3),
        "spread": Setting(NUMBER, 4.0),
        "images": Setting((str,), None),
        "labels": Setting((str,), None),
        "test_images": Setting((str,), None),
        "test_labels": Setting((str,), None),
        "test_fraction": Setting(NUMBER, 0.2),
    },
    "output": {
        "directory": Setting((str,), None),
    },
    "compare": {
        "schedules": Setting((list,), list(DEFAULT_SCHEDULES)),
    },
}


def _type_name(types: Tuple[type, ...]) -> str:
    return " or ".join(t.__name__ for t in types)


def _check_type(key_path: str, value: Any, setting: Setting) -> None:
    if value is None and setting.default is None:
        return
    # bool is an int subclass; never accept it where a number is expected.
    if isinstance(value, bool) and bool not in setting.types:
        raise ConfigError(f"expected {_type_name(setting.types)}, got bool", key_path)
    if not isinstance(value, setting.types):
        raise ConfigError(f"expected {_type_name(setting.types)}, got {type(value).__name__}", key_path)
    if isinstance(value, list):
        for index, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, NUMBER):
                raise ConfigError(f"expected a list of numbers, got {type(item).__name__}", f"{key_path}[{index}]")


def validate_run_config(document: Dict[str, Any]) -> Dict[str, Any]:
    """
    Check a run-config document against the schema and materialize defaults.

    Raises:
        ConfigError: Unknown key, type mismatch or infeasible settings
    """
    if not isinstance(document, dict):
        raise ConfigError(f"run configuration must be an object, got {type(document).__name__}")
    effective: Dict[str, Dict[str, Any]] = {}
    for section in document:
        if section not in RUN_CONFIG_SCHEMA:
            raise ConfigError("unknown key", section)
    for section, settings in RUN_CONFIG_SCHEMA.items():
        given = document.get(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"expected an object, got {type(given).__name__}", section)
        for key in given:
            if key not in settings:
                raise ConfigError("unknown key", f"{section}.{key}")
        values = {}
        for key, setting in settings.items():
            value = given.get(key, setting.default)
            _check_type(f"{section}.{key}", value, setting)
            values[key] = list(value) if isinstance(value, list) else value
        effective[section] = values
    _check_feasibility(effective)
    return effective


def _check_feasibility(effective: Dict[str, Dict[str, Any]]) -> None:
    constraint = effective["constraint"]
    if constraint["kind"] == "per_element":
        for key in ("beta_w", "beta_a"):
            if constraint[key] is None:
                constraint[key] = constraint["beta"]
    b_min, b_max = constraint["b_min"], constraint["b_max"]
    if b_min < 2:
        raise ConfigError(f"must be at least 2 for signed weight quantizers, got {b_min}", "constraint.b_min")
    if b_max < b_min:
        raise ConfigError(f"b_max {b_max} is below b_min {b_min}", "constraint.b_max, constraint.b_min")
    targets = ("beta",) if constraint["kind"] != "per_element" else ("beta_w", "beta_a")
    for key in targets:
        if constraint[key] < b_min:
            raise ConfigError(f"{key}={constraint[key]} is below b_min={b_min}", f"constraint.{key}, constraint.b_min")
        if constraint[key] > b_max:
            raise ConfigError(f"{key}={constraint[key]} is above b_max={b_max}", f"constraint.{key}, constraint.b_max")

    train = effective["train"]
    if train["reallocation_period"] < train["sensitivity_period"]:
        raise ConfigError(
            f"reallocation period {train['reallocation_period']} is shorter than "
            f"sensitivity period {train['sensitivity_period']}",
            "train.reallocation_period, train.sensitivity_period",
        )

    widths = effective["model"]["layer_widths"]
    dataset = effective["dataset"]
    if dataset["kind"] in SYNTHETIC_KINDS and widths and widths[0] != 2:
        raise ConfigError(
            f"synthetic datasets have 2 features, the model expects {widths[0]}",
            "model.layer_widths, dataset.kind",
        )
    classes = dataset["centers"] if dataset["kind"] == BLOBS else 2
    if dataset["kind"] in SYNTHETIC_KINDS and widths and widths[-1] < classes:
        raise ConfigError(
            f"{classes} classes but only {widths[-1]} outputs", "model.layer_widths, dataset.kind"
        )
    if train["allocator"] == "brute" and widths:
        quantizers = 2 * (len(widths) - 1) - 1
        if quantizers > MAX_QUANTIZERS:
            raise ConfigError(
                f"brute force handles at most {MAX_QUANTIZERS} quantizers, the model has {quantizers}",
                "train.allocator, model.layer_widths",
            )
        if b_max - b_min > MAX_BIT_SPAN:
            raise ConfigError(
                f"brute force handles a bit span of at most {MAX_BIT_SPAN}, got {b_max - b_min}",
                "train.allocator, constraint.b_min, constraint.b_max",
            )
    for index, fraction in enumerate(effective["compare"]["schedules"]):
        if not 0.0 <= fraction <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {fraction}", f"compare.schedules[{index}]")


def _build(effective: Dict[str, Dict[str, Any]]) -> Tuple[ModelSpec, TrainConfig, DatasetSelector]:
    model = effective["model"]
    try:
        spec = ModelSpec(
            tuple(int(width) for width in model["layer_widths"]),
            model["activation"],
            model["seed"],
            model["per_channel_weights"],
        )
    except ContractError as e:
        raise ConfigError(str(e), "model") from e

    try:
        constraint: ResourceConstraint = constraint_from_dict(effective["constraint"])
    except ConstraintError as e:
        raise ConfigError(str(e), "constraint") from e

    train = dict(effective["train"])
    try:
        train["mode"] = QuantizationMode(train["mode"])
    except ValueError as e:
        raise ConfigError(f"unknown mode {train['mode']!r}, expected 'hard' or 'pqn'", "train.mode") from e
    train_config = TrainConfig(constraint=constraint, **train)
    return spec, train_config, DatasetSelector(**effective["dataset"])


class Config:
    """
    Configuration class that receives configuration values via constructor
    instead of reading environment variables directly.

    ``config_dict`` holds the environment settings (``output_directory``,
    ``log_level``) and optionally a raw run configuration under ``run``.
    """

    def __init__(self, config_dict: Optional[Dict[str, Any]] = None):
        if config_dict is None:
            config_dict = ConfigurationLoader.load_configuration()

        self._output_directory = Path(config_dict.get("output_directory") or DEFAULT_OUTPUT_DIRECTORY)
        self._log_level = str(config_dict.get("log_level") or DEFAULT_LOG_LEVEL).upper()
        self._effective: Optional[Dict[str, Any]] = None
        self._model_spec: Optional[ModelSpec] = None
        self._train_config: Optional[TrainConfig] = None
        self._dataset: Optional[DatasetSelector] = None

        run = config_dict.get("run")
        if run is not None:
            self._effective = validate_run_config(run)
            self._model_spec, self._train_config, self._dataset = _build(self._effective)
            if self._effective["output"]["directory"]:
                self._output_directory = Path(self._effective["output"]["directory"])

    def _require_run(self) -> None:
        if self._effective is None:
            raise ConfigError("no run configuration loaded")

    @property
    def OUTPUT_DIRECTORY(self) -> Path:
        """Get the directory results are written to."""
        return self._output_directory

    @property
    def LOG_LEVEL(self) -> str:
        """Get the logging level name."""
        return self._log_level

    @property
    def MODEL_SPEC(self) -> ModelSpec:
        self._require_run()
        return self._model_spec

    @property
    def TRAIN_CONFIG(self) -> TrainConfig:
        self._require_run()
        return self._train_config

    @property
    def DATASET(self) -> DatasetSelector:
        self._require_run()
        return self._dataset

    @property
    def COMPARE_SCHEDULES(self) -> List[float]:
        self._require_run()
        return [float(fraction) for fraction in self._effective["compare"]["schedules"]]

    @property
    def EFFECTIVE(self) -> Dict[str, Any]:
        """Get the validated run configuration with every default filled in."""
        self._require_run()
        return ConfigurationLoader.merge_configurations(self._effective)


def load_config(path: Union[str, Path], environment: Optional[Dict[str, Any]] = None) -> Config:
    """Load, validate and echo a run configuration file."""
    if environment is None:
        environment = ConfigurationLoader.load_configuration()
    document = ConfigurationLoader.load_from_file(path)
    config = Config(ConfigurationLoader.merge_configurations(environment, {"run": document}))
    echoed = write_effective_config(config.EFFECTIVE, config.OUTPUT_DIRECTORY / EFFECTIVE_CONFIG_NAME)
    logger.info("[Config] effective configuration written to %s", echoed)
    return config


def parse_config(
    path: Union[str, Path], environment: Optional[Dict[str, Any]] = None
) -> Tuple[ModelSpec, TrainConfig, DatasetSelector]:
    config = load_config(path, environment)
    return config.MODEL_SPEC, config.TRAIN_CONFIG, config.DATASET
