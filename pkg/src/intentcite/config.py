"""Flat key=value run configuration with typed keys and strict parsing.

A config file mirrors the training, filtering and centrality parameters;
command-line flags override file values. Unknown keys are rejected so a
typo cannot silently fall back to a default. Every CLI run that produces
files writes the fully resolved configuration beside its first output.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ParameterError
from .floatfmt import fmt_float

_OPTIONAL = object()  # marks keys whose value may be empty/None

CONFIG_SPEC: dict[str, tuple] = {
    # model architecture
    "z_dim": (int, 768),
    "generator_hidden_layers": (int, 1),
    "discriminator_hidden_layers": (int, 1),
    "dropout": (float, 0.2),
    "leaky_slope": (float, 0.2),
    # optimization
    "batch_size": (int, 32),
    "lr_discriminator": (float, 2e-7),
    "lr_generator": (float, 2e-7),
    "adam_epsilon": (float, 2e-7),
    "epochs": (int, 20),
    "warmup_proportion": (float, 0.10),
    "seed": (int, 42),
    "max_seq_len": (int, 160),
    # filtering
    "remove_intents": (str, ""),
    "min_confidence": (float, None),
    "drop_isolated_nodes": (bool, True),
    # centrality
    "damping": (float, 0.85),
    "tolerance": (float, 1e-10),
    "max_iter": (int, 100),
    "dangling": (str, "redistribute"),
    "closeness_variant": (str, "standard"),
    "direction": (str, "incoming"),
    "undirected": (bool, False),
    "top_k": (int, 20),
    "horizon": (int, 100),
    # runtime (0 = use available parallelism)
    "threads": (int, 0),
}


def _parse_value(key: str, raw: str):
    kind, default = CONFIG_SPEC[key]
    raw = raw.strip()
    if raw == "":
        if default is None or kind is str:
            return None if default is None else ""
        raise ParameterError(f"config key {key!r} needs a value")
    try:
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ParameterError(
            f"config key {key!r}: cannot parse {raw!r} as {kind.__name__}"
        ) from None


class RunConfig:
    """Typed config values; starts from defaults and layers overrides."""

    def __init__(self, values: dict | None = None):
        self.values = {key: default for key, (_, default) in CONFIG_SPEC.items()}
        if values:
            for key, value in values.items():
                self.set(key, value)

    def set(self, key: str, value) -> None:
        if key not in CONFIG_SPEC:
            raise ParameterError(f"unknown config key {key!r}")
        self.values[key] = value

    def __getitem__(self, key: str):
        if key not in CONFIG_SPEC:
            raise ParameterError(f"unknown config key {key!r}")
        return self.values[key]

    @classmethod
    def load(cls, path) -> "RunConfig":
        config = cls()
        for line_number, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ParameterError(
                    f"{path}:{line_number}: expected key=value, got {stripped!r}"
                )
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in CONFIG_SPEC:
                raise ParameterError(f"{path}:{line_number}: unknown config key {key!r}")
            config.values[key] = _parse_value(key, raw)
        return config

    def apply_overrides(self, overrides: dict) -> None:
        """Layer explicitly-set CLI flag values on top (None means unset)."""
        for key, value in overrides.items():
            if value is not None:
                self.set(key, value)

    def render(self) -> str:
        lines = []
        for key in sorted(self.values):
            value = self.values[key]
            if value is None:
                rendered = ""
            elif isinstance(value, bool):
                rendered = "true" if value else "false"
            elif isinstance(value, float):
                rendered = fmt_float(value)
            else:
                rendered = str(value)
            lines.append(f"{key}={rendered}")
        return "\n".join(lines) + "\n"

    def write_resolved(self, beside_output) -> Path:
        """Write the resolved config next to an output file."""
        target = Path(str(beside_output) + ".config")
        target.write_text(self.render(), encoding="utf-8")
        return target
