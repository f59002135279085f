"""Pipeline configuration: file values, env overrides, validation."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .furniture import FurnitureFilterConfig
from .markdown import ConverterConfig
from .raptor import RaptorConfig

_ENV_URL_FIELDS = (
    ("llm_url", "LLM_URL"),
    ("embedder_url", "EMBEDDER_URL"),
    ("captioner_url", "CAPTIONER_URL"),
    ("qgen_url", "QGEN_URL"),
    ("agen_url", "AGEN_URL"),
)


@dataclass
class PipelineConfig:
    """Every knob of the pipeline, with working offline defaults."""

    seed: int = 0
    # furniture filter
    eps: float = 0.01
    top_band: float = 0.15
    bottom_band: float = 0.85
    window_size: int = 10
    min_pages_override: int | None = None
    # markdown conversion
    heading_ratio: float = 1.3
    extract_images: bool = True
    image_dpi: int = 96
    paginate_output: bool = False
    # chunking and indexing
    max_chars: int = 1000
    embed_dim: int = 128
    raptor_enabled: bool = True
    fanout: int = 5
    max_depth: int = 3
    # retrieval
    k: int = 10
    max_tokens: int = 512
    # data generation
    questions_per_context: int = 3
    context_size: int = 5000
    # service endpoints (env vars win over file values)
    llm_url: str | None = None
    embedder_url: str | None = None
    captioner_url: str | None = None
    qgen_url: str | None = None
    agen_url: str | None = None

    def __post_init__(self) -> None:
        # Delegate range checks to the component configs where possible.
        self.furniture_config()
        self.converter_config()
        self.raptor_config()
        if self.max_chars < 1:
            raise ConfigError("max_chars must be >= 1")
        if self.embed_dim < 2:
            raise ConfigError("embed_dim must be >= 2")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be >= 1")
        if self.questions_per_context < 1:
            raise ConfigError("questions_per_context must be >= 1")
        if self.context_size < 2:
            raise ConfigError("context_size must be >= 2")

    def furniture_config(self) -> FurnitureFilterConfig:
        try:
            return FurnitureFilterConfig(
                eps=self.eps,
                top_band=self.top_band,
                bottom_band=self.bottom_band,
                window_size=self.window_size,
                min_pages_override=self.min_pages_override,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def converter_config(self) -> ConverterConfig:
        try:
            return ConverterConfig(
                extract_images=self.extract_images,
                image_dpi=self.image_dpi,
                paginate_output=self.paginate_output,
                heading_ratio=self.heading_ratio,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def raptor_config(self) -> RaptorConfig:
        try:
            return RaptorConfig(fanout=self.fanout, max_depth=self.max_depth, seed=self.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None = None, **overrides) -> PipelineConfig:
    """Build the config from an optional TOML file plus overrides.

    Precedence, lowest to highest: defaults, file values, service URL
    environment variables, explicit overrides (CLI flags). Unknown keys
    anywhere are rejected.
    """
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc
        for key, value in data.items():
            if isinstance(value, dict):
                raise ConfigError(f"config must be flat key-value pairs, got section [{key}]")
            values[key] = value

    for field_name, env_var in _ENV_URL_FIELDS:
        env_value = os.environ.get(env_var)
        if env_value:
            values[field_name] = env_value

    for key, value in overrides.items():
        if value is not None:
            values[key] = value

    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return PipelineConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
