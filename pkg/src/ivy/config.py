"""Runtime configuration from environment variables and provider wiring."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import IvyError
from .providers import Embedder, HashedNgramEmbedder, LanguageModel, MockLanguageModel, RemoteLanguageModel

ENV_API_KEY = "IVY_LLM_API_KEY"
ENV_BASE_URL = "IVY_LLM_BASE_URL"
ENV_MODEL = "IVY_LLM_MODEL"
ENV_STORAGE_DIR = "IVY_STORAGE_DIR"
ENV_PORT = "IVY_PORT"

DEFAULT_STORAGE_DIR = "~/.ivy"
DEFAULT_PORT = 8000
PROVIDERS = ("mock", "remote")


class ConfigError(IvyError):
    """Configuration is missing or malformed."""


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the service and CLI need to wire providers and storage.
    The mock provider is the default so nothing reaches the network unless
    `remote` is selected explicitly."""

    storage_dir: Path
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    provider: str = "mock"
    base_url: str | None = None
    api_key: str | None = None
    model_name: str | None = None
    max_concurrency: int = 4
    log_level: str = "info"
    ui_dir: Path | None = None

    def __post_init__(self) -> None:
        if self.provider not in PROVIDERS:
            raise ConfigError(f"unknown provider {self.provider!r}; expected one of {PROVIDERS}")
        if not 0 < self.port < 65536:
            raise ConfigError(f"port {self.port} outside 1..65535")


def config_from_env(env: dict | None = None, **overrides) -> ServiceConfig:
    """Build a ServiceConfig from the IVY_* environment variables, with
    keyword overrides taking precedence."""
    env = os.environ if env is None else env
    values: dict = {
        "storage_dir": Path(env.get(ENV_STORAGE_DIR, DEFAULT_STORAGE_DIR)).expanduser(),
        "base_url": env.get(ENV_BASE_URL),
        "api_key": env.get(ENV_API_KEY),
        "model_name": env.get(ENV_MODEL),
    }
    port_text = env.get(ENV_PORT)
    if port_text is not None:
        try:
            values["port"] = int(port_text)
        except ValueError:
            raise ConfigError(f"{ENV_PORT} must be an integer, got {port_text!r}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "storage_dir" in values:
        values["storage_dir"] = Path(values["storage_dir"]).expanduser()
    return ServiceConfig(**values)


def make_language_model(config: ServiceConfig) -> LanguageModel:
    """mock -> deterministic in-process provider; remote -> HTTP client,
    which requires base URL and model name."""
    if config.provider == "mock":
        return MockLanguageModel()
    missing = [
        name
        for name, value in ((ENV_BASE_URL, config.base_url), (ENV_MODEL, config.model_name))
        if not value
    ]
    if missing:
        raise ConfigError(f"remote provider requires {', '.join(missing)}")
    return RemoteLanguageModel(
        base_url=config.base_url,
        api_key=config.api_key or "",
        model=config.model_name,
        max_concurrency=config.max_concurrency,
    )


def make_embedder(config: ServiceConfig) -> Embedder:
    # Embeddings stay local and deterministic regardless of provider choice.
    return HashedNgramEmbedder()
