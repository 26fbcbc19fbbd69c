"""Service configuration: one JSON file plus environment overrides.

Recognized file keys (all optional): bind_host, bind_port, storage_path,
session_ttl_seconds, strip_diacritics, strip_tatweel, nfc_compare,
admin_login, admin_password. Environment variables ARAC_<KEY> (upper
case) override file values.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .errors import ConfigInvalid
from .normalization import NormalizationConfig

_KEYS = (
    "bind_host",
    "bind_port",
    "storage_path",
    "session_ttl_seconds",
    "strip_diacritics",
    "strip_tatweel",
    "nfc_compare",
    "admin_login",
    "admin_password",
)

_BOOL_STRINGS = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


@dataclass(frozen=True)
class ServiceConfig:
    bind_host: str = "127.0.0.1"
    bind_port: int = 8000
    storage_path: Optional[str] = None
    session_ttl_seconds: int = 3600
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)
    admin_login: Optional[str] = None
    admin_password: Optional[str] = None


def _as_bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in _BOOL_STRINGS:
        return _BOOL_STRINGS[value.lower()]
    raise ConfigInvalid(f"{key} must be a boolean, got {value!r}")


def _as_int(key: str, value: Any) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigInvalid(f"{key} must be an integer, got {value!r}")


def load_config(
    path: Optional[Union[str, Path]] = None,
    env: Mapping[str, str] = os.environ,
) -> ServiceConfig:
    raw: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigInvalid(f"config file {path} does not exist")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config file {path}: {exc}")
        if not isinstance(raw, dict):
            raise ConfigInvalid("config file must hold a JSON object")
        unknown = set(raw) - set(_KEYS)
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")

    for key in _KEYS:
        env_key = f"ARAC_{key.upper()}"
        if env_key in env:
            raw[key] = env[env_key]

    bind_port = _as_int("bind_port", raw.get("bind_port", 8000))
    if not 1 <= bind_port <= 65535:
        raise ConfigInvalid(f"bind_port out of range: {bind_port}")
    session_ttl = _as_int("session_ttl_seconds", raw.get("session_ttl_seconds", 3600))
    if session_ttl <= 0:
        raise ConfigInvalid(f"session_ttl_seconds must be positive: {session_ttl}")

    if not _as_bool("nfc_compare", raw.get("nfc_compare", True)):
        raise ConfigInvalid("nfc_compare cannot be disabled")
    normalization = NormalizationConfig(
        strip_diacritics=_as_bool("strip_diacritics", raw.get("strip_diacritics", False)),
        strip_tatweel=_as_bool("strip_tatweel", raw.get("strip_tatweel", False)),
    )

    return ServiceConfig(
        bind_host=str(raw.get("bind_host", "127.0.0.1")),
        bind_port=bind_port,
        storage_path=raw.get("storage_path"),
        session_ttl_seconds=session_ttl,
        normalization=normalization,
        admin_login=raw.get("admin_login"),
        admin_password=raw.get("admin_password"),
    )
