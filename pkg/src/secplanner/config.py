"""Runtime configuration, sourced from the environment.

SECPLANNER_PORT       HTTP port (default 8080)
SECPLANNER_DATA_DIR   document store directory (default ./secplanner-data)
SECPLANNER_TOKEN      static bearer token; unset disables auth (local use)
SECPLANNER_UI_ORIGIN  CORS origin allowed to call the API
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

DEFAULT_PORT = 8080
DEFAULT_DATA_DIR = "secplanner-data"


@dataclass(frozen=True)
class ServiceConfig:
    port: int = DEFAULT_PORT
    host: str = "127.0.0.1"
    data_dir: Path = field(default_factory=lambda: Path(DEFAULT_DATA_DIR))
    token: Optional[str] = None
    ui_origin: Optional[str] = None

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        values = {
            "port": int(os.environ.get("SECPLANNER_PORT", DEFAULT_PORT)),
            "data_dir": Path(os.environ.get("SECPLANNER_DATA_DIR", DEFAULT_DATA_DIR)),
            "token": os.environ.get("SECPLANNER_TOKEN"),
            "ui_origin": os.environ.get("SECPLANNER_UI_ORIGIN"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
