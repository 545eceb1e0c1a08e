import os
import json
import logging
from typing import Any, Dict, Optional

from .errors import PreconditionError
from .optimizer import BoundsConfig

logger = logging.getLogger(__name__)

SETTINGS_PATH = os.path.join(os.path.expanduser("~"), ".temporal_ghz", "config.json")


def load_settings(path: Optional[str] = None) -> BoundsConfig:
    """
    Optimizer settings from a JSON file merged over the built-in defaults.

    An explicit path must exist; the default location is optional.
    """
    explicit = path is not None
    path = path or SETTINGS_PATH
    overrides: Dict[str, Any] = {}
    if os.path.exists(path):
        try:
            with open(path, "r") as f:
                overrides = json.load(f)
        except json.JSONDecodeError as e:
            raise PreconditionError(f"settings file {path} is not valid JSON: {e}") from e
        if not isinstance(overrides, dict):
            raise PreconditionError(f"settings file {path} must hold a JSON object")
        logger.info(f"Loaded optimizer settings from {path}")
    elif explicit:
        raise PreconditionError(f"settings file not found: {path}")
    return BoundsConfig.from_dict(overrides)
