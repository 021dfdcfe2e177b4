"""Environment selection for l1rom runs.

``L1ROM_ENV`` picks the active environment; its ``.env.<name>`` file is
layered over the shared ``.env`` before settings are read.
"""

import logging
import os
from enum import Enum
from typing import List, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class Environment(str, Enum):
    """Named sets of solver and output defaults"""

    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


def get_environment() -> Environment:
    """Environment named by L1ROM_ENV; anything unrecognized means development"""
    name = os.getenv("L1ROM_ENV", Environment.DEVELOPMENT.value).strip().lower()
    try:
        return Environment(name)
    except ValueError:
        logger.warning("unknown L1ROM_ENV %r, using development", name)
        return Environment.DEVELOPMENT


def load_env_file(env: Optional[Environment] = None, directory: str = ".") -> List[str]:
    """Load ``.env`` then ``.env.<env>`` from directory

    Variables already set in the process win over ``.env``; the
    environment-specific file wins over both.

    Returns:
        Paths of the files that were found and loaded
    """
    from l1rom.config.settings import get_settings

    env = env or get_environment()
    loaded = []
    shared = os.path.join(directory, ".env")
    if os.path.exists(shared):
        load_dotenv(dotenv_path=shared, override=False)
        loaded.append(shared)
    specific = os.path.join(directory, f".env.{env.value}")
    if os.path.exists(specific):
        load_dotenv(dotenv_path=specific, override=True)
        loaded.append(specific)

    # settings may have been read before the files were loaded
    get_settings.cache_clear()
    logger.debug("environment %s, loaded %s", env.value, loaded or "no env files")
    return loaded
