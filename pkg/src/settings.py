"""
Environment-backed settings.

Values come from the process environment, optionally seeded from a `.env`
file (see env.example). Command-line flags override them.
"""

import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Runtime settings read from EH_CERTIFY_* variables"""
    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    budget: int = Field(default=200_000, ge=1)


def get_settings() -> Settings:
    """Load `.env` (if present) and build Settings from the environment"""
    load_dotenv()

    threads = os.getenv("EH_CERTIFY_THREADS", "1")
    budget = os.getenv("EH_CERTIFY_BUDGET", "200000")
    try:
        return Settings(
            threads=int(threads),
            log_level=os.getenv("EH_CERTIFY_LOG_LEVEL", "INFO"),
            budget=int(budget),
        )
    except ValueError as e:
        logger.warning(f"Ignoring malformed EH_CERTIFY_* settings: {e}")
        return Settings()
