#!/usr/bin/env python3
"""
Logging and warning configuration for eh-certify
"""

import logging
import warnings


def suppress_warnings():
    """Suppress third-party warnings that don't affect results"""

    # networkx deprecation chatter (e.g. scipy-backed helpers we never call)
    warnings.filterwarnings(
        "ignore",
        category=DeprecationWarning,
        module="networkx"
    )

    # Pydantic V1/V2 compatibility notices
    warnings.filterwarnings(
        "ignore",
        message=".*deprecated.*",
        category=DeprecationWarning,
        module="pydantic"
    )


def configure_logging(level: int = logging.INFO, suppress_warnings_flag: bool = True):
    """Configure logging with optional warning suppression"""

    if suppress_warnings_flag:
        suppress_warnings()

    # stdout carries JSON payloads, so the handler writes to stderr
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(),
        ],
        force=True
    )

    # Set specific logger levels to reduce noise
    logging.getLogger("networkx").setLevel(logging.WARNING)
    logging.getLogger("hypothesis").setLevel(logging.WARNING)
    logging.getLogger("pydantic").setLevel(logging.WARNING)


def level_from_name(name: str) -> int:
    """Map a level name such as 'debug' onto a logging level, INFO if unknown"""
    level = logging.getLevelName(name.strip().upper())
    return level if isinstance(level, int) else logging.INFO
