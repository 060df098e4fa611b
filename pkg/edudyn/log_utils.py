"""Logging utilities.

Sweeps run on thread and process pools, so the logger can tag every line with
the worker's process or thread id.

Functions:
    configure_logger: Build the package logger with a stderr handler.
    log_memory_usage: Log the memory held by the process and its sweep workers.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from typing import Literal

import psutil
from psutil._common import bytes2human

LOGGER_NAME = "edudyn"

_FORMATS = {
    "process": "[%(levelname)s] %(name)s-%(process)d: %(message)s",
    "thread": "[%(levelname)s] %(name)s-%(thread)d: %(message)s",
    "none": "[%(levelname)s] %(name)s: %(message)s",
}


def configure_logger(
    logger_name: str = LOGGER_NAME,
    id_type: Literal["process", "thread", "none"] = "none",
    level: int = logging.INFO,
) -> logging.Logger:
    """Return ``logger_name`` writing to stderr, optionally tagged with the worker id.

    Existing handlers are replaced, so calling this again (for example in a pool
    initializer) never duplicates output.
    """
    logger = logging.getLogger(logger_name)

    logger.propagate = False
    if logger.hasHandlers():
        logger.handlers.clear()

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(_FORMATS[id_type]))
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger


def log_memory_usage(pid: int | None = None) -> None:
    """Log resident and virtual memory of the process and every live child process."""
    logger = logging.getLogger(LOGGER_NAME)
    try:
        process = psutil.Process(pid or os.getpid())
        main_memory = process.memory_info()
        total_rss, total_vms = main_memory.rss, main_memory.vms
        logger.debug(
            "Main process memory: %s",
            json.dumps({key: bytes2human(value) for key, value in main_memory._asdict().items()}),
        )

        for child in process.children(recursive=True):
            if not child.is_running() or child.status() == psutil.STATUS_ZOMBIE:
                continue
            try:
                child_memory = child.memory_info()
            except (psutil.AccessDenied, psutil.NoSuchProcess):
                logger.warning("Cannot read memory of worker PID %d", child.pid)
                continue
            total_rss += child_memory.rss
            total_vms += child_memory.vms
            logger.debug(
                "Worker PID %d: RSS %s, VMS %s",
                child.pid,
                bytes2human(child_memory.rss),
                bytes2human(child_memory.vms),
            )

        logger.info("Memory in use - RSS: %s, VMS: %s", bytes2human(total_rss), bytes2human(total_vms))
    except psutil.Error:
        logger.exception("Failed to track memory")
