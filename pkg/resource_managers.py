#!/usr/bin/env python3
"""
Resource management context managers for the leakage analyzer.
Provides a wall-clock deadline for long analyses and crash-safe output files.
"""

import os
import time
import logging
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, TextIO

from exceptions import TimeoutExceededError


logger = logging.getLogger(__name__)


class Deadline:
    """Wall-clock budget shared by the engines of one analysis run."""

    def __init__(self, seconds: Optional[float]):
        self.seconds = seconds
        self.started = time.monotonic()
        self._expires = None if seconds is None else self.started + seconds

    def remaining(self) -> Optional[float]:
        """Seconds left before expiry, or None when unbounded."""
        if self._expires is None:
            return None
        return max(0.0, self._expires - time.monotonic())

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def check(self) -> None:
        """
        Raise once the deadline has passed.

        Raises:
            TimeoutExceededError: If the wall-clock cap is reached
        """
        if self._expires is not None and time.monotonic() > self._expires:
            raise TimeoutExceededError(self.seconds if self.seconds is not None else 0.0)


# Shared instance for callers that run without a deadline
UNBOUNDED = Deadline(None)


@contextmanager
def analysis_deadline(seconds: Optional[float]) -> Iterator[Deadline]:
    """
    Context manager bounding an analysis by wall-clock time.

    Args:
        seconds: Maximum duration, or None for no limit

    Yields:
        Deadline: Object whose check() raises TimeoutExceededError after expiry

    Example:
        with analysis_deadline(600) as deadline:
            while work_left():
                deadline.check()
    """
    deadline = Deadline(seconds)
    try:
        yield deadline
    finally:
        logger.debug(f"Analysis finished after {deadline.elapsed():.2f}s (cap: {seconds})")


@contextmanager
def atomic_output(path: str, encoding: str = "utf-8") -> Iterator[TextIO]:
    """
    Context manager writing a text file atomically.

    Content goes to a temporary sibling that replaces the target only when the
    block exits cleanly; on error the temporary file is removed and the target
    is left untouched.

    Args:
        path: Destination file path
        encoding: Text encoding

    Yields:
        TextIO: Writable handle on the temporary file
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    handle = os.fdopen(fd, "w", encoding=encoding, newline="")
    try:
        yield handle
        handle.close()
        os.replace(tmp_name, target)
        logger.debug(f"Wrote {target}")
    except BaseException:
        handle.close()
        try:
            os.unlink(tmp_name)
        except OSError as e:
            logger.warning(f"Could not remove temporary file {tmp_name}: {e}")
        raise
