import logging
import sys
import time

import numpy as np

logger = logging.getLogger(__name__)

__version__ = "0.1.0"

# --- DEBUGGING CONFIGURATION ---
# 0 = Warnings only
# 1 = Basic Logs (Status)
# 2 = Performance Tracing (Timings for major steps)
VERBOSITY_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG,
}

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(verbosity=0, stream=None):
    """
    Installs a single stream handler on the package logger.
    Diagnostics always go to stderr so that stdout stays reserved for data.
    """
    level = VERBOSITY_LEVELS.get(max(0, min(verbosity, 2)), logging.WARNING)
    package_logger = logging.getLogger("complementary_mubs")
    for handler in list(package_logger.handlers):
        if not isinstance(handler, logging.NullHandler):
            package_logger.removeHandler(handler)

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package_logger.addHandler(handler)
    package_logger.setLevel(level)
    return package_logger


# --- Profiling Helper ---
class PerformanceTimer:
    """
    Context manager to measure execution time of code blocks.
    Only reports when DEBUG logging is enabled.
    """

    def __init__(self, name, log=None):
        self.name = name
        self.log = log if log is not None else logger
        self.start = 0.0
        self.elapsed_ms = 0.0

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.elapsed_ms = (time.perf_counter() - self.start) * 1000
        if self.log.isEnabledFor(logging.DEBUG):
            self.log.debug(f"[PERF] {self.name:<30}: {self.elapsed_ms:.2f} ms")


def derive_seeds(seed, count):
    """Independent child seeds for per-task RNG streams, stable for a given master seed."""
    children = np.random.SeedSequence(int(seed)).spawn(int(count))
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def int_rows(rows):
    """Converts nested tuples of residues to plain lists of ints (JSON friendly)."""
    return [[int(x) for x in row] for row in rows]
