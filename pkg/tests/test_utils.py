import io
import logging

from complementary_mubs.utils import PerformanceTimer, configure_logging, derive_seeds, int_rows


def test_configure_logging_levels():
    stream = io.StringIO()
    package_logger = configure_logging(2, stream=stream)
    assert package_logger.level == logging.DEBUG
    assert configure_logging(0, stream=stream).level == logging.WARNING
    assert configure_logging(7, stream=stream).level == logging.DEBUG
    streams = [h for h in package_logger.handlers if isinstance(h, logging.StreamHandler)]
    assert len(streams) == 1


def test_performance_timer_reports_at_debug():
    stream = io.StringIO()
    configure_logging(2, stream=stream)
    with PerformanceTimer("unit", logging.getLogger("complementary_mubs.test")) as timer:
        sum(range(1000))
    assert timer.elapsed_ms >= 0
    assert "[PERF] unit" in stream.getvalue()
    configure_logging(0)


def test_derive_seeds():
    assert derive_seeds(3, 4) == derive_seeds(3, 4)
    assert len(set(derive_seeds(3, 4))) == 4
    assert derive_seeds(3, 4) != derive_seeds(4, 4)


def test_int_rows():
    assert int_rows(((1, 2), (3, 4))) == [[1, 2], [3, 4]]
