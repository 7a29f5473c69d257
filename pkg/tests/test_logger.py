import pytest

from confusion_profiler.utils.logger import Logger, LogLevel, get_logger, set_log_level


@pytest.fixture(autouse=True)
def restore_level():
    yield
    set_log_level(LogLevel.INFO)


def test_everything_goes_to_stderr(capsys):
    logger = get_logger("test")
    logger.info("profiling")
    logger.warning("normalized", mass_deficit=0.1)
    logger.success("matched")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "profiling" in captured.err
    assert "mass_deficit=0.1" in captured.err
    assert "SUCCESS" in captured.err


def test_global_level_reaches_existing_loggers(capsys):
    logger = get_logger("test")
    logger.debug("hidden")
    assert capsys.readouterr().err == ""

    set_log_level(LogLevel.DEBUG)
    logger.debug("shown")
    assert "shown" in capsys.readouterr().err


def test_explicit_level_overrides_global(capsys):
    quiet = Logger("quiet", min_level=LogLevel.ERROR)
    quiet.warning("suppressed")
    quiet.success("suppressed too")
    assert capsys.readouterr().err == ""


def test_surface_has_no_table_helpers():
    assert not hasattr(Logger, "table_header")
    assert not hasattr(Logger, "section")
