import logging

import utils.logger as logger_module
from utils.logger import Logger, setup_logger


def test_setup_logger_attaches_handlers_once(tmp_path, monkeypatch):
    monkeypatch.setattr(logger_module, 'LOGS_DIR', tmp_path / "logs")
    log = setup_logger("l96_closure_test")
    try:
        first = list(log.handlers)
        assert setup_logger("l96_closure_test") is log
        assert log.handlers == first
        assert any(isinstance(h, logging.handlers.RotatingFileHandler) for h in first)
        assert list((tmp_path / "logs").glob("l96_closure_*.log"))
    finally:
        for handler in list(log.handlers):
            handler.close()
            log.removeHandler(handler)
        log._l96_configured = False


def test_wrapper_names_the_channel(caplog):
    with caplog.at_level(logging.INFO, logger="experiment.pipeline"):
        Logger("experiment.pipeline").info("Stage x_star done")
    assert caplog.records[-1].name == "experiment.pipeline"
    assert caplog.records[-1].message == "Stage x_star done"
