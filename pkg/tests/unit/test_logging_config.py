"""Unit tests for wentzell.logging_config."""

from __future__ import annotations

import json
import logging

import pytest

from wentzell.logging_config import LOG_FILE, run_context, setup_logging
from wentzell.solver.study import run_level


@pytest.fixture(autouse=True)
def _reset_logging():
    yield
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        handler.close()


def _json_lines(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


class TestSetupLogging:
    def test_json_lines_on_stderr(self, capsys):
        setup_logging("INFO", "json")
        logging.getLogger("wentzell.solver.runner").info("Solved %d steps", 20)
        captured = capsys.readouterr()
        assert captured.out == ""
        (record,) = _json_lines(captured.err)
        assert record["event"] == "Solved 20 steps"
        assert record["level"] == "info"
        assert record["logger"] == "wentzell.solver.runner"
        assert "timestamp" in record

    def test_level_filters_debug(self, capsys):
        setup_logging("WARNING", "json")
        logging.getLogger("wentzell.solver.stepper").debug("Newton iteration %d", 1)
        logging.getLogger("wentzell.solver.runner").warning("Halving dt")
        records = _json_lines(capsys.readouterr().err)
        assert [r["event"] for r in records] == ["Halving dt"]

    def test_unknown_level_falls_back_to_info(self):
        setup_logging("chatty", "text")
        assert logging.getLogger().level == logging.INFO

    def test_sympy_held_at_warning(self):
        setup_logging("DEBUG", "text")
        assert logging.getLogger("sympy").level == logging.WARNING
        assert logging.getLogger().level == logging.DEBUG

    def test_log_file(self, tmp_path):
        setup_logging("INFO", "text", log_dir=str(tmp_path / "logs"))
        logging.getLogger("wentzell.fem.coercivity").info("M = %.3f", 0.5)
        for handler in logging.getLogger().handlers:
            handler.flush()
        text = (tmp_path / "logs" / LOG_FILE).read_text()
        assert "M = 0.500" in text


class TestRunContext:
    def test_fields_bound_inside_block(self, capsys):
        setup_logging("INFO", "json")
        log = logging.getLogger("wentzell.solver.study")
        with run_context(problem="heaviside_1d", study_level=2):
            log.info("inside")
        log.info("outside")
        inside, outside = _json_lines(capsys.readouterr().err)
        assert inside["problem"] == "heaviside_1d"
        assert inside["study_level"] == 2
        assert inside["level"] == "info"
        assert "problem" not in outside
        assert "study_level" not in outside

    def test_study_level_tagged_on_level_logs(self, capsys, load_problem):
        setup_logging("INFO", "json")
        run_level(load_problem("zero_1d"), 1)
        records = _json_lines(capsys.readouterr().err)
        summary = [r for r in records if r["event"].startswith("Level 1:")]
        assert len(summary) == 1
        assert summary[0]["study_level"] == 1
        assert summary[0]["level"] == "info"
