"""Stage 8: Report output"""

import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from core.enums import ReportFormat
from core.interfaces import Stage
from core.models import CommandReport, OutputResult, RunConfig

logger = logging.getLogger(__name__)


def _write_json(payload: Any, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")


class OutputManager(Stage[CommandReport, OutputResult]):
    """Stage 8: write report tables as CSV (plus run_config.json) or one nested JSON"""

    def __init__(self, config: RunConfig):
        self.config = config

    @property
    def name(self) -> str:
        return "Report Output"

    @property
    def stage_number(self) -> int:
        return 8

    def validate_input(self, input_data: CommandReport) -> bool:
        return isinstance(input_data, CommandReport) and input_data.command == self.config.command

    async def execute(self, input_data: CommandReport) -> OutputResult:
        report_dir = Path(input_data.report_dir or self.config.paths.out or ".")
        report_dir.mkdir(parents=True, exist_ok=True)
        config_payload = self.config.model_dump(mode="json")

        if self.config.report_format == ReportFormat.JSON:
            path = report_dir / f"{_slug(input_data.command)}_report.json"
            _write_json({
                "config": config_payload,
                "tables": input_data.tables,
                "details": input_data.details,
                "outputs": input_data.outputs,
                "failures": input_data.failures,
            }, path)
            report_files = [str(path)]
            config_file = None
        else:
            report_files = []
            for name, rows in input_data.tables.items():
                path = report_dir / f"{name}.csv"
                pd.DataFrame(rows).to_csv(path, index=False)
                report_files.append(str(path))
            if input_data.details:
                path = report_dir / f"{_slug(input_data.command)}_details.json"
                _write_json(input_data.details, path)
                report_files.append(str(path))
            config_file = report_dir / "run_config.json"
            _write_json(config_payload, config_file)
            config_file = str(config_file)

        for path in report_files:
            logger.info("Wrote %s", path)
        return OutputResult(
            report_files=report_files,
            config_file=config_file,
            n_failures=len(input_data.failures),
        )


def _slug(command: str) -> str:
    return command.replace("-", "_")
