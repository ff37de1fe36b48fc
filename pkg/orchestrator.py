"""Command orchestrator"""

import logging
from dataclasses import dataclass
from typing import Optional

from core.exceptions import HistosegError, PipelineError, StageError
from core.interfaces import Stage
from core.models import CommandReport, OutputResult, RunConfig
from stages import (
    AutoSegmenter, Evaluator, GridSearcher, InteractiveEvaluator, MaskGenerator,
    OutputManager, SemanticEvaluator, SlideSegmenter, TargetGenerator,
)
from stages.base import CommandStage
from ui.progress import ProgressTracker

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    """What one command produced"""
    config: RunConfig
    report: Optional[CommandReport] = None
    output: Optional[OutputResult] = None

    @property
    def failures(self) -> list[str]:
        return self.report.failures if self.report else []


class Orchestrator:
    """Runs one command stage followed by the output stage"""

    def __init__(self, progress: ProgressTracker):
        self.progress = progress
        self.stages: dict[str, CommandStage] = {
            stage.command: stage
            for stage in (
                TargetGenerator(),
                AutoSegmenter(),
                GridSearcher(),
                Evaluator(),
                MaskGenerator(),
                InteractiveEvaluator(),
                SlideSegmenter(),
                SemanticEvaluator(),
            )
        }

    @property
    def commands(self) -> list[str]:
        return list(self.stages)

    async def run(self, config: RunConfig) -> RunResult:
        """
        Execute the command named in `config` and write its reports

        Raises:
            HistosegError: Domain failures propagate unchanged
            StageError: Anything unexpected raised inside a stage
        """
        if config.command not in self.stages:
            raise PipelineError(f"Unknown command '{config.command}'")
        stage = self.stages[config.command]
        stage.on_item = lambda done, total, item: self.progress.advance(stage.stage_number, done, total, item)

        result = RunResult(config=config)
        result.report = await self._execute_stage(stage, config)
        result.output = await self._execute_stage(OutputManager(config), result.report)
        self.progress.complete()
        return result

    async def _execute_stage(self, stage: Stage, input_data):
        """Execute a single stage with progress tracking"""
        stage_num = stage.stage_number
        self.progress.start_stage(stage_num, stage.name)

        if not stage.validate_input(input_data):
            self.progress.fail(stage_num, "Invalid input")
            raise StageError(stage_num, "Invalid input")

        try:
            result = await stage.execute(input_data)
        except HistosegError as e:
            self.progress.fail(stage_num, str(e))
            raise
        except Exception as e:
            logger.exception("Stage %d (%s) crashed", stage_num, stage.name)
            self.progress.fail(stage_num, str(e))
            raise StageError(stage_num, f"{type(e).__name__}: {e}") from e

        self.progress.complete_stage(stage_num)
        return result
