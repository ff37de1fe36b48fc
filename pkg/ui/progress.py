"""Progress tracking"""

from abc import ABC, abstractmethod

import click


class ProgressTracker(ABC):
    """Abstract progress tracker"""

    @abstractmethod
    def start_stage(self, stage_num: int, stage_name: str):
        """Start a stage"""
        pass

    @abstractmethod
    def advance(self, stage_num: int, done: int, total: int, item: str = ""):
        """One work item of the running stage finished"""
        pass

    @abstractmethod
    def complete_stage(self, stage_num: int):
        """Complete a stage"""
        pass

    @abstractmethod
    def fail(self, stage_num: int, message: str):
        """Mark stage as failed"""
        pass

    @abstractmethod
    def complete(self):
        """Mark the run as complete"""
        pass


class ConsoleProgress(ProgressTracker):
    """Stage progress on stderr, so reports on stdout stay clean"""

    def __init__(self, verbose: bool = False):
        self.stages: dict[int, str] = {}
        self.completed = set()
        self.current = None
        self.verbose = verbose

    def start_stage(self, stage_num: int, stage_name: str):
        self.current = stage_num
        self.stages[stage_num] = stage_name
        click.echo(f"[◉] Stage {stage_num}: {stage_name}...", err=True)

    def advance(self, stage_num: int, done: int, total: int, item: str = ""):
        if self.verbose or done == total:
            suffix = f" ({item})" if item else ""
            click.echo(f"    {done}/{total}{suffix}", err=True)

    def complete_stage(self, stage_num: int):
        self.completed.add(stage_num)
        self.current = None
        click.echo(f"[✓] Stage {stage_num}: {self.stages.get(stage_num, 'Unknown')} complete", err=True)

    def fail(self, stage_num: int, message: str):
        click.echo(
            f"[✗] Stage {stage_num}: {self.stages.get(stage_num, 'Unknown')} failed - {message}",
            err=True,
        )

    def complete(self):
        click.echo("[✓] Done", err=True)


class SilentProgress(ProgressTracker):
    """Records events without printing; used by tests and library callers"""

    def __init__(self):
        self.events: list[tuple] = []

    def start_stage(self, stage_num: int, stage_name: str):
        self.events.append(("start", stage_num, stage_name))

    def advance(self, stage_num: int, done: int, total: int, item: str = ""):
        self.events.append(("advance", stage_num, done, total))

    def complete_stage(self, stage_num: int):
        self.events.append(("complete_stage", stage_num))

    def fail(self, stage_num: int, message: str):
        self.events.append(("fail", stage_num, message))

    def complete(self):
        self.events.append(("complete",))
