"""
Base runner class for experiment harnesses
"""

import asyncio
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

from .config_loader import ExperimentConfig
from .reporting import ExperimentReport


@dataclass
class TrialTask:
    """One unit of work; ``index`` fixes its position in the report"""
    index: int
    data: Dict[str, Any] = field(default_factory=dict)


class BaseRunner(ABC):
    """Base class for all experiment runners

    Trials run in worker threads behind a semaphore sized by ``config.workers``.
    Every trial derives its randomness from the seed and its own keys, so the
    report does not depend on scheduling order.
    """

    experiment: str = "base"

    def __init__(self, config: ExperimentConfig, runner_id: Optional[str] = None):
        self.config = config
        self.name = self.__class__.__name__
        self.runner_id = runner_id or f"{self.experiment}-{config.seed}"
        self.logger = logging.getLogger(f"runner.{self.name}")

        self.state = "initialized"
        self.completed_trials = 0
        self.total_trials = 0
        self.start_time = datetime.now()

        self.logger.info(f"Runner {self.name} ({self.runner_id}) initialized")

    async def run(self) -> ExperimentReport:
        """Run every trial task and summarize the results"""
        tasks = self.trial_tasks()
        self.total_trials = len(tasks)
        self.state = "running"
        self.logger.info(f"Running {len(tasks)} tasks with {self.config.workers} workers")

        semaphore = asyncio.Semaphore(self.config.workers)

        async def _guarded(task: TrialTask) -> Any:
            async with semaphore:
                result = await asyncio.to_thread(self.run_trial, task)
                self.completed_trials += 1
                self.logger.debug(f"Task {task.index} finished ({self.completed_trials}/{self.total_trials})")
                return result

        try:
            results = await asyncio.gather(*(_guarded(task) for task in tasks))
        except Exception:
            self.state = "failed"
            raise

        report = self.summarize(results)
        self.state = "completed"
        self.logger.info(f"Runner {self.name} completed {self.completed_trials} tasks")
        return report

    @abstractmethod
    def trial_tasks(self) -> List[TrialTask]:
        """Enumerate independent units of work"""
        pass

    @abstractmethod
    def run_trial(self, task: TrialTask) -> Any:
        """Execute one task; runs in a worker thread"""
        pass

    @abstractmethod
    def summarize(self, results: List[Any]) -> ExperimentReport:
        """Turn the ordered task results into a report"""
        pass

    def get_status(self) -> Dict[str, Any]:
        """Get runner status information"""
        uptime = datetime.now() - self.start_time

        return {
            "runner_id": self.runner_id,
            "name": self.name,
            "experiment": self.experiment,
            "state": self.state,
            "completed_trials": self.completed_trials,
            "total_trials": self.total_trials,
            "uptime_seconds": uptime.total_seconds(),
        }

    async def health_check(self) -> bool:
        """Check if runner is healthy"""
        return self.state in ("initialized", "running", "completed")
