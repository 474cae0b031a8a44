"""
Partitioned worker pool with an order-restoring merge.

Work is split into independent partitions, each handed to a thread; results
come back in partition order so callers see the same output as a serial run.
"""

import logging
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

P = TypeVar("P")
R = TypeVar("R")


class ProcessingState(Enum):
    """States of a partitioned run"""

    IDLE = "idle"
    PROCESSING = "processing"
    COMPLETED = "completed"
    ERROR = "error"


@dataclass
class PartitionResult:
    """Outcome of one partition"""

    index: int
    processing_time: float
    result_data: Any
    error: Optional[str] = None


@dataclass
class ProcessingMetrics:
    total_runs: int = 0
    total_partitions: int = 0
    failed_partitions: int = 0
    average_partition_time: float = 0.0
    history: List[float] = field(default_factory=list, repr=False)

    def record(self, result: PartitionResult) -> None:
        self.total_partitions += 1
        if result.error is not None:
            self.failed_partitions += 1
        self.history.append(result.processing_time)
        self.average_partition_time = sum(self.history) / len(self.history)


class PartitionedExecutor:
    """
    Runs a function over partitions on a thread pool.

    With ``jobs == 1`` everything runs inline on the calling thread, so the
    serial path never pays for a pool.
    """

    def __init__(self, jobs: int = 1):
        if jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {jobs}")
        self.jobs = jobs
        self.state = ProcessingState.IDLE
        self.metrics = ProcessingMetrics()
        self._lock = threading.RLock()

    def _run_one(self, fn: Callable[[P], R], index: int, partition: P) -> PartitionResult:
        start = time.perf_counter()
        try:
            data = fn(partition)
        except Exception as exc:
            logger.error("partition %d failed: %s", index, exc)
            result = PartitionResult(index, time.perf_counter() - start, exc, error=str(exc))
        else:
            result = PartitionResult(index, time.perf_counter() - start, data)
        with self._lock:
            self.metrics.record(result)
        return result

    def map_ordered(self, fn: Callable[[P], R], partitions: Iterable[P]) -> List[R]:
        """
        Apply ``fn`` to every partition and return results in partition order.

        The first failing partition's exception is re-raised after all
        partitions have finished.
        """
        items: Sequence[P] = list(partitions)
        self.state = ProcessingState.PROCESSING
        with self._lock:
            self.metrics.total_runs += 1
        logger.debug("running %d partitions on %d workers", len(items), self.jobs)

        if self.jobs == 1 or len(items) <= 1:
            results = [self._run_one(fn, i, item) for i, item in enumerate(items)]
        else:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                futures: Dict[int, Future] = {
                    i: pool.submit(self._run_one, fn, i, item) for i, item in enumerate(items)
                }
                results = [futures[i].result() for i in range(len(items))]

        for result in results:
            if result.error is not None:
                self.state = ProcessingState.ERROR
                raise result.result_data
        self.state = ProcessingState.COMPLETED
        return [result.result_data for result in results]
