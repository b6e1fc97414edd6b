"""Context window sizing strategies.

Three strategies are supported:

* ``fixed``: every center word uses the full window ``r``.
* ``random``: a fresh effective window r' is drawn uniformly from
  {1, ..., r} for each center word, so a context word at distance |i|
  participates with probability (r - |i| + 1) / r — a linear decay in
  distance.
* ``edws``: epoch-based dynamic window size. The window grows
  deterministically across epochs in ``phases`` stages (default 3, sizes
  in ratio 1:2:...:phases), each stage running the same number of epochs:

      r'_k = ceil(phases * k / K) * (r / phases),   k = 1..K (1-based).

  Every center word in one epoch then sees the same window, which keeps
  the per-word prediction count uniform within the epoch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FIXED = "fixed"
RANDOM = "random"
EDWS = "edws"

STRATEGIES = (FIXED, RANDOM, EDWS)


@dataclass(frozen=True)
class WindowSchedule:
    """Window strategy descriptor: strategy name, max window, epoch budget."""

    strategy: str
    max_window: int
    total_epochs: int = 1
    phases: int = 3

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"unknown window strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        if self.max_window < 1:
            raise ValueError(f"max_window must be >= 1, got {self.max_window}")
        if self.total_epochs < 1:
            raise ValueError(f"total_epochs must be >= 1, got {self.total_epochs}")
        if self.strategy == EDWS:
            if self.phases < 1:
                raise ValueError(f"phases must be >= 1, got {self.phases}")
            if self.total_epochs % self.phases or self.max_window % self.phases:
                raise ValueError(
                    f"edws needs total_epochs and max_window divisible by phases: "
                    f"got epochs={self.total_epochs}, window={self.max_window}, "
                    f"phases={self.phases} (e.g. epochs=6, window=15 with 3 phases)"
                )


def window_for_epoch(schedule: WindowSchedule, k: int) -> int:
    """Effective window r'_k for 1-based epoch k under the edws strategy."""
    if schedule.strategy != EDWS:
        raise ValueError(f"window_for_epoch requires the edws strategy, not {schedule.strategy!r}")
    if not 1 <= k <= schedule.total_epochs:
        raise ValueError(f"epoch index must be in 1..{schedule.total_epochs}, got {k}")
    phases = schedule.phases
    stage = -(-phases * k // schedule.total_epochs)  # ceil(phases*k / K)
    return stage * (schedule.max_window // phases)


def window_for_center(schedule: WindowSchedule, rng: np.random.Generator) -> int:
    """Draw the per-center effective window r' uniformly from {1, ..., r}."""
    if schedule.strategy != RANDOM:
        raise ValueError(
            f"window_for_center requires the random strategy, not {schedule.strategy!r}"
        )
    return int(rng.integers(1, schedule.max_window + 1))


def epoch_windows(schedule: WindowSchedule) -> list[int]:
    """Effective window per epoch, for all strategies (random reports the max)."""
    if schedule.strategy == EDWS:
        return [window_for_epoch(schedule, k) for k in range(1, schedule.total_epochs + 1)]
    return [schedule.max_window] * schedule.total_epochs


def offset_use_probability(r: int, i: int) -> float:
    """Chance that offset i survives a uniform random window draw: (r-|i|+1)/r."""
    if r < 1 or i == 0 or abs(i) > r:
        raise ValueError(f"need 0 < |i| <= r with r >= 1, got i={i}, r={r}")
    return (r - abs(i) + 1) / r
