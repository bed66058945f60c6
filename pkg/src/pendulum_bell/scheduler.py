"""Square-wave pendulum clock that fixes each trial's measurement settings.

A pendulum is ``LEFT`` during the first half of its cycle and ``RIGHT`` during
the second; a boundary instant belongs to the half that starts there.  Adam's
period is always four times Eve's.  The card and object travel for exactly one
Adam period, so the source decides at ``t_n - adam_period`` and reads the
pendulum copies it carries to learn the settings that will hold at ``t_n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AdamSetting, EveSetting, Side, adam_setting_for, eve_setting_for

PERIOD_RATIO = 4


class ClockError(ValueError):
    pass


@dataclass(frozen=True)
class ClockConfig:
    eve_period: float = 1.0
    sample_interval: float = 0.5
    phase: float = 0.0
    trial_count: int | None = None
    adam_period: float | None = None

    def __post_init__(self) -> None:
        eve = float(self.eve_period)
        if not eve > 0 or not np.isfinite(eve):
            raise ClockError(f"eve_period must be positive, got {self.eve_period!r}")
        adam = PERIOD_RATIO * eve
        if self.adam_period is not None and float(self.adam_period) != adam:
            raise ClockError(
                f"adam_period must be exactly {PERIOD_RATIO} x eve_period = {adam!r}, got {self.adam_period!r}"
            )
        si = float(self.sample_interval)
        if not si > 0 or not np.isfinite(si):
            raise ClockError(f"sample_interval must be positive, got {self.sample_interval!r}")
        if not np.isfinite(float(self.phase)):
            raise ClockError("phase must be finite")
        if self.trial_count is not None and (int(self.trial_count) != self.trial_count or self.trial_count < 0):
            raise ClockError(f"trial_count must be a nonnegative integer, got {self.trial_count!r}")
        object.__setattr__(self, "eve_period", eve)
        object.__setattr__(self, "adam_period", adam)
        object.__setattr__(self, "sample_interval", si)
        object.__setattr__(self, "phase", float(self.phase))


def _is_left(period: float, t):
    return np.mod(t, period) < period / 2


def pendulum_side(period: float, phase: float, t: float) -> Side:
    if not period > 0:
        raise ClockError(f"period must be positive, got {period!r}")
    return Side.LEFT if bool(_is_left(float(period), np.float64(t) + np.float64(phase))) else Side.RIGHT


def measurement_times(clock: ClockConfig, n) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    return n.astype(np.float64) * clock.sample_interval + clock.phase


def sides_for_trials(clock: ClockConfig, n) -> tuple[np.ndarray, np.ndarray]:
    """Boolean ``is_left`` arrays for Adam and Eve at trials ``n``."""
    t = measurement_times(clock, n)
    return _is_left(clock.adam_period, t), _is_left(clock.eve_period, t)


def _check_index(clock: ClockConfig, n: int) -> None:
    if n < 0 or (clock.trial_count is not None and n >= clock.trial_count):
        raise IndexError(f"trial index {n} out of range for trial_count={clock.trial_count}")


def settings_for_trial(clock: ClockConfig, n: int) -> tuple[AdamSetting, EveSetting, Side, Side]:
    _check_index(clock, n)
    adam_left, eve_left = sides_for_trials(clock, n)
    adam_side = Side.LEFT if bool(adam_left) else Side.RIGHT
    eve_side = Side.LEFT if bool(eve_left) else Side.RIGHT
    return adam_setting_for(adam_side), eve_setting_for(eve_side), adam_side, eve_side


def measurement_time(clock: ClockConfig, n: int) -> float:
    return float(measurement_times(clock, n))


def emission_time(clock: ClockConfig, n: int) -> float:
    _check_index(clock, n)
    return measurement_time(clock, n) - clock.adam_period
