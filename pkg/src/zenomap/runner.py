"""Config-driven experiment runner: scenarios, CSV series, and SVG charts.

A run is described by a flat ``key = value`` text document (``#`` starts a
comment, unknown keys are rejected). The defaults reproduce the canonical
kicked-rotator scenario: initial state 500, kick strength 10, period 1,
momentum window halfwidth 2000. Scenario presets a-d select the four
measurement schedules (none / initial state every kick / all states every
200 kicks / all states every kick).

Reproducibility contract: a run is a pure function of (config, seed).
Measurement phases for realization ``r`` come from the substream
``SeedSequence(seed, spawn_key=(0, r))``; a random level spectrum is drawn
once from ``SeedSequence(seed)`` and shared by every realization (the
spectrum is a property of the system, not of the trajectory). Realizations
may evolve on a thread pool capped by the ``ZENO_MAP_THREADS`` environment
variable; results are aggregated in realization order, so output bytes do
not depend on the thread count.
"""

from __future__ import annotations

import dataclasses
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .classical import ClassicalEnsemble, ensemble_series
from .errors import ConfigError, TruncationOverflowError
from .kick_engine import (
    BasisWindow,
    QuantumState,
    SpectrumModel,
    build_kernel,
    step,
)
from .measurement import (
    MeasurementSchedule,
    PhaseRandomizer,
    apply_measurement,
    should_measure,
)
from .observables import DispersionSeries, dispersion
from .two_level import ProbabilityPair, measured_evolve_closed

THREADS_ENV = "ZENO_MAP_THREADS"

EXPERIMENTS = ("zeno", "kicked", "classical")
SPECTRA = ("rotator", "linear", "random")
MODES = ("none", "initial", "subset", "all")

# Scenario presets: measurement schedule per curve label.
PRESETS = {
    "a": {"measurement_mode": "none", "measurement_period": 1},
    "b": {"measurement_mode": "initial", "measurement_period": 1},
    "c": {"measurement_mode": "all", "measurement_period": 200},
    "d": {"measurement_mode": "all", "measurement_period": 1},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated description of one run."""

    experiment: str
    spectrum: str = "rotator"
    m0: int = 500
    k: float = 10.0
    tau: float = 1.0
    n_kicks: int = 1000
    window_halfwidth: int = 2000
    measurement_mode: str = "none"
    measurement_period: int = 1
    subset: Optional[tuple[int, ...]] = None
    seed: int = 0
    realizations: int = 1
    output_path: Optional[str] = None
    emit_svg: bool = False
    omega: float = 1.0
    particles: int = 10000

    def window(self) -> BasisWindow:
        return BasisWindow.centered(self.m0, self.window_halfwidth)

    def schedule(self) -> MeasurementSchedule:
        mode = self.measurement_mode
        if mode == "none":
            return MeasurementSchedule.none()
        if mode == "all":
            return MeasurementSchedule.all_states(self.measurement_period)
        if mode == "initial":
            return MeasurementSchedule.subset_of((self.m0,), self.measurement_period)
        return MeasurementSchedule.subset_of(self.subset, self.measurement_period)

    def spectrum_model(self, window: BasisWindow) -> SpectrumModel:
        if self.spectrum == "rotator":
            return SpectrumModel.rotator(window, self.tau)
        if self.spectrum == "linear":
            return SpectrumModel.linear(window, self.tau, self.omega)
        return SpectrumModel.random_levels(window, self.tau, self.seed)

    def with_preset(self, letter: str) -> "ExperimentConfig":
        if letter not in PRESETS:
            raise ConfigError(f"unknown preset '{letter}'; choose one of a, b, c, d")
        return dataclasses.replace(self, subset=None, **PRESETS[letter])


# ---------------------------------------------------------------------------
# config parsing

_INT_KEYS = {
    "m0", "n_kicks", "window_halfwidth", "measurement_period",
    "seed", "realizations", "particles",
}
_FLOAT_KEYS = {"k", "tau", "omega"}
_STR_KEYS = {"experiment", "spectrum", "measurement_mode", "output_path"}
_BOOL_KEYS = {"emit_svg"}
_LIST_KEYS = {"subset"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _BOOL_KEYS | _LIST_KEYS


def _parse_scalar(key: str, raw: str, line: int):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"expected an integer, got '{raw}'", key, line) from None
    if key in _FLOAT_KEYS:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"expected a number, got '{raw}'", key, line) from None
        if not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got '{raw}'", key, line)
        return value
    if key in _BOOL_KEYS:
        lowered = raw.lower()
        if lowered in ("true", "false"):
            return lowered == "true"
        raise ConfigError(f"expected true or false, got '{raw}'", key, line)
    if key in _LIST_KEYS:
        try:
            return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
        except ValueError:
            raise ConfigError(
                f"expected comma-separated integers, got '{raw}'", key, line
            ) from None
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a ``key = value`` run document."""
    values: dict = {}
    where: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=lineno)
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in values:
            raise ConfigError(
                f"duplicate key (first set on line {where[key]})", key, lineno
            )
        if not raw:
            raise ConfigError("empty value", key, lineno)
        values[key] = _parse_scalar(key, raw, lineno)
        where[key] = lineno
    if "experiment" not in values:
        raise ConfigError("missing required key 'experiment'")
    config = ExperimentConfig(**values)
    _validate_config(config, where)
    return config


def _fail(message: str, key: str, where: dict[str, int]):
    raise ConfigError(message, key, where.get(key))


def _validate_config(config: ExperimentConfig, where: dict[str, int]) -> None:
    if config.experiment not in EXPERIMENTS:
        _fail(f"must be one of {', '.join(EXPERIMENTS)}", "experiment", where)
    if config.spectrum not in SPECTRA:
        _fail(f"must be one of {', '.join(SPECTRA)}", "spectrum", where)
    if config.measurement_mode not in MODES:
        _fail(f"must be one of {', '.join(MODES)}", "measurement_mode", where)
    if config.k < 0:
        _fail("kick strength must be >= 0", "k", where)
    if config.tau <= 0:
        _fail("kick period must be positive", "tau", where)
    if config.n_kicks < 1:
        _fail("must be >= 1", "n_kicks", where)
    if config.window_halfwidth < 8:
        _fail("must be >= 8 (window of at least 16 states)", "window_halfwidth", where)
    if config.measurement_period < 1:
        _fail("must be >= 1", "measurement_period", where)
    if config.realizations < 1:
        _fail("must be >= 1", "realizations", where)
    if config.particles < 1:
        _fail("must be >= 1", "particles", where)
    if config.seed < 0:
        _fail("must be >= 0", "seed", where)
    if config.measurement_mode == "subset":
        if not config.subset:
            _fail("required when measurement_mode = subset", "subset", where)
        lo = config.m0 - config.window_halfwidth
        hi = config.m0 + config.window_halfwidth
        bad = [m for m in config.subset if not lo <= m <= hi]
        if bad:
            _fail(f"states {bad} outside the window [{lo}, {hi}]", "subset", where)
    elif config.subset is not None:
        _fail("only allowed when measurement_mode = subset", "subset", where)


# ---------------------------------------------------------------------------
# execution

@dataclass
class RunRecord:
    """Everything one run produced."""

    config: ExperimentConfig
    realization_series: list[DispersionSeries]
    aggregate: DispersionSeries
    wall_time: float
    version: str = __version__


def _thread_budget() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got '{raw}'") from None
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {threads}")
    return threads


def _map_realizations(
    fn: Callable[[int], DispersionSeries], count: int
) -> list[DispersionSeries]:
    workers = min(_thread_budget(), count)
    if workers <= 1 or count == 1:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _simulate_kicked(config: ExperimentConfig, realization: int) -> DispersionSeries:
    window = config.window()
    kernel = build_kernel(config.k)
    spectrum = config.spectrum_model(window)
    schedule = config.schedule()
    rng = PhaseRandomizer(config.seed, realization)
    state = QuantumState.delta(window)
    home = window.offset(window.m0)

    n = config.n_kicks
    j = np.arange(n + 1)
    disp = np.zeros(n + 1)
    norm = np.zeros(n + 1)
    p_home = np.zeros(n + 1)
    disp[0] = dispersion(state)
    norm[0] = state.norm_sq()
    p_home[0] = abs(state.amplitudes[home]) ** 2
    try:
        for kick in range(1, n + 1):
            state = step(state, kernel, spectrum)
            if should_measure(schedule, kick):
                state = apply_measurement(state, schedule, rng)
            disp[kick] = dispersion(state)
            norm[kick] = state.norm_sq()
            p_home[kick] = abs(state.amplitudes[home]) ** 2
    except TruncationOverflowError as err:
        raise TruncationOverflowError(
            f"run aborted after kick {state.time_index}: {err}; rerun with a "
            f"window_halfwidth larger than {config.window_halfwidth}",
            edge=err.edge,
            occupation=err.occupation,
        ) from err
    return DispersionSeries(j, disp, norm, p_home)


def _simulate_classical(config: ExperimentConfig, realization: int) -> DispersionSeries:
    ensemble = ClassicalEnsemble.prepared(
        config.particles, float(config.m0), config.tau, config.k
    )
    seq = np.random.SeedSequence(config.seed, spawn_key=(0, realization))
    rng = np.random.Generator(np.random.PCG64(seq))
    return ensemble_series(ensemble, config.n_kicks, rng)


def _simulate_zeno(config: ExperimentConfig, realization: int) -> DispersionSeries:
    # Closed-form measured evolution of the two-level system. For the ladder
    # m in {m0, m0 + 1}, the momentum dispersion reduces to the transfer
    # probability p2, and p_m0 is the survival probability p1.
    phi = 0.5 * config.omega * config.tau
    start = ProbabilityPair(1.0, 0.0)
    n = config.n_kicks
    j = np.arange(n + 1)
    disp = np.zeros(n + 1)
    p_home = np.ones(n + 1)
    for idx in range(n + 1):
        p = measured_evolve_closed(start, phi, idx)
        disp[idx] = p.p2
        p_home[idx] = p.p1
    return DispersionSeries(j, disp, np.ones(n + 1), p_home)


_SIMULATORS = {
    "kicked": _simulate_kicked,
    "classical": _simulate_classical,
    "zeno": _simulate_zeno,
}


def _aggregate(series: Sequence[DispersionSeries]) -> DispersionSeries:
    if len(series) == 1:
        return series[0]
    return DispersionSeries(
        series[0].j,
        np.mean([s.dispersion for s in series], axis=0),
        np.mean([s.norm for s in series], axis=0),
        np.mean([s.p_m0 for s in series], axis=0),
    )


def run_experiment(config: ExperimentConfig) -> RunRecord:
    """Execute every realization of ``config`` and aggregate the series.

    Deterministic given (config, seed): identical inputs produce identical
    records regardless of the thread budget.
    """
    t0 = time.perf_counter()
    simulate = _SIMULATORS[config.experiment]
    series = _map_realizations(
        lambda r: simulate(config, r), config.realizations
    )
    record = RunRecord(
        config=config,
        realization_series=series,
        aggregate=_aggregate(series),
        wall_time=time.perf_counter() - t0,
    )
    return record


# ---------------------------------------------------------------------------
# CSV output

def _format_value(x: float) -> str:
    # repr of a float is the shortest decimal that round-trips exactly
    return repr(float(x))


def render_csv(series: DispersionSeries) -> str:
    lines = ["j,dispersion,norm,p_m0"]
    for idx in range(len(series)):
        lines.append(
            f"{int(series.j[idx])},{_format_value(series.dispersion[idx])},"
            f"{_format_value(series.norm[idx])},{_format_value(series.p_m0[idx])}"
        )
    return "\n".join(lines) + "\n"


def write_csv(record: RunRecord, path: str) -> None:
    """Write the aggregate series as ``j,dispersion,norm,p_m0`` rows."""
    text = render_csv(record.aggregate)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


# ---------------------------------------------------------------------------
# SVG chart

_CHART_W, _CHART_H = 880, 560
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 78, 24, 24, 58
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(hi: float, count: int = 6) -> list[float]:
    if hi <= 0:
        return [0.0]
    raw = hi / max(count - 1, 1)
    magnitude = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * magnitude
    for mult in (1.0, 2.0, 2.5, 5.0):
        if raw <= mult * magnitude:
            step = mult * magnitude
            break
    ticks = []
    value = 0.0
    while value <= hi * (1 + 1e-9):
        ticks.append(value)
        value += step
    return ticks


def _legend_label(config: ExperimentConfig) -> str:
    if config.experiment == "classical":
        return "classical ensemble"
    if config.experiment == "zeno":
        return "two-level readout"
    mode = config.measurement_mode
    if mode == "none":
        return "no measurement"
    period = config.measurement_period
    every = "every kick" if period == 1 else f"every {period} kicks"
    if mode == "all":
        return f"all states, {every}"
    if mode == "initial":
        return f"initial state, {every}"
    states = ",".join(str(m) for m in (config.subset or ()))
    return f"states {{{states}}}, {every}"


def render_chart(records: Sequence[RunRecord]) -> str:
    """Standalone SVG line chart: one polyline per record, dispersion vs j."""
    if not records:
        raise ValueError("no records to chart")
    x_max = max(float(rec.aggregate.j[-1]) for rec in records)
    y_max = max(float(np.max(rec.aggregate.dispersion)) for rec in records)
    x_max = max(x_max, 1.0)
    y_max = max(y_max, 1.0)
    plot_w = _CHART_W - _MARGIN_L - _MARGIN_R
    plot_h = _CHART_H - _MARGIN_T - _MARGIN_B

    def sx(x: float) -> float:
        return _MARGIN_L + plot_w * x / x_max

    def sy(y: float) -> float:
        return _MARGIN_T + plot_h * (1.0 - y / y_max)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_CHART_W}" '
        f'height="{_CHART_H}" viewBox="0 0 {_CHART_W} {_CHART_H}">',
        f'<rect width="{_CHART_W}" height="{_CHART_H}" fill="white"/>',
    ]
    axis_style = 'stroke="black" stroke-width="1"'
    text_style = 'font-family="sans-serif" font-size="13"'
    x0, y0 = sx(0.0), sy(0.0)
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{sx(x_max):.2f}" y2="{y0:.2f}" {axis_style}/>')
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{sy(y_max):.2f}" {axis_style}/>')
    for tick in _nice_ticks(x_max):
        tx = sx(tick)
        parts.append(f'<line x1="{tx:.2f}" y1="{y0:.2f}" x2="{tx:.2f}" y2="{y0 + 5:.2f}" {axis_style}/>')
        parts.append(
            f'<text x="{tx:.2f}" y="{y0 + 20:.2f}" text-anchor="middle" {text_style}>{tick:g}</text>'
        )
    for tick in _nice_ticks(y_max):
        ty = sy(tick)
        parts.append(f'<line x1="{x0 - 5:.2f}" y1="{ty:.2f}" x2="{x0:.2f}" y2="{ty:.2f}" {axis_style}/>')
        parts.append(
            f'<text x="{x0 - 8:.2f}" y="{ty + 4:.2f}" text-anchor="end" {text_style}>{tick:g}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_CHART_H - 14:.2f}" '
        f'text-anchor="middle" {text_style}>kick index j</text>'
    )
    parts.append(
        f'<text x="18" y="{_MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" '
        f'{text_style} transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.2f})">'
        "momentum dispersion</text>"
    )
    for i, rec in enumerate(records):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(
            f"{sx(float(xj)):.2f},{sy(float(yd)):.2f}"
            for xj, yd in zip(rec.aggregate.j, rec.aggregate.dispersion)
        )
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = _MARGIN_T + 18 + 18 * i
        lx = _MARGIN_L + 14
        parts.append(
            f'<line x1="{lx:.2f}" y1="{ly - 4:.2f}" x2="{lx + 26:.2f}" y2="{ly - 4:.2f}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 32:.2f}" y="{ly:.2f}" {text_style}>{_legend_label(rec.config)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_chart(records: Sequence[RunRecord], path: str) -> None:
    """Write the dispersion chart for one or more records as an SVG file."""
    text = render_chart(records)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
