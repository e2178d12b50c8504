"""Software-vs-hardware timing comparison.

Times both software backends on a frame, takes the per-pixel cost of the
streaming backend as the software figure, and sets it against the modeled
hardware clock. Only definitional consistency is asserted anywhere; the ratio
itself depends entirely on the host.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass
from typing import Callable, Optional

from spudgrade.core import Frame, Thresholds
from spudgrade.frame_ref import analyze_frame
from spudgrade.stream_hw import ClockConfig, run_stream, serialize

# Published reference timings. Software: one interpreted call per pixel.
PUBLISHED_SW_TOTAL_S = 12.01207700
PUBLISHED_SW_CALLS = 307201
PUBLISHED_SW_PER_CALL_S = 3.910168587e-5
# Hardware synthesis report, nanoseconds. Only the minimum period drives estimates.
PUBLISHED_HW_TIMING_NS = {
    "Minimum period": 10.169,
    "Minimum input arrival time before clock": 9.024,
    "Maximum output required time after clock": 6.363,
    "Maximum combinational path delay": 7.114,
}
PUBLISHED_CLOCK_NS = PUBLISHED_HW_TIMING_NS["Minimum period"]


def speedup_ratio(sw_per_pixel_ns: float, clock_period_ns: float) -> float:
    """Per-pixel software time over one hardware clock (one pixel per clock)."""
    if clock_period_ns <= 0:
        raise ValueError("clock period must be positive")
    return sw_per_pixel_ns / clock_period_ns


@dataclass(frozen=True)
class BenchReport:
    width: int
    height: int
    iterations: int
    sw_frame_ns: dict
    sw_per_pixel_ns: float
    hw_cycles: int
    hw_clock_period_ns: float
    hw_frame_ns: float
    speedup_ratio: float

    @property
    def pixels(self) -> int:
        return self.width * self.height

    def to_dict(self) -> dict:
        return asdict(self)


def _median_ns(fn: Callable[[], object], iterations: int, delay_hook) -> float:
    samples = []
    for _ in range(iterations):
        start = time.perf_counter_ns()
        fn()
        if delay_hook is not None:
            delay_hook()
        samples.append(time.perf_counter_ns() - start)
    return float(statistics.median(samples))


def run_bench(
    frame: Frame,
    thresholds: Thresholds = Thresholds(),
    clock: ClockConfig = ClockConfig(),
    iterations: int = 3,
    delay_hook: Optional[Callable[[], None]] = None,
) -> BenchReport:
    """Median wall time of each backend over ``iterations`` runs.

    ``delay_hook`` runs inside every timed region; tests use it to inject an
    artificial delay.
    """
    if iterations < 3:
        raise ValueError("at least 3 iterations are required for a median")
    stream = serialize(frame)
    # grade once outside the timer so backend errors surface before timing
    _, _, stats = run_stream(stream, thresholds, clock)

    sw_frame_ns = {
        "frame": _median_ns(lambda: analyze_frame(frame, thresholds), iterations, delay_hook),
        "stream": _median_ns(lambda: run_stream(serialize(frame), thresholds, clock), iterations, delay_hook),
    }
    per_pixel = sw_frame_ns["stream"] / (frame.width * frame.height)
    return BenchReport(
        width=frame.width,
        height=frame.height,
        iterations=iterations,
        sw_frame_ns=sw_frame_ns,
        sw_per_pixel_ns=per_pixel,
        hw_cycles=stats.cycles,
        hw_clock_period_ns=clock.period_ns,
        hw_frame_ns=stats.estimated_time_ns,
        speedup_ratio=speedup_ratio(per_pixel, clock.period_ns),
    )


def published_ratio() -> float:
    return speedup_ratio(PUBLISHED_SW_PER_CALL_S * 1e9, PUBLISHED_CLOCK_NS)


def _table(title: str, header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    rule = "+".join("-" * (w + 2) for w in widths)
    lines = [title, rule]
    lines.append((" " + " | ".join(h.ljust(w) for h, w in zip(header, widths))).rstrip())
    lines.append(rule)
    for r in rows:
        lines.append((" " + " | ".join(c.ljust(w) for c, w in zip(r, widths))).rstrip())
    lines.append(rule)
    return "\n".join(lines)


def render_report(report: BenchReport) -> str:
    """Two tables in the layout of a software profile and a synthesis timing report."""
    pixels = report.pixels
    sw_rows = []
    for backend, ns in report.sw_frame_ns.items():
        sw_rows.append([
            f"{backend} backend (measured)",
            f"{ns / 1e9:.6f}",
            str(pixels),
            f"{ns / pixels / 1e9:.11f}",
        ])
    sw_rows.append([
        "interpreted reference (published)",
        f"{PUBLISHED_SW_TOTAL_S:.8f}",
        str(PUBLISHED_SW_CALLS),
        f"{PUBLISHED_SW_PER_CALL_S:.11f}",
    ])
    sw = _table(
        f"SOFTWARE TIMING ({report.width}x{report.height}, median of {report.iterations})",
        ["Function", "Time (sec)", "Calls", "Time/call (sec)"],
        sw_rows,
    )
    hw_rows = [
        ["Clock period (model)", f"{report.hw_clock_period_ns:.3f}ns"],
        ["Cycles per frame (pixels + latency)", str(report.hw_cycles)],
        ["Estimated frame time", f"{report.hw_frame_ns:.1f}ns"],
    ]
    hw_rows += [[f"{name} (published)", f"{ns:.3f}ns"] for name, ns in PUBLISHED_HW_TIMING_NS.items()]
    hw = _table("HARDWARE TIMING", ["Timing Constraint", "Delay"], hw_rows)
    summary = (
        f"speedup (sw per pixel / hw clock): {report.speedup_ratio:.1f}x measured, "
        f"{published_ratio():.1f}x from the published figures"
    )
    return "\n\n".join([sw, hw, summary])
