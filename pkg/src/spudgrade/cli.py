"""Command-line front end.

Exit codes: 0 graded, 1 ungradable image (empty ROI), 2 operational failure
(unreadable file, bad format, bad arguments, write failure).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from spudgrade import bench, frame_ref, imgio, stream_hw, synthgen
from spudgrade.core import NoRoiError, SpudGradeError, Thresholds, format_percent
from spudgrade.hdl_emit import EmitConfig, InvalidConfig, emit_pipeline

EXIT_OK = 0
EXIT_NO_ROI = 1
EXIT_FAILURE = 2

THREADS_ENV = "SPUDGRADE_THREADS"


def _ranged_int(lo: int, hi: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        if not lo <= value <= hi:
            raise argparse.ArgumentTypeError(f"{value} outside [{lo}, {hi}]")
        return value
    return parse


def _positive_int(text: str) -> int:
    return _ranged_int(1, sys.maxsize)(text)


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{value} must be positive")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} outside [0, 1]")
    return value


def _dims(text: str) -> tuple[int, int]:
    try:
        w, h = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got {text!r}")
    return w, h


def _thresholds(args) -> Thresholds:
    return Thresholds(t_blue=args.t_blue, t_diff=args.t_diff)


def _err(message: str) -> None:
    print(f"spudgrade: {message}", file=sys.stderr)


def grade_frame(frame, thresholds: Thresholds, backend: str, clock_ns: float):
    """Run one backend. Returns ``(report, roi, green, overlay, cycle_stats)``.

    ``roi`` and ``green`` are None for the stream backend, which never
    materializes masks; ``cycle_stats`` is None for the frame backend.
    """
    if backend == "frame":
        report, roi, green = frame_ref.analyze_frame(frame, thresholds)
        overlay = frame_ref.render_overlay(frame, green, thresholds.marker)
        return report, roi, green, overlay, None
    report, overlay, stats = stream_hw.run_stream(
        stream_hw.serialize(frame), thresholds, stream_hw.ClockConfig(clock_ns)
    )
    return report, None, None, overlay, stats


def report_json(frame, report, warnings, stats=None) -> dict:
    out = {
        "width": frame.width,
        "height": frame.height,
        "roi_pixels": report.roi_pixels,
        "green_pixels": report.green_pixels,
        "green_percent_centi": report.percent_centi,
        "grade": report.grade.value,
        "backend": report.backend,
        "params": {"t_blue": report.thresholds.t_blue, "t_diff": report.thresholds.t_diff},
        "warnings": [str(w) for w in warnings],
    }
    if stats is not None:
        out["cycles"] = stats.cycles
        out["hw_time_ns"] = round(stats.estimated_time_ns, 6)
    return out


def _text_report(path, frame, report, stats) -> str:
    lines = [
        f"file:          {path} ({frame.width}x{frame.height})",
        f"backend:       {report.backend}",
        f"t_blue/t_diff: {report.thresholds.t_blue} / {report.thresholds.t_diff}",
        f"roi pixels:    {report.roi_pixels}",
        f"green pixels:  {report.green_pixels}",
        f"green share:   {format_percent(report.percent_centi)}%",
        f"grade:         {report.grade.value}",
    ]
    if stats is not None:
        lines.append(
            f"hw model:      {stats.cycles} cycles at {stats.clock_period_ns:g} ns "
            f"= {stats.estimated_time_ns:.1f} ns"
        )
    return "\n".join(lines)


def _figure_masks(frame, thresholds):
    roi = frame_ref.roi_mask(frame, thresholds.t_blue)
    return roi, frame_ref.green_mask(frame, roi, thresholds.t_diff)


def cmd_grade(args) -> int:
    thresholds = _thresholds(args)
    try:
        frame = imgio.load_image(args.path)
    except (OSError, imgio.ImageFormatError) as exc:
        _err(f"cannot read {args.path}: {exc}")
        return EXIT_FAILURE

    warnings = frame_ref.validate_capture(frame, thresholds)
    try:
        report, roi, green, overlay, stats = grade_frame(frame, thresholds, args.backend, args.clock_ns)
    except NoRoiError as exc:
        _err(f"{args.path}: NoRoi: {exc}")
        return EXIT_NO_ROI

    try:
        if args.overlay:
            imgio.save_image(overlay, args.overlay)
        if args.figure:
            from spudgrade import plotting

            if roi is None:
                roi, green = _figure_masks(frame, thresholds)
            plotting.grade_panels(frame, roi, green, overlay, report, args.figure)
    except (OSError, imgio.ImageFormatError) as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_FAILURE

    if args.json:
        print(json.dumps(report_json(frame, report, warnings, stats)))
    else:
        print(_text_report(args.path, frame, report, stats))
        for w in warnings:
            _err(f"warning: {w}")
    return EXIT_OK


def _batch_one(path: Path, args, thresholds: Thresholds):
    """Grade one file for batch mode. Returns ``(json_line_dict, exit_status)``."""
    entry = {"file": path.name}
    try:
        frame = imgio.load_image(path)
    except (OSError, imgio.ImageFormatError) as exc:
        entry.update(error="read_failed", message=str(exc))
        return entry, EXIT_FAILURE
    warnings = frame_ref.validate_capture(frame, thresholds)
    try:
        report, _, _, overlay, stats = grade_frame(frame, thresholds, args.backend, args.clock_ns)
    except NoRoiError as exc:
        entry.update(error="no_roi", message=str(exc))
        return entry, EXIT_NO_ROI
    if args.overlay_dir:
        try:
            out = Path(args.overlay_dir)
            out.mkdir(parents=True, exist_ok=True)
            imgio.save_image(overlay, out / f"{path.stem}.overlay.ppm")
        except OSError as exc:
            entry.update(error="write_failed", message=str(exc))
            return entry, EXIT_FAILURE
    entry.update(report_json(frame, report, warnings, stats))
    return entry, EXIT_OK


def _summary_table(entries) -> str:
    rows = [("file", "grade", "green%", "roi", "green")]
    tally = {"not_damaged": 0, "damaged": 0, "seriously_damaged": 0, "failed": 0}
    for e in entries:
        if "error" in e:
            rows.append((e["file"], f"error:{e['error']}", "-", "-", "-"))
            tally["failed"] += 1
        else:
            rows.append((
                e["file"], e["grade"], format_percent(e["green_percent_centi"]),
                str(e["roi_pixels"]), str(e["green_pixels"]),
            ))
            tally[e["grade"]] += 1
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.append(f"{len(entries)} files: " + ", ".join(f"{v} {k}" for k, v in tally.items()))
    return "\n".join(lines)


def batch_workers(requested: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            _err(f"ignoring non-integer {THREADS_ENV}={cap!r}")
    return max(1, requested)


def cmd_batch(args) -> int:
    thresholds = _thresholds(args)
    directory = Path(args.dir)
    if not directory.is_dir():
        _err(f"{directory} is not a directory")
        return EXIT_FAILURE
    files = sorted(
        (p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in imgio.SUPPORTED_EXTENSIONS),
        key=lambda p: p.name,
    )
    workers = batch_workers(args.jobs)
    if workers == 1:
        results = [_batch_one(p, args, thresholds) for p in files]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: _batch_one(p, args, thresholds), files))

    for entry, _ in results:
        print(json.dumps(entry))
    entries = [e for e, _ in results]
    print(_summary_table(entries), file=sys.stderr)

    if args.figure:
        from spudgrade import plotting

        graded = [(e["file"], e["green_percent_centi"]) for e in entries if "error" not in e]
        try:
            plotting.batch_summary(graded, args.figure)
        except OSError as exc:
            _err(f"cannot write figure: {exc}")
            return EXIT_FAILURE
    return max((status for _, status in results), default=EXIT_OK)


def cmd_synth(args) -> int:
    corpus = synthgen.generate_corpus(args.count, args.dims, args.seed, fraction=args.fraction)
    try:
        written = synthgen.write_corpus(corpus, args.out_dir)
    except OSError as exc:
        _err(f"cannot write corpus: {exc}")
        return EXIT_FAILURE
    for path, (_, truth) in zip(written, corpus):
        print(f"{path}  roi={truth.roi_pixels} green={truth.green_pixels}")
    return EXIT_OK


def cmd_bench(args) -> int:
    thresholds = _thresholds(args)
    if args.path and not args.synthetic:
        try:
            frame = imgio.load_image(args.path)
        except (OSError, imgio.ImageFormatError) as exc:
            _err(f"cannot read {args.path}: {exc}")
            return EXIT_FAILURE
    else:
        rng = np.random.default_rng(0)
        frame, _ = synthgen.generate(synthgen.random_spec(rng, *args.dims, 0.3), thresholds)
    try:
        report = bench.run_bench(frame, thresholds, stream_hw.ClockConfig(args.clock_ns), args.iterations)
    except NoRoiError as exc:
        _err(f"NoRoi: {exc}")
        return EXIT_NO_ROI

    if args.json:
        out = report.to_dict()
        out["published_ratio"] = bench.published_ratio()
        print(json.dumps(out))
    else:
        print(bench.render_report(report))
    if args.figure:
        from spudgrade import plotting

        try:
            plotting.bench_bars(report, bench.PUBLISHED_SW_PER_CALL_S * 1e9, bench.PUBLISHED_CLOCK_NS, args.figure)
        except OSError as exc:
            _err(f"cannot write figure: {exc}")
            return EXIT_FAILURE
    return EXIT_OK


def cmd_emit_hdl(args) -> int:
    width, height = args.dims
    try:
        config = EmitConfig(_thresholds(args), width, height, args.module_name)
    except InvalidConfig as exc:
        _err(str(exc))
        return EXIT_FAILURE
    text = emit_pipeline(config)
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as exc:
        _err(f"cannot write {args.out}: {exc}")
        return EXIT_FAILURE
    print(f"wrote {args.out} ({config.counter_bits}-bit counters, {width}x{height})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    thresholds = argparse.ArgumentParser(add_help=False)
    thresholds.add_argument("--t-blue", type=_ranged_int(0, 256), default=Thresholds.t_blue,
                            help="ROI cut: pixel is in the ROI iff blue < T (default %(default)s)")
    thresholds.add_argument("--t-diff", type=_ranged_int(-255, 256), default=Thresholds.t_diff,
                            help="green cut: ROI pixel is green iff red - green < T (default %(default)s)")

    grading = argparse.ArgumentParser(add_help=False, parents=[thresholds])
    grading.add_argument("--backend", choices=("frame", "stream"), default="stream")
    grading.add_argument("--json", action="store_true", help="emit a JSON report")
    grading.add_argument("--clock-ns", type=_positive_float, default=stream_hw.DEFAULT_CLOCK_NS,
                         help="modeled clock period (default %(default)s)")

    parser = argparse.ArgumentParser(prog="spudgrade", description="Grade potato greening in RGB images.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grade", parents=[grading], help="grade one image")
    p.add_argument("path")
    p.add_argument("--overlay", metavar="OUT", help="write the overlay image (.ppm or .png)")
    p.add_argument("--figure", metavar="PNG", help="write a mask/overlay panel figure")
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("batch", parents=[grading], help="grade every image in a directory")
    p.add_argument("dir")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--overlay-dir", metavar="DIR", help="write <stem>.overlay.ppm files here")
    p.add_argument("--figure", metavar="PNG", help="write a per-file percentage chart")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("synth", help="write a synthetic corpus with ground truth")
    p.add_argument("--count", type=_positive_int, default=9)
    p.add_argument("--dims", type=_dims, default=(640, 480))
    p.add_argument("--fraction", type=_fraction, default=None,
                   help="green target for every image (default: a schedule across both grade limits)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", parents=[thresholds], help="time the software backends against the hardware model")
    p.add_argument("path", nargs="?")
    p.add_argument("--synthetic", action="store_true", help="bench a generated image instead of a file")
    p.add_argument("--dims", type=_dims, default=(640, 480), help="size of the synthetic image")
    p.add_argument("--iterations", type=_ranged_int(3, 10_000), default=5)
    p.add_argument("--clock-ns", type=_positive_float, default=stream_hw.DEFAULT_CLOCK_NS)
    p.add_argument("--json", action="store_true")
    p.add_argument("--figure", metavar="PNG")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("emit-hdl", parents=[thresholds], help="write the pipeline as Verilog")
    p.add_argument("--out", default="pipeline.v")
    p.add_argument("--dims", type=_dims, default=(640, 480))
    p.add_argument("--module-name", default="green_pipeline")
    p.set_defaults(func=cmd_emit_hdl)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpudGradeError as exc:
        _err(str(exc))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
