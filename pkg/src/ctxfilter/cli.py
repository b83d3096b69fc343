"""Command-line entry point: ``ctxfilter {gen,filter,eval,sweep,bench}``.

Exit status: 0 success, 1 usage error, 2 I/O or format error, 3 validation
error. Errors print one line to stderr: ``ctxfilter: error[<kind>]: <reason>``.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path

from . import __version__
from .bench import DEFAULT_SIZES, bench_scaling
from .core import FilterConfig
from .corpus import load_corpus, write_corpus
from .errors import FormatError, ValidationError
from .evaluate import calibrate, evaluate, evaluate_filtered, filter_corpus, sweep
from .synth import ScenarioSpec, generate

EXIT_USAGE, EXIT_IO, EXIT_VALIDATION = 1, 2, 3

FILTER_FLAGS = {
    "psc_threshold": "psc_threshold",
    "soc_threshold": "soc_threshold",
    "window_chunks": "window_chunks",
    "chunk_frames": "chunk_frames",
    "accumulation": "accumulation",
    "blank_id": "blank_id",
    "drop_blank_frames": "drop_blank_frames",
    "blank_dominance_threshold": "blank_dominance_threshold",
}

SCENARIO_FLAGS = {
    "num_utterances": "num_utterances",
    "utterance_chunks": "utterance_chunks",
    "chunk_frames": "chunk_frames",
    "num_phones": "num_phones",
    "targets_per_utt": "target_words_per_utt",
    "peak_prob": "peak_prob",
    "noise_epsilon": "noise_epsilon",
    "frames_per_phone": "frames_per_phone",
    "list_size": "distractor_list_size",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    parser = _Parser(prog="ctxfilter", description="Two-stage contextual word list filter")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with 'filter' and/or 'scenario' sections")
    common.add_argument("--out", help="output file (gen: output directory); stdout if omitted")
    common.add_argument("--format", choices=["json", "text", "csv"])
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, default=1)

    filt = _Parser(add_help=False)
    filt.add_argument("--psc-threshold", type=float)
    filt.add_argument("--soc-threshold", type=float)
    filt.add_argument("--window-chunks", type=int)
    filt.add_argument("--chunk-frames", type=int)
    filt.add_argument("--accumulation", choices=["union", "final"])
    filt.add_argument("--blank-id", type=int)
    filt.add_argument("--drop-blank-frames", action="store_const", const=True)
    filt.add_argument("--blank-dominance-threshold", type=float)

    corpus = _Parser(add_help=False)
    corpus.add_argument("--manifest", required=True)
    corpus.add_argument("--word-list", required=True)
    corpus.add_argument("--symbols", required=True)

    scen = _Parser(add_help=False)
    scen.add_argument("--num-utterances", type=int)
    scen.add_argument("--utterance-chunks", type=int)
    scen.add_argument("--num-phones", type=int)
    scen.add_argument("--targets-per-utt", type=int)
    scen.add_argument("--peak-prob", type=float)
    scen.add_argument("--noise-epsilon", type=float)
    scen.add_argument("--frames-per-phone", type=int)
    scen.add_argument("--list-size", type=int)
    scen.add_argument("--pron-min", type=int)
    scen.add_argument("--pron-max", type=int)

    p = sub.add_parser("gen", parents=[common, scen], help="write a synthetic corpus")
    p.add_argument("--chunk-frames", type=int)

    sub.add_parser("filter", parents=[common, filt, corpus], help="filter every utterance of a corpus")

    p = sub.add_parser("eval", parents=[common, filt, corpus], help="ERR/ALS report")
    p.add_argument("--filtered", help="score an existing filter output instead of re-filtering")
    p.add_argument("--no-timing", action="store_true", help="omit timing fields from the report")

    p = sub.add_parser("sweep", parents=[common, filt, corpus], help="ERR/ALS over a threshold grid")
    p.add_argument("--psc-grid", type=_floats, default=[0.3, 0.4, 0.5, 0.6, 0.7])
    p.add_argument("--soc-grid", type=_floats, default=[0.0, 0.5, 0.6, 0.7, 0.8])

    p = sub.add_parser("bench", parents=[common, filt, scen], help="filter time versus list size")
    p.add_argument("--sizes", type=_ints, default=list(DEFAULT_SIZES))
    p.add_argument("--warmup", type=int, default=5)
    p.add_argument("--iterations", type=int, default=30)
    return parser


def _read_config(path):
    if not path:
        return {}, {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: config must be a JSON object")
    return dict(doc.get("filter", {})), dict(doc.get("scenario", {}))


def filter_config(args, from_file) -> FilterConfig:
    values = dict(from_file)
    for flag, key in FILTER_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    return FilterConfig.from_dict(values)


def scenario_spec(args, from_file) -> ScenarioSpec:
    values = dict(from_file)
    if "pronunciation_length_range" in values:
        values["pronunciation_length_range"] = tuple(values["pronunciation_length_range"])
    for flag, key in SCENARIO_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    lo, hi = values.get("pronunciation_length_range", ScenarioSpec.pronunciation_length_range)
    if getattr(args, "pron_min", None) is not None:
        lo = args.pron_min
    if getattr(args, "pron_max", None) is not None:
        hi = args.pron_max
    values["pronunciation_length_range"] = (lo, hi)
    if args.seed is not None:
        values["seed"] = args.seed
    unknown = set(values) - set(ScenarioSpec.__dataclass_fields__)
    if unknown:
        raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
    return ScenarioSpec(**values)


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=1, ensure_ascii=False, sort_keys=False) + "\n"


def _table(rows, columns):
    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.4f}"
        return str(v)

    cells = [[fmt(r[c]) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _csv(rows, columns):
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _corpus(args):
    return load_corpus(args.manifest, args.word_list, args.symbols)


def cmd_gen(args, file_filter, file_scen):
    if not args.out:
        raise UsageError("gen requires --out DIR")
    spec = scenario_spec(args, file_scen)
    corpus = generate(spec, threads=args.threads)
    manifest = write_corpus(corpus, args.out)
    print(manifest, file=sys.stderr)


def filter_output(corpus, results):
    out = {}
    for r in results:
        out[r.utt_id] = [
            {"word_id": s.word_id, "surface": corpus.word_list.by_id(s.word_id).surface, "soc": s.soc}
            for s in r.final
        ]
    return out


def cmd_filter(args, file_filter, file_scen):
    config = filter_config(args, file_filter)
    corpus = _corpus(args)
    results = filter_corpus(corpus, config, threads=args.threads)
    _emit(_dumps(filter_output(corpus, results)), args.out)


def cmd_eval(args, file_filter, file_scen):
    config = filter_config(args, file_filter)
    corpus = _corpus(args)
    if args.filtered:
        try:
            filtered = json.loads(Path(args.filtered).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise FormatError(f"{args.filtered}: invalid JSON ({e})") from None
        try:
            report = evaluate_filtered(corpus, filtered, config)
        except (KeyError, TypeError) as e:
            raise FormatError(f"{args.filtered}: {e}") from None
    else:
        report = evaluate(corpus, config, threads=args.threads)
    fmt = args.format or "json"
    if fmt == "json":
        _emit(_dumps(report.to_dict(timing=not args.no_timing)), args.out)
    elif fmt == "csv":
        _emit(_csv(report.rows, ["utt_id", "ground_truth", "recalled", "final_size"]), args.out)
    else:
        head = f"ERR {report.err_percent if report.err_percent is None else round(report.err_percent, 2)}%  " \
               f"ALS {report.als:.3f}  (list size {report.list_size}, {len(report.rows)} utterances)\n"
        _emit(head + _table(report.rows, ["utt_id", "ground_truth", "recalled", "final_size"]), args.out)


SWEEP_COLUMNS = ["psc_threshold", "soc_threshold", "err_percent", "als"]


def cmd_sweep(args, file_filter, file_scen):
    config = filter_config(args, file_filter)
    corpus = _corpus(args)
    rows = sweep(corpus, args.psc_grid, args.soc_grid, config, threads=args.threads)
    cal = calibrate(rows, len(corpus.word_list))
    fmt = args.format or "csv"
    if fmt == "csv":
        _emit(_csv(rows, SWEEP_COLUMNS), args.out)
    elif fmt == "json":
        doc = {"config": config.to_dict(), "list_size": len(corpus.word_list), "rows": rows,
               "calibration": None if cal is None else vars(cal)}
        _emit(_dumps(doc), args.out)
    else:
        tail = "no grid point meets the calibration targets\n" if cal is None else (
            f"calibrated: psc_threshold={cal.psc_threshold} soc_threshold={cal.soc_threshold}\n")
        _emit(_table(rows, SWEEP_COLUMNS) + tail, args.out)


BENCH_COLUMNS = ["list_size", "mean_ms", "median_ms", "p95_ms", "min_ms", "survivors", "filter_rtf"]


def cmd_bench(args, file_filter, file_scen):
    config = filter_config(args, file_filter)
    if args.warmup < 5 or args.iterations < 30:
        raise ValidationError("bench needs at least 5 warmup and 30 measured iterations")
    spec = scenario_spec(args, dict(file_scen, chunk_frames=config.chunk_frames))
    report = bench_scaling(args.sizes, spec=spec, config=config, warmup=args.warmup,
                           iterations=args.iterations, threads=args.threads)
    fmt = args.format or "text"
    if fmt == "json":
        _emit(_dumps(report.to_dict()), args.out)
    elif fmt == "csv":
        _emit(_csv(report.rows, BENCH_COLUMNS), args.out)
    else:
        m = report.machine
        head = f"# {m['processor']} | {m['platform']} | python {m['python']} | numpy {m['numpy']} | threads {report.threads}\n"
        fit = "  ".join(f"{k}={v:.4g}" for k, v in report.fit.items())
        _emit(head + _table(report.rows, BENCH_COLUMNS) + f"fit: {fit}\n", args.out)


COMMANDS = {"gen": cmd_gen, "filter": cmd_filter, "eval": cmd_eval, "sweep": cmd_sweep, "bench": cmd_bench}


def _fail(kind, code, message):
    print(f"ctxfilter: error[{kind}]: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        file_filter, file_scen = _read_config(getattr(args, "config", None))
        COMMANDS[args.command](args, file_filter, file_scen)
    except UsageError as e:
        return _fail("usage", EXIT_USAGE, e)
    except ValidationError as e:
        return _fail("validation", EXIT_VALIDATION, e)
    except FormatError as e:
        return _fail("format", EXIT_IO, e)
    except OSError as e:
        name = e.filename if e.filename is not None else ""
        return _fail("io", EXIT_IO, f"{name}: {e.strerror or e}")
    except IndexError as e:
        return _fail("validation", EXIT_VALIDATION, e)
    return 0


if __name__ == "__main__":
    sys.exit(main())
