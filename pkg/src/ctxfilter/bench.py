"""Filter cost versus word-list size.

Each point times ``filter_window`` on one fixed window after warmup and
reports mean, median and p95 wall time. A least-squares line of time against
list size and a log-log slope summarise the scaling. ``filter_rtf`` divides
the per-window cost by the audio duration of one chunk: the filter runs once
per incoming chunk, so this is the filter's contribution to the real time
factor.
"""

from __future__ import annotations

import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .core import FilterConfig, WordList
from .filtering import filter_window, rank
from .scoring import as_frames
from .synth import ScenarioSpec, make_utterance, make_word_list

DEFAULT_SIZES = (1000, 2000, 4000, 8000)


def machine_info():
    return {
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "cpu_count": os.cpu_count(),
    }


def shard(word_list: WordList, n: int) -> List[WordList]:
    bounds = np.linspace(0, len(word_list), n + 1).astype(int)
    return [WordList(word_list.words[a:b], word_list.symbol_table) for a, b in zip(bounds[:-1], bounds[1:])]


def filter_window_sharded(window, shards: Sequence[WordList], config: FilterConfig, pool) -> list:
    """filter_window over word-list shards in parallel; same output as unsharded."""
    parts = pool.map(lambda wl: filter_window(window, wl, config), shards)
    return rank([s for part in parts for s in part])


@dataclass
class BenchReport:
    rows: List[dict]
    fit: dict
    config: dict
    scenario: dict
    window_frames: int
    threads: int = 1
    machine: dict = field(default_factory=machine_info)

    def to_dict(self):
        return {
            "machine": self.machine,
            "config": self.config,
            "scenario": self.scenario,
            "window_frames": self.window_frames,
            "threads": self.threads,
            "rows": self.rows,
            "fit": self.fit,
        }


def fit_scaling(sizes, seconds):
    sizes = np.asarray(sizes, dtype=float)
    seconds = np.asarray(seconds, dtype=float)
    out = {}
    if sizes.size >= 2:
        slope, intercept = np.polyfit(sizes, seconds, 1)
        out.update(slope_s_per_word=float(slope), intercept_s=float(intercept))
    pos = (sizes > 0) & (seconds > 0)
    if pos.sum() >= 2:
        exponent, _ = np.polyfit(np.log(sizes[pos]), np.log(seconds[pos]), 1)
        out["loglog_exponent"] = float(exponent)
    return out


def default_window(spec: ScenarioSpec, word_list: WordList, window_chunks: int):
    """A ``window_chunks``-chunk synthetic window with words from ``word_list`` planted."""
    s = replace(spec, utterance_chunks=window_chunks, num_utterances=1)
    seq = np.random.SeedSequence(spec.seed).spawn(3)[2]
    return make_utterance(s, word_list, 0, seq).posteriors.frames


def time_call(fn, warmup, iterations):
    for _ in range(warmup):
        fn()
    out = []
    for _ in range(iterations):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return np.array(out)


def bench_scaling(
    list_sizes=DEFAULT_SIZES,
    window=None,
    spec: Optional[ScenarioSpec] = None,
    config: Optional[FilterConfig] = None,
    warmup: int = 5,
    iterations: int = 30,
    threads: int = 1,
    chunk_seconds: float = 0.48,
) -> BenchReport:
    """Time filter_window at each list size.

    Word lists of different sizes are prefixes of one generated list, so a
    larger list contains every word of a smaller one.
    """
    if warmup < 1 or iterations < 1:
        raise ValueError("warmup and iterations must be positive")
    config = config or FilterConfig()
    sizes = [int(n) for n in list_sizes]
    if any(n < 0 for n in sizes):
        raise ValueError("list sizes must be non-negative")
    spec = spec or ScenarioSpec(chunk_frames=config.chunk_frames)
    spec = replace(spec, distractor_list_size=max(sizes + [spec.target_words_per_utt, 1]))
    full = make_word_list(spec, np.random.default_rng(np.random.SeedSequence(spec.seed).spawn(2)[0]))
    if window is None:
        window = default_window(spec, full, config.window_chunks)
    window = as_frames(window)

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    rows = []
    try:
        for n in sizes:
            wl = WordList(full.words[:n], full.symbol_table)
            if pool is None:
                fn = lambda: filter_window(window, wl, config)  # noqa: E731
            else:
                shards = shard(wl, threads)
                fn = lambda: filter_window_sharded(window, shards, config, pool)  # noqa: E731
            survivors = len(fn())
            t = time_call(fn, warmup, iterations)
            rows.append({
                "list_size": n,
                "mean_ms": float(t.mean() * 1e3),
                "median_ms": float(np.median(t) * 1e3),
                "p95_ms": float(np.percentile(t, 95) * 1e3),
                "min_ms": float(t.min() * 1e3),
                "survivors": survivors,
                "filter_rtf": float(np.median(t) / chunk_seconds),
            })
    finally:
        if pool is not None:
            pool.shutdown()
    fit = fit_scaling([r["list_size"] for r in rows], [r["median_ms"] / 1e3 for r in rows])
    return BenchReport(rows, fit, config.to_dict(), spec.to_dict(), int(window.shape[0]), threads)
