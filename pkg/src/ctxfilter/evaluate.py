"""Entity Recall Rate / Average List Size evaluation and threshold sweeps.

ERR is the percentage of ground-truth words (over all utterances with a
non-empty ground truth) that survive filtering; ALS is the mean size of the
final filtered list over all utterances.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .core import Accumulation, FilterConfig
from .corpus import Corpus
from .filtering import FilterSession, ScoredWord, score_window, sliding_windows
from .scoring import as_frames


@dataclass(frozen=True)
class UttResult:
    utt_id: str
    ground_truth: tuple
    final: List[ScoredWord]
    window_seconds: List[float] = field(default_factory=list)

    @property
    def recalled(self) -> int:
        kept = {s.word_id for s in self.final}
        return sum(1 for w in self.ground_truth if w in kept)


@dataclass
class EvalReport:
    err_percent: Optional[float]
    als: float
    list_size: int
    rows: List[dict]
    config: dict
    timing: dict = field(default_factory=dict)

    def to_dict(self, timing=True):
        d = {
            "err_percent": self.err_percent,
            "als": self.als,
            "list_size": self.list_size,
            "num_utterances": len(self.rows),
            "config": self.config,
            "utterances": self.rows,
        }
        if timing and self.timing:
            d["timing"] = self.timing
        return d


def _run_one(utt, word_list, config):
    frames = as_frames(utt.load())
    session = FilterSession(config, word_list)
    times = []
    for start in range(0, frames.shape[0], config.chunk_frames):
        t0 = time.perf_counter()
        session.push_chunk(frames[start : start + config.chunk_frames])
        times.append(time.perf_counter() - t0)
    return UttResult(utt.utt_id, tuple(utt.ground_truth), session.finalize(), times)


def filter_corpus(corpus: Corpus, config: FilterConfig, threads: int = 1) -> List[UttResult]:
    """One streaming session per utterance; results keep corpus order."""
    def one(u):
        return _run_one(u, corpus.word_list, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, corpus.utterances))
    return [one(u) for u in corpus.utterances]


def err_als(truth_sizes, recalled, final_sizes):
    truth_total = int(np.sum(truth_sizes)) if len(truth_sizes) else 0
    err = 100.0 * float(np.sum(recalled)) / truth_total if truth_total else None
    als = float(np.mean(final_sizes)) if len(final_sizes) else 0.0
    return err, als


def report_from_results(results: Sequence[UttResult], list_size: int, config: FilterConfig, wall=None) -> EvalReport:
    rows = [
        {"utt_id": r.utt_id, "ground_truth": len(r.ground_truth), "recalled": r.recalled, "final_size": len(r.final)}
        for r in results
    ]
    err, als = err_als([r["ground_truth"] for r in rows], [r["recalled"] for r in rows], [r["final_size"] for r in rows])
    times = np.array([t for r in results for t in r.window_seconds])
    timing = {"num_windows": int(times.size)}
    if times.size:
        timing.update(
            window_mean_ms=float(times.mean() * 1e3),
            window_p95_ms=float(np.percentile(times, 95) * 1e3),
            scoring_total_s=float(times.sum()),
        )
    if wall is not None:
        timing["wall_s"] = wall
    return EvalReport(err, als, list_size, rows, config.to_dict(), timing)


def evaluate(corpus: Corpus, config: FilterConfig, threads: int = 1) -> EvalReport:
    t0 = time.perf_counter()
    results = filter_corpus(corpus, config, threads)
    return report_from_results(results, len(corpus.word_list), config, wall=time.perf_counter() - t0)


def evaluate_filtered(corpus: Corpus, filtered: Dict[str, list], config: FilterConfig) -> EvalReport:
    """ERR/ALS from previously written filter output (``utt_id -> [{word_id, ...}]``)."""
    results = []
    for u in corpus.utterances:
        if u.utt_id not in filtered:
            raise KeyError(f"filter output has no entry for utterance {u.utt_id!r}")
        final = [ScoredWord(int(e["word_id"]), float("nan"), e.get("soc")) for e in filtered[u.utt_id]]
        results.append(UttResult(u.utt_id, tuple(u.ground_truth), final))
    report = report_from_results(results, len(corpus.word_list), config)
    report.timing = {}
    return report


@dataclass(frozen=True)
class _UttScores:
    truth: np.ndarray
    index: np.ndarray
    psc: np.ndarray
    soc: np.ndarray
    last: np.ndarray


def _collect(utt, word_list, config, psc_floor):
    frames = as_frames(utt.load())
    parts = []
    windows = list(sliding_windows(frames, config.chunk_frames, config.window_chunks))
    for w_i, window in enumerate(windows):
        s = score_window(window, word_list, config, psc_floor=psc_floor)
        parts.append((s.index, s.psc, s.soc, np.full(s.index.size, w_i == len(windows) - 1)))
    pos = {int(w): k for k, w in enumerate(word_list.word_ids)}
    truth = np.array([pos[w] for w in utt.ground_truth], dtype=np.intp)
    if not parts:
        empty = np.zeros(0)
        return _UttScores(truth, np.zeros(0, dtype=np.intp), empty, empty, np.zeros(0, dtype=bool))
    cat = [np.concatenate(p) for p in zip(*parts)]
    return _UttScores(truth, *cat)


def sweep(corpus: Corpus, psc_grid, soc_grid, config: Optional[FilterConfig] = None, threads: int = 1) -> List[dict]:
    """ERR and ALS at every (psc_threshold, soc_threshold) grid point.

    Window scores are computed once (SOC for every word reaching the lowest
    PSC threshold of the grid) and thresholded per grid point; each row equals
    what :func:`evaluate` reports at that configuration.
    """
    psc_grid = sorted(float(x) for x in psc_grid)
    soc_grid = sorted(float(x) for x in soc_grid)
    if not psc_grid or not soc_grid:
        raise ValueError("threshold grid must be non-empty")
    config = config or FilterConfig()
    word_list = corpus.word_list

    def one(u):
        return _collect(u, word_list, config, psc_grid[0])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(one, corpus.utterances))
    else:
        scores = [one(u) for u in corpus.utterances]

    final_only = config.accumulation is Accumulation.FINAL
    rows = []
    for pt in psc_grid:
        for st in soc_grid:
            truth_sizes, recalled, sizes = [], [], []
            for s in scores:
                mask = (s.psc >= pt) & (s.soc >= st) & np.isfinite(s.soc)
                if final_only:
                    mask &= s.last
                kept = np.unique(s.index[mask])
                truth_sizes.append(s.truth.size)
                recalled.append(int(np.isin(s.truth, kept).sum()))
                sizes.append(kept.size)
            err, als = err_als(truth_sizes, recalled, sizes)
            rows.append({"psc_threshold": pt, "soc_threshold": st, "err_percent": err, "als": als})
    return rows


@dataclass(frozen=True)
class Calibration:
    psc_threshold: float
    soc_threshold: float
    psc_only: dict
    two_stage: dict


def calibrate(rows, list_size, min_err=90.0, max_als_fraction=0.05, max_err_drop=5.0) -> Optional[Calibration]:
    """Pick thresholds from a sweep table the way the two stages are meant to be used.

    PSC is a recall-oriented pre-filter: take the loosest PSC threshold that
    (with SOC disabled, i.e. soc_threshold 0) keeps ERR >= ``min_err`` and ALS
    within ``max_als_fraction`` of the list. Then, at that PSC threshold, take
    the SOC threshold giving the smallest ALS whose ERR is within
    ``max_err_drop`` points of the PSC-only ERR. Returns None when no grid
    point qualifies.
    """
    psc_only = [
        r for r in rows
        if r["soc_threshold"] == 0.0 and r["err_percent"] is not None
        and r["err_percent"] >= min_err and r["als"] <= max_als_fraction * list_size
    ]
    if not psc_only:
        return None
    base = min(psc_only, key=lambda r: r["psc_threshold"])
    same = [
        r for r in rows
        if r["psc_threshold"] == base["psc_threshold"] and r["err_percent"] is not None
        and r["err_percent"] >= base["err_percent"] - max_err_drop
    ]
    best = min(same, key=lambda r: (r["als"], -r["err_percent"], r["soc_threshold"]))
    return Calibration(base["psc_threshold"], best["soc_threshold"], base, best)
