"""Two-stage window filter and the streaming session around it."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .core import Accumulation, FilterConfig, WordList
from .errors import ValidationError
from .scoring import as_frames, psc_batch, soc_batch


@dataclass(frozen=True)
class ScoredWord:
    word_id: int
    psc: float
    soc: Optional[float] = None


@dataclass(frozen=True)
class WindowScores:
    """Raw per-word scores for one window.

    ``index`` are word-list positions of the words whose PSC reached the
    floor used to build this object; ``soc`` is -inf for words with no
    pronunciation that fits in the window.
    """

    index: np.ndarray
    psc: np.ndarray
    soc: np.ndarray

    def select(self, psc_threshold, soc_threshold) -> np.ndarray:
        """Boolean mask of entries passing both stages."""
        return (self.psc >= psc_threshold) & (self.soc >= soc_threshold) & np.isfinite(self.soc)


def preprocess_window(frames: np.ndarray, config: FilterConfig) -> np.ndarray:
    """Drop blank-dominated frames when configured. No renormalisation."""
    if config.drop_blank_frames and frames.shape[0]:
        if config.blank_id >= frames.shape[1]:
            raise ValidationError(f"blank_id {config.blank_id} outside inventory of size {frames.shape[1]}")
        frames = frames[frames[:, config.blank_id] <= config.blank_dominance_threshold]
    return frames


def _word_max(values: np.ndarray, word_list: WordList, rows: np.ndarray) -> np.ndarray:
    """Reduce per-pronunciation ``values`` (for pronunciation ``rows``) to per-word maxima."""
    packed = word_list.packed
    owners = packed.owner[rows]
    out = np.full(len(word_list), -np.inf)
    np.maximum.at(out, owners, values)
    return out


def score_window(window, word_list: WordList, config: FilterConfig, psc_floor=None) -> WindowScores:
    """PSC for all words, SOC for the words whose PSC reaches ``psc_floor``.

    ``psc_floor`` defaults to ``config.psc_threshold``.
    """
    frames = preprocess_window(as_frames(window), config)
    packed = word_list.packed
    if packed.max_phone >= frames.shape[1]:
        word_list.check_inventory(frames.shape[1])
    floor = config.psc_threshold if psc_floor is None else psc_floor
    if len(word_list) == 0:
        empty = np.zeros(0)
        return WindowScores(np.zeros(0, dtype=np.intp), empty, empty)

    if len(packed.lengths) == len(word_list):
        word_psc = psc_batch(frames, packed.phones, packed.lengths)
    else:
        pron_psc = psc_batch(frames, packed.phones, packed.lengths)
        word_psc = np.maximum.reduceat(pron_psc, packed.word_starts)
    survivors = np.flatnonzero(word_psc >= floor)

    passed = np.zeros(len(word_list), dtype=bool)
    passed[survivors] = True
    rows = np.flatnonzero(passed[packed.owner])
    pron_soc = soc_batch(frames, packed.phones[rows], packed.lengths[rows])
    # pronunciations longer than the window have no alignment
    pron_soc[packed.lengths[rows] > frames.shape[0]] = -np.inf
    word_soc = _word_max(pron_soc, word_list, rows)[survivors]
    return WindowScores(survivors, word_psc[survivors], word_soc)


def rank(scored: List[ScoredWord]) -> List[ScoredWord]:
    return sorted(scored, key=lambda s: (-s.soc, s.word_id))


def filter_window(window, word_list: WordList, config: FilterConfig) -> List[ScoredWord]:
    """Stage 1 keeps PSC >= psc_threshold; stage 2 keeps SOC >= soc_threshold.

    Output is sorted by descending SOC, then ascending word_id.
    """
    scores = score_window(window, word_list, config)
    keep = scores.select(config.psc_threshold, config.soc_threshold)
    ids = word_list.word_ids[scores.index[keep]]
    out = [ScoredWord(int(i), float(p), float(s)) for i, p, s in zip(ids, scores.psc[keep], scores.soc[keep])]
    return rank(out)


def sliding_windows(frames: np.ndarray, chunk_frames: int, window_chunks: int) -> Iterator[np.ndarray]:
    """Yield the window after each chunk of ``frames`` arrives."""
    n = frames.shape[0]
    for end_chunk in range(1, -(-n // chunk_frames) + 1):
        start = max(0, end_chunk - window_chunks) * chunk_frames
        yield frames[start : min(n, end_chunk * chunk_frames)]


class FilterSession:
    """Per-utterance streaming state.

    Not thread-safe: calls to :meth:`push_chunk` on one session must be
    serialised. Separate sessions are independent.
    """

    def __init__(self, config: FilterConfig, word_list: WordList):
        if not isinstance(config, FilterConfig):
            raise ValidationError("config must be a FilterConfig")
        if config.blank_id is not None:
            word_list.check_inventory(blank_id=config.blank_id)
        self.config = config
        self.word_list = word_list
        self.buffer = deque(maxlen=config.window_chunks)
        self.num_phones = None
        self.history: List[Tuple[int, List[ScoredWord]]] = []
        self._best: Dict[int, ScoredWord] = {}

    @property
    def buffered_frames(self) -> int:
        return sum(c.shape[0] for c in self.buffer)

    @property
    def survivors(self) -> set:
        if self.config.accumulation is Accumulation.UNION:
            return set(self._best)
        return {s.word_id for s in self.history[-1][1]} if self.history else set()

    def window(self) -> np.ndarray:
        if not self.buffer:
            return np.zeros((0, self.num_phones or 1))
        return np.concatenate(self.buffer, axis=0)

    def push_chunk(self, chunk) -> List[ScoredWord]:
        """Append a chunk, slide the window and filter it. Returns this window's survivors."""
        frames = as_frames(chunk)
        if self.num_phones is None:
            self.num_phones = frames.shape[1]
            self.word_list.check_inventory(self.num_phones, blank_id=self.config.blank_id)
        elif frames.shape[1] != self.num_phones:
            raise ValidationError(f"chunk has F={frames.shape[1]}, session expects F={self.num_phones}")
        if frames.shape[0] > self.config.chunk_frames:
            raise ValidationError(
                f"chunk has {frames.shape[0]} frames, more than chunk_frames={self.config.chunk_frames}"
            )
        self.buffer.append(frames)
        result = filter_window(self.window(), self.word_list, self.config)
        self.history.append((len(self.history), result))
        for s in result:
            prev = self._best.get(s.word_id)
            if prev is None or s.soc > prev.soc:
                self._best[s.word_id] = s
        return result

    def finalize(self) -> List[ScoredWord]:
        """The filtered list for this utterance under the accumulation policy."""
        if not self.history:
            return []
        if self.config.accumulation is Accumulation.UNION:
            return rank(list(self._best.values()))
        return list(self.history[-1][1])


def session_new(config: FilterConfig, word_list: WordList) -> FilterSession:
    return FilterSession(config, word_list)


def push_chunk(session: FilterSession, chunk) -> List[ScoredWord]:
    return session.push_chunk(chunk)


def finalize(session: FilterSession) -> List[ScoredWord]:
    return session.finalize()


def run_utterance(frames, word_list: WordList, config: FilterConfig) -> List[ScoredWord]:
    """Chunk ``frames`` per ``config`` and stream them through a fresh session."""
    frames = as_frames(frames)
    session = FilterSession(config, word_list)
    for start in range(0, frames.shape[0], config.chunk_frames):
        session.push_chunk(frames[start : start + config.chunk_frames])
    return session.finalize()
