"""Seeded synthetic posterior corpora with planted hotwords.

Every utterance is background noise (each frame an independently drawn,
renormalised uniform vector) into which the pronunciations of a few words
from the list are written at non-overlapping random positions. A planted
phone frame carries ``peak_prob`` on the phone, ``noise_epsilon`` spread
randomly over the other phones, and the remainder spread evenly over all
phones.

Randomness: one ``SeedSequence`` per corpus, with independent children for
the word list and for every utterance, so results never depend on the order
in which utterances are produced.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np

from .core import DEFAULT_CHUNK_FRAMES, ContextualWord, PosteriorMatrix, WordList
from .corpus import Corpus, Utterance
from .errors import ValidationError


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int = 0
    num_utterances: int = 20
    utterance_chunks: int = 4
    chunk_frames: int = DEFAULT_CHUNK_FRAMES
    num_phones: int = 64
    target_words_per_utt: int = 2
    peak_prob: float = 0.8
    noise_epsilon: float = 0.15
    frames_per_phone: int = 2
    distractor_list_size: int = 1000
    pronunciation_length_range: Tuple[int, int] = (3, 6)
    frame_shift_ms: float = 40.0

    def __post_init__(self):
        lo, hi = (int(x) for x in self.pronunciation_length_range)
        object.__setattr__(self, "pronunciation_length_range", (lo, hi))
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        for name in ("num_utterances", "utterance_chunks", "chunk_frames", "num_phones",
                     "frames_per_phone", "distractor_list_size"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be positive")
        if self.target_words_per_utt < 0:
            raise ValidationError("target_words_per_utt must be non-negative")
        if self.target_words_per_utt > self.distractor_list_size:
            raise ValidationError("more targets per utterance than words in the list")
        if not 0.0 < self.peak_prob <= 1.0:
            raise ValidationError("peak_prob must lie in (0, 1]")
        if not 0.0 <= self.noise_epsilon < 1.0:
            raise ValidationError("noise_epsilon must lie in [0, 1)")
        if self.peak_prob + self.noise_epsilon > 1.0 + 1e-12:
            raise ValidationError("peak_prob + noise_epsilon must not exceed 1")
        if self.noise_epsilon > 0 and self.num_phones < 2:
            raise ValidationError("noise_epsilon > 0 needs at least two phones")
        if not 1 <= lo <= hi:
            raise ValidationError(f"invalid pronunciation_length_range {(lo, hi)}")
        capacity = sum(self.num_phones**n for n in range(lo, hi + 1))
        if capacity < self.distractor_list_size:
            raise ValidationError(f"only {capacity} distinct pronunciations exist; cannot draw {self.distractor_list_size}")
        longest = self.target_words_per_utt * hi * self.frames_per_phone
        if longest > self.utterance_chunks * self.chunk_frames:
            raise ValidationError(
                f"{self.target_words_per_utt} targets of up to {hi} phones x {self.frames_per_phone} frames "
                f"do not fit in {self.utterance_chunks * self.chunk_frames} frames"
            )

    @property
    def num_frames(self):
        return self.utterance_chunks * self.chunk_frames

    def to_dict(self):
        d = asdict(self)
        d["pronunciation_length_range"] = list(self.pronunciation_length_range)
        return d


@dataclass(frozen=True)
class SyntheticCorpus(Corpus):
    pass


def phone_symbols(num_phones):
    return {f"ph{i}": i for i in range(num_phones)}


def make_word_list(spec: ScenarioSpec, rng) -> WordList:
    """``distractor_list_size`` words with pairwise-distinct random pronunciations."""
    lo, hi = spec.pronunciation_length_range
    seen = set()
    words = []
    while len(words) < spec.distractor_list_size:
        n = int(rng.integers(lo, hi + 1))
        pron = tuple(int(p) for p in rng.integers(0, spec.num_phones, n))
        if pron in seen:
            continue
        seen.add(pron)
        wid = len(words)
        words.append(ContextualWord(wid, f"w{wid:05d}", (pron,)))
    return WordList(tuple(words), phone_symbols(spec.num_phones))


def background(rng, num_frames, num_phones):
    u = rng.random((num_frames, num_phones))
    return u / u.sum(axis=1, keepdims=True)


def planted_row(rng, phone, spec: ScenarioSpec):
    f = spec.num_phones
    row = np.full(f, (1.0 - spec.peak_prob - spec.noise_epsilon) / f)
    if spec.noise_epsilon > 0:
        noise = rng.random(f)
        noise[phone] = 0.0
        row += spec.noise_epsilon * noise / noise.sum()
    row[phone] += spec.peak_prob
    return np.clip(row, 0.0, None)


def make_utterance(spec: ScenarioSpec, word_list: WordList, index: int, seed_seq) -> Utterance:
    rng = np.random.default_rng(seed_seq)
    frames = background(rng, spec.num_frames, spec.num_phones)
    k = spec.target_words_per_utt
    targets = [int(t) for t in rng.choice(len(word_list), size=k, replace=False)] if k else []
    prons = [word_list.words[t].pronunciations[0] for t in targets]
    spans = [len(p) * spec.frames_per_phone for p in prons]
    free = spec.num_frames - sum(spans)
    cuts = np.sort(rng.integers(0, free + 1, size=k))
    gaps = np.diff(np.concatenate([[0], cuts, [free]]))
    pos = int(gaps[0])
    for n, pron in enumerate(prons):
        for phone in pron:
            for _ in range(spec.frames_per_phone):
                frames[pos] = planted_row(rng, phone, spec)
                pos += 1
        pos += int(gaps[n + 1])
    # match what a reader of the 32-bit on-disk format would see
    frames = frames.astype(np.float32).astype(np.float64)
    truth = tuple(sorted(word_list.words[t].word_id for t in targets))
    return Utterance(f"utt{index:05d}", truth, PosteriorMatrix(frames, spec.frame_shift_ms))


def generate(spec: ScenarioSpec, threads: int = 1) -> SyntheticCorpus:
    """Build the corpus described by ``spec``. A pure function of ``spec``."""
    root = np.random.SeedSequence(spec.seed)
    list_seq, utt_root = root.spawn(2)
    word_list = make_word_list(spec, np.random.default_rng(list_seq))
    children = utt_root.spawn(spec.num_utterances)

    def one(i):
        return make_utterance(spec, word_list, i, children[i])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            utts = list(pool.map(one, range(spec.num_utterances)))
    else:
        utts = [one(i) for i in range(spec.num_utterances)]
    return SyntheticCorpus(word_list, tuple(utts), {"scenario": spec.to_dict()})
