"""An evaluation corpus: a word list plus utterances with ground truth."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import io
from .core import PosteriorMatrix, WordList
from .errors import ValidationError

SYMBOLS_FILE = "symbols.txt"
WORDS_FILE = "words.tsv"
MANIFEST_FILE = "manifest.json"
POSTERIOR_DIR = "posteriors"


@dataclass(frozen=True)
class Utterance:
    utt_id: str
    ground_truth: Tuple[int, ...]
    posteriors: Optional[PosteriorMatrix] = None
    path: Optional[str] = None

    def load(self) -> PosteriorMatrix:
        if self.posteriors is not None:
            return self.posteriors
        if self.path is None:
            raise ValidationError(f"utterance {self.utt_id} has neither posteriors nor a path")
        return io.read_posteriors(self.path)


@dataclass(frozen=True)
class Corpus:
    word_list: WordList
    utterances: Tuple[Utterance, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        known = set(int(i) for i in self.word_list.word_ids)
        for u in self.utterances:
            missing = set(u.ground_truth) - known
            if missing:
                raise ValidationError(f"utterance {u.utt_id}: ground truth ids {sorted(missing)} not in word list")


def load_corpus(manifest, word_list, symbols=None) -> Corpus:
    """Load a corpus from a manifest and a word list (path or WordList).

    Posterior files are read lazily, one utterance at a time.
    """
    if not isinstance(word_list, WordList):
        if symbols is None:
            raise ValidationError("a symbol table is required to load a word list file")
        table = symbols if isinstance(symbols, dict) else io.load_symbol_table(Path(symbols))
        word_list = io.load_word_list(Path(word_list), table)
    entries = io.read_manifest(manifest)
    utts = [Utterance(e.utt_id, e.ground_truth_word_ids, path=e.posterior_path) for e in entries]
    return Corpus(word_list, utts, {"manifest": str(manifest)})


def write_corpus(corpus: Corpus, out_dir) -> Path:
    """Write symbols, word list, posterior files and manifest under ``out_dir``.

    Returns the manifest path. Output is byte-stable for identical corpora.
    """
    out = Path(out_dir)
    (out / POSTERIOR_DIR).mkdir(parents=True, exist_ok=True)
    (out / SYMBOLS_FILE).write_text(io.dump_symbol_table(corpus.word_list.symbol_table), encoding="utf-8")
    (out / WORDS_FILE).write_text(io.dump_word_list(corpus.word_list), encoding="utf-8")
    entries = []
    for u in corpus.utterances:
        rel = f"{POSTERIOR_DIR}/{u.utt_id}.phpo"
        io.write_posteriors(out / rel, u.load())
        entries.append(io.ManifestEntry(u.utt_id, rel, tuple(u.ground_truth)))
    io.write_manifest(out / MANIFEST_FILE, entries)
    if corpus.meta:
        (out / "scenario.json").write_text(json.dumps(corpus.meta, indent=1, sort_keys=True) + "\n")
    return out / MANIFEST_FILE


def load_corpus_dir(path) -> Corpus:
    path = Path(path)
    return load_corpus(path / MANIFEST_FILE, path / WORDS_FILE, path / SYMBOLS_FILE)
