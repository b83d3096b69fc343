"""Readers and writers for the on-disk formats.

* symbol table: one phone symbol per line, 0-based line number is the id
* word list: ``word_id<TAB>surface<TAB>pron_1[<TAB>pron_k]...``, each pron a
  space-separated symbol sequence, UTF-8
* posterior file: ``PHPO`` magic, then little-endian u32 version, u32 T,
  u32 F, f32 frame_shift_ms, then T*F little-endian f32 values, frame-major
* corpus manifest: JSON list of ``{utt_id, posterior_path, ground_truth_word_ids}``
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Union

import numpy as np

from .core import ContextualWord, PosteriorMatrix, WordList
from .errors import FormatError, ValidationError

MAGIC = b"PHPO"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIIf")

PathLike = Union[str, os.PathLike]


def _lines(source) -> List[str]:
    # str with a newline or tab is document text; any other non-empty str is a path
    if isinstance(source, os.PathLike) or (
        isinstance(source, str) and source and "\n" not in source and "\t" not in source
    ):
        return Path(source).read_text(encoding="utf-8").splitlines()
    if isinstance(source, str):
        return source.splitlines()
    return [line.rstrip("\n") for line in source]


def load_symbol_table(source) -> Dict[str, int]:
    table = {}
    for lineno, line in enumerate(_lines(source)):
        sym = line.strip()
        if not sym or any(c.isspace() for c in sym):
            raise FormatError(f"symbol table line {lineno + 1}: invalid symbol {line!r}")
        if sym in table:
            raise FormatError(f"symbol table line {lineno + 1}: duplicate symbol {sym!r}")
        table[sym] = lineno
    return table


def dump_symbol_table(table: Dict[str, int]) -> str:
    ordered = sorted(table.items(), key=lambda kv: kv[1])
    if [i for _, i in ordered] != list(range(len(ordered))):
        raise ValidationError("symbol table ids must be 0..F-1 without gaps")
    return "".join(f"{sym}\n" for sym, _ in ordered)


def load_word_list(source, symbol_table: Dict[str, int]) -> WordList:
    """Parse a tab-separated word list, resolving phone symbols to ids.

    ``source`` may be a path, the document text, or an iterable of lines.
    Blank lines are skipped.
    """
    words = []
    seen = {}
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise FormatError(f"word list line {lineno}: expected word_id, surface and at least one pronunciation")
        try:
            word_id = int(fields[0])
        except ValueError:
            raise FormatError(f"word list line {lineno}: word_id {fields[0]!r} is not an integer") from None
        if word_id in seen:
            raise FormatError(f"word list line {lineno}: duplicate word_id {word_id} (first on line {seen[word_id]})")
        seen[word_id] = lineno
        prons = []
        for pron_text in fields[2:]:
            symbols = pron_text.split()
            if not symbols:
                raise FormatError(f"word list line {lineno}: empty pronunciation for word {word_id}")
            pron = []
            for sym in symbols:
                if sym not in symbol_table:
                    raise FormatError(f"word list line {lineno}: unknown phone symbol {sym!r}")
                pron.append(symbol_table[sym])
            prons.append(tuple(pron))
        words.append(ContextualWord(word_id, fields[1], tuple(prons)))
    return WordList(tuple(words), symbol_table)


def dump_word_list(word_list: WordList) -> str:
    inverse = {i: s for s, i in word_list.symbol_table.items()}
    out = []
    for w in word_list:
        if "\t" in w.surface or "\n" in w.surface:
            raise ValidationError(f"surface of word {w.word_id} contains a tab or newline")
        prons = [" ".join(inverse[p] for p in pron) for pron in w.pronunciations]
        out.append("\t".join([str(w.word_id), w.surface, *prons]) + "\n")
    return "".join(out)


def write_posteriors(path: PathLike, m) -> None:
    frames = np.asarray(getattr(m, "frames", m))
    shift = float(getattr(m, "frame_shift_ms", 40.0))
    if frames.ndim != 2:
        raise ValidationError(f"posterior matrix must be 2-D, got shape {frames.shape}")
    t, f = frames.shape
    payload = np.ascontiguousarray(frames, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, t, f, shift))
        fh.write(payload.tobytes())


def read_posteriors(path: PathLike) -> PosteriorMatrix:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, t, f, shift = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + 4 * t * f
    if len(data) != expected:
        raise FormatError(f"{path}: payload is {len(data) - _HEADER.size} bytes, expected {4 * t * f}")
    if f < 1:
        raise FormatError(f"{path}: F must be at least 1")
    frames = np.frombuffer(data, dtype="<f4", count=t * f, offset=_HEADER.size).reshape(t, f)
    return PosteriorMatrix(frames.astype(np.float64), frame_shift_ms=float(shift))


@dataclass(frozen=True)
class ManifestEntry:
    utt_id: str
    posterior_path: str
    ground_truth_word_ids: tuple


def read_manifest(path: PathLike) -> List[ManifestEntry]:
    """Read a manifest; relative posterior paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None
    if isinstance(doc, dict):
        doc = doc.get("utterances")
    if not isinstance(doc, list):
        raise FormatError(f"{path}: manifest must be a JSON list of utterances")
    entries = []
    seen = set()
    for k, item in enumerate(doc):
        try:
            utt_id = str(item["utt_id"])
            post = Path(item["posterior_path"])
            gt = tuple(int(i) for i in item["ground_truth_word_ids"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"{path}: entry {k} is missing or has malformed fields") from None
        if utt_id in seen:
            raise FormatError(f"{path}: duplicate utt_id {utt_id!r}")
        seen.add(utt_id)
        if not post.is_absolute():
            post = path.parent / post
        entries.append(ManifestEntry(utt_id, str(post), gt))
    return entries


def write_manifest(path: PathLike, entries: Iterable[ManifestEntry]) -> None:
    doc = [
        {
            "utt_id": e.utt_id,
            "posterior_path": e.posterior_path,
            "ground_truth_word_ids": list(e.ground_truth_word_ids),
        }
        for e in entries
    ]
    Path(path).write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
