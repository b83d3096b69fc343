"""Domain types shared by the filter, the generator and the evaluation code."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError

DEFAULT_CHUNK_FRAMES = 53
DEFAULT_WINDOW_CHUNKS = 10
ROW_SUM_TOLERANCE = 1e-3


class Accumulation(str, enum.Enum):
    UNION = "union"
    FINAL = "final"


class ValidationMode(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class PosteriorMatrix:
    """T x F per-frame phone posteriors.

    ``frames`` is stored as a read-only float64 array. ``frame_shift_ms`` is
    metadata only and never enters scoring.
    """

    frames: np.ndarray
    frame_shift_ms: float = 40.0

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64, copy=True)
        if frames.ndim == 1 and frames.size == 0:
            frames = frames.reshape(0, 1)
        if frames.ndim != 2:
            raise ValidationError(f"posterior matrix must be 2-D, got shape {frames.shape}")
        if frames.shape[1] < 1:
            raise ValidationError("posterior matrix needs at least one phone column")
        if not self.frame_shift_ms > 0:
            raise ValidationError(f"frame_shift_ms must be positive, got {self.frame_shift_ms}")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_phones(self) -> int:
        return self.frames.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.frames if dtype is None else self.frames.astype(dtype)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    row: Optional[int] = None
    row_sum: Optional[float] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate_posteriors(m, mode=ValidationMode.STRICT) -> ValidationResult:
    """Check entry range (both modes) and row-stochasticity (strict mode).

    On failure the result names the first offending row and its sum.
    """
    mode = ValidationMode(mode)
    frames = np.asarray(getattr(m, "frames", m), dtype=np.float64)
    if frames.ndim != 2:
        return ValidationResult(False, reason=f"expected 2-D matrix, got shape {frames.shape}")
    sums = frames.sum(axis=1)
    bad_range = ~np.all((frames >= 0.0) & (frames <= 1.0), axis=1)
    if mode is ValidationMode.STRICT:
        bad = bad_range | ~(np.abs(sums - 1.0) <= ROW_SUM_TOLERANCE)
    else:
        bad = bad_range
    if not bad.any():
        return ValidationResult(True)
    row = int(np.argmax(bad))
    if bad_range[row]:
        reason = f"row {row} has entries outside [0, 1]"
    else:
        reason = f"row {row} sums to {sums[row]:.6g}, not 1 within {ROW_SUM_TOLERANCE:g}"
    return ValidationResult(False, row=row, row_sum=float(sums[row]), reason=reason)


@dataclass(frozen=True)
class ContextualWord:
    word_id: int
    surface: str
    pronunciations: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        prons = tuple(tuple(int(p) for p in pron) for pron in self.pronunciations)
        if not prons:
            raise ValidationError(f"word {self.word_id} has no pronunciation")
        for pron in prons:
            if not pron:
                raise ValidationError(f"word {self.word_id} has an empty pronunciation")
            if min(pron) < 0:
                raise ValidationError(f"word {self.word_id} has a negative phone id")
        object.__setattr__(self, "word_id", int(self.word_id))
        object.__setattr__(self, "pronunciations", prons)


@dataclass(frozen=True)
class PackedPronunciations:
    """All pronunciations of a word list as one padded integer matrix.

    Rows are grouped by word in word-list order; ``word_starts[k]`` is the
    first row of word ``k``. Padding entries are 0 and masked by ``lengths``.
    """

    phones: np.ndarray
    lengths: np.ndarray
    owner: np.ndarray
    word_starts: np.ndarray
    max_phone: int


def _pack(words: Sequence[ContextualWord]) -> PackedPronunciations:
    prons = [pron for w in words for pron in w.pronunciations]
    owner = np.array([k for k, w in enumerate(words) for _ in w.pronunciations], dtype=np.intp)
    width = max((len(p) for p in prons), default=0)
    phones = np.zeros((len(prons), width), dtype=np.intp)
    lengths = np.zeros(len(prons), dtype=np.intp)
    for r, pron in enumerate(prons):
        phones[r, : len(pron)] = pron
        lengths[r] = len(pron)
    counts = np.array([len(w.pronunciations) for w in words], dtype=np.intp)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(np.intp) if len(words) else counts
    for arr in (phones, lengths, owner, starts):
        arr.setflags(write=False)
    max_phone = int(phones.max()) if phones.size else -1
    return PackedPronunciations(phones, lengths, owner, starts, max_phone)


@dataclass(frozen=True)
class WordList:
    words: Tuple[ContextualWord, ...]
    symbol_table: Mapping[str, int] = field(default_factory=dict)
    packed: PackedPronunciations = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = tuple(self.words)
        seen = set()
        for w in words:
            if w.word_id in seen:
                raise ValidationError(f"duplicate word_id {w.word_id}")
            seen.add(w.word_id)
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "symbol_table", dict(self.symbol_table))
        object.__setattr__(self, "packed", _pack(words))
        object.__setattr__(self, "_ids", np.array([w.word_id for w in words], dtype=np.int64))

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    @property
    def word_ids(self) -> np.ndarray:
        return self._ids

    def by_id(self, word_id) -> ContextualWord:
        if not hasattr(self, "_index"):
            object.__setattr__(self, "_index", {w.word_id: w for w in self.words})
        return self._index[word_id]

    def check_inventory(self, num_phones=None, blank_id=None):
        """Raise if any pronunciation uses a phone >= ``num_phones`` or the blank."""
        if num_phones is not None and self.packed.max_phone >= num_phones:
            bad = next(w for w in self.words for p in w.pronunciations if max(p) >= num_phones)
            raise ValidationError(
                f"word {bad.word_id} uses phone id {max(max(p) for p in bad.pronunciations)} "
                f"but the inventory has {num_phones} phones"
            )
        if blank_id is not None:
            for w in self.words:
                if any(blank_id in p for p in w.pronunciations):
                    raise ValidationError(f"word {w.word_id} pronunciation contains blank id {blank_id}")


@dataclass(frozen=True)
class FilterConfig:
    """Thresholds, window geometry and accumulation policy for filtering.

    Thresholds are compared with ``>=``. Values above 1 are accepted and
    simply make a stage unpassable.
    """

    psc_threshold: float = 0.5
    soc_threshold: float = 0.5
    window_chunks: int = DEFAULT_WINDOW_CHUNKS
    chunk_frames: int = DEFAULT_CHUNK_FRAMES
    accumulation: Accumulation = Accumulation.UNION
    blank_id: Optional[int] = None
    drop_blank_frames: bool = False
    blank_dominance_threshold: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "accumulation", Accumulation(self.accumulation))
        for name in ("psc_threshold", "soc_threshold"):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value >= 0.0):
                raise ValidationError(f"{name} must be a finite non-negative number, got {value}")
            object.__setattr__(self, name, value)
        for name in ("window_chunks", "chunk_frames"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.blank_id is not None and int(self.blank_id) < 0:
            raise ValidationError(f"blank_id must be non-negative, got {self.blank_id}")
        if not 0.0 <= self.blank_dominance_threshold <= 1.0:
            raise ValidationError("blank_dominance_threshold must lie in [0, 1]")
        if self.drop_blank_frames and self.blank_id is None:
            raise ValidationError("drop_blank_frames requires blank_id")

    def to_dict(self):
        return {
            "psc_threshold": self.psc_threshold,
            "soc_threshold": self.soc_threshold,
            "window_chunks": self.window_chunks,
            "chunk_frames": self.chunk_frames,
            "accumulation": self.accumulation.value,
            "blank_id": self.blank_id,
            "drop_blank_frames": self.drop_blank_frames,
            "blank_dominance_threshold": self.blank_dominance_threshold,
        }

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown filter config keys: {sorted(unknown)}")
        return cls(**d)
