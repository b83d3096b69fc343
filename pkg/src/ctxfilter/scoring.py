"""Posterior Sum Confidence and Sequence Order Confidence.

Both scorers come in a batched form operating on a padded matrix of phone
sequences (one row per pronunciation), which is what the filter uses, and a
single-sequence form built on top of it.

PSC of a phone sequence U over a T x F window p is

    sum_i max_t p[t, U_i] / len(U)

and ignores phone order. SOC runs the ordered alignment recursion

    dp[0, j] = max(dp[0, j-1], p[j, U_0])
    dp[i, j] = max(dp[i-1, j-1] + p[j, U_i], dp[i, j-1])

and returns dp[len(U)-1, T-1] / len(U), the best mean posterior over strictly
increasing frame selections. Cells with j < i are unreachable and held at
-inf; a sequence longer than the window scores 0.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import ValidationError


# columns per DP block; keeps the T x block working set cache-resident
SOC_BLOCK = 64


class Scorer(str, enum.Enum):
    PSC = "psc"
    SOC = "soc"


def as_frames(window) -> np.ndarray:
    frames = np.asarray(getattr(window, "frames", window), dtype=np.float64)
    if frames.ndim != 2:
        raise ValidationError(f"window must be a 2-D T x F matrix, got shape {frames.shape}")
    return frames


def _check_ids(phones, num_phones):
    # padding entries are 0, always a valid id
    if phones.size and (phones.max() >= num_phones or phones.min() < 0):
        bad = int(phones.max()) if phones.max() >= num_phones else int(phones.min())
        raise IndexError(f"phone id {bad} outside inventory of size {num_phones}")


def psc_batch(frames: np.ndarray, phones: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """PSC for every row of ``phones`` (padded, true lengths in ``lengths``).

    Column maxima are summed in ascending order so that the score is exactly
    invariant to permuting a sequence.
    """
    num_frames, num_phones = frames.shape
    _check_ids(phones, num_phones)
    k, width = phones.shape
    if k == 0:
        return np.zeros(0)
    if num_frames == 0:
        return np.zeros(k)
    colmax = frames.max(axis=0)
    vals = colmax[phones]
    vals[np.arange(width)[None, :] >= lengths[:, None]] = 0.0
    vals.sort(axis=1)
    # padding zeros sort first; 0.0 + x == x so they do not perturb the sum
    total = np.zeros(k)
    for col in range(width):
        total += vals[:, col]
    return total / lengths


def soc_batch(frames: np.ndarray, phones: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """SOC for every row of ``phones``. Rows longer than the window score 0."""
    num_frames, num_phones = frames.shape
    _check_ids(phones, num_phones)
    k, width = phones.shape
    out = np.zeros(k)
    if k == 0 or num_frames == 0:
        return out
    fits = np.flatnonzero(lengths <= num_frames)
    for start in range(0, fits.size, SOC_BLOCK):
        _soc_block(frames, phones, lengths, fits[start : start + SOC_BLOCK], out)
    return out / lengths


def _soc_block(frames, phones, lengths, active, out):
    num_frames = frames.shape[0]
    width = phones.shape[1]
    prev = None
    # frame-major T x K layout: the running max walks down contiguous rows
    for i in range(min(width, num_frames)):
        keep = lengths[active] > i
        active_now = active[keep]
        if active_now.size == 0:
            break
        emit = frames[:, phones[active_now, i]]
        if i == 0:
            cur = emit
        else:
            cur = np.empty_like(emit)
            cur[0] = -np.inf
            np.add(prev[:-1, keep], emit[1:], out=cur[1:])
        np.maximum.accumulate(cur, axis=0, out=cur)
        done = lengths[active_now] == i + 1
        out[active_now[done]] = cur[-1, done]
        prev = cur
        active = active_now


def _single(phones):
    seq = np.asarray(phones, dtype=np.intp).reshape(1, -1)
    if seq.size == 0:
        raise ValidationError("phone sequence must be non-empty")
    return seq, np.array([seq.shape[1]], dtype=np.intp)


def psc_score(window, phones) -> float:
    frames = as_frames(window)
    seq, lengths = _single(phones)
    return float(psc_batch(frames, seq, lengths)[0])


def soc_score(window, phones) -> float:
    frames = as_frames(window)
    seq, lengths = _single(phones)
    return float(soc_batch(frames, seq, lengths)[0])


def score_word(window, word, scorer=Scorer.SOC) -> float:
    """Maximum of ``scorer`` over the word's pronunciations."""
    scorer = Scorer(scorer)
    frames = as_frames(window)
    prons = word.pronunciations
    width = max(len(p) for p in prons)
    seqs = np.zeros((len(prons), width), dtype=np.intp)
    lengths = np.array([len(p) for p in prons], dtype=np.intp)
    for r, p in enumerate(prons):
        seqs[r, : len(p)] = p
    fn = psc_batch if scorer is Scorer.PSC else soc_batch
    return float(fn(frames, seqs, lengths).max())
