"""Brute-force reference scorers.

These deliberately share no code with :mod:`ctxfilter.scoring`. They walk the
posterior matrix with plain Python loops so that agreement with the vectorised
engine is evidence rather than a tautology.
"""

from itertools import combinations

import numpy as np

MAX_FRAMES = 12
MAX_PHONES = 6


def _rows(window):
    frames = getattr(window, "frames", window)
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise ValueError(f"window must be 2-D, got shape {frames.shape}")
    return [list(map(float, row)) for row in frames], frames.shape[1]


def _check_phones(phones, num_phones):
    phones = [int(p) for p in phones]
    if not phones:
        raise ValueError("phone sequence must be non-empty")
    for p in phones:
        if p < 0 or p >= num_phones:
            raise IndexError(f"phone id {p} outside inventory of size {num_phones}")
    return phones


def brute_psc(window, phones):
    """Mean over ``phones`` of each phone's column maximum in ``window``.

    The maxima are summed in ascending order, one addition at a time, which
    makes the result independent of the order of ``phones``.
    """
    rows, num_phones = _rows(window)
    phones = _check_phones(phones, num_phones)
    if not rows:
        return 0.0
    maxima = []
    for p in phones:
        best = rows[0][p]
        for row in rows[1:]:
            if row[p] > best:
                best = row[p]
        maxima.append(best)
    total = 0.0
    for value in sorted(maxima):
        total = total + value
    return total / len(phones)


def brute_soc(window, phones):
    """Best mean posterior over strictly increasing frame-per-phone selections.

    Enumerates every tuple ``t_0 < t_1 < ... < t_{k-1}``. Returns 0.0 when the
    window has fewer frames than ``phones`` has entries.
    """
    rows, num_phones = _rows(window)
    phones = _check_phones(phones, num_phones)
    if len(rows) > MAX_FRAMES or len(phones) > MAX_PHONES:
        raise ValueError(
            f"instance too large for enumeration: T={len(rows)} (max {MAX_FRAMES}), "
            f"len(U)={len(phones)} (max {MAX_PHONES})"
        )
    best = None
    for frames in combinations(range(len(rows)), len(phones)):
        total = 0.0
        for t, p in zip(frames, phones):
            total = total + rows[t][p]
        if best is None or total > best:
            best = total
    if best is None:
        return 0.0
    return best / len(phones)
