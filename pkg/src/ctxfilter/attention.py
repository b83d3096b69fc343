"""Context bias cross-attention, ``H = softmax(Q E^T / sqrt(F)) E``.

``E`` (the context embeddings) serves as both key and value; there are no
learned projections and no batch axis.
"""

import numpy as np

from .errors import ValidationError


def _check(q, e_c):
    q = np.asarray(q, dtype=np.float64)
    e_c = np.asarray(e_c, dtype=np.float64)
    if q.ndim != 2 or e_c.ndim != 2:
        raise ValidationError(f"expected 2-D query and context matrices, got {q.shape} and {e_c.shape}")
    if e_c.shape[0] == 0:
        raise ValidationError("context embedding must have at least one row")
    if q.shape[1] != e_c.shape[1] or q.shape[1] < 1:
        raise ValidationError(f"inner dimensions disagree: query F={q.shape[1]}, context F={e_c.shape[1]}")
    return q, e_c


def attention_weights(q, e_c):
    """Row-stochastic T x N attention matrix."""
    q, e_c = _check(q, e_c)
    logits = q @ e_c.T / np.sqrt(q.shape[1])
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    w /= w.sum(axis=1, keepdims=True)
    return w


def bias_attention(q, e_c):
    q, e_c = _check(q, e_c)
    return attention_weights(q, e_c) @ e_c
