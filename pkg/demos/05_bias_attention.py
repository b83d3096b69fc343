"""
Context bias attention
======================

Each query row attends over the context embeddings, which serve as both keys
and values; the output row is a convex combination of context rows.
"""

import numpy as np

from ctxfilter import attention_weights, bias_attention

q = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
context = np.array([[1.0, 0.0], [0.0, 1.0]])

print("weights:\n", attention_weights(q, context).round(4))
print("output:\n", bias_attention(q, context).round(4))

# a single context word absorbs all attention
print("N=1:", bias_attention(q, context[:1]))
