"""
Streaming a word through the sliding window
===========================================

A word is spoken in the first chunk only. With a two-chunk window it slides
out of view; the union policy still reports it at the end, the final-window
policy does not.
"""

import numpy as np

from ctxfilter import Accumulation, ContextualWord, FilterConfig, FilterSession, WordList

chunk_frames, num_phones = 4, 5
flat = np.full((chunk_frames, num_phones), 1 / num_phones)
spoken = flat.copy()
spoken[1] = [0.05, 0.8, 0.05, 0.05, 0.05]
spoken[2] = [0.05, 0.05, 0.05, 0.8, 0.05]

words = WordList((
    ContextualWord(10, "target", ((1, 3),)),
    ContextualWord(11, "reversed", ((3, 1),)),
    ContextualWord(12, "absent", ((0, 2),)),
))

for policy in Accumulation:
    config = FilterConfig(psc_threshold=0.6, soc_threshold=0.6, window_chunks=2,
                          chunk_frames=chunk_frames, accumulation=policy)
    session = FilterSession(config, words)
    for k, chunk in enumerate([spoken, flat, flat, flat]):
        hits = session.push_chunk(chunk)
        print(f"{policy.value:>5} chunk {k}: window {session.buffered_frames} frames, "
              f"survivors {[(s.word_id, round(s.soc, 3)) for s in hits]}")
    print(f"{policy.value:>5} final list: {[s.word_id for s in session.finalize()]}\n")
