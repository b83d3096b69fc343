"""
PSC and SOC on a toy window
===========================

Three frames, three phones. Phone 0 peaks first, then phone 1, then phone 2.
"""

import numpy as np

from ctxfilter import ContextualWord, Scorer, psc_score, score_word, soc_score
from ctxfilter.oracle import brute_soc

window = np.array([
    [0.7, 0.2, 0.1],
    [0.1, 0.8, 0.1],
    [0.2, 0.1, 0.7],
])

# PSC only looks at each phone's best frame, so order does not matter.
print("PSC [0, 1] =", psc_score(window, [0, 1]))
print("PSC [1, 0] =", psc_score(window, [1, 0]))

# SOC needs the phones at strictly increasing frames.
print("SOC [0, 1] =", soc_score(window, [0, 1]))
print("SOC [1, 0] =", soc_score(window, [1, 0]), "(brute force:", brute_soc(window, [1, 0]), ")")

# A repeated phone cannot reuse one frame.
print("SOC [2, 2] =", soc_score(window, [2, 2]))

# Words with alternate pronunciations score as their best pronunciation.
word = ContextualWord(1, "homophone", ((1, 0), (0, 1)))
print("word SOC   =", score_word(window, word, Scorer.SOC))

# A sequence longer than the window has no alignment.
print("SOC over 3 frames, 4 phones =", soc_score(window, [0, 1, 2, 2]))
