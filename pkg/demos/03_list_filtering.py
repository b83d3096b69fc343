"""
Filtering a 6,253-word list
===========================

Generate 200 synthetic utterances, each hiding two words from a 6,253-word
list among noise, sweep both thresholds and pick an operating point: a loose
PSC threshold that keeps recall, then the SOC threshold that shrinks the list
most without costing more than 5 points of recall.
"""

from ctxfilter import FilterConfig, ScenarioSpec, calibrate, evaluate, generate, sweep

spec = ScenarioSpec(seed=42, num_utterances=200, utterance_chunks=4, num_phones=64,
                    distractor_list_size=6253, target_words_per_utt=2, peak_prob=0.8,
                    noise_epsilon=0.15, frames_per_phone=2, pronunciation_length_range=(3, 6))
corpus = generate(spec)

rows = sweep(corpus, [0.3, 0.4, 0.5, 0.6, 0.7], [0.0, 0.5, 0.6, 0.7, 0.8])
print(f"{'psc':>5} {'soc':>5} {'ERR%':>7} {'ALS':>8}")
for r in rows:
    print(f"{r['psc_threshold']:5.2f} {r['soc_threshold']:5.2f} {r['err_percent']:7.2f} {r['als']:8.2f}")

cal = calibrate(rows, len(corpus.word_list))
print(f"\nlist size        {len(corpus.word_list)}")
print(f"+ PSC  ({cal.psc_threshold})    ERR {cal.psc_only['err_percent']:.2f}%  ALS {cal.psc_only['als']:.2f}")
print(f"++ SOC ({cal.soc_threshold})    ERR {cal.two_stage['err_percent']:.2f}%  ALS {cal.two_stage['als']:.2f}")

report = evaluate(corpus, FilterConfig(psc_threshold=cal.psc_threshold, soc_threshold=cal.soc_threshold))
print(f"\nper-window filter time: mean {report.timing['window_mean_ms']:.2f} ms, "
      f"p95 {report.timing['window_p95_ms']:.2f} ms")
