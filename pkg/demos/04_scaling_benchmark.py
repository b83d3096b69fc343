"""
Filter cost versus list size
============================

Time one 530-frame window (10 chunks of 53 frames) against growing word
lists. PSC touches every word; SOC only runs on the few that survive it, so
cost grows linearly with the list.
"""

from ctxfilter import bench_scaling

report = bench_scaling([0, 1000, 2000, 4000, 6253, 8000, 16000])
print(f"{'words':>6} {'median ms':>10} {'p95 ms':>8} {'survivors':>10} {'filter RTF':>11}")
for r in report.rows:
    print(f"{r['list_size']:6d} {r['median_ms']:10.3f} {r['p95_ms']:8.3f} {r['survivors']:10d} {r['filter_rtf']:11.5f}")
print("fit:", {k: round(v, 9) for k, v in report.fit.items()})
print("machine:", report.machine["processor"], report.machine["platform"])
