"""Regenerates log.csv and config.json for the two-week running example.

Week 1 (2022-01-03 .. 2022-01-09): 1100 events, 40 on the weekend.
Week 2 (2022-01-10 .. 2022-01-16): 600 events, 110 on the weekend.
"""
import csv
import json
from datetime import datetime, timedelta
from pathlib import Path

HERE = Path(__file__).resolve().parent
ACTIVITIES = ["register order", "check stock", "pick items", "pack", "ship"]


def spread(day0, days, n_traces, length, start_hour=0):
    """n_traces traces of `length` events, distributed over `days` days starting at day0."""
    out = []
    per_day = -(-n_traces // days)
    for t in range(n_traces):
        day = day0 + timedelta(days=t // per_day)
        slot = t % per_day
        base = day + timedelta(hours=start_hour, minutes=slot * 7)
        out.append([base + timedelta(minutes=3 * k) for k in range(length)])
    return out


def main():
    rows = []
    scores = {}

    def add_case(case, times, prefix=None, activities=None):
        acts = activities or ACTIVITIES
        for k, ts in enumerate(times):
            eid = f"{prefix}{k + 1}" if prefix else f"{case}-{k + 1}"
            rows.append((eid, case, acts[k % len(acts)], ts, f"r{(len(rows) % 7) + 1}"))

    mon1 = datetime(2022, 1, 3)
    sat1 = datetime(2022, 1, 8)
    mon2 = datetime(2022, 1, 10)
    sat2 = datetime(2022, 1, 15)

    sigma1 = [mon1 + timedelta(days=1, hours=9), mon1 + timedelta(days=1, hours=11), mon1 + timedelta(days=2, hours=10)]
    sigma2 = [mon1 + timedelta(days=3, hours=9), mon1 + timedelta(days=4, hours=14), sat2 + timedelta(hours=10)]
    for k, ts in enumerate(sigma1):
        rows.append((f"e{k + 1}", "sigma1", ["register order", "approve", "ship"][k], ts, "r1"))
    for k, ts in enumerate(sigma2):
        rows.append((f"e{k + 4}", "sigma2", ["register order", "ship", "approve"][k], ts, "r2"))
    scores["sigma1"] = 0.6
    scores["sigma2"] = 0.4

    fillers = []
    fillers += spread(mon1, 5, 211, 5)          # week 1 weekdays: 1055 events
    fillers += spread(sat1, 2, 8, 5, 9)         # week 1 weekend: 40 events
    fillers += spread(mon2, 5, 98, 5, 8)        # week 2 weekdays: 490 events
    fillers += spread(sat2, 2, 21, 5, 12)       # week 2 weekend: 105 events
    fillers.append([datetime(2022, 1, 16, 22, 0) + timedelta(minutes=5 * k) for k in range(4)])  # + 4
    for i, times in enumerate(fillers, start=1):
        case = f"f{i:03d}"
        add_case(case, times)
        scores[case] = 0.1

    rows.sort(key=lambda r: (r[3], r[1], r[0]))
    with open(HERE / "log.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "case", "activity", "timestamp", "resource"])
        for eid, case, act, ts, res in rows:
            w.writerow([eid, case, act, ts.strftime("%Y-%m-%d %H:%M:%S"), res])

    config = {
        "span_length": "week",
        "tau": 0.5,
        "alpha_pos": 0.5,
        "alpha_neg": 0.5,
        "aggregation": "max",
        "measures": [
            {"name": "workload", "polarity": "pos", "weight": 10, "min": 200, "max": 1200},
            {"name": "overwork", "polarity": "neg", "weight": 5, "min": 20, "max": 120},
        ],
        "raw_scores": scores,
    }
    with open(HERE / "config.json", "w") as fh:
        json.dump(config, fh, indent=1, sort_keys=False)
        fh.write("\n")


if __name__ == "__main__":
    main()
