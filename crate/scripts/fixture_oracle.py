#!/usr/bin/env python3
"""Independent oracle for the 10-row fixture.

Recomputes every derived value with plain Python (the "spreadsheet" pass)
so the Rust tests can freeze the numbers. Not used at runtime.
"""
import csv, math, sys

path = sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/fixture_10.csv"
rows = list(csv.DictReader(open(path, newline="")))

def num(s):
    return float(s.replace("$", "").replace(",", "")) if s.strip() else None

recs = []
for r in rows:
    recs.append(dict(
        title=r["title"], status=r["subscribed"].strip().upper(),
        price=num(r["price"]), d=num(r["downloads"]), c=num(r["citations"]),
        a=num(r["authorships"]), usage=num(r["usage"]), oa=num(r["oa_percent"]),
        bf=num(r["backfile_percent"]), cpu=num(r["cpu"]),
    ))

print("weighted usage")
for x in recs:
    wu = x["d"] + 10 * x["c"] + 100 * x["a"]
    print(f"  {x['title']:20s} {wu!r} exported={x['usage']!r}")

total = 0.0
for x in recs:
    total += x["d"] + 10 * x["c"] + 100 * x["a"]
print("total", repr(total))

print("current year / IF% / normalized")
s = 0.0
cy_sum = 0.0
for x in recs:
    cy = max(0.0, (100 - (x["oa"] + x["bf"])) * x["usage"] / 100)
    ifp = 100 * cy / total
    s += ifp
    cy_sum += cy
    norm = x["price"] / ifp if ifp > 0 else None
    print(f"  {x['title']:20s} cy={cy!r} if={ifp!r} norm={norm!r}")
print("sum if", repr(s), "package if", repr(100 * cy_sum / total))

print("ranks by (price/usage, title), undefined last")
keyed = sorted(recs, key=lambda x: (math.inf if x["usage"] == 0 else x["price"] / x["usage"], x["title"]))
for i, x in enumerate(keyed):
    print(f"  {i + 1:2d} {x['title']}")

print("summary")
for st in ["TRUE", "FALSE", "MAYBE", ""]:
    sel = [x for x in recs if x["status"] == st]
    print(f"  {st or 'BLANK':6s} {len(sel)} {sum(x['price'] for x in sel)!r}")

print("bounds")
for f in ["price", "d", "c", "a", "usage", "oa"]:
    vals = [x[f] for x in recs]
    print(f"  {f:6s} {min(vals)!r} {max(vals)!r}")

print("authorship histogram, 10 bins")
vals = [x["a"] for x in recs]
lo, hi = min(vals), max(vals)
width = (hi - lo) / 10
counts = [0] * 10
for v in vals:
    # bin edges lo + k*width; final bin closed
    k = 9
    for j in range(10):
        if v < lo + (j + 1) * width:
            k = j
            break
    counts[k] += 1
print(" ", counts)

print("cpu boxes, 10 bins over defined cpu")
cpus = [(x["price"] / x["usage"]) for x in recs if x["usage"] > 0]
lo, hi = min(cpus), max(cpus)
width = (hi - lo) / 10
counts = [0] * 10
for v in cpus:
    k = 9
    for j in range(10):
        if v < lo + (j + 1) * width:
            k = j
            break
    counts[k] += 1
print(" ", counts, "undefined:", sum(1 for x in recs if x["usage"] == 0))

print("zero usage:", [x["title"] for x in recs if x["usage"] == 0])
