#!/usr/bin/env python3
"""Generate the bundled sample export (431 fictional journals).

The output mimics the column layout of a real Unsub export. It is fully
deterministic: re-running the script reproduces the committed file byte for
byte. Run from the repository root:

    python3 scripts/gen_sample.py > crates/core/data/sample_export.csv
"""

import csv
import io
import random
import sys

N = 431
SEED = 20210517

HEADERS = [
    "issn_l", "title", "subject", "era_subjects", "is_society_journal",
    "subscribed", "usage", "subscription_cost", "ill_cost", "cpu", "cpu_rank",
    "cost", "instant_usage_percent", "free_instant_usage_percent",
    "subscription_minus_ill_cost", "use_groups_free_instant",
    "use_groups_if_subscribed", "use_groups_if_not_subscribed", "downloads",
    "citations", "authorships", "use_oa_percent", "use_backfile_percent",
    "use_subscription_percent", "use_ill_percent", "use_other_delayed_percent",
    "perpetual_access_years", "baseline_access", "use_social_networks_percent",
    "use_asns_percent", "oa_embargo_months", "publisher", "package_name",
    "is_hybrid", "bronze_oa_percent",
]
assert len(HEADERS) == 35

SUBJECTS = [
    "Medicine", "Engineering", "Chemistry", "Biochemistry", "Physics",
    "Computer Science", "Agricultural Sciences", "Social Sciences",
    "Materials Science", "Environmental Science", "Earth Sciences",
    "Psychology", "Economics", "Neuroscience", "Immunology", "Veterinary",
    "Nursing", "Energy", "Arts and Humanities", "Pharmacology",
]
ERA = {s: f"{i + 1:02d}" for i, s in enumerate(SUBJECTS + ["Mathematics"])}

LEAD = [
    "Applied", "Advanced", "Annals of", "Archives of", "Bulletin of",
    "Current", "Frontiers in", "International", "Journal of", "Modern",
    "Progress in", "Reviews in", "Studies in", "Trends in", "Topics in",
    "Perspectives on", "Letters in", "Transactions in", "Horizons in",
    "Insights in", "Principles of", "Methods in",
]
CORE = [
    "Agronomy", "Botany", "Catalysis", "Cell Biology", "Clinical Practice",
    "Coastal Studies", "Crystallography", "Dairy Science", "Ecology",
    "Econometrics", "Electrochemistry", "Entomology", "Epidemiology",
    "Food Chemistry", "Forestry", "Genetics", "Geophysics", "Hydrology",
    "Immunotherapy", "Kinetics", "Limnology", "Metallurgy", "Microbiology",
    "Mycology", "Nanomaterials", "Neurobiology", "Nutrition", "Oncology",
    "Optics", "Parasitology", "Pathology", "Photonics", "Plant Biology",
    "Polymers", "Proteomics", "Radiology", "Robotics", "Seismology",
    "Soil Research", "Surgery", "Thermodynamics", "Toxicology",
    "Urban Planning", "Virology", "Zoology", "Acoustics", "Aquaculture",
    "Biomechanics", "Cardiology", "Ceramics", "Dermatology", "Energy Systems",
]

SPECIAL = {
    "Science Advance": dict(price=8000, d=400, c=90.0, a=7.0, oa=88.0, bf=0.0,
                            status="TRUE", subject="Physics"),
    "Citing Practice": dict(price=19900, d=1000, c=850.0, a=5.0, oa=12.0, bf=4.0,
                            status="TRUE", subject="Social Sciences"),
    "Scholar Trends": dict(status="TRUE"),
    "Confer Opinion": dict(status="TRUE"),
}
MATH = {
    "Annals of Algebra": "FALSE",
    "Journal of Number Theory Letters": "FALSE",
    "Topics in Combinatorics": "MAYBE",
    "Modern Geometry Review": "TRUE",
}


def fmt(x):
    return repr(float(x))


def pct(x):
    return f"{x:.1f}"


def main():
    rng = random.Random(SEED)

    titles = list(SPECIAL) + list(MATH)
    seen = set(t.lower() for t in titles)
    while len(titles) < N:
        t = f"{rng.choice(LEAD)} {rng.choice(CORE)}"
        if t.lower() in seen or "science adv" in t.lower():
            continue
        seen.add(t.lower())
        titles.append(t)
    order = titles[:]
    rng.shuffle(order)

    # Authorship outliers: 14 ordinary titles above 3, one of them above 12.
    ordinary = [t for t in order if t not in SPECIAL]
    high_auth = set(rng.sample(ordinary, 14))
    top_auth = sorted(high_auth)[0]

    rows = {}
    for t in order:
        spec = SPECIAL.get(t, {})
        if "d" in spec:
            d, c, a = spec["d"], spec["c"], spec["a"]
        else:
            d = int(round(rng.lognormvariate(5.4, 0.9)))
            c = round(min(rng.lognormvariate(2.8, 0.9), 400.0), 1)
            if t == top_auth:
                a = 12.6
            elif t in high_auth:
                a = round(rng.uniform(3.2, 9.5), 1)
            else:
                a = round(min(rng.expovariate(1 / 0.7), 3.0), 1)
        rows[t] = dict(d=d, c=c, a=a)

    # Pin the package total at 400,000 weighted uses by adjusting one
    # ordinary title's downloads (integers keep the arithmetic exact).
    def usage(r):
        return r["d"] + 10 * r["c"] + 100 * r["a"]

    def exact_total():
        return sum(round(r["d"] * 10 + r["c"] * 100 + r["a"] * 1000) for r in rows.values())

    # Cap ordinary usage so the highly cited title stays the clear maximum.
    for t in ordinary:
        r = rows[t]
        while usage(r) > 7000:
            r["d"] = r["d"] // 2
            r["c"] = round(r["c"] / 2, 1)
    target = 400_000 * 10
    gap = target - exact_total()
    adjust = [t for t in ordinary if t not in high_auth]
    i = 0
    while gap != 0:
        r = rows[adjust[i % len(adjust)]]
        step = max(-(r["d"] - 5) * 10, min(gap, 600 * 10))
        step -= step % 10
        if step == 0:
            step = 10 if gap > 0 else -10
            if r["d"] * 10 + step < 0:
                i += 1
                continue
        r["d"] += step // 10
        gap -= step
        i += 1
    assert exact_total() == target

    for t in order:
        r = rows[t]
        r["usage"] = usage(r)
        spec = SPECIAL.get(t, {})
        if "price" in spec:
            r["price"] = spec["price"]
            r["oa"], r["bf"] = spec["oa"], spec["bf"]
        else:
            cpu = rng.lognormvariate(0.45, 0.55)
            r["price"] = int(min(max(r["usage"] * cpu, 400), 24000))
            r["oa"] = round(rng.betavariate(2.0, 2.6) * 95, 1)
            r["bf"] = round(min(rng.uniform(0, 35), 100 - r["oa"]), 1)

    # Exactly 26 titles more expensive per use than Science Advance (cpu 4.0).
    others = sorted(ordinary, key=lambda t: rows[t]["price"] / rows[t]["usage"], reverse=True)
    for k, t in enumerate(others):
        r = rows[t]
        cpu = r["price"] / r["usage"]
        if k < 26 and cpu <= 4.05:
            r["price"] = int(r["usage"] * rng.uniform(4.2, 9.0)) + 1
        elif k >= 26 and cpu >= 3.95:
            r["price"] = max(int(r["usage"] * rng.uniform(2.6, 3.9)), 1)

    cpus = {t: rows[t]["price"] / rows[t]["usage"] for t in order}
    ranked = sorted(order, key=lambda t: (cpus[t], t))
    for k, t in enumerate(ranked):
        rows[t]["rank"] = k + 1
    assert rows["Science Advance"]["rank"] == 405

    # Decisions follow CPU rank with some judgement noise.
    for t in order:
        r = rows[t]
        if t in MATH:
            r["status"] = MATH[t]
        elif "status" in SPECIAL.get(t, {}):
            r["status"] = SPECIAL[t]["status"]
        else:
            rank = r["rank"]
            u = rng.random()
            if rank > 330:
                r["status"] = "FALSE" if u < 0.85 else ("MAYBE" if u < 0.93 else "")
            elif rank > 250:
                r["status"] = "FALSE" if u < 0.35 else ("MAYBE" if u < 0.55 else ("TRUE" if u < 0.85 else ""))
            else:
                r["status"] = "TRUE" if u < 0.88 else ("MAYBE" if u < 0.92 else "")

    for t in order:
        r = rows[t]
        if t in MATH:
            subs = ["Mathematics"] if t != "Modern Geometry Review" else ["Mathematics", "Physics"]
        elif "subject" in SPECIAL.get(t, {}):
            subs = [SPECIAL[t]["subject"]]
        else:
            subs = [rng.choice(SUBJECTS)]
            if rng.random() < 0.2:
                extra = rng.choice(SUBJECTS)
                if extra not in subs:
                    subs.append(extra)
        r["subjects"] = subs

    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(HEADERS)
    for t in order:
        r = rows[t]
        price, use, oa, bf = r["price"], r["usage"], r["oa"], r["bf"]
        ill = round(price * 0.08, 2)
        free = oa + bf
        sub_pct = 100 - free
        ill_pct = round(sub_pct * 0.05, 1)
        delayed = round(sub_pct - ill_pct, 1)
        w.writerow([
            "",
            t,
            "; ".join(r["subjects"]),
            "; ".join(ERA[s] for s in r["subjects"]),
            "TRUE" if rng.random() < 0.3 else "FALSE",
            r["status"],
            fmt(use),
            str(price),
            f"{ill:.2f}",
            f"{price / use:.6f}",
            str(r["rank"]),
            str(price),
            pct(free + (sub_pct if r["status"] == "TRUE" else 0)),
            pct(free),
            f"{price - ill:.2f}",
            pct(free),
            pct(sub_pct),
            pct(ill_pct),
            str(r["d"]),
            fmt(r["c"]),
            fmt(r["a"]),
            pct(oa),
            pct(bf),
            pct(sub_pct),
            pct(ill_pct),
            pct(delayed),
            str(rng.choice([0, 5, 10, 15, 20])),
            "TRUE" if rng.random() < 0.5 else "FALSE",
            pct(rng.uniform(0, 5)),
            pct(rng.uniform(0, 3)),
            str(rng.choice([0, 6, 12, 24])),
            "Example Scholarly Press",
            "Sample Big Deal",
            "TRUE" if rng.random() < 0.8 else "FALSE",
            pct(rng.uniform(0, oa / 3 if oa else 0)),
        ])
    sys.stdout.write(out.getvalue())


if __name__ == "__main__":
    main()
