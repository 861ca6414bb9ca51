#!/usr/bin/env python3
"""Regenerates the bundled datasets under data/.

toy5    five-bus system with a cheap, fast unit stranded behind a radial line
ieee118 118-bus network (topology and base loads from the MATPOWER/PYPOWER
        case118, BSD-licensed) reduced to 51 resources with three solar plants

The 118-bus case needs `pip install pypower`. Everything else is stdlib.
"""

import argparse
import json
import math
import os


def write_profiles(directory, load, solar):
    """load and solar are 96-point 15-min series; hourly values are averages."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "profile_15min.csv"), "w") as f:
        f.write("interval_index,load_mw,solar_total_mw\n")
        for t in range(96):
            f.write(f"{t},{load[t]:.4f},{solar[t]:.4f}\n")
    with open(os.path.join(directory, "profile_hourly.csv"), "w") as f:
        f.write("interval_index,load_mw,solar_total_mw\n")
        for h in range(24):
            lo = sum(load[4 * h:4 * h + 4]) / 4
            so = sum(solar[4 * h:4 * h + 4]) / 4
            f.write(f"{h},{lo:.4f},{so:.4f}\n")


def daily_shape(base, night, morning, evening, solar_peak):
    """Evening-peaking load with a midday solar bulge, 15-min resolution."""
    load, solar = [], []
    for t in range(96):
        h = (t + 0.5) / 4
        shape = night + morning * math.exp(-((h - 9) / 3) ** 2) + evening * math.exp(-((h - 19) / 2.5) ** 2)
        # small deterministic texture so consecutive intervals differ
        shape += 0.004 * math.sin(1.7 * t) + 0.003 * math.cos(0.9 * t)
        load.append(base * shape)
        s = math.sin(math.pi * (h - 6.5) / 13) if 6.5 < h < 19.5 else 0.0
        solar.append(solar_peak * max(s, 0.0) ** 1.5)
    return load, solar


def toy5(out):
    gens = [
        dict(name="remote_cheap", bus=0, p_min=20, p_max=200, cost_blocks=[dict(width=90, slope=10), dict(width=90, slope=12)],
             no_load_cost=100, startup_cost=2000, ramp_15=60, ramp_startup=60, ramp_shutdown=60, min_up=16, min_down=16,
             frp_up_cost=0.1, frp_down_cost=0.1),
        dict(name="mid_a", bus=2, p_min=50, p_max=250, cost_blocks=[dict(width=100, slope=25), dict(width=100, slope=30)],
             no_load_cost=200, startup_cost=4000, ramp_15=18, ramp_startup=60, ramp_shutdown=60, min_up=16, min_down=16,
             frp_up_cost=0.5, frp_down_cost=0.5),
        dict(name="mid_b", bus=3, p_min=40, p_max=200, cost_blocks=[dict(width=80, slope=28), dict(width=80, slope=34)],
             no_load_cost=180, startup_cost=3500, ramp_15=12, ramp_startup=50, ramp_shutdown=50, min_up=16, min_down=16,
             frp_up_cost=0.6, frp_down_cost=0.6),
        dict(name="peaker", bus=4, p_min=10, p_max=25, cost_blocks=[dict(width=15, slope=90)],
             no_load_cost=300, startup_cost=3000, ramp_15=3, ramp_startup=10, ramp_shutdown=10, min_up=2, min_down=2,
             frp_up_cost=1.0, frp_down_cost=1.0, fast_start=True),
    ]
    system = dict(
        name="toy5-bottleneck",
        slack_bus=2,
        buses=[dict(id=i, name=f"B{i + 1}") for i in range(5)],
        lines=[
            dict(**{"from": 0, "to": 1}, reactance=0.1, rating=100),
            dict(**{"from": 1, "to": 2}, reactance=0.1, rating=400),
            dict(**{"from": 2, "to": 3}, reactance=0.1, rating=400),
            dict(**{"from": 3, "to": 4}, reactance=0.1, rating=400),
            dict(**{"from": 4, "to": 1}, reactance=0.1, rating=400),
            dict(**{"from": 1, "to": 3}, reactance=0.15, rating=400),
        ],
        generators=gens,
        solar=[dict(bus=2, capacity=45, share=0.5), dict(bus=4, capacity=45, share=0.5)],
        participation=[dict(bus=0, factor=0.0), dict(bus=1, factor=0.3), dict(bus=2, factor=0.3),
                       dict(bus=3, factor=0.2), dict(bus=4, factor=0.2)],
    )
    d = os.path.join(out, "toy5")
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "system.json"), "w") as f:
        json.dump(system, f, indent=1)
    load, solar = daily_shape(330, 0.78, 0.10, 0.22, 70)
    write_profiles(d, load, solar)
    config = dict(system="system.json", profile_hourly="profile_hourly.csv", profile_quarter="profile_15min.csv",
                  output_dir="../../out/toy5", seed=1, policy="both",
                  uncertainty=dict(sigma_hourly_frac=0.05, confidence_z=1.96, truncation=3),
                  counts=dict(training=300, out_of_sample=100, deployment=2),
                  nn=dict(hidden=[100, 100, 25], epochs=20, learning_rate=1e-3, batch_size=64),
                  solver=dict(mip_rel_gap=1e-6, time_limit=60),
                  fmm=dict(zeta_min=0.05, cut_tolerance=1e-4, max_rounds=10, voll=10000, frp_shortage_penalty=0),
                  da=dict(reserve_fraction=0))
    with open(os.path.join(d, "config.json"), "w") as f:
        json.dump(config, f, indent=1)


def dc_flows(nb, branches, slack, injection):
    """Plain Gaussian elimination on the reduced susceptance matrix."""
    idx = [b for b in range(nb) if b != slack]
    pos = {b: i for i, b in enumerate(idx)}
    n = len(idx)
    B = [[0.0] * n for _ in range(n)]
    for (f, t, x) in branches:
        y = 1.0 / x
        for a, b in ((f, t), (t, f)):
            if a in pos:
                B[pos[a]][pos[a]] += y
                if b in pos:
                    B[pos[a]][pos[b]] -= y
    rhs = [injection[b] for b in idx]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(B[r][c]))
        B[c], B[p] = B[p], B[c]
        rhs[c], rhs[p] = rhs[p], rhs[c]
        for r in range(c + 1, n):
            m = B[r][c] / B[c][c]
            if m:
                for k in range(c, n):
                    B[r][k] -= m * B[c][k]
                rhs[r] -= m * rhs[c]
    theta = [0.0] * n
    for r in range(n - 1, -1, -1):
        theta[r] = (rhs[r] - sum(B[r][k] * theta[k] for k in range(r + 1, n))) / B[r][r]
    ang = [0.0] * nb
    for b, i in pos.items():
        ang[b] = theta[i]
    return [(ang[f] - ang[t]) / x for (f, t, x) in branches]


def ieee118(out):
    from pypower.case118 import case118

    c = case118()
    bus_ids = [int(b) for b in c["bus"][:, 0]]
    index = {b: i for i, b in enumerate(bus_ids)}
    nb = len(bus_ids)
    slack = [i for i in range(nb) if int(c["bus"][i, 1]) == 3][0]
    branches = [(index[int(r[0])], index[int(r[1])], float(r[3])) for r in c["branch"]]
    pd = [max(float(v), 0.0) for v in c["bus"][:, 2]]
    total_pd = sum(pd)
    participation = [v / total_pd for v in pd]

    units = []
    for k, row in enumerate(c["gen"]):
        units.append(dict(k=k, bus=index[int(row[0])], pmax=float(row[8]), c2=float(c["gencost"][k, 4]),
                          c1=float(c["gencost"][k, 5])))
    # 54 units in the source case; drop three 100 MW units to reach 51 and make
    # 21 of the remaining 100 MW units 50 MW fast-start resources.
    small = [u for u in units if u["pmax"] <= 100.0]
    dropped = {small[-1]["k"], small[-2]["k"], small[-3]["k"]}
    units = [u for u in units if u["k"] not in dropped]
    small = [u for u in units if u["pmax"] <= 100.0]
    fast = {u["k"] for u in small[::1][:21]}

    gens = []
    for n, u in enumerate(units):
        is_fs = u["k"] in fast
        texture = 1.0 + 0.03 * ((n * 7) % 11)
        if is_fs:
            pmax, pmin = 50.0, 10.0
            blocks = [dict(width=20.0, slope=round(62 * texture, 3)), dict(width=20.0, slope=round(70 * texture, 3))]
            g = dict(name=f"G{n + 1}", bus=u["bus"], p_min=pmin, p_max=pmax, cost_blocks=blocks, no_load_cost=150.0,
                     startup_cost=800.0, ramp_15=20.0, ramp_startup=20.0, ramp_shutdown=20.0, min_up=2, min_down=2,
                     fast_start=True)
        else:
            pmax = u["pmax"]
            pmin = round(0.3 * pmax, 3)
            width = round((pmax - pmin) / 3, 6)
            widths = [width, width, round(pmax - pmin - 2 * width, 6)]
            edges = [pmin, pmin + widths[0], pmin + widths[0] + widths[1], pmax]
            blocks = []
            for e in range(3):
                slope = (u["c1"] * 0.6 + 2 * u["c2"] * (edges[e] + edges[e + 1]) / 2) * texture
                blocks.append(dict(width=widths[e], slope=round(slope, 3)))
            r15 = round(max(5.0, 0.08 * pmax), 3)
            long_run = pmax > 250
            g = dict(name=f"G{n + 1}", bus=u["bus"], p_min=pmin, p_max=pmax, cost_blocks=blocks,
                     no_load_cost=round(0.12 * pmax, 3), startup_cost=round(25 * pmax, 3), ramp_15=r15,
                     ramp_startup=max(pmin, r15), ramp_shutdown=max(pmin, r15), min_up=16 if long_run else 8,
                     min_down=16 if long_run else 8)
        g["frp_up_cost"] = 0.5
        g["frp_down_cost"] = 0.5
        gens.append(g)

    peak_load = 4200.0
    solar_peak = 1200.0
    solar_buses = [index[25], index[55], index[89]]
    shares = [0.2, 0.2, 0.6]

    # Ratings: 130% of the peak-hour flow under a capacity-proportional
    # dispatch of must-run units, floored so no line is trivially tight.
    mr = [g for g in gens if not g.get("fast_start")]
    cap = sum(g["p_max"] for g in mr)
    inj = [-peak_load * p for p in participation]
    for g in mr:
        inj[g["bus"]] += peak_load * g["p_max"] / cap
    flows = dc_flows(nb, branches, slack, inj)
    ratings = [max(60.0, math.ceil(1.3 * abs(f) / 10.0) * 10.0) for f in flows]

    system = dict(
        name="ieee118-frp",
        slack_bus=slack,
        buses=[dict(id=i, name=f"bus{bus_ids[i]}") for i in range(nb)],
        lines=[{"from": f, "to": t, "reactance": x, "rating": r} for (f, t, x), r in zip(branches, ratings)],
        generators=gens,
        solar=[dict(bus=b, capacity=round(s * solar_peak * 1.1, 3), share=s) for b, s in zip(solar_buses, shares)],
        participation=[dict(bus=i, factor=p) for i, p in enumerate(participation) if p > 0],
    )
    d = os.path.join(out, "ieee118")
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "system.json"), "w") as f:
        json.dump(system, f, indent=1)
    load, solar = daily_shape(peak_load, 0.70, 0.08, 0.30, solar_peak)
    write_profiles(d, load, solar)
    config = dict(system="system.json", profile_hourly="profile_hourly.csv", profile_quarter="profile_15min.csv",
                  output_dir="../../out/ieee118", seed=1, policy="both",
                  uncertainty=dict(sigma_hourly_frac=0.05, confidence_z=1.96, truncation=3),
                  counts=dict(training=5000, out_of_sample=500, deployment=2),
                  nn=dict(hidden=[100, 100, 25], epochs=30, learning_rate=1e-3, batch_size=64),
                  solver=dict(mip_rel_gap=1e-4, time_limit=600),
                  fmm=dict(zeta_min=0.05, cut_tolerance=1e-4, max_rounds=10, voll=10000, frp_shortage_penalty=0),
                  da=dict(reserve_fraction=0))
    with open(os.path.join(d, "config.json"), "w") as f:
        json.dump(config, f, indent=1)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    ap.add_argument("--skip-118", action="store_true")
    args = ap.parse_args()
    toy5(args.out)
    if not args.skip_118:
        ieee118(args.out)


if __name__ == "__main__":
    main()
