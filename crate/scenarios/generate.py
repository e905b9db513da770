"""Writes the example scenarios and their hourly profiles.

Profiles are synthetic: a daily and weekly demand shape, a slowly varying
wind series, daytime solar and a steady import. Re-running the script
reproduces the committed files exactly.
"""

import csv
import math
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

PLANT = {
    # capacity, start-up, marginal, no-load, msg, up, down, slope, h, ramp dn, ramp up, pfr, sfr
    "nuclear": (1800.0, 50548.0, 7.1, 0.0, 1800.0, 0, 0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.0),
    "coal": (500.0, 21001.0, 19.8, 2071.0, 200.0, 4, 4, 0.3, 6.0, 240.0, 200.0, 50.0, 100.0),
    "ccgt": (500.0, 12564.0, 18.93, 2476.0, 200.0, 2, 2, 0.4, 6.0, 360.0, 360.0, 60.0, 100.0),
    "ocgt": (200.0, 0.0, 39.54, 4809.0, 0.0, 0, 0, 0.6, 6.0, 200.0, 200.0, 40.0, 80.0),
}


def group(name, tech, n, marginal=None, online=None, output=None):
    cap, st, mc, nl, msg, up, dn, slope, h, vdn, vup, pfr, sfr = PLANT[tech]
    lines = [
        "[[groups]]",
        f'name = "{name}"',
        f'technology = "{tech}"',
        f"unit_capacity_mw = {cap}",
        f"n_units = {n}",
        f"marginal_cost = {marginal if marginal is not None else mc}",
        f"no_load_cost = {nl}",
        f"startup_cost = {st}",
        f"msg_mw = {msg}",
        f"startup_time_h = {up}",
        f"shutdown_time_h = {dn}",
        f"ramp_up_mw_per_h = {vup}",
        f"ramp_down_mw_per_h = {vdn}",
        f"governor_slope = {slope}",
        f"inertia_constant_s = {h}",
        f"pfr_max_mw = {pfr}",
        f"sfr_max_mw = {sfr}",
    ]
    if online is not None:
        lines.append(f"initial_online = {online}")
        lines.append(f"initial_output_mw = {output}")
    return "\n".join(lines) + "\n"


def storage(name, e_max, p_max, fr_max, e0):
    return "\n".join(
        [
            "[[storage]]",
            f'name = "{name}"',
            f"e_max_mwh = {e_max}",
            "e_min_mwh = 0.0",
            f"p_charge_max_mw = {p_max}",
            f"p_discharge_max_mw = {p_max}",
            "efficiency = 0.866",
            f"fr_max_mw = {fr_max}",
            f"e_initial_mwh = {e0}",
        ]
    ) + "\n"


def write_profile(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["period", "demand_mw", "wind_mw", "solar_mw", "interconnector_mw"])
        for t, (d, wind, solar, imp) in enumerate(rows, start=1):
            w.writerow([t, f"{d:.1f}", f"{wind:.1f}", f"{solar:.1f}", f"{imp:.1f}"])


def gb_week(seed, start_hour, summer):
    rng = random.Random(seed)
    rows = []
    wind = 5000.0
    for t in range(168):
        hour = (start_hour + t) % 24
        day = t // 24
        base = 27000.0 if summer else 32000.0
        swing = 7000.0 if summer else 9000.0
        daily = 0.5 * (1.0 - math.cos(2.0 * math.pi * (hour - 4) / 24.0))
        evening = 0.25 * math.exp(-((hour - 18) ** 2) / 4.0)
        weekend = -3000.0 if day >= 5 else 0.0
        d = base + swing * (daily + evening) - swing / 2.0 + weekend + rng.gauss(0.0, 300.0)
        d = min(max(d, 20000.0), 42000.0)
        wind = min(max(0.92 * wind + 0.08 * 5000.0 + rng.gauss(0.0, 500.0), 1500.0), 9000.0)
        peak_solar = 4000.0 if summer else 1200.0
        solar = max(0.0, math.sin(math.pi * (hour - 5) / 15.0)) * peak_solar if 5 <= hour <= 20 else 0.0
        imp = 2000.0 + 800.0 * math.sin(2.0 * math.pi * t / 168.0)
        rows.append((d, wind, solar, imp))
    return rows


def tiny_day():
    rows = []
    for hour in range(24):
        d = 700.0 + 200.0 * math.sin(2.0 * math.pi * (hour - 9) / 24.0)
        wind = 80.0 + 40.0 * math.cos(2.0 * math.pi * hour / 24.0)
        rows.append((d, wind, 0.0, 0.0))
    return rows


def header(name, profile, start_hour, extra_freq=""):
    return (
        f'name = "{name}"\n\n'
        f"[profile]\npath = \"{profile}\"\nstart_hour_of_year = {start_hour}\n\n"
        f"[frequency]\nefr_mw = 0.0\n{extra_freq}\n"
    )


def main():
    # one day, 100 MW largest infeed, small enough for the enumeration oracles
    write_profile(HERE / "tiny.csv", tiny_day())
    text = header("tiny", "tiny.csv", 0, "infeed_loss_mw = 100.0\ndamping_mw_per_hz = 10.0\n")
    text += "[model]\nchord_segments = 16\nwindow_hours = 24\ncurtailment_cost = 0.0\n\n"
    text += group("ccgt", "ccgt", 4, online=2, output=600.0) + "\n"
    text += group("ocgt", "ocgt", 2) + "\n"
    text += storage("phs", 400.0, 100.0, 50.0, 200.0)
    (HERE / "tiny.toml").write_text(text)

    summer_start = 151 * 24
    write_profile(HERE / "toy_week.csv", gb_week(7, summer_start, summer=True))
    text = header("toy-week", "toy_week.csv", summer_start)
    text += "[model]\nchord_segments = 16\nwindow_hours = 168\ncurtailment_cost = 0.0\n\n"
    text += group("nuclear", "nuclear", 6) + "\n"
    text += group("ccgt", "ccgt", 56, online=30, output=9000.0) + "\n"
    text += group("coal", "coal", 24, online=6, output=1800.0) + "\n"
    text += group("ocgt", "ocgt", 15) + "\n"
    text += storage("phs", 9000.0, 2700.0, 500.0, 4500.0)
    (HERE / "toy_week.toml").write_text(text)

    write_profile(HERE / "baseline_week.csv", gb_week(11, summer_start, summer=True))
    text = header("baseline-week", "baseline_week.csv", summer_start)
    text += "[model]\nchord_segments = 16\nwindow_hours = 168\ncurtailment_cost = 0.0\n\n"
    text += group("nuclear", "nuclear", 6) + "\n"
    for i, (n, mc, on) in enumerate([(14, 17.6, 12), (14, 18.4, 10), (14, 19.3, 6), (14, 20.4, 2)]):
        text += group(f"ccgt_{i + 1}", "ccgt", n, marginal=mc, online=on, output=on * 300.0) + "\n"
    text += group("coal_1", "coal", 12, marginal=19.8, online=4, output=1200.0) + "\n"
    text += group("coal_2", "coal", 12, marginal=21.2) + "\n"
    text += group("ocgt", "ocgt", 15) + "\n"
    text += storage("phs", 9000.0, 2700.0, 500.0, 4500.0)
    (HERE / "baseline_week.toml").write_text(text)


if __name__ == "__main__":
    main()
