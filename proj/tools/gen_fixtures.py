#!/usr/bin/env python3
"""Regenerates the synthetic health corpus under data/ and the offline web
fixtures under fixtures/. Output is deterministic for a given --seed.

    python3 tools/gen_fixtures.py --root .
"""

import argparse
import datetime as dt
import math
from pathlib import Path

import numpy as np

FS = 20  # Hz
WINDOW_S = 60
PPG_DAYS = (1, 8, 15, 22, 29)

# mean NN (ms), HF and LF modulation amplitudes (ms), beat jitter (ms)
PROFILES = {
    "par_1": dict(mean_nn=1000, hf=45, lf=12, jitter=8, sleep=470, steps=11000),
    "par_2": dict(mean_nn=900, hf=30, lf=15, jitter=6, sleep=440, steps=9000),
    "par_3": dict(mean_nn=810, hf=18, lf=17, jitter=5, sleep=410, steps=7000),
    "par_4": dict(mean_nn=640, hf=4, lf=22, jitter=2, sleep=350, steps=3500),
    "par_5": dict(mean_nn=720, hf=9, lf=19, jitter=3, sleep=390, steps=6000),
}

SEARCH_MAP = {
    "tips to improve sleep":
        "https://www.mayoclinic.org/healthy-lifestyle/adult-health/in-depth/sleep/art-20048379",
    "how to reduce stress": "https://example.org/health/stress-management",
    "sleep study report": "https://example.org/files/sleep-study.pdf",
}


def fnv1a64(text: str) -> str:
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def write_sleep(path: Path, rng: np.random.Generator, base: float) -> None:
    rows = ["date,total_sleep_min,rem_min,deep_min,light_min,efficiency"]
    day = dt.date(2020, 8, 1)
    while day.month == 8:
        total = round(float(base + rng.normal(0, 25)), 1)
        rem = round(total * float(rng.uniform(0.19, 0.25)), 1)
        deep = round(total * float(rng.uniform(0.13, 0.20)), 1)
        light = round(total - rem - deep, 1)
        eff = round(float(np.clip(rng.normal(0.9, 0.03), 0.7, 0.99)), 3)
        rows.append(f"{day.isoformat()},{total},{rem},{deep},{light},{eff}")
        day += dt.timedelta(days=1)
    path.write_text("\n".join(rows) + "\n")


def write_activity(path: Path, rng: np.random.Generator, base: float) -> None:
    rows = ["date,steps,active_min"]
    day = dt.date(2020, 1, 1)
    while day.year == 2020:
        season = 1 + 0.15 * math.sin(2 * math.pi * (day.timetuple().tm_yday - 80) / 366)
        steps = max(0, int(rng.normal(base * season, base * 0.2)))
        active = round(max(0.0, steps / 130 + float(rng.normal(0, 8))), 1)
        rows.append(f"{day.isoformat()},{steps},{active}")
        day += dt.timedelta(days=1)
    path.write_text("\n".join(rows) + "\n")


def beat_times(rng: np.random.Generator, p: dict, duration: float) -> list:
    t = float(rng.uniform(0.2, 0.6))
    beats = []
    phase_lf, phase_hf = rng.uniform(0, 2 * math.pi, 2)
    while t < duration + 2:
        beats.append(t)
        nn = (p["mean_nn"]
              + p["lf"] * math.sin(2 * math.pi * 0.1 * t + phase_lf)
              + p["hf"] * math.sin(2 * math.pi * 0.25 * t + phase_hf)
              + rng.normal(0, p["jitter"]))
        t += nn / 1000.0
    return beats


def write_ppg(path: Path, rng: np.random.Generator, p: dict) -> None:
    rows = ["date,ppg,hr"]
    n = FS * WINDOW_S
    for d in PPG_DAYS:
        start = dt.datetime(2020, 8, d, 10, 0, tzinfo=dt.timezone.utc)
        start_ms = int(start.timestamp() * 1000)
        t = np.arange(n) / FS
        beats = beat_times(rng, p, WINDOW_S)
        signal = 0.2 * np.sin(2 * math.pi * 0.05 * t)
        for b in beats:
            signal += np.exp(-0.5 * ((t - b) / 0.07) ** 2)
            signal += 0.25 * np.exp(-0.5 * ((t - b - 0.22) / 0.06) ** 2)
        signal += rng.normal(0, 0.01, n)
        beat_arr = np.array(beats)
        for i in range(n):
            k = int(np.searchsorted(beat_arr, t[i], side="right"))
            k = min(max(k, 1), len(beats) - 1)
            hr = 60.0 / (beats[k] - beats[k - 1])
            rows.append(f"{start_ms + i * 50},{1000 + 200 * signal[i]:.3f},{hr:.1f}")
    path.write_text("\n".join(rows) + "\n")


SLEEP_PAGE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Sleep tips: 6 steps to better sleep - Mayo Clinic</title>
<style>body { font-family: sans-serif; } .nav { display: none; }</style>
<script>window.analytics = { track: function () {} };</script>
</head>
<body>
<!-- offline fixture for the sleep tips article -->
<h1>Sleep tips: 6 steps to better sleep</h1>
<p>Many factors can interfere with a good night's sleep. You might not be able to control all of them,
but you can adopt habits that encourage better sleep.</p>
<h2>1. Stick to a sleep schedule</h2>
<p>Set aside no more than eight hours for sleep. Go to bed and get up at the same time every day,
including weekends. Being consistent reinforces your body's sleep-wake cycle.</p>
<h2>2. Pay attention to what you eat and drink</h2>
<p>Don't go to bed hungry or stuffed. Avoid heavy or large meals within a couple of hours of bedtime.
Nicotine, caffeine and alcohol deserve caution too.</p>
<h2>3. Create a restful environment</h2>
<p>Keep your room cool, dark and quiet. Exposure to light in the evenings might make it more
challenging to fall asleep. Calming activities before bedtime, such as taking a bath, might help.</p>
<h2>4. Limit daytime naps</h2>
<p>Long daytime naps can interfere with nighttime sleep. Limit naps to no more than one hour and
avoid napping late in the day.</p>
<h2>5. Include physical activity in your daily routine</h2>
<p>Regular physical activity can promote better sleep. Avoid being active too close to bedtime,
however. Spending time outside every day might be helpful, too.</p>
<h2>6. Manage worries</h2>
<p>Try to resolve your worries or concerns before bedtime. Jot down what's on your mind and then set
it aside for tomorrow. Stress management might help, such as getting organized and meditation.</p>
<h2>Know when to contact your health care provider</h2>
<p>Nearly everyone has an occasional sleepless night. But if you often have trouble sleeping, contact
your health care provider &amp; ask about possible causes.</p>
</body>
</html>
"""

STRESS_PAGE = """<!DOCTYPE html>
<html>
<head><title>Stress management basics</title></head>
<body>
<h1>Stress management basics</h1>
<p>Short breathing exercises, regular sleep and physical activity all lower day-to-day stress.
Talking to someone you trust also helps.</p>
</body>
</html>
"""


def write_web(root: Path) -> None:
    www = root / "fixtures" / "www"
    www.mkdir(parents=True, exist_ok=True)
    pages = {
        SEARCH_MAP["tips to improve sleep"]: SLEEP_PAGE,
        SEARCH_MAP["how to reduce stress"]: STRESS_PAGE,
        SEARCH_MAP["sleep study report"]: "%PDF-1.4\n%\xe2\xe3\xcf\xd3\n1 0 obj\n<< /Type /Catalog >>\nendobj\n",
    }
    for url, body in pages.items():
        (www / f"{fnv1a64(url)}.html").write_text(body)
    lines = ["# query<TAB>url, matched case-insensitively"]
    lines += [f"{q}\t{u}" for q, u in SEARCH_MAP.items()]
    (root / "fixtures" / "search.map").write_text("\n".join(lines) + "\n")


TRANSLATIONS = [
    ("¿Cómo puedo mejorar mi sueño?", "How to improve my sleep?"),
    ("¿Cómo mejorar mi sueño?", "How to improve my sleep?"),
    ("¿Cuál es el nivel de estrés del paciente 5 en agosto de 2020?",
     "What is the stress level of patient 5 in August 2020?"),
    ("Nombra las tareas utilizadas", "Name the tasks used"),
    ("Según Mayo Clinic (Sleep tips: 6 steps to better sleep): respeta un horario de sueño, crea un ambiente "
     "tranquilo y limita las siestas durante el día.",
     "According to Mayo Clinic (Sleep tips: 6 steps to better sleep): Stick to a sleep schedule, create a "
     "restful environment and limit daytime naps."),
]


def write_translations(root: Path) -> None:
    lines = ["# source<TAB>target<TAB>source phrase<TAB>target phrase"]
    lines += [f"es\ten\t{es}\t{en}" for es, en in TRANSLATIONS]
    (root / "fixtures" / "translations.tsv").write_text("\n".join(lines) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--root", type=Path, default=Path(__file__).resolve().parents[1])
    ap.add_argument("--seed", type=int, default=20200801)
    args = ap.parse_args()

    for idx, (pid, profile) in enumerate(PROFILES.items()):
        rng = np.random.default_rng(args.seed + idx)
        out = args.root / "data" / pid
        out.mkdir(parents=True, exist_ok=True)
        write_sleep(out / "sleep.csv", rng, profile["sleep"])
        write_activity(out / "activity.csv", rng, profile["steps"])
        write_ppg(out / "ppg.csv", rng, profile)
    write_web(args.root)
    write_translations(args.root)


if __name__ == "__main__":
    main()
