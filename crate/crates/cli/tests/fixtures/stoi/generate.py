"""Regenerate the STOI reference pairs and their scores.

Signals are built here with numpy/scipy (independently of the Rust code)
and scored with pystoi. Run from this directory:

    python3 generate.py
"""
import json

import numpy as np
from scipy.io import wavfile
from scipy.signal import lfilter, butter
from pystoi import stoi


def vowels(rate, seconds, rng):
    out = []
    targets = [(730, 1090), (270, 2290), (300, 870), (530, 1840), (570, 840)]
    total = 0
    while total < seconds * rate:
        f1, f2 = targets[rng.integers(len(targets))]
        n = int(rng.uniform(0.2, 0.45) * rate)
        f0 = rng.uniform(90, 200)
        e = np.zeros(n)
        e[(np.arange(0, n, rate / f0)).astype(int)] = 1.0
        e *= np.hanning(n)
        y = e
        for f, b in ((f1, 80.0), (f2, 120.0)):
            r = np.exp(-np.pi * b / rate)
            y = lfilter([1.0], [1.0, -2 * r * np.cos(2 * np.pi * f / rate), r * r], y)
        out.append(np.diff(y, prepend=0.0))
        total += n
    x = np.concatenate(out)[: int(seconds * rate)]
    return 0.5 * x / np.max(np.abs(x))


def pink(n, rng):
    white = rng.standard_normal(n)
    b = [0.049922035, -0.095993537, 0.050612699, -0.004408786]
    a = [1, -2.494956002, 2.017265875, -0.522189400]
    p = lfilter(b, a, white)
    return p / np.std(p)


def at_snr(x, noise, snr):
    g = np.sqrt(np.mean(x**2) / np.mean(noise**2) / 10 ** (snr / 10))
    return x + g * noise


def main():
    rng = np.random.default_rng(20240611)
    cases = []
    for i in range(10):
        rate = [10000, 22050, 16000][i % 3]
        x = vowels(rate, rng.uniform(2.0, 3.5), rng)
        kind = i % 4
        if kind == 0:
            y = at_snr(x, pink(len(x), rng), rng.uniform(-5, 5))
        elif kind == 1:
            y = at_snr(x, rng.standard_normal(len(x)), rng.uniform(-5, 10))
        elif kind == 2:
            b, a = butter(4, 1000 / (rate / 2))
            y = at_snr(lfilter(b, a, x), pink(len(x), rng), 10.0)
        else:
            y = 0.3 * x + 0.05 * rng.standard_normal(len(x))
        x = x.astype(np.float32)
        y = y.astype(np.float32)
        cn, pn = f"pair{i:02d}_clean.wav", f"pair{i:02d}_processed.wav"
        wavfile.write(cn, rate, x)
        wavfile.write(pn, rate, y)
        score = stoi(x.astype(np.float64), y.astype(np.float64), rate)
        cases.append({"clean": cn, "processed": pn, "rate": rate, "stoi": float(score)})
    with open("reference.json", "w") as f:
        json.dump(cases, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
