#!/usr/bin/env python3
"""Generate data/survey_synthetic.csv: 495 survey stations with lon/lat,
four environmental covariates and a 0/1 presence label."""

import argparse
import csv

import numpy as np


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/survey_synthetic.csv")
    ap.add_argument("--n", type=int, default=495)
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.n

    # stations along a coastal band
    lon = rng.uniform(-17.6, -16.6, n)
    lat = rng.uniform(12.3, 15.0, n)
    # distinct coordinates at the written precision
    lon = np.round(lon, 5)
    lat = np.round(lat, 5)
    while len(set(zip(lon, lat))) < n:
        dup = np.array([list(zip(lon, lat)).index(p) != i for i, p in enumerate(zip(lon, lat))])
        lon[dup] = np.round(rng.uniform(-17.6, -16.6, dup.sum()), 5)

    offshore = (lon + 17.6) / 1.0
    depth = 10 + 180 * (1 - offshore) ** 2 + rng.normal(0, 12, n)
    temperature = 17 + 4 * (lat - 12.3) / 2.7 + rng.normal(0, 0.8, n)
    salinity = 35.2 + 0.4 * offshore + rng.normal(0, 0.15, n)
    oxygen = 4.5 - 0.01 * depth + rng.normal(0, 0.3, n)

    # smooth spatial effect from a few random bumps
    centers = np.column_stack([rng.uniform(-17.6, -16.6, 6), rng.uniform(12.3, 15.0, 6)])
    amp = rng.normal(0, 1.5, 6)
    spatial = np.zeros(n)
    for (cx, cy), w in zip(centers, amp):
        spatial += w * np.exp(-((lon - cx) ** 2 + (lat - cy) ** 2) / 0.15)

    eta = -0.8 + 0.025 * (depth - 80) - 0.6 * (temperature - 19) + spatial + rng.normal(0, 0.5, n)
    presence = (eta > 0).astype(int)

    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["station", "lon", "lat", "depth", "temperature", "salinity", "oxygen", "presence"])
        for i in range(n):
            w.writerow([
                f"S{i + 1:03d}", f"{lon[i]:.5f}", f"{lat[i]:.5f}", f"{depth[i]:.2f}",
                f"{temperature[i]:.3f}", f"{salinity[i]:.3f}", f"{oxygen[i]:.3f}", presence[i],
            ])
    print(f"wrote {n} stations to {args.out}, presence rate {presence.mean():.3f}")


if __name__ == "__main__":
    main()
