"""Regenerate the GRINS regional-indicator fixture used by the test suite.

The published normalized table rounds every cell to two decimals, which is
too coarse for the robust/stochastic checks (several region pairs sit within
half a rounding unit of a preference flip). The normalization behind the
published table is recoverable from the raw indicators: per column, a
min-max map onto the mean +/- 3 population standard deviations, clipped to
[0, 1], with decreasing-direction columns reflected. Reproducing it here at
full precision makes the fixture match every published downstream figure;
the rounded table disagrees with two of the 400 published pairwise relations.

Run from the repository root:  python tools/make_grins_fixture.py
"""

import csv
import pathlib

import numpy as np

REGIONS = [
    "Piedmont", "Aosta Valley", "Liguria", "Lombardy", "Trentino-South Tyrol",
    "Veneto", "Friuli-Venezia Giulia", "Emilia-Romagna", "Tuscany", "Umbria",
    "Marche", "Lazio", "Abruzzo", "Molise", "Campania", "Apulia", "Basilicata",
    "Calabria", "Sicily", "Sardinia",
]

LEAVES = ["g11", "g12", "g13", "g21", "g22", "g23", "g31", "g32", "g33"]
DECREASING = {"g11"}  # urban waste generation

RAW = [
    [470.69, 59.25, 35.5, 7.04, 90.97, 1563, 32.9, 65.5, 1040],
    [582.58, 61.14, 243.5, 3.11, 51.09, 102, 26.1, 49.5, 31],
    [531.68, 48.81, 7.3, 5.02, 56.67, 672, 29.2, 49.2, 522],
    [467.25, 69.61, 21.7, 6.57, 92.35, 3581, 32.8, 62.4, 2637],
    [487.24, 71.58, 116.7, 6.35, 88.17, 524, 30.7, 55, 248],
    [475.88, 73.65, 21.3, 6.62, 100.96, 2105, 35.6, 61, 1065],
    [484.11, 65.48, 23.3, 6.73, 216.43, 585, 34.9, 63.9, 250],
    [642.54, 63.83, 19.2, 9.49, 131.52, 1898, 33.5, 64.7, 999],
    [600, 53.88, 39.2, 6.06, 63.97, 1403, 30.5, 60.2, 1138],
    [508.39, 61.69, 37.2, 4.4, 33.04, 395, 33.2, 51.9, 230],
    [532.27, 63.25, 27, 5.29, 58.18, 586, 32.6, 58.2, 331],
    [503.97, 45.52, 13.2, 6.51, 23, 1430, 30.7, 67, 1046],
    [452.52, 55.99, 44.6, 3.46, 19.2, 488, 32.9, 53.1, 258],
    [376.96, 30.72, 84.4, 3.37, 2.93, 101, 34.5, 49.6, 71],
    [439.06, 52.76, 26.4, 3.28, 9.64, 1158, 32.7, 54.4, 1244],
    [462.6, 40.44, 52.5, 2.36, 9.43, 815, 35.5, 54.7, 742],
    [345.17, 45.29, 90.1, 2.35, 10.29, 238, 36.1, 61.9, 152],
    [394.61, 39.67, 72.6, 1.8, 9.13, 325, 38.2, 50.4, 487],
    [456.01, 21.69, 25.1, 1.84, 4.33, 780, 33.5, 50.2, 792],
    [438.29, 63.05, 36, 2.36, 5.64, 300, 31.1, 45.5, 309],
]


def normalized():
    raw = np.asarray(RAW, dtype=float)
    mu = raw.mean(axis=0)
    sd = raw.std(axis=0)
    z = (raw - mu) / sd
    out = np.clip((z + 3.0) / 6.0, 0.0, 1.0)
    for j, leaf in enumerate(LEAVES):
        if leaf in DECREASING:
            out[:, j] = np.clip((3.0 - z[:, j]) / 6.0, 0.0, 1.0)
    return out


def main():
    data_dir = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    table = normalized()
    with open(data_dir / "grins_normalized.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + LEAVES)
        for region, row in zip(REGIONS, table):
            w.writerow([region] + [f"{x:.15g}" for x in row])
    print(f"wrote {data_dir / 'grins_normalized.csv'}")


if __name__ == "__main__":
    main()
