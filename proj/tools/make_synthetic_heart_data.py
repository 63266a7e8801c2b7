#!/usr/bin/env python3
"""Regenerates data/heart_failure.csv.

Synthetic heart-failure-style clinical dataset: 299 patients, 12 feature
columns plus a binary DEATH_EVENT target (96 positive / 203 negative).
Mortality risk is driven mainly by ejection fraction, serum creatinine, age
and follow-up time, with noise, so the classes overlap but stay learnable.
"""

import csv
import random

N = 299
DEATHS = 96

COLUMNS = [
    "age", "anaemia", "creatinine_phosphokinase", "diabetes",
    "ejection_fraction", "high_blood_pressure", "platelets",
    "serum_creatinine", "serum_sodium", "sex", "smoking", "time",
    "DEATH_EVENT",
]


def main() -> None:
    rng = random.Random(20240711)
    rows = []
    for _ in range(N):
        age = round(min(95.0, max(40.0, rng.gauss(61, 12))))
        anaemia = int(rng.random() < 0.43)
        cpk = int(min(7861, max(23, rng.lognormvariate(5.5, 1.0))))
        diabetes = int(rng.random() < 0.42)
        ef = int(min(80, max(14, rng.gauss(38, 12))))
        hbp = int(rng.random() < 0.35)
        platelets = round(min(850000, max(25100, rng.gauss(263358, 97000))), 2)
        creatinine = round(min(9.4, max(0.5, rng.lognormvariate(0.25, 0.45))), 1)
        sodium = int(min(148, max(113, rng.gauss(136.6, 4.4))))
        sex = int(rng.random() < 0.65)
        smoking = int(rng.random() < 0.32)
        time = int(min(285, max(4, rng.uniform(4, 285))))
        risk = (
            -0.050 * (ef - 38)
            + 0.90 * (creatinine - 1.4)
            + 0.040 * (age - 61)
            - 0.010 * (time - 130)
            - 0.060 * (sodium - 136.6)
            + 0.25 * hbp
            + 0.30 * sex
            + rng.gauss(0, 1.1)
        )
        rows.append([age, anaemia, cpk, diabetes, ef, hbp, platelets,
                     creatinine, sodium, sex, smoking, time, risk])

    order = sorted(range(N), key=lambda i: rows[i][-1], reverse=True)
    deaths = set(order[:DEATHS])
    for i, row in enumerate(rows):
        row[-1] = int(i in deaths)

    with open("data/heart_failure.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(COLUMNS)
        writer.writerows(rows)


if __name__ == "__main__":
    main()
