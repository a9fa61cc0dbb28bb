#!/usr/bin/env python3
"""Generate the bundled 600-statement LIAR-format fixture.

Statements are synthetic. Each carries one or two cue words tied to its
consolidated label (with some cross-label noise) embedded in neutral filler,
so a bag-of-tokens model can beat the majority class without being perfect.
Fine labels are drawn in proportion to the full LIAR label distribution.

Usage: make_fixture.py OUT_DIR
"""

import random
import sys
from pathlib import Path

FINE = ["pants-fire", "false", "barely-true", "half-true", "mostly-true", "true"]
FINE_WEIGHTS = [1057, 1879, 2021, 2056, 2630, 3148]
COARSE = {"pants-fire": 0, "false": 0, "barely-true": 1, "half-true": 1,
          "mostly-true": 2, "true": 2}

CUES = [
    ["hoax", "secretly", "banned", "conspiracy", "invented", "fake", "never", "destroyed"],
    ["nearly", "roughly", "partly", "sometimes", "almost", "arguably", "often", "mixed"],
    ["census", "audit", "official", "records", "statistics", "report", "budget", "survey"],
]
SUBJECTS = ["the governor", "our senator", "the mayor", "the president", "my opponent",
            "the state", "congress", "the city council", "the administration", "voters"]
VERBS = ["cut", "raised", "spent", "doubled", "approved", "blocked", "proposed", "funded"]
OBJECTS = ["taxes", "school funding", "the deficit", "health care", "jobs", "wages",
           "pensions", "energy prices", "border security", "road repairs"]
TAILS = ["last year", "in 2010", "since taking office", "this session", "over a decade",
         "in the state", "for families", "across the country"]
SPEAKERS = ["barack-obama", "john-mccain", "rick-perry", "nancy-pelosi", "scott-walker",
            "chain-email", "facebook-posts", "marco-rubio"]
SPLITS = [("train", 400), ("valid", 100), ("test", 100)]


def statement(rng, coarse):
    words = [rng.choice(SUBJECTS), rng.choice(VERBS), rng.choice(OBJECTS), rng.choice(TAILS)]
    cue_class = coarse if rng.random() < 0.8 else rng.randrange(3)
    cues = rng.sample(CUES[cue_class], rng.choice([1, 2]))
    for cue in cues:
        words.insert(rng.randrange(len(words) + 1), cue)
    text = " ".join(words)
    return "Says " + text[0].upper() + text[1:] + "."


def main(out_dir):
    rng = random.Random(42)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    serial = 0
    for split, size in SPLITS:
        lines = []
        for _ in range(size):
            serial += 1
            fine = rng.choices(FINE, weights=FINE_WEIGHTS)[0]
            text = statement(rng, COARSE[fine])
            speaker = rng.choice(SPEAKERS)
            lines.append(f"{serial}.json\t{fine}\t{text}\teconomy\t{speaker}\n")
        (out / f"{split}.tsv").write_text("".join(lines), encoding="utf-8")


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])
