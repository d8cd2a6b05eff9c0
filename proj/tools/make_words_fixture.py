#!/usr/bin/env python3
"""Regenerate the English-words fixtures from num2words.

num2words writes "eight hundred and thirty-two" and puts commas between
scale groups; the words orthography drops both, so they are removed here.

Outputs (in tests/fixtures/):
  words_sample.tsv      value<TAB>words, about 1000 values from 0 to 10^64 - 1
  words_0_1e6.sha256    SHA-256 of the lines "value<TAB>words\n" for every
                        value in [0, 10^6], in increasing order
"""

import hashlib
import pathlib
import random

from num2words import num2words

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def words(n: int) -> str:
    text = num2words(n).replace(",", "")
    return " ".join(t for t in text.split() if t != "and")


def sample_values() -> list[int]:
    rng = random.Random(20240601)
    values = set(range(0, 130))
    values.update([999, 1000, 1001, 1010, 1100, 10**6, 10**6 + 1, 10**63, 10**64 - 1])
    for k in range(3, 64, 3):
        values.update([10**k, 10**k - 1, 10**k + 1, 7 * 10**k + 21])
    for digits in range(1, 65):
        for _ in range(12):
            values.add(rng.randrange(10 ** (digits - 1), 10**digits))
    while len(values) < 1000:
        values.add(rng.randrange(0, 10**64))
    return sorted(values)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "words_sample.tsv", "w", encoding="utf-8") as f:
        for n in sample_values():
            f.write(f"{n}\t{words(n)}\n")
    h = hashlib.sha256()
    for n in range(0, 10**6 + 1):
        h.update(f"{n}\t{words(n)}\n".encode())
    (OUT / "words_0_1e6.sha256").write_text(h.hexdigest() + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
