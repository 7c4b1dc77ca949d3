"""Regenerate the frozen oracle outputs under tests/golden/.

Run from the repository root:  python3 tests/make_golden.py
The brute-force oracle is slow on the random corpus (several minutes), which
is why its answers are frozen instead of recomputed on every test run.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from _support import FIXTURE_NAMES, GOLDEN_DIR, corpus, fixture  # noqa: E402

from angle_persist.exact_algebra import GF2, QQ  # noqa: E402
from angle_persist.oracle import oracle_delta  # noqa: E402

WINDOWS = (3, 4, 5)
FIELDS = {"q": QQ, "fp:2": GF2}


def _points(multiset: dict) -> list:
    return [
        {"a": [a.numerator, a.denominator], "b": [b.numerator, b.denominator], "mult": m}
        for (a, b), m in sorted(multiset.items())
    ]


def _entry(c) -> dict:
    out = {}
    for fname, F in FIELDS.items():
        per_deg = {}
        for r in range(c.dim + 1):
            rep = oracle_delta(c, r, WINDOWS, F)
            if rep.diverged:
                per_deg[str(r)] = None
            else:
                per_deg[str(r)] = _points(rep.stabilized)
        out[fname] = per_deg
    return out


def main() -> None:
    GOLDEN_DIR.mkdir(exist_ok=True)
    t0 = time.time()
    fixtures = {name: _entry(fixture(name)) for name in FIXTURE_NAMES}
    (GOLDEN_DIR / "oracle_fixtures.json").write_text(
        json.dumps({"windows": WINDOWS, "fixtures": fixtures}, indent=1, sort_keys=True) + "\n"
    )
    print(f"fixtures done in {time.time() - t0:.1f}s")
    cases = {}
    for k, c in enumerate(corpus()):
        cases[str(k)] = _entry(c)
        print(f"corpus {k} done at {time.time() - t0:.1f}s", flush=True)
    (GOLDEN_DIR / "oracle_corpus.json").write_text(
        json.dumps({"windows": WINDOWS, "base_seed": 1000, "cases": cases}, indent=1, sort_keys=True) + "\n"
    )


if __name__ == "__main__":
    main()
