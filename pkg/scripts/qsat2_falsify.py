#!/usr/bin/env python3
"""Compare the 2QBF construction against brute force on all small formulas.

For every split n + r <= MAX_VARS (n existential, r universal) and every DNF
with up to MAX_CONJUNCTS conjuncts of at most two literals, check whether
"the formula is true" agrees with "a chi-valid policy within budget exists".
Prints counts per direction and the first few disagreements.
"""

import argparse
import itertools
import sys
from pathlib import Path

from sppkit import check_chi_valid
from sppkit.oracle import Qbf2Formula, brute_force_chi_optimal, qsat2_brute
from sppkit.reductions import parse_qdnf, reduce_qsat2

ROOT = Path(__file__).resolve().parent.parent


def small_conjuncts(nvars: int):
    lits = [v for i in range(1, nvars + 1) for v in (i, -i)]
    out = [frozenset({l}) for l in lits]
    out += [frozenset(p) for p in itertools.combinations(lits, 2) if p[0] != -p[1]]
    return out


def formulas(max_vars: int, max_conjuncts: int):
    for total in range(1, max_vars + 1):
        conj = small_conjuncts(total)
        for n in range(total + 1):
            xs, ys = tuple(range(1, n + 1)), tuple(range(n + 1, total + 1))
            for m in range(1, max_conjuncts + 1):
                for combo in itertools.combinations(conj, m):
                    yield Qbf2Formula(xs, ys, combo)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vars", type=int, default=3)
    ap.add_argument("--max-conjuncts", type=int, default=2)
    ap.add_argument("--show", type=int, default=5)
    args = ap.parse_args()

    red = reduce_qsat2(parse_qdnf((ROOT / "tests" / "data" / "qbf_true.qdnf").read_text()))
    hand = {"x1", "x2p", "y1", "y1p", "y2", "y2p"}
    v = check_chi_valid(red.instance, hand)
    print(f"hand policy on qbf_true: {'chi-valid' if v is None else 'violated'}"
          + ("" if v is None else f" (secret {v.secret}, got {v.achieved} < {v.required},"
                                  f" path {' '.join(v.path.events)})"))

    total = agree = 0
    misses = {"true, no cheap policy": [], "false, cheap policy": []}
    for f in formulas(args.max_vars, args.max_conjuncts):
        r = reduce_qsat2(f)
        best = brute_force_chi_optimal(r.instance)
        cheap = best is not None and best[1] <= r.budget
        truth = qsat2_brute(f)
        total += 1
        if cheap == truth:
            agree += 1
        else:
            misses["true, no cheap policy" if truth else "false, cheap policy"].append(f)
    print(f"formulas checked: {total}, agreement: {agree}")
    for kind, items in misses.items():
        print(f"{kind}: {len(items)}")
        for f in items[:args.show]:
            print(f"  E{list(f.exists_vars)} A{list(f.forall_vars)} "
                  + " | ".join(" & ".join(map(str, sorted(c, key=abs))) for c in f.conjuncts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
