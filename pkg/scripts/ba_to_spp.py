#!/usr/bin/env python3
"""Convert an automaton in BA format into an spp instance with unit attributes.

BA format: an optional first line ``[init]``, then transitions ``sym,[p]->[q]``,
then one accepting state ``[f]`` per line.  Without an explicit initial line
the source of the first transition is initial.  Accepting states become
secrets of level 1; every event is protectable with clearance and cost 1.
"""

import argparse
import re
import sys
from pathlib import Path

from sppkit import Transition, serialize_instance
from sppkit.generate import Skeleton, from_accepting_automaton

_STATE = re.compile(r"^\[?([^\[\]\s,]+)\]?$")
_EDGE = re.compile(r"^([^,\s]+)\s*,\s*\[?([^\[\]\s]+?)\]?\s*->\s*\[?([^\[\]\s]+?)\]?$")


def _token(raw: str, prefix: str) -> str:
    name = re.sub(r"[^A-Za-z0-9_]", "_", raw)
    return name if name[:1].isalpha() else prefix + name


def parse_ba(text: str) -> Skeleton:
    initial, accepting, edges = [], [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if m := _EDGE.match(line):
            edges.append(Transition(_token(m[2], "s"), _token(m[1], "e"), _token(m[3], "s")))
        elif m := _STATE.match(line):
            (accepting if edges else initial).append(_token(m[1], "s"))
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    if not initial:
        if not edges:
            raise ValueError("no initial state and no transitions")
        initial = [edges[0].source]
    states = sorted({*initial, *accepting, *(t.source for t in edges), *(t.target for t in edges)})
    events = sorted({t.event for t in edges})
    return Skeleton(tuple(states), tuple(events), tuple(sorted(set(edges))),
                    tuple(dict.fromkeys(initial)), tuple(sorted(set(accepting))))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input")
    ap.add_argument("-o", "--output")
    args = ap.parse_args()
    try:
        inst = from_accepting_automaton(parse_ba(Path(args.input).read_text()))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = serialize_instance(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
