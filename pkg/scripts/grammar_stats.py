"""Summarise the grammar synthesized from a model.

    python scripts/grammar_stats.py [MODEL.yaml]

Without an argument the built-in scene language is used.
"""

import sys
from collections import Counter

from asgcc.grammar import synthesize
from asgcc.modelfile import load
from asgcc.scene3d.language import build_scene3d_model


def main() -> None:
    model = load(sys.argv[1]) if len(sys.argv) > 1 else build_scene3d_model()
    g = synthesize(model)
    print(f"start symbol  {g.start_symbol}")
    print(f"productions   {len(g.productions)}")
    print(f"nonterminals  {len(g.nonterminals)}")
    print(f"tokens        {len(g.token_symbols)}")
    print("\nby origin")
    for origin, n in Counter(p.origin for p in g.productions).most_common():
        print(f"  {origin:16s} {n:4d}")
    print("\nby owner")
    for owner, n in Counter(p.owner for p in g.productions).most_common():
        print(f"  {owner:20s} {n:4d}")


if __name__ == "__main__":
    main()
