"""Render the bundled scene programs to OBJ and JSON and report timings.

    python scripts/render_corpus.py [--out DIR]
"""

import argparse
import time
from pathlib import Path

from asgcc.scene3d import CORPUS, corpus_text, evaluate, json_text, obj_text, scene3d_language


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="renders", help="output directory")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lang = scene3d_language()
    for name in CORPUS:
        t0 = time.perf_counter()
        result = lang.parse(corpus_text(name))
        t1 = time.perf_counter()
        cubes = evaluate(result.graph)
        t2 = time.perf_counter()
        (out / f"{name}.obj").write_text(obj_text(cubes))
        (out / f"{name}.json").write_text(json_text(cubes))
        print(
            f"{name:6s} nodes={len(result.graph.nodes):4d} readings={result.forest.count_trees():3d} "
            f"cubes={len(cubes):5d} parse={1000 * (t1 - t0):6.1f}ms eval={1000 * (t2 - t1):6.1f}ms"
        )


if __name__ == "__main__":
    main()
