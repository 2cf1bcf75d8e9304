#!/usr/bin/env python3
# Copyright 2026 The rqkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the small word2vec fixture under data/embeddings.

The vectors are seeded Gaussian noise: they only exercise the loaders and
pipelines, they carry no meaning.
"""
import argparse
import pathlib
import random
import re

COMMON = """
the be to of and a in that have i it for not on with he as you do at this but his by from they we say her she
or an will my one all would there their what so up out if about who get which go me when make can like time no
just him know take people into year your good some could them see other than then now look only come its over
think also back after use two how our work first well way even new want because any these give day most us is
are was were been has had did said does debate post thread argument point evidence read reason law laws church
god atheist religion science fact facts abortion gun guns rights freedom vote government state country money
life death child children woman women man men people thing things question questions answer answers sense
really never always ever maybe actually obviously clearly right wrong true false nobody everybody anyone someone
world war peace history book books school kids family friend friends game games team win lose lost best worst
better worse great awful love hate happy sad angry funny ridiculous stupid smart idea ideas opinion opinions
""".split()


def vocabulary(lexicon: pathlib.Path, size: int) -> list[str]:
    words: list[str] = []
    seen: set[str] = set()

    def add(w: str) -> None:
        if w and w not in seen:
            seen.add(w)
            words.append(w)

    for line in lexicon.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#") or ":" not in line:
            continue
        for entry in line.split(":", 1)[1].split(","):
            entry = entry.strip().lower()
            if re.fullmatch(r"[a-z][a-z']*", entry):
                add(entry)
    for w in COMMON:
        add(w)
    i = 0
    while len(words) < size:
        add(f"tok{i}")
        i += 1
    return words[:size]


def main() -> None:
    root = pathlib.Path(__file__).resolve().parent.parent
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=2000)
    ap.add_argument("--dim", type=int, default=25)
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--out", type=pathlib.Path, default=root / "data" / "embeddings" / "tiny.w2v.txt")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    words = vocabulary(root / "data" / "lexicon" / "standin.dic", args.size)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", encoding="utf-8") as f:
        f.write(f"{len(words)} {args.dim}\n")
        for w in words:
            f.write(w + " " + " ".join(f"{rng.gauss(0.0, 0.3):.6f}" for _ in range(args.dim)) + "\n")


if __name__ == "__main__":
    main()
