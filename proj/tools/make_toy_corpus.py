#!/usr/bin/env python3
# Copyright 2026 The subtok Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled synthetic English corpus and GloVe toy corpus.

Output is a pure function of --seed, so the committed files can be
regenerated byte for byte.
"""

import argparse
import pathlib
import random

NOUNS = [
    "house", "river", "teacher", "garden", "city", "window", "market", "school",
    "doctor", "farmer", "forest", "mountain", "letter", "student", "village",
    "kitchen", "painter", "bridge", "station", "library", "engine", "island",
    "harbour", "soldier", "singer", "winter", "summer", "morning", "evening",
    "journey", "story", "question", "answer", "friend", "neighbour", "child",
    "worker", "player", "builder", "reader", "writer", "teacher", "baker",
    "lake", "road", "field", "horse", "bird", "flower", "tree", "stone", "boat",
]
VERBS = [
    "walk", "talk", "paint", "build", "read", "write", "play", "work", "open",
    "close", "help", "visit", "learn", "teach", "watch", "clean", "cook", "plant",
    "climb", "cross", "answer", "follow", "carry", "travel", "listen", "start",
    "finish", "move", "jump", "call", "wait", "look", "need", "want", "show",
]
ADJECTIVES = [
    "happy", "quiet", "kind", "dark", "bright", "cold", "warm", "quick", "slow",
    "careful", "strong", "small", "large", "old", "young", "clear", "soft",
    "loud", "fair", "rich", "poor", "clean", "busy", "calm", "wild", "green",
]
DETERMINERS = ["the", "a", "this", "that", "every", "one", "some"]
PREPOSITIONS = ["near", "across", "behind", "under", "over", "beside", "into", "from"]
ADVERBS = ["today", "again", "often", "never", "always", "soon", "later", "together"]
CONJ = ["and", "but", "while", "because", "so"]
ONSETS = ["b", "d", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "st", "th", "gr", "kl"]
NUCLEI = ["a", "e", "i", "o", "u", "ai", "ou", "ea"]
CODAS = ["", "", "n", "r", "s", "l", "th", "nd", "rk"]


def make_names(rng, count):
    """Pseudo-word proper names, so the corpus has an open-ended vocabulary."""
    names = set()
    while len(names) < count:
        syllables = rng.randint(2, 4)
        word = "".join(rng.choice(ONSETS) + rng.choice(NUCLEI) + rng.choice(CODAS)
                       for _ in range(syllables))
        names.add(word.capitalize())
    return sorted(names)


def zipf_choice(rng, items):
    weights = [1.0 / (rank + 1) ** 0.9 for rank in range(len(items))]
    return rng.choices(items, weights=weights, k=1)[0]


def plural(noun):
    if noun.endswith("y") and noun[-2] not in "aeiou":
        return noun[:-1] + "ies"
    if noun.endswith(("s", "sh", "ch", "x")):
        return noun + "es"
    if noun == "child":
        return "children"
    return noun + "s"


def past(verb):
    irregular = {"build": "built", "read": "read", "write": "wrote", "teach": "taught",
                 "show": "showed", "carry": "carried"}
    if verb in irregular:
        return irregular[verb]
    if verb.endswith("e"):
        return verb + "d"
    return verb + "ed"


def gerund(verb):
    if verb.endswith("e") and verb != "see":
        return verb[:-1] + "ing"
    return verb + "ing"


def third(verb):
    if verb.endswith(("sh", "ch", "s", "x")):
        return verb + "es"
    if verb.endswith("y") and verb[-2] not in "aeiou":
        return verb[:-1] + "ies"
    return verb + "s"


def adjective(rng):
    adj = zipf_choice(rng, ADJECTIVES)
    roll = rng.random()
    if roll < 0.12:
        return "un" + adj
    if roll < 0.2:
        return "very " + adj
    return adj


def noun_phrase(rng):
    noun = zipf_choice(rng, NOUNS)
    if rng.random() < 0.35:
        noun = plural(noun)
        det = rng.choice(["the", "some", "many", "those", "these"])
    else:
        det = zipf_choice(rng, DETERMINERS)
    if rng.random() < 0.45:
        return f"{det} {adjective(rng)} {noun}"
    return f"{det} {noun}"


def verb_phrase(rng):
    verb = zipf_choice(rng, VERBS)
    roll = rng.random()
    if roll < 0.3:
        form = past(verb)
    elif roll < 0.55:
        form = third(verb)
    elif roll < 0.75:
        form = "was " + gerund(verb)
    elif roll < 0.85:
        form = "will " + verb
    else:
        form = "had " + ("re" + past(verb) if rng.random() < 0.3 else past(verb))
    return form


def clause(rng, names):
    subject = zipf_choice(rng, names) if rng.random() < 0.3 else noun_phrase(rng)
    parts = [subject, verb_phrase(rng)]
    if rng.random() < 0.6:
        parts.append(noun_phrase(rng))
    if rng.random() < 0.4:
        place = zipf_choice(rng, names) if rng.random() < 0.4 else noun_phrase(rng)
        parts.append(rng.choice(PREPOSITIONS) + " " + place)
    if rng.random() < 0.3:
        adj = zipf_choice(rng, ADJECTIVES)
        adv = adj[:-1] + "ily" if adj.endswith("y") else adj + "ly"
        parts.append(rng.choice([adv, rng.choice(ADVERBS)]))
    return " ".join(parts)


def sentence(rng, names):
    text = clause(rng, names)
    if rng.random() < 0.35:
        text += " " + rng.choice(CONJ) + " " + clause(rng, names)
    text = text[0].upper() + text[1:]
    return text + rng.choice([" .", " .", " .", " ?", " !"])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=str(pathlib.Path(__file__).resolve().parents[1] / "data"))
    parser.add_argument("--seed", type=int, default=20260101)
    parser.add_argument("--bytes", type=int, default=1_000_000)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    names = make_names(rng, 12000)
    rng.shuffle(names)
    lines, size = [], 0
    while size < args.bytes:
        line = sentence(rng, names)
        lines.append(line)
        size += len(line) + 1
    (out_dir / "corpus_en.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # Five tokens repeated in a cycle with light noise: a small, dense
    # co-occurrence matrix for embedding-training checks.
    cyc = ["red", "green", "blue", "cyan", "pink"]
    toy = []
    for _ in range(400):
        start = rng.randrange(len(cyc))
        length = rng.randint(6, 14)
        toy.append(" ".join(cyc[(start + k) % len(cyc)] for k in range(length)))
    (out_dir / "toy_cyclic.txt").write_text("\n".join(toy) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
