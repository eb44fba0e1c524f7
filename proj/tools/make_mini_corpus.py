#!/usr/bin/env python3
"""Writes the bundled mini-corpus fixture (data/mini) used by the golden tests.

The output is fully determined by the seed below; rerunning it reproduces the
committed files byte for byte.
"""

import argparse
import json
import random
from pathlib import Path

SEED = 7

CULTURES = {
    "Brazil": ["brazil", "brazilian"],
    "China": ["china", "chinese"],
    "France": ["france", "french"],
    "India": ["india", "indian"],
    "Iran": ["iran", "iranian"],
    "Italy": ["italy", "italian"],
    "Japan": ["japan", "japanese"],
    "Mexico": ["mexico", "mexican"],
    "Nigeria": ["nigeria", "nigerian"],
    "Peru": ["peru", "peruvian"],
    "Saudi Arabia": ["saudi arabia", "saudi"],
    "Trinidad": ["trinidad", "trinidadian"],
}

# Background documents per culture; drives the frequency correlation.
BACKGROUND = {
    "Japan": 14, "India": 12, "Mexico": 10, "Italy": 9, "China": 8, "France": 7,
    "Brazil": 6, "Nigeria": 5, "Iran": 4, "Peru": 3, "Saudi Arabia": 3, "Trinidad": 2,
}

FILLER = [
    "the market opens early and closes late in the evening",
    "visitors often ask about the history of the old town",
    "the weather was mild for most of the season",
    "local families gather on weekends to share stories",
    "the museum added a new exhibit about trade routes",
    "a small shop near the station sells handmade goods",
    "students practiced for the annual festival parade",
    "the river runs past farms and quiet villages",
]

BACKGROUND_TEMPLATES = [
    "many travelers in {c} enjoy local dishes at breakfast and dinner",
    "a {d} cookbook collects recipes from every region of {c}",
    "the {d} fashion week showed new outfits and traditional attire",
    "restaurants in {c} change their menus with the seasons",
    "{d} families often share a large meal on holidays",
]


def country(culture):
    return CULTURES[culture][0]


def demonym(culture):
    return CULTURES[culture][1]


def filler(rng, n):
    return ". ".join(rng.sample(FILLER, n))


def planted(rng, culture, symbol, lines):
    body = rng.choice(lines).format(c=country(culture), d=demonym(culture), s=symbol)
    return f"{body}. {filler(rng, 2)}."


def build_corpus(rng):
    docs = []

    def add(text):
        docs.append({"id": f"doc{len(docs) + 1:04d}", "text": text, "source": "mini"})

    kimono = [
        "the {d} {s} is worn at summer festivals across {c}",
        "in {c} a silk {s} is kept for weddings and tea ceremonies",
        "a {d} {s} is tied with a wide sash called an obi",
    ]
    for _ in range(12):
        add(planted(rng, "Japan", "kimono", kimono))
    for _ in range(2):
        add(f"a museum in china displayed a kimono next to silk from japan and japanese prints. {filler(rng, 1)}.")

    for culture, symbol, lines, n in [
        ("Japan", "sushi", ["{d} {s} is served with pickled ginger in {c}",
                            "chefs in {c} train for years to make {s}"], 10),
        ("Mexico", "taco", ["street vendors in {c} sell a {s} on every corner",
                            "the {d} {s} is folded around grilled meat"], 10),
        ("India", "salwar", ["the {d} {s} is worn with a long tunic in {c}",
                             "a cotton {s} keeps cool in the summer heat of {c}"], 8),
        ("Italy", "pasta", ["{d} {s} is cooked until firm to the bite",
                            "every region of {c} has its own {s} shape"], 8),
        ("Nigeria", "jollof", ["{d} {s} is cooked with tomatoes and pepper",
                               "no party in {c} is complete without {s}"], 8),
    ]:
        for _ in range(n):
            add(planted(rng, culture, symbol, lines))

    add("a peruvian cook visited mexico and mexican markets, where the mexican taco was everywhere in mexico.")

    # Iran and Saudi Arabia together, with religious vocabulary for the topic model.
    hijab_lines = [
        "in iran and iranian cities a woman wears the hijab as a muslim custom, and saudi women follow islamic custom too",
        "the iranian hijab debate in iran reflects islamic teaching on modesty, a theme also discussed in saudi arabia",
        "muslim woman in iran choose a hijab and headscarf for prayer; saudi arabia has islamic rules as well",
        "iranian scholars in iran describe the hijab as islamic modesty for every muslim woman, as saudi clerics do",
    ]
    for i in range(8):
        add(f"{hijab_lines[i % len(hijab_lines)]}. {filler(rng, 1)}.")
    for _ in range(4):
        add(f"the iranian hijab is common in iran. {filler(rng, 2)}.")

    # Every culture appears twice next to rice, so no culture stands out.
    for culture in CULTURES:
        for _ in range(2):
            add(f"{demonym(culture)} cooks in {country(culture)} steam rice for lunch. {filler(rng, 1)}.")

    for _ in range(12):
        add(f"a light summer dress is easy to pack. {filler(rng, 2)}.")

    for culture, n in BACKGROUND.items():
        for i in range(n):
            line = BACKGROUND_TEMPLATES[i % len(BACKGROUND_TEMPLATES)].format(c=country(culture), d=demonym(culture))
            add(f"{line}. {filler(rng, 2)}.")

    for _ in range(9):
        add(f"{filler(rng, 3)}.")
    return docs


def build_generations():
    plan = [
        # culture, topic, symbols per sampled generation
        ("Japan", "clothing", [["kimono"], ["kimono", "dress"]]),
        ("China", "clothing", [["kimono", "dress"]]),
        ("Peru", "clothing", [["kimono"], ["dress"]]),
        ("India", "clothing", [["salwar", "dress"], ["salwar"]]),
        ("Brazil", "clothing", [["long top", "dress"]]),
        ("France", "clothing", [["robe", "dress"]]),
        ("Iran", "clothing", [["hijab"], ["hijab", "dress"]]),
        ("Saudi Arabia", "clothing", [["hijab"]]),
        ("Italy", "clothing", [["dress"]]),
        ("Mexico", "clothing", [["dress"]]),
        ("Japan", "food", [["sushi", "rice"], ["sushi"]]),
        ("Mexico", "food", [["taco"], ["taco", "rice"]]),
        ("Peru", "food", [["taco", "ceviche"], ["fried rice"]]),
        ("Italy", "food", [["pasta"], ["pasta", "jollof"]]),
        ("Nigeria", "food", [["jollof", "rice"], ["jollof"]]),
        ("Brazil", "food", [["jollof", "rice"]]),
        ("France", "food", [["jollof"]]),
        ("China", "food", [["jollof", "rice"]]),
        ("India", "food", [["jollof", "rice"]]),
        ("Trinidad", "food", [["jollof", "roti"]]),
        ("Saudi Arabia", "food", [["jollof", "rice"]]),
        ("Iran", "food", [["rice"]]),
    ]
    out = []
    for culture, topic, samples in plan:
        for i, symbols in enumerate(samples):
            gid = f"{culture.lower().replace(' ', '_')}-{topic}-{i}"
            out.append({"generation_id": gid, "culture": culture, "topic": topic, "symbols": symbols})
    return out


DEFINITIONS = [
    {"symbol": "kimono", "culture": "Japan",
     "definition": "A traditional wrapped-front robe with wide sleeves, tied with a sash."},
    {"symbol": "salwar", "culture": "India",
     "definition": "Loose trousers worn under a long loose top, often with a scarf."},
    {"symbol": "sushi", "culture": "Japan",
     "definition": "Vinegared rice served with raw fish or vegetables."},
    {"symbol": "taco", "culture": "Mexico",
     "definition": "A folded corn tortilla filled with meat, beans or cheese."},
    {"symbol": "hijab", "culture": "Iran",
     "definition": "A head covering worn by many Muslim women."},
    {"symbol": "pasta", "culture": "Italy",
     "definition": "Dough of durum wheat and water shaped and boiled."},
    {"symbol": "jollof", "culture": "Nigeria",
     "definition": "A one-pot dish of seasoned tomato stew and grains."},
]

CONFIG = {
    "corpus": "corpus.jsonl",
    "cultures": "cultures.json",
    "generations": "generations.jsonl",
    "definitions": "definitions.jsonl",
    "out_dir": "out",
    "threads": 1,
    "seed": 42,
    "lda": {"topics": 2, "iterations": 200},
}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "mini"))
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    write_jsonl(out / "corpus.jsonl", build_corpus(rng))
    write_jsonl(out / "generations.jsonl", build_generations())
    write_jsonl(out / "definitions.jsonl", DEFINITIONS)
    (out / "cultures.json").write_text(json.dumps(CULTURES, indent=2) + "\n", encoding="utf-8")
    (out / "config.json").write_text(json.dumps(CONFIG, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
