#!/usr/bin/env python3
"""Regenerates the bundled fixtures under data/fixtures.

Output is a pure function of the fixed seeds below, so rerunning the script
leaves the checked-in files unchanged.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def write_lines(path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def jsonl(rows):
    return [json.dumps(r, ensure_ascii=False) for r in rows]


# ---------------------------------------------------------------------------
# Shared geography

PLACES = [
    # surface, type, kb_id, country, population
    ("Kigali", "GPE", "KB0001", "RW", 1132686),
    ("Musanze", "GPE", "KB0002", "RW", 86685),
    ("Rubavu", "GPE", "KB0003", "RW", 149209),
    ("Huye", "GPE", "KB0004", "RW", 52768),
    ("Nyagatare", "GPE", "KB0005", "RW", 52125),
    ("Rusizi", "GPE", "KB0006", "RW", 63883),
    ("Lake Kivu", "LOC", "KB0007", "RW", 0),
    ("Nyabarongo River", "LOC", "KB0008", "RW", 0),
    ("Volcanoes Park", "LOC", "KB0009", "RW", 0),
    ("Kampala", "GPE", "KB0010", "UG", 1680600),
    ("Bujumbura", "GPE", "KB0011", "BI", 497166),
    ("Goma", "GPE", "KB0012", "CD", 670000),
]

# ---------------------------------------------------------------------------
# Situation frames

SF_KEYWORDS = {
    "water": ["water", "wells", "drinking", "contaminated", "thirst"],
    "food": ["food", "hunger", "rations", "starving", "harvest"],
    "med": ["medicine", "clinic", "cholera", "injured", "doctors"],
    "shelter": ["shelter", "tents", "homeless", "roofs"],
    "evac": ["evacuate", "evacuation", "fled", "displaced"],
    "infra": ["bridge", "road", "collapsed", "landslide"],
    "search": ["missing", "rescue", "trapped", "rescuers"],
    "utils": ["electricity", "power", "outage", "generators"],
    "crimeviolence": ["attack", "looting", "violence", "armed"],
    "regimechange": ["coup", "overthrow"],
    "terrorism": ["bomb", "militants", "explosion"],
}
# Plausible but weak associations that the affinity threshold must remove.
SF_WEAK = {"water": ["river"], "food": ["market"], "med": ["hospital"], "infra": ["traffic"]}
# Embedding neighbours: (word, neighbour, cosine).
SF_NEIGHBORS = [
    ("water", "drinkable", 0.82), ("water", "rain", 0.66), ("water", "river", 0.74),
    ("food", "maize", 0.79), ("food", "market", 0.72), ("cholera", "diarrhoea", 0.85),
    ("shelter", "camps", 0.77), ("fled", "refugees", 0.81), ("bridge", "bridges", 0.91),
    ("rescue", "rescued", 0.88), ("power", "blackout", 0.80), ("attack", "attacked", 0.90),
    ("bomb", "grenade", 0.74), ("hospital", "ward", 0.71),
]
SF_EXPANDED_GOOD = {
    "water": ["drinkable"], "food": ["maize"], "med": ["diarrhoea"], "shelter": ["camps"],
    "evac": ["refugees"], "infra": ["bridges"], "search": ["rescued"], "utils": ["blackout"],
    "crimeviolence": ["attacked"], "terrorism": ["grenade"],
}
FILLER = ("the a people in of and was were by after many local officials said reported "
          "town village families near district residents on for from more than").split()


def make_sf():
    rng = random.Random(20170101)
    out = ROOT / "sf"
    # Labeled documents: keywords mixed with filler.
    labeled = []
    for t, kws in SF_KEYWORDS.items():
        for _ in range(3):
            toks = []
            for _ in range(12):
                toks.append(rng.choice(kws) if rng.random() < 0.45 else rng.choice(FILLER))
            for w in SF_WEAK.get(t, []):
                toks.append(w)
            labeled.append({"type": t, "tokens": toks})
    write_lines(out / "labeled.jsonl", jsonl(labeled))
    write_lines(out / "neighbors.tsv", [f"{a}\t{b}\t{c:.2f}" for a, b, c in SF_NEIGHBORS])

    aff = []
    for t, kws in SF_KEYWORDS.items():
        for w in kws + SF_EXPANDED_GOOD.get(t, []):
            aff.append(f"{w}\t{t}\t{rng.uniform(0.81, 0.97):.3f}")
        for w in SF_WEAK.get(t, []):
            aff.append(f"{w}\t{t}\t{rng.uniform(0.55, 0.79):.3f}")
    for w in sorted(set(FILLER)):
        aff.append(f"{w}\twater\t0.120")
    aff.append("rain\twater\t0.930")  # below the neighbour cosine cut, never reached
    write_lines(out / "affinity.tsv", aff)
    write_lines(out / "lemmas.tsv", ["wells\twell", "tents\ttent", "bridges\tbridge",
                                     "rescuers\trescue", "doctors\tdoctor"])

    genres = ["NW", "SN", "WL"]
    docs = []
    types = list(SF_KEYWORDS)
    for d in range(20):
        n_seg = [1, 2, 3, 4, 5, 6][d % 6]
        doc_types = rng.sample(types, rng.choice([1, 2, 3, 4]))
        segs = []
        for s in range(n_seg):
            words = [rng.choice(FILLER) for _ in range(rng.randint(5, 9))]
            if rng.random() < 0.75:
                t = rng.choice(doc_types)
                for _ in range(rng.randint(1, 3)):
                    kw = rng.choice(SF_KEYWORDS[t] + SF_EXPANDED_GOOD.get(t, []))
                    words.insert(rng.randrange(len(words) + 1), kw)
            if rng.random() < 0.5:
                place = rng.choice(PLACES)[0]
                words.insert(rng.randrange(len(words) + 1), place)
            text = " ".join(words)
            segs.append(text[0].upper() + text[1:] + ".")
        docs.append({"doc_id": f"SF{d:03d}", "genre": genres[d % 3], "segments": segs})
    write_lines(out / "corpus.jsonl", jsonl(docs))
    write_lines(out / "gazetteer.tsv", [f"{p}\t{t}\t{k}" for p, t, k, _, _ in PLACES])
    write_lines(out / "urgency.tsv", ["SF000\twater\ttrue", "SF003\tmed\tfalse"])
    write_lines(out / "sf.toml", [
        "# Situation frames on the bundled 20-document corpus.",
        'recipe = "sf"',
        'corpus = "corpus.jsonl"',
        'output_dir = "out"',
        "",
        "[ner]",
        'gazetteer = "gazetteer.tsv"',
        "",
        "[sf]",
        'labeled = "labeled.jsonl"',
        'neighbors = "neighbors.tsv"',
        'affinity = "affinity.tsv"',
        'urgency = "urgency.tsv"',
        "th1 = 0.8",
        "lambda = -1.5",
        "k_cap = 3",
        'filter_mode = "both"',
        "location_window = 1",
    ])


# ---------------------------------------------------------------------------
# Entity linking

IL_WORDS = {"ikiyaga": "lake", "uruzi": "river", "pariki": "park", "ibirunga": "volcanoes",
            "umujyi": "city", "cya": "of", "wa": "of", "banki": "bank", "nkuru": "central",
            "ibitaro": "hospital", "bikuru": "main"}


def make_edl():
    rng = random.Random(4242)
    out = ROOT / "edl"
    kb = []
    for surface, t, kid, cc, pop in PLACES:
        alts = []
        if surface == "Lake Kivu":
            alts = ["Kivu"]
        kb.append((kid, t, surface, surface, alts, cc, pop))
    # Out-of-region places around the population floor.
    kb += [
        ("KB0013", "GPE", "Tallinn", "Tallinn", [], "EE", 426538),
        ("KB0014", "GPE", "Smallton", "Smallton", [], "US", 49999),
        ("KB0015", "GPE", "Bigton", "Bigton", [], "US", 50001),
        ("KB0016", "GPE", "Kivu", "Kivu", [], "FR", 1200),
    ]
    kb += [
        ("KB0017", "ORG", "Central Bank", "Central Bank", ["National Bank of Rwanda"], "RW", 0),
        ("KB0018", "ORG", "Main Hospital", "Main Hospital", ["Kigali Main Hospital"], "RW", 0),
        ("KB0019", "PER", "Paul Mugenzi", "Paul Mugenzi", ["Mugenzi"], "RW", 0),
        ("KB0020", "PER", "Alice Uwase", "Alice Uwase", ["Uwase"], "RW", 0),
    ]
    syll = ["ka", "ki", "ru", "mu", "nya", "ga", "bu", "ra", "se", "ho", "ze", "li"]
    for i in range(21, 51):
        name = "".join(rng.choice(syll) for _ in range(3)).capitalize()
        t = rng.choice(["GPE", "GPE", "LOC", "ORG", "PER"])
        cc = rng.choice(["RW", "UG", "KE", "TZ", "FR"])
        pop = rng.choice([0, 1000, 30000, 49999, 50001, 250000]) if t in ("GPE", "LOC") else 0
        kb.append((f"KB{i:04d}", t, name, name, [], cc, pop))
    write_lines(out / "kb.tsv", [
        f"{k}\t{t}\t{n}\t{a}\t{'|'.join(al)}\t{cc}\t{p}" for k, t, n, a, al, cc, p in kb])
    write_lines(out / "lexicon.tsv", [f"{s}\t{t}\t1.0" for s, t in sorted(IL_WORDS.items())])

    gaz = [f"{p}\t{t}\t{k}" for p, t, k, _, _ in PLACES]
    gaz += ["Ikiyaga cya Kivu\tLOC", "Banki Nkuru\tORG", "Ibitaro Bikuru\tORG",
            "Paul Mugenzi\tPER", "Alice Uwase\tPER", "Nyamata\tGPE", "Tallinn\tGPE", "Smallton\tGPE"]
    write_lines(out / "gazetteer.tsv", gaz)

    mentions = ["Kigali", "Musanze", "Ikiyaga cya Kivu", "Banki Nkuru", "Ibitaro Bikuru",
                "Paul Mugenzi", "Alice Uwase", "Nyamata", "Tallinn", "Smallton", "Rubavu", "Goma"]
    filler = "abantu benshi bari mu nzu nini kandi ejo hashize twabonye amazi".split()
    docs = []
    for d in range(12):
        segs = []
        for _ in range(3):
            words = [rng.choice(filler) for _ in range(rng.randint(4, 7))]
            words.insert(rng.randrange(len(words) + 1), rng.choice(mentions))
            segs.append(" ".join(words) + ".")
        docs.append({"doc_id": f"EDL{d:03d}", "genre": ["NW", "SN", "WL"][d % 3], "segments": segs})
    write_lines(out / "corpus.jsonl", jsonl(docs))
    write_lines(out / "edl.toml", [
        "# Tag, prune, link and cluster.",
        'recipe = "edl"',
        'corpus = "corpus.jsonl"',
        'output_dir = "out"',
        "",
        "[ner]",
        'gazetteer = "gazetteer.tsv"',
        "",
        "[edl]",
        'kb = "kb.tsv"',
        'lexicons = ["lexicon.tsv"]',
        "threshold = 0.5",
        'incident_countries = ["RW"]',
        'neighbor_countries = ["UG", "BI", "CD", "TZ"]',
        "population_floor = 50000",
    ])


# ---------------------------------------------------------------------------
# NER training data

def make_ner():
    rng = random.Random(777)
    out = ROOT / "ner"
    people = ["Paul Mugenzi", "Alice Uwase", "Jean Habimana", "Grace Mukamana", "Eric Niyonzima"]
    orgs = ["Red Cross", "World Food Programme", "Rwanda Police", "Central Bank"]
    places = [p for p, *_ in PLACES]
    words = ("the flood hit homes and roads while rescue teams worked through the night "
             "officials said water levels rose after heavy rain families moved to schools").split()
    docs = []
    for d in range(30):
        segs = []
        for _ in range(rng.randint(2, 5)):
            toks = [rng.choice(words) for _ in range(rng.randint(6, 11))]
            for _ in range(rng.randint(1, 2)):
                name = rng.choice(people + orgs + places)
                # Occasional misspelling for edit-distance propagation.
                if rng.random() < 0.15 and " " not in name:
                    i = rng.randrange(1, len(name))
                    name = name[:i] + name[i] * 2 + name[i + 1:]
                toks.insert(rng.randrange(len(toks) + 1), name)
            text = " ".join(toks)
            segs.append(text[0].upper() + text[1:] + ".")
        docs.append({"doc_id": f"NER{d:03d}", "genre": ["NW", "SN", "WL"][d % 3], "segments": segs})
    write_lines(out / "corpus.jsonl", jsonl(docs))
    gaz = [f"{p}\tPER" for p in people[:3]] + [f"{o}\tORG" for o in orgs[:3]]
    gaz += [f"{p}\t{t}\t{k}" for p, t, k, _, _ in PLACES[:8]]
    write_lines(out / "gazetteer.tsv", gaz)
    write_lines(out / "negatives.txt", ["The", "Officials", "Water", "Rescue"])
    write_lines(out / "terms.tsv", ["flood\t5", "rescue\t3", "water\t2", "rain\t1"])
    write_lines(out / "ner.toml", [
        "# Select in-domain sentences and project gazetteer labels onto them.",
        'recipe = "ner-data"',
        'corpus = "corpus.jsonl"',
        'output_dir = "out"',
        "",
        "[select]",
        'terms = "terms.tsv"',
        "budget = 60",
        'genre_ratio = "NW=0.4,SN=0.3,WL=0.3"',
        "",
        "[ner]",
        'gazetteer = "gazetteer.tsv"',
        'negatives = "negatives.txt"',
        "window = 5",
        "min_edit_dist = 2",
        "edit_propagate = true",
        "doc_propagate = true",
    ])


# ---------------------------------------------------------------------------
# MT data

def make_mt():
    rng = random.Random(31337)
    out = ROOT / "mt"
    english = ("water food people village river road school market child mother father house "
               "rain field city doctor clinic bridge night day help family friend teacher "
               "farmer goat cow tree hill lake").split()
    syll = ["ka", "ki", "ru", "mu", "nya", "ga", "bu", "ra", "se", "ho", "ze", "li", "to", "we"]
    il = {}
    used = set()
    for w in english:
        while True:
            cand = "".join(rng.choice(syll) for _ in range(rng.randint(2, 3)))
            if cand not in used:
                used.add(cand)
                il[w] = cand
                break
    # The lexicon knows most but not all of the vocabulary.
    lex = [f"{il[w]}\t{w}\t1.0" for w in english if rng.random() < 0.85]
    write_lines(out / "lexicon.tsv", lex)
    write_lines(out / "entities.tsv", ["Kigali\tKigali", "Musanze\tMusanze", "Huye\tHuye",
                                       "Rubavu\tRubavu"])
    docs = []
    mono = []
    for d in range(25):
        src, tgt = [], []
        for s in range(rng.randint(6, 10)):
            en = [rng.choice(english) for _ in range(rng.randint(4, 12))]
            if rng.random() < 0.2:
                en.insert(rng.randrange(len(en) + 1), rng.choice(["Kigali", "Musanze", "Huye"]))
            if rng.random() < 0.1:
                en.append("#help")
            if rng.random() < 0.05:
                en.append("http://relief.example.org/r" + str(d))
            src.append(" ".join(il.get(w, w) for w in en))
            tgt.append(" ".join(en))
        # Some documents have a target sentence split in two, some a dropped one.
        if d % 5 == 1 and len(tgt) > 2:
            words = tgt[1].split()
            if len(words) > 3:
                tgt[1:2] = [" ".join(words[: len(words) // 2]), " ".join(words[len(words) // 2:])]
        if d % 7 == 3:
            tgt.pop(len(tgt) // 2)
        docs.append({"doc_id": f"MT{d:03d}", "src": src, "tgt": tgt})
        mono.append({"doc_id": f"MONO{d:03d}", "genre": "NW",
                     "segments": [" ".join(il[w] for w in rng.sample(english, 6)) for _ in range(4)]})
    write_lines(out / "parallel_docs.jsonl", jsonl(docs))
    write_lines(out / "mono.jsonl", jsonl(mono))
    write_lines(out / "mt.toml", [
        "# Realign, filter, mask, augment and pick phrases for native informants.",
        'recipe = "mt-data"',
        'corpus = "mono.jsonl"',
        'output_dir = "out"',
        "seed = 7",
        "",
        "[mt]",
        'parallel_docs = "parallel_docs.jsonl"',
        'lexicon = "lexicon.tsv"',
        'entity_lexicon = "entities.tsv"',
        "swap_rate = 0.1",
        "filter_threshold = 0.5",
        "epochs = 60",
        "augment_copies = 1",
        "ni_n_max = 3",
        "ni_top_n = 50",
    ])


# ---------------------------------------------------------------------------
# Active learning

def make_al():
    rng = random.Random(99)
    tags = ["O", "B-PER", "I-PER", "B-GPE", "I-GPE"]
    rows = []
    for d in range(5):
        for s in range(3):
            toks = []
            for t in range(rng.randint(4, 10)):
                w = [rng.random() ** 3 for _ in tags]
                z = sum(w)
                probs = {tag: round(x / z, 6) for tag, x in zip(tags, w)}
                fix = round(1.0 - sum(probs.values()), 6)
                probs["O"] = round(probs["O"] + fix, 6)
                toks.append({"surface": f"w{t}", "probs": probs})
            rows.append({"doc_id": f"AL{d:03d}", "seg_id": s, "tokens": toks})
    write_lines(ROOT / "al" / "marginals.jsonl", jsonl(rows))


if __name__ == "__main__":
    make_sf()
    make_edl()
    make_ner()
    make_mt()
    make_al()
