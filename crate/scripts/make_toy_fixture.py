"""Writes the small hand-checkable fixture under fixtures/toy/."""

import json
import pathlib
import random

PSY = ["solitude", "anxiety", "illusion", "anger", "daydream", "instability", "grandeur",
       "idealization", "pride", "depression", "irritability", "disappointment", "dramatisation",
       "prejudice", "aversion", "insecurity", "helplessness", "vulnerability", "fear", "obsession",
       "compulsion"]
SCALED = ["valence", "arousal", "happiness", "disgust", "anger", "sadness", "fear", "concreteness",
          "imageability", "context_availability"]

WORDS = ["amor", "muerte", "cielo", "piedra"]
OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "toy"


def sonnet(i, rng):
    lines = []
    for _ in range(14):
        lines.append(" ".join(["el"] + [rng.choice(WORDS) for _ in range(3)] + ["de", "la", rng.choice(WORDS)]))
    stanzas = [lines[0:4], lines[4:8], lines[8:11], lines[11:14]]
    return {"id": f"toy-{i:02d}", "author": f"Autor {i % 3}", "period": "XVII",
            "title": f"Soneto {i}", "source": "DISCO_PAL", "stanzas": stanzas}


def main():
    rng = random.Random(7)
    sonnets, annotations, vectors = [], {}, []
    for i in range(1, 13):
        s = sonnet(i, rng)
        sonnets.append(s)
        fear = i % 2
        annotations[s["id"]] = {
            "psychological": {p: (fear if p == "fear" else (i // 2) % 2) for p in PSY},
            "scaled": {c: 1 + (i % 4) for c in SCALED},
        }
        centre = 1.0 if fear else -1.0
        vectors.append({"id": s["id"], "vector": [round(centre + rng.gauss(0, 0.3), 6) for _ in range(2)]
                        + [round(rng.gauss(0, 1), 6) for _ in range(2)]})
    (OUT / "corpus.json").write_text(json.dumps({"sonnets": sonnets, "annotations": annotations},
                                                ensure_ascii=False, indent=1) + "\n")
    with open(OUT / "embeddings.jsonl", "w") as f:
        f.write(json.dumps({"model": "toy-sentence", "level": "sentence", "dim": 4}) + "\n")
        for v in vectors:
            f.write(json.dumps(v) + "\n")
    with open(OUT / "tokens.jsonl", "w") as f:
        f.write(json.dumps({"model": "toy-tokens", "level": "token", "dim": 2}) + "\n")
        for s in sonnets[:3]:
            toks = [{"t": w, "v": [float(len(w)), float(k)]} for k, w in enumerate(s["stanzas"][0][0].split())]
            f.write(json.dumps({"id": s["id"], "tokens": toks}) + "\n")

    new = [sonnet(i, rng) for i in (21, 22)]
    for s in new:
        s["id"] = s["id"].replace("toy", "new")
    (OUT / "new.json").write_text(json.dumps({"sonnets": new, "annotations": {}}, ensure_ascii=False, indent=1) + "\n")
    with open(OUT / "new_embeddings.jsonl", "w") as f:
        f.write(json.dumps({"model": "toy-sentence", "level": "sentence", "dim": 4}) + "\n")
        for k, s in enumerate(new):
            f.write(json.dumps({"id": s["id"], "vector": [1.0 - 2 * k, 1.0 - 2 * k, 0.0, 0.0]}) + "\n")


if __name__ == "__main__":
    main()
