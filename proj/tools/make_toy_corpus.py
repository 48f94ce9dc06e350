#!/usr/bin/env python3
"""Writes the toy frame database and 20-image corpus under data/toy/.

English originals (ENO) use only single-sense lemmas, so their frame sets are
known without running the disambiguator. VWC labels copy those sets exactly;
VWoC labels drop some of them and add frames the caption never mentions.
"""

import json
import pathlib
import re

FRAMES = [
    (1, "Event"),
    (2, "Intentionally_act"),
    (3, "Motion"),
    (4, "Self_motion"),
    (5, "Competition"),
    (6, "Performing_arts"),
    (7, "Make_noise"),
    (8, "Ingestion"),
    (9, "Food"),
    (10, "People"),
    (11, "People_by_age"),
    (12, "People_by_vocation"),
    (13, "Animals"),
    (14, "Locale"),
    (15, "Roadways"),
    (16, "Buildings"),
    (17, "Natural_features"),
    (18, "Clothing"),
    (19, "Color"),
    (20, "Body_parts"),
    (21, "Vehicle"),
    (22, "Businesses"),
    (23, "Furniture"),
    (24, "Relational_natural_features"),
    (25, "Weather"),
]

FES = {
    4: [("Self_mover", True), ("Goal", True), ("Place", False)],
    5: [("Participants", True), ("Competition", True)],
    6: [("Performer", True), ("Performance", True)],
    8: [("Ingestor", True), ("Ingestibles", True)],
    10: [("Person", True)],
    11: [("Person", True), ("Age", True)],
    13: [("Animal", True)],
    18: [("Garment", True), ("Wearer", False)],
}

RELATIONS = [
    ("inheritance", 1, 2),
    ("inheritance", 1, 3),
    ("inheritance", 3, 4),
    ("inheritance", 2, 5),
    ("inheritance", 2, 6),
    ("using", 6, 7),
    ("inheritance", 2, 8),
    ("using", 8, 9),
    ("inheritance", 10, 11),
    ("inheritance", 10, 12),
    ("using", 6, 12),
    ("inheritance", 14, 15),
    ("inheritance", 14, 16),
    ("inheritance", 14, 17),
    ("see_also", 17, 24),
    ("using", 3, 21),
    ("subframe", 5, 4),
    ("inheritance", 16, 22),
    ("using", 18, 20),
    ("perspective_on", 4, 13),
]

# lemma -> frames, per language. Multiword lemmas are allowed.
LEXICON = {
    "en": {
        "man": [10], "woman": [10], "people": [10],
        "boy": [11], "girl": [11], "child": [11],
        "musician": [12], "worker": [12], "street performer": [12],
        "dog": [13], "horse": [13],
        "street": [15], "road": [15],
        "building": [16], "store": [22],
        "beach": [17], "mountain": [17], "river": [17],
        "shirt": [18], "jacket": [18], "hat": [18],
        "red": [19], "blue": [19],
        "hand": [20],
        "car": [21], "bike": [21],
        "run": [4], "walk": [4], "jump": [4],
        "race": [5], "soccer": [5],
        "sing": [6], "guitar": [6],
        "bark": [7],
        "eat": [8], "pizza": [9], "sandwich": [9],
        "bench": [23], "snow": [25],
        # kept out of the English captions: two senses each
        "bank": [22, 24], "play": [5, 6],
    },
    "pt": {
        "homem": [10], "mulher": [10], "pessoa": [10],
        "menino": [11], "menina": [11], "criança": [11],
        "músico": [12], "trabalhador": [12], "artista de rua": [12],
        "cachorro": [13], "cavalo": [13],
        "rua": [15], "estrada": [15],
        "prédio": [16], "loja": [22],
        "praia": [17], "montanha": [17], "rio": [17],
        "camisa": [18], "jaqueta": [18], "chapéu": [18],
        "vermelho": [19], "vermelha": [19], "azul": [19],
        "mão": [20],
        "carro": [21], "bicicleta": [21],
        "corre": [4], "anda": [4], "pula": [4],
        "corrida": [5], "futebol": [5],
        "canta": [6], "violão": [6],
        "come": [8], "pizza": [9], "sanduíche": [9],
        "neve": [25],
        "banco": [22, 23], "margem": [24],
    },
}

# (ENO, PTT, PTO, extra VWoC frames, ENO frames VWoC drops)
IMAGES = [
    ("A man runs down the street", "Um homem corre pela rua", "Homem corre na rua", [21], [15]),
    ("Two dogs run on the beach", "Dois cachorros correm na praia", "Cachorro corre na praia", [17, 25], [4]),
    ("A girl in a red shirt eats pizza", "Uma menina de camisa vermelha come pizza", "Menina come pizza",
     [20], [19, 18]),
    ("A street performer sings with a guitar", "Um artista de rua canta com um violão",
     "Artista de rua toca violão", [7], [6]),
    ("A boy jumps off a bench into the river", "Um menino pula do banco no rio", "Menino pula no rio",
     [17], [23]),
    ("A woman walks a horse along the road", "Uma mulher anda com um cavalo pela estrada",
     "Mulher e cavalo na estrada", [13], [15]),
    ("People race bikes down a mountain", "Pessoas correm de bicicleta na montanha",
     "Corrida de bicicleta na montanha", [3], [5, 17]),
    ("A worker in a blue jacket walks to a building", "Um trabalhador de jaqueta azul anda até um prédio",
     "Trabalhador perto do prédio", [14], [16, 19]),
    ("A child in a hat eats a sandwich", "Uma criança de chapéu come um sanduíche",
     "Criança come sanduíche no banco", [20], [18]),
    ("A dog barks at a car on the street", "Um cachorro late para um carro na rua",
     "Cachorro e carro na rua", [4], [7, 21]),
    ("Children at a soccer game in the snow", "Crianças jogam futebol na neve", "Futebol na neve", [4], [5]),
    ("A musician sings in front of a store", "Um músico canta em frente a uma loja",
     "Músico canta na frente da loja", [16], [22]),
    ("A man in a red hat jumps", "Um homem de chapéu vermelho pula", "Homem pula", [11], [19]),
    ("A woman eats pizza in a building", "Uma mulher come pizza em um prédio", "Mulher come na loja",
     [22], [16]),
    ("A boy runs with a dog", "Um menino corre com um cachorro", "Menino e cachorro correm", [10], [13]),
    ("Two men race horses on the beach", "Dois homens correm com cavalos na praia",
     "Corrida de cavalos na praia", [21], [13]),
    ("A girl walks by the river", "Uma menina anda perto do rio", "Menina na margem do rio", [24], [17]),
    ("A worker with a hand on a car", "Um trabalhador com a mão em um carro", "Trabalhador e carro",
     [18], [20]),
    ("A musician with a guitar on a bench", "Um músico com um violão em um banco",
     "Músico no banco com violão", [7], [23]),
    ("People walk down a road in the snow", "Pessoas andam por uma estrada na neve",
     "Pessoas na estrada com neve", [17], [25]),
]


def words(text):
    return re.findall(r"[A-Za-z0-9'\-_\u0080-￿]+", text)


def forms(word, lang):
    out = [word]
    suffixes = ["s", "es"] if lang == "en" else ["s"] if lang == "pt" else []
    for s in suffixes:
        if len(word) > len(s) + 1 and word.endswith(s):
            out.append(word[: -len(s)])
    return out


def evoked(text, lang):
    """Frames of the English lemmas, mirroring greedy longest-match lookup."""
    lex = LEXICON[lang]
    longest = max(len(k.split()) for k in lex)
    ws = [w.lower() for w in words(text)]
    frames, i = set(), 0
    while i < len(ws):
        hit = None
        for n in range(min(longest, len(ws) - i), 1, -1):
            head = " ".join(ws[i : i + n - 1])
            for last in forms(ws[i + n - 1], lang):
                if f"{head} {last}" in lex:
                    hit = (n, f"{head} {last}")
                    break
            if hit:
                break
        if not hit:
            hit = (1, next((f for f in forms(ws[i], lang) if f in lex), None))
        n, lemma = hit
        if lemma is not None:
            senses = lex[lemma]
            assert len(senses) == 1, f"{lemma!r} is ambiguous in {text!r}"
            frames.add(senses[0])
        i += n
    return frames


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "data" / "toy"
    root.mkdir(parents=True, exist_ok=True)
    names = dict(FRAMES)

    with open(root / "frames.jsonl", "w", encoding="utf-8") as f:
        for fid, name in FRAMES:
            fes = [{"name": n, "core": c} for n, c in FES.get(fid, [])]
            f.write(json.dumps({"kind": "frame", "id": fid, "name": name, "fes": fes}, ensure_ascii=False) + "\n")
        for rtype, parent, child in RELATIONS:
            f.write(json.dumps({"kind": "relation", "type": rtype, "parent": parent, "child": child}) + "\n")
        lu = 100
        for lang in ("en", "pt"):
            for lemma, frames in sorted(LEXICON[lang].items()):
                for fid in frames:
                    rec = {"kind": "lu", "id": lu, "lemma": lemma, "pos": "n", "frame": fid, "lang": lang}
                    f.write(json.dumps(rec, ensure_ascii=False) + "\n")
                    lu += 1

    with open(root / "corpus.jsonl", "w", encoding="utf-8") as f:
        for k, (eno, ptt, pto, extra, drop) in enumerate(IMAGES, start=1):
            image = f"img{k:02d}"
            eno_frames = evoked(eno, "en")
            assert eno_frames, eno
            assert set(drop) <= eno_frames, (eno, drop, eno_frames)
            vwoc = (eno_frames - set(drop)) | set(extra)
            assert vwoc != eno_frames and vwoc
            rows = [
                {"id": f"{image}-ENO", "image": image, "setup": "ENO", "lang": "en", "text": eno},
                {"id": f"{image}-PTT", "image": image, "setup": "PTT", "lang": "pt", "text": ptt},
                {"id": f"{image}-PTO", "image": image, "setup": "PTO", "lang": "pt", "text": pto},
                {"id": f"{image}-VWC", "image": image, "setup": "VWC", "lang": "en",
                 "labels": [{"frame": names[x], "box": i} for i, x in enumerate(sorted(eno_frames))]},
                {"id": f"{image}-VWoC", "image": image, "setup": "VWoC", "lang": "en",
                 "labels": [{"frame": names[x], "box": i} for i, x in enumerate(sorted(vwoc))]},
            ]
            for r in rows:
                f.write(json.dumps(r, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
