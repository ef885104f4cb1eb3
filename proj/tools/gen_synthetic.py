#!/usr/bin/env python3
"""Regenerates the bundled synthetic fixture datasets.

The sentences are template-generated so the rule-based parser handles them,
and every label is a noisy known function of three extracted features:

    hardness = clip(0.92 - 0.025*(SL - 5) - 0.22*NEG - 0.08*CLAUSE + u,
                    0.05, 0.95),   u ~ Uniform(-0.02, 0.02)

where SL is the sentence token count, NEG marks a negated main verb and
CLAUSE marks the presence of a "because" clause. A regressor fed the
extracted features can therefore recover the signal, which is what the
end-to-end tests assert.

Outputs (relative to the repository root):
    data/fixtures/synthetic286.json  - 286 halves, forest end-to-end test
    data/fixtures/synthetic200.json  - 200 halves, sequence-model training test
    data/fixtures/first100.ids       - test split of synthetic286 (first 100)
"""

import json
import pathlib
import random

NOUNS = [
    "farmer", "teacher", "soldier", "doctor", "lawyer", "artist", "pilot",
    "nurse", "sailor", "baker", "hunter", "singer", "writer", "student",
    "painter", "merchant", "banker", "tailor", "guard", "driver",
]

# (past form, base form) pairs the bundled verb table recognizes.
VERBS = [
    ("chased", "chase"), ("helped", "help"), ("watched", "watch"),
    ("followed", "follow"), ("blamed", "blame"), ("praised", "praise"),
    ("trusted", "trust"), ("warned", "warn"), ("ignored", "ignore"),
    ("punished", "punish"), ("rescued", "rescue"), ("thanked", "thank"),
    ("greeted", "greet"), ("obeyed", "obey"), ("guided", "guide"),
    ("joined", "join"), ("visited", "visit"), ("called", "call"),
]

ADJECTIVES = [
    "clever", "afraid", "angry", "brave", "careless", "guilty", "happy",
    "hungry", "jealous", "kind", "lazy", "lonely", "nervous", "proud",
    "sad", "tired", "weak", "wise", "strong", "quiet",
]

TAILS = [
    "in the garden", "near the river", "at the market", "after the storm",
    "during the night", "inside the barn", "behind the fence",
]


def make_half(rng, ident):
    n1, n2 = rng.sample(NOUNS, 2)
    past, base = rng.choice(VERBS)
    adj = rng.choice(ADJECTIVES)
    negated = rng.random() < 0.35
    clause = rng.random() < 0.70
    n_tails = rng.choice([0, 0, 1, 1, 2])
    tails = " ".join(rng.sample(TAILS, n_tails))

    verb_part = f"did not {base}" if negated else past
    body = f"The {n1} {verb_part} the {n2}"
    if tails:
        body += f" {tails}"
    if clause:
        body += f" because he was {adj}"
        question = f"Who was {adj}?"
        correct = rng.choice([1, 2])
    else:
        question = f"Who {verb_part} the {n2}?"
        correct = 1

    sl = len(body.split())  # SL: sentence tokens, punctuation discarded
    noise = rng.uniform(-0.02, 0.02)
    hardness = 0.92 - 0.025 * (sl - 5) - 0.22 * negated - 0.08 * clause + noise
    hardness = min(0.95, max(0.05, hardness))

    return {
        "id": ident,
        "source": "other",
        "sentence": body + ".",
        "question": question,
        "answers": [f"The {n1}", f"The {n2}"],
        "correct": correct,
        "hardness": round(hardness, 4),
        "respondents": rng.randint(15, 60),
    }


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"

    rng = random.Random(286)
    halves = [make_half(rng, f"synth-{i:03d}") for i in range(1, 287)]
    (root / "synthetic286.json").write_text(json.dumps(halves, indent=1) + "\n")

    ids = [f"synth-{i:03d}" for i in range(1, 101)]
    (root / "first100.ids").write_text(
        "# held-out test split of synthetic286.json\n" + "\n".join(ids) + "\n")

    rng = random.Random(200)
    halves = [make_half(rng, f"lstm-{i:03d}") for i in range(1, 201)]
    (root / "synthetic200.json").write_text(json.dumps(halves, indent=1) + "\n")


if __name__ == "__main__":
    main()
