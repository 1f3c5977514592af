#!/usr/bin/env python3
"""Regenerate fixtures/lisbon_bank.json, the 120-clip reference bank.

The bank is synthetic: 14 interviewees, the ten Lisbon filters, 12 questions,
clip durations spanning exactly 18..74 s. Output is deterministic.
"""
import json
import random
import sys
from pathlib import Path

TOPICS = [
    "affordable housing", "social conditions", "rentals", "government",
    "families", "gentrification", "developers", "tourism",
    "transportation", "universities",
]

INTERVIEWEES = [
    ("i01", "Ana Ribeiro", "government official"),
    ("i02", "Miguel Santos", "city council member"),
    ("i03", "Rita Carvalho", "long-term tenant"),
    ("i04", "João Ferreira", "property developer"),
    ("i05", "Sofia Almeida", "housing activist"),
    ("i06", "Pedro Costa", "hostel owner"),
    ("i07", "Inês Martins", "university student"),
    ("i08", "Carlos Sousa", "urban planner"),
    ("i09", "Marta Lopes", "social worker"),
    ("i10", "Rui Oliveira", "real estate agent"),
    ("i11", "Teresa Gomes", "retired resident"),
    ("i12", "Hugo Pereira", "transit authority engineer"),
    ("i13", "Catarina Dias", "economist"),
    ("i14", "Luís Mendes", "parish president"),
]

QUESTIONS = 12
CLIPS = 120
MIN_PER_TOPIC = 20


def build(seed=20190401):
    rng = random.Random(seed)
    clips = []
    for n in range(CLIPS):
        speaker = INTERVIEWEES[n % len(INTERVIEWEES)][0]
        k = rng.choice([1, 1, 2, 2, 2, 3])
        keywords = rng.sample(TOPICS, k)
        clips.append({
            "id": f"c{n + 1:03d}",
            "interviewee_id": speaker,
            "duration_s": rng.randint(19, 73),
            "keywords": keywords,
            "question_index": rng.randrange(QUESTIONS),
            "media_uri": f"media/c{n + 1:03d}.mp4",
        })
    # Pin the observed extremes.
    clips[0]["duration_s"] = 18
    clips[-1]["duration_s"] = 74
    # Top up thin topics.
    for topic in TOPICS:
        tagged = [c for c in clips if topic in c["keywords"]]
        pool = [c for c in clips if topic not in c["keywords"] and len(c["keywords"]) < 3]
        while len(tagged) < MIN_PER_TOPIC:
            c = pool.pop(rng.randrange(len(pool)))
            c["keywords"].append(topic)
            tagged.append(c)
    for c in clips[::9]:
        c["excerpt"] = "Answer to question %d." % (c["question_index"] + 1)
    return {
        "topics": TOPICS,
        "interviewees": [
            {"id": i, "display_name": name, "role": role}
            for i, name, role in INTERVIEWEES
        ],
        "clips": clips,
        "source_notes": "Synthetic reference bank shaped after the Lisbon affordable-housing "
                        "clip bank: 14 interviewees, fixed 12-question line, ten filters. "
                        "Clip total duration is a fixture choice.",
    }


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "fixtures" / "lisbon_bank.json"
    out.write_text(json.dumps(build(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
