#!/usr/bin/env python3
"""Generates the bundled synthetic CLIR fixtures under data/fixtures/.

Each language (fa, ru, zh) gets a JSONL corpus, JSONL topics with several
translator variants plus the (en, original) text, and graded TREC qrels.
Text is pseudo-words over the language's script, so the corpora exercise
the analyzers without shipping real documents.

The output is fully determined by SEED; rerunning rewrites identical files.
"""

import json
import random
from pathlib import Path

SEED = 20221115
NUM_TOPICS = 12
DOCS_PER_LANG = 240

ALPHABETS = {
    "fa": "ابپتثجچحخدذرزژسشصضطظعغفقکگلمنوهی",
    "ru": "абвгдежзийклмнопрстуфхцчшщыэюя",
    "en": "abcdefghijklmnopqrstuvwxyz",
}

# Probability that a translator renders a topic term with an unrelated word.
TRANSLATORS = {
    "fa": {"ht": 0.0, "bing": 0.12, "facebook": 0.3, "huawei": 0.45},
    "ru": {"ht": 0.0, "bing": 0.15, "huawei": 0.2},
    "zh": {"ht": 0.0, "bing": 0.25, "caiyun": 0.3, "huawei": 0.35, "youdao": 0.1},
}


def make_vocab(rng, lang, size):
    words = set()
    while len(words) < size:
        if lang == "zh":
            words.add("".join(chr(0x4E00 + rng.randrange(0, 6000)) for _ in range(2)))
        else:
            alphabet = ALPHABETS[lang]
            words.add("".join(rng.choice(alphabet) for _ in range(rng.randint(3, 7))))
    return sorted(words)


def join(lang, words):
    return "".join(words) if lang == "zh" else " ".join(words)


def sentence(lang, words):
    text = join(lang, words)
    if lang == "zh":
        return text + "。"
    if lang == "ru" and text:
        return text[0].upper() + text[1:] + "."
    return text + "."


def build_language(rng, lang, out_dir):
    vocab = make_vocab(rng, lang, 900)
    en_vocab = make_vocab(rng, "en", 400)
    rng.shuffle(vocab)
    topic_terms = vocab[: NUM_TOPICS * 7]
    filler = vocab[NUM_TOPICS * 7:]

    topics = []
    for t in range(NUM_TOPICS):
        terms = topic_terms[t * 7:(t + 1) * 7]
        topics.append({
            "id": str(101 + t),
            "key": terms[:3],
            "desc": terms[3:],
            "en_key": rng.sample(en_vocab, 3),
            "en_desc": rng.sample(en_vocab, 4),
        })

    docs = []
    qrels = []

    def body(words, extra):
        mixed = words + rng.sample(filler, extra)
        rng.shuffle(mixed)
        return mixed

    def add_doc(title_words, body_words):
        docs.append((title_words, body_words))
        return len(docs) - 1

    for topic in topics:
        key, desc = topic["key"], topic["desc"]
        judged = []
        for _ in range(2):  # grade 3: every key term, some description terms
            words = list(key) + rng.sample(desc, 2)
            judged.append((add_doc(rng.sample(filler, 3), body(words, rng.randint(40, 70))), 3))
        for _ in range(2):  # grade 2: partial key coverage
            words = rng.sample(key, 2) + rng.sample(desc, 2)
            judged.append((add_doc(rng.sample(filler, 3), body(words, rng.randint(40, 70))), 2))
        for _ in range(2):  # grade 1: description vocabulary only
            words = rng.sample(desc, 2)
            judged.append((add_doc(rng.sample(filler, 3), body(words, rng.randint(30, 50))), 1))
        # grade 1, lexically unreachable: no topic term at all
        judged.append((add_doc(rng.sample(filler, 3), body([], rng.randint(20, 40))), 1))
        for _ in range(6):  # non-relevant documents that repeat key terms
            words = [t for t in rng.sample(key, 2) for _ in range(rng.randint(2, 4))]
            term = words[0]
            judged.append((add_doc([term] + rng.sample(filler, 2), body(words, rng.randint(8, 20))), 0))
        topic["judged"] = judged

    while len(docs) < DOCS_PER_LANG:
        add_doc(rng.sample(filler, rng.randint(3, 6)), body([], rng.randint(20, 60)))

    order = list(range(len(docs)))
    rng.shuffle(order)
    doc_ids = {}
    for position, idx in enumerate(order):
        doc_ids[idx] = f"{lang}-{position + 1:04d}"

    corpus_lines = []
    for idx in sorted(range(len(docs)), key=lambda i: doc_ids[i]):
        title_words, body_words = docs[idx]
        corpus_lines.append(json.dumps({
            "id": doc_ids[idx],
            "title": join(lang, title_words) if lang == "zh" else " ".join(title_words),
            "text": sentence(lang, body_words),
            "lang": lang,
        }, ensure_ascii=False))

    topic_lines = []
    for topic in topics:
        variants = [{
            "lang": "en",
            "translator": "original",
            "title": " ".join(topic["en_key"]),
            "description": sentence("en", topic["en_key"] + topic["en_desc"]),
        }]
        # One draw per word position, shared by every translator, so a noisier
        # translator garbles a superset of the words a cleaner one garbles.
        title_draws = [rng.random() for _ in topic["key"]]
        desc_draws = [rng.random() for _ in topic["key"] + topic["desc"]]
        for name, noise in TRANSLATORS[lang].items():
            def render(words, draws):
                return [rng.choice(filler) if u < noise else w for w, u in zip(words, draws)]
            variants.append({
                "lang": lang,
                "translator": name,
                "title": join(lang, render(topic["key"], title_draws)),
                "description": sentence(lang, render(topic["key"] + topic["desc"], desc_draws)),
            })
        topic_lines.append(json.dumps({"topic_id": topic["id"], "variants": variants}, ensure_ascii=False))

        filler_ids = rng.sample(sorted(doc_ids[i] for i in range(NUM_TOPICS * 13, len(docs))), 3)
        for doc_idx, grade in topic["judged"]:
            qrels.append((topic["id"], doc_ids[doc_idx], grade))
        for doc_id in filler_ids:
            qrels.append((topic["id"], doc_id, 0))

    qrels.sort()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "corpus.jsonl").write_text("\n".join(corpus_lines) + "\n", encoding="utf-8")
    (out_dir / "topics.jsonl").write_text("\n".join(topic_lines) + "\n", encoding="utf-8")
    (out_dir / "qrels.txt").write_text("".join(f"{t} 0 {d} {g}\n" for t, d, g in qrels), encoding="utf-8")


def main():
    root = Path(__file__).resolve().parent.parent / "data" / "fixtures"
    rng = random.Random(SEED)
    for lang in ("fa", "ru", "zh"):
        build_language(rng, lang, root / lang)


if __name__ == "__main__":
    main()
