"""Regenerates the bundled fixture corpus (snapshot, code hits, repository mirror)."""

import json
import pathlib
import shutil

HERE = pathlib.Path(__file__).resolve().parent
TEMPLATES = HERE.parent.parent / "data" / "templates"


def template(name):
    return (TEMPLATES / f"{name}.txt").read_text()


def mit(holder):
    return template("MIT").replace("<year> <copyright holders>", holder)


def bsd3(holder):
    return template("BSD-3-Clause").replace("<year>, <copyright holder>", holder)


def apache(notice=None):
    text = template("Apache-2.0")
    return (notice + "\n\n" + text) if notice else text


def card(license_id, body):
    return f"---\nlicense: {license_id}\n---\n\n{body}\n"


def hub(kind, id, license, likes, org, followers, datasets=None, base=None):
    r = {"id": id, "kind": kind, "platform": "hub", "license": license, "engagement": likes,
         "organization": org, "followers": followers}
    if kind == "model":
        r["datasets"] = datasets or []
        r["base_model"] = base
    return r


def forge(id, license, stars):
    return {"id": id, "kind": "application", "platform": "forge", "license": license, "engagement": stars,
            "organization": id.split("/")[0], "followers": None}


SNAPSHOT = [
    hub("dataset", "acme/clean-text", "mit", 40, "acme", 1200),
    hub("dataset", "acme/web-crawl", "apache-2.0", 12, "acme", 1200),
    hub("dataset", "unilab/qa-pairs", "bsd-3-clause", 9, "unilab", 300),
    hub("dataset", "gpl-org/code-corpus", "gpl-3.0", 5, "gpl-org", 20),
    hub("dataset", "nobody/ghost-set", "mit", 2, None, None),
    hub("dataset", "acme/unused-set", "mit", 1, "acme", 1200),
    hub("model", "acme/base-lm", "mit", 120, "acme", 1200, ["acme/clean-text", "nobody/ghost-set"]),
    hub("model", "acme/chat-lm", "Apache 2.0", 80, "acme", 1200, ["unilab/qa-pairs"], "acme/base-lm"),
    hub("model", "acme/chat-lm-v2", "apache-2.0", 15, "acme", 1200, [], "acme/chat-lm"),
    hub("model", "indie/tiny-bert", "mit", 7, "indie", 15, [" web-crawl "]),
    hub("model", "indie/orphan", "mit", 3, "indie", 15),
    hub("model", "gpl-org/coder", "gpl-3.0", 30, "gpl-org", 20, ["gpl-org/code-corpus"]),
    hub("model", "acme/unused", "mit", 2, "acme", 1200, ["acme/clean-text"]),
    hub("model", "stranger/unresolved", "mit", 4, None, None, ["missing/dataset"]),
    hub("model", "quiet/no-likes", "mit", 0, "quiet", 1, ["acme/clean-text"]),
    forge("alice/chatbot", "mit", 55),
    forge("bob/summarizer", "apache-2.0", 21),
    forge("carol/notes", "mit", 4),
    forge("dave/codegen", "gpl-3.0", 8),
    forge("erin/lowstars", "mit", 0),
    forge("frank/mention-only", "mit", 3),
    forge("gina/notebook", "mit", 6),
    forge("hank/broken", "bsd-3-clause", 2),
    forge("ivy/finetune", None, 11),
]

HITS = [
    ("alice/chatbot", "acme/chat-lm", "app/model.py",
     'from transformers import AutoModelForCausalLM\n\nmodel = AutoModelForCausalLM.from_pretrained("acme/chat-lm")\n'),
    ("alice/chatbot", "acme/chat-lm", "docs/usage.md", "Load `acme/chat-lm` with transformers.\n"),
    ("bob/summarizer", "acme/base-lm", "summarize.py",
     'from transformers import pipeline\n\nsummarizer = pipeline("summarization", model="acme/base-lm")\n'),
    ("carol/notes", "indie/tiny-bert", "embed.py",
     'from sentence_transformers import SentenceTransformer\nencoder = SentenceTransformer("indie/tiny-bert")\n'),
    ("carol/notes", "indie/orphan", "orphan.py",
     'from transformers import AutoModel\nm = AutoModel.from_pretrained("indie/orphan")\n'),
    ("dave/codegen", "gpl-org/coder", "gen.py",
     'import transformers\ntok = transformers.AutoTokenizer.from_pretrained(\n    "gpl-org/coder",\n    trust_remote_code=True,\n)\n'),
    ("erin/lowstars", "acme/base-lm", "run.py",
     'from transformers import AutoModel\nAutoModel.from_pretrained("acme/base-lm")\n'),
    ("frank/mention-only", "acme/base-lm", "notes.py",
     '# we tried "acme/base-lm" but it was slow\nMODEL = "acme/base-lm"\nprint(MODEL)\n'),
    ("gina/notebook", "acme/chat-lm", "demo.ipynb",
     '{"cells": [{"source": ["AutoModel.from_pretrained(\\"acme/chat-lm\\")"]}]}\n'),
    ("hank/broken", "acme/base-lm", "legacy.py",
     'def load(:\n    return AutoModel.from_pretrained("acme/base-lm")  # py2 era\n'),
    ("ivy/finetune", "acme/chat-lm-v2", "train.py",
     'from peft import PeftModel\nmodel = PeftModel.from_pretrained(base, "acme/chat-lm-v2")\n'),
    ("ivy/finetune", "acme/chat-lm-v2", "scripts/setup.sh", "huggingface-cli download acme/chat-lm-v2\n"),
    ("zed/not-in-snapshot", "acme/base-lm", "x.py", 'AutoModel.from_pretrained("acme/base-lm")\n'),
]

ACME_DATA = "Copyright (c) 2023 Acme Labs"
UNILAB = "Copyright (c) 2022, Uni Lab"
ACME_MODEL = "Copyright 2024 Acme Labs Inc."
ACME_BASE = "Copyright (c) 2024 Acme Labs Research"

REPOS = {
    ("dataset", "acme/clean-text"): {
        "LICENSE": mit("2023 Acme Labs"),
        "README.md": card("mit", "# Clean Text\n\nDeduplicated web text."),
    },
    ("dataset", "acme/web-crawl"): {
        "README.md": card("apache-2.0", "# Web Crawl\n\nLicensed under the Apache License 2.0."),
        "data/part-0000.jsonl": '{"text": "hello"}\n',
    },
    ("dataset", "unilab/qa-pairs"): {
        "LICENSE.txt": bsd3("2022, Uni Lab"),
        "README.md": card("bsd-3-clause", "# QA Pairs"),
    },
    ("dataset", "gpl-org/code-corpus"): {
        "COPYING": template("GPL-3.0"),
    },
    ("dataset", "acme/unused-set"): {
        "README.md": card("mit", "# Unused"),
    },
    ("model", "acme/base-lm"): {
        "LICENSE": mit("2024 Acme Labs Research"),
        "README.md": card("mit", "# Base LM\n\nTrained on acme/clean-text.\n\nData notice: " + ACME_DATA + "."),
        "config.json": "{}\n",
    },
    ("model", "acme/chat-lm"): {
        "LICENSE": apache(),
        "NOTICE": "Acme Chat LM\n" + ACME_MODEL + "\n",
        "README.md": card("apache-2.0", "# Chat LM\n\nFine-tuned from acme/base-lm."),
    },
    ("model", "acme/chat-lm-v2"): {
        "README.md": card("apache-2.0", "# Chat LM v2\n\n" + ACME_MODEL + "\n"),
        "legal/license.md": apache(ACME_MODEL),
    },
    ("model", "indie/tiny-bert"): {
        "README.md": card("mit", "# Tiny BERT\n\nMIT licensed. See the model card."),
    },
    ("model", "gpl-org/coder"): {
        "LICENSE": template("GPL-3.0"),
    },
    ("application", "alice/chatbot"): {
        "LICENSE": mit("2024 Alice Example"),
        "README.md": "# Chatbot\n\nUses acme/chat-lm.\n\nThird-party notices:\n- " + ACME_MODEL + "\n- " + UNILAB + "\n",
        "app/model.py": "print('hi')\n",
    },
    ("application", "bob/summarizer"): {
        "LICENSE": apache("Copyright 2024 Bob Builder"),
        "README.md": "# Summarizer\n",
    },
    ("application", "carol/notes"): {
        "README.md": "# Notes\n\nPersonal project.\n",
    },
    ("application", "dave/codegen"): {
        "LICENSE": template("GPL-3.0"),
    },
    ("application", "hank/broken"): {
        "LICENSE.md": bsd3("2021, Hank"),
        "README.rst": "Broken\n======\n\nData from Acme: " + ACME_DATA + "\nModel: " + ACME_BASE + "\n",
    },
    ("application", "ivy/finetune"): {
        "docs/LICENSE": mit("2025 Ivy"),
        "README.md": "# Finetune\n\n(C) 2024 Acme Labs Inc.\n",
    },
}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    write_jsonl(HERE / "snapshot.jsonl", SNAPSHOT)
    write_jsonl(HERE / "code_hits.jsonl",
                [{"application": a, "model": m, "path": p, "content": c} for a, m, p, c in HITS])
    repos = HERE / "repos"
    if repos.exists():
        shutil.rmtree(repos)
    for (kind, id), files in REPOS.items():
        for rel, text in files.items():
            target = repos / kind / id / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
