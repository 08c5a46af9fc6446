"""Bundled synthetic fruit-feedback fixtures: schema, mock rule table,
deterministic corpus, and golden set used by the examples, the acceptance
suite, and `scripts/make_fixtures.py`."""

from __future__ import annotations

import json
import os
import random

from .corpus import Corpus, ProcessedDocument, corpus_from_documents, estimate_tokens
from .gateway import MockFallback, MockProfile, MockRule
from .prompting import PromptSpec, finalize
from .schema import ClassDef, ClassSchema
from .store import GoldenEntry, GoldenSet


def fruit_schema() -> ClassSchema:
    return ClassSchema(
        version=1,
        parents=(
            ClassDef(
                internal_name="Red Fruits",
                external_alias="K-01",
                definition=(
                    "Fruit feedback about crimson or scarlet produce. "
                    "Berries and currants with a red skin belong here."
                ),
                exclusions=("Pink citrus goes to the yellow group",),
                children=(
                    ClassDef("Cranberry", "K-11",
                             "A tart bog berry used in sauces."),
                    ClassDef("Redcurrant", "K-12",
                             "A small tart berry that grows on a bush."),
                    ClassDef("Strawberry", "K-13",
                             "A sweet red berry with external seeds."),
                ),
            ),
            ClassDef(
                internal_name="Yellow Fruits",
                external_alias="K-02",
                definition=(
                    "Fruit feedback about golden or amber produce. "
                    "Curved tropical fruit and sour citrus belong here."
                ),
                children=(
                    ClassDef("Banana", "K-21",
                             "A yellow fruit with a crescent shape."),
                    ClassDef("Lemon", "K-22",
                             "A sour yellow citrus fruit."),
                ),
            ),
            ClassDef(
                internal_name="Green Fruits",
                external_alias="K-03",
                definition=(
                    "Fruit feedback about verdant produce. "
                    "Unripe-looking or naturally green fruit belongs here."
                ),
                children=(
                    ClassDef("Lime", "K-31",
                             "A small sour green citrus fruit."),
                    ClassDef("Green Apple", "K-32",
                             "A crisp green orchard fruit."),
                ),
            ),
        ),
    )


# keyword -> (parent alias, child alias, parent internal, child internal)
SIGNALS = (
    ("tart sauce", "K-01", "K-11", "Red Fruits", "Cranberry"),
    ("bush berry", "K-01", "K-12", "Red Fruits", "Redcurrant"),
    ("seedy sweet", "K-01", "K-13", "Red Fruits", "Strawberry"),
    ("crescent", "K-02", "K-21", "Yellow Fruits", "Banana"),
    ("sour citrus", "K-02", "K-22", "Yellow Fruits", "Lemon"),
    ("small lime", "K-03", "K-31", "Green Fruits", "Lime"),
    ("crisp orchard", "K-03", "K-32", "Green Fruits", "Green Apple"),
)

_FILLER = (
    "the delivery arrived on time", "packaging was slightly dented",
    "my family liked the flavour", "price felt fair for the season",
    "will order again next month", "the app checkout was smooth",
    "ripeness was exactly right", "a couple of pieces were bruised",
)


def fruit_profile(prefix_fraction: float = 1.0, flip_rule=None,
                  fallback: MockFallback | None = None) -> MockProfile:
    rules = tuple(
        MockRule(pattern=keyword, parent=parent_alias, child=child_alias)
        for keyword, parent_alias, child_alias, _, _ in SIGNALS
    )
    return MockProfile(
        keyword_rules=rules,
        fallback=fallback or MockFallback(mode="fixed_label", label="K-01", child="K-11"),
        prefix_fraction=prefix_fraction,
        flip_rule=flip_rule,
    )


def fruit_corpus(n: int = 200, seed: int = 7) -> Corpus:
    """Deterministic corpus: each document opens with one signal phrase and
    continues with seeded filler feedback."""
    rng = random.Random(seed)
    docs = []
    for i in range(n):
        keyword = SIGNALS[i % len(SIGNALS)][0]
        filler = " ".join(rng.choice(_FILLER) for _ in range(3))
        text = f"{keyword} {filler}"
        docs.append(ProcessedDocument(
            id=f"d{i:03d}", source_id=f"d{i:03d}", text=text,
            segment_index=0, token_estimate=estimate_tokens(text),
        ))
    return corpus_from_documents(docs, source="fixtures:fruit")


def expected_labels(corpus: Corpus) -> dict[str, tuple[str, str]]:
    """Rule-table oracle: doc_id -> (parent internal, child internal)."""
    out = {}
    for doc in corpus.documents:
        for keyword, _pa, _ca, parent, child in SIGNALS:
            if keyword in doc.text:
                out[doc.id] = (parent, child)
                break
        else:
            out[doc.id] = ("Red Fruits", "Cranberry")  # fixture fallback
    return out


def fruit_golden(n: int = 21) -> GoldenSet:
    corpus = fruit_corpus(n=n)
    labels = expected_labels(corpus)
    entries = tuple(
        GoldenEntry(doc_id=doc.id, text=doc.text,
                    parent_label=labels[doc.id][0], child_label=labels[doc.id][1])
        for doc in corpus.documents
    )
    return GoldenSet(entries=entries, provenance="fixtures:fruit-golden")


def fruit_prompt(schema: ClassSchema | None = None) -> PromptSpec:
    schema = schema or fruit_schema()
    return finalize(schema, PromptSpec(schema_version=schema.version, cot_enabled=True))


def write_fixture_files(out_dir: str, n_docs: int = 200) -> dict[str, str]:
    """Materialize the fixtures as files for CLI use; returns path map."""
    from .schema import save_schema

    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "corpus": os.path.join(out_dir, "corpus.jsonl"),
        "schema": os.path.join(out_dir, "schema.json"),
        "profile": os.path.join(out_dir, "mock_profile.toml"),
        "golden": os.path.join(out_dir, "golden.jsonl"),
    }
    corpus = fruit_corpus(n=n_docs)
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(json.dumps({"id": doc.id, "text": doc.text}) + "\n")
    save_schema(fruit_schema(), paths["schema"])
    with open(paths["profile"], "w", encoding="utf-8") as fh:
        for keyword, parent_alias, child_alias, _, _ in SIGNALS:
            fh.write("[[rules]]\n")
            fh.write(f'pattern = "{keyword}"\n')
            fh.write(f'parent = "{parent_alias}"\n')
            fh.write(f'child = "{child_alias}"\n\n')
        fh.write('[fallback]\nmode = "fixed_label"\nlabel = "K-01"\nchild = "K-11"\n')
    golden = fruit_golden()
    with open(paths["golden"], "w", encoding="utf-8") as fh:
        for e in golden.entries:
            fh.write(json.dumps({
                "doc_id": e.doc_id, "text": e.text,
                "parent": e.parent_label, "child": e.child_label,
            }) + "\n")
    return paths
