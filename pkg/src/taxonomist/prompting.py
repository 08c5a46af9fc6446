"""Classification prompt construction, refinement lineage, permutations, and
length optimization."""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .corpus import estimate_tokens
from .errors import OrphanExample, ThresholdUnreachable, UnknownClass
from .schema import ClassSchema

DEFAULT_PREAMBLE = (
    "You are a precise document classifier. Read the document and assign it to "
    "exactly one of the classes defined below. Use only the class codes given."
)

COT_SECTION = (
    "Think step by step: first decide which parent class fits the document, "
    "then pick the best child class within that parent, then give your answer."
)

TASK_INSTRUCTION = (
    'Respond with a single-line JSON object {"parent": "<code>", "child": "<code>"}. '
    "Omit \"child\" if the parent has no children."
)


@dataclass(frozen=True)
class FewShotExample:
    text: str
    expected_parent: str
    expected_child: Optional[str] = None
    origin: str = "seed"  # seed | preference | judge


@dataclass(frozen=True)
class DefinitionEdit:
    class_name: str
    new_definition: Optional[str] = None
    add_exclusions: tuple[str, ...] = ()


@dataclass(frozen=True)
class AuditRecord:
    edits: tuple[DefinitionEdit, ...]
    alignment_snapshot: Optional[str] = None


@dataclass(frozen=True)
class PromptSpec:
    schema_version: int
    examples: tuple[FewShotExample, ...] = ()
    example_order: tuple[int, ...] = ()
    cot_enabled: bool = False
    preamble: str = DEFAULT_PREAMBLE
    iteration: int = 0
    parent_iteration: Optional[int] = None
    hash: Optional[str] = None
    # Definition text and extra exclusions applied on top of the schema at
    # render time, so refinement and ablation never mutate the schema itself.
    definition_overrides: tuple[tuple[str, str], ...] = ()
    extra_exclusions: tuple[tuple[str, tuple[str, ...]], ...] = ()
    audit: tuple[AuditRecord, ...] = ()

    def ordered_examples(self) -> list[FewShotExample]:
        order = self.example_order or tuple(range(len(self.examples)))
        return [self.examples[i] for i in order]

    def overrides_map(self) -> dict[str, str]:
        return dict(self.definition_overrides)

    def extra_exclusions_map(self) -> dict[str, tuple[str, ...]]:
        return dict(self.extra_exclusions)


_SENTENCE_RE = re.compile(r"[^.!?\n]*[.!?\n]+|[^.!?\n]+$")


def split_sentences(text: str) -> list[str]:
    return [m.group(0).strip() for m in _SENTENCE_RE.finditer(text) if m.group(0).strip()]


def effective_definition(schema: ClassSchema, spec: PromptSpec, internal_name: str) -> str:
    overrides = spec.overrides_map()
    if internal_name in overrides:
        return overrides[internal_name]
    cls = schema.find(internal_name)
    return cls.definition if cls else ""


def build_prompt(schema: ClassSchema, spec: PromptSpec) -> str:
    """Render the base classification prompt (no document attached).

    Only external aliases appear in the rendered text; internal names stay
    server-side.
    """
    alias_of = schema.internal_to_alias()
    overrides = spec.overrides_map()
    extra_excl = spec.extra_exclusions_map()

    lines: list[str] = []
    if spec.preamble.strip():
        lines.append(spec.preamble.strip())
        lines.append("")
    lines.append("## Classes")
    for parent in schema.parents:
        for cls, depth in _iter_with_depth(parent):
            indent = "  " * depth
            definition = overrides.get(cls.internal_name, cls.definition)
            lines.append(f"{indent}- {cls.external_alias}: {definition}".rstrip())
            exclusions = tuple(cls.exclusions) + extra_excl.get(cls.internal_name, ())
            if exclusions:
                lines.append(f"{indent}  Not this class: {'; '.join(exclusions)}")

    examples = spec.ordered_examples()
    if examples:
        lines.append("")
        lines.append("## Examples")
        for ex in examples:
            if ex.expected_parent not in alias_of:
                raise OrphanExample(ex.expected_parent)
            label = {"parent": alias_of[ex.expected_parent]}
            if ex.expected_child is not None:
                if ex.expected_child not in alias_of:
                    raise OrphanExample(ex.expected_child)
                label["child"] = alias_of[ex.expected_child]
            lines.append(f"Text: {ex.text}")
            lines.append(f"Label: {json.dumps(label)}")

    if spec.cot_enabled:
        lines.append("")
        lines.append("## Reasoning")
        lines.append(COT_SECTION)

    return "\n".join(lines)


def _iter_with_depth(cls, depth: int = 0):
    yield cls, depth
    for child in cls.children:
        yield from _iter_with_depth(child, depth + 1)


def attach_document(base_prompt: str, doc_id: str, text: str) -> str:
    return (
        f"{base_prompt}\n\n## Task\n"
        f"Document ID: {doc_id}\n"
        f"Document:\n{text}\n"
        f"{TASK_INSTRUCTION}"
    )


def prompt_hash(schema: ClassSchema, spec: PromptSpec) -> str:
    return hashlib.sha256(build_prompt(schema, spec).encode("utf-8")).hexdigest()[:16]


def finalize(schema: ClassSchema, spec: PromptSpec) -> PromptSpec:
    """Stamp the spec with the digest of its rendered text."""
    return replace(spec, hash=prompt_hash(schema, spec))


def prompt_tokens(schema: ClassSchema, spec: PromptSpec) -> int:
    return estimate_tokens(build_prompt(schema, spec))


def refine_prompt(schema: ClassSchema, spec: PromptSpec, edits: Sequence[DefinitionEdit],
                  alignment_snapshot: Optional[str] = None) -> PromptSpec:
    """Produce the next prompt iteration with sharpened definitions/exclusions."""
    known = {c.internal_name for _, c in schema.walk()}
    for edit in edits:
        if edit.class_name not in known:
            raise UnknownClass(edit.class_name)
    overrides = spec.overrides_map()
    extra = spec.extra_exclusions_map()
    for edit in edits:
        if edit.new_definition is not None:
            overrides[edit.class_name] = edit.new_definition
        if edit.add_exclusions:
            extra[edit.class_name] = extra.get(edit.class_name, ()) + tuple(edit.add_exclusions)
    new_spec = replace(
        spec,
        iteration=spec.iteration + 1,
        parent_iteration=spec.iteration,
        definition_overrides=tuple(sorted(overrides.items())),
        extra_exclusions=tuple(sorted(extra.items())),
        audit=spec.audit + (AuditRecord(edits=tuple(edits), alignment_snapshot=alignment_snapshot),),
        hash=None,
    )
    return finalize(schema, new_spec)


def permutations(examples: Sequence, cap: int, seed: int = 0) -> list[tuple[int, ...]]:
    """All k! orderings when that fits under `cap`, else `cap` distinct seeded
    samples. The identity ordering is always present."""
    k = len(examples)
    if k == 0:
        return [()]
    total = 1
    for i in range(2, k + 1):
        total *= i
    if total <= cap:
        return [tuple(p) for p in itertools.permutations(range(k))]
    rng = random.Random(seed)
    identity = tuple(range(k))
    chosen: set[tuple[int, ...]] = {identity}
    while len(chosen) < cap:
        perm = list(range(k))
        rng.shuffle(perm)
        chosen.add(tuple(perm))
    out = sorted(chosen)
    out.remove(identity)
    return [identity] + out


# -- persistence ----------------------------------------------------------

def spec_to_dict(spec: PromptSpec) -> dict:
    return {
        "schema_version": spec.schema_version,
        "examples": [
            {
                "text": e.text,
                "expected_parent": e.expected_parent,
                "expected_child": e.expected_child,
                "origin": e.origin,
            }
            for e in spec.examples
        ],
        "example_order": list(spec.example_order),
        "cot_enabled": spec.cot_enabled,
        "preamble": spec.preamble,
        "iteration": spec.iteration,
        "parent_iteration": spec.parent_iteration,
        "hash": spec.hash,
        "definition_overrides": [list(p) for p in spec.definition_overrides],
        "extra_exclusions": [[name, list(excl)] for name, excl in spec.extra_exclusions],
    }


def spec_from_dict(obj: dict) -> PromptSpec:
    return PromptSpec(
        schema_version=obj["schema_version"],
        examples=tuple(
            FewShotExample(
                text=e["text"],
                expected_parent=e["expected_parent"],
                expected_child=e.get("expected_child"),
                origin=e.get("origin", "seed"),
            )
            for e in obj.get("examples", ())
        ),
        example_order=tuple(obj.get("example_order", ())),
        cot_enabled=obj.get("cot_enabled", False),
        preamble=obj.get("preamble", DEFAULT_PREAMBLE),
        iteration=obj.get("iteration", 0),
        parent_iteration=obj.get("parent_iteration"),
        hash=obj.get("hash"),
        definition_overrides=tuple(
            (name, text) for name, text in obj.get("definition_overrides", ())
        ),
        extra_exclusions=tuple(
            (name, tuple(excl)) for name, excl in obj.get("extra_exclusions", ())
        ),
    )


def load_spec(path: str) -> PromptSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def save_spec(spec: PromptSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# -- length optimization --------------------------------------------------

@dataclass(frozen=True)
class _Segment:
    kind: str  # "preamble" | "definition"
    class_name: Optional[str]
    index: int  # sentence index within its text
    text: str


def _segments(schema: ClassSchema, spec: PromptSpec) -> list[_Segment]:
    segs = [
        _Segment("preamble", None, i, s)
        for i, s in enumerate(split_sentences(spec.preamble))
    ]
    for _, cls in schema.walk():
        definition = effective_definition(schema, spec, cls.internal_name)
        for i, s in enumerate(split_sentences(definition)):
            segs.append(_Segment("definition", cls.internal_name, i, s))
    return segs


def _without_segment(schema: ClassSchema, spec: PromptSpec, seg: _Segment) -> PromptSpec:
    if seg.kind == "preamble":
        sentences = split_sentences(spec.preamble)
        del sentences[seg.index]
        return replace(spec, preamble=" ".join(sentences), hash=None)
    definition = effective_definition(schema, spec, seg.class_name)
    sentences = split_sentences(definition)
    del sentences[seg.index]
    overrides = spec.overrides_map()
    overrides[seg.class_name] = " ".join(sentences)
    return replace(spec, definition_overrides=tuple(sorted(overrides.items())), hash=None)


def optimize_prompt(schema: ClassSchema, spec: PromptSpec, validation, theta: float,
                    config) -> PromptSpec:
    """Greedy sentence ablation: repeatedly drop the sentence with the largest
    token saving whose removal keeps validation macro-F1 at or above `theta`.

    `validation` is a GoldenSet; `config` a BackendConfig used to score
    candidate prompts.
    """
    from .gateway import evaluate_prompt  # local import to avoid a cycle

    current = spec
    base_score = evaluate_prompt(schema, current, validation, config)
    if base_score < theta:
        raise ThresholdUnreachable(base_score, theta)

    while True:
        current_tokens = prompt_tokens(schema, current)
        best: Optional[tuple[int, int, PromptSpec]] = None  # (saving, position, spec)
        for pos, seg in enumerate(_segments(schema, current)):
            candidate = _without_segment(schema, current, seg)
            saving = current_tokens - prompt_tokens(schema, candidate)
            if saving <= 0:
                continue
            if evaluate_prompt(schema, candidate, validation, config) < theta:
                continue  # critical sentence, keep it
            if best is None or saving > best[0]:
                best = (saving, pos, candidate)
        if best is None:
            break
        current = best[2]
    return finalize(schema, current)
