"""Hierarchical class taxonomy: definitions, aliases, validation, and diffs."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class ClassDef:
    internal_name: str
    external_alias: str
    definition: str
    exclusions: tuple[str, ...] = ()
    children: tuple["ClassDef", ...] = ()


@dataclass(frozen=True)
class ClassSchema:
    parents: tuple[ClassDef, ...]
    version: int = 1
    created_from: Optional[int] = None

    def parent_names(self) -> list[str]:
        return [p.internal_name for p in self.parents]

    def parent(self, internal_name: str) -> Optional[ClassDef]:
        for p in self.parents:
            if p.internal_name == internal_name:
                return p
        return None

    def walk(self) -> Iterator[tuple[str, ClassDef]]:
        """Yield (path, class) for every class, parents before children."""
        def rec(prefix: str, cls: ClassDef):
            path = f"{prefix}/{cls.internal_name}" if prefix else cls.internal_name
            yield path, cls
            for child in cls.children:
                yield from rec(path, child)
        for p in self.parents:
            yield from rec("", p)

    def alias_to_internal(self) -> dict[str, str]:
        return {c.external_alias: c.internal_name for _, c in self.walk()}

    def internal_to_alias(self) -> dict[str, str]:
        return {c.internal_name: c.external_alias for _, c in self.walk()}

    def find(self, internal_name: str) -> Optional[ClassDef]:
        for _, c in self.walk():
            if c.internal_name == internal_name:
                return c
        return None


@dataclass(frozen=True)
class Topic:
    name: str
    description: str = ""


@dataclass(frozen=True)
class TopicSet:
    topics: tuple[Topic, ...]

    def names(self) -> list[str]:
        return [t.name for t in self.topics]

    def __len__(self) -> int:
        return len(self.topics)


def make_topic_set(topics) -> TopicSet:
    """Build a TopicSet, merging names that collide after case folding."""
    seen: dict[str, Topic] = {}
    for t in topics:
        key = t.name.casefold()
        if key not in seen:
            seen[key] = t
    return TopicSet(topics=tuple(seen.values()))


@dataclass(frozen=True)
class SchemaViolation:
    path: str
    kind: str
    message: str


def validate_schema(schema: ClassSchema) -> list[SchemaViolation]:
    violations: list[SchemaViolation] = []

    def check_siblings(prefix: str, classes):
        seen: set[str] = set()
        for cls in classes:
            path = f"{prefix}/{cls.internal_name}" if prefix else cls.internal_name
            if cls.internal_name in seen:
                violations.append(
                    SchemaViolation(path, "DuplicateName",
                                    f"sibling name {cls.internal_name!r} repeats")
                )
            seen.add(cls.internal_name)
            if cls.internal_name == cls.external_alias:
                violations.append(
                    SchemaViolation(path, "AliasCollision",
                                    "external alias equals internal name")
                )
            if not cls.definition.strip():
                violations.append(
                    SchemaViolation(path, "EmptyDefinition", "definition is empty")
                )
            check_siblings(path, cls.children)

    check_siblings("", schema.parents)
    return violations


@dataclass(frozen=True)
class SchemaDiff:
    added: tuple[str, ...]
    removed: tuple[str, ...]
    changed: tuple[str, ...]

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.changed)


def diff_schema(old: ClassSchema, new: ClassSchema) -> SchemaDiff:
    old_map = {name: cls for name, cls in ((c.internal_name, c) for _, c in old.walk())}
    new_map = {name: cls for name, cls in ((c.internal_name, c) for _, c in new.walk())}
    added = tuple(sorted(set(new_map) - set(old_map)))
    removed = tuple(sorted(set(old_map) - set(new_map)))
    changed = tuple(
        sorted(
            name for name in set(old_map) & set(new_map)
            if old_map[name].definition != new_map[name].definition
            or old_map[name].exclusions != new_map[name].exclusions
        )
    )
    return SchemaDiff(added=added, removed=removed, changed=changed)


# -- serialization --------------------------------------------------------

def _class_from_dict(obj: dict, counter: list[int]) -> ClassDef:
    alias = obj.get("external_alias")
    if not alias:
        counter[0] += 1
        alias = f"K-{counter[0]:02d}"
    return ClassDef(
        internal_name=obj["internal_name"],
        external_alias=alias,
        definition=obj.get("definition", ""),
        exclusions=tuple(obj.get("exclusions") or ()),
        children=tuple(_class_from_dict(c, counter) for c in obj.get("children") or ()),
    )


def schema_from_dict(obj: dict) -> ClassSchema:
    # Aliases omitted in the file get opaque sequential codes; only aliases
    # are ever shown to end users.
    counter = [0]
    parents = tuple(_class_from_dict(p, counter) for p in obj.get("parents", ()))
    return ClassSchema(
        parents=parents,
        version=int(obj.get("version", 1)),
        created_from=obj.get("created_from"),
    )


def _class_to_dict(cls: ClassDef) -> dict:
    out = {
        "internal_name": cls.internal_name,
        "external_alias": cls.external_alias,
        "definition": cls.definition,
        "exclusions": list(cls.exclusions),
    }
    if cls.children:
        out["children"] = [_class_to_dict(c) for c in cls.children]
    return out


def schema_to_dict(schema: ClassSchema) -> dict:
    out = {
        "version": schema.version,
        "parents": [_class_to_dict(p) for p in schema.parents],
    }
    if schema.created_from is not None:
        out["created_from"] = schema.created_from
    return out


def load_schema(path: str) -> ClassSchema:
    if str(path).endswith(".toml"):
        with open(path, "rb") as fh:
            obj = tomllib.load(fh)
    else:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    return schema_from_dict(obj)


def save_schema(schema: ClassSchema, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema_to_dict(schema), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
