import pytest

from taxonomist.schema import (
    ClassDef,
    ClassSchema,
    Topic,
    diff_schema,
    load_schema,
    make_topic_set,
    save_schema,
    schema_from_dict,
    schema_to_dict,
    validate_schema,
)


def small_schema():
    return ClassSchema(
        version=2,
        parents=(
            ClassDef("Alpha", "A-01", "About alpha.", ("not beta",),
                     children=(ClassDef("AlphaChild", "A-11", "Alpha subtype."),)),
            ClassDef("Beta", "A-02", "About beta."),
        ),
    )


class TestSchemaAccess:
    def test_walk_yields_parents_before_children(self):
        paths = [p for p, _ in small_schema().walk()]
        assert paths == ["Alpha", "Alpha/AlphaChild", "Beta"]

    def test_alias_maps_are_inverses(self):
        schema = small_schema()
        fwd = schema.alias_to_internal()
        back = schema.internal_to_alias()
        assert {internal: alias for alias, internal in fwd.items()} == back
        assert fwd["A-11"] == "AlphaChild"

    def test_parent_lookup(self):
        schema = small_schema()
        assert schema.parent("Beta").external_alias == "A-02"
        assert schema.parent("AlphaChild") is None
        assert schema.find("AlphaChild").definition == "Alpha subtype."


class TestValidation:
    def test_valid_schema_has_no_violations(self):
        assert validate_schema(small_schema()) == []

    def test_duplicate_sibling_name(self):
        schema = ClassSchema(parents=(
            ClassDef("X", "A-01", "x."), ClassDef("X", "A-02", "x again."),
        ))
        kinds = [v.kind for v in validate_schema(schema)]
        assert "DuplicateName" in kinds

    def test_alias_equals_internal_name(self):
        schema = ClassSchema(parents=(ClassDef("X", "X", "x."),))
        assert [v.kind for v in validate_schema(schema)] == ["AliasCollision"]

    def test_empty_definition(self):
        schema = ClassSchema(parents=(ClassDef("X", "A-01", "  "),))
        assert [v.kind for v in validate_schema(schema)] == ["EmptyDefinition"]


class TestDiff:
    def test_identical_schemas_diff_empty(self):
        assert diff_schema(small_schema(), small_schema()).is_empty()

    def test_added_removed_changed(self):
        old = small_schema()
        new = ClassSchema(parents=(
            ClassDef("Alpha", "A-01", "About alpha, sharpened.",
                     children=(ClassDef("AlphaChild", "A-11", "Alpha subtype."),)),
            ClassDef("Gamma", "A-03", "About gamma."),
        ))
        diff = diff_schema(old, new)
        assert diff.added == ("Gamma",)
        assert diff.removed == ("Beta",)
        assert diff.changed == ("Alpha",)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        schema = small_schema()
        path = tmp_path / "schema.json"
        save_schema(schema, str(path))
        assert load_schema(str(path)) == schema

    def test_missing_aliases_get_sequential_codes(self):
        schema = schema_from_dict({"parents": [
            {"internal_name": "One", "definition": "one."},
            {"internal_name": "Two", "definition": "two.",
             "children": [{"internal_name": "TwoA", "definition": "two a."}]},
        ]})
        assert schema.parents[0].external_alias == "K-01"
        assert schema.parents[1].external_alias == "K-02"
        assert schema.parents[1].children[0].external_alias == "K-03"

    def test_to_dict_keeps_hierarchy(self):
        obj = schema_to_dict(small_schema())
        assert obj["parents"][0]["children"][0]["internal_name"] == "AlphaChild"

    def test_toml_loading(self, tmp_path):
        path = tmp_path / "schema.toml"
        path.write_text(
            'version = 1\n'
            '[[parents]]\ninternal_name = "Solo"\nexternal_alias = "A-01"\n'
            'definition = "only class."\n'
        )
        schema = load_schema(str(path))
        assert schema.parent_names() == ["Solo"]


class TestTopics:
    def test_case_insensitive_dedup(self):
        ts = make_topic_set([Topic("Billing"), Topic("billing"), Topic("Login")])
        assert ts.names() == ["Billing", "Login"]
