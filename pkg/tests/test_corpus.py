import json

import pytest

from text2logic.corpus import (
    FormulaError,
    SchemaError,
    VocabViolation,
    bundled,
    corpus_dir,
    find_puzzle,
    load_puzzle,
    puzzle_from_dict,
    validate_puzzle,
)
from text2logic.logic import exactly_one
from text2logic.parser import parse, to_text
from text2logic.reasoner import QueryStatus, satisfiable
from text2logic.sat import enumerate_models


def minimal(**overrides):
    data = {
        "name": "tiny",
        "narrative": "p or q",
        "symbols": [{"id": "p"}, {"id": "q", "gloss": "q holds"}],
        "statements": [{"id": "1", "text": "p or q", "gold": "p OR q"}, {"id": "2", "text": "not p", "gold": "NOT p"}],
        "queries": [{"question": "q?", "target": "q", "expected": "Entailed"}],
    }
    data.update(overrides)
    return data


class TestBundled:
    def test_names(self):
        names = {p.name for p in bundled()}
        assert {"who_is_in_the_car", "alpine_club", "ladies_or_tigers_trial_1", "three_balls"} <= names

    @pytest.mark.parametrize("path", sorted(corpus_dir().glob("*.json")), ids=lambda p: p.stem)
    def test_validates(self, path):
        assert validate_puzzle(load_puzzle(path)) == []

    def test_car_shape(self, car):
        assert len(car.vocab) == 6 and len(car.statements) == 4 and len(car.queries) == 3

    def test_trial1_single_model(self, trial1):
        assert len(enumerate_models(trial1.gold_kb().formula(), trial1.vocab, 10)) == 1

    def test_alpine_mike_query(self, alpine):
        q = next(q for q in alpine.queries if "Mike" in to_text(q.target))
        assert q.target == parse("Cl_Mike AND NOT Sk_Mike") and q.expected is QueryStatus.ENTAILED

    def test_balls(self, balls):
        assert balls.independent and len(balls.statements) == 15
        assert [s.id for s in balls.statements if s.disputed] == ["13", "14"]
        assert balls.statement("1").gold == exactly_one(["X1", "Y1", "Z1"])
        assert all(satisfiable(s.gold) for s in balls.statements)

    def test_to_dict_round_trip(self, corpus):
        for p in corpus.values():
            assert puzzle_from_dict(json.loads(json.dumps(p.to_dict()))) == p

    def test_find_by_suffix(self):
        assert find_puzzle("trial_1").stem == "ladies_or_tigers_trial_1"
        assert find_puzzle("who_is_in_the_car.json").stem == "who_is_in_the_car"
        with pytest.raises(FileNotFoundError):
            find_puzzle("no_such_puzzle")


class TestLoading:
    def test_undeclared_symbol(self, write_puzzle):
        data = minimal()
        data["statements"][0]["gold"] = "p OR Q9"
        with pytest.raises(VocabViolation) as e:
            load_puzzle(write_puzzle(data))
        assert e.value.symbol == "Q9" and "statement 1" in str(e.value)

    def test_bad_formula_names_statement(self, write_puzzle):
        data = minimal()
        data["statements"][1]["gold"] = "NOT NOT"
        with pytest.raises(FormulaError) as e:
            load_puzzle(write_puzzle(data))
        assert e.value.where == "statement 2"

    def test_malformed_json_position(self, write_puzzle):
        with pytest.raises(SchemaError) as e:
            load_puzzle(write_puzzle('{"name": "x",\n  "narrative": }'))
        assert e.value.position == (2, 16)

    @pytest.mark.parametrize(
        "override, field",
        [
            ({"symbols": [{"id": "1bad"}]}, "symbols/0/id"),
            ({"queries": [{"question": "?", "target": "p", "expected": "Maybe"}]}, "queries/0/expected"),
            ({"extra": 1}, "<root>"),
        ],
    )
    def test_schema_errors(self, write_puzzle, override, field):
        with pytest.raises(SchemaError) as e:
            load_puzzle(write_puzzle(minimal(**override)))
        assert e.value.field == field

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_puzzle(tmp_path / "missing.json")


class TestValidation:
    def test_clean(self):
        assert validate_puzzle(puzzle_from_dict(minimal())) == []

    def test_expectation_mismatch(self):
        data = minimal(queries=[{"question": "p?", "target": "p", "expected": "Entailed"}])
        [v] = validate_puzzle(puzzle_from_dict(data))
        assert v.kind == "ExpectationMismatch" and "Refuted" in v.detail

    def test_inconsistent_gold(self, trial1):
        data = trial1.to_dict()
        data["statements"][0]["gold"] = data["fixtures"]["conjoined_room_cases"]
        kinds = [v.kind for v in validate_puzzle(puzzle_from_dict(data))]
        assert kinds == ["InconsistentGoldKb"]

    def test_duplicate_ids(self):
        data = minimal()
        data["statements"][1]["id"] = "1"
        assert "DuplicateStatementId" in [v.kind for v in validate_puzzle(puzzle_from_dict(data))]

    def test_independent_rules(self):
        data = minimal(independent=True)
        data["statements"].append({"id": "3", "text": "p", "gold": "p AND NOT p"})
        kinds = [v.kind for v in validate_puzzle(puzzle_from_dict(data))]
        assert kinds == ["UnsatisfiableStatement", "QueriesOnIndependentPuzzle"]
