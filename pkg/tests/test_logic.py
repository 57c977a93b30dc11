import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from text2logic.logic import (
    And,
    Atom,
    Const,
    DuplicateAtom,
    EmptyAtomList,
    Iff,
    Implies,
    KOutOfRange,
    Not,
    Or,
    Symbol,
    UnboundSymbol,
    Vocabulary,
    Xor,
    at_least,
    at_most,
    atoms,
    evaluate,
    exactly_one,
    free_symbols,
)
from text2logic.oracle import truth_table

from strategies import assignments, formulas

P, Q = atoms("P", "Q")


def all_assignments(names):
    for bits in itertools.product([False, True], repeat=len(names)):
        yield dict(zip(names, bits))


class TestConstruction:
    def test_and_or_need_two_args(self):
        with pytest.raises(ValueError):
            And(P)
        with pytest.raises(ValueError):
            Or()

    def test_nesting_is_preserved(self):
        a, b, c = atoms("a", "b", "c")
        assert And(And(a, b), c) != And(a, b, c)

    def test_formulas_hash(self):
        assert len({And(P, Q), And(P, Q), Or(P, Q)}) == 2

    @pytest.mark.parametrize("bad", ["", "1x", "a-b", "AND", "TRUE", "x y"])
    def test_bad_symbol_ids(self, bad):
        with pytest.raises(ValueError):
            Symbol(bad)

    def test_vocabulary_rejects_duplicates(self):
        with pytest.raises(DuplicateAtom):
            Vocabulary((Symbol("a"), Symbol("a")))

    def test_vocabulary_is_case_sensitive_and_ordered(self):
        v = Vocabulary((Symbol("b", "bee"), Symbol("B"), Symbol("a")))
        assert v.ids == ("b", "B", "a")
        assert "B" in v and "A" not in v
        assert v.gloss("b") == "bee"


class TestEvaluate:
    def test_vacuous_implication(self):
        assert evaluate(Implies(Atom("P1"), Atom("P2")), {"P1": False, "P2": False})

    def test_conjoined_room_cases_always_false(self):
        L1, T1, L2, T2 = atoms("L1", "T1", "L2", "T2")
        f = And(And(L1, Not(T1)), And(L2, Not(T2)), And(T1, Not(L1)), And(T2, Not(L2)))
        assert not any(evaluate(f, a) for a in all_assignments(["L1", "T1", "L2", "T2"]))

    def test_exactly_one_designated_case(self):
        assert evaluate(exactly_one(["X1", "Y1", "Z1"]), {"X1": True, "Y1": False, "Z1": False})

    @pytest.mark.parametrize(
        "make, table",
        [
            (lambda p, q: Xor(p, q), lambda p, q: p != q),
            (lambda p, q: Implies(p, q), lambda p, q: (not p) or q),
            (lambda p, q: Iff(p, q), lambda p, q: p == q),
            (lambda p, q: And(p, q), lambda p, q: p and q),
            (lambda p, q: Or(p, q), lambda p, q: p or q),
            (lambda p, q: Not(p), lambda p, q: not p),
        ],
    )
    def test_connective_tables(self, make, table):
        for p, q in itertools.product([False, True], repeat=2):
            assert evaluate(make(P, Q), {"P": p, "Q": q}) == table(p, q)

    def test_constants(self):
        assert evaluate(Const(True), {}) and not evaluate(Const(False), {})

    def test_unbound_symbol(self):
        with pytest.raises(UnboundSymbol) as e:
            evaluate(Or(Const(True), Atom("Z")), {})
        assert e.value.symbol == "Z"

    @given(formulas(), assignments())
    def test_agrees_with_truth_table(self, f, a):
        names = sorted(a)
        row = sum(1 << i for i, n in enumerate(names) if a[n])
        assert evaluate(f, a) == bool(truth_table(f, names) >> row & 1)

    @given(formulas(), assignments())
    def test_deterministic(self, f, a):
        assert evaluate(f, a) == evaluate(f, a)


class TestFreeSymbols:
    def test_constant_has_none(self):
        assert free_symbols(Const(True)) == ()

    def test_first_occurrence_order(self):
        X1, Z3, X3, Z1 = atoms("X1", "Z3", "X3", "Z1")
        assert free_symbols(Or(And(X1, Z3), And(X3, Z1))) == ("X1", "Z3", "X3", "Z1")
        assert free_symbols(Implies(Atom("P1"), Atom("P2"))) == ("P1", "P2")

    def test_no_duplicates(self):
        assert free_symbols(And(P, Not(P), Q, P)) == ("P", "Q")


class TestCardinality:
    def test_exactly_one_single(self):
        assert exactly_one(["X1"]) == Atom("X1")

    def test_exactly_one_three_models(self):
        names = ["X1", "Y1", "Z1"]
        assert bin(truth_table(exactly_one(names), names)).count("1") == 3

    def test_at_least_one_is_plain_disjunction(self):
        assert at_least(1, ["X1", "Y1", "Z1"]) == Or(*atoms("X1", "Y1", "Z1"))

    def test_at_most_two_of_three(self):
        names = ["Z1", "Z2", "Z3"]
        f = at_most(2, names)
        assert f == Not(And(*atoms(*names)))
        assert truth_table(f, names) == 0b01111111  # only the all-true row excluded

    def test_at_most_zero(self):
        assert at_most(0, ["X1"]) == Not(Atom("X1"))

    def test_errors(self):
        with pytest.raises(EmptyAtomList):
            exactly_one([])
        with pytest.raises(DuplicateAtom):
            exactly_one(["a", "a"])
        with pytest.raises(DuplicateAtom):
            at_most(1, ["a", "a"])
        with pytest.raises(KOutOfRange):
            at_least(3, ["a", "b"])
        with pytest.raises(KOutOfRange):
            at_most(-1, ["a"])

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exactly_one_is_at_least_and_at_most_one(self, n):
        names = [f"s{i}" for i in range(n)]
        assert truth_table(exactly_one(names), names) == truth_table(
            And(at_least(1, names), at_most(1, names)), names
        )
        assert set(free_symbols(exactly_one(names))) == set(names)

    @settings(max_examples=60)
    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
    def test_counts(self, nk):
        n, k = nk
        names = [f"s{i}" for i in range(n)]
        lo, hi = truth_table(at_least(k, names), names), truth_table(at_most(k, names), names)
        for row in range(1 << n):
            ones = bin(row).count("1")
            assert bool(lo >> row & 1) == (ones >= k)
            assert bool(hi >> row & 1) == (ones <= k)
