"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from text2logic.logic import And, Atom, Const, Iff, Implies, Not, Or, Xor

NAMES = [f"v{i}" for i in range(1, 7)]


def formulas(names=NAMES, max_leaves=24, consts=True):
    leaf = st.sampled_from(names).map(Atom)
    if consts:
        leaf = leaf | st.booleans().map(Const)

    def extend(children):
        many = st.lists(children, min_size=2, max_size=4)
        return st.one_of(
            children.map(Not),
            many.map(lambda xs: And(*xs)),
            many.map(lambda xs: Or(*xs)),
            st.tuples(children, children).map(lambda p: Xor(*p)),
            st.tuples(children, children).map(lambda p: Implies(*p)),
            st.tuples(children, children).map(lambda p: Iff(*p)),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def assignments(names=NAMES):
    return st.fixed_dictionaries({n: st.booleans() for n in names})
