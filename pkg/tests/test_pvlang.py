
import pytest
from hypothesis import given, settings, strategies as st

from dihom import build_grid, is_proper
from dihom.errors import PVSyntaxError
from dihom.pvlang import Action, PVProgram, compile_source, parse, semantics

MUTEX = "sem a 1; proc p1 = P(a);V(a); proc p2 = P(a);V(a);"


def test_parse_mutex():
    prog = parse(MUTEX)
    assert prog.semaphores == {"a": 1}
    assert [name for name, _ in prog.processes] == ["p1", "p2"]
    assert prog.processes[0][1] == [Action("P", "a"), Action("V", "a")]


def test_mutex_semantics():
    grid = compile_source(MUTEX)
    assert grid.extents == (2, 2)
    assert grid.forbidden == {(1, 1)}


def test_weak_synchronisation():
    src = "sem a 2;\n" + "".join(f"proc p{i} = P(a); V(a);\n" for i in range(3))
    grid = compile_source(src)
    assert grid.extents == (2, 2, 2)
    assert grid.forbidden == {(1, 1, 1)}


def test_empty_program():
    grid = compile_source("# nothing here\n")
    assert grid.extents == ()
    assert build_grid(grid).counts() == (1,)


def test_single_process_never_blocks():
    assert compile_source("sem a 1; proc p = P(a); V(a); P(a); V(a);").forbidden == frozenset()


@pytest.mark.parametrize("src, where", [
    ("sem a 2; proc p = P(a);P(a);", (1, 15)),
    ("sem a 1;\nproc p = P(b); V(b);", (2, 12)),
    ("sem a 1 proc", (1, 9)),
    ("sem a 0;", (1, 7)),
    ("proc p = P(a);\nV(a)", (2, 5)),
    ("sem a 1; sem a 2;", (1, 14)),
    ("sem a 1; proc p = P(a); V(a); @", (1, 31)),
])
def test_errors_have_positions(src, where):
    with pytest.raises(PVSyntaxError) as info:
        parse(src)
    assert (info.value.line, info.value.column) == where


def test_source_round_trip():
    prog = parse("sem a 1; sem b 2; proc x = P(a); P(b); V(b); V(a); proc y = P(b); V(b);")
    assert parse(prog.source()).processes == prog.processes


def _program(draw_kappa, procs):
    prog = PVProgram({"a": draw_kappa, "b": 1}, [])
    for k, shape in enumerate(procs):
        acts = []
        for s in shape:
            acts += [Action("P", s), Action("V", s)]
        prog.processes.append((f"p{k}", acts))
    return prog


shapes = st.lists(st.sampled_from(["a", "b"]), min_size=1, max_size=2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.lists(shapes, min_size=1, max_size=3))
def test_semantics_properties(kappa, procs):
    grid = semantics(_program(kappa, procs))
    assert is_proper(build_grid(grid))
    # more capacity never forbids more
    assert semantics(_program(kappa + 1, procs)).forbidden <= grid.forbidden
    # permuting processes permutes axes
    perm = list(reversed(range(len(procs))))
    swapped = semantics(_program(kappa, [procs[i] for i in perm]))
    assert swapped.extents == tuple(grid.extents[i] for i in perm)
    assert swapped.forbidden == {tuple(c[i] for i in perm) for c in grid.forbidden}
