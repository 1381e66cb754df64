"""A minimal PV (semaphore) language and its geometric semantics.

Grammar::

    program := { decl | proc }
    decl    := "sem" IDENT INT ";"
    proc    := "proc" IDENT "=" action { ";" action } ";"
    action  := ("P" | "V") "(" IDENT ")"

``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import PVSyntaxError
from .precubical import GridSpec

_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[;=()])")


@dataclass(frozen=True)
class Action:
    kind: str  # "P" or "V"
    sem: str

    def __str__(self):
        return f"{self.kind}({self.sem})"


@dataclass
class PVProgram:
    semaphores: dict = field(default_factory=dict)
    processes: list = field(default_factory=list)  # (name, [Action, ...])

    @property
    def n(self) -> int:
        return len(self.processes)

    def source(self) -> str:
        lines = [f"sem {s} {k};" for s, k in self.semaphores.items()]
        lines += [f"proc {name} = " + ";".join(map(str, acts)) + ";" for name, acts in self.processes]
        return "\n".join(lines) + "\n"


def _tokenize(text: str):
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PVSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind is not None:
            yield kind, m.group(), line, pos - line_start + 1
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


class _Parser:
    def __init__(self, text):
        self.toks = list(_tokenize(text))
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        _, _, line, col = tok or self.tok
        raise PVSyntaxError(msg, line, col)

    def expect(self, kind, value=None):
        tok = self.tok
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "eof" else "end of input"
            self.fail(f"expected {want}, got {got}")
        self.i += 1
        return tok

    def at(self, kind, value=None):
        tok = self.tok
        return tok[0] == kind and (value is None or tok[1] == value)


def parse(source: str) -> PVProgram:
    """Parse PV source; errors carry the line and column of the offending token."""
    p = _Parser(source)
    prog = PVProgram()
    names = set()
    pending = []  # (action, token) checked once all declarations are known
    while not p.at("eof"):
        if p.at("ident", "sem"):
            p.i += 1
            name_tok = p.expect("ident")
            cap_tok = p.expect("int")
            p.expect("sym", ";")
            if name_tok[1] in prog.semaphores:
                p.fail(f"semaphore {name_tok[1]!r} declared twice", name_tok)
            if int(cap_tok[1]) < 1:
                p.fail("semaphore capacity must be at least 1", cap_tok)
            prog.semaphores[name_tok[1]] = int(cap_tok[1])
        elif p.at("ident", "proc"):
            p.i += 1
            name_tok = p.expect("ident")
            if name_tok[1] in names:
                p.fail(f"process {name_tok[1]!r} declared twice", name_tok)
            names.add(name_tok[1])
            p.expect("sym", "=")
            acts = []
            while True:
                kind_tok = p.tok
                if kind_tok[0] != "ident" or kind_tok[1] not in ("P", "V"):
                    p.fail("expected P(...) or V(...)")
                p.i += 1
                p.expect("sym", "(")
                sem_tok = p.expect("ident")
                p.expect("sym", ")")
                p.expect("sym", ";")
                act = Action(kind_tok[1], sem_tok[1])
                acts.append(act)
                pending.append((act, sem_tok))
                if not (p.at("ident", "P") or p.at("ident", "V")):
                    break
            _check_balance(acts, name_tok)
            prog.processes.append((name_tok[1], acts))
        else:
            p.fail("expected 'sem' or 'proc'")
    for act, tok in pending:
        if act.sem not in prog.semaphores:
            p.fail(f"undeclared semaphore {act.sem!r}", tok)
    return prog


def _check_balance(acts, name_tok):
    held = {}
    for act in acts:
        if act.kind == "P":
            if held.get(act.sem):
                raise PVSyntaxError(f"process {name_tok[1]!r}: P({act.sem}) while already holding it", name_tok[2], name_tok[3])
            held[act.sem] = True
        else:
            if not held.get(act.sem):
                raise PVSyntaxError(f"process {name_tok[1]!r}: V({act.sem}) without a matching P", name_tok[2], name_tok[3])
            held[act.sem] = False
    open_ = sorted(s for s, h in held.items() if h)
    if open_:
        raise PVSyntaxError(f"process {name_tok[1]!r}: unbalanced P/V, {', '.join(open_)} never released", name_tok[2], name_tok[3])


def hold_intervals(acts) -> dict:
    """``sem -> [(t_P, t_V), ...]`` with actions executed at times 1, 2, ..."""
    out = {}
    start = {}
    for t, act in enumerate(acts, 1):
        if act.kind == "P":
            start[act.sem] = t
        else:
            out.setdefault(act.sem, []).append((start.pop(act.sem), t))
    return out


def semantics(prog: PVProgram) -> GridSpec:
    """Grid model of the program: one axis per process, one step per action.

    Cell ``j`` of an axis lies inside a hold ``(t_P, t_V)`` when
    ``t_P <= j`` and ``j + 1 <= t_V``.  A top cell is forbidden when more
    processes than a semaphore's capacity hold it at once.
    """
    extents = tuple(len(acts) for _, acts in prog.processes)
    # per process and semaphore: the set of cell indices inside a hold
    inside = []
    for _, acts in prog.processes:
        cells = {}
        for s, ivs in hold_intervals(acts).items():
            cells[s] = {j for a, b in ivs for j in range(a, b)}
        inside.append(cells)
    forbidden = set()
    for base in itertools.product(*(range(k) for k in extents)):
        for s, kappa in prog.semaphores.items():
            holders = sum(1 for p, j in enumerate(base) if j in inside[p].get(s, ()))
            if holders >= kappa + 1:
                forbidden.add(base)
                break
    return GridSpec(extents, frozenset(forbidden))


def compile_source(source: str) -> GridSpec:
    return semantics(parse(source))
