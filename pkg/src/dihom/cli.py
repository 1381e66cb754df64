"""Command line: ``dihom homology | product | check``.

Exit codes: 0 ok, 1 check failures, 2 model errors, 3 operand errors, 4 I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .bimodule import (BimoduleClass, cap, class_basis, conc_product, cup0, image_rank)
from .chains import check_equal_length, complex_slice, enumerate_chains, leibniz_defect
from .errors import DihomError, DomainError, ModelError, OperandError, PVSyntaxError
from .homology import cohomology_ranks, homology_ranks, path_components
from .linalg import SparseMatrix, get_field
from .models import FORMATS, LoadedModel, load_model
from .obstacles import betti_profile, cap_chain, cup, enumerate_classes
from .precubical import check_precubical_identity, id_to_str, improper_cubes, reachable_pairs, sorted_pairs

EXIT_OK, EXIT_CHECK, EXIT_MODEL, EXIT_OPERAND, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# --- helpers -----------------------------------------------------------------


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        try:
            n = int(os.environ.get("DIHOM_THREADS", "1"))
        except ValueError:
            raise CliError("DIHOM_THREADS must be an integer", EXIT_MODEL) from None
    return max(1, n)


def _parallel_map(fn, items, threads):
    """Ordered map; results never depend on the thread count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def parse_pairs(text: str | None, model: LoadedModel) -> list:
    """``"0,0:4,4;0,0:3,2"`` or ``all-reachable`` (the default)."""
    if text is None or text.strip() in ("", "all-reachable", "all"):
        pairs = [p for p in reachable_pairs(model.X)]
        return sorted_pairs(model.X, pairs)
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if chunk.count(":") != 1:
            raise CliError(f"bad pair {chunk!r}; expected FROM:TO", EXIT_MODEL)
        a, b = chunk.split(":")
        try:
            out.append((model.vertex(a), model.vertex(b)))
        except ModelError as exc:
            raise CliError(str(exc), EXIT_MODEL) from None
    return out


def _load(args) -> LoadedModel:
    try:
        return load_model(args.input, args.format)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", EXIT_IO) from None
    except PVSyntaxError as exc:
        raise CliError(f"{args.input}:{exc}", EXIT_MODEL) from None
    except (ModelError, DomainError) as exc:
        raise CliError(str(exc), EXIT_MODEL) from None


def _field(args):
    try:
        return get_field(args.field)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_MODEL) from None


def _emit(args, report: dict, table: str):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc.strerror or exc}", EXIT_IO) from None
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)
        sys.stderr.write(table)


def _format_table(header, rows) -> str:
    rows = [[str(x) for x in r] for r in rows]
    widths = [max(len(h), *(len(r[k]) for r in rows)) if rows else len(h) for k, h in enumerate(header)]
    line = lambda r: "  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip()
    return "\n".join([line(header), line(["-" * w for w in widths])] + [line(r) for r in rows]) + "\n"


def _require_model(model: LoadedModel, pairs):
    bad = improper_cubes(model.X)
    if bad:
        names = ", ".join(id_to_str(c) for c in bad[0])
        raise CliError(f"complex is not proper: cubes {names} share their corners", EXIT_MODEL)
    if not model.X.is_acyclic():
        raise CliError("complex has directed loops; use a length covering window", EXIT_MODEL)
    ok, ce = check_equal_length(model.X, pairs)
    if not ok:
        v, w, m, a, b = ce
        raise CliError(f"equal-length hypothesis fails for {id_to_str(v)}->{id_to_str(w)} in dimension {m}: "
                       f"{a!r} (length {a.length}) vs {b!r} (length {b.length})", EXIT_MODEL)


# --- homology ------------------------------------------------------------------


def cmd_homology(args) -> int:
    model = _load(args)
    field = _field(args)
    pairs = parse_pairs(args.pairs, model)
    if args.max_degree < 1:
        raise CliError("--max-degree must be at least 1", EXIT_MODEL)
    _require_model(model, pairs)
    fn = cohomology_ranks if args.kind == "cohomology" else homology_ranks
    degrees = list(range(1, args.max_degree + 1))

    def one(pair):
        v, w = pair
        sl = complex_slice(model.X, v, w, args.max_degree)
        summary = fn(sl, degrees, field, representatives=args.representatives)
        item = summary.to_json(field, with_representatives=args.representatives)
        if args.representatives:
            item["basis"] = {str(n): [c.to_json() for c in sl.bases[n - 1]] if n - 1 < len(sl.bases) else []
                             for n in degrees}
        _, count = path_components(model.X, v, w, check=False)
        item["components"] = count
        if model.obstacles is not None:
            item["obstacle_profile"] = list(betti_profile(model.obstacles, v, w))
        return item

    items = _parallel_map(one, pairs, _threads(args))
    label = "HM" if args.kind == "homology" else "HM^"
    header = ["from", "to"] + [f"{label}{n}" for n in degrees] + ["components"]
    rows = [[it["from"], it["to"]] + [it["HM"][str(n)] for n in degrees] + [it["components"]] for it in items]
    report = {
        "command": "homology",
        "kind": args.kind,
        "field": field.name,
        "max_degree": args.max_degree,
        "pairs": items,
    }
    _emit(args, report, _format_table(header, rows))
    return EXIT_OK


# --- products -----------------------------------------------------------------


def _indices(text, n, what):
    if text is None or text == "all":
        return list(range(n))
    try:
        idx = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"bad index list {text!r}", EXIT_OPERAND) from None
    for i in idx:
        if not 0 <= i < n:
            raise CliError(f"{what} has {n} basis classes; index {i} out of range", EXIT_OPERAND)
    return idx


def _two_pairs(pairs, op, allow_single=False):
    if len(pairs) == 1 and allow_single:
        return pairs[0], pairs[0]
    if len(pairs) != 2:
        raise CliError(f"--op {op} needs exactly two pairs", EXIT_OPERAND)
    return pairs


def _degrees(args):
    try:
        i, j = (int(x) for x in args.degrees.split(","))
    except ValueError:
        raise CliError("--degrees takes two integers, e.g. 1,1", EXIT_OPERAND) from None
    if i < 1 or j < 1:
        raise CliError("degrees start at 1", EXIT_OPERAND)
    return i, j


def cmd_product(args) -> int:
    model = _load(args)
    field = _field(args)
    if args.pairs is None:
        raise CliError("product needs --pairs", EXIT_OPERAND)
    pairs = parse_pairs(args.pairs, model)
    op = args.op
    if op in ("obstacle-cup", "obstacle-cap"):
        return _obstacle_product(args, model, pairs)
    if op == "cup0":
        p, q = _two_pairs(pairs, op, allow_single=True)
        if p != q:
            raise CliError("cup0 needs both operands on the same pair", EXIT_OPERAND)
        degrees = (1, 1)
        variant = "cohomology"
    else:
        p, q = _two_pairs(pairs, op)
        if p[1] != q[0]:
            raise CliError(f"operands are not composable: {id_to_str(p[1])} != {id_to_str(q[0])}", EXIT_OPERAND)
        degrees = _degrees(args)
        variant = "homology" if op == "conc" else "cohomology"
    composite = (p[0], q[1])
    _require_model(model, list(dict.fromkeys([p, q, composite])))
    left = class_basis(model.X, p[0], p[1], degrees[0], variant, field)
    right = class_basis(model.X, q[0], q[1], degrees[1], variant, field)
    li = _indices(args.left, len(left), "left operand")
    ri = _indices(args.right, len(right), "right operand")
    fn = {"conc": conc_product, "cap": cap, "cup0": cup0}[op]
    jobs = [(i, j) for i in li for j in ri]

    def one(job):
        i, j = job
        return fn(left[i], right[j])

    try:
        results = _parallel_map(one, jobs, _threads(args))
    except OperandError as exc:
        raise CliError(str(exc), EXIT_OPERAND) from None
    products = [{"left": i, "right": j, "result": r.to_json()} for (i, j), r in zip(jobs, results)]
    distinct = []
    for r in results:
        if not r.is_zero() and all(r != d for d in distinct):
            distinct.append(r)
    rank = image_rank(results)
    report = {
        "command": "product",
        "op": op,
        "field": field.name,
        "operands": [
            {"from": id_to_str(p[0]), "to": id_to_str(p[1]), "degree": degrees[0], "classes": len(left)},
            {"from": id_to_str(q[0]), "to": id_to_str(q[1]), "degree": degrees[1], "classes": len(right)},
        ],
        "products": products,
        "image_rank": rank,
        "distinct_nonzero": len(distinct),
    }
    rows = [[f"{i}", f"{j}", _rep_text(r)] for (i, j), r in zip(jobs, results)]
    table = _format_table(["left", "right", "result"], rows) + f"image rank: {rank}\n"
    _emit(args, report, table)
    return EXIT_OK


def _rep_text(c: BimoduleClass) -> str:
    vec = c.canonical()
    if not vec:
        return "0"
    return " + ".join(f"{c.field.to_str(v)}*[{j}]" for j, v in vec.items())


def _obstacle_product(args, model: LoadedModel, pairs) -> int:
    M = model.obstacles
    if M is None:
        raise CliError(f"--op {args.op} needs --format obstacle-json", EXIT_OPERAND)
    if args.op == "obstacle-cup":
        p, q = _two_pairs(pairs, args.op, allow_single=True)
        if p != q:
            raise CliError("obstacle-cup needs both operands on the same interval", EXIT_OPERAND)
    else:
        p, q = _two_pairs(pairs, args.op)
    left = [c for _, cs in sorted(enumerate_classes(M, *p).items()) for c in cs]
    right = [c for _, cs in sorted(enumerate_classes(M, *q).items()) for c in cs]
    li = _indices(args.left, len(left), "left operand")
    ri = _indices(args.right, len(right), "right operand")
    products = []
    image = {}
    try:
        for i in li:
            for j in ri:
                r = cup(M, left[i], right[j]) if args.op == "obstacle-cup" else cap_chain(M, left[i], right[j])
                products.append({"left": list(left[i].chain), "right": list(right[j].chain),
                                 "result": None if r is None else {"chain": list(r.chain), "coeff": str(r.coeff)}})
                if r is not None:
                    image.setdefault(r.chain, r)
    except DomainError as exc:
        raise CliError(str(exc), EXIT_OPERAND) from None
    order = sorted(image, key=lambda ch: (len(ch), [M._pos[x] for x in ch]))
    report = {
        "command": "product",
        "op": args.op,
        "operands": [{"from": id_to_str(p[0]), "to": id_to_str(p[1]), "classes": len(left)},
                     {"from": id_to_str(q[0]), "to": id_to_str(q[1]), "classes": len(right)}],
        "products": products,
        "image": [list(ch) for ch in order],
        "image_rank": len(order),
    }
    rows = [[" < ".join(pr["left"]) or "()", " < ".join(pr["right"]) or "()",
             "0" if pr["result"] is None else (" < ".join(pr["result"]["chain"]) or "()")] for pr in products]
    table = _format_table(["left", "right", "result"], rows) + f"image rank: {len(order)}\n"
    _emit(args, report, table)
    return EXIT_OK


# --- check ------------------------------------------------------------------------


def slice_from_json(data: dict):
    """``(dims, matrices)`` from a serialized slice; matrices map ``i -> boundary_i``."""
    try:
        dims = [int(d) for d in data["dims"]]
        triplets = [(int(r), int(c), str(v)) for r, c, v in data["boundary"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed slice JSON: {exc}") from None
    if len(dims) != len(data.get("basis", dims)):
        raise ModelError("slice JSON: 'dims' and 'basis' differ in length")
    top = max(dims, default=-1)
    local = {}
    counts = [0] * (top + 1)
    for g, d in enumerate(dims):
        local[g] = counts[d]
        counts[d] += 1
    entries = {i: [] for i in range(1, top + 1)}
    for r, c, v in triplets:
        if not (0 <= r < len(dims) and 0 <= c < len(dims)) or dims[r] != dims[c] - 1:
            raise ModelError(f"slice JSON: boundary entry ({r}, {c}) does not lower dimension by one")
        entries[dims[c]].append((local[r], local[c], v))
    return dims, {i: (counts[i - 1], counts[i], entries[i]) for i in entries}


def _check_slice_json(args, field) -> list:
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", EXIT_IO) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON: {exc}", EXIT_MODEL) from None
    try:
        _, mats = slice_from_json(data)
    except ModelError as exc:
        raise CliError(str(exc), EXIT_MODEL) from None
    built = {i: SparseMatrix.from_triplets(nr, nc, ((r, c, field.coerce(v)) for r, c, v in t))
             for i, (nr, nc, t) in mats.items()}
    bad = []
    for i in sorted(built):
        if i - 1 in built:
            prod = built[i - 1] @ built[i]
            if not prod.is_zero(field):
                r, c, v = next((r, c, v) for r, c, v in prod.triplets() if field.coerce(v))
                bad.append({"dimension": i, "row": r, "column": c, "value": field.to_str(v)})
    return [{"name": "boundary_squared_zero", "ok": not bad, "counterexamples": bad[:10]}]


def _leibniz_spot(model: LoadedModel, pairs, samples: int, seed: int) -> list:
    """Leibniz defects on random composable chain pairs ``(v, b)``, ``(b, w)``."""
    rng = random.Random(seed)
    X = model.X
    triples = [(v, b, w) for (v, b) in pairs for (b2, w) in pairs if b2 == b and v != b and b != w]
    bad = []
    if not triples:
        return bad
    for _ in range(samples):
        v, b, w = rng.choice(triples)
        left = [c for level in enumerate_chains(X, v, b) for c in level]
        right = [c for level in enumerate_chains(X, b, w) for c in level]
        if not left or not right:
            continue
        c, d = rng.choice(left), rng.choice(right)
        if leibniz_defect(c, d):
            bad.append({"left": c.to_json(), "right": d.to_json()})
    return bad


def cmd_check(args) -> int:
    field = _field(args)
    if args.format == "slice-json":
        checks = _check_slice_json(args, field)
    else:
        model = _load(args)
        X = model.X
        checks = []
        ident = check_precubical_identity(X)
        checks.append({"name": "precubical_identity", "ok": not ident,
                       "counterexamples": [[id_to_str(b[0])] + list(b[1:]) for b in ident[:10]]})
        improper = improper_cubes(X)
        checks.append({"name": "proper", "ok": not improper,
                       "counterexamples": [[id_to_str(c) for c in g] for g in improper[:10]]})
        acyclic = X.is_acyclic()
        checks.append({"name": "no_directed_loops", "ok": acyclic, "counterexamples": []})
        if acyclic:
            pairs = parse_pairs(args.pairs, model)
            ok, ce = check_equal_length(X, pairs)
            checks.append({"name": "equal_length", "ok": ok, "counterexamples": [] if ok else [
                {"from": id_to_str(ce[0]), "to": id_to_str(ce[1]), "dimension": ce[2],
                 "chains": [ce[3].to_json(), ce[4].to_json()]}]})
            bad = []
            for v, w in pairs:
                sl = complex_slice(X, v, w, args.max_degree)
                for i in sl.check(field):
                    bad.append({"from": id_to_str(v), "to": id_to_str(w), "dimension": i})
            checks.append({"name": "boundary_squared_zero", "ok": not bad, "counterexamples": bad[:10]})
            lb = _leibniz_spot(model, pairs, args.samples, args.seed)
            checks.append({"name": "leibniz", "ok": not lb, "counterexamples": lb[:10]})
    failed = [c["name"] for c in checks if not c["ok"]]
    report = {"command": "check", "field": field.name, "checks": checks, "ok": not failed}
    rows = [[c["name"], "pass" if c["ok"] else "FAIL", len(c["counterexamples"])] for c in checks]
    _emit(args, report, _format_table(["check", "result", "counterexamples"], rows))
    return EXIT_CHECK if failed else EXIT_OK


# --- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dihom", description="Directed homology of cubical models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats):
        p.add_argument("--input", required=True, help="model file")
        p.add_argument("--format", choices=formats, default=None, help="input format (guessed if omitted)")
        p.add_argument("--field", default="rationals", help="'rationals' or a prime p")
        p.add_argument("--pairs", default=None, help="'x,y:x,y;...' or 'all-reachable'")
        p.add_argument("--max-degree", type=int, default=2, dest="max_degree")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: $DIHOM_THREADS or 1)")
        p.add_argument("--out", default=None, help="write the JSON report here")

    h = sub.add_parser("homology", help="ranks of HM_n / HM^n per vertex pair")
    common(h, FORMATS)
    h.add_argument("--kind", choices=("cohomology", "homology"), default="cohomology")
    h.add_argument("--representatives", action="store_true", help="include canonical representatives")
    h.set_defaults(func=cmd_homology)

    p = sub.add_parser("product", help="products of classes")
    common(p, FORMATS)
    p.add_argument("--op", required=True, choices=("conc", "cap", "cup0", "obstacle-cup", "obstacle-cap"))
    p.add_argument("--degrees", default="1,1", help="degrees of the two operands")
    p.add_argument("--left", default="all", help="basis indices of the left operand")
    p.add_argument("--right", default="all", help="basis indices of the right operand")
    p.set_defaults(func=cmd_product)

    c = sub.add_parser("check", help="structural checks on a model")
    common(c, FORMATS + ("slice-json",))
    c.add_argument("--samples", type=int, default=200, help="Leibniz spot checks")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"dihom: error: {exc}\n")
        return exc.code
    except OperandError as exc:
        sys.stderr.write(f"dihom: error: {exc}\n")
        return EXIT_OPERAND
    except DihomError as exc:
        sys.stderr.write(f"dihom: error: {exc}\n")
        return EXIT_MODEL
    except OSError as exc:
        sys.stderr.write(f"dihom: error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
