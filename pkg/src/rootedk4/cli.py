"""Command-line surface: readable instance files, JSON certificates, and
batch tooling (decide / verify / oracle / sweep / atlas).

Instance files are plain text: a header ``roots: a b c d``, one edge ``u v``
per line, optional ``vertex: x`` lines for isolated vertices, ``#`` comments.
Certificates are standalone JSON documents embedding the full witness or
obstruction, so they can be re-checked without re-running the decider.

Exit codes are disjoint across all subcommands:

* 0 — YES / verified / clean report
* 1 — NO / failed verification / sweep found a discrepancy
* 2 — malformed input file or certificate schema mismatch
* 3 — invalid root nomination
* 4 — size guard or unsatisfiable atlas budget
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence, Union

import networkx as nx

from . import __version__
from .decider import Decision, decide
from .graph_core import (
    Graph,
    PlanarEmbedding,
    RootedInstance,
    skey,
    svert,
    vkey,
)
from .minors import MinorWitness, _oracle_limit, oracle_rooted_minor, verify_witness
from .obstructions import (
    CLASS_MINIMUM_SIZE,
    CLASS_NAMES,
    Obstruction,
    PlusGraph,
    random_obstruction,
    verify_obstruction,
)

SCHEMA_VERSION = 1

EXIT_YES = 0
EXIT_NO = 1
EXIT_MALFORMED = 2
EXIT_BAD_ROOTS = 3
EXIT_GUARD = 4


# ---------------------------------------------------------------------------
# Instance files.
# ---------------------------------------------------------------------------


class InstanceParseError(ValueError):
    """Malformed instance file; carries 1-based line/column of the fault."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class RootNominationError(ValueError):
    """The file parsed, but its root nomination is unusable."""


_INT_TOKEN = re.compile(r"-?(0|[1-9][0-9]*)\Z")


def _decode_token(tok: str):
    """Canonical integer tokens become ints; everything else stays a string."""
    return int(tok) if _INT_TOKEN.match(tok) else tok


def _encode_vertex(v) -> str:
    s = str(v)
    if isinstance(v, str) and _INT_TOKEN.match(s):
        raise ValueError(f"string vertex id {v!r} is ambiguous with an integer token")
    if not s or any(c.isspace() for c in s) or s.startswith("#"):
        raise ValueError(f"vertex id {v!r} cannot be written as a token")
    return s


def _column_of(raw: str, token_index: int) -> int:
    """1-based column where the token with the given index starts."""
    pos = 0
    for i, tok in enumerate(raw.split()):
        pos = raw.index(tok, pos)
        if i == token_index:
            return pos + 1
        pos += len(tok)
    return len(raw) + 1


def parse_instance(text: str) -> RootedInstance:
    """Parse an instance file into a RootedInstance.

    Raises InstanceParseError (syntax, with line/column), RootNominationError
    (wrong number of roots), or ValueError from RootedInstance (duplicate or
    missing roots).
    """
    roots: Optional[tuple] = None
    edges: list[tuple] = []
    seen: set[frozenset] = set()
    isolated: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        cut = raw.find("#")
        content = raw if cut < 0 else raw[:cut]
        tokens = content.split()
        if not tokens:
            continue
        if roots is None:
            if tokens[0] != "roots:":
                raise InstanceParseError(
                    "expected header 'roots: a b c d'", lineno, _column_of(raw, 0)
                )
            if len(tokens) != 5:
                raise RootNominationError(
                    f"line {lineno}: expected four roots, got {len(tokens) - 1}"
                )
            roots = tuple(_decode_token(t) for t in tokens[1:])
            continue
        if tokens[0] == "roots:":
            raise InstanceParseError("duplicate header", lineno, _column_of(raw, 0))
        if tokens[0] == "vertex:":
            if len(tokens) != 2:
                raise InstanceParseError(
                    "expected 'vertex: x'", lineno, _column_of(raw, min(2, len(tokens) - 1))
                )
            isolated.append(_decode_token(tokens[1]))
            continue
        if len(tokens) != 2:
            raise InstanceParseError(
                "expected an edge 'u v'", lineno, _column_of(raw, min(2, len(tokens) - 1))
            )
        u, v = (_decode_token(t) for t in tokens)
        if u == v:
            raise InstanceParseError(
                f"loop at vertex {tokens[0]!r}", lineno, _column_of(raw, 1)
            )
        e = frozenset((u, v))
        if e in seen:
            raise InstanceParseError(
                f"duplicate edge {tokens[0]} {tokens[1]}", lineno, _column_of(raw, 0)
            )
        seen.add(e)
        edges.append((u, v))
    if roots is None:
        raise InstanceParseError("missing 'roots:' header", 1, 1)
    g = Graph(isolated, edges)
    return RootedInstance(g, roots)


def format_instance(inst: RootedInstance) -> str:
    """Render an instance file; ``parse_instance`` round-trips it exactly."""
    g = inst.graph
    lines = ["roots: " + " ".join(_encode_vertex(r) for r in inst.roots)]
    for v in g.vertices:
        if g.degree(v) == 0:
            lines.append(f"vertex: {_encode_vertex(v)}")
    for u, v in g.edges:
        lines.append(f"{_encode_vertex(u)} {_encode_vertex(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Certificate documents.
# ---------------------------------------------------------------------------


class SchemaError(ValueError):
    """The certificate document does not follow the JSON schema."""


def _witness_payload(w: MinorWitness) -> dict:
    return {
        "branches": [
            {"root": r, "vertices": list(svert(w.branch_sets[r]))}
            for r in svert(w.branch_sets)
        ]
    }


def _embedding_payload(emb: Optional[PlanarEmbedding]) -> Optional[dict]:
    if emb is None:
        return None
    return {
        "rotation": [[v, list(emb.rotation[v])] for v in svert(emb.rotation)],
        "faces": [list(f) for f in emb.faces],
        "outer": list(emb.outer_face),
    }


def _obstruction_payload(ob: Obstruction) -> dict:
    base = ob.base
    return {
        "class": ob.klass,
        "base": {
            "vertices": list(base.vertices),
            "edges": [list(e) for e in base.edges],
        },
        "cliques": [
            {"triangle": list(svert(t)), "vertices": list(svert(ob.plus.cliques[t]))}
            for t in sorted(ob.plus.cliques, key=skey)
        ],
        "nominated": list(ob.nominated),
        "anchors": list(ob.anchors),
        "embedding": _embedding_payload(ob.embedding),
    }


def decision_document(inst: RootedInstance, dec: Decision) -> dict:
    """The standalone JSON document for a decision on an instance."""
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": "rootedk4", "version": __version__},
        "verdict": dec.verdict,
        "roots": list(inst.roots),
        "trace": list(dec.trace),
        "witness": _witness_payload(dec.witness) if dec.witness is not None else None,
        "obstruction": (
            _obstruction_payload(dec.obstruction) if dec.obstruction is not None else None
        ),
    }
    return doc


def render_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _expect(cond: bool, what: str) -> None:
    if not cond:
        raise SchemaError(what)


def _load_vertex(x):
    _expect(isinstance(x, (int, str)), "vertex ids must be integers or strings")
    return x


def load_witness(payload) -> MinorWitness:
    _expect(isinstance(payload, dict) and "branches" in payload, "witness.branches missing")
    branches = payload["branches"]
    _expect(isinstance(branches, list), "witness.branches must be a list")
    out = {}
    for item in branches:
        _expect(isinstance(item, dict) and {"root", "vertices"} <= set(item), "branch entry shape")
        r = _load_vertex(item["root"])
        _expect(isinstance(item["vertices"], list), "branch vertices must be a list")
        out[r] = frozenset(_load_vertex(x) for x in item["vertices"])
    return MinorWitness(out)


def load_obstruction(payload) -> Obstruction:
    _expect(isinstance(payload, dict), "obstruction must be an object")
    keys = {"class", "base", "cliques", "nominated", "anchors", "embedding"}
    _expect(keys <= set(payload), f"obstruction needs keys {sorted(keys)}")
    _expect(payload["class"] in CLASS_NAMES, "unknown obstruction class")
    base = payload["base"]
    _expect(
        isinstance(base, dict) and {"vertices", "edges"} <= set(base),
        "obstruction.base shape",
    )
    _expect(
        isinstance(base["vertices"], list) and isinstance(base["edges"], list),
        "obstruction.base lists",
    )
    for e in base["edges"]:
        _expect(isinstance(e, list) and len(e) == 2, "edges must be pairs")
    _expect(isinstance(payload["cliques"], list), "cliques must be a list")
    _expect(isinstance(payload["nominated"], list), "nominated must be a list")
    _expect(isinstance(payload["anchors"], list), "anchors must be a list")
    g = Graph(
        (_load_vertex(x) for x in base["vertices"]),
        ((_load_vertex(u), _load_vertex(v)) for u, v in base["edges"]),
    )
    cliques = {}
    for item in payload["cliques"]:
        _expect(
            isinstance(item, dict) and {"triangle", "vertices"} <= set(item),
            "clique entry shape",
        )
        tri = item["triangle"]
        _expect(isinstance(tri, list) and len(tri) == 3, "clique triangle must have 3 vertices")
        cliques[frozenset(_load_vertex(x) for x in tri)] = frozenset(
            _load_vertex(x) for x in item["vertices"]
        )
    emb = None
    if payload["embedding"] is not None:
        ep = payload["embedding"]
        _expect(
            isinstance(ep, dict) and {"rotation", "faces", "outer"} <= set(ep),
            "embedding shape",
        )
        rotation = {}
        for row in ep["rotation"]:
            _expect(isinstance(row, list) and len(row) == 2, "rotation rows")
            v, nbrs = row
            _expect(isinstance(nbrs, list), "rotation neighbours")
            rotation[_load_vertex(v)] = tuple(_load_vertex(x) for x in nbrs)
        emb = PlanarEmbedding(
            rotation,
            tuple(tuple(_load_vertex(x) for x in f) for f in ep["faces"]),
            tuple(_load_vertex(x) for x in ep["outer"]),
        )
    plus = PlusGraph(g, cliques)
    return Obstruction(
        payload["class"],
        plus,
        tuple(_load_vertex(x) for x in payload["nominated"]),
        tuple(_load_vertex(x) for x in payload["anchors"]),
        emb,
    )


def load_document(doc) -> tuple[str, Optional[MinorWitness], Optional[Obstruction]]:
    """Validate a certificate document; returns (verdict, witness, obstruction).

    Raises SchemaError on any structural mismatch.  Semantic invalidity (a
    payload that parses but does not verify) is the caller's concern.
    """
    _expect(isinstance(doc, dict), "document must be a JSON object")
    _expect(doc.get("schema") == SCHEMA_VERSION, f"unsupported schema {doc.get('schema')!r}")
    for key in ("verdict", "roots", "trace", "witness", "obstruction"):
        _expect(key in doc, f"missing key {key!r}")
    verdict = doc["verdict"]
    _expect(verdict in ("YES", "NO"), "verdict must be YES or NO")
    _expect(isinstance(doc["roots"], list) and len(doc["roots"]) == 4, "roots must list 4 vertices")
    _expect(isinstance(doc["trace"], list), "trace must be a list")
    witness = None
    obstruction = None
    if verdict == "YES":
        _expect(doc["witness"] is not None, "YES document needs a witness")
        witness = load_witness(doc["witness"])
    elif doc["obstruction"] is not None:
        obstruction = load_obstruction(doc["obstruction"])
    return verdict, witness, obstruction


# ---------------------------------------------------------------------------
# DOT rendering (presentation only).
# ---------------------------------------------------------------------------

_BRANCH_COLORS = ("lightblue", "lightgreen", "lightpink", "khaki")


def _dot_id(v) -> str:
    return '"' + str(v).replace('"', '\\"') + '"'


def render_dot(inst: RootedInstance, dec: Decision) -> str:
    """A Graphviz view of the instance with the decision's regions marked."""
    g = inst.graph
    lines = ["graph instance {", "  node [style=filled, fillcolor=white];"]
    fill: dict = {}
    label: dict = {}
    if dec.witness is not None:
        for i, r in enumerate(svert(dec.witness.branch_sets)):
            for v in dec.witness.branch_sets[r]:
                fill[v] = _BRANCH_COLORS[i % 4]
                label[v] = f"branch {r}"
    elif dec.obstruction is not None:
        ob = dec.obstruction
        for v in ob.base.vertices:
            fill[v] = "lightgray"
            label[v] = f"class {ob.klass} base"
        for t in sorted(ob.plus.cliques, key=skey):
            tag = ",".join(str(x) for x in svert(t))
            for v in svert(ob.plus.cliques[t]):
                fill[v] = "lightyellow"
                label[v] = f"clique at {tag}"
    rset = set(inst.roots)
    for v in g.vertices:
        attrs = [f"fillcolor={fill.get(v, 'white')}"]
        if v in rset:
            attrs.append("shape=doublecircle")
        if v in label:
            attrs.append(f'tooltip="{label[v]}"')
        lines.append(f"  {_dot_id(v)} [{', '.join(attrs)}];")
    for u, v in g.edges:
        lines.append(f"  {_dot_id(u)} -- {_dot_id(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_instance(path: str) -> Union[RootedInstance, int]:
    """Read and parse an instance file, or return the exit code to use."""
    try:
        text = _read_text(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return parse_instance(text)
    except InstanceParseError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (RootNominationError, ValueError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_BAD_ROOTS


def cmd_decide(args) -> int:
    inst = _load_instance(args.instance)
    if isinstance(inst, int):
        return inst
    dec = decide(inst)
    if args.json:
        sys.stdout.write(render_document(decision_document(inst, dec)))
    elif args.dot:
        sys.stdout.write(render_dot(inst, dec))
    else:
        if dec.is_yes:
            print("YES: rooted K4-minor found")
            for r in svert(dec.witness.branch_sets):
                body = " ".join(str(x) for x in svert(dec.witness.branch_sets[r]))
                print(f"  branch {r}: {body}")
        else:
            ob = dec.obstruction
            print(f"NO: class {ob.klass} obstruction")
            print(f"  base: {ob.base.n} vertices, {ob.base.m} edges")
            print(f"  anchors: {' '.join(str(x) for x in ob.anchors)}")
            for t in sorted(ob.plus.cliques, key=skey):
                tag = " ".join(str(x) for x in svert(t))
                body = " ".join(str(x) for x in svert(ob.plus.cliques[t]))
                print(f"  clique at ({tag}): {body}")
        if args.trace:
            print("trace: " + " -> ".join(dec.trace))
    return EXIT_YES if dec.is_yes else EXIT_NO


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    if isinstance(inst, int):
        return inst
    try:
        doc = json.loads(_read_text(args.certificate))
    except OSError as exc:
        print(f"error: cannot read {args.certificate}: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except json.JSONDecodeError as exc:
        print(f"error: {args.certificate}: not valid JSON: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        verdict, witness, obstruction = load_document(doc)
    except SchemaError as exc:
        print(f"error: {args.certificate}: schema mismatch: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ValueError as exc:
        # structurally sound JSON whose content is not a usable certificate
        print(f"failed: {exc}")
        return EXIT_NO
    g = inst.graph
    if verdict == "YES":
        ok, why = verify_witness(g, inst.roots, witness)
    elif obstruction is None:
        ok, why = False, "NO document carries no obstruction"
    else:
        try:
            ok, why = verify_obstruction(g, inst.roots, obstruction)
        except ValueError as exc:
            ok, why = False, str(exc)
    if ok:
        print(f"verified: {verdict} certificate holds")
        return EXIT_YES
    print(f"failed: {why}")
    return EXIT_NO


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    if isinstance(inst, int):
        return inst
    g = inst.graph
    limit = _oracle_limit(None)
    if g.n > limit:
        print(
            f"error: {g.n} vertices exceeds the oracle guard {limit} "
            "(set ROOTEDK4_ORACLE_MAX to override)",
            file=sys.stderr,
        )
        return EXIT_GUARD
    w = oracle_rooted_minor(g, inst.roots)
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": "rootedk4", "version": __version__},
        "verdict": "YES" if w is not None else "NO",
        "roots": list(inst.roots),
        "trace": ["oracle"],
        "witness": _witness_payload(w) if w is not None else None,
        "obstruction": None,
    }
    sys.stdout.write(render_document(doc))
    return EXIT_YES if w is not None else EXIT_NO


def _check_one(g: Graph, roots: tuple, failures: list, tag: str) -> tuple[int, int]:
    """Decide one instance against the oracle; returns (yes, no) increments."""
    inst = RootedInstance(g, roots)
    dec = decide(inst)
    w = oracle_rooted_minor(g, roots)
    if dec.is_yes != (w is not None):
        failures.append(f"disagreement: {tag} decide={dec.verdict}")
        return (0, 0)
    if dec.is_yes:
        ok, why = verify_witness(g, roots, dec.witness)
    else:
        ok, why = verify_obstruction(g, roots, dec.obstruction)
    if not ok:
        failures.append(f"verification failure: {tag} {why}")
        return (0, 0)
    return (1, 0) if dec.is_yes else (0, 1)


def _graph6_stream(path: str):
    """Graphs from a graph6 file ('-' for stdin), relabelled to 0..n-1."""
    text = _read_text(path)
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">>graph6<<"):
            line = line[len(">>graph6<<") :]
        yield nx.from_graph6_bytes(line.encode("ascii"))


def _random_connected_graph(rng: random.Random, max_n: int) -> Graph:
    while True:
        n = rng.randint(4, max_n)
        p = rng.uniform(0.3, 0.85)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        g = Graph(range(n), edges)
        if g.is_connected():
            return g


def cmd_sweep(args) -> int:
    limit = _oracle_limit(None)
    if args.max_n > limit:
        print(
            f"error: --max-n {args.max_n} exceeds the oracle guard {limit} "
            "(set ROOTEDK4_ORACLE_MAX to override)",
            file=sys.stderr,
        )
        return EXIT_GUARD
    failures: list[str] = []
    graphs = instances = yes = no = skipped = 0
    if args.mode == "exhaustive":
        for i, nxg in enumerate(_graph6_stream(args.source)):
            n = nxg.number_of_nodes()
            if n < 4 or n > args.max_n or not nx.is_connected(nxg):
                skipped += 1
                continue
            g = Graph(nxg.nodes, nxg.edges)
            graphs += 1
            for roots in combinations(g.vertices, 4):
                instances += 1
                dy, dn = _check_one(g, roots, failures, f"graph6#{i} roots={roots}")
                yes += dy
                no += dn
    else:
        rng = random.Random(args.seed)
        for i in range(args.count):
            g = _random_connected_graph(rng, args.max_n)
            roots = tuple(rng.sample(g.vertices, 4))
            graphs += 1
            instances += 1
            edges = ",".join(f"{u}-{v}" for u, v in g.edges)
            dy, dn = _check_one(g, roots, failures, f"random#{i} {edges} roots={roots}")
            yes += dy
            no += dn
    print("sweep report")
    print(f"mode: {args.mode}")
    print(f"max-n: {args.max_n}")
    print(f"seed: {args.seed if args.mode == 'random' else '-'}")
    print(f"graphs: {graphs}")
    print(f"instances: {instances}")
    print(f"yes: {yes}")
    print(f"no: {no}")
    print(f"skipped: {skipped}")
    print(f"disagreements-or-failures: {len(failures)}")
    for line in sorted(failures):
        print(line)
    return EXIT_YES if not failures else EXIT_NO


def cmd_atlas(args) -> int:
    klass = args.klass
    if args.size_budget < CLASS_MINIMUM_SIZE[klass]:
        print(
            f"error: class {klass} needs at least "
            f"{CLASS_MINIMUM_SIZE[klass]} vertices, budget is {args.size_budget}",
            file=sys.stderr,
        )
        return EXIT_GUARD
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    for i in range(args.count):
        ob = random_obstruction(rng, klass, args.size_budget)
        g = ob.plus.derived_graph()
        inst = RootedInstance(g, ob.nominated)
        ok, why = verify_obstruction(g, ob.nominated, ob)
        if not ok:
            raise AssertionError(f"internal error: atlas sample failed verification ({why})")
        doc = {
            "schema": SCHEMA_VERSION,
            "tool": {"name": "rootedk4", "version": __version__},
            "verdict": "NO",
            "roots": list(ob.nominated),
            "trace": ["atlas"],
            "witness": None,
            "obstruction": _obstruction_payload(ob),
        }
        stem = f"atlas-{klass}-{i:03d}"
        (out / f"{stem}.instance").write_text(format_instance(inst))
        (out / f"{stem}.cert.json").write_text(render_document(doc))
        print(f"{stem}: n={g.n} m={g.m} class={klass}")
    return EXIT_YES


# ---------------------------------------------------------------------------
# Entry point.
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootedk4",
        description="Decide rooted K4-minors with machine-checkable outcomes.",
    )
    parser.add_argument("--version", action="version", version=f"rootedk4 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide one instance file")
    p.add_argument("instance", help="instance file path ('-' for stdin)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true", help="emit the certificate document")
    mode.add_argument("--dot", action="store_true", help="emit a Graphviz drawing")
    p.add_argument("--trace", action="store_true", help="show the case trace")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("verify", help="check a certificate against an instance")
    p.add_argument("instance")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force the verdict (small graphs)")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="cross-check decide against the oracle")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100, help="graphs in random mode")
    p.add_argument(
        "source",
        nargs="?",
        default="-",
        help="graph6 stream for exhaustive mode (default stdin)",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("atlas", help="sample a verified obstruction corpus")
    p.add_argument("--class", dest="klass", choices=CLASS_NAMES, required=True)
    p.add_argument("--size-budget", type=int, default=10)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_atlas)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
