import itertools
import json

import networkx as nx
import pytest
from hypothesis import given, settings

from rootedk4 import Graph, RootedInstance, decide
from rootedk4.cli import (
    InstanceParseError,
    RootNominationError,
    SchemaError,
    decision_document,
    format_instance,
    load_document,
    main,
    parse_instance,
    render_document,
    render_dot,
)

from strategies import instances

K4_TEXT = "roots: 0 1 2 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"
K23_TEXT = "roots: a b c d\n" + "".join(
    f"{x} {y}\n" for x in "abc" for y in ("d", "v")
)
CUBE = Graph(
    range(8),
    [(0, 1), (0, 2), (0, 4), (1, 3), (1, 5), (2, 3),
     (2, 6), (3, 7), (4, 5), (4, 6), (5, 7), (6, 7)],
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# -- Instance files -----------------------------------------------------------


def test_parse_basic_instance():
    inst = parse_instance(K4_TEXT)
    assert inst.roots == (0, 1, 2, 3)
    assert inst.graph.n == 4 and inst.graph.m == 6


def test_parse_comments_and_isolated_vertices():
    text = "# a comment\nroots: a b c d\nvertex: e\na b  # chord\nb c\nc d\nd a\n"
    inst = parse_instance(text)
    assert inst.graph.n == 5
    assert inst.graph.degree("e") == 0


def test_parse_reports_line_and_column():
    with pytest.raises(InstanceParseError) as err:
        parse_instance("roots: 0 1 2 3\n0 1\n0 1 2\n")
    assert err.value.line == 3 and err.value.column == 5

    with pytest.raises(InstanceParseError) as err:
        parse_instance("roots: 0 1 2 3\n2 2\n")
    assert err.value.line == 2 and err.value.column == 3
    assert "loop" in str(err.value)

    with pytest.raises(InstanceParseError) as err:
        parse_instance("roots: 0 1 2 3\n0 1\n1 0\n")
    assert err.value.line == 3 and "duplicate edge" in str(err.value)

    with pytest.raises(InstanceParseError) as err:
        parse_instance("roots: 0 1 2 3\nroots: 0 1 2 3\n")
    assert err.value.line == 2 and "duplicate header" in str(err.value)

    with pytest.raises(InstanceParseError) as err:
        parse_instance("0 1\n")
    assert "roots:" in str(err.value)

    with pytest.raises(InstanceParseError) as err:
        parse_instance("")
    assert err.value.line == 1


def test_parse_root_count_and_validity():
    with pytest.raises(RootNominationError):
        parse_instance("roots: 0 1 2\n0 1\n")
    with pytest.raises(ValueError):
        parse_instance("roots: 0 0 1 2\n0 1\n1 2\n")  # duplicate root
    with pytest.raises(ValueError):
        parse_instance("roots: 0 1 2 9\n" + K4_TEXT.split("\n", 1)[1])


def test_token_typing_round_trip():
    inst = parse_instance("roots: -1 007 x 4\n-1 007\n007 x\nx 4\n4 -1\n")
    assert -1 in inst.graph.vertex_set()  # canonical integers become ints
    assert "007" in inst.graph.vertex_set()  # non-canonical stays a string
    again = parse_instance(format_instance(inst))
    assert again.graph == inst.graph and again.roots == inst.roots


def test_format_rejects_ambiguous_ids():
    g = Graph(["12", "a", "b", "c"], [("12", "a"), ("a", "b"), ("b", "c"), ("c", "12")])
    with pytest.raises(ValueError):
        format_instance(RootedInstance(g, ("12", "a", "b", "c")))


@given(instances(min_n=4, max_n=8, connected=False))
@settings(max_examples=80, deadline=None)
def test_instance_files_round_trip(inst):
    again = parse_instance(format_instance(inst))
    assert again.graph == inst.graph
    assert again.roots == inst.roots


# -- Certificate documents ----------------------------------------------------


def test_documents_round_trip_both_verdicts():
    for text in (K4_TEXT, K23_TEXT):
        inst = parse_instance(text)
        dec = decide(inst)
        doc = json.loads(render_document(decision_document(inst, dec)))
        verdict, witness, obstruction = load_document(doc)
        assert verdict == dec.verdict
        assert witness == dec.witness
        if dec.obstruction is not None:
            assert obstruction == dec.obstruction


def test_document_schema_gate():
    inst = parse_instance(K4_TEXT)
    doc = decision_document(inst, decide(inst))
    bad = dict(doc, schema=999)
    with pytest.raises(SchemaError):
        load_document(bad)
    with pytest.raises(SchemaError):
        load_document({k: v for k, v in doc.items() if k != "verdict"})
    with pytest.raises(SchemaError):
        load_document(dict(doc, witness=None))  # YES without witness


def test_dot_rendering_marks_roots_and_regions():
    inst = parse_instance(K23_TEXT)
    out = render_dot(inst, decide(inst))
    assert out.startswith("graph instance {")
    assert out.count("shape=doublecircle") == 4
    assert "fillcolor=lightgray" in out  # obstruction base
    inst = parse_instance(K4_TEXT)
    out = render_dot(inst, decide(inst))
    assert "fillcolor=lightblue" in out  # first branch colour


# -- decide / verify / oracle subcommands --------------------------------------


def test_decide_exit_codes_and_output(tmp_path, capsys):
    yes = write(tmp_path, "k4.instance", K4_TEXT)
    assert main(["decide", yes]) == 0
    assert "YES" in capsys.readouterr().out

    no = write(tmp_path, "k23.instance", K23_TEXT)
    assert main(["decide", no]) == 1
    out = capsys.readouterr().out
    assert "NO: class A obstruction" in out

    assert main(["decide", no, "--trace"]) == 1
    assert "trace: order2-(2,3) -> base-4" in capsys.readouterr().out

    assert main(["decide", no, "--dot"]) == 1
    assert capsys.readouterr().out.startswith("graph instance {")


def test_decide_diagnoses_bad_files(tmp_path, capsys):
    bad = write(tmp_path, "bad.instance", "roots: 0 1 2 3\n0 1 2\n")
    assert main(["decide", bad]) == 2
    assert "line 2" in capsys.readouterr().err

    short = write(tmp_path, "short.instance", "roots: 0 1 2\n0 1\n")
    assert main(["decide", short]) == 3
    capsys.readouterr()

    missing = write(tmp_path, "missing.instance", "roots: 0 1 2 9\n0 1\n1 2\n2 3\n3 0\n")
    assert main(["decide", missing]) == 3
    capsys.readouterr()

    assert main(["decide", str(tmp_path / "nonexistent")]) == 2
    capsys.readouterr()


def test_verify_round_trips_both_verdicts(tmp_path, capsys):
    for name, text in (("k4", K4_TEXT), ("k23", K23_TEXT)):
        inst_path = write(tmp_path, f"{name}.instance", text)
        main(["decide", inst_path, "--json"])
        cert_path = write(tmp_path, f"{name}.cert.json", capsys.readouterr().out)
        assert main(["verify", inst_path, cert_path]) == 0
        assert "verified" in capsys.readouterr().out


def test_verify_rejects_tampered_witness(tmp_path, capsys):
    inst_path = write(tmp_path, "k4.instance", K4_TEXT)
    main(["decide", inst_path, "--json"])
    doc = json.loads(capsys.readouterr().out)
    doc["witness"]["branches"][0]["vertices"] = [0, 2]  # overlaps branch 2
    cert_path = write(tmp_path, "bad.cert.json", json.dumps(doc))
    assert main(["verify", inst_path, cert_path]) == 1
    assert "failed" in capsys.readouterr().out


def test_verify_rejects_certificate_for_a_richer_graph(tmp_path, capsys):
    face = CUBE.vertices[0:2] + (3, 2)
    inst = RootedInstance(CUBE, (0, 1, 3, 2))
    inst_path = write(tmp_path, "cube.instance", format_instance(inst))
    main(["decide", inst_path, "--json"])
    cert = capsys.readouterr().out
    assert json.loads(cert)["obstruction"]["class"] == "D"
    cert_path = write(tmp_path, "cube.cert.json", cert)
    # the same certificate cannot cover the graph with a face chord added
    chord = RootedInstance(CUBE.add_edges([(0, 3)]), (0, 1, 3, 2))
    chord_path = write(tmp_path, "chord.instance", format_instance(chord))
    assert main(["verify", chord_path, cert_path]) == 1
    assert "failed" in capsys.readouterr().out


def test_verify_schema_and_json_errors(tmp_path, capsys):
    inst_path = write(tmp_path, "k4.instance", K4_TEXT)
    not_json = write(tmp_path, "broken.cert.json", "{not json")
    assert main(["verify", inst_path, not_json]) == 2
    assert "not valid JSON" in capsys.readouterr().err

    main(["decide", inst_path, "--json"])
    doc = json.loads(capsys.readouterr().out)
    doc["schema"] = 999
    off_schema = write(tmp_path, "off.cert.json", json.dumps(doc))
    assert main(["verify", inst_path, off_schema]) == 2
    assert "schema mismatch" in capsys.readouterr().err


def test_oracle_command(tmp_path, capsys):
    yes = write(tmp_path, "k4.instance", K4_TEXT)
    assert main(["oracle", yes]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "YES" and doc["trace"] == ["oracle"]

    no = write(tmp_path, "k23.instance", K23_TEXT)
    assert main(["oracle", no]) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "NO"


def test_oracle_guard(tmp_path, capsys):
    ring = nx.cycle_graph(12)
    text = "roots: 0 3 6 9\n" + "".join(f"{u} {v}\n" for u, v in ring.edges)
    big = write(tmp_path, "ring.instance", text)
    assert main(["oracle", big]) == 4
    assert "guard" in capsys.readouterr().err


# -- sweep --------------------------------------------------------------------


def atlas_graph6_file(tmp_path):
    lines = []
    for G in nx.graph_atlas_g()[1:]:
        if 4 <= G.number_of_nodes() <= 5 and nx.is_connected(G):
            lines.append(nx.to_graph6_bytes(G, header=False).decode().strip())
    # two lines the sweep must skip: too small, and disconnected
    lines.append(nx.to_graph6_bytes(nx.cycle_graph(3), header=False).decode().strip())
    disconnected = nx.Graph([(0, 1), (2, 3)])
    lines.append(nx.to_graph6_bytes(disconnected, header=False).decode().strip())
    return write(tmp_path, "small.g6", "\n".join(lines) + "\n")


def test_sweep_exhaustive_small(tmp_path, capsys):
    src = atlas_graph6_file(tmp_path)
    assert main(["sweep", "--mode", "exhaustive", "--max-n", "5", src]) == 0
    out = capsys.readouterr().out
    assert "graphs: 27" in out
    assert "instances: 111" in out
    assert "skipped: 2" in out
    assert "disagreements-or-failures: 0" in out


def test_sweep_random_reports_are_reproducible(capsys):
    argv = ["sweep", "--mode", "random", "--max-n", "7", "--seed", "11", "--count", "6"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    assert "seed: 11" in first


def test_sweep_respects_oracle_guard(capsys):
    assert main(["sweep", "--mode", "random", "--max-n", "40"]) == 4
    assert "guard" in capsys.readouterr().err


# -- atlas ---------------------------------------------------------------------


def test_atlas_writes_verified_corpus(tmp_path, capsys):
    out = tmp_path / "corpus"
    argv = ["atlas", "--class", "D", "--size-budget", "4", "--count", "3",
            "--seed", "5", "--out", str(out)]
    assert main(argv) == 0
    capsys.readouterr()
    for i in range(3):
        inst_path = out / f"atlas-D-{i:03d}.instance"
        cert_path = out / f"atlas-D-{i:03d}.cert.json"
        inst = parse_instance(inst_path.read_text())
        # at the class minimum the core is the plain quadrilateral
        assert inst.graph.n == 4 and inst.graph.m == 4
        assert not decide(inst).is_yes
        assert main(["verify", str(inst_path), str(cert_path)]) == 0
        capsys.readouterr()


def test_atlas_minimum_edge_plus_pendants(tmp_path, capsys):
    out = tmp_path / "corpus-a"
    argv = ["atlas", "--class", "A", "--size-budget", "5", "--count", "2",
            "--seed", "1", "--out", str(out)]
    assert main(argv) == 0
    capsys.readouterr()
    doc = json.loads((out / "atlas-A-000.cert.json").read_text())
    base = doc["obstruction"]["base"]
    assert len(base["vertices"]) == 5 and len(base["edges"]) == 7


def test_atlas_is_deterministic(tmp_path, capsys):
    dirs = []
    for tag in ("one", "two"):
        d = tmp_path / tag
        assert main(["atlas", "--class", "F", "--size-budget", "10", "--count",
                     "2", "--seed", "9", "--out", str(d)]) == 0
        capsys.readouterr()
        dirs.append(d)
    for name in sorted(p.name for p in dirs[0].iterdir()):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_atlas_budget_guard(tmp_path, capsys):
    argv = ["atlas", "--class", "F", "--size-budget", "7", "--out", str(tmp_path)]
    assert main(argv) == 4
    assert "at least" in capsys.readouterr().err


# -- top level -----------------------------------------------------------------


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "rootedk4" in capsys.readouterr().out
