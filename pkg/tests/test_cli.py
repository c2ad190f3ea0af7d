import csv
import io
import json

import pytest

from garling import harmonic
from garling.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def table(out):
    body = [line for line in out.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def summary(out):
    line = [l for l in out.splitlines() if l.startswith("# summary: ")][-1]
    return json.loads(line[len("# summary: "):])


def header(out):
    return {l[2:].split(":", 1)[0]: l.split(":", 1)[1].strip()
            for l in out.splitlines() if l.startswith("# ") and "summary" not in l}


@pytest.fixture
def vector_file(tmp_path):
    def write(entries, name="vec.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"entries": [{"pos": p, "coef": c} for p, c in entries]}))
        return path
    return write


def test_norm_unit(vector_file, capsys):
    code, out, _ = run(["norm", "--space", "garling", "--p", "1", "--weight", "power:1",
                        vector_file([(1, 1.0)])], capsys)
    assert code == 0
    assert float(table(out)[0]["value"]) == 1.0


def test_norm_with_oracle_and_lorentz(vector_file, capsys):
    path = vector_file([(1, 0.1), (2, 1.0)])
    code, out, _ = run(["norm", "--space", "all", path], capsys)
    rows = {r["space"]: r for r in table(out)}
    assert code == 0
    assert float(rows["garling"]["value"]) == pytest.approx(1.0)
    assert rows["garling"]["agree"] == "true"
    assert float(rows["lorentz"]["value"]) == pytest.approx(1.05)


def test_header_block(vector_file, capsys):
    _, out, _ = run(["norm", vector_file([(1, 1.0)])], capsys)
    head = header(out)
    assert head["tool"].startswith("garling ")
    assert len(head["config-sha256"]) == 64
    assert head["weight"] == "power:1" and head["p"] == "1.0" and head["rng-seed"] == "0"


def test_positioning_examples(capsys):
    _, out, _ = run(["positioning", "q", "--eta", "trivial", "--n", "3"], capsys)
    assert [r["q"] for r in table(out)] == ["1/2", "3/4", "7/8"]
    _, out, _ = run(["positioning", "pi", "--eta", "const1", "--n", "3"], capsys)
    assert [r["pi"] for r in table(out)] == ["3", "2", "1"]
    code, out, _ = run(["positioning", "roundtrip", "--eta", "random:42", "--n", "300"], capsys)
    assert code == 0 and summary(out)["result"] == "PASS"


def test_from_ranks(capsys):
    code, out, _ = run(["positioning", "from-ranks", "--ranks", "0.5,0.25,0.75"], capsys)
    assert code == 0 and [r["d"] for r in table(out)] == ["1", "1", "3"]


def test_seed_examples(capsys):
    _, out, _ = run(["seed", "em", "--m", "0..2", "--coefs", "1,0.1"], capsys)
    assert [float(r["upper"]) for r in table(out)] == pytest.approx([1.05, 0.1, 0.0])
    _, out, _ = run(["seed", "phi", "--n", "1..5"], capsys)
    w = harmonic()
    assert [float(r["lower"]) for r in table(out)] == pytest.approx(
        [w.prefix_sum(n) for n in range(1, 6)], rel=1e-12)
    _, out, _ = run(["seed", "blocks", "--K", "2", "--format", "json-lines"], capsys)
    docs = [json.loads(l) for l in out.splitlines() if not l.startswith("#")]
    assert len(docs) == 2 and all("entries" in d for d in docs)


def test_json_lines_mirror_csv(capsys):
    _, csv_out, _ = run(["seed", "em", "--m", "0..2", "--coefs", "1,0.1"], capsys)
    _, jl_out, _ = run(["seed", "em", "--m", "0..2", "--coefs", "1,0.1",
                        "--format", "json-lines"], capsys)
    records = [json.loads(l) for l in jl_out.splitlines() if not l.startswith("#")]
    rows = table(csv_out)
    assert len(records) == len(rows)
    for rec, row in zip(records, rows):
        assert set(rec) == set(row)
        assert all(float(rec[k]) == float(row[k]) for k in row)


def test_experiment_nonsym_small(capsys):
    code, out, _ = run(["experiment", "nonsym", "--k", "2", "--eps", "0.5"], capsys)
    assert code == 0 and summary(out)["n"] == [1, 2]


def test_experiment_exit_status_tracks_search(capsys):
    # a cap too small for four steps must report the failure with status 1
    code, out, _ = run(["experiment", "nonsym", "--k", "4", "--eps", "0.5", "--n-cap", "64"],
                       capsys)
    assert code == 1 and summary(out)["result"] == "FAIL"


def test_experiment_steve2_table(capsys):
    code, out, _ = run(["experiment", "steve2", "--n", "1,4,16"], capsys)
    rows = table(out)
    assert [int(r["n"]) for r in rows] == [1, 4, 16]
    assert float(rows[0]["norm"]) == pytest.approx(1.5)
    assert all(float(r["limit"]) == 2.0 for r in rows)


def test_experiment_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 2, "eps": 0.5, "weight": "power:1", "p": 1}))
    code, out, _ = run(["experiment", "nonsym", "--config", cfg], capsys)
    assert code == 0 and json.loads(header(out)["config"])["k"] == 2
    # flags override the document
    code, out, _ = run(["experiment", "nonsym", "--config", cfg, "--k", "1"], capsys)
    assert json.loads(header(out)["config"])["k"] == 1


def test_byte_identical_reruns(capsys):
    argv = ["experiment", "linf", "--k", "3", "--samples", "40", "--rng-seed", "7"]
    first = run(argv, capsys)[1]
    second = run(argv, capsys)[1]
    threaded = run(["--threads", "4"] + argv, capsys)[1]
    assert first == second == threaded


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run(["positioning", "q", "--eta", "trivial", "--n", "2", "-o", path], capsys)
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[-2:] == ["2,3/4", '# summary: {"result": "PASS"}']


def test_malformed_json_reports_location(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"entries": [\n  {"pos": 1, "coef": }\n]}')
    code, _, err = run(["norm", path], capsys)
    assert code == 2 and "line 2" in err and "column" in err


@pytest.mark.parametrize("doc, fragment", [
    ({"entries": [{"pos": 1}]}, "entries[0]"),
    ({"values": []}, "entries"),
    ({"entries": [{"pos": 0.5, "coef": 1}]}, "entries[0].pos"),
])
def test_bad_vector_documents(tmp_path, capsys, doc, fragment):
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["norm", path], capsys)
    assert code == 2 and fragment in err


def test_missing_file_and_bad_lists(capsys):
    assert run(["norm", "/nonexistent/vec.json"], capsys)[0] == 2
    assert run(["seed", "em", "--m", "a..b"], capsys)[0] == 2
    assert run(["norm", "--weight", "nonsense", "/dev/null"], capsys)[0] == 2
