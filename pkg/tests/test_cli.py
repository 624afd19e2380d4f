import argparse
import io
import json
import math

import numpy as np
import pytest

from private_ppr import cli
from private_ppr import io as ppr_io
from private_ppr.dp import SparseVector

# minimum degree 66, so caps at sigma=1e-2, alpha=0.5 never bind
HIGH_DEGREE_SBM = "sbm:150,150:0.5:0.1:1"
SUBCOMMANDS = ["gen", "ppr", "embed", "sweep", "sensitivity-audit", "classify"]


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def read_tsv(path):
    return [line.split("\t") for line in path.read_text().splitlines()]


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_help_shows_every_default(command, capsys):
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    with pytest.raises(SystemExit):
        parser.parse_args([command, "--help"])
    text = " ".join(capsys.readouterr().out.split())
    for action in sub._actions:
        if action.dest == "help":
            continue
        assert action.option_strings[-1] in text
        assert action.help and "%(default)" not in action.help
    assert text.count("(default:") == len(sub._actions) - 1


def test_defaults():
    args = cli.build_parser().parse_args(["ppr", "--generate", "clique:5"])
    cfg = cli.ppr_config(args)
    assert (cfg.alpha, cfg.rounds, args.sigma) == (0.08, 100, 1e-6)
    assert cli.build_parser().parse_args(["embed"]).k == 256


def test_nonlazy_alpha_flag():
    args = cli.build_parser().parse_args(["ppr", "--nonlazy-alpha", "0.15"])
    assert cli.ppr_config(args).alpha == pytest.approx(0.15 / 1.85)


@pytest.mark.parametrize("n,expected", [(5, 9 / 13), (101, 201 / 301)])
def test_ppr_clique_top_score(tmp_path, n, expected):
    _, out = run(tmp_path, "ppr", "--generate", f"clique:{n}", "--variant", "push", "--alpha", "0.5", "--xi", "1e-6",
                 "--source", "0")
    rows = read_tsv(out / "ppr_0.tsv")
    assert rows[0][0] == "0"
    assert abs(float(rows[0][1]) - expected) <= 1e-6
    assert len(rows) == n
    config = json.loads((out / "config.json").read_text())
    assert config["variant"] == "push" and config["resolved"]["rounds"] == math.ceil(math.log(1e6) / 0.5)


def test_dp_cap_huge_epsilon_same_ranking(tmp_path):
    # cliques and regular graphs have exactly tied scores that any noise reorders; this graph's gaps are >= 1e-8
    common = ["--generate", HIGH_DEGREE_SBM, "--source", "5", "--sigma", "1e-2", "--alpha", "0.5", "--xi", "1e-12"]
    _, a = run(tmp_path / "a", "ppr", *common, "--variant", "push-cap")
    _, b = run(tmp_path / "b", "ppr", *common, "--variant", "dp-cap", "--epsilon", "1e9")
    top_a = [r[0] for r in read_tsv(a / "ppr_5.tsv")[:100]]
    top_b = [r[0] for r in read_tsv(b / "ppr_5.tsv")[:100]]
    assert top_a == top_b


def test_dp_cap_sampled_sources(tmp_path):
    _, out = run(tmp_path, "ppr", "--generate", "regular:1000:10:1", "--variant", "dp-cap", "--sample", "3",
                 "--format", "json")
    files = sorted(out.glob("ppr_*.json"))
    assert len(files) == 3
    doc = json.loads(files[0].read_text())
    assert len(doc["scores"]) == 1000
    assert doc["epsilon"] == 1.0 and doc["sigma"] == 1e-6 and doc["mode"] == "joint" and doc["seed"] == 0


def test_dp_variant_needs_min_degree(tmp_path):
    with pytest.raises(SystemExit, match="min-degree"):
        run(tmp_path, "ppr", "--generate", "clique:5", "--variant", "dp", "--source", "0")
    code, out = run(tmp_path, "ppr", "--generate", "clique:5", "--variant", "dp", "--source", "0", "--min-degree", "4")
    assert code == 0 and (out / "ppr_0.tsv").exists()


def test_sparse_output(tmp_path):
    _, out = run(tmp_path, "ppr", "--generate", "clique:101", "--variant", "dp-sparse", "--alpha", "0.5",
                 "--sigma", "1e-2", "--epsilon", "1e9", "--source", "0")
    doc = json.loads((out / "ppr_0.json").read_text())
    assert doc["n"] == 101 and len(doc["entries"]) == 101
    assert doc["entries"][0][0] == "0"


def test_unknown_source_and_bad_generator(tmp_path):
    with pytest.raises(SystemExit, match="unknown source"):
        run(tmp_path, "ppr", "--generate", "clique:5", "--source", "9")
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_generator("torus:3")
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_generator("regular:5:3")


def test_graph_file_with_labels(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("alice bob\nbob carol\ncarol alice\ncarol dave\n")
    _, out = run(tmp_path, "ppr", "--graph", str(path), "--variant", "exact", "--source", "carol")
    rows = read_tsv(out / "ppr_carol.tsv")
    assert rows[0][0] == "carol" and {r[0] for r in rows} == {"alice", "bob", "carol", "dave"}
    assert read_tsv(out / "label_map.tsv")[0] == ["alice", "0"]


def test_embed_width(tmp_path):
    _, out = run(tmp_path, "embed", "--generate", "regular:300:10:2", "--sample", "4")
    rows = read_tsv(out / "embeddings.tsv")
    assert len(rows) == 4 and all(len(r) == 257 for r in rows)
    assert np.all(np.isfinite(np.array([r[1:] for r in rows], dtype=float)))


def test_sweep_huge_epsilon_full_recall(tmp_path):
    sources = [a for s in range(3) for a in ("--source", str(s))]
    _, out = run(tmp_path, "sweep", "--generate", HIGH_DEGREE_SBM, "--alpha", "0.5", "--xi", "1e-12", *sources,
                 "--variants", "dp-cap", "--epsilons", "1e9", "--sigmas", "1e-2", "--top-k", "100")
    rows = ppr_io.read_sweep_csv(io.StringIO((out / "metrics.csv").read_text()))
    recall = [r for r in rows if r["metric"] == "recall"]
    assert len(recall) == 1 and float(recall[0]["value"]) == 1.0 and recall[0]["n_sources"] == "3"


def test_sweep_sigma_grid_shape(tmp_path):
    sigmas = ["1e-08", "1e-06", "0.0001", "0.01"]
    _, out = run(tmp_path, "sweep", "--generate", "regular:100:10:1", "--sample", "2", "--variants", "dp-cap",
                 "--epsilons", "1", "--sigmas", ",".join(sigmas))
    text = (out / "metrics.csv").read_text()
    assert text.splitlines()[0] == ",".join(ppr_io.SWEEP_COLUMNS)
    rows = ppr_io.read_sweep_csv(io.StringIO(text))
    assert len(rows) == len(sigmas) * len(cli.METRICS)
    assert {(float(r["sigma"]), r["metric"]) for r in rows} == {(float(s), m) for s in sigmas for m in cli.METRICS}


def test_sweep_workers_do_not_change_output(tmp_path):
    args = ["sweep", "--generate", "regular:100:10:1", "--sample", "4", "--epsilons", "1,4"]
    _, a = run(tmp_path / "a", *args, "--workers", "1")
    _, b = run(tmp_path / "b", *args, "--workers", "2")
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()


def test_sweep_empty_grid_rejected():
    with pytest.raises(ValueError):
        cli.run_sweep(None, [], None, variants=["dp-cap"], epsilons=[], sigmas=[1e-6], metrics=["l1"], k=1,
                      mode=None, seed=0)


def test_sensitivity_audit(tmp_path):
    code, out = run(tmp_path, "sensitivity-audit", "--generate", "regular:60:6:1", "--sample", "2", "--trials", "5",
                    "--sigma", "1e-3")
    rows = json.loads((out / "audit.json").read_text())
    assert code == 0 and len(rows) == 2
    assert all(r["metric"] == "max_l1_change" and r["value"] <= 1e-3 for r in rows)
    assert set(rows[0]) >= {"metric", "k", "epsilon", "sigma", "mode", "seed", "value"}


def test_classify_and_gen(tmp_path):
    _, gen_out = run(tmp_path / "g", "gen", "--generate", "sbm:40,40:0.5:0.05:2")
    labels = gen_out / "labels.tsv"
    graph = gen_out / "graph.txt"
    _, out = run(tmp_path / "c", "classify", "--graph", str(graph), "--labels", str(labels), "--variant",
                 "nonprivate", "--splits", "2")
    rows = json.loads((out / "classification.json").read_text())
    assert rows[0]["metric"] == "micro_f1" and rows[0]["value"] >= 0.9


def test_classify_needs_labels(tmp_path):
    with pytest.raises(SystemExit, match="labels"):
        run(tmp_path, "classify", "--generate", "clique:5")


@pytest.mark.parametrize("command", [
    ["ppr", "--generate", "regular:80:6:1", "--sample", "3", "--variant", "dp-sparse", "--sigma", "1e-3"],
    ["ppr", "--generate", "regular:80:6:1", "--sample", "2", "--variant", "baseline-flip"],
    ["embed", "--generate", "regular:80:6:1", "--sample", "3", "--variant", "dp-sparse"],
    ["sweep", "--generate", "regular:80:6:1", "--sample", "3", "--epsilons", "1,2"],
    ["classify", "--generate", "sbm:30,30:0.5:0.05:1", "--splits", "2"],
])
def test_outputs_byte_identical_across_runs(tmp_path, command):
    _, a = run(tmp_path / "a", *command)
    _, b = run(tmp_path / "b", *command)
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        if name == "config.json":
            continue  # echoes the differing --out path
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_sweep_csv_roundtrip():
    row = {c: None for c in ppr_io.SWEEP_COLUMNS}
    row.update(variant="dp-cap", mode="joint", epsilon=0.5, value=0.1 + 0.2, k=100, n_sources=3, seed=0)
    buf = io.StringIO()
    ppr_io.write_sweep_csv(buf, [row])
    back = ppr_io.read_sweep_csv(io.StringIO(buf.getvalue()))[0]
    assert float(back["value"]) == 0.1 + 0.2
    assert back["sigma"] == ""


def test_sparse_json_entries():
    doc = ppr_io.sparse_ppr_json(SparseVector(3, np.array([2]), np.array([0.25])), 0, ["a", "b", "c"], epsilon=1.0)
    assert doc == {"source": "a", "n": 3, "epsilon": 1.0, "entries": [["c", 0.25]]}
