import json

import numpy as np
import pytest

from qdeval import CategoricalDist, random_toy, temper, write_dist
from qdeval.cli import main
from qdeval.seeding import generator


@pytest.fixture()
def toy_dist(tmp_path):
    path = tmp_path / "toy.dist"
    write_dist(random_toy(20, seed=7), path)
    return str(path)


def _write_corpus(tmp_path, name, sentences):
    path = tmp_path / name
    path.write_text("\n".join(" ".join(s) for s in sentences) + "\n",
                    encoding="utf-8")
    return str(path)


def _synth_corpus(seed, n, vocab=30, length=6):
    rng = generator(seed, "clitest")
    return [[f"w{t}" for t in rng.integers(0, vocab, size=length)]
            for _ in range(n)]


def test_eval_bleu_identical_files(tmp_path, capsys):
    sents = _synth_corpus(1, 40)
    cands = _write_corpus(tmp_path, "c.txt", sents)
    assert main(["eval", "--metric", "bleu", "--ngram", "4",
                 "--candidates", cands, "--refs", cands]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["bleu"] == 1.0
    assert "runtime_ms" in payload


def test_eval_cr_nrr_self_distance(tmp_path, capsys):
    sents = _synth_corpus(2, 60)
    cands = _write_corpus(tmp_path, "c.txt", sents)
    assert main(["eval", "--metric", "cr-nrr", "--ngram", "3",
                 "--candidates", cands, "--refs", cands]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["cnd"] == 0.0
    assert payload["cr"] > 0


def test_eval_missing_file_is_data_error(tmp_path):
    cands = _write_corpus(tmp_path, "c.txt", _synth_corpus(3, 5))
    assert main(["eval", "--metric", "bleu", "--candidates", cands,
                 "--refs", str(tmp_path / "absent.txt")]) == 3


def test_eval_out_file_is_stable_across_reruns(tmp_path, capsys):
    sents = _synth_corpus(4, 30)
    cands = _write_corpus(tmp_path, "c.txt", sents)
    refs = _write_corpus(tmp_path, "r.txt", _synth_corpus(5, 30))
    out = tmp_path / "eval.json"
    for _ in range(2):
        assert main(["eval", "--metric", "cr-nrr", "--ngram", "2",
                     "--candidates", cands, "--refs", refs,
                     "--out", str(out)]) == 0
        capsys.readouterr()
        first = out.read_bytes() if _ == 0 else first
    assert out.read_bytes() == first
    manifest = json.loads((tmp_path / "eval.json.manifest.json").read_text())
    assert manifest["command"] == "eval"
    assert len(manifest["input_hashes"]) == 2


def test_json_round_trip_bytes(tmp_path, capsys):
    cands = _write_corpus(tmp_path, "c.txt", _synth_corpus(6, 20))
    out = tmp_path / "o.json"
    assert main(["eval", "--metric", "self-bleu", "--ngram", "2",
                 "--candidates", cands, "--out", str(out)]) == 0
    capsys.readouterr()
    text = out.read_text()
    assert json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n" == text


def test_frontier_csv(tmp_path, toy_dist, capsys):
    out = tmp_path / "frontier.csv"
    assert main(["frontier", "--dist", toy_dist, "--pair", "ll-se",
                 "--points", "16", "--w-min", "-10", "--out", str(out)]) == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    assert lines[0].startswith("w,b,U,V,q0")
    assert len(lines) == 17
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == 0.0
    # last sweep point reproduces the tempered closed form
    last = [float(x) for x in lines[-1].split(",")]
    expected = temper(random_toy(20, seed=7), 10.0)
    assert np.allclose(last[4:], expected.probs, atol=1e-8)


def test_frontier_uniform_collapses_to_single_point(tmp_path, capsys):
    path = tmp_path / "u.dist"
    write_dist(CategoricalDist.uniform(6), path)
    assert main(["frontier", "--dist", str(path), "--pair", "cr-nrr"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert [float(x) for x in lines[1].split(",")][4:] == [1 / 6] * 6


def test_qdisc_frontier_command(tmp_path, toy_dist, capsys):
    assert main(["qdisc", "--dist", toy_dist, "--pair", "ll-nrr",
                 "--method", "frontier"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["qdisc"] > 1e-4
    assert payload["method"] == "frontier_search"


def test_qdisc_penalty_command_with_trace(tmp_path, toy_dist, capsys):
    trace = tmp_path / "trace.csv"
    assert main(["qdisc", "--dist", toy_dist, "--pair", "cr-nrr",
                 "--method", "penalty", "--steps", "500", "--restarts", "2",
                 "--lambda", "2.0", "--seed", "3", "--trace", str(trace)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["qdisc"] <= 1e-6
    lines = trace.read_text().splitlines()
    assert lines[0] == "step,U,V,objective"
    assert len(lines) > 2


def test_qdisc_unknown_pair_is_usage_error(toy_dist):
    assert main(["qdisc", "--dist", toy_dist, "--pair", "bogus"]) == 2


def test_qdisc_penalty_accepts_bleu_expect_pair(toy_dist, capsys):
    assert main(["qdisc", "--dist", toy_dist, "--pair", "bleu-expect:R=2,C=2",
                 "--method", "penalty", "--steps", "400",
                 "--restarts", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "penalty_opt"


def test_synth_capacity_error_exits_4(capsys):
    assert main(["synth", "--vocab-size", "64", "--length", "5",
                 "--sigmas", "1.0", "--metrics", "BS-1"]) == 4


def test_synth_command_small(tmp_path, capsys):
    out = tmp_path / "synth.csv"
    assert main(["synth", "--vocab-size", "2", "--length", "2",
                 "--sigmas", "1.0", "--metrics", "BS-1,CN-2",
                 "--steps", "400", "--restarts", "2", "--seed", "4",
                 "--out", str(out)]) == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    assert lines[0] == "metric,sigma,qdisc,drate"
    assert len(lines) == 3
    assert (tmp_path / "synth.csv.trace-BS-1-sigma1.0.csv").exists()


def test_ingest_split_mix_pipeline(tmp_path, capsys):
    raw = _write_corpus(tmp_path, "raw.txt",
                        _synth_corpus(8, 400, vocab=12, length=5))
    corpus_out = tmp_path / "clean.txt"
    assert main(["ingest", "--input", raw, "--min-freq", "2",
                 "--max-len", "8", "--out", str(corpus_out)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["n_sentences"] > 0
    assert (tmp_path / "clean.txt.vocab").exists()

    assert main(["split", "--corpus", str(corpus_out), "--sizes", "100,100",
                 "--seed", "1", "--out", str(tmp_path / "part")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["files"]) == 2

    assert main(["mix", "--corpus", payload["files"][0], "--epsilon", "0.5",
                 "--noise-len", "4", "--samples", "50",
                 "--out", str(tmp_path / "mixed.txt"), "--seed", "2"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["n_sentences"] == 50


def test_sweep_epsilon_command(tmp_path, capsys):
    base = _synth_corpus(9, 3000, vocab=25, length=7)
    cands = _write_corpus(tmp_path, "c.txt", base[:1500])
    refs = _write_corpus(tmp_path, "r.txt", base[1500:])
    out = tmp_path / "sweep.csv"
    assert main(["sweep-epsilon", "--candidates", cands, "--refs", refs,
                 "--ngram", "2", "--epsilons", "0.0,0.3,0.6",
                 "--noise-len", "5", "--samples", "1500",
                 "--selfbleu-cap", "200", "--seed", "5",
                 "--out", str(out)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "bleu-nsbleu" in payload["reports"]
    assert "cr-nrr" in payload["reports"]
    lines = out.read_text().splitlines()
    assert lines[0] == "noise_len,epsilon,bleu,nsbleu,cr,nrr,cnd"
    assert len(lines) == 4
    assert (tmp_path / "sweep.csv.report.json").exists()
