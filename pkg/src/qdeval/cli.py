"""Command-line interface.

Subcommands: eval, frontier, qdisc, synth, sweep-epsilon, ingest, split, mix.
Every command is deterministic given --seed; files written through --out carry
a .manifest.json sidecar with parameters, input hashes, and tool version so
reruns are verifiable.  Exit codes: 0 ok, 2 usage, 3 data, 4 numeric/capacity.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .bleu import BleuConfig, corpus_bleu, self_bleu
from .corpus import Corpus, NoiseMixSpec, ingest, noise_mix_sample, split, \
    write_corpus, write_vocab
from .discrepancy import PenaltyConfig, qdisc_curve_interp, qdisc_frontier, \
    qdisc_penalty, maximize_functional
from .distributions import read_dist
from .errors import CapacityError, DegenerateInputError, EmptyCorpusError, \
    EmptyDistributionError, ExtrapolationError, NumericError, \
    SupportMismatchError
from .frontier import sweep
from .functionals import bleu_nsbleu_functionals, gram_cr_nrr_functionals, \
    pair_functionals
from .metric_pairs import get_pair
from .ngram_metrics import cnd, cr, ngram_dist, nrr, psi_n
from .oracle import OracleSpec, oracle_enumerate
from .seeding import generator


class _DataError(Exception):
    """Bad or missing input data; maps to exit code 3."""


def _fmt(x: float) -> str:
    return "%.17g" % x


def _json_text(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path, command: str, params: dict, seed: int,
                    inputs: list, wall_clock_s: float) -> None:
    manifest = {
        "command": command,
        "params": {k: v for k, v in sorted(params.items())},
        "seed": seed,
        "version": __version__,
        "input_hashes": {str(p): _sha256(p) for p in inputs},
        "wall_clock_s": wall_clock_s,
    }
    with open(str(out_path) + ".manifest.json", "w", encoding="utf-8") as fh:
        fh.write(_json_text(manifest))


def _load_tokens(path) -> list[tuple[str, ...]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            sents = [tuple(line.split()) for line in fh.read().splitlines()]
    except OSError as exc:
        raise _DataError(f"cannot read corpus file {path}: {exc}") from exc
    sents = [s for s in sents if s]
    if not sents:
        raise _DataError(f"corpus file {path} has no sentences")
    return sents


def _load_dist(path):
    try:
        return read_dist(path)
    except OSError as exc:
        raise _DataError(f"cannot read distribution file {path}: {exc}") from exc
    except ValueError as exc:
        raise _DataError(f"bad distribution file {path}: {exc}") from exc


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# eval

def _cmd_eval(args) -> int:
    started = time.perf_counter()
    cands = _load_tokens(args.candidates)
    payload: dict = {"metric": args.metric, "order": args.ngram,
                     "n_candidates": len(cands)}
    inputs = [args.candidates]
    if args.metric == "bleu":
        refs = _load_tokens(args.refs)
        inputs.append(args.refs)
        payload["n_references"] = len(refs)
        payload["bleu"] = corpus_bleu(cands, refs, BleuConfig(max_order=args.ngram))
    elif args.metric == "self-bleu":
        score = self_bleu(cands, BleuConfig(max_order=args.ngram))
        payload["self_bleu"] = score
        payload["nsbleu"] = -score
    elif args.metric == "cr-nrr":
        refs = _load_tokens(args.refs)
        inputs.append(args.refs)
        payload["n_references"] = len(refs)
        try:
            qg = ngram_dist(cands, args.ngram)
            pg = ngram_dist(refs, args.ngram)
        except EmptyDistributionError as exc:
            raise _DataError(str(exc)) from exc
        payload.update(cr=cr(qg, pg), nrr=nrr(qg), cnd=cnd(qg, pg),
                       psi=psi_n(qg, pg),
                       counts={"candidate_grams": qg.total_count,
                               "reference_grams": pg.total_count})
    else:
        raise ValueError(f"unknown metric {args.metric!r}")

    wall = time.perf_counter() - started
    if args.out:
        _emit(_json_text(payload), args.out)
        _write_manifest(args.out, "eval", _params(args), args.seed, inputs, wall)
    stdout_payload = dict(payload, runtime_ms=round(wall * 1000.0, 3))
    sys.stdout.write(_json_text(stdout_payload))
    return 0


# ---------------------------------------------------------------------------
# frontier

def _cmd_frontier(args) -> int:
    started = time.perf_counter()
    dist = _load_dist(args.dist)
    pair = get_pair(args.pair)
    result = sweep(pair, dist, args.points, w_min=args.w_min)
    lines = ["w,b,U,V," + ",".join(f"q{i}" for i in range(dist.n))]
    for pt in result.points:
        cells = [_fmt(pt.w), _fmt(pt.b), _fmt(pt.u), _fmt(pt.v)]
        cells.extend(_fmt(x) for x in pt.q.probs)
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if args.out:
        _write_manifest(args.out, "frontier", _params(args), args.seed,
                        [args.dist], time.perf_counter() - started)
    return 0


# ---------------------------------------------------------------------------
# qdisc

def _write_trace(path, traces) -> None:
    lines = ["step,U,V,objective"]
    for trace in traces:
        for step, row in enumerate(trace):
            lines.append(",".join([str(step)] + [_fmt(x) for x in row]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_qdisc(args) -> int:
    started = time.perf_counter()
    dist = _load_dist(args.dist)
    pair = get_pair(args.pair)
    if args.method == "frontier":
        report = qdisc_frontier(pair, dist, w_min=args.w_min)
    else:
        cfg = PenaltyConfig(lam=args.penalty_lambda, max_steps=args.steps,
                            restarts=args.restarts, seed=args.seed)
        u_fn, v_fn = pair_functionals(pair, dist)
        from .discrepancy import drate_denominator_generalform
        denom = drate_denominator_generalform(pair, dist)
        report = qdisc_penalty(u_fn, v_fn, dist, cfg,
                               denominator=denom if denom > 0 else None,
                               threads=args.threads)
        if args.trace:
            _write_trace(args.trace, report.traces)
    summary = json.loads(report.to_json())
    summary["pair"] = pair.name
    summary["method"] = report.method
    if not args.full:
        summary.pop("witness", None)
    if args.out:
        _emit(_json_text(summary), args.out)
        _write_manifest(args.out, "qdisc", _params(args), args.seed,
                        [args.dist], time.perf_counter() - started)
    sys.stdout.write(_json_text(summary))
    return 0


# ---------------------------------------------------------------------------
# synth

def _parse_metric_list(text: str) -> list[tuple[str, int]]:
    out = []
    for item in text.split(","):
        item = item.strip().upper()
        kind, _, order = item.partition("-")
        if kind not in ("BS", "CN") or not order.isdigit():
            raise ValueError(f"bad metric id {item!r}; expected BS-n or CN-n")
        out.append((kind, int(order)))
    return out


def _cmd_synth(args) -> int:
    started = time.perf_counter()
    metrics = _parse_metric_list(args.metrics)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    cfg = PenaltyConfig(lam=args.penalty_lambda, max_steps=args.steps,
                        restarts=args.restarts, seed=args.seed)
    rows = []
    traces_written = []
    for kind, order in metrics:
        for sigma in sigmas:
            spec = OracleSpec(vocab_size=args.vocab_size, length=args.length,
                              hidden_dim=args.hidden, sigma=sigma,
                              seed=args.seed)
            p = oracle_enumerate(spec)
            if kind == "BS":
                u_fn, v_fn = bleu_nsbleu_functionals(
                    p, ref_count=2, cand_size=2, max_order=order)
            else:
                u_fn, v_fn = gram_cr_nrr_functionals(p, order)
            # quality is linear in q, so its maximum is the top coefficient;
            # the max-diversity model comes from the same ascent engine
            u_coeff = u_fn.grad(p.probs)
            q_max_v, _ = maximize_functional(v_fn, p.n, cfg)
            denom = float(u_coeff.max()) - u_fn.value(q_max_v.probs)
            report = qdisc_penalty(u_fn, v_fn, p, cfg,
                                   denominator=denom if denom > 0 else None,
                                   threads=args.threads)
            rows.append((f"{kind}-{order}", sigma, report.qdisc, report.drate))
            if args.out:
                trace_path = f"{args.out}.trace-{kind}-{order}-sigma{sigma}.csv"
                _write_trace(trace_path, report.traces)
                traces_written.append(trace_path)
    lines = ["metric,sigma,qdisc,drate"]
    for metric, sigma, qdisc, drate in rows:
        drate_cell = _fmt(drate) if drate is not None else ""
        lines.append(f"{metric},{_fmt(sigma)},{_fmt(qdisc)},{drate_cell}")
    text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if args.out:
        _write_manifest(args.out, "synth", _params(args), args.seed, [],
                        time.perf_counter() - started)
    return 0


# ---------------------------------------------------------------------------
# sweep-epsilon

def _shared_vocab_corpora(ref_sents, cand_sents):
    vocab: dict[str, int] = {}

    def to_ids(sents):
        return tuple(tuple(vocab.setdefault(t, len(vocab)) for t in s)
                     for s in sents)

    ref_ids = to_ids(ref_sents)
    cand_ids = to_ids(cand_sents)

    def mk(sentences):
        return Corpus(sentences=sentences, vocab=vocab,
                      stats={"n_sentences": len(sentences),
                             "max_len": max((len(s) for s in sentences),
                                            default=0),
                             "vocab_size": len(vocab)})

    return mk(ref_ids), mk(cand_ids)


def _subsample(sentences, cap: int, seed: int):
    if len(sentences) <= cap:
        return list(sentences)
    idx = generator(seed, "selfbleu-cap").choice(len(sentences), size=cap,
                                                 replace=False)
    return [sentences[i] for i in sorted(idx)]


def _max_single_sentence_cr(ref_corpus, order: int) -> float:
    pg = ngram_dist(ref_corpus.sentences, order)
    best = 0.0
    for sent in ref_corpus.sentences:
        if len(sent) < order:
            continue
        qg = ngram_dist([sent], order)
        best = max(best, cr(qg, pg))
    return best


def _eval_point(sentences, ref_gram, order: int, bleu_cfg, ref_sents,
                selfbleu_cap: int, seed: int):
    bleu = corpus_bleu(sentences, ref_sents, bleu_cfg)
    sb = self_bleu(_subsample(sentences, selfbleu_cap, seed), bleu_cfg)
    try:
        qg = ngram_dist(sentences, order)
    except EmptyDistributionError as exc:
        raise _DataError(str(exc)) from exc
    return {"bleu": bleu, "nsbleu": -sb,
            "cr": cr(qg, ref_gram), "nrr": nrr(qg), "cnd": cnd(qg, ref_gram)}


def _cmd_sweep_epsilon(args) -> int:
    started = time.perf_counter()
    cand_sents = _load_tokens(args.candidates)
    ref_sents = _load_tokens(args.refs)
    refs, cands = _shared_vocab_corpora(ref_sents, cand_sents)
    epsilons = [float(e) for e in args.epsilons.split(",")]
    order = args.ngram
    bleu_cfg = BleuConfig(max_order=order)
    n_samples = args.samples or cands.n_sentences
    try:
        ref_gram = ngram_dist(refs.sentences, order)
    except EmptyDistributionError as exc:
        raise _DataError(str(exc)) from exc

    noise_lens = []
    for item in args.noise_len.split(","):
        item = item.strip()
        noise_lens.append(refs.stats["max_len"] if item == "max" else int(item))

    real = _eval_point(cands.sentences, ref_gram, order, bleu_cfg,
                       refs.sentences, args.selfbleu_cap, args.seed)
    cr_denominator = _max_single_sentence_cr(refs, order)

    curve_rows = []
    runs: dict[str, list] = {"bleu-nsbleu": [], "cr-nrr": []}
    for noise_len in noise_lens:
        points = []
        for k, eps in enumerate(epsilons):
            mix = noise_mix_sample(refs, NoiseMixSpec(
                epsilon=eps, noise_len=noise_len,
                seed=args.seed + 1000 * k, n_samples=n_samples))
            point = _eval_point(mix.sentences, ref_gram, order, bleu_cfg,
                                refs.sentences, args.selfbleu_cap, args.seed)
            points.append(point)
            curve_rows.append((noise_len, eps, point))
        for pair_name, u_key, v_key, denom in (
                ("bleu-nsbleu", "bleu", "nsbleu", 1.0),
                ("cr-nrr", "cr", "nrr",
                 cr_denominator if cr_denominator > 0 else None)):
            curve = [(pt[u_key], pt[v_key]) for pt in points]
            try:
                rep = qdisc_curve_interp(curve, (real[u_key], real[v_key]),
                                         epsilons=epsilons, denominator=denom)
                entry = json.loads(rep.to_json())
                entry.pop("witness", None)
            except ExtrapolationError as exc:
                entry = {"error": f"extrapolation refused: {exc}"}
            entry["noise_len"] = noise_len
            runs[pair_name].append(entry)

    # report every noise-length run; the larger-QDisc one is the headline
    reports = {}
    for pair_name, entries in runs.items():
        scored = [e for e in entries if "qdisc" in e]
        selected = max(scored, key=lambda e: e["qdisc"]) if scored else None
        if selected is not None:
            selected["selected"] = True
        reports[pair_name] = {"selected": selected, "runs": entries}

    lines = ["noise_len,epsilon,bleu,nsbleu,cr,nrr,cnd"]
    for noise_len, eps, pt in curve_rows:
        lines.append(",".join([str(noise_len), _fmt(eps)] +
                              [_fmt(pt[k]) for k in
                               ("bleu", "nsbleu", "cr", "nrr", "cnd")]))
    csv_text = "\n".join(lines) + "\n"
    report_payload = {"order": order, "real": real, "reports": reports,
                      "n_samples": n_samples,
                      "selfbleu_cap": args.selfbleu_cap}
    if args.out:
        _emit(csv_text, args.out)
        with open(str(args.out) + ".report.json", "w", encoding="utf-8") as fh:
            fh.write(_json_text(report_payload))
        _write_manifest(args.out, "sweep-epsilon", _params(args), args.seed,
                        [args.candidates, args.refs],
                        time.perf_counter() - started)
    sys.stdout.write(_json_text(report_payload))
    return 0


# ---------------------------------------------------------------------------
# corpus commands

def _cmd_ingest(args) -> int:
    started = time.perf_counter()
    try:
        corpus = ingest(args.input, min_token_freq=args.min_freq,
                        max_len=args.max_len, min_len=args.min_len,
                        lowercase=args.lowercase)
    except OSError as exc:
        raise _DataError(f"cannot read {args.input}: {exc}") from exc
    if args.out:
        write_corpus(corpus, args.out)
        write_vocab(corpus, str(args.out) + ".vocab")
        _write_manifest(args.out, "ingest", _params(args), args.seed,
                        [args.input], time.perf_counter() - started)
    sys.stdout.write(_json_text(corpus.stats))
    return 0


def _cmd_split(args) -> int:
    started = time.perf_counter()
    try:
        corpus = ingest(args.corpus)
    except OSError as exc:
        raise _DataError(f"cannot read {args.corpus}: {exc}") from exc
    sizes = [int(s) for s in args.sizes.split(",")]
    parts = split(corpus, sizes, seed=args.seed)
    paths = []
    for k, part in enumerate(parts):
        path = f"{args.out}.{k}.txt"
        write_corpus(part, path)
        paths.append(path)
    _write_manifest(paths[0], "split", _params(args), args.seed,
                    [args.corpus], time.perf_counter() - started)
    sys.stdout.write(_json_text({"files": paths, "sizes": sizes}))
    return 0


def _cmd_mix(args) -> int:
    started = time.perf_counter()
    try:
        pool = ingest(args.corpus)
    except OSError as exc:
        raise _DataError(f"cannot read {args.corpus}: {exc}") from exc
    noise_len = pool.stats["max_len"] if args.noise_len == "max" \
        else int(args.noise_len)
    spec = NoiseMixSpec(epsilon=args.epsilon, noise_len=noise_len,
                        seed=args.seed, n_samples=args.samples)
    mixed = noise_mix_sample(pool, spec)
    write_corpus(mixed, args.out)
    _write_manifest(args.out, "mix", _params(args), args.seed,
                    [args.corpus], time.perf_counter() - started)
    sys.stdout.write(_json_text(mixed.stats))
    return 0


# ---------------------------------------------------------------------------
# wiring

def _params(args) -> dict:
    skip = {"func", "out", "seed"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdeval",
        description="Quality-diversity metric evaluation, Pareto frontiers, "
                    "and divergence-compatibility experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("eval", help="evaluate metrics on corpora")
    common(p)
    p.add_argument("--metric", required=True,
                   choices=("bleu", "self-bleu", "cr-nrr"))
    p.add_argument("--ngram", type=int, default=4)
    p.add_argument("--candidates", required=True)
    p.add_argument("--refs")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("frontier", help="sweep the quality-diversity frontier")
    common(p)
    p.add_argument("--dist", required=True)
    p.add_argument("--pair", required=True)
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--w-min", type=float, default=-50.0)
    p.set_defaults(func=_cmd_frontier)

    p = sub.add_parser("qdisc", help="quality discrepancy of a distribution")
    common(p)
    p.add_argument("--dist", required=True)
    p.add_argument("--pair", required=True)
    p.add_argument("--method", choices=("frontier", "penalty"),
                   default="frontier")
    p.add_argument("--lambda", dest="penalty_lambda", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--w-min", type=float, default=-50.0)
    p.add_argument("--trace", default=None)
    p.add_argument("--full", action="store_true",
                   help="include the witness distribution in the summary")
    p.set_defaults(func=_cmd_qdisc)

    p = sub.add_parser("synth", help="synthetic-oracle discrepancy study")
    common(p)
    p.add_argument("--vocab-size", type=int, default=4)
    p.add_argument("--length", type=int, default=3)
    p.add_argument("--hidden", type=int, default=8)
    p.add_argument("--sigmas", default="0.5,1.0,2.0")
    p.add_argument("--metrics", default="BS-1,BS-2,BS-3,CN-2,CN-3")
    p.add_argument("--lambda", dest="penalty_lambda", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--restarts", type=int, default=8)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("sweep-epsilon",
                       help="noise-mixture curves against real data")
    common(p)
    p.add_argument("--candidates", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--epsilons", default="0.0,0.2,0.4,0.6")
    p.add_argument("--ngram", type=int, default=3)
    p.add_argument("--noise-len", default="5",
                   help="comma list of noise sentence lengths; 'max' uses "
                        "the reference maximum")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--selfbleu-cap", type=int, default=1000)
    p.set_defaults(func=_cmd_sweep_epsilon)

    p = sub.add_parser("ingest", help="filter a raw corpus")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--min-freq", type=int, default=1)
    p.add_argument("--max-len", type=int, default=10 ** 9)
    p.add_argument("--min-len", type=int, default=1)
    p.add_argument("--lowercase", action="store_true")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("split", help="disjoint random corpus splits")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--sizes", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("mix", help="sample a noise-mixture corpus")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--noise-len", default="5")
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=_cmd_mix)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_DataError, FileNotFoundError, EmptyCorpusError,
            EmptyDistributionError, SupportMismatchError,
            DegenerateInputError, ExtrapolationError) as exc:
        print(f"qdeval: data error: {exc}", file=sys.stderr)
        return 3
    except (CapacityError, NumericError) as exc:
        print(f"qdeval: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"qdeval: argument error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
