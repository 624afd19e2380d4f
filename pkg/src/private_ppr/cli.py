"""Command-line interface: ``private-ppr {gen,ppr,embed,sweep,sensitivity-audit,classify}``.

Every command writes ``config.json`` (the full argument set) next to its
outputs; rerunning with the same config reproduces the outputs byte for byte.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import math
import os
import sys
from typing import Sequence

import numpy as np

from private_ppr import io as ppr_io
from private_ppr.baseline import baseline_dp_ppr, naive_laplace_ppr
from private_ppr.dp import DPParams, RngStream, dp_push_flow, dp_push_flow_cap, dp_sparse_ppr, high_degree_sensitivity
from private_ppr.embedding import HashConfig, dp_embedding, dp_embedding_sparse, instant_embedding
from private_ppr.evaluation import (
    LabeledNodes,
    empirical_sensitivity,
    l1_similarity,
    ndcg,
    node_classification_micro_f1,
    recall_at_k,
    spearman_rho,
)
from private_ppr.graph import (
    Graph,
    load_edge_list,
    make_clique,
    make_random_regular,
    make_sbm,
    write_edge_list,
    write_label_map,
)
from private_ppr.pushflow import CapConfig, Mode, PPRConfig, lazy_alpha, power_iteration_ppr, push_flow, push_flow_cap

logger = logging.getLogger("private_ppr")

PPR_VARIANTS = ("exact", "push", "push-cap", "dp", "dp-cap", "dp-sparse", "baseline-flip", "baseline-laplace")
EMBED_VARIANTS = ("nonprivate", "dp", "dp-sparse", "random")
METRICS = ("recall", "ndcg", "spearman", "l1")

DEFAULT_ALPHA = 0.08  # lazy equivalent of the usual non-lazy 0.15
DEFAULT_ROUNDS = 100
DEFAULT_SIGMA = 1e-6
DEFAULT_K = 256


# --------------------------------------------------------------------------- graph sources


def parse_generator(spec: str) -> tuple[Graph, np.ndarray | None]:
    """``clique:N``, ``regular:N:D[:SEED]`` or ``sbm:N1,N2,...:P_IN:P_OUT[:SEED]``.

    Returns the graph and, for SBM graphs, each node's block.
    """
    kind, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "clique" and len(parts) == 1:
            return make_clique(int(parts[0])), None
        if kind == "regular" and len(parts) in (2, 3):
            seed = int(parts[2]) if len(parts) == 3 else 0
            return make_random_regular(int(parts[0]), int(parts[1]), seed), None
        if kind == "sbm" and len(parts) in (3, 4):
            sizes = [int(x) for x in parts[0].split(",")]
            seed = int(parts[3]) if len(parts) == 4 else 0
            return make_sbm(sizes, float(parts[1]), float(parts[2]), seed)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad generator spec {spec!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(f"bad generator spec {spec!r}")


def load_graph(args) -> tuple[Graph, np.ndarray | None]:
    if args.graph:
        return load_edge_list(args.graph), None
    if args.generate:
        return parse_generator(args.generate)
    raise SystemExit("one of --graph or --generate is required")


def pick_sources(graph: Graph, args) -> list[int]:
    if args.source:
        index = {label: i for i, label in enumerate(graph.labels)}
        out = []
        for label in args.source:
            if label not in index:
                raise SystemExit(f"unknown source node {label!r}")
            out.append(index[label])
        return out
    eligible = np.flatnonzero(graph.degrees > 0)
    count = min(args.sample, len(eligible))
    gen = RngStream(args.seed, "sources").generator()
    return sorted(gen.choice(eligible, size=count, replace=False).tolist())


def ppr_config(args) -> PPRConfig:
    alpha = lazy_alpha(args.nonlazy_alpha) if args.nonlazy_alpha is not None else args.alpha
    if args.xi is not None:
        return PPRConfig(alpha=alpha, xi=args.xi)
    return PPRConfig.from_rounds(alpha, args.rounds)


# --------------------------------------------------------------------------- computations


def compute_ppr(variant: str, graph: Graph, source: int, cfg: PPRConfig, *, sigma: float, epsilon: float,
                mode: Mode, seed: int, min_degree: int | None = None):
    """Dispatches one PPR variant. Dense variants return an array, ``dp-sparse`` a SparseVector."""
    rng = RngStream(seed, variant, source)
    dp = DPParams(epsilon, mode)
    if variant == "exact":
        return power_iteration_ppr(graph, source, cfg.alpha)
    if variant == "push":
        return push_flow(graph, source, cfg)
    if variant == "push-cap":
        return push_flow_cap(graph, source, cfg, CapConfig(sigma, mode))
    if variant == "dp":
        if min_degree is None:
            raise SystemExit("--variant dp needs --min-degree (the promised minimum degree)")
        return dp_push_flow(graph, source, cfg, dp, min_degree, rng)
    if variant == "dp-cap":
        return dp_push_flow_cap(graph, source, cfg, sigma, dp, rng)
    if variant == "dp-sparse":
        return dp_sparse_ppr(graph, source, cfg, sigma, dp, rng)
    if variant == "baseline-flip":
        return baseline_dp_ppr(graph, source, epsilon, cfg, rng)
    if variant == "baseline-laplace":
        return naive_laplace_ppr(graph, source, epsilon, cfg, rng)
    raise SystemExit(f"unknown variant {variant!r}")


def compute_embedding(variant: str, graph: Graph, source: int, cfg: PPRConfig, hc: HashConfig, *, sigma: float,
                      epsilon: float, mode: Mode, seed: int) -> np.ndarray:
    rng = RngStream(seed, "embed-" + variant, source)
    dp = DPParams(epsilon, mode)
    if variant == "nonprivate":
        return instant_embedding(push_flow(graph, source, cfg), graph.n, hc)
    if variant == "dp":
        return dp_embedding(graph, source, cfg, sigma, hc, dp, rng)
    if variant == "dp-sparse":
        return dp_embedding_sparse(graph, source, cfg, sigma, dp, hc, rng)
    if variant == "random":
        return rng.generator().standard_normal(hc.k)
    raise SystemExit(f"unknown embedding variant {variant!r}")


def embed_all(variant: str, graph: Graph, cfg: PPRConfig, hc: HashConfig, *, sigma: float, epsilon: float,
              mode: Mode, seed: int) -> np.ndarray:
    """One embedding row per node; degree-0 nodes get a zero row."""
    out = np.zeros((graph.n, hc.k))
    for v in range(graph.n):
        if graph.degrees[v] > 0:
            out[v] = compute_embedding(variant, graph, v, cfg, hc, sigma=sigma, epsilon=epsilon, mode=mode, seed=seed)
    return out


def evaluate(metric: str, truth: np.ndarray, pred: np.ndarray, k: int, source: int) -> float:
    if metric == "recall":
        return recall_at_k(truth, pred, k, source)
    if metric == "ndcg":
        return ndcg(truth, pred, k, source)
    if metric == "spearman":
        try:
            return spearman_rho(truth, pred)
        except ValueError:
            return math.nan
    if metric == "l1":
        return l1_similarity(truth, pred)
    raise SystemExit(f"unknown metric {metric!r}")


def _sweep_points(variants, epsilons, sigmas):
    for variant in variants:
        sigma_grid = sigmas if variant in ("push-cap", "dp-cap", "dp-sparse") else [None]
        eps_grid = epsilons if variant not in ("exact", "push", "push-cap") else [None]
        for eps in eps_grid:
            for sigma in sigma_grid:
                yield variant, eps, sigma


def _sweep_source(task) -> list[tuple]:
    graph, source, cfg, points, metrics, k, mode, seed, min_degree = task
    truth = power_iteration_ppr(graph, source, cfg.alpha)
    results = []
    for variant, eps, sigma in points:
        pred = compute_ppr(variant, graph, source, cfg, sigma=sigma if sigma is not None else DEFAULT_SIGMA,
                           epsilon=eps if eps is not None else 1.0, mode=mode, seed=seed, min_degree=min_degree)
        if not isinstance(pred, np.ndarray):
            pred = pred.to_dense()
        for metric in metrics:
            results.append((variant, eps, sigma, metric, evaluate(metric, truth, pred, k, source)))
    return results


def run_sweep(graph: Graph, sources: Sequence[int], cfg: PPRConfig, *, variants, epsilons, sigmas, metrics, k: int,
              mode: Mode, seed: int, workers: int = 1, min_degree: int | None = None) -> list[dict]:
    """Mean and standard error of every metric per (variant, epsilon, sigma) grid point."""
    if not epsilons or not sigmas:
        raise ValueError("epsilon and sigma grids must be non-empty")
    points = list(_sweep_points(variants, epsilons, sigmas))
    tasks = [(graph, s, cfg, points, metrics, k, mode, seed, min_degree) for s in sources]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            per_source = list(pool.map(_sweep_source, tasks))
    else:
        per_source = [_sweep_source(t) for t in tasks]
    rows = []
    for j, (variant, eps, sigma) in enumerate(points):
        for m, metric in enumerate(metrics):
            vals = np.array([res[j * len(metrics) + m][4] for res in per_source])
            stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            rows.append({
                "variant": variant, "mode": mode.value, "epsilon": eps, "sigma": sigma, "alpha": cfg.alpha,
                "xi": cfg.xi, "k": k, "metric": metric, "value": float(vals.mean()), "stderr": stderr,
                "n_sources": len(vals), "seed": seed,
            })
    return rows


# --------------------------------------------------------------------------- commands


def _open_out(args, name: str):
    os.makedirs(args.out, exist_ok=True)
    return open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n")


def _echo_config(args) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg = ppr_config(args)
    config["resolved"] = {"alpha": cfg.alpha, "xi": cfg.xi, "rounds": cfg.rounds}
    with _open_out(args, "config.json") as fh:
        ppr_io.dump_json(fh, config)


def cmd_gen(args) -> int:
    graph, blocks = load_graph(args)
    with _open_out(args, "graph.txt") as fh:
        write_edge_list(graph, fh)
    with _open_out(args, "label_map.tsv") as fh:
        write_label_map(graph, fh)
    if blocks is not None:
        with _open_out(args, "labels.tsv") as fh:
            for label, block in zip(graph.labels, blocks.tolist()):
                fh.write(f"{label}\t{block}\n")
    _echo_config(args)
    return 0


def cmd_ppr(args) -> int:
    graph, _ = load_graph(args)
    cfg = ppr_config(args)
    mode = Mode(args.mode)
    with _open_out(args, "label_map.tsv") as fh:
        write_label_map(graph, fh)
    for s in pick_sources(graph, args):
        result = compute_ppr(args.variant, graph, s, cfg, sigma=args.sigma, epsilon=args.epsilon, mode=mode,
                             seed=args.seed, min_degree=args.min_degree)
        fields = {"variant": args.variant, "alpha": cfg.alpha, "xi": cfg.xi}
        if args.variant in ("push-cap", "dp-cap", "dp-sparse"):
            fields.update(sigma=args.sigma, mode=mode.value)
        if args.variant.startswith(("dp", "baseline")):
            fields.update(epsilon=args.epsilon, mode=mode.value, seed=args.seed)
        label = graph.labels[s]
        if not isinstance(result, np.ndarray):
            with _open_out(args, f"ppr_{label}.json") as fh:
                ppr_io.dump_json(fh, ppr_io.sparse_ppr_json(result, s, graph.labels, **fields))
        elif args.format == "json":
            with _open_out(args, f"ppr_{label}.json") as fh:
                ppr_io.dump_json(fh, ppr_io.ppr_json(result, s, graph.labels, **fields))
        else:
            with _open_out(args, f"ppr_{label}.tsv") as fh:
                ppr_io.write_ppr_tsv(fh, result, graph.labels)
    _echo_config(args)
    return 0


def cmd_embed(args) -> int:
    graph, _ = load_graph(args)
    cfg = ppr_config(args)
    hc = HashConfig(k=args.k, bucket_seed=args.hash_seed, sign_seed=args.hash_seed + 1)
    rows = []
    for s in pick_sources(graph, args):
        vec = compute_embedding(args.variant, graph, s, cfg, hc, sigma=args.sigma, epsilon=args.epsilon,
                                mode=Mode(args.mode), seed=args.seed)
        rows.append((graph.labels[s], vec))
    with _open_out(args, "embeddings.tsv") as fh:
        ppr_io.write_embedding_tsv(fh, rows)
    _echo_config(args)
    return 0


def cmd_sweep(args) -> int:
    graph, _ = load_graph(args)
    cfg = ppr_config(args)
    rows = run_sweep(graph, pick_sources(graph, args), cfg, variants=args.variants, epsilons=args.epsilons,
                     sigmas=args.sigmas, metrics=args.metrics, k=args.top_k, mode=Mode(args.mode), seed=args.seed,
                     workers=args.workers, min_degree=args.min_degree)
    with _open_out(args, "metrics.csv") as fh:
        ppr_io.write_sweep_csv(fh, rows)
    _echo_config(args)
    return 0


def cmd_sensitivity_audit(args) -> int:
    graph, _ = load_graph(args)
    cfg = ppr_config(args)
    mode = Mode(args.mode)
    rows = []
    for s in pick_sources(graph, args):
        observed = empirical_sensitivity(args.algorithm, graph, s, args.trials, mode, RngStream(args.seed, "audit", s),
                                         cfg, sigma=args.sigma, toggle=args.toggle)
        if args.algorithm == "push-cap":
            bound = args.sigma
        else:
            # toggles may lower a degree by one
            d = graph.min_degree - (0 if args.toggle == "add" else 1)
            bound = high_degree_sensitivity(cfg.alpha, d, mode) if d >= 1 else math.inf
        row = ppr_io.metric_row("max_l1_change", observed, sigma=args.sigma, mode=mode.value, seed=args.seed)
        row.update(source=graph.labels[s], algorithm=args.algorithm, trials=args.trials, bound=bound,
                   within_bound=observed <= bound)
        rows.append(row)
    with _open_out(args, "audit.json") as fh:
        ppr_io.dump_json(fh, rows)
    _echo_config(args)
    return 0 if all(r["within_bound"] for r in rows) else 1


def read_labels(path: str, graph: Graph) -> LabeledNodes:
    """TSV ``node_label<TAB>label_id[,label_id...]``; unlisted nodes have no labels."""
    index = {label: i for i, label in enumerate(graph.labels)}
    mapping: dict[int, set[int]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip() or line.startswith("#"):
                continue
            node, labs = line.rstrip("\n").split("\t")
            if node in index:
                mapping.setdefault(index[node], set()).update(int(x) for x in labs.split(","))
    return LabeledNodes.from_mapping(mapping, graph.n)


def cmd_classify(args) -> int:
    graph, blocks = load_graph(args)
    if args.labels:
        labels = read_labels(args.labels, graph)
    elif blocks is not None:
        labels = LabeledNodes.from_single(blocks)
    else:
        raise SystemExit("--labels is required unless the graph comes from an sbm generator")
    cfg = ppr_config(args)
    hc = HashConfig(k=args.k, bucket_seed=args.hash_seed, sign_seed=args.hash_seed + 1)
    emb = embed_all(args.variant, graph, cfg, hc, sigma=args.sigma, epsilon=args.epsilon, mode=Mode(args.mode),
                    seed=args.seed)
    scores = [node_classification_micro_f1(emb, labels, args.train_fraction, args.seed + i) for i in range(args.splits)]
    row = ppr_io.metric_row("micro_f1", float(np.mean(scores)), k=args.k, epsilon=args.epsilon, sigma=args.sigma,
                            mode=args.mode, seed=args.seed)
    row.update(variant=args.variant, splits=args.splits)
    with _open_out(args, "classification.json") as fh:
        ppr_io.dump_json(fh, [row])
    _echo_config(args)
    return 0


# --------------------------------------------------------------------------- parser


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _str_list(choices):
    def parse(text: str) -> list[str]:
        items = [x for x in text.split(",") if x]
        bad = [x for x in items if x not in choices]
        if bad:
            raise argparse.ArgumentTypeError(f"unknown choice(s) {bad}; pick from {list(choices)}")
        return items
    return parse


def _add_common(p: argparse.ArgumentParser, *, privacy=True, sources=True) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--graph", help="edge-list file (two labels per line, '#' comments)")
    g.add_argument("--generate", help="clique:N | regular:N:D[:SEED] | sbm:N1,N2:P_IN:P_OUT[:SEED]")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="lazy-walk teleport probability")
    p.add_argument("--nonlazy-alpha", type=float, default=None,
                   help="non-lazy teleport probability a; overrides --alpha with a/(2-a)")
    p.add_argument("--xi", type=float, default=None, help="precision; overrides --rounds")
    p.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS, help="number of push rounds")
    if privacy:
        p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="sensitivity parameter")
        p.add_argument("--epsilon", type=float, default=1.0, help="privacy budget")
        p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.JOINT.value,
                       help="joint protects edges not incident to the source")
    if sources:
        p.add_argument("--source", action="append", help="source node label (repeatable)")
        p.add_argument("--sample", type=int, default=1000, help="number of random sources if --source is absent")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="private-ppr", description=__doc__.splitlines()[0],
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("gen", help="write a generated graph as an edge list", formatter_class=fmt)
    _add_common(p, privacy=False, sources=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ppr", help="compute PPR vectors", formatter_class=fmt)
    _add_common(p)
    p.add_argument("--variant", choices=PPR_VARIANTS, default="dp-cap", help="algorithm to run")
    p.add_argument("--min-degree", type=int, default=None, help="promised minimum degree for --variant dp")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv", help="dense output format")
    p.set_defaults(func=cmd_ppr)

    p = sub.add_parser("embed", help="compute InstantEmbedding vectors", formatter_class=fmt)
    _add_common(p)
    p.add_argument("--variant", choices=EMBED_VARIANTS, default="dp", help="embedding to compute")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="embedding dimension")
    p.add_argument("--hash-seed", type=int, default=HashConfig.bucket_seed,
                   help="bucket hash seed; the sign hash uses seed + 1")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sweep", help="evaluate variants over epsilon/sigma grids", formatter_class=fmt)
    _add_common(p)
    p.add_argument("--variants", type=_str_list(PPR_VARIANTS), default=["dp-cap", "baseline-flip"],
                   help="comma-separated variants")
    p.add_argument("--epsilons", type=_float_list, default=[0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0],
                   help="comma-separated epsilon grid")
    p.add_argument("--sigmas", type=_float_list, default=[DEFAULT_SIGMA], help="comma-separated sigma grid")
    p.add_argument("--metrics", type=_str_list(METRICS), default=list(METRICS), help="comma-separated metrics")
    p.add_argument("--top-k", type=int, default=100, help="cutoff for recall and NDCG")
    p.add_argument("--min-degree", type=int, default=None, help="promised minimum degree for variant dp")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sensitivity-audit", help="empirical max L1 change under single-edge toggles",
                       formatter_class=fmt)
    _add_common(p)
    p.add_argument("--algorithm", choices=("push", "push-cap"), default="push-cap", help="noise-free core to audit")
    p.add_argument("--trials", type=int, default=100, help="neighbor graphs per source")
    p.add_argument("--toggle", choices=("any", "add", "remove"), default="any", help="which pairs may be toggled")
    p.set_defaults(func=cmd_sensitivity_audit)

    p = sub.add_parser("classify", help="node classification Micro-F1 of embeddings", formatter_class=fmt)
    _add_common(p, sources=False)
    p.add_argument("--labels", help="TSV node_label<TAB>label_id[,label_id...]")
    p.add_argument("--variant", choices=EMBED_VARIANTS, default="dp", help="embedding to compute")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="embedding dimension")
    p.add_argument("--hash-seed", type=int, default=HashConfig.bucket_seed,
                   help="bucket hash seed; the sign hash uses seed + 1")
    p.add_argument("--train-fraction", type=float, default=0.5, help="fraction of nodes used for training")
    p.add_argument("--splits", type=int, default=5, help="random train/test splits to average")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
