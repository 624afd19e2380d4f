"""Micro-F1 of non-private, DP and random embeddings on a two-community block model.

Example:
  python3 scripts/classification.py --epsilons 0.5,1,2,4 --out results/classification.json
"""

import argparse
import json
import os

import numpy as np

from private_ppr.dp import DPParams, RngStream
from private_ppr.embedding import HashConfig, dp_embedding, dp_embedding_sparse, instant_embedding
from private_ppr.evaluation import LabeledNodes, node_classification_micro_f1
from private_ppr.graph import make_sbm
from private_ppr.pushflow import Mode, PPRConfig, push_flow


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--blocks", default="250,250")
    parser.add_argument("--p-in", type=float, default=0.6)
    parser.add_argument("--p-out", type=float, default=0.02)
    parser.add_argument("--epsilons", default="0.5,1,2,4")
    parser.add_argument("--sigma", type=float, default=None,
                        help="defaults to the largest sigma whose caps never bind on the graph")
    parser.add_argument("--splits", type=int, default=5)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--out", default="results/classification.json")
    args = parser.parse_args()

    g, blocks = make_sbm([int(x) for x in args.blocks.split(",")], args.p_in, args.p_out, seed=args.seed)
    labels = LabeledNodes.from_single(blocks)
    cfg, hc = PPRConfig(), HashConfig()
    sigma = args.sigma or 2 * (2 - cfg.alpha) / (cfg.alpha * g.min_degree**2)

    def f1(x):
        return float(np.mean([node_classification_micro_f1(x, labels, 0.5, s) for s in range(args.splits)]))

    rows = [
        {"variant": "nonprivate", "epsilon": None,
         "micro_f1": f1(np.array([instant_embedding(push_flow(g, v, cfg), g.n, hc) for v in range(g.n)]))},
        {"variant": "random", "epsilon": None,
         "micro_f1": f1(RngStream(args.seed, "random").generator().standard_normal((g.n, hc.k)))},
    ]
    for eps in (float(x) for x in args.epsilons.split(",")):
        dp = DPParams(eps, Mode.JOINT)
        dense = [dp_embedding(g, v, cfg, sigma, hc, dp, RngStream(args.seed, "dense", v)) for v in range(g.n)]
        sparse = [dp_embedding_sparse(g, v, cfg, sigma, dp, hc, RngStream(args.seed, "sparse", v)) for v in range(g.n)]
        rows.append({"variant": "dp", "epsilon": eps, "sigma": sigma, "micro_f1": f1(np.array(dense))})
        rows.append({"variant": "dp-sparse", "epsilon": eps, "sigma": sigma, "micro_f1": f1(np.array(sparse))})
    for row in rows:
        print(f"{row['variant']:>10} eps={row['epsilon']!s:<5} micro-F1={row['micro_f1']:.3f}")
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
