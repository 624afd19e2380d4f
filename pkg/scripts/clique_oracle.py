"""Closed-form PPR on cliques versus the power-iteration oracle, before and after one edge removal.

Prints the source score, the score of a removed edge's endpoint, and how far
uncapped push flow moves under the removal relative to 1/D^2.
"""

import argparse

from private_ppr.graph import make_clique, with_edge_toggled
from private_ppr.pushflow import PPRConfig, power_iteration_ppr, push_flow


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--degrees", default="3,4,10,20,50,100")
    parser.add_argument("--alpha", type=float, default=0.5)
    args = parser.parse_args()

    a = args.alpha
    print(f"{'D':>4} {'p_s formula':>12} {'p_s oracle':>12} {'p_x (xy cut)':>13} {'1/(3D+2)':>10} "
          f"{'|dp_x| D^2':>10} {'L1 change':>10}")
    for d in (int(x) for x in args.degrees.split(",")):
        g = make_clique(d + 1)
        p = power_iteration_ppr(g, 0, a)
        cut = power_iteration_ppr(with_edge_toggled(g, 1, 2), 0, a)
        push = PPRConfig(a, 1e-10)
        l1 = abs(push_flow(g, 0, push) - push_flow(with_edge_toggled(g, 1, 2), 0, push)).sum()
        closed = (2 * d + 1) / (3 * d + 1) if a == 0.5 else float("nan")
        print(f"{d:>4} {closed:>12.8f} {p[0]:>12.8f} {cut[1]:>13.8f} {1 / (3 * d + 2):>10.8f} "
              f"{abs(p[1] - cut[1]) * d * d:>10.4f} {l1:>10.3e}")


if __name__ == "__main__":
    main()
