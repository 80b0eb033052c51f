"""Reduction statistics over random nets: normalization length, redex kinds,
how far the termination measure drops per step, and how many distinct normal
forms multi-box nets have.

    python3 scripts/reduction_stats.py --nets 500
"""

import argparse
import collections
import statistics
import time

from syncnets.generators import NetGenConfig, random_net
from syncnets.rewrite import measure, normal_forms, normalize


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--nets", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-links", type=int, default=40)
    args = ap.parse_args()
    cfg = NetGenConfig(max_links=args.max_links)

    kinds: collections.Counter = collections.Counter()
    lengths, sizes, slices = [], [], []
    t0 = time.perf_counter()
    for k in range(args.nets):
        n = random_net(args.seed + k, cfg)
        sizes.append(len(n.links))
        nf, trace = normalize(n, record=True)
        lengths.append(len(trace))
        kinds.update(s.redex.kind.value for s in trace)
        start = measure(n)
        if trace and measure(nf) >= start:
            print(f"net {args.seed + k}: measure did not drop ({start} -> {measure(nf)})")
        if any(b.contents > 1 for b in n.bots()):
            slices.append(len(normal_forms(n)))

    print(f"{args.nets} nets, {statistics.mean(sizes):.1f} links on average")
    print(f"steps to normal form: mean {statistics.mean(lengths):.1f}, max {max(lengths)}")
    for kind, count in kinds.most_common():
        print(f"  {kind:14s} {count}")
    if slices:
        print(f"multi-box nets: {len(slices)}, distinct normal forms mean {statistics.mean(slices):.2f}, max {max(slices)}")
    print(f"{time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
