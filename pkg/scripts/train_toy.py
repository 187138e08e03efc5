#!/usr/bin/env python3
"""Full toy training run; exports an engine-loadable weight file.

Usage: python3 scripts/train_toy.py out.mixw [--steps 2000] [--samples 10000]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from linegom.formats import write_weights
from linegom.mapping import NetConfig
from linegom.trainer import toy_run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--config", choices=["test", "small", "medium", "large"],
                    default="test")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = getattr(NetConfig, args.config)()
    net, losses = toy_run(cfg, samples=args.samples, steps=args.steps,
                          seed=args.seed, log_every=100)
    start, end = np.mean(losses[:10]), np.mean(losses[-10:])
    print(f"loss {start:.3f} -> {end:.3f} ({1 - end / start:.0%} decrease)")
    mapping, heads = net.to_weights()
    write_weights(args.out, mapping, heads)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
