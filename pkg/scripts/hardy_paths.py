"""Agreement of the three constructions of R+ W R+ over random symbols,
and the rank of the Hankel product for rational symbols."""

from __future__ import annotations

from dataclasses import dataclass

from _config import parse_config
from hsk.hardy import (
    conj_symbol,
    finite_rank_check,
    hankel_product_matrix,
    max_pairwise_deviation,
    random_trig_polynomial,
    toeplitz_identity_matrix,
    w_kernel_matrix,
)


@dataclass
class HardyConfig:
    seeds: int = 25
    max_degree: int = 8
    size: int = 24
    poles: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75)


def main(cfg: HardyConfig) -> None:
    worst = 0.0
    for seed in range(cfg.seeds):
        g = random_trig_polynomial(seed % (cfg.max_degree + 1), seed)
        f = conj_symbol(g)
        dev = max_pairwise_deviation(w_kernel_matrix(f, g, cfg.size),
                                     toeplitz_identity_matrix(f, g, cfg.size),
                                     hankel_product_matrix(f, g, cfg.size))
        worst = max(worst, dev)
        print(f"seed {seed:3d} degree {g.degree}: deviation {dev:.2e}")
    print(f"worst deviation {worst:.2e}")
    for a in cfg.poles:
        print(f"g = z / (1 - {a} z): numerical rank {finite_rank_check(a, None, cfg.size)}")


if __name__ == "__main__":
    main(parse_config(HardyConfig, __doc__))
