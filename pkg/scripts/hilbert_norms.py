"""Norms of Hilbert-matrix truncations creeping up towards pi."""

from __future__ import annotations

import math
from dataclasses import dataclass

from _config import parse_config
from hsk.hankel import hankel_matrix, hilbert_symbol
from hsk.numerics import sym_eigen


@dataclass
class HilbertConfig:
    sizes: tuple[int, ...] = (4, 8, 16, 32, 64, 128, 256)


def main(cfg: HilbertConfig) -> None:
    phi = hilbert_symbol(2 * max(cfg.sizes))
    print(f"{'N':>5} {'norm':>18} {'pi - norm':>11} {'min eig':>11}")
    for n in cfg.sizes:
        w = sym_eigen(hankel_matrix(phi, n))[0]
        print(f"{n:5d} {w[0]:18.15f} {math.pi - w[0]:11.4e} {w[-1]:11.2e}")


if __name__ == "__main__":
    main(parse_config(HilbertConfig, __doc__))
