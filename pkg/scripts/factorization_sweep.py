"""Factorization error of the discrete Bessel kernel against the Hankel
square, as the tail length grows."""

from __future__ import annotations

from dataclasses import dataclass

from _config import parse_config
from hsk.twkernel import bessel_coefficients, bessel_recurrence, check_affine_conditions, extract_symbol, verify_factorization


@dataclass
class SweepConfig:
    thetas: tuple[float, ...] = (0.25, 1.0, 4.0, 16.0)
    tails: tuple[int, ...] = (10, 20, 40, 80, 400)
    size: int = 32


def main(cfg: SweepConfig) -> None:
    print(f"{'theta':>7} {'tail':>5} {'max error':>11} {'certified':>11}")
    for theta in cfg.thetas:
        a = bessel_coefficients(theta, cfg.size + max(cfg.tails))
        phi, sign = extract_symbol(check_affine_conditions(bessel_recurrence(theta)), a)
        for k in cfg.tails:
            try:
                fr = verify_factorization(a, phi, sign, cfg.size, k)
            except ValueError:
                print(f"{theta:7.3g} {k:5d} {'(tail too short for a certified bound)':>23}")
                continue
            print(f"{theta:7.3g} {k:5d} {fr.max_error:11.3e} {fr.certified_bound:11.3e}")


if __name__ == "__main__":
    main(parse_config(SweepConfig, __doc__))
