"""Eigenvalues of Bessel-symbol Hankel truncations and the multiplicity
accounting nu(s^2) = nu(s) + nu(-s)."""

from __future__ import annotations

from dataclasses import dataclass

from _config import parse_config
from hsk.hankel import spectral_report
from hsk.twkernel import bessel_coefficients, bessel_recurrence, check_affine_conditions, extract_symbol


@dataclass
class SpectrumConfig:
    theta: float = 1.0
    sizes: tuple[int, ...] = (16, 32, 64)
    cluster_tol: float = 1e-8


def main(cfg: SpectrumConfig) -> None:
    a = bessel_coefficients(cfg.theta, 2 * max(cfg.sizes) + 10)
    phi, _ = extract_symbol(check_affine_conditions(bessel_recurrence(cfg.theta)), a)
    for n in cfg.sizes:
        rep = spectral_report(phi, n, cfg.cluster_tol)
        print(f"N = {n}: norm {rep.norm:.12f}, mapping residual {rep.mapping_residual:.2e}, "
              f"kernel dim {rep.kernel_dimension}, status {rep.status}")
        for r in rep.rows:
            print(f"    s^2 = {r.square:.6e}  nu(s^2) = {r.nu_square}  "
                  f"nu(+s) = {r.nu_plus}  nu(-s) = {r.nu_minus}")


if __name__ == "__main__":
    main(parse_config(SpectrumConfig, __doc__))
