"""Turn a dataclass config into argparse flags."""

import argparse
import dataclasses


def parse_config(cls, description: str):
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if f.type in ("tuple[float, ...]", "tuple[int, ...]"):
            conv = float if "float" in f.type else int
            p.add_argument(flag, type=lambda s, c=conv: tuple(c(t) for t in s.split(",")),
                           default=f.default, help=f"comma-separated (default {f.default})")
        else:
            p.add_argument(flag, type=type(f.default), default=f.default,
                           help=f"default {f.default}")
    return cls(**vars(p.parse_args()))
