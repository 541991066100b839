"""``seamlab <command> --config <path> [--out <dir>] [--override key=value]...``

Exit status is 0 when no record failed, 1 when some record failed, and 2 for
configuration or usage errors.  ``SEAMLAB_THREADS`` sets the worker count
(overriding the ``threads`` key).
"""
from __future__ import annotations

import argparse
import os
import sys

from .commands import run, write_outputs
from .config import COMMANDS, load_config
from .errors import ConfigError

THREADS_ENV = "SEAMLAB_THREADS"


def _parser():
    p = argparse.ArgumentParser(prog="seamlab", description="Batch verification and scan reports.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="configuration file")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key; may be repeated")
    return p


def _threads(cfg):
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return cfg["threads"]
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer", field=THREADS_ENV)
    return n


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=args.override, command=args.command)
        threads = _threads(cfg)
    except ConfigError as e:
        print(f"seamlab: {e}", file=sys.stderr)
        return 2
    env = run(cfg, out_dir=args.out, threads=threads)
    path = write_outputs(env, args.out)
    s = env.summary()
    print(f"{cfg.command}: {s['pass']} pass, {s['fail']} fail, {s['diagnostic']} diagnostic -> {path}")
    for r in env.records:
        if r.outcome == "fail":
            print(f"  fail: {r.name}" + (f" ({r.error})" if r.error else ""))
    return 0 if env.ok else 1


if __name__ == "__main__":
    sys.exit(main())
