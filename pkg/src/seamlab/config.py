"""Run configuration: a flat ``key = value`` file with ``[section]`` headers.

Keys before any header are top level; keys under ``[quadrature]`` become
``quadrature.<key>``.  Values are parsed as JSON where possible (numbers,
booleans, lists) and kept as strings otherwise.  ``--override key=value`` on
the command line uses the same value syntax.

Example::

    command = zeros
    [zeros]
    z_max = 22
"""
from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError

__all__ = ["COMMANDS", "RunConfig", "load_config", "parse_value"]

COMMANDS = ("verify-identities", "kernel-table", "ulclt", "zeros", "scan-rectangle", "seam-report")

_TOP = "__top__"


def _pos_float(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) and v > 0


def _real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _int_at_least(k):
    return lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= k


def _nonempty_reals(v):
    return isinstance(v, list) and len(v) > 0 and all(_real(x) for x in v)


def _nonempty_pos(v):
    return _nonempty_reals(v) and all(x > 0 for x in v)


def _nonempty_ints(k):
    return lambda v: isinstance(v, list) and len(v) > 0 and all(_int_at_least(k)(x) for x in v)


def _window(v):
    return isinstance(v, list) and len(v) == 2 and all(_pos_float(x) for x in v) and v[0] < v[1]


def _schedule(v):
    if not isinstance(v, list):
        return False
    for p in v:
        if not (isinstance(p, list) and len(p) == 2 and _pos_float(p[0]) and _int_at_least(3)(p[1])):
            return False
    return all(b[0] > a[0] and b[1] >= a[1] for a, b in zip(v, v[1:]))


def _increasing(v):
    return all(b > a for a, b in zip(v, v[1:]))


def _theta(v):
    return _pos_float(v) and v < math.pi / 2


# key -> (default, validator, description of the constraint)
SCHEMA = {
    "command": (None, lambda v: v in COMMANDS, f"one of {', '.join(COMMANDS)}"),
    "deterministic": (True, lambda v: isinstance(v, bool), "true or false"),
    "threads": (1, _int_at_least(1), "integer >= 1"),
    "quadrature.node_count": (64, _int_at_least(16), "integer >= 16"),
    "quadrature.target_tol": (1e-13, _pos_float, "positive number"),
    "quadrature.refinement_limit": (10, _int_at_least(1), "integer >= 1"),
    "truncation.tail_tol": (1e-17, _pos_float, "positive number"),
    "truncation.n_max": (400, _int_at_least(1), "integer >= 1"),
    "verify.z_values": ([0.0, 0.5, 1.0, 2.0, 5.0], _nonempty_reals, "non-empty list of reals"),
    "verify.zero_z": (7.0673627, _real, "real number"),
    "verify.mellin_rel_tol": (1e-8, _pos_float, "positive number"),
    "verify.zero_abs_tol": (1e-6, _pos_float, "positive number"),
    "verify.inversion_tol": (1e-12, _pos_float, "positive number"),
    "verify.u_grid": ([0.05, 20.0, 40], lambda v: isinstance(v, list) and len(v) == 3 and _pos_float(v[0])
                      and v[1] > v[0] and _int_at_least(2)(v[2]), "[u_min, u_max, points]"),
    "verify.mellin_A_points": ([[0.75, 0.0], [0.75, 1.0], [2.0, 0.0]],
                               lambda v: isinstance(v, list) and len(v) > 0
                               and all(isinstance(p, list) and len(p) == 2 and all(_real(x) for x in p) for p in v),
                               "non-empty list of [re, im]"),
    "verify.identity_tol": (1e-8, _pos_float, "positive number"),
    "verify.boundary_tol": (1e-12, _pos_float, "positive number"),
    "kernel.t_grid": ([0.01, 50.0, 64], lambda v: isinstance(v, list) and len(v) == 3 and _pos_float(v[0])
                      and v[1] > v[0] and _int_at_least(1)(v[2]), "[t_min, t_max, points]"),
    "kernel.x_grid": ([-4.0, 4.0, 33], lambda v: isinstance(v, list) and len(v) == 3 and _real(v[0])
                      and v[1] > v[0] and _int_at_least(1)(v[2]), "[x_min, x_max, points]"),
    "kernel.alpha_values": ([0, 2, 4], _nonempty_ints(0), "non-empty list of integers >= 0"),
    "ulclt.N_values": ([32, 64, 128, 256], _nonempty_ints(3), "non-empty list of integers >= 3"),
    "ulclt.t": (1.0, _pos_float, "positive number"),
    "ulclt.window": ([0.5, 2.0], _window, "[t0, t1] with 0 < t0 < t1"),
    "ulclt.spread_max": (3.0, _pos_float, "positive number"),
    "ulclt.poisson_tol": (1e-13, _pos_float, "positive number"),
    "ulclt.trace_N": ([64, 128, 256], _nonempty_ints(3), "non-empty list of integers >= 3"),
    "ulclt.rate_range": ([-1.5, -0.5], lambda v: _nonempty_reals(v) and len(v) == 2 and v[0] < v[1], "[lo, hi]"),
    "zeros.z_max": (22.0, _pos_float, "positive number"),
    "zeros.tol": (1e-10, _pos_float, "positive number"),
    "zeros.N_values": ([7, 8, 16, 32, 64], _nonempty_ints(3), "non-empty list of integers >= 3"),
    "scan.T": ([2.0, 4.0, 8.0], lambda v: _nonempty_pos(v) and _increasing(v), "non-empty increasing list of positive reals"),
    "scan.N": ([], lambda v: isinstance(v, list) and all(_int_at_least(3)(x) for x in v)
               and all(b >= a for a, b in zip(v, v[1:])), "list of integers >= 3, non-decreasing"),
    "scan.schedule": ([], _schedule, "list of [T, N] pairs increasing in T, non-decreasing in N"),
    "scan.eta": (0.2, _pos_float, "positive number"),
    "scan.theta": (math.pi / 4, _theta, "number in (0, pi/2)"),
    "scan.samples": (256, _int_at_least(256), "integer >= 256"),
    "scan.unit": ("bridge", lambda v: v in ("bridge", "one"), "'bridge' or 'one'"),
    "scan.export_trace": (True, lambda v: isinstance(v, bool), "true or false"),
    "seam.z_values": ([0.0, 1.0, 2.0], _nonempty_reals, "non-empty list of reals"),
    "seam.bridge_points": ([[0.0, 0.0], [0.0, 0.3], [1.0, 0.2]],
                           lambda v: isinstance(v, list) and len(v) > 0
                           and all(isinstance(p, list) and len(p) == 2 and all(_real(x) for x in p) and abs(p[1]) < 0.5
                                   for p in v), "non-empty list of [re, im] with |im| < 1/2"),
    "seam.twist_x": ([0.5, 1.0, 1.5, 2.0, 2.5, 3.0], lambda v: _nonempty_pos(v), "non-empty list of positive reals"),
    "seam.twist_beta_formal": (-0.5, _real, "real number"),
    "seam.twist_tol": (1e-6, _pos_float, "positive number"),
    "seam.sig_digits": (3, _int_at_least(1), "integer >= 1"),
    "seam.rl_re": ([25.0, 50.0, 100.0], lambda v: _nonempty_pos(v) and _increasing(v), "increasing positive list"),
    "seam.rl_im": ([-0.4, 0.0, 0.4], lambda v: _nonempty_reals(v) and all(abs(x) < 0.5 for x in v),
                   "non-empty list with |value| < 1/2"),
}


def parse_value(text):
    """JSON value if it parses, else the stripped string (``true``/``false`` are booleans)."""
    text = text.strip()
    try:
        return json.loads(text)
    except ValueError:
        low = text.lower()
        if low in ("true", "yes", "on"):
            return True
        if low in ("false", "no", "off"):
            return False
        return text


@dataclass
class RunConfig:
    """Validated configuration with per-key source line numbers."""

    values: dict
    lines: dict = field(default_factory=dict)
    source: str | None = None

    @property
    def command(self):
        return self.values["command"]

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def echo(self):
        """Sorted key/value mapping, as written into reports."""
        return {k: self.values[k] for k in sorted(self.values)}


def _read(text):
    parser = configparser.ConfigParser(interpolation=None, strict=True, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string(f"[{_TOP}]\n" + text)
    except configparser.DuplicateOptionError as e:
        raise ConfigError("duplicate key", field=e.option, line=(e.lineno or 1) - 1) from None
    except configparser.Error as e:
        line = getattr(e, "lineno", None)
        raise ConfigError(f"malformed configuration: {e.message.splitlines()[0]}",
                          line=None if line is None else line - 1) from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = key if section == _TOP else f"{section}.{key}"
            values[name] = parse_value(raw)
    return values, _line_numbers(text)


def _line_numbers(text):
    lines = {}
    section = None
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            continue
        if "=" in s:
            key = s.split("=", 1)[0].strip()
            lines[key if section is None else f"{section}.{key}"] = i
    return lines


def load_config(path=None, text=None, overrides=(), command=None):
    """Read, merge and validate a configuration.

    Parameters
    ----------
    path : str, optional
        Configuration file.
    text : str, optional
        Configuration text (instead of ``path``).
    overrides : iterable of str
        ``key=value`` items applied after the file.
    command : str, optional
        Command given on the command line; must agree with the file if both set.

    Raises
    ------
    ConfigError
        With the offending field and, when known, its line.
    """
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read configuration: {e.strerror}", field=str(path)) from None
    values, lines = _read(text or "")
    for item in overrides:
        if "=" not in item:
            raise ConfigError("override must be key=value", field=item)
        key, raw = item.split("=", 1)
        values[key.strip()] = parse_value(raw)
        lines.pop(key.strip(), None)
    if command is not None:
        if "command" in values and values["command"] != command:
            raise ConfigError(f"command {values['command']!r} in file conflicts with {command!r}",
                              field="command", line=lines.get("command"))
        values["command"] = command
    for key in values:
        if key not in SCHEMA:
            raise ConfigError("unknown key", field=key, line=lines.get(key))
    merged = {}
    for key, (default, check, desc) in SCHEMA.items():
        v = values.get(key, default)
        if key == "command" and v is None:
            raise ConfigError("missing command", field="command")
        if isinstance(default, float) and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        if not check(v):
            if isinstance(v, list) and not v:
                raise ConfigError(f"empty grid; expected {desc}", field=key, line=lines.get(key))
            raise ConfigError(f"invalid value {v!r}; expected {desc}", field=key, line=lines.get(key))
        merged[key] = v
    return RunConfig(merged, lines, None if path is None else str(path))
