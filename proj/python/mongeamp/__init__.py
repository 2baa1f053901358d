"""Local Nash-Moser solver for degenerate Monge-Ampere equations."""

import json

from . import _mongeamp as _core
from ._mongeamp import (
    canonical_config,
    cli,
    delta,
    energy_constants,
    graph_curvature,
    limit_factor,
    mollify,
    mu_n,
    read_field,
    smoothing_rate_slope,
    tame_constant,
    write_field,
)

__all__ = [
    "canonical_config",
    "cli",
    "delta",
    "energy_constants",
    "graph_curvature",
    "limit_factor",
    "mollify",
    "mu_n",
    "read_field",
    "run",
    "smoothing_rate_slope",
    "solve",
    "tame_constant",
    "verify",
    "write_field",
]


def _config_text(config=None, **overrides):
    lines = [config or ""]
    for key, value in overrides.items():
        if isinstance(value, (list, tuple)):
            value = ", ".join(repr(float(v)) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def run(config=None, **overrides):
    """Solve in memory. Keyword overrides use the config keys."""
    r = _core.run(_config_text(config, **overrides))
    r["log"] = [json.loads(line) for line in r["log"]]
    if "verification" in r:
        r["verification"] = json.loads(r["verification"])
    return r


def solve(out_dir, config=None, **overrides):
    """Solve and write artifacts into out_dir; returns (exit code, report)."""
    code, report = _core.solve(_config_text(config, **overrides), str(out_dir))
    return code, json.loads(report)


def verify(out_dir):
    """Re-verify a saved run."""
    return json.loads(_core.verify(str(out_dir)))
