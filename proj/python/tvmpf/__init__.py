"""SBS time-varying microwave photonic filter simulator.

Thin wrapper over the C++ core. Configs are plain dicts with the same
layout as the JSON config files accepted by the ``tvmpf`` command.
"""

import json

from . import _core
from ._core import ConfigError, TvmpfError, __version__

__all__ = ["run", "synthesize", "scan_passband", "resolve_config", "mse", "ConfigError", "TvmpfError"]


def _dump(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def run(config=None):
    """Run one experiment. Returns a dict with numpy waveforms and MSE values."""
    out = _core.run(_dump(config))
    out["config"] = json.loads(out["config"])
    return out


def synthesize(config=None):
    """Return (samples, track) where track is a list of per-sample frequency arrays."""
    return _core.synthesize(_dump(config))


def scan_passband(f_ctrl, config=None):
    return _core.scan_passband(float(f_ctrl), _dump(config))


def resolve_config(config=None):
    """Fully resolved config with every default filled in."""
    return json.loads(_core.resolve_config(_dump(config)))


def mse(candidate, reference, sample_rate=64e9, max_lag=None):
    return _core.mse(candidate, reference, sample_rate, max_lag)
