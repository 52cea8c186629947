"""Python access to the complex conductivity laboratory.

Scenarios and reports are plain dicts following the JSON schema used by the
command line tool.
"""

import json

from . import _core

__all__ = [
    "CclabError",
    "forward",
    "generate",
    "calibrate",
    "estimate_size",
    "tau",
    "three_ball",
    "smallness",
    "scenario_hash",
]


class CclabError(RuntimeError):
    """Error raised by the core; ``code`` is the machine-readable reason."""

    def __init__(self, message):
        code, _, detail = str(message).partition(": ")
        super().__init__(str(message))
        self.code = code
        self.detail = detail


def _call(fn, *args):
    try:
        return fn(*args)
    except _core.CoreError as e:
        raise CclabError(e) from None


def forward(scenario):
    """Solve background and perturbed problems; returns the power report and nodal values."""
    out = json.loads(_call(_core.forward, json.dumps(scenario)))
    out["u0"] = [complex(re, im) for re, im in out["u0"]]
    out["u1"] = [complex(re, im) for re, im in out["u1"]]
    return out


def generate(seed, count, ranges=None):
    return json.loads(_call(_core.generate, seed, count, json.dumps(ranges or {})))


def calibrate(scenarios, threads=1):
    return json.loads(_call(_core.calibrate, json.dumps(scenarios), threads))


def estimate_size(re_dw, re_w0, k1, k2):
    return json.loads(_call(_core.estimate_size, re_dw, re_w0, k1, k2))


def tau(r0, r1, r2, lam=1.0, s=2.0):
    return _call(_core.tau, r0, r1, r2, lam, s)


def three_ball(scenario, center, r0, r1, r2, s=0.0):
    return json.loads(_call(_core.three_ball, json.dumps(scenario), tuple(center), r0, r1, r2, s))


def smallness(scenario, rho, grid=9):
    return json.loads(_call(_core.smallness, json.dumps(scenario), rho, grid))


def scenario_hash(scenario):
    return _call(_core.scenario_hash, json.dumps(scenario))
