"""Declarative run configuration files (YAML; JSON is a YAML subset).

A config file is a mapping with a mandatory ``schema_version: 1`` and any of
the sections below.  Unknown sections or keys are rejected.  Command-line
flags override file values; built-in defaults fill the rest (defaults are
listed in the CLI ``--help`` output and the README).

Sections and keys:
    generator:  k, d, n, seed
    fit:        mode, k, beta0, gamma0, tau, beta_fixed, max_iters, tol,
                seed, policy, eps_cov
    benchmark:  modes, trials, threshold, seed, jobs, k, max_iters, tol,
                beta0, gamma0, tau
    landscape:  axis1, axis2, min1, max1, min2, max2, steps, beta, gamma
    trotter:    k, beta, gamma, seed, m_values
"""

from __future__ import annotations

import yaml

from .errors import ConfigError

SCHEMA_VERSION = 1

_SECTION_KEYS = {
    "generator": {"k", "d", "n", "seed"},
    "fit": {"mode", "k", "beta0", "gamma0", "tau", "beta_fixed",
            "max_iters", "tol", "seed", "policy", "eps_cov"},
    "benchmark": {"modes", "trials", "threshold", "seed", "jobs", "k",
                  "max_iters", "tol", "beta0", "gamma0", "tau"},
    "landscape": {"axis1", "axis2", "min1", "max1", "min2", "max2",
                  "steps", "beta", "gamma"},
    "trotter": {"k", "beta", "gamma", "seed", "m_values"},
}


def load_config(path) -> dict:
    """Parse and validate a run-configuration file."""
    try:
        with open(path) as fh:
            payload = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    if payload is None:
        payload = {}
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    version = payload.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    for section, body in payload.items():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"{path}: unknown section {section!r}")
        if body is None:
            payload[section] = {}
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"{path}: section {section!r} must be a mapping")
        unknown = set(body) - _SECTION_KEYS[section]
        if unknown:
            raise ConfigError(
                f"{path}: unknown keys in {section!r}: {sorted(unknown)}"
            )
    return payload


def section(config: dict | None, name: str) -> dict:
    if not config:
        return {}
    return config.get(name, {}) or {}
