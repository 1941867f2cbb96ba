"""Scenario library: named configurations plus the contracts they must satisfy.

Scenarios are JSON files shipped in ``mixedhk/scenarios/``. A ``simulation``
scenario holds a world config, per-step contracts (see ``monitors``) and
whole-trajectory checks; a ``randomized`` scenario names a suite from
``suites`` and its parameters.
"""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from . import monitors as mon
from . import suites
from .engine import ConfigError, Trace, WorldConfig, run

CHECKS = ("targets_constant", "series_monotone", "series_bounds", "final_monitor_below")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    description: str
    kind: str = "simulation"
    config: Mapping | None = None
    contracts: tuple[str, ...] = ()
    checks: tuple[Mapping, ...] = ()
    delta: float | None = None
    suite: str | None = None
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "simulation":
            if self.config is None:
                raise ConfigError(f"scenario {self.name!r} has no config")
            bad = set(self.contracts) - set(mon.CONTRACTS)
            if bad:
                raise ConfigError(f"scenario {self.name!r}: unknown contracts {sorted(bad)}")
            for c in self.checks:
                if c.get("check") not in CHECKS:
                    raise ConfigError(f"scenario {self.name!r}: unknown check {c.get('check')!r}")
        elif self.kind == "randomized":
            if self.suite not in suites.SUITES:
                raise ConfigError(f"scenario {self.name!r}: unknown suite {self.suite!r}")
        else:
            raise ConfigError(f"scenario {self.name!r}: unknown kind {self.kind!r}")

    @classmethod
    def from_dict(cls, d: Mapping) -> Scenario:
        try:
            return cls(
                name=d["name"],
                description=d.get("description", ""),
                kind=d.get("kind", "simulation"),
                config=d.get("config"),
                contracts=tuple(d.get("contracts", ())),
                checks=tuple(d.get("checks", ())),
                delta=d.get("delta"),
                suite=d.get("suite"),
                params=dict(d.get("params", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad scenario: {exc!r}") from exc

    def world(self, steps: int | None = None, seed: int | None = None) -> WorldConfig:
        cfg = WorldConfig.from_dict(self.config)
        kw = {}
        if steps is not None:
            kw["horizon"] = steps
        if seed is not None:
            kw["seed"] = seed
        monitors = set(cfg.monitors) | {c["monitor"] for c in self.checks if c["check"] == "final_monitor_below"}
        kw["monitors"] = tuple(m for m in mon.MONITORS if m in monitors)
        try:
            return cfg.replace(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def load_scenario_file(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    return Scenario.from_dict(data)


def library() -> dict[str, Scenario]:
    """All shipped scenarios by name."""
    out = {}
    for entry in sorted(resources.files("mixedhk").joinpath("scenarios").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            sc = Scenario.from_dict(json.loads(entry.read_text()))
            if sc.name in out:
                raise ConfigError(f"duplicate scenario name {sc.name!r}")
            out[sc.name] = sc
    return out


def get_scenario(name: str) -> Scenario:
    lib = library()
    if name not in lib:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(lib)}")
    return lib[name]


# --- evaluation -----------------------------------------------------------------


def _common_alpha(alpha: np.ndarray | None) -> float | None:
    if alpha is None or alpha.size == 0:
        return None
    a = float(alpha[0])
    return a if np.all(alpha == a) else None


def _run_contracts(cfg: WorldConfig, contracts, delta) -> tuple[Trace, list[dict]]:
    results: list[dict] = []
    ctx = mon.StepContext(cfg.graph, cfg.epsilon, contracts, mode=cfg.mode, delta=delta)

    def observe(prev, nxt):
        ctx.t = prev.t
        ctx.alpha = _common_alpha(nxt.last_alpha)
        ctx.valid_before = prev.valid_vertices()
        ctx.valid_after = nxt.valid_vertices()
        if "regular_bound" in contracts and ctx.alpha is None:
            raise mon.ContractError("regular_bound needs the same alpha_t at every vertex")
        results.extend(mon.check_step_contracts(prev.state, nxt.state, ctx))

    tr = run(cfg, observer=observe if contracts else None, record_draws=False)
    return tr, results


def _entry(name: str, t: int, ok: bool, detail: str) -> dict:
    return {"contract": name, "t": t, "pass": bool(ok), "detail": detail}


def _first_bad_t(bad: np.ndarray) -> int:
    return int(np.flatnonzero(bad)[0])


def _trajectory_check(tr: Trace, check: Mapping) -> dict:
    kind = check["check"]
    name = f"check:{kind}"
    T = len(tr) - 1
    if kind == "targets_constant":
        bad = np.any(tr.x != tr.x[0], axis=(1, 2))
        if bad.any():
            return _entry(name, _first_bad_t(bad), False, "target opinions left their initial values")
        return _entry(name, T, True, "all target opinions equal their initial values")
    if kind == "series_monotone":
        v, direction = int(check["vertex"]), check["direction"]
        if v not in tr.targets:
            raise ConfigError(f"check vertex {v} is not a target")
        s = tr.series(v)
        diff = np.diff(s, axis=0)
        bad = np.any(diff > 0 if direction == "nonincreasing" else diff < 0, axis=1)
        if bad.any():
            return _entry(name, _first_bad_t(bad), False, f"x_{v} is not {direction}")
        return _entry(name, T, True, f"x_{v} {direction}, final {s[-1].tolist()!r}")
    if kind == "series_bounds":
        lo, hi = float(check["low"]), float(check["high"])
        bad = np.any((tr.x < lo) | (tr.x > hi), axis=(1, 2))
        if bad.any():
            return _entry(name, _first_bad_t(bad), False, f"target opinion outside [{lo}, {hi}]")
        return _entry(name, T, True, f"target opinions within [{lo}, {hi}]")
    if kind == "final_monitor_below":
        ts, vals = tr.monitor(check["monitor"])
        ok = bool(vals[-1] < float(check["value"]))
        return _entry(name, int(ts[-1]), ok, f"{check['monitor']}={vals[-1]!r} vs {check['value']!r}")
    raise ConfigError(f"unknown check {kind!r}")


def _summarize(results: list[dict]) -> list[dict]:
    by_name: dict[str, dict] = {}
    for r in results:
        s = by_name.setdefault(r["contract"], {"contract": r["contract"], "evaluated": 0, "failures": 0, "vacuous": 0, "first_failure": None})
        s["evaluated"] += 1
        if r["detail"].startswith("hypothesis not met"):
            s["vacuous"] += 1
        if not r["pass"]:
            s["failures"] += 1
            if s["first_failure"] is None:
                s["first_failure"] = r
    return list(by_name.values())


def _suite_kwargs(fn, params: Mapping, steps, seed, trials) -> dict:
    accepted = inspect.signature(fn).parameters
    kw = {k: v for k, v in params.items() if k in accepted}
    for key, val in (("steps", steps), ("seed", seed), ("trials", trials)):
        if val is not None and key in accepted:
            kw[key] = val
    return kw


def check_scenario(sc: Scenario, steps: int | None = None, seed: int | None = None, trials: int | None = None) -> dict:
    """Run a scenario and evaluate everything it declares.

    The report's ``first_failure`` is ``None`` or ``{"contract", "t"}`` of the
    earliest failing step contract or check.
    """
    if sc.kind == "randomized":
        fn = suites.SUITES[sc.suite]
        res = fn(**_suite_kwargs(fn, sc.params, steps, seed, trials))
        first = None
        if res.failures:
            first = {"contract": sc.suite, "t": res.failures[0].get("t"), "detail": res.failures[0]}
        return {"scenario": sc.name, "kind": sc.kind, "pass": res.passed, "first_failure": first, "suite": res.to_dict()}

    cfg = sc.world(steps, seed)
    tr, results = _run_contracts(cfg, sc.contracts, sc.delta)
    results += [_trajectory_check(tr, c) for c in sc.checks]
    failing = sorted((r for r in results if not r["pass"]), key=lambda r: r["t"])
    first = {"contract": failing[0]["contract"], "t": failing[0]["t"]} if failing else None
    return {
        "scenario": sc.name,
        "kind": sc.kind,
        "pass": not failing,
        "first_failure": first,
        "config": cfg.to_dict(),
        "summary": _summarize(results),
        "results": results,
    }
