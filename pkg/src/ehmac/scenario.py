"""JSON scenario files.

A scenario fixes the arrival model, battery caps, per-user policies and
estimator settings::

    {
      "users": 2,
      "caps": [1, 1],
      "arrivals": {"type": "product", "pmf": [{"0": 0.5, "1": 0.5}, {"0": 0.5, "1": 0.5}]},
      "policy": {"variant": "fixed_fraction"},
      "horizon": 8,
      "estimator": {"method": "exact", "paths": 2000, "seed": 7}
    }

``arrivals.type`` is ``product`` (one pmf per user), ``correlated`` (one
shared pmf, identical caps) or ``joint`` (rows ``[[e_1, ..., e_K], p]``).
A pmf is either ``{"value": prob}`` or ``[[value, prob], ...]``.
``policies`` (a list, one per user) may replace ``policy``. Optional
``region`` (``{"kind": ..., "gamma": ...}``) and ``gap_sweep``
(``{"gamma": 1.77, "meanE": 1, "K": "1:1024:geometric"}``) blocks
supply defaults for the ``region`` and ``gap-sweep`` commands.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .arrivals import ArrivalModel, build_fully_correlated, build_iid_product, build_joint
from .errors import ScenarioError
from .policies import PolicySpec

REGION_KINDS = ("outer", "throughput", "inner_txrx", "inner_tx", "shifted")


@dataclass
class Scenario:
    model: ArrivalModel
    policies: list
    horizon: int = 8
    method: str = "exact"
    paths: int = 2000
    seed: int | None = None
    region: dict = field(default_factory=lambda: {"kind": "inner_txrx"})
    sweep: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def K(self) -> int:
        return self.model.K


def _pmf(node, path):
    if isinstance(node, dict):
        try:
            return {float(k): float(v) for k, v in node.items()}
        except (TypeError, ValueError) as exc:
            raise ScenarioError(path, f"pmf keys and values must be numbers ({exc})") from None
    if isinstance(node, list):
        out = []
        for j, pair in enumerate(node):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ScenarioError(f"{path}[{j}]", "expected [value, prob]")
            out.append((float(pair[0]), float(pair[1])))
        return out
    raise ScenarioError(path, "pmf must be an object or a list of [value, prob]")


def parse_policy(node, path="$.policy") -> PolicySpec:
    if not isinstance(node, dict) or "variant" not in node:
        raise ScenarioError(path, "policy needs a 'variant'")
    v = node["variant"]
    try:
        if v == "fixed_fraction":
            return PolicySpec.fixed_fraction(node.get("q"))
        if v == "constant":
            return PolicySpec.constant(node["c"])
        if v == "greedy":
            return PolicySpec.greedy()
        if v == "quantized_fixed_fraction":
            return PolicySpec.quantized_fixed_fraction(node["levels"], node.get("q"))
        if v == "table":
            return PolicySpec.table(node["grid"], node["spends"])
    except KeyError as exc:
        raise ScenarioError(path, f"missing field {exc}") from None
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None
    raise ScenarioError(f"{path}.variant", f"unknown or non-serializable variant {v!r}")


def parse_arrivals(node, K, caps, path="$.arrivals") -> ArrivalModel:
    if not isinstance(node, dict):
        raise ScenarioError(path, "expected an object")
    kind = node.get("type")
    pmf = node.get("pmf")
    if pmf is None:
        raise ScenarioError(f"{path}.pmf", "missing")
    try:
        if kind == "product":
            if not isinstance(pmf, list) or len(pmf) != K:
                raise ScenarioError(f"{path}.pmf", f"expected a list of {K} per-user pmfs")
            return build_iid_product([_pmf(m, f"{path}.pmf[{i}]") for i, m in enumerate(pmf)], caps)
        if kind == "correlated":
            if len(set(caps)) != 1:
                raise ScenarioError("$.caps", "fully correlated arrivals need identical caps")
            return build_fully_correlated(_pmf(pmf, f"{path}.pmf"), K, caps[0])
        if kind == "joint":
            rows, probs = [], []
            for j, row in enumerate(pmf):
                if not (isinstance(row, list) and len(row) == 2 and len(row[0]) == K):
                    raise ScenarioError(f"{path}.pmf[{j}]", f"expected [[e_1..e_{K}], prob]")
                rows.append(row[0])
                probs.append(row[1])
            return build_joint(rows, probs, caps)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{path}.pmf", str(exc)) from None
    raise ScenarioError(f"{path}.type", f"expected product|correlated|joint, got {kind!r}")


def parse_scenario(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    K = raw.get("users")
    if not isinstance(K, int) or K < 1:
        raise ScenarioError("$.users", "must be a positive integer")
    caps = raw.get("caps")
    if not isinstance(caps, list) or len(caps) != K:
        raise ScenarioError("$.caps", f"expected a list of {K} capacities")
    caps = [float(c) for c in caps]
    model = parse_arrivals(raw.get("arrivals"), K, caps)
    if "policies" in raw:
        nodes = raw["policies"]
        if not isinstance(nodes, list) or len(nodes) != K:
            raise ScenarioError("$.policies", f"expected a list of {K} policies")
        policies = [parse_policy(p, f"$.policies[{i}]") for i, p in enumerate(nodes)]
    else:
        policies = [parse_policy(raw.get("policy", {"variant": "fixed_fraction"}))] * K
    horizon = raw.get("horizon", 8)
    if not isinstance(horizon, int) or horizon < 1:
        raise ScenarioError("$.horizon", "must be a positive integer")
    est = raw.get("estimator", {})
    if not isinstance(est, dict):
        raise ScenarioError("$.estimator", "expected an object")
    method = est.get("method", "exact")
    if method not in ("exact", "mc"):
        raise ScenarioError("$.estimator.method", "expected exact|mc")
    seed = est.get("seed")
    if method == "mc" and seed is None:
        raise ScenarioError("$.estimator.seed", "a seed is mandatory for Monte Carlo runs")
    paths = est.get("paths", 2000)
    if not isinstance(paths, int) or paths < 2:
        raise ScenarioError("$.estimator.paths", "must be an integer >= 2")
    region = raw.get("region", {"kind": "inner_txrx"})
    if not isinstance(region, dict) or region.get("kind", "inner_txrx") not in REGION_KINDS:
        raise ScenarioError("$.region.kind", f"expected one of {', '.join(REGION_KINDS)}")
    sweep = raw.get("gap_sweep", {})
    if not isinstance(sweep, dict):
        raise ScenarioError("$.gap_sweep", "expected an object")
    return Scenario(model, policies, horizon, method, paths, seed, region, sweep, raw)


def load_scenario(source) -> Scenario:
    """Parse a scenario from a path, a JSON string, or an already-loaded dict."""
    if isinstance(source, dict):
        return parse_scenario(source)
    text = Path(source).read_text() if Path(str(source)).exists() else str(source)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("$", f"invalid JSON ({exc})") from None
    return parse_scenario(raw)


def default_scenario() -> Scenario:
    text = resources.files("ehmac").joinpath("data/default_scenario.json").read_text()
    return parse_scenario(json.loads(text))
