import csv
import io
import json

import numpy as np
import pytest

from ehmac.cli import main, parse_k_range
from ehmac.errors import ScenarioError
from ehmac.scenario import default_scenario, load_scenario

BERNOULLI_K1 = {
    "users": 1,
    "caps": [1],
    "arrivals": {"type": "product", "pmf": [{"0": 0.5, "1": 0.5}]},
    "policy": {"variant": "fixed_fraction"},
    "horizon": 12,
    "estimator": {"method": "exact", "paths": 20000, "seed": 99},
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def scen(tmp_path):
    def write(obj, name="s.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return write


def test_default_scenario_parses():
    sc = default_scenario()
    assert sc.K == 2 and sc.horizon == 8 and sc.seed is not None


@pytest.mark.parametrize("mutate, path", [
    (lambda s: s.update(users=0), "$.users"),
    (lambda s: s.update(caps=[1, 1]), "$.caps"),
    (lambda s: s["arrivals"].update(type="markov"), "$.arrivals.type"),
    (lambda s: s["arrivals"].update(pmf=[{"0": 0.5, "x": 0.5}]), "$.arrivals.pmf[0]"),
    (lambda s: s["arrivals"].update(pmf=[{"0": 0.5, "1": 0.6}]), "$.arrivals.pmf"),
    (lambda s: s.update(policy={"variant": "constant"}), "$.policy"),
    (lambda s: s.update(policy={"variant": "oracle"}), "$.policy.variant"),
    (lambda s: s.update(horizon=-2), "$.horizon"),
    (lambda s: s.update(estimator={"method": "mc"}), "$.estimator.seed"),
    (lambda s: s.update(policies=[{"variant": "greedy"}, {"variant": "greedy"}]), "$.policies"),
])
def test_scenario_errors_name_json_path(mutate, path):
    raw = json.loads(json.dumps(BERNOULLI_K1))
    mutate(raw)
    with pytest.raises(ScenarioError) as exc:
        load_scenario(raw)
    assert exc.value.path == path


def test_scenario_variants():
    sc = load_scenario({
        "users": 2, "caps": [2, 2],
        "arrivals": {"type": "correlated", "pmf": [[0, 0.5], [2, 0.5]]},
        "policies": [{"variant": "greedy"}, {"variant": "table", "grid": [0, 1], "spends": [0, 1]}],
    })
    assert sc.model.support.tolist() == [[0, 0], [2, 2]]
    assert sc.policies[1].variant == "table"
    joint = load_scenario({
        "users": 2, "caps": [1, 1],
        "arrivals": {"type": "joint", "pmf": [[[0, 1], 0.5], [[1, 0], 0.5]]},
    })
    np.testing.assert_allclose(joint.model.means, [0.5, 0.5])


def test_invalid_json_is_config_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = run(capsys, "throughput", "--scenario", str(p))
    assert code == 1 and "$" in err


def test_usage_error_exit_one(capsys):
    assert run(capsys, "throughput", "--n", "abc")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "gap-sweep", "--K", "1:10:spiral")[0] == 1
    assert run(capsys, "throughput", "--subset", "3")[0] == 1


def test_mc_without_seed_is_config_error(scen, capsys):
    raw = dict(BERNOULLI_K1, estimator={"method": "exact"})
    code, _, err = run(capsys, "throughput", "--scenario", scen(raw), "--method", "mc")
    assert code == 1 and "seed" in err


def test_verify_default_passes(capsys):
    code, out, err = run(capsys, "verify")
    assert code == 0
    assert all(r["result"] == "pass" for r in rows(out))
    assert "PASS" in err and "FAIL" not in err


def test_verify_failure_exit_two(scen, capsys):
    raw = dict(BERNOULLI_K1, policy={"variant": "table", "grid": [0], "spends": [0.7]}, horizon=4)
    code, out, _ = run(capsys, "verify", "--scenario", scen(raw))
    assert code == 2
    failed = {r["check"] for r in rows(out) if r["result"] == "fail"}
    assert "policies_admissible" in failed


def test_gap_sweep_relative_decreasing(capsys):
    code, out, _ = run(capsys, "gap-sweep", "--gamma", "1.77", "--meanE", "1", "--K", "1:1024:geometric")
    assert code == 0
    data = rows(out)
    assert [int(r["K"]) for r in data] == [2 ** k for k in range(11)]
    rel = [float(r["relative"]) for r in data]
    assert all(b < a for a, b in zip(rel, rel[1:]))
    assert rel[-1] == pytest.approx(0.354, abs=1e-3)


def test_parse_k_range():
    assert parse_k_range("1:16:geometric") == [1, 2, 4, 8, 16]
    assert parse_k_range("3:7:linear:2") == [3, 5, 7]
    assert parse_k_range("5,1,9") == [5, 1, 9]


def test_exact_and_mc_agree_on_bernoulli(scen, capsys):
    path = scen(BERNOULLI_K1)
    _, out_e, _ = run(capsys, "throughput", "--scenario", path, "--subset", "1", "--n", "12", "--method", "exact")
    _, out_m, _ = run(capsys, "throughput", "--scenario", path, "--subset", "1", "--n", "12",
                      "--method", "mc", "--paths", "20000", "--seed", "5")
    (e,), (m,) = rows(out_e), rows(out_m)
    assert e["subset"] == "1" and e["method"] == "exact" and float(e["half_width"]) == 0
    se = float(m["half_width"]) / 1.96
    assert abs(float(m["value"]) - float(e["value"])) <= 3 * se


def test_throughput_all_subsets_header(capsys):
    code, out, _ = run(capsys, "throughput", "--subset", "all")
    assert code == 0
    assert out.splitlines()[0] == "subset,n,method,value,half_width"
    assert [r["subset"] for r in rows(out)] == ["1", "2", "1 2"]


def test_region_output_and_sidecar(tmp_path, capsys):
    out = tmp_path / "region.csv"
    code, _, _ = run(capsys, "region", "--kind", "outer", "--out", str(out))
    assert code == 0
    data = rows(out.read_text())
    assert [int(r["subset_mask"]) for r in data] == [0, 1, 2, 3]
    meta = json.loads((tmp_path / "region.csv.meta.json").read_text())
    assert meta["command"] == "region" and meta["version"] and "elapsed_seconds" in meta
    assert meta["result"]["is_polymatroid"] is True


def test_region_clamp_flag(tmp_path, capsys):
    run(capsys, "region", "--kind", "inner_txrx", "--out", str(tmp_path))
    meta = json.loads((tmp_path / "region.csv.meta.json").read_text())
    assert meta["result"]["clamped"] is True


def test_mi_check(capsys):
    code, out, _ = run(capsys, "mi-check", "--powers", "0.25,1,4,16")
    assert code == 0
    for r in rows(out):
        assert float(r["epi_floor"]) - 1e-4 <= float(r["mi"]) <= float(r["gauss_ceiling"]) + 1e-4


def test_entropy_command(scen, capsys):
    raw = dict(BERNOULLI_K1, policy={"variant": "greedy"})
    code, out, _ = run(capsys, "entropy", "--scenario", scen(raw), "--n", "8")
    assert code == 0
    data = rows(out)
    assert [int(r["n"]) for r in data] == list(range(1, 9))
    assert all(float(r["entropy_rate"]) == pytest.approx(1.0) for r in data)


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "5", "--seed", "1")
    assert code == 0
    assert out.splitlines()[0] == "t,user,arrival,level,spend"
    assert len(out.splitlines()) == 11


@pytest.mark.parametrize("argv", [
    ["simulate", "--n", "30", "--seed", "4"],
    ["throughput", "--method", "mc", "--paths", "500", "--seed", "4", "--subset", "all"],
    ["region", "--kind", "inner_tx"],
    ["entropy", "--n", "5"],
])
def test_outputs_byte_identical(tmp_path, capsys, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *argv, "--out", str(a))[0] == 0
    assert run(capsys, *argv, "--out", str(b), "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
