"""Batch front end: ``ehmac <command> [options]``.

Every command writes CSV to ``--out`` (a ``.csv`` file, or a directory
that receives ``<command>.csv``) or to stdout, plus a JSON sidecar
``<file>.meta.json`` next to file outputs. Exit status: 0 on success,
1 on usage or configuration errors, 2 when ``verify`` finds a failing
invariant. Users and subsets are 1-based on the command line.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path

from . import __version__, regions
from .errors import (
    AdmissibilityError,
    EnumerationBudgetError,
    PolymatroidError,
    QuadratureError,
    ScenarioError,
)
from .gaussmi import epi_lower_bound, gaussian_ceiling, sum_uniform_awgn_mi
from .policies import exact_output_entropy, output_entropy_profile
from .scenario import REGION_KINDS, default_scenario, load_scenario
from .throughput import exact_throughput, mc_throughput, throughput_set_function
from .battery import simulate_trajectory
from .verify import format_table, run_suite


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _num(x: float) -> str:
    return repr(float(x))


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def parse_float_list(text: str) -> list[float]:
    try:
        out = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if not out:
        raise UsageError("empty list")
    return out


def parse_k_range(text: str) -> list[int]:
    """``lo:hi:geometric[:ratio]``, ``lo:hi:linear[:step]`` or ``a,b,c``."""
    text = str(text)
    if ":" not in text:
        ks = parse_int_list(text)
    else:
        parts = text.split(":")
        if len(parts) not in (3, 4) or parts[2] not in ("geometric", "linear"):
            raise UsageError(f"bad K range {text!r}; use lo:hi:geometric or lo:hi:linear")
        try:
            lo, hi = int(parts[0]), int(parts[1])
            step = int(parts[3]) if len(parts) == 4 else (2 if parts[2] == "geometric" else 1)
        except ValueError:
            raise UsageError(f"bad K range {text!r}") from None
        if lo < 1 or hi < lo or step < (2 if parts[2] == "geometric" else 1):
            raise UsageError(f"bad K range {text!r}")
        ks, k = [], lo
        while k <= hi:
            ks.append(k)
            k = k * step if parts[2] == "geometric" else k + step
    if not ks or min(ks) < 1:
        raise UsageError("K values must be positive")
    return ks


def parse_subsets(text, K) -> list[int]:
    """1-based comma list to a bitmask; ``all`` gives every nonempty subset."""
    if text is None:
        return [(1 << K) - 1]
    if text == "all":
        return list(range(1, 1 << K))
    users = parse_int_list(text)
    if not users or any(u < 1 or u > K for u in users):
        raise UsageError(f"subset users must lie in 1..{K}")
    return [regions.mask_of(u - 1 for u in users)]


def _subset_label(mask, K):
    return " ".join(str(i + 1) for i in regions.members(mask, K))


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _scenario(args):
    if args.scenario is None:
        return default_scenario()
    return load_scenario(Path(args.scenario))


def _seed(args, sc):
    return args.seed if args.seed is not None else sc.seed


# ---- commands: each returns (csv_text, meta, exit_code) ----

def cmd_simulate(args):
    sc = _scenario(args)
    n = args.n or sc.horizon
    seed = _seed(args, sc)
    if seed is None:
        raise UsageError("simulate needs a seed (--seed or $.estimator.seed)")
    tr = simulate_trajectory(sc.model, sc.policies, n, seed)
    return tr.to_csv(), {"n": n, "seed": seed}, 0


def cmd_throughput(args):
    sc = _scenario(args)
    n = args.n or sc.horizon
    method = args.method or sc.method
    paths = args.paths or sc.paths
    seed = _seed(args, sc)
    if method == "mc" and seed is None:
        raise UsageError("Monte Carlo needs a seed (--seed or $.estimator.seed)")
    rows = []
    for mask in parse_subsets(args.subset, sc.K):
        users = regions.members(mask, sc.K)
        if method == "exact":
            est = exact_throughput(sc.policies, sc.model, users, n)
        else:
            est = mc_throughput(sc.policies, sc.model, users, n, paths, seed, args.workers)
        rows.append([_subset_label(mask, sc.K), n, method, _num(est.value), _num(est.half_width)])
    meta = {"n": n, "method": method, "paths": paths if method == "mc" else 1, "seed": seed}
    return _rows_to_csv(["subset", "n", "method", "value", "half_width"], rows), meta, 0


def build_region(sc, kind, n, gamma=None, method="exact", paths=1000, seed=None, workers=1):
    outer = regions.awgn_outer(sc.model.means)
    if kind == "outer":
        return outer
    if kind == "shifted":
        return regions.shifted_region(outer, regions.gap_txrx() if gamma is None else gamma)
    f = throughput_set_function(sc.policies, sc.model, n, method, paths, seed, workers=workers)
    if kind == "throughput":
        return regions.RateRegion(f, label="throughput", meta={"n": n})
    if kind == "inner_txrx":
        return regions.inner_txrx(f)
    return regions.inner_tx(f, exact_output_entropy(sc.policies, sc.model, n))


def cmd_region(args):
    sc = _scenario(args)
    kind = args.kind or sc.region.get("kind", "inner_txrx")
    gamma = args.gamma if args.gamma is not None else sc.region.get("gamma")
    n = args.n or sc.horizon
    seed = _seed(args, sc)
    if sc.method == "mc" and kind not in ("outer", "shifted") and seed is None:
        raise UsageError("Monte Carlo needs a seed")
    reg = build_region(sc, kind, n, gamma, sc.method, sc.paths, seed, args.workers)
    rows = [[m, _num(v)] for m, v in enumerate(reg.f.values)]
    meta = {"kind": kind, "label": reg.label, "clamped": reg.clamped, "n": n,
            "is_polymatroid": reg.is_polymatroid(),
            **{k: v for k, v in reg.meta.items() if isinstance(v, (int, float, str))}}
    return _rows_to_csv(["subset_mask", "bound_bits"], rows), meta, 0


def cmd_gap_sweep(args):
    sw = {}
    if args.scenario is not None:
        sw = load_scenario(Path(args.scenario)).sweep
    gamma = args.gamma if args.gamma is not None else float(sw.get("gamma", regions.gap_txrx()))
    meanE = args.meanE if args.meanE is not None else float(sw.get("meanE", 1.0))
    ks = parse_k_range(args.K if args.K is not None else sw.get("K", "1:1048576:geometric"))
    if meanE <= 0 or gamma < 0:
        raise UsageError("need meanE > 0 and gamma >= 0")
    reps = regions.gap_report(gamma, meanE, ks)
    rows = [[r.K, _num(r.upper), _num(r.lower), _num(r.relative)] for r in reps]
    return _rows_to_csv(["K", "upper", "lower", "relative"], rows), {"gamma": gamma, "meanE": meanE}, 0


def cmd_mi_check(args):
    powers = parse_float_list(args.powers)
    if any(p < 0 or not math.isfinite(p) for p in powers):
        raise UsageError("powers must be finite and nonnegative")
    rows = [[_num(P), _num(sum_uniform_awgn_mi([P])), _num(epi_lower_bound(P)), _num(gaussian_ceiling(P))]
            for P in powers]
    return _rows_to_csv(["P", "mi", "epi_floor", "gauss_ceiling"], rows), {}, 0


def cmd_entropy(args):
    sc = _scenario(args)
    n = args.n or sc.horizon
    users = None if args.users is None else [u - 1 for u in parse_int_list(args.users)]
    if users is not None and any(u < 0 or u >= sc.K for u in users):
        raise UsageError(f"users must lie in 1..{sc.K}")
    prof = output_entropy_profile(sc.policies, sc.model, n, users=users)
    rows = [[t + 1, _num(h)] for t, h in enumerate(prof)]
    return _rows_to_csv(["n", "entropy_rate"], rows), {"n": n}, 0


def cmd_verify(args):
    sc = _scenario(args)
    if args.n:
        sc.horizon = args.n
    res = run_suite(sc, seed=args.seed, workers=args.workers)
    sys.stderr.write(format_table(res))
    rows = [[r.name, "pass" if r.passed else "fail", r.detail] for r in res]
    failed = [r.name for r in res if not r.passed]
    code = 2 if failed else 0
    return _rows_to_csv(["check", "result", "detail"], rows), {"failed": failed}, code


COMMANDS = {
    "simulate": cmd_simulate,
    "throughput": cmd_throughput,
    "region": cmd_region,
    "gap-sweep": cmd_gap_sweep,
    "mi-check": cmd_mi_check,
    "entropy": cmd_entropy,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="JSON scenario file (default: bundled scenario)")
    common.add_argument("--out", help="output .csv file or directory (default: stdout)")
    common.add_argument("--seed", type=int, help="overrides $.estimator.seed")
    common.add_argument("--workers", type=int, default=1)

    p = _Parser(prog="ehmac", description="Energy-harvesting Gaussian MAC toolkit.")
    p.add_argument("--version", action="version", version=f"ehmac {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="one seeded battery trajectory")
    s.add_argument("--n", type=int)

    s = sub.add_parser("throughput", parents=[common], help="n-horizon throughput of a subset")
    s.add_argument("--subset", help="1-based users, e.g. 1,3; 'all' for every subset")
    s.add_argument("--n", type=int)
    s.add_argument("--method", choices=["exact", "mc"])
    s.add_argument("--paths", type=int)

    s = sub.add_parser("region", parents=[common], help="bounding set function of a rate region")
    s.add_argument("--kind", choices=REGION_KINDS)
    s.add_argument("--gamma", type=float, help="shift for --kind shifted")
    s.add_argument("--n", type=int)

    s = sub.add_parser("gap-sweep", parents=[common], help="sum-capacity gap versus K")
    s.add_argument("--gamma", type=float)
    s.add_argument("--meanE", type=float)
    s.add_argument("--K", help="lo:hi:geometric, lo:hi:linear, or a comma list")

    s = sub.add_parser("mi-check", parents=[common], help="uniform-input AWGN MI against its bounds")
    s.add_argument("--powers", default="0.25,1,4,16,64")

    s = sub.add_parser("entropy", parents=[common], help="H(G^t)/t of the spend process")
    s.add_argument("--n", type=int)
    s.add_argument("--users", help="1-based users to restrict to")

    s = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    s.add_argument("--n", type=int)
    return p


def _target(out, command) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    if path.suffix.lower() == ".csv":
        return path
    return path / f"{command}.csv"


def _write(args, text, meta, argv, elapsed):
    target = _target(args.out, args.command)
    if target is None:
        sys.stdout.write(text)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    scen = None
    if getattr(args, "scenario", None):
        scen = hashlib.sha256(Path(args.scenario).read_bytes()).hexdigest()
    side = {
        "tool": "ehmac",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "seed": meta.pop("seed", args.seed),
        "workers": args.workers,
        "scenario_sha256": scen,
        "elapsed_seconds": round(elapsed, 6),
        "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "result": meta,
    }
    Path(str(target) + ".meta.json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.workers < 1:
        sys.stderr.write("ehmac: error: --workers must be >= 1\n")
        return 1
    t0 = time.perf_counter()
    try:
        text, meta, code = COMMANDS[args.command](args)
    except (UsageError, ScenarioError, EnumerationBudgetError, AdmissibilityError,
            PolymatroidError, QuadratureError, ValueError, OSError) as exc:
        sys.stderr.write(f"ehmac: error: {exc}\n")
        return 1
    _write(args, text, meta, argv, time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
