"""Command-line entry point: ``roughsio <command> [flags]``.

Exit status: 0 when every asserted check holds, 1 when one fails, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import conditions as C
from . import counterexample as G
from . import kernel as K
from . import multiplier as Mu
from . import transform as T
from .errors import RoughsioError
from .report import emit_report, envelope

COMMANDS = (
    "conditions", "condition-line", "multiplier-scan", "decay-check", "tj-norms", "lemma2-check",
    "apply", "maximal", "sigma-star", "qj-scan", "rademacher", "probe", "ranges", "bootstrap",
    "counterexample", "h1-example",
)
COUNTEREXAMPLE_ACTIONS = ("params", "condition", "hilbert", "divergence")

DEFAULTS = {
    "kernel": "builtin:cos",
    "alpha": 1.0,
    "power": None,
    "grid_n": 64,
    "grid_l": 8.0,
    "tol": 1e-9,
    "seed": 0,
    "out": None,
    "format": "json",
    "cutoffs": "1e9,1e12,1e20,1e40",
    "unsafe_small_n": False,
    "eps": 0.5,
    "outer": 8.0,
    "j": 0,
    "j_min": -15,
    "j_max": 15,
    "shells": "-1,0,1,2",
    "p": 2.0,
    "family": "gaussian",
    "operator": "truncated",
    "iterations": 500,
    "rule": "greedy",
    "eta": 1e-6,
    "n": 10**9,
    "n_max": 10**9 + 10**5,
    "z_class": "zero",
    "M": 10**5,
    "directions": 64,
    "pieces": 8,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    action: str | None
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError as exc:
            raise AttributeError(name) from exc

    def validate(self):
        if not self.options["tol"] > 0:
            raise UsageError("--tol must be positive")
        n = int(self.options["grid_n"])
        if n < 2 or n & (n - 1):
            raise UsageError("--grid-n must be a power of two")
        if self.options["format"] not in ("json", "csv"):
            raise UsageError("--format must be json or csv")

    def record(self) -> dict:
        return {"command": self.command, "action": self.action, **self.options}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roughsio", description="Rough singular integral laboratory.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("action", nargs="?", default=None, help="sub-action for 'counterexample'")
    ap.add_argument("--config", help="JSON file with flag values (flags override)")
    flags = {
        "--kernel": str, "--alpha": float, "--power": float, "--grid-n": int, "--grid-l": float,
        "--tol": float, "--seed": int, "--out": str, "--cutoffs": str, "--eps": float, "--outer": float,
        "--j": int, "--j-min": int, "--j-max": int, "--shells": str, "--p": float, "--family": str,
        "--operator": str, "--iterations": int, "--rule": str, "--eta": float, "--n": int,
        "--n-max": int, "--z-class": str, "--M": int, "--directions": int, "--pieces": int,
    }
    for name, typ in flags.items():
        ap.add_argument(name, type=typ, default=None)
    ap.add_argument("--format", choices=("json", "csv"), default=None)
    ap.add_argument("--unsafe-small-n", action="store_true", default=None)
    return ap


def build_config(argv: list[str]) -> RunConfig:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("invalid arguments") from exc
    opts = dict(DEFAULTS)
    if ns.config:
        try:
            file_opts = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        for k, v in file_opts.items():
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}")
            opts[key] = v
    for k, v in vars(ns).items():
        if k in DEFAULTS and v is not None:
            opts[k] = v
    if ns.command == "counterexample" and ns.action not in COUNTEREXAMPLE_ACTIONS:
        raise UsageError(f"counterexample needs one of {COUNTEREXAMPLE_ACTIONS}")
    if ns.command != "counterexample" and ns.action is not None:
        raise UsageError(f"unexpected argument {ns.action!r}")
    cfg = RunConfig(ns.command, ns.action, opts)
    cfg.validate()
    return cfg


def load_kernel(spec: str) -> K.SphericalKernel:
    if spec.startswith("builtin:"):
        return K.from_descriptor(spec)
    p = Path(spec)
    if p.exists():
        return K.from_descriptor(json.loads(p.read_text()))
    try:
        return K.from_descriptor(json.loads(spec))
    except json.JSONDecodeError as exc:
        raise UsageError(f"kernel must be builtin:<name>, a JSON file or inline JSON: {spec!r}") from exc


def _ints(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _power(cfg) -> float:
    return float(cfg.power) if cfg.power is not None else 1.0 + float(cfg.alpha)


def _probe_grid(cfg) -> T.Grid2D:
    return T.probe_family("gaussian", float(cfg.grid_l), int(cfg.grid_n), 1, int(cfg.seed))[0]


def _grid_summary(g: T.Grid2D) -> dict:
    return {"n": g.n, "half_width": g.half_width, "l2": T.lp_norm(g, 2.0), "max_abs": float(np.abs(g.values).max()),
            "meta": g.meta}


# ------------------------------------------------------------- commands


def cmd_conditions(cfg):
    k = load_kernel(cfg.kernel)
    rep = C.condition_sup_scan(k, _power(cfg), tol=cfg.tol)
    rows = [{"angle": p["angle"], "value": p["value"], "error": p["error"]} for p in rep.probes]
    return rep, {"bounded": rep.verdict == "bounded"}, rows


def cmd_condition_line(cfg):
    k = load_kernel(cfg.kernel)
    rep = C.condition_line_1000(K.to_line_function(k), _power(cfg), np.linspace(0.0, 1.0, 65), cfg.tol)
    rows = [{"point": p["point"], "value": p["value"], "error": p["error"]} for p in rep.probes]
    return rep, {"bounded": rep.verdict == "bounded"}, rows


def cmd_multiplier_scan(cfg):
    k = load_kernel(cfg.kernel)
    radii = 2.0 ** np.arange(-8, 21)
    angles = np.arange(cfg.directions) * K.TWO_PI / cfg.directions
    vals, errs = Mu.symbol_grid(k, radii, angles, cfg.tol)
    rows = [
        {"radius": float(r), "direction": float(a), "re": float(vals[i, j].real), "im": float(vals[i, j].imag),
         "error": float(errs[i, j])}
        for i, r in enumerate(radii) for j, a in enumerate(angles)
    ]
    return {"rows": rows}, {}, rows


def cmd_decay_check(cfg):
    k = load_kernel(cfg.kernel)
    small = Mu.decay_scan(k, 2.0 ** np.arange(-8, 0), cfg.alpha, cfg.directions)
    large_radii = 2.0 ** np.arange(2, 21)
    large = Mu.decay_scan(k, large_radii, cfg.alpha, cfg.directions)
    scaled = np.array(large.sup_values) * np.log(large_radii) ** (1 + cfg.alpha)
    half = len(scaled) // 2
    bottom, top = float(scaled[:half].max()), float(scaled[half:].max())
    bound = Mu.small_radius_constant(k)
    res = {"c_small": small.c_small, "small_radius_bound": bound, "small_radius_sharp": Mu.small_radius_constant_sharp(k),
           "c_large_bottom": bottom, "c_large_top": top, "small": small, "large": large}
    checks = {"small_radius_constant": small.c_small <= bound + 1e-6, "large_radius_stable": top <= 1.2 * bottom}
    return res, checks, None


def cmd_tj_norms(cfg):
    k = load_kernel(cfg.kernel)
    js = list(range(cfg.j_min, cfg.j_max + 1))
    norms = {j: Mu.tj_symbol_norm(k, j) for j in js}
    rows = [{"j": j, "norm": v, "scaled_neg": v * (1 + abs(j)) ** (1 + cfg.alpha), "scaled_pos": v * 2.0**j}
            for j, v in norms.items()]
    return {"rows": rows}, {}, rows


def product_cases(k, alpha: float):
    """Six (j, k1, k2) cases with one fitted per-factor constant."""
    Cfit = Mu.product_constant(k, alpha)
    out = []
    for j in (0, 4):
        for ks in ((0, 0), (0, 4), (0, 8)):
            val = Mu.mjk_product_norm(k, j, ks)
            out.append({"j": j, "k1": ks[0], "k2": ks[1], "measured": val,
                        "budget": Mu.product_budget(Cfit, j, ks, alpha), "C": Cfit})
    return out


def cmd_product_check(cfg):
    rows = product_cases(load_kernel(cfg.kernel), cfg.alpha)
    return {"rows": rows}, {"within_budget": all(r["measured"] <= r["budget"] for r in rows)}, rows


def cmd_apply(cfg):
    k = load_kernel(cfg.kernel)
    f = _probe_grid(cfg)
    g = T.apply_truncated(k, f, T.TruncationSpec(cfg.eps, cfg.outer))
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / "apply.grid").write_bytes(T.grid_to_bytes(g))
    return {"input": _grid_summary(f), "output": _grid_summary(g)}, {}, None


def cmd_maximal(cfg):
    k = load_kernel(cfg.kernel)
    f = _probe_grid(cfg)
    g = T.maximal_truncated(k, f, _ints(cfg.shells), cfg.outer)
    return {"input": _grid_summary(f), "output": _grid_summary(g)}, {}, None


def cmd_sigma_star(cfg):
    k = load_kernel(cfg.kernel)
    f = _probe_grid(cfg)
    g = T.sigma_star(k, f, _ints(cfg.shells))
    return {"input": _grid_summary(f), "output": _grid_summary(g)}, {}, None


def cmd_qj_scan(cfg):
    k = load_kernel(cfg.kernel)
    f = _probe_grid(cfg)
    shells = _ints(cfg.shells)
    rows = [{"j": j, "l2": T.lp_norm(T.qj_apply(k, f, j, kk_range=shells), 2.0)} for j in range(0, max(cfg.j_max, 0) + 1)]
    return {"rows": rows}, {}, rows


def cmd_rademacher(cfg):
    rng = np.random.default_rng(cfg.seed)
    pieces = [T.Grid2D(1.0, 32, rng.normal(size=(32, 32))) for _ in range(cfg.pieces)]
    avg, sq = T.rademacher_square_identity(pieces)
    rel = abs(avg - sq) / sq
    return {"average": avg, "sum_of_squares": sq, "relative_difference": rel}, {"identity": rel <= 1e-10}, None


def cmd_probe(cfg):
    params = {"kernel": load_kernel(cfg.kernel), "inner": cfg.eps, "outer": cfg.outer,
              "shells": _ints(cfg.shells), "j": cfg.j}
    rep = T.operator_norm_probe(cfg.operator, cfg.p, cfg.family, cfg.seed, params=params,
                                half_width=cfg.grid_l, n=cfg.grid_n)
    return rep, {}, None


def cmd_ranges(cfg):
    r1, r2 = C.theorem_ranges(cfg.alpha)
    res = {name: {"lower": r.lower, "upper": r.upper, "exact_lower": r.exact_lower, "exact_upper": r.exact_upper,
                  "empty": r.empty} for name, r in (("theorem1", r1), ("theorem2", r2))}
    return res, {}, None


def cmd_bootstrap(cfg):
    tr = C.bootstrap_sequences(cfg.alpha, cfg.iterations, cfg.rule, cfg.eta)
    return tr, {"limit": abs(tr.limit - (2 + cfg.alpha)) <= 1e-3}, None


def cmd_counterexample(cfg):
    if cfg.action == "params":
        p = G.spike_params(cfg.n, unsafe=bool(cfg.unsafe_small_n))
        return {"params": p, "mass": p.mass, "ln_mass": p.ln_mass}, {}, None
    if cfg.action == "condition":
        b = G.condition1000_partial(cfg.alpha, cfg.z_class, cfg.n_max)
        return b, {"finite": math.isfinite(b.total)}, None
    if cfg.action == "hilbert":
        h = G.hilbert_lower_bound(cfg.n)
        p = G.spike_params(cfg.n)
        return h, {"dominance": h.dominance_ratio >= p.gamma**0.25 / 2}, None
    led = G.divergence_ledger(_floats(cfg.cutoffs))
    return led, {"margin_increasing": led.increasing}, None


def cmd_h1_example(cfg):
    r = G.h1_member(cfg.M, alpha=cfg.alpha)
    return r, {"growth_matches": abs(r.growth_ratio_quadrature / r.growth_ratio_closed - 1) <= 1e-6}, None


HANDLERS: dict[str, Callable] = {
    "conditions": cmd_conditions, "condition-line": cmd_condition_line, "multiplier-scan": cmd_multiplier_scan,
    "decay-check": cmd_decay_check, "tj-norms": cmd_tj_norms, "lemma2-check": cmd_product_check,
    "apply": cmd_apply, "maximal": cmd_maximal, "sigma-star": cmd_sigma_star, "qj-scan": cmd_qj_scan,
    "rademacher": cmd_rademacher, "probe": cmd_probe, "ranges": cmd_ranges, "bootstrap": cmd_bootstrap,
    "counterexample": cmd_counterexample, "h1-example": cmd_h1_example,
}


def parse_and_dispatch(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = build_config(argv)
        result, checks, rows = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"roughsio: {exc}", file=sys.stderr)
        return 2
    except (RoughsioError, ValueError, KeyError) as exc:
        print(f"roughsio: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = envelope(cfg.command + (f" {cfg.action}" if cfg.action else ""), cfg.record(), result, checks)
    name = cfg.command if cfg.action is None else f"{cfg.command}-{cfg.action}"
    path = None
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        path = Path(cfg.out) / f"{name}.{cfg.format}"
    text = emit_report(report, cfg.format, path, rows=rows)
    if path is None:
        stdout.write(text)
    return 0 if all(checks.values()) else 1


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
