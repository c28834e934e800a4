"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE criterion <n>: PASS|FAIL ...`` line
(also collected into the terminal summary) and then asserts the criterion
with its pinned tolerance and runtime budget.  Criteria that fail are left
failing; the analysis lives in the decisions ledger.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from roughsio import counterexample as G
from roughsio.cli import product_cases
from roughsio.conditions import bootstrap_sequences, theorem_ranges
from roughsio.kernel import builtin
from roughsio.multiplier import (
    FrequencyPoint,
    LPWindow,
    abs_kernel,
    decay_scan,
    dyadic_symbol,
    small_radius_constant,
    partition_sum,
    sigma0_hat,
    tj_symbol_norm,
)
from roughsio.transform import (
    Grid2D,
    TruncationSpec,
    apply_Tk,
    apply_truncated,
    apply_truncated_direct,
    dyadic_piece,
    probe_family,
    rademacher_square_identity,
)


def record(n, name, ok, detail, elapsed, budget):
    in_time = elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"ACCEPTANCE criterion {n}: {status} [{name}] {detail}; {elapsed:.2f}s of {budget}s"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert in_time, line


def test_criterion_01_small_radius_constant():
    t = time.perf_counter()
    radii = 2.0 ** np.arange(-8, 0)
    parts, ok = [], True
    for name in ("cos", "sin", "sign"):
        k = builtin(name)
        measured = decay_scan(k, radii, 1.0, directions=64).c_small
        bound = small_radius_constant(k)
        ok &= measured <= bound + 1e-6
        parts.append(f"{name}: {measured:.6f} vs {bound:.6f}")
    record(1, "small-radius constant", ok, ", ".join(parts), time.perf_counter() - t, 10)


def test_criterion_02_large_radius_decay_stable():
    t = time.perf_counter()
    radii = 2.0 ** np.arange(2, 21)
    rep = decay_scan(builtin("cos"), radii, 2.0, directions=64)
    scaled = np.array(rep.sup_values) * np.log(radii) ** 3
    half = len(scaled) // 2
    bottom, top = scaled[:half].max(), scaled[half:].max()
    ok = top <= 1.2 * bottom
    record(2, "large-radius decay", ok, f"top {top:.6g} vs 1.2 x bottom {1.2 * bottom:.6g}", time.perf_counter() - t, 60)


def test_criterion_03_dilation_identity():
    t = time.perf_counter()
    rng = np.random.default_rng(20240603)
    k = builtin("cos")
    worst = 0.0
    for _ in range(1000):
        kk = int(rng.integers(-10, 11))
        xi = FrequencyPoint(float(10 ** rng.uniform(-2, 2)), float(rng.uniform(0, 2 * math.pi)))
        lhs = dyadic_symbol(k, kk, xi).value
        rhs = sigma0_hat(k, xi.dilate(2.0**kk)).value
        worst = max(worst, abs(lhs - rhs))
    record(3, "dilation identity", worst <= 1e-12, f"max difference {worst:.3e}", time.perf_counter() - t, 10)


def test_criterion_04_partition_of_unity():
    t = time.perf_counter()
    r = np.geomspace(1e-6, 1e6, 10**4)
    dev = float(np.max(np.abs(partition_sum(LPWindow(), r) - 1.0)))
    record(4, "partition of unity", dev <= 1e-12, f"max deviation {dev:.3e}", time.perf_counter() - t, 1)


def test_criterion_05_tj_decay():
    t = time.perf_counter()
    k = builtin("cos")
    neg = {j: tj_symbol_norm(k, j) * (1 + abs(j)) ** 3 for j in range(-15, -2)}
    pos = {j: tj_symbol_norm(k, j) * 2.0**j for j in range(3, 16)}
    spread_neg = max(neg.values()) / min(neg.values())
    spread_pos = max(pos.values()) / min(pos.values())
    ok = spread_neg <= 2 and spread_pos <= 2
    detail = (f"j<0 scaled range [{min(neg.values()):.3e}, {max(neg.values()):.3e}] spread {spread_neg:.3g}; "
              f"j>0 scaled range [{min(pos.values()):.4g}, {max(pos.values()):.4g}] spread {spread_pos:.3g}")
    record(5, "T_j decay", ok, detail, time.perf_counter() - t, 120)


def test_criterion_06_product_budget():
    t = time.perf_counter()
    rows = product_cases(builtin("cos"), 2.0)
    ok = all(r["measured"] <= r["budget"] for r in rows)
    worst = max(r["measured"] / r["budget"] for r in rows)
    record(6, "product-symbol budget", ok, f"C = {rows[0]['C']:.6g}, worst measured/budget {worst:.3g} over 6 cases",
           time.perf_counter() - t, 60)


def test_criterion_07_rademacher():
    t = time.perf_counter()
    rng = np.random.default_rng(7)
    pieces = [Grid2D(1.0, 32, rng.normal(size=(32, 32))) for _ in range(8)]
    avg, sq = rademacher_square_identity(pieces)
    rel = abs(avg - sq) / sq
    record(7, "Rademacher identity", rel <= 1e-10, f"relative difference {rel:.3e}", time.perf_counter() - t, 10)


def test_criterion_08_truncation_pointwise_bound():
    t = time.perf_counter()
    k = builtin("cos")
    ak = abs_kernel(k)
    f = probe_family("gaussian", 16.0, 64, 1, seed=0)[0]
    af = f.like(np.abs(f.values))
    outer = 16.0
    excess_literal, excess_shifted = [], []
    for kk in range(4):
        eps = 1.5 * 2.0 ** (kk - 1)
        lhs = np.abs(apply_truncated(k, f, TruncationSpec(eps, outer)).values)
        tk = np.abs(apply_Tk(k, f, kk, outer).values)
        same = np.abs(dyadic_piece(ak, af, kk).values)
        below = np.abs(dyadic_piece(ak, af, kk - 1).values)
        excess_literal.append(float(np.max(lhs - tk - same - 1e-8)))
        excess_shifted.append(float(np.max(lhs - tk - below - 1e-8)))
    ok = max(excess_literal) <= 0
    detail = (f"max excess per shell with same-index piece {[f'{e:.3g}' for e in excess_literal]}; "
              f"with the piece one index lower {[f'{e:.3g}' for e in excess_shifted]}")
    record(8, "truncation pointwise bound", ok, detail, time.perf_counter() - t, 60)


def test_criterion_09_fft_direct():
    t = time.perf_counter()
    f = probe_family("gaussian", 8.0, 32, 1, seed=1)[0]
    worst = 0.0
    for name in ("cos", "sin", "sign"):
        for inner, outer in ((0.5, 2.0), (1.0, 4.0), (2.0, 8.0)):
            spec = TruncationSpec(inner, outer)
            a = apply_truncated(builtin(name), f, spec).values
            b = apply_truncated_direct(builtin(name), f, spec).values
            worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
    record(9, "FFT versus direct sum", worst <= 1e-10, f"max relative difference {worst:.3e} over 9 cases",
           time.perf_counter() - t, 60)


def test_criterion_10_bootstrap_and_ranges():
    t = time.perf_counter()
    gaps = {a: abs(bootstrap_sequences(a, 500, "greedy", 1e-6).limit - (2 + a)) for a in (0.5, 1.0, 2.0, 5.0)}
    t1, t2 = theorem_ranges(2)
    exact = (t1.exact_lower, t1.exact_upper, t2.exact_lower, t2.exact_upper) == (
        Fraction(4, 3), Fraction(4), Fraction(8, 5), Fraction(8, 3))
    floats = (t1.lower, t1.upper, t2.lower, t2.upper) == (4 / 3, 4.0, 1.6, 8 / 3)
    ok = max(gaps.values()) <= 1e-3 and exact and floats
    detail = f"limit gaps {', '.join(f'{a}: {g:.2e}' for a, g in gaps.items())}; ranges exact {exact and floats}"
    record(10, "bootstrap limit and ranges", ok, detail, time.perf_counter() - t, 1)


def test_criterion_11_condition_budget():
    t = time.perf_counter()
    ok, parts = True, []
    for alpha in (0.5, 1.0, 2.0):
        for z in ("zero", "cN", "dN"):
            a = G.condition1000_partial(alpha, z, n_max=G.N0 + 10**5)
            b = G.condition1000_partial(alpha, z, n_max=G.N0 + 2 * 10**5)
            change = abs(b.total - a.total)
            good = math.isfinite(a.total) and change < a.tail_bound
            ok &= good
            parts.append(f"{alpha}/{z}: {a.total:.4g} (change {change:.1e} < tail {a.tail_bound:.2g})")
    record(11, "condition budget finite", ok, "; ".join(parts), time.perf_counter() - t, 60)


def test_criterion_12_divergence():
    t = time.perf_counter()
    led = G.divergence_ledger([1e9, 1e12, 1e20, 1e40])
    ok = led.increasing and led.positive_from_second
    detail = (f"main lower {[f'{v:.4g}' for v in led.main_lower]}, corrections {led.c1_total:.4g} + {led.c2_total:.4g}, "
              f"margins {[f'{v:.3g}' for v in led.margin_total]}, increasing {led.increasing}, "
              f"positive {led.positive_from_second}, margin turns positive near ln N = {led.crossover_ln_N:.4g}")
    record(12, "divergence ledger", ok, detail, time.perf_counter() - t, 10)


def test_criterion_13_closed_forms():
    t = time.perf_counter()
    chk = G.synthetic_hilbert_check(b=1e-3, beta=0.5)

    def rel(a, b):
        return abs(a - b) / abs(b)

    spike = max([rel(chk.mass_closed, chk.mass_quadrature)]
                + [rel(chk.moment_closed[p], chk.moment_quadrature[p]) for p in chk.moment_closed])
    hilbert = max(rel(chk.near_closed, chk.near_quadrature), rel(chk.far_closed, chk.far_quadrature),
                  rel(chk.k_closed, chk.k_quadrature))
    ok = spike <= 1e-8 and hilbert <= 1e-6
    record(13, "closed forms versus quadrature", ok, f"spike pieces {spike:.2e}, Hilbert pieces {hilbert:.2e}",
           time.perf_counter() - t, 10)


# regression band for |partial sum * theta * ln^2(1/theta)| at M = 10^5 on the default theta grid
H1_BAND = (0.7345886700792711, 2.127095023494361)


def test_criterion_14_h1_member():
    t = time.perf_counter()
    rep = G.h1_member(10**5, alpha=0.5, cutoffs=(1e3, 1e6))
    growth = abs(rep.growth_ratio_quadrature / rep.growth_ratio_closed - 1)
    band_ok = (rep.ratio_abs_min == pytest.approx(H1_BAND[0], rel=1e-9)
               and rep.ratio_abs_max == pytest.approx(H1_BAND[1], rel=1e-9))
    ok = growth <= 1e-6 and band_ok
    detail = (f"growth ratio {rep.growth_ratio_closed:.15g} vs {rep.growth_ratio_quadrature:.15g}; "
              f"band [{rep.ratio_abs_min:.6f}, {rep.ratio_abs_max:.6f}]")
    record(14, "H1 member example", ok, detail, time.perf_counter() - t, 30)
