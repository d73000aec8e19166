"""Experiment runner: config parsing, seeded runs, sweeps, verification.

Configs are single JSON documents.  Reproducibility comes from the Philox
counter-based generator keyed per (seed, stream), so every trial draws the
same numbers regardless of execution order.  CSV floats are printed with 17
significant digits; identical config + seeds give byte-identical CSVs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from zeus_ode import analysis
from zeus_ode.errors import ConfigError, TraceDesyncError
from zeus_ode.metrics import Trajectory, mse, per_step_mse, psnr, speedup_proxy
from zeus_ode.oracle import (
    DenoiserHandle,
    GaussianMixture,
    TraceRecord,
    noisy_denoiser,
    oracle_denoiser,
)
from zeus_ode.parameterization import TAGS, Parameterization
from zeus_ode.schedule import KINDS, Schedule, make_grid
from zeus_ode.skipper import (
    PredictorStrategy,
    StepPlan,
    full_plan,
    make_step_plan,
    run_accelerated,
)
from zeus_ode import tracefile

SOLVERS = ("euler", "dpmpp2m")

# Stream labels for the counter-based generator.
_STREAM_INIT = "init-noise"
_STREAM_DENOISER = "denoiser-noise"


def _stream_id(label: str) -> int:
    return int.from_bytes(hashlib.blake2s(label.encode(), digest_size=8).digest(), "little") >> 1


def philox_rng(seed: int, label: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream label)."""
    return np.random.Generator(np.random.Philox(key=[seed, _stream_id(label)]))


@dataclass
class ExperimentConfig:
    schedule: Schedule
    parameterization: Parameterization
    solver: str
    T: int
    r: int
    warm_frac: float
    cool_frac: float
    strategy: str
    denoiser_kind: str  # "gmm" | "trace"
    gmm: GaussianMixture | None
    trace_path: str | None
    noise_std: float
    seeds: list[int]
    name: str = "experiment"
    raw: dict = field(default_factory=dict)

    def make_plan(self) -> StepPlan:
        if self.r == 0:
            return full_plan(self.T)
        return make_step_plan(self.T, self.r, self.warm_frac, self.cool_frac)

    def make_denoiser(self) -> DenoiserHandle:
        if self.denoiser_kind == "trace":
            handle = tracefile.read_trace(self.trace_path, self.parameterization)
            if len(handle.records) != self.T:
                raise TraceDesyncError(
                    f"trace has {len(handle.records)} records but config T={self.T}"
                )
            return handle
        if self.noise_std > 0:
            return noisy_denoiser(self.gmm, self.schedule, self.parameterization, self.noise_std)
        return oracle_denoiser(self.gmm, self.schedule, self.parameterization)


def _require(cond: bool, field_name: str, msg: str):
    if not cond:
        raise ConfigError(f"config field {field_name!r}: {msg}")


def parse_config(doc: dict, name: str = "experiment") -> ExperimentConfig:
    try:
        sched_doc = doc["schedule"]
        kind = sched_doc["kind"]
        _require(kind in KINDS, "schedule.kind", f"must be one of {KINDS}")
        sched = Schedule(kind=kind, params=dict(sched_doc.get("params", {})))

        tag = doc.get("parameterization", "epsilon")
        _require(tag in TAGS, "parameterization", f"must be one of {TAGS}")
        p = Parameterization(tag)

        solver = doc.get("solver", "dpmpp2m")
        _require(solver in SOLVERS, "solver", f"must be one of {SOLVERS}")

        T = int(doc["T"])
        _require(T >= 2, "T", "must be >= 2")

        plan_doc = doc.get("plan", {})
        r = int(plan_doc.get("r", 2))
        _require(r >= 0, "plan.r", "must be >= 0")
        warm = float(plan_doc.get("warm_frac", 0.2))
        cool = float(plan_doc.get("cool_frac", 0.1))

        strategy = doc.get("strategy", "zeus")
        strat = PredictorStrategy.parse(strategy)  # validates lagrange:k
        _require(
            strat.tag != "lagrange" or 1 <= strat.k <= 6,
            "strategy", "lagrange order must be in [1, 6]",
        )

        den_doc = doc.get("denoiser", {})
        trace_path = den_doc.get("trace_path")
        noise_std = float(den_doc.get("noise_std", 0.0))
        gmm = None
        if trace_path is None:
            _require("gmm" in den_doc, "denoiser.gmm", "required unless trace_path is given")
            g = den_doc["gmm"]
            gmm = GaussianMixture(
                weights=np.asarray(g["weights"], dtype=float),
                means=np.asarray(g["means"], dtype=float),
                variances=np.asarray(g["variances"], dtype=float),
            )
            kind_d = "gmm"
        else:
            _require(noise_std == 0.0, "denoiser.noise_std", "trace replay cannot add noise")
            kind_d = "trace"

        seeds = [int(s) for s in doc.get("seeds", [0])]
        _require(len(seeds) > 0, "seeds", "must be non-empty")
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    return ExperimentConfig(
        schedule=sched, parameterization=p, solver=solver, T=T,
        r=r, warm_frac=warm, cool_frac=cool, strategy=strategy,
        denoiser_kind=kind_d, gmm=gmm, trace_path=trace_path,
        noise_std=noise_std, seeds=seeds, name=name, raw=doc,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    return parse_config(doc, name=Path(path).stem)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    path.write_text(buf.getvalue())


def _run_pair(
    config: ExperimentConfig, seed: int, strategy: str, r: int
) -> tuple[Trajectory, Trajectory]:
    """Baseline (all-Full) and accelerated trajectories from shared noise."""
    grid = make_grid(config.T)
    d = config.gmm.dim if config.gmm is not None else None
    if d is None:
        raise ConfigError("paired runs need a gmm denoiser")
    x_1 = philox_rng(seed, _STREAM_INIT).standard_normal(d)

    base_den = config.make_denoiser()
    base = run_accelerated(
        base_den, full_plan(config.T), PredictorStrategy.parse("reuse"),
        config.solver, config.parameterization, config.schedule, grid, x_1,
        rng=philox_rng(seed, _STREAM_DENOISER),
    )
    accel_den = config.make_denoiser()
    plan = full_plan(config.T) if r == 0 else make_step_plan(
        config.T, r, config.warm_frac, config.cool_frac
    )
    accel = run_accelerated(
        accel_den, plan, PredictorStrategy.parse(strategy),
        config.solver, config.parameterization, config.schedule, grid, x_1,
        rng=philox_rng(seed, _STREAM_DENOISER),
    )
    return base, accel


def run(config: ExperimentConfig, out_dir: str | Path) -> dict:
    """Baseline + accelerated run per seed; CSV rows and a JSON summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, step_rows = [], []
    finals, psnrs, speedups = [], [], []
    for seed in config.seeds:
        base, accel = _run_pair(config, seed, config.strategy, config.r)
        final_mse = mse(accel.final_state, base.final_state)
        peak = float(base.final_state.max() - base.final_state.min()) or 1.0
        p_val = psnr(accel.final_state, base.final_state, peak)
        sp = speedup_proxy(accel, base)
        rows.append([
            seed, config.strategy, config.r, config.solver,
            config.parameterization.tag, config.T,
            base.nfe, accel.nfe, sp, final_mse, p_val,
        ])
        for t, v in zip(range(config.T, 0, -1), per_step_mse(accel, base)):
            step_rows.append([seed, t, float(v)])
        finals.append(final_mse)
        psnrs.append(p_val)
        speedups.append(sp)

    _write_csv(
        out / "runs.csv",
        ["seed", "strategy", "r", "solver", "parameterization", "T",
         "nfe_baseline", "nfe_accelerated", "speedup", "final_mse", "psnr"],
        rows,
    )
    _write_csv(out / "per_step_mse.csv", ["seed", "step_t", "mse"], step_rows)

    n = len(finals)
    summary = {
        "name": config.name,
        "strategy": config.strategy,
        "r": config.r,
        "seeds": config.seeds,
        "final_mse_mean": float(np.mean(finals)),
        "final_mse_se": float(np.std(finals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        "psnr_mean": float(np.mean([q for q in psnrs if math.isfinite(q)]) if any(math.isfinite(q) for q in psnrs) else math.inf),
        "speedup_mean": float(np.mean(speedups)),
        "nfe": int(rows[0][7]) if rows else 0,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


_SWEEP_AXES = ("r", "strategy", "lagrange-order", "solver", "parameterization", "T")


def sweep(config: ExperimentConfig, axis: str, values: list, out_dir: str | Path) -> dict:
    """Cross-product runs along one axis; single CSV plus a JSON summary.

    A strategy sweep also reports win rates: the fraction of seeds where the
    first strategy's final MSE is <= each competitor's.
    """
    if axis not in _SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {_SWEEP_AXES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    per_cell: dict[str, dict[int, float]] = {}
    for value in values:
        strategy, r = config.strategy, config.r
        solver, tag, T = config.solver, config.parameterization.tag, config.T
        cell_cfg = config
        if axis == "r":
            r = int(value)
        elif axis == "strategy":
            strategy = str(value)
        elif axis == "lagrange-order":
            strategy = f"lagrange:{int(value)}"
        elif axis == "solver":
            solver = str(value)
            cell_cfg = _with(config, solver=solver)
        elif axis == "parameterization":
            tag = str(value)
            cell_cfg = _with(config, parameterization=Parameterization(tag))
        elif axis == "T":
            T = int(value)
            cell_cfg = _with(config, T=T)
        cell = per_cell.setdefault(str(value), {})
        for seed in config.seeds:
            base, accel = _run_pair(cell_cfg, seed, strategy, r)
            final_mse = mse(accel.final_state, base.final_state)
            cell[seed] = final_mse
            rows.append([
                str(value), seed, strategy, r, solver, tag, T,
                base.nfe, accel.nfe, speedup_proxy(accel, base), final_mse,
            ])

    _write_csv(
        out / "sweep.csv",
        [axis, "seed", "strategy", "r", "solver", "parameterization", "T",
         "nfe_baseline", "nfe_accelerated", "speedup", "final_mse"],
        rows,
    )

    summary: dict = {"axis": axis, "values": [str(v) for v in values], "cells": {}}
    for value, cell in per_cell.items():
        vals = list(cell.values())
        summary["cells"][value] = {
            "final_mse_mean": float(np.mean(vals)),
            "final_mse_se": float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0,
        }
    if axis in ("strategy", "lagrange-order") and len(values) >= 2:
        first = str(values[0])
        win_rate = {}
        for other in map(str, values[1:]):
            wins = sum(
                1 for seed in config.seeds
                if per_cell[first][seed] <= per_cell[other][seed]
            )
            win_rate[f"{first}_vs_{other}"] = wins / len(config.seeds)
        summary["win_rate"] = win_rate
    (out / "sweep_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _with(config: ExperimentConfig, **kw) -> ExperimentConfig:
    from dataclasses import replace

    return replace(config, **kw)


def replay(trace_path: str | Path, config: ExperimentConfig, out_dir: str | Path) -> dict:
    """Replay a recorded trace through the all-Full trajectory.

    Validates the trace header against the config before any compute, then
    re-serializes the replayed per-step psi values; the output trace must be
    byte-identical to the input.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    handle = tracefile.read_trace(trace_path, config.parameterization)
    if len(handle.records) != config.T:
        raise TraceDesyncError(
            f"trace has {len(handle.records)} records but config T={config.T}"
        )
    grid = make_grid(config.T)
    d = len(handle.records[0].psi)
    x_1 = philox_rng(config.seeds[0], _STREAM_INIT).standard_normal(d)
    traj = run_accelerated(
        handle, full_plan(config.T), PredictorStrategy.parse("reuse"),
        config.solver, config.parameterization, config.schedule, grid, x_1,
    )
    records = [
        TraceRecord(step=t, s=grid.s(t), psi=np.asarray(psi, dtype=np.float32))
        for t, psi in zip(range(config.T, 0, -1), traj.psis)
    ]
    out_trace = out / "replayed_trace.ztrc"
    tracefile.write_trace(out_trace, records)
    _write_csv(
        out / "replay.csv",
        ["step_t", "psi_l2", "state_l2"],
        [[t, float(np.linalg.norm(psi)), float(np.linalg.norm(st))]
         for t, psi, st in zip(range(config.T, 0, -1), traj.psis, traj.states)],
    )
    return {"trace": str(trace_path), "replayed": str(out_trace), "nfe": traj.nfe}


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

_TREND_GMM = GaussianMixture(
    weights=np.array([0.6, 0.25, 0.15]),
    means=np.array([[-1.5, 0.5], [2.5, -0.5], [0.0, 2.5]]),
    variances=np.array([0.12, 0.30, 0.08]),
)


def _check(name: str, passed: bool, **details) -> dict:
    return {"name": name, "passed": bool(passed), **details}


def _suite_blue(rng: np.random.Generator) -> list[dict]:
    checks = []
    worst = 0.0
    for _ in range(100):
        s = rng.uniform(0.1, 0.9)
        d = rng.uniform(1e-3, 0.1)
        w = analysis.blue_weights(s, s + d, s - d, np.eye(2))
        worst = max(worst, abs(w[0] - 2.0), abs(w[1] + 1.0))
    checks.append(_check("blue_identity_cov_(2,-1)", worst <= 1e-12, max_abs_err=worst))
    cov = np.array([[1.0, 0.5], [0.5, 1.0]])
    w = analysis.blue_weights(0.5, 0.51, 0.49, cov)
    # Brute force: the affine-unbiasedness constraints pin the weights, so a
    # scan over the sum-one line must locate its only feasible point.
    ts = np.linspace(-1.0, 1.0, 20001)
    cand_w0, cand_w1 = 2.0 + ts, -1.0 - ts
    slope_violation = np.abs(cand_w0 * 0.5 + cand_w1 * 0.51 - 0.49)
    t_best = ts[np.argmin(slope_violation)]
    checks.append(
        _check(
            "blue_gls_matches_bruteforce",
            abs(t_best) <= 1e-4 and abs(w[0] - 2.0) <= 1e-10 and abs(w[1] + 1.0) <= 1e-10,
            gls_weights=list(w), bruteforce_t=float(t_best),
        )
    )
    return checks


def _suite_lagrange() -> list[dict]:
    checks = []
    ok_weights = True
    ok_norm = True
    norms = {}
    for k in range(1, 7):
        wv = analysis.lagrange_weights(k, 1)
        expect = [(-1) ** j * math.comb(k + 1, j + 1) for j in range(k + 1)]
        ok_weights &= all(w == e for w, e in zip(wv.exact, expect))
        n2 = analysis.weight_norm_sq(k)
        norms[k] = n2
        ok_norm &= n2 == math.comb(2 * k + 2, k + 1) - 1
    checks.append(_check("lagrange_weights_binomial", ok_weights))
    checks.append(
        _check(
            "lagrange_norm_identity_comb(2k+2,k+1)-1",
            ok_norm,
            norms=norms,
            note=(
                "norm identity holds with the -1 term; the sum over the k+1 "
                "nonzero binomials excludes the m=0 term of the Vandermonde identity"
            ),
        )
    )
    ratios = [norms[k + 1] / norms[k] for k in range(1, 6)]
    checks.append(_check("lagrange_norm_growth_ge_3.5", min(ratios) >= 3.5, ratios=ratios))
    ok_affine = True
    for k in range(1, 7):
        for off in (1, 2, 3):
            wv = analysis.lagrange_weights(k, off)
            ok_affine &= abs(wv.weights.sum() - 1.0) <= 1e-12
            ok_affine &= abs(float(wv.weights @ wv.nodes) - wv.target) <= 1e-10
    checks.append(_check("lagrange_affine_reproduction", ok_affine))
    return checks


def _suite_bias_variance(rng: np.random.Generator) -> list[dict]:
    checks = []
    n = 100_000
    ok_var = True
    details = {}
    for strategy, js, expected in (
        ("chain", (1, 2, 3), (5.0, 13.0, 25.0)),
        ("zeus", (1, 2, 3, 4), (5.0, 1.0, 5.0, 1.0)),
        ("reuse", (1, 2, 3), (1.0, 1.0, 1.0)),
    ):
        for j, exp_v in zip(js, expected):
            rep = analysis.strategy_bias_variance(strategy, analysis.SIN, 0.5, 0.01, j, 1.0, n, rng)
            rel = abs(rep.empirical_variance - exp_v) / exp_v
            details[f"{strategy}_j{j}"] = {"measured": rep.empirical_variance, "expected": exp_v}
            ok_var &= rel <= 0.03
    checks.append(_check("variance_table_3pct", ok_var, **details))

    ok_bias = True
    ratios = {}
    for strategy in ("chain", "reuse"):
        for phi in (analysis.SIN, analysis.EXP):
            for j in (1, 2, 3):
                for d in (1e-2, 5e-3, 2.5e-3):
                    rep = analysis.strategy_bias_variance(strategy, phi, 0.5, d, j, 0.0, 0)
                    lead = analysis.predicted_bias_leading(strategy, phi, 0.5, d, j)
                    ratio = rep.empirical_bias / lead
                    ratios[f"{strategy}_{phi.name}_j{j}_d{d}"] = ratio
                    ok_bias &= abs(ratio - 1.0) <= 0.02
    checks.append(
        _check(
            "bias_leading_ratio_2pct",
            ok_bias,
            worst=max(abs(r - 1) for r in ratios.values()),
            ratios=ratios,
        )
    )

    ok_full = True
    delta, M3 = 5e-3, 12.0  # cubic: fourth derivative vanishes
    for strategy in ("chain", "zeus", "reuse"):
        for j in (1, 2, 3, 4):
            rep = analysis.strategy_bias_variance(strategy, analysis.CUBIC, 0.4, delta, j, 0.0, 0)
            tol = M3 * j**3 * delta**3  # exact Delta^3 remainder bound
            ok_full &= abs(rep.empirical_bias - rep.predicted_bias) <= tol
    checks.append(_check("bias_two_term_expansion", ok_full))

    slopes = {}
    ok_slope = True
    for strategy, (eh, es) in (("chain", (4.0, 2.0)), ("zeus", (2.0, 2.0)), ("reuse", (2.0, 2.0))):
        sh, ss = analysis.mse_scaling_slopes(strategy, rng=rng)
        slopes[strategy] = {"h_slope": sh, "sigma_slope": ss}
        ok_slope &= abs(sh - eh) <= 0.3 and abs(ss - es) <= 0.3
    checks.append(_check("mse_scaling_slopes_0.3", ok_slope, **slopes))
    return checks


def _suite_minimax() -> list[dict]:
    checks = []
    M2, d, s_t = 2.0, 0.01, 0.5
    plus, minus, sep = analysis.minimax_witness(M2, d, s_t)
    vanish = max(abs(plus(s_t)), abs(plus(s_t + d)), abs(minus(s_t)), abs(minus(s_t + d)))
    checks.append(_check("witness_vanishes_at_nodes", vanish <= 1e-14, max_abs=vanish))
    gap = abs(plus(s_t - d) - minus(s_t - d))
    checks.append(
        _check(
            "witness_separation_2M2D2",
            sep == 2 * M2 * d * d and math.isclose(gap, sep, rel_tol=1e-12),
            gap=gap,
        )
    )
    # p'' == 1 exactly, so the witness curvature equals M2 everywhere.
    hs = 1e-4
    curv = (plus(0.3 + hs) - 2 * plus(0.3) + plus(0.3 - hs)) / (hs * hs)
    checks.append(_check("witness_curvature_M2", abs(curv - M2) <= 1e-6 * M2, curvature=curv))
    rows = analysis.achievability_check(
        [(analysis.SIN, 1.0, 1.0), (analysis.EXP, math.e, math.e)],
        deltas=(1e-2, 5e-3, 2.5e-3),
    )
    ok = all(r.extrap_error <= r.extrap_bound and r.reuse_error <= r.reuse_bound for r in rows)
    checks.append(_check("achievability_bounds", ok))
    ratios = [r.second_diff_ratio for r in rows]
    checks.append(
        _check("second_difference_curvature", max(abs(q - 1.0) for q in ratios) <= 1e-3, ratios=ratios)
    )
    return checks


def _suite_lebesgue() -> tuple[list[dict], list[list]]:
    checks = []
    lam = {k: analysis.lebesgue_constant(k, "equispaced") for k in range(2, 21)}
    cheb = {k: analysis.lebesgue_constant(k, "chebyshev") for k in range(2, 21)}
    checks.append(_check("lebesgue_k2_equi_1.25", abs(lam[2] - 1.25) <= 1e-6, value=lam[2]))
    ratio = lam[10] / lam[5]
    checks.append(_check("lebesgue_equi_L10_over_L5_gt_10", ratio > 10.0, ratio=ratio,
                         L5=lam[5], L10=lam[10]))
    checks.append(
        _check("lebesgue_cheb_L20_lt_3log20", cheb[20] < 3.0 * math.log(20.0), value=cheb[20]))
    checks.append(
        _check("lebesgue_cheb_log_bounded", cheb[20] / math.log(20.0) < 3.0,
               ratio=cheb[20] / math.log(20.0)))
    table = [[k, lam[k], cheb[k]] for k in range(2, 21)]
    return checks, table


def _suite_trend(rng: np.random.Generator) -> list[dict]:
    checks = []
    sched = Schedule("vp_linear")
    for tag in TAGS:
        rows = analysis.trend_check(
            Parameterization(tag), _TREND_GMM, sched, (0.2, 0.5, 0.8), 100_000, rng
        )
        worst = max(r.max_sigmas_off for r in rows)
        checks.append(_check(f"trend_{tag}_within_3se", worst <= 3.0, max_sigmas_off=worst))
    return checks


def _suite_convergence(rng: np.random.Generator) -> list[dict]:
    checks = []
    sched = Schedule("vp_linear")
    gmm = GaussianMixture(weights=[1.0], means=[[0.5]], variances=[0.25])
    x_1 = philox_rng(0, "order-probe").standard_normal(1)
    den = oracle_denoiser(gmm, sched, Parameterization("epsilon"))
    from zeus_ode.solver import reference_solve

    ref_a = reference_solve(den, sched, x_1, 2000, stop_s=0.2)
    ref_b = reference_solve(den, sched, x_1, 4000, stop_s=0.2)
    drift = float(np.max(np.abs(ref_a - ref_b)))
    checks.append(_check("reference_self_consistency", drift < 1e-8, drift=drift))
    errs_e, order_e = analysis.solver_order_probe("euler", sched, gmm, x_1)
    checks.append(_check("euler_order_1", abs(order_e - 1.0) <= 0.15, order=order_e, errors=errs_e))
    errs_d, order_d = analysis.solver_order_probe("dpmpp2m", sched, gmm, x_1)
    checks.append(_check("dpmpp2m_order_2", abs(order_d - 2.0) <= 0.25, order=order_d, errors=errs_d))
    return checks


SUITES = ("blue", "lagrange", "bias_variance", "minimax", "lebesgue", "trend", "convergence", "all")


def verify(suite: str, out_dir: str | Path) -> tuple[bool, dict]:
    """Run verification suites; returns (all_passed, report) and writes files."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {SUITES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    selected = SUITES[:-1] if suite == "all" else (suite,)
    report: dict = {"suite": suite, "checks": []}
    for name in selected:
        rng = philox_rng(0, f"verify-{name}")
        if name == "lebesgue":
            checks, table = _suite_lebesgue()
            _write_csv(out / "lebesgue.csv", ["k", "equispaced", "chebyshev"], table)
        elif name == "blue":
            checks = _suite_blue(rng)
        elif name == "lagrange":
            checks = _suite_lagrange()
        elif name == "bias_variance":
            checks = _suite_bias_variance(rng)
        elif name == "minimax":
            checks = _suite_minimax()
        elif name == "trend":
            checks = _suite_trend(rng)
        else:
            checks = _suite_convergence(rng)
        report["checks"].extend(checks)
    passed = all(c["passed"] for c in report["checks"])
    report["passed"] = passed
    (out / "verify_report.json").write_text(_json_dumps(report) + "\n")
    return passed, report


def _json_dumps(obj) -> str:
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"not serializable: {type(o)}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default)
