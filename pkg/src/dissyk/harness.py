"""Disorder sweeps, averaging, and curve fits.

A RunConfig fully determines every output byte: realization r of a run with
base seed S draws its Hamiltonian couplings from the substream (S, r, 1) and
its dissipator couplings from (S, r, 2).  Sweep points execute independently
(optionally on a thread pool) and results are merged by key, so completion
order never changes the output.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .bilanczos import bilanczos_tridiagonalize, stable_prefix
from .majorana import MajoranaSet
from .model import (
    LinearDissipation,
    PBodyDissipation,
    build_hamiltonian,
    build_jump_operators,
    sample_syk_couplings,
)
from .superop import build_lindbladian, initial_string_state


@dataclass(frozen=True)
class RunConfig:
    """One model/dissipation/algorithm configuration plus sweep axes."""

    n_fermions: int = 12
    q: int = 4
    j: float = 1.0
    dissipation: dict | None = None  # {"class": "linear", "lam": ...} or
    # {"class": "p-body", "p": ..., "M": ..., "V": ...}; None = closed system
    initial_operator: tuple[int, ...] = (1,)
    max_steps: int = 12
    fo: str = "always"
    fo_threshold: float = 1e-10
    breakdown_tol: float = 1e-12
    realizations: int = 20
    base_seed: int = 0
    sweep_axis: str | None = None  # "lam", "V", "M", or "N"
    sweep_values: tuple = ()
    out_dir: str | None = None
    threads: int = 1

    def validate(self) -> None:
        if self.n_fermions % 2 != 0 or self.n_fermions < 2:
            raise ValueError(f"N must be positive even, got {self.n_fermions}")
        if self.q % 2 != 0 or not 2 <= self.q <= self.n_fermions:
            raise ValueError(f"q must be even with 2 <= q <= N, got q={self.q}")
        if self.dissipation is not None:
            cls = self.dissipation.get("class")
            if cls == "linear":
                if self.dissipation.get("lam", -1) < 0:
                    raise ValueError("linear dissipation needs lam >= 0")
            elif cls == "p-body":
                if self.dissipation.get("V", -1) < 0:
                    raise ValueError("p-body dissipation needs V >= 0")
                if self.dissipation.get("p", 0) < 1 or self.dissipation.get("M", 0) < 1:
                    raise ValueError("p-body dissipation needs p >= 1 and M >= 1")
            else:
                raise ValueError(f"unknown dissipation class {cls!r}")
        if self.max_steps < 1 or self.realizations < 1:
            raise ValueError("max_steps and realizations must be positive")
        if self.sweep_axis is not None:
            if self.sweep_axis not in ("lam", "V", "M", "N"):
                raise ValueError(f"unknown sweep axis {self.sweep_axis!r}")
            if len(self.sweep_values) == 0:
                raise ValueError("sweep needs at least one value")
        tuple(_validated_initial(self.initial_operator))

    def to_json(self) -> str:
        d = asdict(self)
        d["initial_operator"] = list(self.initial_operator)
        d["sweep_values"] = list(self.sweep_values)
        return json.dumps(d, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        d = json.loads(text)
        d["initial_operator"] = tuple(d.get("initial_operator", (1,)))
        d["sweep_values"] = tuple(d.get("sweep_values", ()))
        return cls(**d)


def _validated_initial(indices):
    idx = tuple(int(i) for i in indices)
    if len(idx) == 0 or any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"initial operator indices must be strictly increasing, got {idx}")
    return idx


@dataclass
class PointResult:
    """Disorder statistics of one grid point (per-realization rows retained)."""

    axis_value: object
    n_fermions: int
    realizations: int
    abs_a_rows: np.ndarray  # (realizations, max_steps), NaN past breakdown
    b_rows: np.ndarray
    c_rows: np.ndarray
    abs_a_mean: np.ndarray
    abs_a_stderr: np.ndarray
    b_mean: np.ndarray
    b_stderr: np.ndarray
    c_mean: np.ndarray
    c_stderr: np.ndarray
    stable_steps: int  # min over realizations of the pre-breakdown prefix
    slope: float | None = None
    slope_stderr: float | None = None
    intercept: float | None = None
    slope_window: tuple[int, int] | None = None
    saturation: float | None = None
    saturation_onset: int | None = None


@dataclass
class SweepResult:
    points: list
    failures: list
    power_law: tuple[float, float] | None  # (kappa, beta) on a V axis
    provenance: dict


def default_slope_window(n_fermions: int, n_available: int) -> tuple[int, int]:
    """Pre-plateau window for diagonal-coefficient fits.

    The size law |a_n| = mu (2n-1) holds while the string length stays below
    the scrambled mean N/2, i.e. n <= (N+2)/4; the window is capped at 10 and
    at the available coefficients, and keeps at least the 3 points a fit needs.
    """
    hi = max(3, min(10, (n_fermions + 2) // 4))
    return 1, min(hi, n_available)


def _dissipation_spec(cfg: RunConfig, realization: int):
    d = cfg.dissipation
    if d is None:
        return None
    if d["class"] == "linear":
        return LinearDissipation(lam=float(d["lam"]))
    return PBodyDissipation(
        p=int(d["p"]),
        n_jumps=int(d["M"]),
        v=float(d["V"]),
        seed=(cfg.base_seed, realization),
    )


def run_realization(cfg: RunConfig, realization: int):
    """Build model -> Lindbladian -> bi-Lanczos for one realization."""
    ms = _majorana_cached(cfg.n_fermions)
    couplings = sample_syk_couplings(
        cfg.n_fermions, cfg.q, cfg.j, seed=(cfg.base_seed, realization)
    )
    h = build_hamiltonian(ms, couplings)
    spec = _dissipation_spec(cfg, realization)
    jumps = build_jump_operators(ms, spec) if spec is not None else None
    fermionic = len(cfg.initial_operator) % 2 == 1
    lind = build_lindbladian(h, jumps, fermionic_operator=fermionic)
    v0 = initial_string_state(ms, cfg.initial_operator)
    return bilanczos_tridiagonalize(
        lind,
        v0,
        max_steps=cfg.max_steps,
        fo=cfg.fo,
        fo_threshold=cfg.fo_threshold,
        breakdown_tol=cfg.breakdown_tol,
    )


_MS_CACHE: dict[int, MajoranaSet] = {}


def _majorana_cached(n_fermions: int) -> MajoranaSet:
    ms = _MS_CACHE.get(n_fermions)
    if ms is None:
        ms = _MS_CACHE[n_fermions] = MajoranaSet(n_fermions)
    return ms


def run_point(cfg: RunConfig, axis_value=None, fit: bool = True) -> PointResult:
    """Average bi-Lanczos coefficients over the configured realizations."""
    cfg.validate()

    def one(r):
        return run_realization(cfg, r)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = dict(
                zip(range(cfg.realizations), pool.map(one, range(cfg.realizations)))
            )
    else:
        results = {r: one(r) for r in range(cfg.realizations)}

    n_rows = cfg.max_steps
    abs_a = np.full((cfg.realizations, n_rows), np.nan)
    b = np.full((cfg.realizations, n_rows - 1), np.nan)
    c = np.full((cfg.realizations, n_rows - 1), np.nan)
    stable = n_rows
    for r in sorted(results):
        tri = results[r].tridiagonal
        abs_a[r, : tri.n_steps] = np.abs(tri.a)
        b[r, : tri.n_steps - 1] = tri.b.real
        c[r, : tri.n_steps - 1] = tri.c.real
        stable = min(stable, stable_prefix(results[r].diagnostics))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN tails
        point = PointResult(
            axis_value=axis_value,
            n_fermions=cfg.n_fermions,
            realizations=cfg.realizations,
            abs_a_rows=abs_a,
            b_rows=b,
            c_rows=c,
            abs_a_mean=np.nanmean(abs_a, axis=0),
            abs_a_stderr=_stderr(abs_a),
            b_mean=np.nanmean(b, axis=0),
            b_stderr=_stderr(b),
            c_mean=np.nanmean(c, axis=0),
            c_stderr=_stderr(c),
            stable_steps=stable,
        )
    if fit:
        lo, hi = default_slope_window(cfg.n_fermions, n_rows)
        n = np.arange(lo, hi + 1)
        res = fit_linear(n, point.abs_a_mean[lo - 1 : hi])
        point.slope, point.intercept, point.slope_stderr = res
        point.slope_window = (lo, hi)
        point.saturation, point.saturation_onset = saturation_estimate(
            point.abs_a_mean[: point.stable_steps]
        )
    return point


def run_sweep(cfg: RunConfig) -> SweepResult:
    """Sweep one axis; per-point failures are recorded, not raised."""
    cfg.validate()
    points: list[PointResult] = []
    failures: list[dict] = []
    values = cfg.sweep_values if cfg.sweep_axis else (None,)
    for value in values:
        try:
            points.append(run_point(_point_config(cfg, value), axis_value=value))
        except Exception as exc:  # keep sweeping, flag the point
            failures.append({"axis_value": value, "error": f"{type(exc).__name__}: {exc}"})
    power_law = None
    if cfg.sweep_axis == "V" and len(points) >= 2:
        m = int(cfg.dissipation["M"])
        v_vals = [float(p.axis_value) for p in points if p.slope and p.slope > 0]
        c_vals = [p.slope / m for p in points if p.slope and p.slope > 0]
        if len(v_vals) >= 2:
            power_law = fit_power_law(v_vals, c_vals)
    provenance = {
        "base_seed": cfg.base_seed,
        "realizations": cfg.realizations,
        "config": json.loads(cfg.to_json()),
        "package_version": __version__,
    }
    result = SweepResult(points=points, failures=failures, power_law=power_law, provenance=provenance)
    if cfg.out_dir:
        write_sweep(cfg.out_dir, result)
    return result


def _point_config(cfg: RunConfig, value) -> RunConfig:
    if cfg.sweep_axis is None:
        return cfg
    if cfg.sweep_axis == "N":
        return replace(cfg, n_fermions=int(value), sweep_axis=None, sweep_values=())
    d = dict(cfg.dissipation or {})
    if cfg.sweep_axis == "lam":
        d.update({"class": "linear", "lam": float(value)})
        if float(value) == 0.0:
            return replace(cfg, dissipation=None, sweep_axis=None, sweep_values=())
    elif cfg.sweep_axis == "V":
        d["V"] = float(value)
    elif cfg.sweep_axis == "M":
        d["M"] = int(value)
    return replace(cfg, dissipation=d, sweep_axis=None, sweep_values=())


# --- fits ------------------------------------------------------------------


def fit_linear(x, y, window: tuple[float, float] | None = None):
    """Least-squares line fit; returns (slope, intercept, slope stderr).

    window = (lo, hi) keeps only lo <= x <= hi; at least 3 points required.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is not None:
        keep = (x >= window[0]) & (x <= window[1])
        x, y = x[keep], y[keep]
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) < 3:
        raise ValueError(f"need at least 3 points for a line fit, got {len(x)}")
    sxx = np.sum((x - x.mean()) ** 2)
    if sxx == 0:
        raise ValueError("degenerate window: all x identical")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    var = np.sum(resid**2) / (len(x) - 2) if len(x) > 2 else 0.0
    return float(slope), float(intercept), float(math.sqrt(var / sxx))


def fit_power_law(x, y) -> tuple[float, float]:
    """Fit y = kappa x^beta by least squares in log-log; returns (kappa, beta)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs strictly positive data")
    beta, logk = np.polyfit(np.log(x), np.log(y), 1)
    return float(math.exp(logk)), float(beta)


def saturation_estimate(series, rel_threshold: float = 0.08, min_tail: int = 3):
    """Plateau mean over the tail where successive relative differences stay
    below rel_threshold; returns (value, onset index, 1-based) or (None, None)
    when no plateau exists (e.g. a monotone unbounded series)."""
    y = np.asarray(series, dtype=float)
    y = y[np.isfinite(y)]
    if len(y) < min_tail + 1:
        return None, None
    scale = np.maximum(np.abs(y[:-1]), 1e-300)
    rel = np.abs(np.diff(y)) / scale
    for onset in range(len(y) - min_tail):
        if np.all(rel[onset:] < rel_threshold):
            return float(y[onset:].mean()), onset + 1
    return None, None


# --- output files -----------------------------------------------------------


def write_point_csv(path, point: PointResult) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["n", "abs_a_mean", "abs_a_stderr", "b_mean", "b_stderr", "c_mean", "c_stderr"]
        )
        for i in range(len(point.abs_a_mean)):
            row = [i + 1, repr(float(point.abs_a_mean[i])), repr(float(point.abs_a_stderr[i]))]
            if i < len(point.b_mean):
                row += [
                    repr(float(point.b_mean[i])),
                    repr(float(point.b_stderr[i])),
                    repr(float(point.c_mean[i])),
                    repr(float(point.c_stderr[i])),
                ]
            else:
                row += ["", "", "", ""]
            w.writerow(row)


def point_record(point: PointResult) -> dict:
    return {
        "axis_value": point.axis_value,
        "n_fermions": point.n_fermions,
        "realizations": point.realizations,
        "stable_steps": point.stable_steps,
        "slope": point.slope,
        "slope_stderr": point.slope_stderr,
        "intercept": point.intercept,
        "slope_window": list(point.slope_window) if point.slope_window else None,
        "saturation": point.saturation,
        "saturation_onset": point.saturation_onset,
    }


def write_sweep(out_dir, result: SweepResult) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for i, point in enumerate(result.points):
        tag = f"point_{i:03d}" if point.axis_value is None else f"point_{point.axis_value}"
        write_point_csv(os.path.join(out_dir, f"{tag}.csv"), point)
    summary = {
        "points": [point_record(p) for p in result.points],
        "failures": result.failures,
        "power_law": (
            {"kappa": result.power_law[0], "beta": result.power_law[1]}
            if result.power_law
            else None
        ),
        "provenance": result.provenance,
    }
    with open(os.path.join(out_dir, "sweep.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)


def _stderr(rows: np.ndarray) -> np.ndarray:
    n = np.sum(np.isfinite(rows), axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sd = np.nanstd(rows, axis=0, ddof=1)
        return np.where(n > 1, sd / np.sqrt(np.maximum(n, 1)), np.nan)
