"""Campaign driver: runs the theories against the reference, computes error
series, secular trends and timing errors, and writes the CSV artifacts the
figures are rendered from.

All comparisons share one reference trajectory whose step divides the
sampling cadence, so campaign epochs are stored nodes (no interpolation).
Intrinsic errors compare theory(tau) with the reference at the same tau;
time-argument errors Newton-invert the time equation and compare at equal
physical time, where the timing truncation shows up as in-track error.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import classic_theory as ct
from . import eps_theory as eps
from . import reference as refmod
from .elements import (CartesianState, ClassicalElements, GravityModel,
                       classical_to_cartesian, rsw_errors)

ENV_OUTDIR = "EPSLAB_OUTDIR"


@dataclass(frozen=True)
class CampaignConfig:
    """Campaign settings (defaults reproduce the sun-synchronous test case)."""

    a_km: float = 6878.14
    ecc: float = 0.001
    inc_deg: float = 97.42
    raan_deg: float = 168.2
    argp_deg: float = 20.0
    mean_anomaly_deg: float = 30.0
    mu: float = 398600.4415
    re_km: float = 6378.1363
    j2: float = 1.08262617e-3
    horizon_days: float = 10.0
    cadence_s: float = 60.0
    orders: tuple = (1, 2)
    classic: bool = True
    calibrate: bool = True
    duv_zero: bool = False
    newton_tol_s: float = 1e-12
    newton_max_iter: int = 10
    ref_tol: float = 1e-13
    ref_precision: str = "double"
    outdir: str = "campaign_out"

    def __post_init__(self):
        if self.horizon_days <= 0.0:
            raise ValueError("horizon_days must be positive")
        if self.cadence_s <= 0.0:
            raise ValueError("cadence_s must be positive")
        for name in ("newton_tol_s", "ref_tol"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.ref_precision not in ("double", "double-double"):
            raise ValueError(f"unknown ref_precision {self.ref_precision!r}")

    @property
    def model(self) -> GravityModel:
        return GravityModel(self.mu, self.re_km, self.j2)

    @property
    def elements(self) -> ClassicalElements:
        return ClassicalElements(
            self.a_km, self.ecc, math.radians(self.inc_deg),
            math.radians(self.raan_deg), math.radians(self.argp_deg),
            math.radians(self.mean_anomaly_deg))

    def initial_state(self) -> CartesianState:
        return classical_to_cartesian(self.elements, self.model)


_CONFIG_KEYS = {f.name for f in CampaignConfig.__dataclass_fields__.values()}


class ConfigError(ValueError):
    pass


def parse_config(path) -> CampaignConfig:
    """Flat key=value config file; '#' starts a comment, blank lines skipped."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val
    kwargs = {}
    for key, val in values.items():
        cur = CampaignConfig.__dataclass_fields__[key]
        if cur.type in ("float",):
            kwargs[key] = float(val)
        elif cur.type in ("int",):
            kwargs[key] = int(val)
        elif cur.type in ("bool",):
            kwargs[key] = val.lower() in ("1", "true", "yes", "on")
        elif cur.type in ("tuple",):
            kwargs[key] = tuple(int(x) for x in val.replace(",", " ").split())
        else:
            kwargs[key] = val
    cfg = CampaignConfig(**kwargs)
    out = os.environ.get(ENV_OUTDIR)
    if out:
        cfg = replace(cfg, outdir=out)
    return cfg


@dataclass(frozen=True)
class TrendFit:
    """Least-squares line through an error series."""

    slope: float        # per day
    intercept: float
    stderr: float       # of the slope, per day
    residual_rms: float  # rms of the detrended series
    amplitude: float    # equivalent-sinusoid amplitude, sqrt(2) * rms
    peak: float         # (max - min)/2 of the detrended series


def fit_secular_trend(t_days: np.ndarray, values: np.ndarray) -> TrendFit:
    """Linear fit with slope uncertainty and detrended amplitude."""
    t_days = np.asarray(t_days, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(t_days) < 100:
        raise ValueError("need at least 100 samples for a trend fit")
    A = np.vstack([t_days, np.ones_like(t_days)]).T
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = values - A @ coef
    dof = max(1, len(values) - 2)
    var = float(resid @ resid) / dof
    tc = t_days - t_days.mean()
    stderr = math.sqrt(var / float(tc @ tc))
    rms = math.sqrt(float(resid @ resid) / len(values))
    return TrendFit(float(coef[0]), float(coef[1]), stderr, rms,
                    math.sqrt(2.0) * rms, 0.5 * float(resid.max() - resid.min()))


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@dataclass
class CampaignResult:
    config: CampaignConfig
    outdir: str
    files: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    runtime_s: float = 0.0


def run_campaign(cfg: CampaignConfig, progress=None) -> CampaignResult:
    """Full comparison campaign; writes one CSV per error series plus a
    summary, returns everything in memory as well."""
    t_start = time.time()
    model = cfg.model
    x0 = cfg.initial_state()
    outdir = cfg.outdir
    os.makedirs(outdir, exist_ok=True)
    result = CampaignResult(config=cfg, outdir=outdir)

    horizon = cfg.horizon_days * 86400.0
    say = progress or (lambda msg: None)

    say(f"reference integration ({cfg.ref_precision}, {cfg.horizon_days:g} days)")
    traj = refmod.integrate(x0, horizon, tol=cfg.ref_tol,
                            precision=cfg.ref_precision, model=model,
                            grid_step=cfg.cadence_s)
    result.summary["reference"] = {
        "precision": cfg.ref_precision, "h_s": traj.h,
        "energy_drift": traj.energy_drift, "n_drift": traj.n_drift,
    }
    refmod.to_csv(traj, os.path.join(outdir, "reference.csv"))
    result.files["reference"] = "reference.csv"

    stride = int(round(cfg.cadence_s / traj.h))
    idx = np.arange(0, len(traj.times), stride)
    t_grid = traj.times[idx]
    tau_grid = traj.tau[idx]
    t_days = t_grid / 86400.0

    ref_states = [traj.sample(int(i))[0] for i in idx]

    for order in cfg.orders:
        say(f"extended-phase-space theory, order {order}: initialize")
        m = eps.initialize(x0, model, order=order, duv_zero=cfg.duv_zero)

        say(f"  intrinsic sampling at {len(idx)} epochs (uniform t)")
        rows_ut = []
        for k in range(len(idx)):
            eph = eps.osculating_at_tau(m, float(tau_grid[k]))
            st = CartesianState(eph.state.position, eph.state.velocity, float(t_grid[k]))
            d = rsw_errors(ref_states[k], st)
            dt = eph.t_minus(float(t_grid[k]))
            rows_ut.append((t_days[k], tau_grid[k], d.radial * 1e3, d.along_track * 1e3,
                            d.cross_track * 1e3, d.rss * 1e3, dt))
        name = f"intrinsic_eps_o{order}_ut.csv"
        _write_csv(os.path.join(outdir, name),
                   ["t_days", "tau", "radial_m", "along_m", "cross_m", "rss_m",
                    "timing_err_s"], rows_ut)
        result.files[f"eps_o{order}_intrinsic"] = name
        arr = np.array(rows_ut)
        result.series[f"eps_o{order}_intrinsic"] = arr

        # uniform-tau variant (same content, tau-regular abscissa)
        tau_uniform = np.linspace(tau_grid[0], tau_grid[-1], len(idx))
        rows_utau = []
        for k, tv in enumerate(tau_uniform):
            eph = eps.osculating_at_tau(m, float(tv))
            st_ref, t_ref = refmod.state_at_tau(traj, float(tv))
            st = CartesianState(eph.state.position, eph.state.velocity, t_ref)
            d = rsw_errors(st_ref, st)
            rows_utau.append((t_ref / 86400.0, tv, d.radial * 1e3, d.along_track * 1e3,
                              d.cross_track * 1e3, d.rss * 1e3, eph.t_minus(t_ref)))
        name = f"intrinsic_eps_o{order}_utau.csv"
        _write_csv(os.path.join(outdir, name),
                   ["t_days", "tau", "radial_m", "along_m", "cross_m", "rss_m",
                    "timing_err_s"], rows_utau)
        result.files[f"eps_o{order}_intrinsic_utau"] = name

        say(f"  time-argument sampling (Newton inversion)")
        rows_t = []
        for k in range(len(idx)):
            eph = eps.ephemeris_at_time(m, float(t_grid[k]), tol=cfg.newton_tol_s,
                                        max_iter=cfg.newton_max_iter)
            st = CartesianState(eph.state.position, eph.state.velocity, float(t_grid[k]))
            d = rsw_errors(ref_states[k], st)
            rows_t.append((t_days[k], d.radial * 1e3, d.along_track * 1e3,
                           d.cross_track * 1e3, d.rss * 1e3, eph.iterations))
        name = f"tdomain_eps_o{order}.csv"
        _write_csv(os.path.join(outdir, name),
                   ["t_days", "radial_m", "along_m", "cross_m", "rss_m",
                    "newton_iters"], rows_t)
        result.files[f"eps_o{order}_tdomain"] = name
        arr_t = np.array(rows_t)
        result.series[f"eps_o{order}_tdomain"] = arr_t

        if len(arr) < 100:
            result.summary[f"eps_o{order}"] = {
                "note": "series too short for trend fits",
                "newton_iters_max": int(arr_t[:, 5].max()),
            }
            continue
        fits = {
            "along": fit_secular_trend(arr[:, 0], arr[:, 3]),
            "radial": fit_secular_trend(arr[:, 0], arr[:, 2]),
            "cross": fit_secular_trend(arr[:, 0], arr[:, 4]),
            "timing": fit_secular_trend(arr[:, 0], arr[:, 6]),
        }
        result.summary[f"eps_o{order}"] = {
            "along_amplitude_m": fits["along"].amplitude,
            "along_peak_m": fits["along"].peak,
            "along_trend_m_per_day": fits["along"].slope,
            "radial_amplitude_m": fits["radial"].amplitude,
            "cross_amplitude_m": fits["cross"].amplitude,
            "timing_amplitude_s": fits["timing"].amplitude,
            "timing_peak_s": fits["timing"].peak,
            "timing_trend_s_per_day": fits["timing"].slope,
            "tdomain_along_amplitude_m": math.sqrt(2.0) * fit_secular_trend(
                arr_t[:, 0], arr_t[:, 2]).residual_rms,
            "tdomain_along_peak_m": 0.5 * float(arr_t[:, 2].max() - arr_t[:, 2].min()),
            "newton_iters_max": int(arr_t[:, 5].max()),
            "newton_iters_mean": float(arr_t[:, 5].mean()),
        }

    if cfg.classic:
        for calibrate in ((True, False) if cfg.calibrate else (False,)):
            tag = "cal" if calibrate else "nocal"
            say(f"physical-time theory ({'with' if calibrate else 'without'} calibration)")
            mc = ct.initialize_classic(x0, model, calibrate=calibrate)
            rows = []
            for k in range(len(idx)):
                st = ct.propagate_classic(mc, float(t_grid[k]))
                d = rsw_errors(ref_states[k], st)
                rows.append((t_days[k], d.radial * 1e3, d.along_track * 1e3,
                             d.cross_track * 1e3, d.rss * 1e3))
            name = f"classic_o1_{tag}.csv"
            _write_csv(os.path.join(outdir, name),
                       ["t_days", "radial_m", "along_m", "cross_m", "rss_m"], rows)
            result.files[f"classic_{tag}"] = name
            arr = np.array(rows)
            result.series[f"classic_{tag}"] = arr
            if len(arr) < 100:
                result.summary[f"classic_{tag}"] = {
                    "note": "series too short for trend fits"}
                continue
            fit = fit_secular_trend(arr[:, 0], arr[:, 2])
            result.summary[f"classic_{tag}"] = {
                "along_amplitude_m": fit.amplitude,
                "along_peak_m": fit.peak,
                "along_trend_m_per_day": fit.slope,
                "radial_amplitude_m": fit_secular_trend(arr[:, 0], arr[:, 1]).amplitude,
                "cross_amplitude_m": fit_secular_trend(arr[:, 0], arr[:, 3]).amplitude,
                "calibrated_mean_motion_rad_s": mc.dm_dt,
                "a_mean_km": mc.a,
            }
        result.summary["classic_note"] = (
            "second-order physical-time theory is out of scope; the published "
            "comparison quotes about one third of a cm per day for its "
            "along-track trend")

    _write_summary(result)
    result.runtime_s = time.time() - t_start
    return result


def _write_summary(result: CampaignResult) -> None:
    lines = ["campaign summary", "================", ""]
    cfg = result.config
    lines.append(f"orbit: a={cfg.a_km} km e={cfg.ecc} i={cfg.inc_deg} deg, "
                 f"{cfg.horizon_days:g} days @ {cfg.cadence_s:g} s")
    for key in sorted(result.summary):
        val = result.summary[key]
        lines.append(f"[{key}]")
        if isinstance(val, dict):
            for k2, v2 in val.items():
                lines.append(f"  {k2} = {v2}")
        else:
            lines.append(f"  {val}")
        lines.append("")
    with open(os.path.join(result.outdir, "summary.txt"), "w") as fh:
        fh.write("\n".join(lines))
    result.files["summary"] = "summary.txt"


@dataclass(frozen=True)
class BenchReport:
    classic_per_eval_s: float
    eps_tau_per_eval_s: float
    eps_time_per_eval_s: float
    eval_count_ratio: float      # eps-at-t work / eps-at-tau work
    newton_iters_mean: float
    jet_backend: str
    kernel_backend: str
    jet_compiled_vs_pure: float | None   # pure time / compiled time
    dd_compiled_vs_pure: float | None


def benchmark_evaluation(cfg: CampaignConfig, n_samples: int = 200) -> BenchReport:
    """Wall-time per ephemeris for each theory plus kernel-lane comparison."""
    from . import adscalar as ad

    model = cfg.model
    x0 = cfg.initial_state()
    m1 = eps.initialize(x0, model, order=1)
    mc = ct.initialize_classic(x0, model, calibrate=True)
    horizon = cfg.horizon_days * 86400.0
    ts = np.linspace(0.1 * horizon, 0.9 * horizon, n_samples)

    t0 = time.time()
    for tv in ts:
        ct.propagate_classic(mc, float(tv))
    classic_dt = (time.time() - t0) / n_samples

    taus = ts * m1.n_phi / m1.n_lam * 1e-3  # arbitrary spread in tau
    t0 = time.time()
    for tv in taus:
        eps.osculating_at_tau(m1, float(tv))
    eps_tau_dt = (time.time() - t0) / n_samples

    iters = 0
    t0 = time.time()
    for tv in ts:
        iters += eps.ephemeris_at_time(m1, float(tv)).iterations
    eps_t_dt = (time.time() - t0) / n_samples

    jet_ratio = _jet_lane_ratio()
    dd_ratio = _dd_lane_ratio(model)
    return BenchReport(
        classic_per_eval_s=classic_dt,
        eps_tau_per_eval_s=eps_tau_dt,
        eps_time_per_eval_s=eps_t_dt,
        eval_count_ratio=eps_t_dt / eps_tau_dt,
        newton_iters_mean=iters / n_samples,
        jet_backend=ad.JET_BACKEND,
        kernel_backend=refmod.KERNEL_BACKEND,
        jet_compiled_vs_pure=jet_ratio,
        dd_compiled_vs_pure=dd_ratio,
    )


def _jet_lane_ratio(n: int = 2000):
    """pure-python / compiled timing ratio for a generator-sized jet chain."""
    try:
        from . import _jets as fast
    except ImportError:
        return None
    from . import _jets_py as slow

    def chain(mod):
        J = mod.Jet
        t0 = time.time()
        for i in range(n):
            x = J.variable(0, 0.3 + 1e-6 * i)
            y = J.variable(5, 1.7)
            expr = (x * y + 2.0).sqrt() * (3.0 * x).sin() / (1.0 + y * y)
            mod.bracket(expr, x * y)
        return time.time() - t0

    return chain(slow) / chain(fast)


def _dd_lane_ratio(model: GravityModel, n: int = 400):
    try:
        from . import _ddcore as fast
    except ImportError:
        return None
    from . import _dd_py as slow
    (a_hi, a_lo), (b_hi, b_lo), _ = refmod.collocation_coefficients()
    y = [6878.14, 0.0, 0.0, 0.0, 2.3, 7.2, 0.0]
    pairs = []
    for v in y:
        pairs += [v, 0.0]

    def loop(mod):
        t0 = time.time()
        k = None
        yy = list(pairs)
        for _ in range(n):
            yy, k, _u = mod.step_dd(yy, 10.0, a_hi, a_lo, b_hi, b_lo,
                                    model.mu, model.re, model.j2, k)
        return time.time() - t0

    return loop(slow) / loop(fast)
