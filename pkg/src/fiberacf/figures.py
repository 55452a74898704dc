"""Data tables behind the figures and the single-quantity CLI commands.

Every builder returns a FigureTable whose rows are plain floats, ints and
strings; writing and formatting are left to :mod:`fiberacf.reports`.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._logger import create_logger
from .autocorrelation import AcfMode, acf_grid_rect, acf_rect_isolated, acf_ring_time_avg
from .capacity import (
    capacity_curves,
    fsk_demo,
    fsk_rate,
    infinite_bandwidth_capacity_bound,
    infinite_bandwidth_capacity_limit,
    scaled_b_study,
    three_sample_demo,
)
from .channel_mc import MonteCarloEngine, PhaseModel, mc_acf
from .config import AppConfig
from .exceptions import DomainError, FiberAcfError
from .params import DerivedConstants, derive_constants, dbm_to_watts, rho, watts_to_dbm
from .power_bounds import BoundRegime, avg_power_bound, inst_power_bound
from .special_functions import eval_hyperbolic_array
from .spectrum import PsdGrid, psd_ring_pam

FIGURE_IDS = (1, 2, 3, 4, 5, 6, 7, 8)

_logger = create_logger()


@dataclass(frozen=True)
class FigureTable:
    """A named CSV table."""

    name: str
    header: tuple[str, ...]
    rows: list[tuple]


def _db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else -math.inf


def _psd_grid(config: AppConfig) -> PsdGrid:
    sp = config.spectrum
    return PsdGrid(
        samples_per_inverse_b=sp.samples_per_inverse_b,
        span_b=sp.span_b,
        window_inverse_b=sp.window_inverse_b,
    )


def _symbol_period(dc: DerivedConstants) -> float:
    if dc.params.t_s is None:
        raise DomainError("This table needs a symbol period in the fiber record", name="t_s", value=None)
    return dc.params.t_s


def _p_grid(config: AppConfig) -> np.ndarray:
    fig = config.figures
    return np.asarray(dbm_to_watts(np.linspace(fig.p_dbm_start, fig.p_dbm_stop, fig.p_points)))


def _label(mw: float) -> str:
    return f"{mw:g}mw"


def hyperbolic_table(x_grid: Sequence[float] | None = None, z: float = 1.0) -> FigureTable:
    """|S|, S_R, S_I at c = -jx/z² with the √5·e^(-√x) envelope."""
    x = np.logspace(-2, 3, 251) if x_grid is None else np.asarray(x_grid, dtype=np.float64)
    s, _ = eval_hyperbolic_array(-1j * x / z**2, z)
    envelope = math.sqrt(5.0) * np.exp(-np.sqrt(x))
    rows = [
        (float(a), float(abs(b)), float(b.real), float(b.imag), float(e))
        for a, b, e in zip(x, s, envelope, strict=True)
    ]
    return FigureTable("fig1", ("x", "abs_s", "s_r", "s_i", "abs_s_envelope"), rows)


def hyperbolic_t_table(x_grid: Sequence[float] | None = None, z: float = 1.0) -> FigureTable:
    """T_R/z and T_I/z at c = -jx/z² with the 2x/3 and min(x, 1/√x)/3 envelopes."""
    x = np.logspace(-2, 3, 251) if x_grid is None else np.asarray(x_grid, dtype=np.float64)
    _, t = eval_hyperbolic_array(-1j * x / z**2, z)
    rows = [
        (float(a), float(b.real / z), float(b.imag / z), 2.0 * float(a) / 3.0, min(float(a), 1.0 / math.sqrt(a)) / 3.0)
        for a, b in zip(x, t, strict=True)
    ]
    return FigureTable("fig2", ("x", "t_r_over_z", "t_i_over_z", "t_i_upper", "t_i_lower"), rows)


def rect_acf_table(config: AppConfig, t_ps: Sequence[float] | None = None) -> FigureTable:
    """|A(t, 0)| and |A(t, t')| in dB for an isolated rectangular pulse at each configured power."""
    dc = derive_constants(config.fiber)
    t_s = _symbol_period(dc)
    t_axis = np.linspace(-15.0, 15.0, 301) if t_ps is None else np.asarray(t_ps, dtype=np.float64)
    tprime = config.figures.tprime_ps
    header = ["t_ps"]
    columns = []
    for mw in config.figures.acf_powers_mw:
        grid = acf_grid_rect(t_axis * 1e-12, np.array([0.0, tprime * 1e-12]), mw * 1e-3, t_s, dc)
        db = grid.abs_db()
        header += [f"abs_db_{_label(mw)}_tp0", f"abs_db_{_label(mw)}_tp{tprime:g}ps"]
        columns += [db[:, 0], db[:, 1]]
    rows = [(float(t), *(float(c[i]) for c in columns)) for i, t in enumerate(t_axis)]
    return FigureTable("fig3", tuple(header), rows)


def rect_acf_mc_table(
    config: AppConfig, engine: MonteCarloEngine | None = None, t_ps: Sequence[float] | None = None
) -> FigureTable:
    """Exact versus simulated |A(t, t')| for the rectangular pulse at the Monte Carlo power."""
    dc = derive_constants(config.fiber)
    t_s = _symbol_period(dc)
    mc = config.monte_carlo
    p = config.figures.mc_power_mw * 1e-3
    amplitude = math.sqrt(p)
    t_axis = np.linspace(-15.0, 15.0, 13) if t_ps is None else np.asarray(t_ps, dtype=np.float64)
    rows = []
    for tp in (0.0, config.figures.tprime_ps):
        for t in t_axis:
            t_sec, tp_sec = t * 1e-12, tp * 1e-12
            exact = acf_rect_isolated(t_sec, tp_sec, p, t_s, dc).value
            u0 = amplitude if abs(t_sec) <= t_s / 2 else 0.0
            u0p = amplitude if abs(tp_sec) <= t_s / 2 else 0.0
            r = float(rho(t_sec - tp_sec, dc.params.b))
            est = mc_acf(u0, u0p, r, dc, mc.trials, mc.steps, mc.seed, engine=engine)
            rows.append((float(t), float(tp), _db(abs(exact)), _db(abs(est.mean)), est.std_error))
    return FigureTable("fig4", ("t_ps", "tprime_ps", "exact_abs_db", "mc_abs_db", "mc_std_error_w"), rows)


def ring_acf_table(
    config: AppConfig, engine: MonteCarloEngine | None = None, tau_ps: Sequence[float] | None = None
) -> FigureTable:
    """Time-averaged ring-PAM autocorrelation: closed form, simulation and the γ = 0 curve.

    The simulated value mixes the same-symbol (shared phase) and
    cross-symbol (independent phases) estimates with weights 1 - |τ|/T_s and |τ|/T_s.
    """
    dc = derive_constants(config.fiber)
    linear = derive_constants(config.fiber.with_gamma(0.0))
    t_s = _symbol_period(dc)
    mc = config.monte_carlo
    p = config.figures.mc_power_mw * 1e-3
    amplitude = math.sqrt(p)
    tau_axis = np.linspace(0.0, 30.0, 13) if tau_ps is None else np.asarray(tau_ps, dtype=np.float64)
    rows = []
    for tau in tau_axis:
        tau_sec = tau * 1e-12
        r = float(rho(tau_sec, dc.params.b))
        weight = min(abs(tau_sec) / t_s, 1.0)
        same = mc_acf(
            amplitude, amplitude, r, dc, mc.trials, mc.steps, mc.seed, phases=PhaseModel.SHARED, engine=engine
        )
        other = mc_acf(
            amplitude, amplitude, r, dc, mc.trials, mc.steps, mc.seed + 1, phases=PhaseModel.INDEPENDENT, engine=engine
        )
        mean = (1.0 - weight) * same.mean.real + weight * other.mean.real
        se = math.hypot((1.0 - weight) * same.std_error, weight * other.std_error)
        rows.append(
            (
                float(tau),
                float(acf_ring_time_avg(tau_sec, p, t_s, dc)),
                mean,
                se,
                float(acf_ring_time_avg(tau_sec, p, t_s, linear)),
            )
        )
    return FigureTable("fig5", ("tau_ps", "approx_w", "mc_w", "mc_std_error_w", "gamma0_w"), rows)


def ring_psd_table(config: AppConfig) -> FigureTable:
    """Ring-PAM PSDs in dBW/Hz for each configured power, with the γ = 0 reference at the lowest power."""
    dc = derive_constants(config.fiber)
    grid = _psd_grid(config)
    powers = config.figures.psd_powers_mw
    spectra = [psd_ring_pam(mw * 1e-3, dc, grid=grid) for mw in powers]
    reference = psd_ring_pam(min(powers) * 1e-3, derive_constants(config.fiber.with_gamma(0.0)), grid=grid)
    header = ("f_ghz", *(f"psd_dbw_per_hz_{_label(mw)}" for mw in powers), "psd_dbw_per_hz_gamma0")
    columns = [s.density_dbw_per_hz() for s in spectra] + [reference.density_dbw_per_hz()]
    rows = [(float(f) * 1e-9, *(float(c[i]) for c in columns)) for i, f in enumerate(reference.freqs)]
    return FigureTable("fig6", header, rows)


def capacity_figure_table(config: AppConfig) -> FigureTable:
    """Fixed-bandwidth capacity bounds at W = B with the Shannon reference and the threshold."""
    dc = derive_constants(config.fiber)
    curves = capacity_curves(
        _p_grid(config), dc.params.b, dc, config.bounds.q, tail_attenuation=config.bounds.tail_attenuation
    )
    threshold = float(watts_to_dbm(curves.threshold_w)) if math.isfinite(curves.threshold_w) else math.nan
    rows = [
        (float(watts_to_dbm(p)), float(u1), float(u2), float(e), float(s), threshold)
        for p, u1, u2, e, s in zip(
            curves.upper1.p_grid,
            curves.upper1.values,
            curves.upper2.values,
            curves.eta.values,
            curves.shannon.values,
            strict=True,
        )
    ]
    return FigureTable(
        "fig7", ("p_dbm", "upper1_bpshz", "upper2_bpshz", "eta_bpshz", "shannon_bpshz", "threshold_dbm"), rows
    )


def scaled_b_table(config: AppConfig) -> FigureTable:
    """Capacity bounds when the amplifier bandwidth grows as √P beyond W = B."""
    dc = derive_constants(config.fiber)
    study = scaled_b_study(_p_grid(config), dc.params.b, dc)
    rows = [
        (float(watts_to_dbm(p)), float(b) * 1e-9, float(pr), float(u1), float(u2))
        for p, b, pr, u1, u2 in zip(
            study.p_grid, study.b, study.received_power, study.upper1, study.upper2, strict=True
        )
    ]
    return FigureTable("fig8", ("p_dbm", "b_ghz", "received_power_w", "upper1_bpshz", "upper2_bpshz"), rows)


def figure_table(fig_id: int, config: AppConfig, engine: MonteCarloEngine | None = None) -> FigureTable:
    """Build the data table of figure ``fig_id`` (1-8).

    Raises:
        DomainError: If ``fig_id`` is unknown.
    """
    if fig_id not in FIGURE_IDS:
        raise DomainError(f"Unknown figure {fig_id}; expected one of {FIGURE_IDS}", name="fig_id", value=fig_id)
    _logger.debug("Building figure %d", fig_id)
    if fig_id == 1:
        return hyperbolic_table()
    if fig_id == 2:
        return hyperbolic_t_table()
    if fig_id == 3:
        return rect_acf_table(config)
    if fig_id == 4:
        return rect_acf_mc_table(config, engine)
    if fig_id == 5:
        return ring_acf_table(config, engine)
    if fig_id == 6:
        return ring_psd_table(config)
    if fig_id == 7:
        return capacity_figure_table(config)
    return scaled_b_table(config)


def acf_table(
    config: AppConfig, p_mw: float, t_ps: Sequence[float], tp_ps: Sequence[float], mode: AcfMode = AcfMode.EXACT
) -> FigureTable:
    """Rectangular-pulse autocorrelation on a (t, t') grid."""
    dc = derive_constants(config.fiber)
    t_arr = np.asarray(t_ps, dtype=np.float64)
    tp_arr = np.asarray(tp_ps, dtype=np.float64)
    grid = acf_grid_rect(t_arr * 1e-12, tp_arr * 1e-12, p_mw * 1e-3, _symbol_period(dc), dc, mode)
    db = grid.abs_db()
    rows = [
        (float(t), float(tp), float(grid.values[i, j].real), float(grid.values[i, j].imag), float(db[i, j]))
        for i, t in enumerate(t_arr)
        for j, tp in enumerate(tp_arr)
    ]
    return FigureTable("acf", ("t_ps", "tprime_ps", "re_w", "im_w", "abs_db"), rows)


def psd_table(config: AppConfig, p_mw: float) -> FigureTable:
    """Ring-PAM PSD at one launch power."""
    dc = derive_constants(config.fiber)
    psd = psd_ring_pam(p_mw * 1e-3, dc, grid=_psd_grid(config))
    rows = [(float(f) * 1e-9, float(d), psd.dc_line) for f, d in zip(psd.freqs, psd.density_dbw_per_hz(), strict=True)]
    return FigureTable("psd", ("f_ghz", "psd_dbw_per_hz", "dc_line_w"), rows)


def bounds_table(config: AppConfig, w_hz: float | None = None, kind: str = "avg") -> FigureTable:
    """Average (``kind="avg"``) or instantaneous (``kind="inst"``) received-power bounds over the power grid.

    Unsupported combinations are reported as rows with regime ``unsupported``
    and empty values.
    """
    dc = derive_constants(config.fiber)
    w = dc.params.b if w_hz is None else w_hz
    regime = BoundRegime.classify(w, dc)
    rows = []
    for p in _p_grid(config):
        try:
            if kind == "inst":
                report = inst_power_bound(float(p), regime, dc)
            else:
                report = avg_power_bound(float(p), w, dc, regime, tail_attenuation=config.bounds.tail_attenuation)
        except FiberAcfError as e:
            _logger.warn("No bound at P=%g W: %s", p, e)
            rows.append((float(watts_to_dbm(p)), None, "unsupported", None, None, None))
            continue
        c = report.components
        rows.append(
            (float(watts_to_dbm(p)), report.bound, regime.tag.value, c["term_erf"], c["term_tail1"], c["term_tail2"])
        )
    return FigureTable("bounds", ("p_dbm", "bound_w", "regime", "term_erf_w", "term_tail1_w", "term_tail2_w"), rows)


def capacity_table(config: AppConfig, w_hz: float | None = None) -> FigureTable:
    """Capacity bounds at receiver bandwidth W (default B) with the power threshold."""
    dc = derive_constants(config.fiber)
    w = dc.params.b if w_hz is None else w_hz
    curves = capacity_curves(_p_grid(config), w, dc, config.bounds.q, tail_attenuation=config.bounds.tail_attenuation)
    threshold = float(watts_to_dbm(curves.threshold_w)) if math.isfinite(curves.threshold_w) else math.nan
    rows = [
        (float(watts_to_dbm(p)), float(u1), float(u2), float(e), threshold)
        for p, u1, u2, e in zip(
            curves.upper1.p_grid, curves.upper1.values, curves.upper2.values, curves.eta.values, strict=True
        )
    ]
    return FigureTable("capacity", ("p_dbm", "upper1_bpshz", "upper2_bpshz", "eta_bpshz", "threshold_dbm"), rows)


def three_sample_table(
    config: AppConfig, x2_j: float = 1e-12, engine: MonteCarloEngine | None = None
) -> FigureTable:
    """Three-sample estimate of x² at T = 1e-1/B, 1e-2/B and 1e-3/B, plus the identical-noise case."""
    dc = derive_constants(config.fiber)
    mc = config.monte_carlo
    x = math.sqrt(x2_j)
    rows = []
    for factor in (1e-1, 1e-2, 1e-3):
        est = three_sample_demo(x, factor / dc.params.b, dc, mc.trials, mc.seed, engine=engine)
        rows.append((factor / dc.params.b, "correlated", est.mean.real, est.std_error, x2_j))
    est = three_sample_demo(x, 1e-3 / dc.params.b, dc, mc.trials, mc.seed, same_noise=True, engine=engine)
    rows.append((1e-3 / dc.params.b, "identical", est.mean.real, est.std_error, x2_j))
    return FigureTable("three_sample", ("t_small_s", "noise", "estimate_j", "std_error_j", "x2_j"), rows)


def fsk_table(m_values: Sequence[int] = (2, 4, 8, 16), n0: float = 1.0, target_pe: float = 1e-6) -> FigureTable:
    """FSK minimum distance, union bound and achievable rate per constellation size."""
    rows = []
    for m in m_values:
        demo = fsk_demo(m, n0=n0)
        off = demo.real_gram[~np.eye(m, dtype=bool)]
        power = demo.energy  # T_s = 1
        rows.append(
            (
                m,
                float(np.max(np.abs(off))),
                demo.d_min,
                demo.union_bound_pe,
                demo.energy,
                demo.rate,
                float(fsk_rate(power, n0, 1.0, target_pe)),
            )
        )
    return FigureTable(
        "fsk", ("m", "max_off_diagonal", "d_min", "union_bound_pe", "energy", "rate_bps", "achievable_rate_bps"), rows
    )


def infinite_bandwidth_table(config: AppConfig, t_s: float | None = None) -> FigureTable:
    """Per-sample capacity bound of the infinite-bandwidth model over the power grid."""
    dc = derive_constants(config.fiber)
    period = _symbol_period(dc) if t_s is None else t_s
    limit = infinite_bandwidth_capacity_limit(dc)
    rows = [
        (float(watts_to_dbm(p)), infinite_bandwidth_capacity_bound(float(p), period, dc), limit)
        for p in _p_grid(config)
    ]
    return FigureTable("infinite_bandwidth", ("p_dbm", "capacity_bps", "limit_bps"), rows)
