"""Experiment runners: scenario seeding, variant expansion, row emission.

Randomness is two-level: scenario drops and fading streams are derived
from the master seed with disjoint spawn keys, so any drop or realization
can be regenerated in isolation and results never depend on how work is
scheduled. All dB-to-linear conversion for SNR points happens here; the
estimators below only ever see linear values.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import asymptotics, closedform, mrc
from .channel import ArrayGeometry
from .config import ExperimentSpec, ResolvedVariant
from .reporting import ResultRow
from .scenario import (CellConfig, TerminalLink, calibrate_atten_const,
                       gains_of, sample_drop)
from .units import db_to_lin, lin_to_db

# Spawn-key prefixes keep the seeding domains disjoint.
_DROP, _FADING, _CALIBRATION = 1, 2, 3


def drop_rng(seed: int, drop: int) -> np.random.Generator:
    """Scenario stream of one drop; independent of all fading streams."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_DROP, drop)))


def fading_rng(seed: int, drop: int, variant: int) -> np.random.Generator:
    """Fading stream of one (drop, variant) pair."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(_FADING, drop, variant)))


def calibration_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_CALIBRATION,)))


def _apply_k_mode(links: list[TerminalLink], variant: ResolvedVariant):
    if variant.k_mode == "sampled":
        return links
    if variant.k_mode == "zero":
        return [dataclasses.replace(link, k_factor=0.0, is_los=False)
                for link in links]
    # Fixed mode assigns the same K everywhere; link states and gains stay
    # as drawn, so only the small-scale structure changes.
    k_value = float(db_to_lin(variant.k_fixed_db))
    return [dataclasses.replace(link, k_factor=k_value, is_los=True)
            for link in links]


def _apply_correlation(links: list[TerminalLink], variant: ResolvedVariant):
    if variant.correlation == "unequal":
        return links
    # Equal mode: every terminal sees the first terminal's diffuse angle
    # set, giving one shared correlation structure per drop.
    shared = links[0].diffuse_angles_rad
    return [dataclasses.replace(link, diffuse_angles_rad=shared.copy())
            for link in links]


def variant_links(spec: ExperimentSpec, variant: ResolvedVariant,
                  drop: int) -> list[TerminalLink]:
    """Sample one drop for one variant.

    Variants that share a profile and angular support see identical
    large-scale draws because the drop stream depends only on the master
    seed and drop index.
    """
    links = sample_drop(drop_rng(spec.seed, drop), spec.cell(variant),
                        variant.profile)
    return _apply_correlation(_apply_k_mode(links, variant), variant)


def _mc_rows(exp_id, sweep_var, sweep_value, curve, index, track, seed):
    report = curve.report(index)
    tracked = float(report.per_terminal_sinr[track])
    tracked_err = float(report.mc_std_err[track])
    return [
        ResultRow(exp_id, sweep_var, sweep_value, str(track), mrc.MONTE_CARLO,
                  tracked, float(lin_to_db(tracked)), tracked_err, seed),
        ResultRow(exp_id, sweep_var, sweep_value, "avg", mrc.MONTE_CARLO,
                  report.avg_sinr, float(lin_to_db(report.avg_sinr)),
                  report.avg_sinr_std_err, seed),
    ]


def _analytic_rows(exp_id, sweep_var, sweep_value, sinr_all, track, seed,
                   method=mrc.CLOSED_FORM):
    tracked = float(sinr_all[track])
    avg = float(np.mean(sinr_all))
    return [
        ResultRow(exp_id, sweep_var, sweep_value, str(track), method,
                  tracked, float(lin_to_db(tracked)), None, seed),
        ResultRow(exp_id, sweep_var, sweep_value, "avg", method,
                  avg, float(lin_to_db(avg)), None, seed),
    ]


def _limit_methods(limit_mode: str):
    if limit_mode == "plain":
        return ((mrc.LIMIT, asymptotics.limiting_sinr_all),)
    if limit_mode == "full":
        return ((mrc.LIMIT_FULL, asymptotics.full_limit_sinr_all),)
    return ((mrc.LIMIT, asymptotics.limiting_sinr_all),
            (mrc.LIMIT_FULL, asymptotics.full_limit_sinr_all))


def run_snr_sweep(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Expected SINR versus SNR for one drop, all variants."""
    rows: list[ResultRow] = []
    num_antennas = spec.num_antennas[0]
    snrs = db_to_lin(np.array(spec.snr_db))
    for v_idx, variant in enumerate(spec.resolve_variants()):
        exp_id = spec.experiment_id(variant)
        links = variant_links(spec, variant, drop=0)
        geom = ArrayGeometry(num_antennas, variant.aperture_wl)
        gains = gains_of(links)
        moments = closedform.channel_moments(geom, links)
        curve = None
        if spec.include_mc:
            curve = mrc.mc_snr_curve(geom, links, snrs, spec.n_fading,
                                     fading_rng(spec.seed, 0, v_idx),
                                     spec.noise_power, threads)
        for s_idx, snr_db in enumerate(spec.snr_db):
            if curve is not None:
                rows.extend(_mc_rows(exp_id, "snr_db", snr_db, curve, s_idx,
                                     spec.track_terminal, spec.seed))
            sinr_all = closedform.expected_sinr_all(moments, gains, snrs[s_idx])
            rows.extend(_analytic_rows(exp_id, "snr_db", snr_db, sinr_all,
                                       spec.track_terminal, spec.seed))
    return rows


def run_sum_se_cdf(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Empirical CDF of the ergodic sum SE over scenario drops.

    Emits sorted (value, probability) pairs per variant and method; the
    probability rides in ``sweep_value`` and the drop that produced each
    value can be recovered through its Monte-Carlo standard error.
    """
    rows: list[ResultRow] = []
    num_antennas = spec.num_antennas[0]
    snr = float(db_to_lin(spec.snr_db[0]))
    for v_idx, variant in enumerate(spec.resolve_variants()):
        exp_id = spec.experiment_id(variant)
        geom = ArrayGeometry(num_antennas, variant.aperture_wl)
        mc_values, mc_errs, cf_values = [], [], []
        for drop in range(spec.n_drops):
            links = variant_links(spec, variant, drop)
            gains = gains_of(links)
            if spec.include_mc:
                report = mrc.mc_ergodic_sum_se(
                    geom, links, snr, spec.n_fading,
                    fading_rng(spec.seed, drop, v_idx),
                    spec.noise_power, threads)
                mc_values.append(report.sum_se_bits)
                mc_errs.append(report.sum_se_std_err)
            moments = closedform.channel_moments(geom, links)
            cf_values.append(closedform.approx_sum_se(moments, gains, snr))
        for method, values, errs in ((mrc.MONTE_CARLO, mc_values, mc_errs),
                                     (mrc.CLOSED_FORM, cf_values, None)):
            if not values:
                continue
            order = np.argsort(values)
            for rank, idx in enumerate(order):
                prob = (rank + 1) / len(values)
                value = float(values[idx])
                rows.append(ResultRow(
                    exp_id, "cdf_prob", prob, "sum", method, value,
                    float(lin_to_db(value)),
                    float(errs[idx]) if errs is not None else None,
                    spec.seed))
    return rows


def run_antenna_sweep(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Expected SINR versus antenna count, with limiting values.

    One drop per variant; diffuse and specular angles are held fixed
    while the array densifies, so convergence to the limit is
    well-defined. Limit rows carry ``sweep_value = inf``.
    """
    rows: list[ResultRow] = []
    snr = float(db_to_lin(spec.snr_db[0]))
    for v_idx, variant in enumerate(spec.resolve_variants()):
        exp_id = spec.experiment_id(variant)
        links = variant_links(spec, variant, drop=0)
        gains = gains_of(links)
        for m_idx, num_antennas in enumerate(spec.num_antennas):
            geom = ArrayGeometry(num_antennas, variant.aperture_wl)
            moments = closedform.channel_moments(geom, links)
            sinr_all = closedform.expected_sinr_all(moments, gains, snr)
            rows.extend(_analytic_rows(exp_id, "num_antennas",
                                       float(num_antennas), sinr_all,
                                       spec.track_terminal, spec.seed))
            if spec.include_mc:
                curve = mrc.mc_snr_curve(
                    geom, links, [snr], spec.n_fading,
                    fading_rng(spec.seed, 0, v_idx * len(spec.num_antennas) + m_idx),
                    spec.noise_power, threads)
                rows.extend(_mc_rows(exp_id, "num_antennas",
                                     float(num_antennas), curve, 0,
                                     spec.track_terminal, spec.seed))
        if len(links) >= 2:
            terms = asymptotics.limit_terms(links, variant.aperture_wl)
            for method, evaluate in _limit_methods(spec.limit_mode):
                sinr_all = evaluate(terms, gains, snr)
                rows.extend(_analytic_rows(exp_id, "num_antennas",
                                           float("inf"), sinr_all,
                                           spec.track_terminal, spec.seed,
                                           method=method))
    return rows


def run_single(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Full per-terminal diagnostic at each SNR point for one drop."""
    rows: list[ResultRow] = []
    num_antennas = spec.num_antennas[0]
    snrs = db_to_lin(np.array(spec.snr_db))
    for v_idx, variant in enumerate(spec.resolve_variants()):
        exp_id = spec.experiment_id(variant)
        links = variant_links(spec, variant, drop=0)
        geom = ArrayGeometry(num_antennas, variant.aperture_wl)
        gains = gains_of(links)
        moments = closedform.channel_moments(geom, links)
        curve = None
        if spec.include_mc:
            curve = mrc.mc_snr_curve(geom, links, snrs, spec.n_fading,
                                     fading_rng(spec.seed, 0, v_idx),
                                     spec.noise_power, threads)
        terms = None
        if len(links) >= 2:
            terms = asymptotics.limit_terms(links, variant.aperture_wl)
        for s_idx, snr_db in enumerate(spec.snr_db):
            per_method = []
            if curve is not None:
                report = curve.report(s_idx)
                per_method.append((mrc.MONTE_CARLO, report.per_terminal_sinr,
                                   report.mc_std_err, report.sum_se_bits,
                                   report.sum_se_std_err))
            cf = closedform.expected_sinr_all(moments, gains, snrs[s_idx])
            cf_se = closedform.approx_sum_se(moments, gains, snrs[s_idx])
            per_method.append((mrc.CLOSED_FORM, cf, None, cf_se, None))
            if terms is not None:
                for method, evaluate in _limit_methods(spec.limit_mode):
                    sinr_all = evaluate(terms, gains, snrs[s_idx])
                    se = float(np.sum(np.log1p(sinr_all)) / np.log(2.0))
                    per_method.append((method, sinr_all, None, se, None))
            for method, sinr_all, errs, sum_se, sum_se_err in per_method:
                for term in range(spec.num_terminals):
                    value = float(sinr_all[term])
                    rows.append(ResultRow(
                        exp_id, "snr_db", snr_db, str(term), method, value,
                        float(lin_to_db(value)),
                        float(errs[term]) if errs is not None else None,
                        spec.seed))
                avg = float(np.mean(sinr_all))
                rows.append(ResultRow(exp_id, "snr_db", snr_db, "avg", method,
                                      avg, float(lin_to_db(avg)), None,
                                      spec.seed))
                rows.append(ResultRow(exp_id, "snr_db", snr_db, "sum", method,
                                      float(sum_se), float(lin_to_db(sum_se)),
                                      sum_se_err, spec.seed))
    return rows


def calibrate_from_spec(spec: ExperimentSpec) -> float:
    """Run the attenuation-constant calibration described by the spec."""
    variant = spec.resolve_variants()[0]
    geom = ArrayGeometry(spec.num_antennas[0], variant.aperture_wl)
    options = spec.calibration
    return calibrate_atten_const(
        geom, spec.cell(variant), variant.profile,
        calibration_rng(spec.seed),
        n_drops=options.n_drops, n_fading=options.n_fading,
        snr=float(db_to_lin(spec.snr_db[0])),
        percentile=options.percentile, target_db=options.target_db,
        tol_db=options.tol_db)


def run_calibrate(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Calibration as a run: one row carrying the calibrated constant."""
    const = calibrate_from_spec(spec)
    return [ResultRow(spec.name, "atten_const", const, "pooled", "calibration",
                      const, float(lin_to_db(const)), None, spec.seed)]


_RUNNERS = {
    "snr_sweep": run_snr_sweep,
    "sum_se_cdf": run_sum_se_cdf,
    "antenna_sweep": run_antenna_sweep,
    "single": run_single,
    "calibrate": run_calibrate,
}


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Dispatch a validated spec to its runner."""
    return _RUNNERS[spec.kind](spec, threads)
