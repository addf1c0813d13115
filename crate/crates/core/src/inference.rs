//! Estimation of the two-color differential delay from event data, its
//! conversion to an estimate or bound on the dispersion coefficient k',
//! and sensitivity mapping over detector configurations.
//!
//! The location estimator is deliberately plain: per channel, anchor on
//! the median, drop events more than five median absolute deviations out,
//! then take a symmetric trimmed mean. That is robust to uniform
//! background without fitting any distribution, and its bias is zero for
//! symmetric noise. Everything downstream is exact linear algebra on the
//! dispersion law: the differential delay is affine in k', so inversion is
//! a subtraction and a division.

use crate::montecarlo::{Channel, EventSet, RangingScenario};
use crate::physconst::PhysicalConstants;
use crate::propagation::PropagationError;
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("{channel:?} channel has fewer than 2 usable events")]
    InsufficientEvents { channel: Channel },
    #[error("trim fraction must lie in [0, 0.5), got {0}")]
    InvalidTrimFraction(f64),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error("k' sensitivity coefficient underflowed to zero for this scenario")]
    ZeroSensitivity,
    #[error("expected photon count per channel must be positive")]
    ZeroPhotonBudget,
    #[error("confidence multiplier z must be strictly positive and finite, got {0}")]
    InvalidZ(f64),
    #[error("sensitivity sweep grids must be non-empty")]
    EmptyGrid,
    #[error("grid value `{name}` must be {requirement}, got {value}")]
    InvalidGridValue {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

/// Robust location difference between the two channels.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayEstimate {
    /// High-channel location minus low-channel location, seconds.
    pub delta_t_hat_s: f64,
    /// Standard error of the difference, seconds.
    pub sigma_s: f64,
    /// Events used (after gating and trimming) per channel.
    pub n_low: usize,
    pub n_high: usize,
    /// Estimator descriptor, e.g. `median-mad5-trim0.100`.
    pub method: String,
    /// True when the spread collapsed to zero (ties or a single usable
    /// event), so the standard error carries no information.
    pub degenerate: bool,
}

/// Point estimate and z-interval on the dispersion coefficient k'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPrimeBound {
    pub k_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
    /// The k'-independent differential (emission offset plus confounder
    /// media) that was subtracted before inverting the linear law.
    pub confounder_correction_s: f64,
}

/// One cell of a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub jitter_sigma_s: f64,
    pub photons_per_channel: u64,
    pub min_detectable_kprime: f64,
}

/// Minimum detectable k' over a (jitter, photon-count) grid for a fixed
/// scenario, at a stated confidence multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub scenario_descriptor: String,
    pub z: f64,
    /// Cells in row-major order: jitter outer, photon count inner.
    pub cells: Vec<SweepCell>,
}

impl SensitivityReport {
    /// Checks the defining monotonicity: the minimum detectable k' never
    /// increases with photon count and never decreases with jitter.
    pub fn is_monotone(&self) -> bool {
        for a in &self.cells {
            for b in &self.cells {
                if a.jitter_sigma_s == b.jitter_sigma_s
                    && b.photons_per_channel > a.photons_per_channel
                    && b.min_detectable_kprime > a.min_detectable_kprime
                {
                    return false;
                }
                if a.photons_per_channel == b.photons_per_channel
                    && b.jitter_sigma_s > a.jitter_sigma_s
                    && b.min_detectable_kprime < a.min_detectable_kprime
                {
                    return false;
                }
            }
        }
        true
    }

    /// Writes `jitter_s,photons,min_kprime` rows in grid order.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "jitter_s,photons,min_kprime")?;
        for cell in &self.cells {
            writeln!(
                out,
                "{:e},{},{:e}",
                cell.jitter_sigma_s, cell.photons_per_channel, cell.min_detectable_kprime
            )?;
        }
        Ok(())
    }
}

/// Robust two-channel location difference: per channel, median anchor,
/// +-5 MAD gate, then a symmetric trimmed mean with `trim_fraction`
/// removed from each tail. The standard error combines the trimmed-sample
/// standard deviations of both channels.
pub fn estimate_differential_delay(
    low: &EventSet,
    high: &EventSet,
    trim_fraction: f64,
) -> Result<DelayEstimate, InferenceError> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(InferenceError::InvalidTrimFraction(trim_fraction));
    }
    let (loc_low, s_low, n_low) = channel_location(low, trim_fraction)?;
    let (loc_high, s_high, n_high) = channel_location(high, trim_fraction)?;
    let sigma_s =
        (s_low * s_low / n_low as f64 + s_high * s_high / n_high as f64).sqrt();
    Ok(DelayEstimate {
        delta_t_hat_s: loc_high - loc_low,
        sigma_s,
        n_low,
        n_high,
        method: format!("median-mad5-trim{trim_fraction:.3}"),
        degenerate: sigma_s <= 0.0,
    })
}

fn channel_location(
    set: &EventSet,
    trim_fraction: f64,
) -> Result<(f64, f64, usize), InferenceError> {
    let insufficient = || InferenceError::InsufficientEvents {
        channel: set.channel(),
    };
    if set.len() < 2 {
        return Err(insufficient());
    }
    let mut residuals: Vec<f64> = set.residuals().collect();
    residuals.sort_by(f64::total_cmp);

    let med = sorted_median(&residuals);
    let mut deviations: Vec<f64> = residuals.iter().map(|r| (r - med).abs()).collect();
    deviations.sort_by(f64::total_cmp);
    let mad = sorted_median(&deviations);

    // still sorted: filtering preserves order
    let kept: Vec<f64> = residuals
        .into_iter()
        .filter(|r| (r - med).abs() <= 5.0 * mad)
        .collect();
    if kept.len() < 2 {
        return Err(insufficient());
    }

    let cut = (trim_fraction * kept.len() as f64).floor() as usize;
    let trimmed = &kept[cut..kept.len() - cut];
    let n = trimmed.len();
    // sorted, so equal endpoints mean an all-tied sample; return the tied
    // value exactly instead of letting summation dust pollute the mean
    if trimmed[0] == trimmed[n - 1] {
        return Ok((trimmed[0], 0.0, n));
    }
    let mean = trimmed.iter().sum::<f64>() / n as f64;
    let stddev = if n < 2 {
        0.0
    } else {
        let ss = trimmed.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok((mean, stddev, n))
}

fn sorted_median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Inverts the affine delay law: k' = (delta_t - offset - confounder) /
/// sensitivity, with a z-interval scaled by the same exact slope.
pub fn infer_kprime(
    consts: &PhysicalConstants,
    estimate: &DelayEstimate,
    scenario: &RangingScenario,
    z: f64,
) -> Result<KPrimeBound, InferenceError> {
    check_z(z)?;
    let sensitivity = checked_sensitivity(consts, scenario)?;
    let confounder = scenario
        .path()
        .with_dirac_kprime(0.0)
        .differential_delay(consts, scenario.beams())?;
    let correction = scenario.pulse().emission_offset_s() + confounder;
    let k_hat = (estimate.delta_t_hat_s - correction) / sensitivity;
    let half_width = z * estimate.sigma_s / sensitivity.abs();
    Ok(KPrimeBound {
        k_hat,
        ci_low: k_hat - half_width,
        ci_high: k_hat + half_width,
        z,
        confounder_correction_s: correction,
    })
}

/// The smallest |k'| distinguishable from zero at multiplier `z`, given
/// the scenario's expected photon budget: z * sigma_dt / sensitivity with
/// sigma_dt = sigma_tot * sqrt(1/N_low + 1/N_high).
pub fn min_detectable_kprime(
    consts: &PhysicalConstants,
    scenario: &RangingScenario,
    z: f64,
) -> Result<f64, InferenceError> {
    check_z(z)?;
    let sensitivity = checked_sensitivity(consts, scenario)?;
    let photons = scenario.shots() as f64 * scenario.pulse().mean_photons_per_shot();
    if photons <= 0.0 {
        return Err(InferenceError::ZeroPhotonBudget);
    }
    let sigma_tot = sigma_total(
        scenario.pulse().sigma_pulse_s(),
        scenario.detector().jitter_sigma_s(),
    );
    Ok(min_kprime_closed_form(sigma_tot, photons, z, sensitivity))
}

/// Tabulates the minimum detectable k' over a jitter x photon-count grid,
/// holding the rest of the scenario fixed. Grid jitter replaces the
/// scenario's detector jitter; grid photon counts are totals per channel.
pub fn sensitivity_sweep(
    consts: &PhysicalConstants,
    scenario: &RangingScenario,
    jitter_grid: &[f64],
    photon_grid: &[u64],
    z: f64,
) -> Result<SensitivityReport, InferenceError> {
    check_z(z)?;
    if jitter_grid.is_empty() || photon_grid.is_empty() {
        return Err(InferenceError::EmptyGrid);
    }
    for &jitter in jitter_grid {
        if !(jitter.is_finite() && jitter >= 0.0) {
            return Err(InferenceError::InvalidGridValue {
                name: "jitter_sigma_s",
                requirement: "finite and >= 0",
                value: jitter,
            });
        }
    }
    for &photons in photon_grid {
        if photons == 0 {
            return Err(InferenceError::InvalidGridValue {
                name: "photons_per_channel",
                requirement: ">= 1",
                value: 0.0,
            });
        }
    }
    let sensitivity = checked_sensitivity(consts, scenario)?;
    let sigma_pulse = scenario.pulse().sigma_pulse_s();

    let mut cells = Vec::with_capacity(jitter_grid.len() * photon_grid.len());
    for &jitter in jitter_grid {
        for &photons in photon_grid {
            cells.push(SweepCell {
                jitter_sigma_s: jitter,
                photons_per_channel: photons,
                min_detectable_kprime: min_kprime_closed_form(
                    sigma_total(sigma_pulse, jitter),
                    photons as f64,
                    z,
                    sensitivity,
                ),
            });
        }
    }
    let report = SensitivityReport {
        scenario_descriptor: format!(
            "total_length_m={:e};omega_low_rad_per_s={:e};omega_high_rad_per_s={:e};sigma_pulse_s={:e}",
            scenario.path().total_length_m(),
            scenario.beams().omega_low().rad_per_s(),
            scenario.beams().omega_high().rad_per_s(),
            sigma_pulse,
        ),
        z,
        cells,
    };
    debug_assert!(report.is_monotone());
    Ok(report)
}

fn check_z(z: f64) -> Result<(), InferenceError> {
    if z.is_finite() && z > 0.0 {
        Ok(())
    } else {
        Err(InferenceError::InvalidZ(z))
    }
}

fn checked_sensitivity(
    consts: &PhysicalConstants,
    scenario: &RangingScenario,
) -> Result<f64, InferenceError> {
    let sensitivity = scenario
        .path()
        .kprime_sensitivity(consts, scenario.beams())?;
    if sensitivity.abs() < f64::MIN_POSITIVE {
        return Err(InferenceError::ZeroSensitivity);
    }
    Ok(sensitivity)
}

fn sigma_total(sigma_pulse_s: f64, jitter_sigma_s: f64) -> f64 {
    sigma_pulse_s.hypot(jitter_sigma_s)
}

fn min_kprime_closed_form(sigma_tot: f64, photons_per_channel: f64, z: f64, sensitivity: f64) -> f64 {
    let sigma_dt = sigma_tot * (2.0 / photons_per_channel).sqrt();
    z * sigma_dt / sensitivity.abs()
}
