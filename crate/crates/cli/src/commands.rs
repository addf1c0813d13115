//! The five subcommands. Each returns the rendered run report; CSVs go to
//! explicit paths only.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use vacdisp_core::inference::{
    estimate_differential_delay, infer_kprime, sensitivity_sweep,
};
use vacdisp_core::montecarlo::{
    read_events_csv, session_summary, simulate_session, write_events_csv, ChannelSummary,
};
use vacdisp_core::{
    Channel, DispersionModel, EventSet, OpticalPath, PhysicalConstants, SimulationError,
    Wavelength,
};

use crate::error::CliError;
use crate::report::Report;
use crate::scenario::{load_scenario, ResolvedScenario};

/// Default trim fraction for the robust estimator: 10% from each tail.
const DEFAULT_TRIM_FRACTION: f64 = 0.1;

/// Earth-Moon round-trip distance used by the audit, m.
const AUDIT_ROUND_TRIP_M: f64 = 7.688e8;
/// Round-trip timing accuracy of a millimeter-class ranging station, s.
const AUDIT_TIMING_ACCURACY_S: f64 = 60e-12;
/// Commonly quoted figures this toolkit cross-checks.
const QUOTED_ROUND_TRIP_TIME_S: f64 = 600.0;
const QUOTED_RELATIVE_ACCURACY: f64 = 1e-13;
const QUOTED_INDEX_CORRECTION_LOW: f64 = 1e-9;
const QUOTED_INDEX_CORRECTION_HIGH: f64 = 1e-8;

fn begin_report(command: &str, resolved: &ResolvedScenario) -> Report {
    let mut report = Report::new(command);
    report.push_str("scenario_json", resolved.json());
    report.push_int("seed", resolved.normalized.seed);
    report
}

pub fn cmd_delay(scenario_path: &Path) -> Result<String, CliError> {
    let resolved = load_scenario(scenario_path)?;
    let consts = &resolved.constants;
    let scenario = &resolved.scenario;
    let path = scenario.path();
    let beams = scenario.beams();

    let flight_low = path.time_of_flight(consts, beams.omega_low())?;
    let excess_high = path.excess_delay(consts, beams.omega_high())?;
    let differential = path.differential_delay(consts, beams)?;

    let mut report = begin_report("delay", &resolved);
    report.push_str("lambda_low_nm", resolved.normalized.beams.lambda_low_nm);
    report.push_str(
        "lambda_high_nm",
        resolved
            .normalized
            .beams
            .lambda_high_nm
            .expect("beams are resolved"),
    );
    report.push_float("omega_low_rad_per_s", beams.omega_low().rad_per_s());
    report.push_float("omega_high_rad_per_s", beams.omega_high().rad_per_s());
    report.push_float("path_total_length_m", path.total_length_m());
    report.push_float("geometric_s", flight_low.geometric_s);
    report.push_float("excess_low_s", flight_low.excess_s);
    report.push_float("excess_high_s", excess_high);
    report.push_float("differential_delay_s", differential);
    match path.kprime_sensitivity(consts, beams) {
        Ok(sensitivity) => report.push_float("kprime_sensitivity_s", sensitivity),
        Err(vacdisp_core::PropagationError::NoDiracSeaSegment) => {
            report.push_str("warning", "no_dirac_sea_segment");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report.render())
}

pub fn cmd_simulate(
    scenario_path: &Path,
    out_path: &Path,
    seed_override: Option<u64>,
) -> Result<String, CliError> {
    let mut resolved = load_scenario(scenario_path)?;
    if let Some(seed) = seed_override {
        resolved.normalized.seed = seed;
    }
    let seed = resolved.normalized.seed;
    let consts = &resolved.constants;
    let scenario = &resolved.scenario;

    // gate centers: the injected-truth excess delays (plus the controlled
    // emission offset on the high channel)
    let injected = scenario.path().with_dirac_kprime(scenario.k_prime_true());
    let predicted_low = injected.excess_delay(consts, scenario.beams().omega_low())?;
    let predicted_high = injected.excess_delay(consts, scenario.beams().omega_high())?
        + scenario.pulse().emission_offset_s();

    let (low, high, warning) = match simulate_session(consts, scenario, seed) {
        Ok((low, high)) => (low, high, None),
        Err(SimulationError::EmptySession) => (
            EventSet::empty(Channel::Low),
            EventSet::empty(Channel::High),
            Some("empty_session"),
        ),
        Err(e) => return Err(e.into()),
    };

    let file = File::create(out_path)
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", out_path.display())))?;
    let mut writer = BufWriter::new(file);
    write_events_csv(&mut writer, &low, &high)
        .and_then(|()| writer.flush())
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", out_path.display())))?;

    let summary = session_summary(&low, &high);
    let mut report = begin_report("simulate", &resolved);
    report.push_str("events_csv", out_path.display());
    report.push_float("predicted_residual_low_s", predicted_low);
    report.push_float("predicted_residual_high_s", predicted_high);
    push_channel_summary(&mut report, "low", &summary.low);
    push_channel_summary(&mut report, "high", &summary.high);
    if let Some(warning) = warning {
        report.push_str("warning", warning);
    }
    Ok(report.render())
}

fn push_channel_summary(report: &mut Report, name: &str, summary: &ChannelSummary) {
    report.push_int(format!("events_{name}_count").as_str(), summary.count as u64);
    report.push_int(
        format!("events_{name}_truncated").as_str(),
        summary.truncated,
    );
    report.push_optional_float(
        format!("events_{name}_mean_residual_s").as_str(),
        summary.mean_residual_s,
    );
    report.push_optional_float(
        format!("events_{name}_stddev_residual_s").as_str(),
        summary.stddev_residual_s,
    );
}

pub fn cmd_infer(scenario_path: &Path, events_path: &Path, z: f64) -> Result<String, CliError> {
    let resolved = load_scenario(scenario_path)?;
    let consts = &resolved.constants;
    let scenario = &resolved.scenario;

    let file = File::open(events_path)
        .map_err(|e| CliError::Data(format!("cannot read `{}`: {e}", events_path.display())))?;
    let (low, high) = read_events_csv(BufReader::new(file))?;

    let estimate = estimate_differential_delay(&low, &high, DEFAULT_TRIM_FRACTION)?;
    let bound = infer_kprime(consts, &estimate, scenario, z)?;
    let sensitivity = scenario
        .path()
        .kprime_sensitivity(consts, scenario.beams())?;

    let mut report = begin_report("infer", &resolved);
    report.push_str("events_csv", events_path.display());
    report.push_int("n_low_used", estimate.n_low as u64);
    report.push_int("n_high_used", estimate.n_high as u64);
    report.push_str("estimator", &estimate.method);
    report.push_str("estimate_degenerate", estimate.degenerate);
    report.push_float("delta_t_hat_s", estimate.delta_t_hat_s);
    report.push_float("delta_sigma_s", estimate.sigma_s);
    report.push_float("kprime_sensitivity_s", sensitivity);
    report.push_float("confounder_correction_s", bound.confounder_correction_s);
    report.push_float("z", bound.z);
    report.push_float("k_hat", bound.k_hat);
    report.push_float("k_ci_low", bound.ci_low);
    report.push_float("k_ci_high", bound.ci_high);
    Ok(report.render())
}

pub fn cmd_sweep(
    scenario_path: &Path,
    out_path: &Path,
    jitter_ps: &[f64],
    photons: &[u64],
    z: f64,
) -> Result<String, CliError> {
    let resolved = load_scenario(scenario_path)?;
    let jitter_s: Vec<f64> = jitter_ps.iter().map(|ps| ps * 1e-12).collect();

    let sweep = sensitivity_sweep(&resolved.constants, &resolved.scenario, &jitter_s, photons, z)?;
    if !sweep.is_monotone() {
        return Err(CliError::Physics(
            "internal: sensitivity sweep violated its monotonicity invariant".into(),
        ));
    }

    let file = File::create(out_path)
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", out_path.display())))?;
    let mut writer = BufWriter::new(file);
    sweep
        .write_csv(&mut writer)
        .and_then(|()| writer.flush())
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", out_path.display())))?;

    let best = sweep
        .cells
        .iter()
        .map(|c| c.min_detectable_kprime)
        .fold(f64::INFINITY, f64::min);
    let worst = sweep
        .cells
        .iter()
        .map(|c| c.min_detectable_kprime)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut report = begin_report("sweep", &resolved);
    report.push_str("sweep_csv", out_path.display());
    report.push_float("z", z);
    report.push_str(
        "jitter_grid_ps",
        jitter_ps
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.push_str(
        "photon_grid",
        photons
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.push_int("sweep_rows", sweep.cells.len() as u64);
    report.push_float("sweep_min_kprime_best", best);
    report.push_float("sweep_min_kprime_worst", worst);
    Ok(report.render())
}

/// Recomputes the headline figures of the two-color ranging concept from
/// CODATA constants and geometry, and flags each against its commonly
/// quoted value. A pairwise flag is CONSISTENT when the numbers agree
/// within a factor of two, MISMATCH otherwise; detectability is CONSISTENT
/// when the implied differential exceeds the timing accuracy.
pub fn cmd_audit() -> Result<String, CliError> {
    let consts = PhysicalConstants::codata();
    let omega_low = consts.omega_from_wavelength(
        Wavelength::from_nanometers(1064.0).expect("static wavelength"),
    );
    let omega_high = consts.omega_from_wavelength(
        Wavelength::from_nanometers(532.0).expect("static wavelength"),
    );

    // (a) the dispersive index correction alpha r^2 at 532 nm
    let r_532 = consts.r_of_omega(omega_high);
    let alpha_r_squared = consts.alpha() * r_532 * r_532;

    // (b) round-trip light time over the Earth-Moon distance
    let round_trip_s = AUDIT_ROUND_TRIP_M / consts.c();

    // (c) relative timing accuracy achievable at 60 ps
    let relative_accuracy = AUDIT_TIMING_ACCURACY_S / round_trip_s;

    // (d) two-color differential implied by an index correction of 1e-9 at
    // the low color, pushed through the actual dispersion machinery
    let path = OpticalPath::single(
        AUDIT_ROUND_TRIP_M,
        DispersionModel::dirac_sea(1.0).expect("static model"),
    )
    .expect("static path");
    let beams = vacdisp_core::BeamPair::doubled(omega_low);
    let sensitivity = path.kprime_sensitivity(&consts, &beams)?;
    let r_low = consts.r_of_omega(omega_low);
    let implied_kprime = QUOTED_INDEX_CORRECTION_LOW / (consts.alpha() * r_low * r_low);
    let implied_differential_s = implied_kprime * sensitivity;

    let mut report = Report::new("audit");
    report.push_float("computed_alpha_r_squared_532nm", alpha_r_squared);
    report.push_float("quoted_index_correction_low", QUOTED_INDEX_CORRECTION_LOW);
    report.push_float("quoted_index_correction_high", QUOTED_INDEX_CORRECTION_HIGH);
    report.push_str(
        "flag_index_correction",
        flag_against_range(
            alpha_r_squared,
            QUOTED_INDEX_CORRECTION_LOW,
            QUOTED_INDEX_CORRECTION_HIGH,
        ),
    );

    report.push_float("computed_round_trip_time_s", round_trip_s);
    report.push_float("quoted_round_trip_time_s", QUOTED_ROUND_TRIP_TIME_S);
    report.push_str(
        "flag_round_trip_time",
        flag_against_value(round_trip_s, QUOTED_ROUND_TRIP_TIME_S),
    );

    report.push_float("timing_accuracy_s", AUDIT_TIMING_ACCURACY_S);
    report.push_float("computed_relative_timing_accuracy", relative_accuracy);
    report.push_float("quoted_relative_timing_accuracy", QUOTED_RELATIVE_ACCURACY);
    report.push_str(
        "flag_relative_timing_accuracy",
        flag_against_value(relative_accuracy, QUOTED_RELATIVE_ACCURACY),
    );

    report.push_float("assumed_index_correction", QUOTED_INDEX_CORRECTION_LOW);
    report.push_float("implied_differential_delay_s", implied_differential_s);
    report.push_str(
        "flag_detectability",
        if implied_differential_s >= AUDIT_TIMING_ACCURACY_S {
            "CONSISTENT"
        } else {
            "MISMATCH"
        },
    );
    Ok(report.render())
}

fn flag_against_value(computed: f64, quoted: f64) -> &'static str {
    let ratio = computed / quoted;
    if (0.5..=2.0).contains(&ratio) {
        "CONSISTENT"
    } else {
        "MISMATCH"
    }
}

fn flag_against_range(computed: f64, low: f64, high: f64) -> &'static str {
    if computed >= low / 2.0 && computed <= high * 2.0 {
        "CONSISTENT"
    } else {
        "MISMATCH"
    }
}
