//! Scenario file schema and its resolution into core types.
//!
//! Scenarios are scientific records, so parsing is strict: unknown keys are
//! rejected at every level, and every physical quantity carries its unit in
//! the key name. Unit conversions (nm to rad/s, the `doubled` beam
//! shorthand) happen here and only here. A parsed file is normalized into a
//! fully resolved form -- defaults made explicit, constants filled in,
//! beams expanded -- and that resolved form is what reports embed, so any
//! report can be re-run verbatim.

use serde::{Deserialize, Serialize};
use vacdisp_core::{
    BeamPair, DetectorModel, DispersionModel, OpticalPath, PathSegment, PhysicalConstants,
    PulseModel, RangingScenario, Wavelength,
};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub constants: Option<ConstantsSpec>,
    pub path: Vec<SegmentSpec>,
    pub beams: BeamsSpec,
    #[serde(default)]
    pub pulse: PulseSpec,
    #[serde(default)]
    pub detector: DetectorSpec,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub k_prime_true: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_shots() -> u64 {
    1
}

/// Optional overrides of the CODATA 2018 constants; omitted fields keep
/// their CODATA values. The resolved form always lists all six.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default)]
    pub c_m_per_s: Option<f64>,
    #[serde(default)]
    pub hbar_j_s: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub elementary_charge_c: Option<f64>,
    #[serde(default)]
    pub vacuum_permittivity_f_per_m: Option<f64>,
    #[serde(default)]
    pub electron_mass_kg: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub length_m: f64,
    pub model: ModelSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    DiracSea(DiracSeaParams),
    ColdPlasma(ColdPlasmaParams),
    CauchyAir(CauchyAirParams),
    Constant(ConstantParams),
    Composite(CompositeParams),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSeaParams {
    pub k_prime: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColdPlasmaParams {
    pub electron_density_per_m3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyAirParams {
    pub a_coeff: f64,
    pub b_coeff_um2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub refractivity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeParams {
    pub parts: Vec<ModelSpec>,
}

/// Either both wavelengths explicitly, or the low one plus `doubled: true`
/// for a frequency-doubled high beam.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsSpec {
    pub lambda_low_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_high_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doubled: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSpec {
    pub sigma_pulse_s: f64,
    pub mean_photons_per_shot: f64,
    pub emission_offset_s: f64,
}

impl Default for PulseSpec {
    fn default() -> Self {
        Self {
            sigma_pulse_s: 0.0,
            mean_photons_per_shot: 1.0,
            emission_offset_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSpec {
    pub jitter_sigma_s: f64,
    pub background_rate_hz: f64,
    pub gate_halfwidth_s: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self {
            jitter_sigma_s: 0.0,
            background_rate_hz: 0.0,
            gate_halfwidth_s: 1e-8,
        }
    }
}

/// A scenario file resolved into validated core types, plus its normalized
/// textual form for report embedding.
#[derive(Debug)]
pub struct ResolvedScenario {
    pub constants: PhysicalConstants,
    pub scenario: RangingScenario,
    /// The normalized file: defaults explicit, constants complete, beam
    /// shorthand expanded. Re-parsing this reproduces the run bit for bit.
    pub normalized: ScenarioFile,
}

impl ResolvedScenario {
    pub fn json(&self) -> String {
        serde_json::to_string(&self.normalized).expect("scenario serialization cannot fail")
    }
}

pub fn load_scenario(path: &std::path::Path) -> Result<ResolvedScenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read scenario `{}`: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("scenario `{}`: {e}", path.display())))?;
    resolve(file)
}

pub fn resolve(mut file: ScenarioFile) -> Result<ResolvedScenario, CliError> {
    let constants = resolve_constants(file.constants.as_ref())?;
    file.constants = Some(echo_constants(&constants));

    if file.path.is_empty() {
        return Err(CliError::Parse("path: must list at least one segment".into()));
    }
    let mut segments = Vec::with_capacity(file.path.len());
    for (i, spec) in file.path.iter().enumerate() {
        let model = build_model(&spec.model)
            .map_err(|e| CliError::Parse(format!("path[{i}].model: {e}")))?;
        let segment = PathSegment::new(spec.length_m, model)
            .map_err(|e| CliError::Parse(format!("path[{i}]: {e}")))?;
        segments.push(segment);
    }
    let path = OpticalPath::new(segments)
        .map_err(|e| CliError::Parse(format!("path: {e}")))?;

    let (beams, normalized_beams) = resolve_beams(&constants, &file.beams)?;
    file.beams = normalized_beams;

    let pulse = PulseModel::new(
        file.pulse.sigma_pulse_s,
        file.pulse.mean_photons_per_shot,
        file.pulse.emission_offset_s,
    )
    .map_err(|e| CliError::Parse(format!("pulse: {e}")))?;
    let detector = DetectorModel::new(
        file.detector.jitter_sigma_s,
        file.detector.background_rate_hz,
        file.detector.gate_halfwidth_s,
    )
    .map_err(|e| CliError::Parse(format!("detector: {e}")))?;

    let scenario = RangingScenario::new(path, beams, pulse, detector, file.shots, file.k_prime_true)
        .map_err(|e| CliError::Parse(format!("scenario: {e}")))?;

    Ok(ResolvedScenario {
        constants,
        scenario,
        normalized: file,
    })
}

fn resolve_constants(spec: Option<&ConstantsSpec>) -> Result<PhysicalConstants, CliError> {
    let codata = PhysicalConstants::codata();
    let Some(spec) = spec else {
        return Ok(codata);
    };
    PhysicalConstants::new(
        spec.c_m_per_s.unwrap_or(codata.c()),
        spec.hbar_j_s.unwrap_or(codata.hbar()),
        spec.alpha.unwrap_or(codata.alpha()),
        spec.elementary_charge_c.unwrap_or(codata.elementary_charge()),
        spec.vacuum_permittivity_f_per_m
            .unwrap_or(codata.vacuum_permittivity()),
        spec.electron_mass_kg.unwrap_or(codata.electron_mass()),
    )
    .map_err(|e| CliError::Parse(format!("constants: {e}")))
}

fn echo_constants(constants: &PhysicalConstants) -> ConstantsSpec {
    ConstantsSpec {
        c_m_per_s: Some(constants.c()),
        hbar_j_s: Some(constants.hbar()),
        alpha: Some(constants.alpha()),
        elementary_charge_c: Some(constants.elementary_charge()),
        vacuum_permittivity_f_per_m: Some(constants.vacuum_permittivity()),
        electron_mass_kg: Some(constants.electron_mass()),
    }
}

fn resolve_beams(
    constants: &PhysicalConstants,
    spec: &BeamsSpec,
) -> Result<(BeamPair, BeamsSpec), CliError> {
    let lambda_low = Wavelength::from_nanometers(spec.lambda_low_nm)
        .map_err(|e| CliError::Parse(format!("beams.lambda_low_nm: {e}")))?;
    let omega_low = constants.omega_from_wavelength(lambda_low);

    let pair = match (spec.lambda_high_nm, spec.doubled) {
        (Some(_), Some(_)) => {
            return Err(CliError::Parse(
                "beams: give either lambda_high_nm or doubled, not both".into(),
            ))
        }
        (None, Some(true)) => BeamPair::doubled(omega_low),
        (None, Some(false)) | (None, None) => {
            return Err(CliError::Parse(
                "beams: missing lambda_high_nm (or set doubled: true)".into(),
            ))
        }
        (Some(high_nm), None) => {
            let lambda_high = Wavelength::from_nanometers(high_nm)
                .map_err(|e| CliError::Parse(format!("beams.lambda_high_nm: {e}")))?;
            let omega_high = constants.omega_from_wavelength(lambda_high);
            BeamPair::new(omega_low, omega_high)
                .map_err(|e| CliError::Parse(format!("beams: {e}")))?
        }
    };

    let normalized = BeamsSpec {
        lambda_low_nm: spec.lambda_low_nm,
        lambda_high_nm: Some(match (spec.lambda_high_nm, spec.doubled) {
            (Some(high_nm), _) => high_nm,
            // half the wavelength is exactly double the frequency
            _ => spec.lambda_low_nm / 2.0,
        }),
        doubled: None,
    };
    Ok((pair, normalized))
}

fn build_model(spec: &ModelSpec) -> Result<DispersionModel, vacdisp_core::DispersionError> {
    match spec {
        ModelSpec::DiracSea(p) => DispersionModel::dirac_sea(p.k_prime),
        ModelSpec::ColdPlasma(p) => DispersionModel::cold_plasma(p.electron_density_per_m3),
        ModelSpec::CauchyAir(p) => DispersionModel::cauchy_air(p.a_coeff, p.b_coeff_um2),
        ModelSpec::Constant(p) => DispersionModel::constant(p.refractivity),
        ModelSpec::Composite(p) => {
            let parts = p
                .parts
                .iter()
                .map(build_model)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DispersionModel::composite(parts))
        }
    }
}
