//! Refractivity models rho(omega) = n(omega) - 1 and their exact analytic
//! frequency derivatives.
//!
//! The index of refraction is never stored as `n` itself: every medium here
//! is tenuous (|n - 1| below 1e-2, usually far below), and the quantity of
//! interest lives at the 1e-13 level where `1 + rho` in one `f64` would keep
//! only a few significant digits. All arithmetic stays in refractivity
//! space, and the plasma branch uses a cancellation-free form of
//! `sqrt(1 - x) - 1` so densities down to interplanetary values evaluate
//! without loss.
//!
//! Every branch depends on frequency only through an even power (r(omega)^2,
//! omega^2, or lambda^2), so the refractivity is an even function of the
//! sign of omega by construction; the internal evaluators take a signed
//! magnitude to make that property directly testable.

use crate::physconst::{AngularFrequency, PhysicalConstants};
use thiserror::Error;

/// Refractivities above this magnitude are rejected: all media in scope are
/// tenuous, and a larger value almost certainly means a unit mistake in a
/// model parameter.
pub const TENUOUS_LIMIT: f64 = 1e-2;

#[derive(Debug, Error, PartialEq)]
pub enum DispersionError {
    #[error(
        "wave at {omega_rad_per_s} rad/s does not propagate below the plasma cutoff \
         {omega_p_rad_per_s} rad/s"
    )]
    BelowPlasmaCutoff {
        omega_rad_per_s: f64,
        omega_p_rad_per_s: f64,
    },
    #[error("refractivity {refractivity} exceeds the tenuous-medium bound {TENUOUS_LIMIT}")]
    RefractivityOutOfRange { refractivity: f64 },
    #[error("model parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

/// A refractive-index excess n - 1, dimensionless and signed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Refractivity(f64);

impl Refractivity {
    pub fn new(value: f64) -> Result<Self, DispersionError> {
        if value.abs() < TENUOUS_LIMIT {
            Ok(Self(value))
        } else {
            Err(DispersionError::RefractivityOutOfRange {
                refractivity: value,
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A family of refractivity laws rho(omega) = n(omega) - 1.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionModel {
    /// Candidate vacuum dispersion: rho = k' alpha r(omega)^2 with
    /// r = hbar omega / (m_e c^2). `k_prime` is the dimensionless
    /// coefficient the whole experiment is designed to measure.
    DiracSea { k_prime: f64 },
    /// Cold electron plasma: rho = sqrt(1 - omega_p^2/omega^2) - 1 with
    /// omega_p^2 = n_e e^2 / (eps0 m_e). `electron_density` in m^-3.
    ColdPlasma { electron_density: f64 },
    /// Two-term Cauchy fit for air: rho = a (1 + b / lambda_um^2) with the
    /// wavelength in micrometers. `b_coeff_um2` in um^2.
    CauchyAir { a_coeff: f64, b_coeff_um2: f64 },
    /// Frequency-independent refractivity.
    Constant { refractivity: f64 },
    /// Sum of tenuous refractivities. Kept flat: `composite` never nests
    /// one composite inside another.
    Composite { parts: Vec<DispersionModel> },
}

/// Two-term Cauchy coefficients for dry air at sea level. Chosen over the
/// full Edlen/Ciddor formulations because only the two-color differential's
/// magnitude matters here.
pub const CAUCHY_AIR_A: f64 = 2.726e-4;
pub const CAUCHY_AIR_B_UM2: f64 = 7.52e-3;

impl DispersionModel {
    pub fn dirac_sea(k_prime: f64) -> Result<Self, DispersionError> {
        if !k_prime.is_finite() {
            return Err(DispersionError::InvalidParameter {
                name: "k_prime",
                requirement: "finite",
                value: k_prime,
            });
        }
        Ok(Self::DiracSea { k_prime })
    }

    pub fn cold_plasma(electron_density: f64) -> Result<Self, DispersionError> {
        if !(electron_density.is_finite() && electron_density >= 0.0) {
            return Err(DispersionError::InvalidParameter {
                name: "electron_density",
                requirement: "finite and >= 0 (m^-3)",
                value: electron_density,
            });
        }
        Ok(Self::ColdPlasma { electron_density })
    }

    pub fn cauchy_air(a_coeff: f64, b_coeff_um2: f64) -> Result<Self, DispersionError> {
        if !(a_coeff.is_finite() && a_coeff >= 0.0) {
            return Err(DispersionError::InvalidParameter {
                name: "a_coeff",
                requirement: "finite and >= 0",
                value: a_coeff,
            });
        }
        if !(b_coeff_um2.is_finite() && b_coeff_um2 >= 0.0) {
            return Err(DispersionError::InvalidParameter {
                name: "b_coeff_um2",
                requirement: "finite and >= 0 (um^2)",
                value: b_coeff_um2,
            });
        }
        Ok(Self::CauchyAir {
            a_coeff,
            b_coeff_um2,
        })
    }

    /// Dry air at sea level with the default Cauchy coefficients.
    pub fn standard_air() -> Self {
        Self::CauchyAir {
            a_coeff: CAUCHY_AIR_A,
            b_coeff_um2: CAUCHY_AIR_B_UM2,
        }
    }

    pub fn constant(refractivity: f64) -> Result<Self, DispersionError> {
        if !refractivity.is_finite() {
            return Err(DispersionError::InvalidParameter {
                name: "refractivity",
                requirement: "finite",
                value: refractivity,
            });
        }
        Ok(Self::Constant { refractivity })
    }

    /// Ideal vacuum (zero refractivity at every frequency).
    pub fn vacuum() -> Self {
        Self::Constant { refractivity: 0.0 }
    }

    /// Builds a composite, flattening any nested composites so the
    /// invariant "no composite inside a composite" holds by construction.
    pub fn composite(parts: Vec<DispersionModel>) -> Self {
        let mut flat = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                Self::Composite { parts: inner } => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Self::Composite { parts: flat }
    }

    /// Phase refractivity n(omega) - 1.
    pub fn phase_refractivity(
        &self,
        consts: &PhysicalConstants,
        omega: AngularFrequency,
    ) -> Result<Refractivity, DispersionError> {
        Refractivity::new(self.phase_raw(consts, omega.rad_per_s())?)
    }

    /// Exact analytic d rho / d omega, per rad/s.
    pub fn refractivity_derivative(
        &self,
        consts: &PhysicalConstants,
        omega: AngularFrequency,
    ) -> Result<f64, DispersionError> {
        self.derivative_raw(consts, omega.rad_per_s())
    }

    /// Group refractivity n_g(omega) - 1 with n_g = n + omega dn/domega;
    /// the group index governs the measurable pulse arrival time.
    ///
    /// Each branch uses its analytically simplified form (the dispersion
    /// law here gives exactly three times the phase refractivity); the
    /// identity group = phase + omega * derivative is enforced by tests.
    pub fn group_refractivity(
        &self,
        consts: &PhysicalConstants,
        omega: AngularFrequency,
    ) -> Result<Refractivity, DispersionError> {
        Refractivity::new(self.group_raw(consts, omega.rad_per_s())?)
    }

    /// Replaces the coefficient of every vacuum-dispersion branch
    /// (recursing through composites) with `k_prime`, leaving all other
    /// branches untouched.
    pub fn with_dirac_kprime(&self, k_prime: f64) -> DispersionModel {
        match self {
            Self::DiracSea { .. } => Self::DiracSea { k_prime },
            Self::Composite { parts } => Self::Composite {
                parts: parts.iter().map(|p| p.with_dirac_kprime(k_prime)).collect(),
            },
            other => other.clone(),
        }
    }

    /// True when the model contains a vacuum-dispersion branch anywhere.
    pub fn has_dirac_component(&self) -> bool {
        match self {
            Self::DiracSea { .. } => true,
            Self::Composite { parts } => parts.iter().any(Self::has_dirac_component),
            _ => false,
        }
    }

    /// Checks the model over a frequency band and reports, without ever
    /// failing: whether the zero-frequency limit of rho is finite (an
    /// insulating vacuum must not diverge there), whether the band clears
    /// every plasma cutoff, and whether the tenuous bound |rho| < 1e-2
    /// holds across the band.
    pub fn validate(
        &self,
        consts: &PhysicalConstants,
        omega_band: (AngularFrequency, AngularFrequency),
    ) -> ValidationReport {
        let (lo, hi) = omega_band;
        let (lo, hi) = if lo.rad_per_s() <= hi.rad_per_s() {
            (lo.rad_per_s(), hi.rad_per_s())
        } else {
            (hi.rad_per_s(), lo.rad_per_s())
        };

        let zero_frequency_limit = self.zero_frequency_limit();
        let mut flags = Vec::new();
        if zero_frequency_limit.is_none() {
            flags.push(ValidationFlag::ZeroFrequencyDivergent);
        }

        let mut plasma_cutoffs = Vec::new();
        self.collect_plasma_cutoffs(consts, &mut plasma_cutoffs);
        let band_above_cutoffs = plasma_cutoffs.iter().all(|&wp| lo > wp);
        for &wp in &plasma_cutoffs {
            if lo <= wp {
                flags.push(ValidationFlag::BandBelowPlasmaCutoff {
                    omega_p_rad_per_s: wp,
                });
            }
        }

        // Log-spaced sweep including both endpoints; the branches are
        // monotone enough in |rho| that 64 samples pin the band behaviour.
        let mut tenuous_in_band = band_above_cutoffs;
        if band_above_cutoffs {
            let samples = 64;
            let ratio = hi / lo;
            for i in 0..samples {
                let t = i as f64 / (samples - 1) as f64;
                let w = lo * ratio.powf(t);
                let worst = match (self.phase_raw(consts, w), self.group_raw(consts, w)) {
                    (Ok(p), Ok(g)) => p.abs().max(g.abs()),
                    _ => f64::INFINITY,
                };
                if worst >= TENUOUS_LIMIT {
                    flags.push(ValidationFlag::TenuousLimitExceeded {
                        omega_rad_per_s: w,
                        refractivity: worst,
                    });
                    tenuous_in_band = false;
                    break;
                }
            }
        }

        ValidationReport {
            finite_at_zero: zero_frequency_limit.is_some(),
            zero_frequency_limit,
            plasma_cutoffs,
            band_above_cutoffs,
            tenuous_in_band,
            flags,
        }
    }

    /// Plasma cutoff omega_p = sqrt(n_e e^2 / (eps0 m_e)) in rad/s, for a
    /// cold-plasma branch.
    pub fn plasma_cutoff(consts: &PhysicalConstants, electron_density: f64) -> f64 {
        let e = consts.elementary_charge();
        (electron_density * e * e / (consts.vacuum_permittivity() * consts.electron_mass()))
            .sqrt()
    }

    // Signed-magnitude evaluator. Every branch reaches omega only through
    // an even power, so rho(w) == rho(-w) bit for bit; the evenness
    // property test exercises exactly this function.
    fn phase_raw(&self, consts: &PhysicalConstants, w: f64) -> Result<f64, DispersionError> {
        match self {
            Self::DiracSea { k_prime } => {
                let r = consts.hbar() * w / consts.electron_rest_energy();
                Ok(k_prime * (consts.alpha() * r * r))
            }
            Self::ColdPlasma { electron_density } => {
                let x = Self::plasma_x(consts, *electron_density, w)?;
                // sqrt(1 - x) - 1 rewritten as -x / (1 + sqrt(1 - x)):
                // exact for x down to the underflow threshold.
                Ok(-x / (1.0 + (1.0 - x).sqrt()))
            }
            Self::CauchyAir {
                a_coeff,
                b_coeff_um2,
            } => {
                let inv_lambda_um2 = Self::inv_lambda_um2(consts, w);
                Ok(a_coeff * (1.0 + b_coeff_um2 * inv_lambda_um2))
            }
            Self::Constant { refractivity } => Ok(*refractivity),
            Self::Composite { parts } => {
                let mut sum = 0.0;
                for part in parts {
                    sum += part.phase_raw(consts, w)?;
                }
                Ok(sum)
            }
        }
    }

    fn derivative_raw(&self, consts: &PhysicalConstants, w: f64) -> Result<f64, DispersionError> {
        match self {
            Self::DiracSea { k_prime } => {
                let r = consts.hbar() * w / consts.electron_rest_energy();
                Ok(2.0 * k_prime * (consts.alpha() * r * r) / w)
            }
            Self::ColdPlasma { electron_density } => {
                let x = Self::plasma_x(consts, *electron_density, w)?;
                // d/dw [sqrt(1 - wp^2/w^2)] = wp^2 / (w^3 sqrt(1 - x))
                Ok(x / (w * (1.0 - x).sqrt()))
            }
            Self::CauchyAir {
                a_coeff,
                b_coeff_um2,
            } => {
                let inv_lambda_um2 = Self::inv_lambda_um2(consts, w);
                Ok(2.0 * a_coeff * b_coeff_um2 * inv_lambda_um2 / w)
            }
            Self::Constant { .. } => Ok(0.0),
            Self::Composite { parts } => {
                let mut sum = 0.0;
                for part in parts {
                    sum += part.derivative_raw(consts, w)?;
                }
                Ok(sum)
            }
        }
    }

    fn group_raw(&self, consts: &PhysicalConstants, w: f64) -> Result<f64, DispersionError> {
        match self {
            Self::DiracSea { k_prime } => {
                let r = consts.hbar() * w / consts.electron_rest_energy();
                Ok(3.0 * (k_prime * (consts.alpha() * r * r)))
            }
            Self::ColdPlasma { electron_density } => {
                let x = Self::plasma_x(consts, *electron_density, w)?;
                // n_g = 1/sqrt(1 - x), so n_g - 1 = x / (s (1 + s)) with
                // s = sqrt(1 - x); positive, mirroring the phase value.
                let s = (1.0 - x).sqrt();
                Ok(x / (s * (1.0 + s)))
            }
            Self::CauchyAir {
                a_coeff,
                b_coeff_um2,
            } => {
                let inv_lambda_um2 = Self::inv_lambda_um2(consts, w);
                Ok(a_coeff * (1.0 + 3.0 * b_coeff_um2 * inv_lambda_um2))
            }
            Self::Constant { refractivity } => Ok(*refractivity),
            Self::Composite { parts } => {
                let mut sum = 0.0;
                for part in parts {
                    sum += part.group_raw(consts, w)?;
                }
                Ok(sum)
            }
        }
    }

    /// x = omega_p^2 / omega^2, with the propagation precondition check.
    fn plasma_x(
        consts: &PhysicalConstants,
        electron_density: f64,
        w: f64,
    ) -> Result<f64, DispersionError> {
        let e = consts.elementary_charge();
        let wp2 =
            electron_density * e * e / (consts.vacuum_permittivity() * consts.electron_mass());
        if w * w <= wp2 {
            return Err(DispersionError::BelowPlasmaCutoff {
                omega_rad_per_s: w,
                omega_p_rad_per_s: wp2.sqrt(),
            });
        }
        Ok(wp2 / (w * w))
    }

    /// 1 / lambda_um^2 for the vacuum wavelength at angular frequency w:
    /// (w / 2 pi c)^2 scaled from m^-2 to um^-2.
    fn inv_lambda_um2(consts: &PhysicalConstants, w: f64) -> f64 {
        let lambda_m = 2.0 * std::f64::consts::PI * consts.c() / w;
        let lambda_um = lambda_m * 1e6;
        1.0 / (lambda_um * lambda_um)
    }

    fn zero_frequency_limit(&self) -> Option<f64> {
        match self {
            Self::DiracSea { .. } => Some(0.0),
            // The polarizability of a free-electron plasma diverges as
            // omega -> 0; an insulating vacuum must not behave like this.
            Self::ColdPlasma { .. } => None,
            Self::CauchyAir { a_coeff, .. } => Some(*a_coeff),
            Self::Constant { refractivity } => Some(*refractivity),
            Self::Composite { parts } => parts
                .iter()
                .map(Self::zero_frequency_limit)
                .sum::<Option<f64>>(),
        }
    }

    fn collect_plasma_cutoffs(&self, consts: &PhysicalConstants, out: &mut Vec<f64>) {
        match self {
            Self::ColdPlasma { electron_density } => {
                out.push(Self::plasma_cutoff(consts, *electron_density));
            }
            Self::Composite { parts } => {
                for part in parts {
                    part.collect_plasma_cutoffs(consts, out);
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationFlag {
    /// rho(omega -> 0) has no finite limit; the model cannot describe an
    /// insulating vacuum at zero frequency.
    ZeroFrequencyDivergent,
    /// Part of the requested band lies at or below a plasma cutoff.
    BandBelowPlasmaCutoff { omega_p_rad_per_s: f64 },
    /// |rho| reached the tenuous bound somewhere in the band.
    TenuousLimitExceeded {
        omega_rad_per_s: f64,
        refractivity: f64,
    },
}

/// Result of [`DispersionModel::validate`]; reports findings, never fails.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub finite_at_zero: bool,
    /// The zero-frequency refractivity limit when finite.
    pub zero_frequency_limit: Option<f64>,
    /// Every plasma cutoff in the model, rad/s.
    pub plasma_cutoffs: Vec<f64>,
    pub band_above_cutoffs: bool,
    pub tenuous_in_band: bool,
    pub flags: Vec<ValidationFlag>,
}
