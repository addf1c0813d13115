//! Physical constants (CODATA 2018) and frequency/wavelength conversions.
//!
//! All internal frequencies are angular (rad/s) and all wavelengths are
//! vacuum wavelengths in meters; conversions to other units happen only at
//! program boundaries. The constant set is validated for internal
//! consistency on construction, so a partially overridden set that no
//! longer satisfies `alpha = e^2 / (4 pi eps0 hbar c)` is rejected instead
//! of silently producing shifted dispersion scales.

use std::f64::consts::PI;
use thiserror::Error;

/// Speed of light in vacuum, m/s. Exact by SI definition.
const CODATA_C: f64 = 299_792_458.0;
/// Reduced Planck constant, J s. Derived from the exact SI value of h.
const CODATA_HBAR: f64 = 6.62607015e-34 / (2.0 * PI);
/// Fine structure constant, dimensionless. CODATA 2018 recommended value.
const CODATA_ALPHA: f64 = 7.2973525693e-3;
/// Elementary charge, C. Exact by SI definition.
const CODATA_E: f64 = 1.602176634e-19;
/// Vacuum permittivity, F/m. CODATA 2018 recommended value.
const CODATA_EPS0: f64 = 8.8541878128e-12;
/// Electron mass, kg. CODATA 2018 recommended value.
const CODATA_ME: f64 = 9.1093837015e-31;

/// Maximum relative deviation tolerated between the stored alpha and the
/// SI combination e^2/(4 pi eps0 hbar c).
const ALPHA_CONSISTENCY_REL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ConstantError {
    #[error("physical constant `{name}` must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error(
        "stored fine structure constant {stored} disagrees with e^2/(4 pi eps0 hbar c) = {derived} \
         beyond {max_rel} relative"
    )]
    AlphaInconsistent {
        stored: f64,
        derived: f64,
        max_rel: f64,
    },
    #[error("angular frequency must be strictly positive and finite, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("wavelength must be strictly positive and finite, got {0} m")]
    NonPositiveWavelength(f64),
}

/// An angular frequency in rad/s, guaranteed strictly positive.
///
/// Negative frequencies are never constructed; evenness of the dispersion
/// laws in the sign of omega is a model property checked in the dispersion
/// module, not something this type needs to represent.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub fn new(rad_per_s: f64) -> Result<Self, ConstantError> {
        if rad_per_s.is_finite() && rad_per_s > 0.0 {
            Ok(Self(rad_per_s))
        } else {
            Err(ConstantError::NonPositiveFrequency(rad_per_s))
        }
    }

    pub fn rad_per_s(self) -> f64 {
        self.0
    }
}

/// A vacuum wavelength in meters, guaranteed strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn new(meters: f64) -> Result<Self, ConstantError> {
        if meters.is_finite() && meters > 0.0 {
            Ok(Self(meters))
        } else {
            Err(ConstantError::NonPositiveWavelength(meters))
        }
    }

    pub fn from_nanometers(nm: f64) -> Result<Self, ConstantError> {
        Self::new(nm * 1e-9)
    }

    pub fn meters(self) -> f64 {
        self.0
    }

    pub fn nanometers(self) -> f64 {
        self.0 * 1e9
    }
}

/// A validated, immutable set of physical constants.
///
/// `alpha` is stored as an independent dimensionless value rather than
/// being derived from e, hbar and c: the SI and Gaussian combinations
/// differ by a factor 4 pi eps0, and storing alpha directly sidesteps the
/// unit-system ambiguity. Consistency with the SI combination is enforced
/// as an invariant instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    c: f64,
    hbar: f64,
    electron_rest_energy: f64,
    alpha: f64,
    elementary_charge: f64,
    vacuum_permittivity: f64,
    electron_mass: f64,
}

impl PhysicalConstants {
    /// The fixed CODATA 2018 set. Deterministic; same values every call.
    pub fn codata() -> Self {
        Self {
            c: CODATA_C,
            hbar: CODATA_HBAR,
            electron_rest_energy: CODATA_ME * CODATA_C * CODATA_C,
            alpha: CODATA_ALPHA,
            elementary_charge: CODATA_E,
            vacuum_permittivity: CODATA_EPS0,
            electron_mass: CODATA_ME,
        }
    }

    /// Builds a constant set from explicit values, validating positivity
    /// and the alpha consistency invariant. The electron rest energy is
    /// derived as `m_e c^2` so it cannot drift out of step with its
    /// factors.
    pub fn new(
        c: f64,
        hbar: f64,
        alpha: f64,
        elementary_charge: f64,
        vacuum_permittivity: f64,
        electron_mass: f64,
    ) -> Result<Self, ConstantError> {
        let fields = [
            ("c", c),
            ("hbar", hbar),
            ("alpha", alpha),
            ("elementary_charge", elementary_charge),
            ("vacuum_permittivity", vacuum_permittivity),
            ("electron_mass", electron_mass),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConstantError::NonPositive { name, value });
            }
        }
        let derived_alpha = elementary_charge * elementary_charge
            / (4.0 * PI * vacuum_permittivity * hbar * c);
        let rel = ((alpha - derived_alpha) / derived_alpha).abs();
        if rel > ALPHA_CONSISTENCY_REL {
            return Err(ConstantError::AlphaInconsistent {
                stored: alpha,
                derived: derived_alpha,
                max_rel: ALPHA_CONSISTENCY_REL,
            });
        }
        Ok(Self {
            c,
            hbar,
            electron_rest_energy: electron_mass * c * c,
            alpha,
            elementary_charge,
            vacuum_permittivity,
            electron_mass,
        })
    }

    /// Speed of light in vacuum, m/s.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Reduced Planck constant, J s.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Electron rest energy m_e c^2, J.
    pub fn electron_rest_energy(&self) -> f64 {
        self.electron_rest_energy
    }

    /// Fine structure constant, dimensionless.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Elementary charge, C.
    pub fn elementary_charge(&self) -> f64 {
        self.elementary_charge
    }

    /// Vacuum permittivity, F/m.
    pub fn vacuum_permittivity(&self) -> f64 {
        self.vacuum_permittivity
    }

    /// Electron mass, kg.
    pub fn electron_mass(&self) -> f64 {
        self.electron_mass
    }

    /// omega = 2 pi c / lambda.
    pub fn omega_from_wavelength(&self, lambda: Wavelength) -> AngularFrequency {
        // lambda > 0 and finite, so the quotient is positive and finite.
        AngularFrequency(2.0 * PI * self.c / lambda.meters())
    }

    /// lambda = 2 pi c / omega; exact inverse of `omega_from_wavelength`
    /// up to floating rounding.
    pub fn wavelength_from_omega(&self, omega: AngularFrequency) -> Wavelength {
        Wavelength(2.0 * PI * self.c / omega.rad_per_s())
    }

    /// The dimensionless ratio hbar omega / (m_e c^2): photon energy over
    /// electron rest energy. Strictly increasing and linear in omega.
    pub fn r_of_omega(&self, omega: AngularFrequency) -> f64 {
        self.hbar * omega.rad_per_s() / self.electron_rest_energy
    }
}
