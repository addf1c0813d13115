//! Time-of-flight and two-color differential delay over segmented optical
//! paths, plus the exact sensitivity coefficient d(delta t)/dk' used by
//! inference.
//!
//! A path is the explicit list of traversed segments, return leg included,
//! so a standard ranging round trip is written out as
//! atmosphere-vacuum-atmosphere-...; asymmetric one-way baselines need no
//! special casing. Delays beyond the geometric baseline are always handled
//! separately from the baseline itself (picoseconds next to seconds do not
//! share an f64 gracefully), and the two-color differential is computed in
//! excess space, never by subtracting near-equal totals.

use crate::dispersion::{DispersionError, DispersionModel};
use crate::physconst::{AngularFrequency, PhysicalConstants};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    #[error("segment {segment}: {source}")]
    Dispersion {
        segment: usize,
        source: DispersionError,
    },
    #[error("path has no vacuum-dispersion segment, so k' has no effect on it")]
    NoDiracSeaSegment,
    #[error("optical path must contain at least one segment")]
    EmptyPath,
    #[error("segment length must be strictly positive and finite, got {0} m")]
    NonPositiveLength(f64),
    #[error("beam pair must satisfy omega_high > omega_low, got {omega_high_rad_per_s} <= {omega_low_rad_per_s}")]
    UnorderedBeamPair {
        omega_low_rad_per_s: f64,
        omega_high_rad_per_s: f64,
    },
}

/// One traversal of `length_m` meters of a medium.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    length_m: f64,
    model: DispersionModel,
}

impl PathSegment {
    pub fn new(length_m: f64, model: DispersionModel) -> Result<Self, PropagationError> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(PropagationError::NonPositiveLength(length_m));
        }
        Ok(Self { length_m, model })
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn model(&self) -> &DispersionModel {
        &self.model
    }
}

/// An ordered, non-empty list of traversed segments.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalPath {
    segments: Vec<PathSegment>,
}

impl OpticalPath {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self, PropagationError> {
        if segments.is_empty() {
            return Err(PropagationError::EmptyPath);
        }
        Ok(Self { segments })
    }

    /// Single-segment path, the common case for vacuum baselines.
    pub fn single(length_m: f64, model: DispersionModel) -> Result<Self, PropagationError> {
        Ok(Self {
            segments: vec![PathSegment::new(length_m, model)?],
        })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn total_length_m(&self) -> f64 {
        self.segments.iter().map(PathSegment::length_m).sum()
    }

    /// Delay beyond the geometric baseline:
    /// sum over segments of L_i * group_refractivity_i(omega) / c.
    /// Exactly zero for a pure vacuum path.
    pub fn excess_delay(
        &self,
        consts: &PhysicalConstants,
        omega: AngularFrequency,
    ) -> Result<f64, PropagationError> {
        let mut total = 0.0;
        for (index, seg) in self.segments.iter().enumerate() {
            let rho = seg
                .model
                .group_refractivity(consts, omega)
                .map_err(|source| PropagationError::Dispersion {
                    segment: index,
                    source,
                })?;
            total += seg.length_m * rho.value() / consts.c();
        }
        Ok(total)
    }

    /// Full travel time, reported as a (geometric, excess) pair so the
    /// picosecond-scale excess keeps its precision next to the
    /// seconds-scale baseline.
    pub fn time_of_flight(
        &self,
        consts: &PhysicalConstants,
        omega: AngularFrequency,
    ) -> Result<TimeOfFlight, PropagationError> {
        Ok(TimeOfFlight {
            geometric_s: self.total_length_m() / consts.c(),
            excess_s: self.excess_delay(consts, omega)?,
        })
    }

    /// Two-color differential delay: excess(omega_high) - excess(omega_low).
    pub fn differential_delay(
        &self,
        consts: &PhysicalConstants,
        beams: &BeamPair,
    ) -> Result<f64, PropagationError> {
        let high = self.excess_delay(consts, beams.omega_high())?;
        let low = self.excess_delay(consts, beams.omega_low())?;
        Ok(high - low)
    }

    /// d(differential delay)/dk', in seconds per unit k'. The dispersion
    /// law is linear in k', so the slope is exact: it is the differential
    /// with every vacuum-dispersion coefficient set to 1, minus the same
    /// with every coefficient set to 0.
    pub fn kprime_sensitivity(
        &self,
        consts: &PhysicalConstants,
        beams: &BeamPair,
    ) -> Result<f64, PropagationError> {
        if !self.has_dirac_segment() {
            return Err(PropagationError::NoDiracSeaSegment);
        }
        let unit = self.with_dirac_kprime(1.0).differential_delay(consts, beams)?;
        let zero = self.with_dirac_kprime(0.0).differential_delay(consts, beams)?;
        Ok(unit - zero)
    }

    /// Copy of the path with every vacuum-dispersion coefficient replaced.
    pub fn with_dirac_kprime(&self, k_prime: f64) -> OpticalPath {
        OpticalPath {
            segments: self
                .segments
                .iter()
                .map(|seg| PathSegment {
                    length_m: seg.length_m,
                    model: seg.model.with_dirac_kprime(k_prime),
                })
                .collect(),
        }
    }

    pub fn has_dirac_segment(&self) -> bool {
        self.segments.iter().any(|s| s.model.has_dirac_component())
    }
}

/// Travel time split into its geometric baseline and the medium-induced
/// excess.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOfFlight {
    pub geometric_s: f64,
    pub excess_s: f64,
}

impl TimeOfFlight {
    /// Total travel time; only meaningful at the ~1e-16 relative level of
    /// one f64, which is why the parts are stored separately.
    pub fn total_s(&self) -> f64 {
        self.geometric_s + self.excess_s
    }
}

/// The two simultaneous beams, ordered by frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPair {
    omega_low: AngularFrequency,
    omega_high: AngularFrequency,
}

impl BeamPair {
    pub fn new(
        omega_low: AngularFrequency,
        omega_high: AngularFrequency,
    ) -> Result<Self, PropagationError> {
        if omega_high.rad_per_s() <= omega_low.rad_per_s() {
            return Err(PropagationError::UnorderedBeamPair {
                omega_low_rad_per_s: omega_low.rad_per_s(),
                omega_high_rad_per_s: omega_high.rad_per_s(),
            });
        }
        Ok(Self {
            omega_low,
            omega_high,
        })
    }

    /// The frequency-doubled construction: the high beam at exactly twice
    /// the pulsation of the low one.
    pub fn doubled(omega_low: AngularFrequency) -> Self {
        let omega_high = AngularFrequency::new(2.0 * omega_low.rad_per_s())
            .expect("doubling a valid frequency stays valid");
        Self {
            omega_low,
            omega_high,
        }
    }

    pub fn omega_low(&self) -> AngularFrequency {
        self.omega_low
    }

    pub fn omega_high(&self) -> AngularFrequency {
        self.omega_high
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physconst::Wavelength;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Earth-Moon round trip: 2 x 384400 km.
    const ROUND_TRIP_M: f64 = 7.688e8;
    /// Two sea-level-equivalent atmosphere crossings of 8.3 km each.
    const ATMOSPHERE_M: f64 = 1.66e4;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::codata()
    }

    fn omega_nm(nm: f64) -> AngularFrequency {
        consts().omega_from_wavelength(Wavelength::from_nanometers(nm).unwrap())
    }

    fn green_pair() -> BeamPair {
        BeamPair::doubled(omega_nm(1064.0))
    }

    fn dirac_round_trip(k_prime: f64) -> OpticalPath {
        OpticalPath::single(ROUND_TRIP_M, DispersionModel::dirac_sea(k_prime).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_excess_is_exactly_zero() {
        let path = OpticalPath::single(ROUND_TRIP_M, DispersionModel::vacuum()).unwrap();
        assert_eq!(path.excess_delay(&consts(), omega_nm(532.0)).unwrap(), 0.0);
    }

    #[test]
    fn dirac_excess_over_round_trip() {
        let path = dirac_round_trip(1.0);
        let excess = path.excess_delay(&consts(), omega_nm(532.0)).unwrap();
        // (L/c) * 3 alpha r^2 = 2.56444 * 4.5536e-13
        assert_relative_eq!(excess, 1.167_746_712_154_438_5e-12, max_relative = 1e-12);
    }

    #[test]
    fn split_segments_add_up() {
        let model = DispersionModel::dirac_sea(1.0).unwrap();
        let whole = OpticalPath::single(ROUND_TRIP_M, model.clone()).unwrap();
        let halves = OpticalPath::new(vec![
            PathSegment::new(ROUND_TRIP_M / 2.0, model.clone()).unwrap(),
            PathSegment::new(ROUND_TRIP_M / 2.0, model).unwrap(),
        ])
        .unwrap();
        let w = omega_nm(532.0);
        assert_relative_eq!(
            whole.excess_delay(&consts(), w).unwrap(),
            halves.excess_delay(&consts(), w).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn time_of_flight_round_trip() {
        let vac = OpticalPath::single(ROUND_TRIP_M, DispersionModel::vacuum()).unwrap();
        let tof = vac.time_of_flight(&consts(), omega_nm(532.0)).unwrap();
        assert_relative_eq!(tof.geometric_s, 2.564_440_763_883_393, max_relative = 1e-15);
        assert_eq!(tof.excess_s, 0.0);

        let dirac = dirac_round_trip(1.0);
        let tof = dirac.time_of_flight(&consts(), omega_nm(532.0)).unwrap();
        assert_relative_eq!(tof.geometric_s, 2.564_440_763_883_393, max_relative = 1e-15);
        assert_relative_eq!(tof.excess_s, 1.167_746_712_154_438_5e-12, max_relative = 1e-12);
    }

    #[test]
    fn dirac_differential_over_round_trip() {
        let path = dirac_round_trip(1.0);
        let diff = path.differential_delay(&consts(), &green_pair()).unwrap();
        // (L/c) * 3 alpha (r_532^2 - r_1064^2)
        assert_relative_eq!(diff, 8.758_100_341_158_288e-13, max_relative = 1e-12);
    }

    #[test]
    fn equal_frequency_differential_is_zero() {
        // the beam-pair type rejects a degenerate pair outright
        let w = omega_nm(532.0);
        assert!(matches!(
            BeamPair::new(w, w),
            Err(PropagationError::UnorderedBeamPair { .. })
        ));
        // and a delta of equal excess delays is exactly zero
        let path = dirac_round_trip(1.0);
        let excess = path.excess_delay(&consts(), w).unwrap();
        assert_eq!(excess - excess, 0.0);
    }

    #[test]
    fn solar_wind_plasma_differential_is_negligible() {
        let path =
            OpticalPath::single(ROUND_TRIP_M, DispersionModel::cold_plasma(7e6).unwrap()).unwrap();
        let diff = path.differential_delay(&consts(), &green_pair()).unwrap();
        // group differential -(L/c) (3/8) wp^2/omega_low^2; the high beam
        // arrives first through a plasma
        assert_relative_eq!(diff, -6.835_765_482_523_294e-21, max_relative = 1e-10);
        assert!(diff.abs() < 1e-20);
    }

    #[test]
    fn atmospheric_differential_dominates() {
        let path = OpticalPath::single(ATMOSPHERE_M, DispersionModel::standard_air()).unwrap();
        let diff = path.differential_delay(&consts(), &green_pair()).unwrap();
        // (L_atm/c) a 3b (1/lambda2^2 - 1/lambda1^2) in micrometer units
        assert_relative_eq!(diff, 9.023_818_066_798_089e-10, max_relative = 1e-12);
    }

    #[test]
    fn sensitivity_equals_pure_dirac_differential() {
        let path = dirac_round_trip(1.0);
        let sens = path.kprime_sensitivity(&consts(), &green_pair()).unwrap();
        assert_relative_eq!(sens, 8.758_100_341_158_288e-13, max_relative = 1e-12);

        // doubling the path length doubles the coefficient
        let double = OpticalPath::single(
            2.0 * ROUND_TRIP_M,
            DispersionModel::dirac_sea(1.0).unwrap(),
        )
        .unwrap();
        let sens2 = double.kprime_sensitivity(&consts(), &green_pair()).unwrap();
        assert_relative_eq!(sens2, 2.0 * sens, max_relative = 1e-14);
    }

    #[test]
    fn sensitivity_ignores_stored_coefficient_and_confounders() {
        let mixed = OpticalPath::new(vec![
            PathSegment::new(ATMOSPHERE_M / 2.0, DispersionModel::standard_air()).unwrap(),
            PathSegment::new(ROUND_TRIP_M, DispersionModel::dirac_sea(42.0).unwrap()).unwrap(),
            PathSegment::new(ATMOSPHERE_M / 2.0, DispersionModel::standard_air()).unwrap(),
        ])
        .unwrap();
        // the confounder part cancels exactly in the two-point slope, up to
        // the cancellation floor of the 9e-10 s atmospheric differential
        let sens = mixed.kprime_sensitivity(&consts(), &green_pair()).unwrap();
        assert_relative_eq!(sens, 8.758_100_341_158_288e-13, max_relative = 1e-11);
    }

    #[test]
    fn sensitivity_requires_a_dirac_segment() {
        let path = OpticalPath::single(ROUND_TRIP_M, DispersionModel::vacuum()).unwrap();
        assert_eq!(
            path.kprime_sensitivity(&consts(), &green_pair()).unwrap_err(),
            PropagationError::NoDiracSeaSegment
        );
    }

    #[test]
    fn differential_is_affine_in_kprime() {
        let base = OpticalPath::new(vec![
            PathSegment::new(ATMOSPHERE_M, DispersionModel::standard_air()).unwrap(),
            PathSegment::new(ROUND_TRIP_M, DispersionModel::dirac_sea(1.0).unwrap()).unwrap(),
        ])
        .unwrap();
        let pair = green_pair();
        let sens = base.kprime_sensitivity(&consts(), &pair).unwrap();
        let confounder = base
            .with_dirac_kprime(0.0)
            .differential_delay(&consts(), &pair)
            .unwrap();
        for kp in [-10.0, -1.0, 0.0, 1.0, 10.0, 1e3] {
            let diff = base
                .with_dirac_kprime(kp)
                .differential_delay(&consts(), &pair)
                .unwrap();
            let predicted = kp * sens + confounder;
            assert_relative_eq!(diff, predicted, max_relative = 1e-12);
        }
    }

    #[test]
    fn cutoff_error_names_the_segment() {
        let path = OpticalPath::new(vec![
            PathSegment::new(1e3, DispersionModel::vacuum()).unwrap(),
            PathSegment::new(1e3, DispersionModel::cold_plasma(7e6).unwrap()).unwrap(),
        ])
        .unwrap();
        let low = AngularFrequency::new(1e5).unwrap();
        match path.excess_delay(&consts(), low).unwrap_err() {
            PropagationError::Dispersion { segment, source } => {
                assert_eq!(segment, 1);
                assert!(matches!(source, DispersionError::BelowPlasmaCutoff { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            OpticalPath::new(vec![]),
            Err(PropagationError::EmptyPath)
        ));
        assert!(matches!(
            PathSegment::new(0.0, DispersionModel::vacuum()),
            Err(PropagationError::NonPositiveLength(_))
        ));
        assert!(matches!(
            PathSegment::new(-5.0, DispersionModel::vacuum()),
            Err(PropagationError::NonPositiveLength(_))
        ));
    }

    // ----- brute-force oracle --------------------------------------------
    //
    // A separate, straightforward re-implementation of the group
    // refractivities and the differential sum, written against raw CODATA
    // literals. Catches formula, sign, and bookkeeping mistakes in the
    // production path.

    const C: f64 = 299_792_458.0;
    const HBAR: f64 = 1.0545718176461565e-34;
    const ALPHA: f64 = 7.2973525693e-3;
    const E_CHARGE: f64 = 1.602176634e-19;
    const EPS0: f64 = 8.8541878128e-12;
    const ME: f64 = 9.1093837015e-31;
    const MEC2: f64 = 8.187105776823886e-14;

    fn brute_group(model: &DispersionModel, w: f64) -> f64 {
        match model {
            DispersionModel::DiracSea { k_prime } => {
                let r = HBAR * w / MEC2;
                3.0 * (k_prime * (ALPHA * r * r))
            }
            DispersionModel::ColdPlasma { electron_density } => {
                let wp2 = electron_density * E_CHARGE * E_CHARGE / (EPS0 * ME);
                let x = wp2 / (w * w);
                let s = (1.0 - x).sqrt();
                x / (s * (1.0 + s))
            }
            DispersionModel::CauchyAir {
                a_coeff,
                b_coeff_um2,
            } => {
                let lambda_um = 2.0 * std::f64::consts::PI * C / w * 1e6;
                let inv = 1.0 / (lambda_um * lambda_um);
                a_coeff * (1.0 + 3.0 * b_coeff_um2 * inv)
            }
            DispersionModel::Constant { refractivity } => *refractivity,
            DispersionModel::Composite { parts } => parts.iter().map(|p| brute_group(p, w)).sum(),
        }
    }

    fn brute_differential(path: &OpticalPath, w_low: f64, w_high: f64) -> f64 {
        let excess = |w: f64| -> f64 {
            let mut total = 0.0;
            for seg in path.segments() {
                total += seg.length_m() * brute_group(seg.model(), w) / C;
            }
            total
        };
        excess(w_high) - excess(w_low)
    }

    fn ulp_distance(a: f64, b: f64) -> u64 {
        if a == b {
            return 0;
        }
        assert_eq!(a.signum(), b.signum(), "oracle disagrees in sign: {a} vs {b}");
        let (ia, ib) = (a.abs().to_bits(), b.abs().to_bits());
        ia.abs_diff(ib)
    }

    #[test]
    fn differential_matches_brute_force_summation() {
        let paths = vec![
            dirac_round_trip(1.0),
            dirac_round_trip(-3.5),
            OpticalPath::new(vec![
                PathSegment::new(8.3e3, DispersionModel::standard_air()).unwrap(),
                PathSegment::new(ROUND_TRIP_M, DispersionModel::dirac_sea(1.0).unwrap()).unwrap(),
                PathSegment::new(8.3e3, DispersionModel::standard_air()).unwrap(),
            ])
            .unwrap(),
            OpticalPath::new(vec![
                PathSegment::new(1e7, DispersionModel::cold_plasma(1e18).unwrap()).unwrap(),
                PathSegment::new(
                    ROUND_TRIP_M,
                    DispersionModel::composite(vec![
                        DispersionModel::dirac_sea(1.0).unwrap(),
                        DispersionModel::cold_plasma(1e10).unwrap(),
                    ]),
                )
                .unwrap(),
                PathSegment::new(1e4, DispersionModel::standard_air()).unwrap(),
                PathSegment::new(1e4, DispersionModel::constant(2e-5).unwrap()).unwrap(),
                PathSegment::new(1e5, DispersionModel::vacuum()).unwrap(),
            ])
            .unwrap(),
        ];
        let (w_low, w_high) = (
            omega_nm(1064.0).rad_per_s(),
            omega_nm(532.0).rad_per_s(),
        );
        let pair = green_pair();
        for path in &paths {
            let fast = path.differential_delay(&consts(), &pair).unwrap();
            let brute = brute_differential(path, w_low, w_high);
            assert!(
                ulp_distance(fast, brute) <= 2,
                "{fast} vs {brute} differ by more than 2 ulp"
            );
        }
    }

    proptest! {
        /// Splitting any segment in two leaves the excess delay unchanged.
        #[test]
        fn segment_splitting_is_neutral(
            frac in 0.05f64..0.95,
            kp in -5.0f64..5.0,
            nm in 300.0f64..2000.0,
        ) {
            let model = DispersionModel::dirac_sea(kp).unwrap();
            let whole = OpticalPath::single(ROUND_TRIP_M, model.clone()).unwrap();
            let split = OpticalPath::new(vec![
                PathSegment::new(ROUND_TRIP_M * frac, model.clone()).unwrap(),
                PathSegment::new(ROUND_TRIP_M * (1.0 - frac), model).unwrap(),
            ]).unwrap();
            let w = omega_nm(nm);
            let a = whole.excess_delay(&consts(), w).unwrap();
            let b = split.excess_delay(&consts(), w).unwrap();
            prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(f64::MIN_POSITIVE));
        }

        /// With a positive coefficient the higher frequency always arrives
        /// later (quadratic law).
        #[test]
        fn higher_frequency_arrives_later(
            w1 in 1e14f64..5e16,
            ratio in 1.01f64..3.0,
            kp in 0.01f64..100.0,
        ) {
            let path = dirac_round_trip(kp);
            let lo = AngularFrequency::new(w1).unwrap();
            let hi = AngularFrequency::new(w1 * ratio).unwrap();
            let d_lo = path.excess_delay(&consts(), lo).unwrap();
            let d_hi = path.excess_delay(&consts(), hi).unwrap();
            prop_assert!(d_hi > d_lo);
        }
    }
}
