//! Seeded synthesis of two-channel photon arrival data for a configured
//! ranging session.
//!
//! Timestamps are always residuals against the geometric baseline
//! sum(L_i)/c of the scenario path, never absolute flight times, so
//! picosecond structure survives in `f64`.
//!
//! Reproducibility contract: one named generator (ChaCha8), one substream
//! per (shot, channel) derived from the session seed, and a canonical
//! output ordering (shot index, then residual). Results are therefore a
//! pure function of (scenario, seed), independent of iteration order and
//! of parallel scheduling. Within a substream the draw order is fixed:
//! signal photon count, then per photon the pulse draw followed by the
//! jitter draw, then the background count, then one uniform per background
//! event.

use crate::physconst::PhysicalConstants;
use crate::propagation::{BeamPair, OpticalPath, PropagationError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, Uniform};
use rayon::prelude::*;
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error("session produced no events in either channel")]
    EmptySession,
    #[error("scenario parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

/// The two color channels, named by which beam they detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Low,
    High,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Low => "low",
            Channel::High => "high",
        }
    }

    fn stream_offset(self) -> u64 {
        match self {
            Channel::Low => 0,
            Channel::High => 1,
        }
    }
}

/// Laser pulse and return-signal statistics, identical for both channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseModel {
    sigma_pulse_s: f64,
    mean_photons_per_shot: f64,
    emission_offset_s: f64,
}

impl PulseModel {
    /// `sigma_pulse_s` is the Gaussian 1-sigma pulse width (zero allowed,
    /// for noise-off studies); `mean_photons_per_shot` the expected
    /// detected signal photons per shot per channel; `emission_offset_s`
    /// the controlled emission-time offset of the high channel relative to
    /// the low one.
    pub fn new(
        sigma_pulse_s: f64,
        mean_photons_per_shot: f64,
        emission_offset_s: f64,
    ) -> Result<Self, SimulationError> {
        if !(sigma_pulse_s.is_finite() && sigma_pulse_s >= 0.0) {
            return Err(SimulationError::InvalidParameter {
                name: "sigma_pulse_s",
                requirement: "finite and >= 0",
                value: sigma_pulse_s,
            });
        }
        if !(mean_photons_per_shot.is_finite() && mean_photons_per_shot >= 0.0) {
            return Err(SimulationError::InvalidParameter {
                name: "mean_photons_per_shot",
                requirement: "finite and >= 0",
                value: mean_photons_per_shot,
            });
        }
        if !emission_offset_s.is_finite() {
            return Err(SimulationError::InvalidParameter {
                name: "emission_offset_s",
                requirement: "finite",
                value: emission_offset_s,
            });
        }
        Ok(Self {
            sigma_pulse_s,
            mean_photons_per_shot,
            emission_offset_s,
        })
    }

    pub fn sigma_pulse_s(&self) -> f64 {
        self.sigma_pulse_s
    }

    pub fn mean_photons_per_shot(&self) -> f64 {
        self.mean_photons_per_shot
    }

    pub fn emission_offset_s(&self) -> f64 {
        self.emission_offset_s
    }
}

/// Detector timing jitter, background rate, and acceptance gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    jitter_sigma_s: f64,
    background_rate_hz: f64,
    gate_halfwidth_s: f64,
}

impl DetectorModel {
    pub fn new(
        jitter_sigma_s: f64,
        background_rate_hz: f64,
        gate_halfwidth_s: f64,
    ) -> Result<Self, SimulationError> {
        if !(jitter_sigma_s.is_finite() && jitter_sigma_s >= 0.0) {
            return Err(SimulationError::InvalidParameter {
                name: "jitter_sigma_s",
                requirement: "finite and >= 0",
                value: jitter_sigma_s,
            });
        }
        if !(background_rate_hz.is_finite() && background_rate_hz >= 0.0) {
            return Err(SimulationError::InvalidParameter {
                name: "background_rate_hz",
                requirement: "finite and >= 0",
                value: background_rate_hz,
            });
        }
        if !(gate_halfwidth_s.is_finite() && gate_halfwidth_s > 0.0) {
            return Err(SimulationError::InvalidParameter {
                name: "gate_halfwidth_s",
                requirement: "finite and > 0",
                value: gate_halfwidth_s,
            });
        }
        Ok(Self {
            jitter_sigma_s,
            background_rate_hz,
            gate_halfwidth_s,
        })
    }

    pub fn jitter_sigma_s(&self) -> f64 {
        self.jitter_sigma_s
    }

    pub fn background_rate_hz(&self) -> f64 {
        self.background_rate_hz
    }

    pub fn gate_halfwidth_s(&self) -> f64 {
        self.gate_halfwidth_s
    }
}

/// The complete description of a two-color ranging experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RangingScenario {
    path: OpticalPath,
    beams: BeamPair,
    pulse: PulseModel,
    detector: DetectorModel,
    shots: u64,
    k_prime_true: f64,
}

impl RangingScenario {
    pub fn new(
        path: OpticalPath,
        beams: BeamPair,
        pulse: PulseModel,
        detector: DetectorModel,
        shots: u64,
        k_prime_true: f64,
    ) -> Result<Self, SimulationError> {
        if shots < 1 {
            return Err(SimulationError::InvalidParameter {
                name: "shots",
                requirement: ">= 1",
                value: shots as f64,
            });
        }
        if !k_prime_true.is_finite() {
            return Err(SimulationError::InvalidParameter {
                name: "k_prime_true",
                requirement: "finite",
                value: k_prime_true,
            });
        }
        Ok(Self {
            path,
            beams,
            pulse,
            detector,
            shots,
            k_prime_true,
        })
    }

    pub fn path(&self) -> &OpticalPath {
        &self.path
    }

    pub fn beams(&self) -> &BeamPair {
        &self.beams
    }

    pub fn pulse(&self) -> &PulseModel {
        &self.pulse
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn k_prime_true(&self) -> f64 {
        self.k_prime_true
    }
}

/// One detected photon: which shot it belongs to and its arrival residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedEvent {
    pub shot: u64,
    pub residual_s: f64,
}

/// Per-channel photon arrival residuals (arrival time minus the geometric
/// baseline), in canonical order (shot index, then residual).
#[derive(Debug, Clone, PartialEq)]
pub struct EventSet {
    channel: Channel,
    events: Vec<TimedEvent>,
    truncated: u64,
}

impl EventSet {
    /// Builds an event set, restoring the canonical ordering.
    pub fn from_events(channel: Channel, mut events: Vec<TimedEvent>, truncated: u64) -> Self {
        sort_canonical(&mut events);
        Self {
            channel,
            events,
            truncated,
        }
    }

    pub fn empty(channel: Channel) -> Self {
        Self {
            channel,
            events: Vec::new(),
            truncated: 0,
        }
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn events(&self) -> &[TimedEvent] {
        &self.events
    }

    pub fn residuals(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.residual_s)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Signal photons whose noisy arrival fell outside the gate and were
    /// dropped.
    pub fn truncated(&self) -> u64 {
        self.truncated
    }
}

fn sort_canonical(events: &mut [TimedEvent]) {
    events.sort_by(|a, b| {
        a.shot
            .cmp(&b.shot)
            .then_with(|| a.residual_s.total_cmp(&b.residual_s))
    });
}

/// Synthesizes a full session: for every shot and channel, a Poisson
/// number of signal photons at the channel's predicted residual smeared by
/// pulse width and detector jitter, plus uniform background within the
/// gate. Deterministic given (scenario, seed); shots may be evaluated in
/// parallel.
pub fn simulate_session(
    consts: &PhysicalConstants,
    scenario: &RangingScenario,
    seed: u64,
) -> Result<(EventSet, EventSet), SimulationError> {
    let injected = scenario
        .path()
        .with_dirac_kprime(scenario.k_prime_true());
    let excess_low = injected.excess_delay(consts, scenario.beams().omega_low())?;
    let excess_high = injected.excess_delay(consts, scenario.beams().omega_high())?;

    let pulse = scenario.pulse();
    let detector = scenario.detector();
    let predicted = [excess_low, excess_high + pulse.emission_offset_s()];
    let gate = detector.gate_halfwidth_s();

    let signal_count = optional_poisson(pulse.mean_photons_per_shot());
    let background_count =
        optional_poisson(detector.background_rate_hz() * 2.0 * gate);
    let pulse_noise = optional_normal(pulse.sigma_pulse_s());
    let jitter_noise = optional_normal(detector.jitter_sigma_s());
    let gates = [
        Uniform::new_inclusive(predicted[0] - gate, predicted[0] + gate)
            .expect("gate halfwidth is positive"),
        Uniform::new_inclusive(predicted[1] - gate, predicted[1] + gate)
            .expect("gate halfwidth is positive"),
    ];

    let base = ChaCha8Rng::seed_from_u64(seed);
    let simulate_shot = |acc: &mut ShotAccumulator, shot: u64| {
        for (idx, channel) in [Channel::Low, Channel::High].into_iter().enumerate() {
            let mut rng = base.clone();
            rng.set_stream(shot.wrapping_mul(2).wrapping_add(channel.stream_offset()));

            let n_signal = signal_count.map_or(0, |d| d.sample(&mut rng) as u64);
            for _ in 0..n_signal {
                let mut residual = predicted[idx];
                if let Some(d) = pulse_noise {
                    residual += d.sample(&mut rng);
                }
                if let Some(d) = jitter_noise {
                    residual += d.sample(&mut rng);
                }
                if (residual - predicted[idx]).abs() <= gate {
                    acc.events[idx].push(TimedEvent {
                        shot,
                        residual_s: residual,
                    });
                } else {
                    acc.truncated[idx] += 1;
                }
            }

            let n_background = background_count.map_or(0, |d| d.sample(&mut rng) as u64);
            for _ in 0..n_background {
                acc.events[idx].push(TimedEvent {
                    shot,
                    residual_s: gates[idx].sample(&mut rng),
                });
            }
        }
    };

    let merged = (0..scenario.shots())
        .into_par_iter()
        .fold(ShotAccumulator::default, |mut acc, shot| {
            simulate_shot(&mut acc, shot);
            acc
        })
        .reduce(ShotAccumulator::default, ShotAccumulator::merge);

    let ShotAccumulator { events, truncated } = merged;
    let [low_events, high_events] = events;
    let low = EventSet::from_events(Channel::Low, low_events, truncated[0]);
    let high = EventSet::from_events(Channel::High, high_events, truncated[1]);
    if low.is_empty() && high.is_empty() {
        return Err(SimulationError::EmptySession);
    }
    Ok((low, high))
}

#[derive(Default)]
struct ShotAccumulator {
    events: [Vec<TimedEvent>; 2],
    truncated: [u64; 2],
}

impl ShotAccumulator {
    fn merge(mut self, other: Self) -> Self {
        let [other_low, other_high] = other.events;
        self.events[0].extend(other_low);
        self.events[1].extend(other_high);
        self.truncated[0] += other.truncated[0];
        self.truncated[1] += other.truncated[1];
        self
    }
}

fn optional_poisson(mean: f64) -> Option<Poisson<f64>> {
    (mean > 0.0).then(|| Poisson::new(mean).expect("validated nonnegative finite mean"))
}

fn optional_normal(sigma: f64) -> Option<Normal<f64>> {
    (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("validated nonnegative finite sigma"))
}

/// Descriptive statistics for one channel of a session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSummary {
    pub count: usize,
    pub truncated: u64,
    /// Absent (not zero) for an empty channel.
    pub mean_residual_s: Option<f64>,
    /// Sample standard deviation; 0 for a single event, absent for none.
    pub stddev_residual_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionSummary {
    pub low: ChannelSummary,
    pub high: ChannelSummary,
}

pub fn session_summary(low: &EventSet, high: &EventSet) -> SessionSummary {
    SessionSummary {
        low: channel_summary(low),
        high: channel_summary(high),
    }
}

fn channel_summary(set: &EventSet) -> ChannelSummary {
    let count = set.len();
    let (mean, stddev) = if count == 0 {
        (None, None)
    } else {
        let mean = set.residuals().sum::<f64>() / count as f64;
        let stddev = if count == 1 {
            0.0
        } else {
            let ss = set
                .residuals()
                .map(|r| (r - mean) * (r - mean))
                .sum::<f64>();
            (ss / (count - 1) as f64).sqrt()
        };
        (Some(mean), Some(stddev))
    };
    ChannelSummary {
        count,
        truncated: set.truncated(),
        mean_residual_s: mean,
        stddev_residual_s: stddev,
    }
}

// ----- CSV interchange ----------------------------------------------------

pub const EVENTS_CSV_HEADER: &str = "channel,shot,residual_s";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

/// Writes both channels as `channel,shot,residual_s` rows, low channel
/// first, residuals in scientific notation with 17 significant digits
/// (lossless for f64).
pub fn write_events_csv<W: io::Write>(
    out: &mut W,
    low: &EventSet,
    high: &EventSet,
) -> io::Result<()> {
    writeln!(out, "{EVENTS_CSV_HEADER}")?;
    for set in [low, high] {
        let name = set.channel().as_str();
        for event in set.events() {
            writeln!(out, "{name},{},{:.16e}", event.shot, event.residual_s)?;
        }
    }
    Ok(())
}

/// Parses the event CSV written by [`write_events_csv`]. Row numbers in
/// errors are 1-based and count the header.
pub fn read_events_csv<R: io::BufRead>(input: R) -> Result<(EventSet, EventSet), CsvError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| CsvError::Malformed {
            row: 1,
            reason: "empty file, expected header".into(),
        })?;
    if header.trim_end() != EVENTS_CSV_HEADER {
        return Err(CsvError::Malformed {
            row: 1,
            reason: format!("bad header `{header}`, expected `{EVENTS_CSV_HEADER}`"),
        });
    }

    let mut low = Vec::new();
    let mut high = Vec::new();
    for (index, line) in lines.enumerate() {
        let row = index + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (channel, shot, residual) = match (
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
        ) {
            (Some(c), Some(s), Some(r), None) => (c, s, r),
            _ => {
                return Err(CsvError::Malformed {
                    row,
                    reason: format!("expected 3 comma-separated fields, got `{line}`"),
                })
            }
        };
        let shot: u64 = shot.trim().parse().map_err(|e| CsvError::Malformed {
            row,
            reason: format!("bad shot index `{shot}`: {e}"),
        })?;
        let residual_s: f64 = residual.trim().parse().map_err(|e| CsvError::Malformed {
            row,
            reason: format!("bad residual `{residual}`: {e}"),
        })?;
        if !residual_s.is_finite() {
            return Err(CsvError::Malformed {
                row,
                reason: format!("residual must be finite, got `{residual}`"),
            });
        }
        let event = TimedEvent { shot, residual_s };
        match channel.trim() {
            "low" => low.push(event),
            "high" => high.push(event),
            other => {
                return Err(CsvError::Malformed {
                    row,
                    reason: format!("unknown channel `{other}`, expected `low` or `high`"),
                })
            }
        }
    }
    Ok((
        EventSet::from_events(Channel::Low, low, 0),
        EventSet::from_events(Channel::High, high, 0),
    ))
}
