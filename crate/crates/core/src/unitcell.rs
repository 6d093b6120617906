//! Switchable unit-cell reflection states.
//!
//! Each state is a frequency-sampled reflection coefficient. Queries between
//! samples interpolate magnitude linearly and phase linearly on the nearest
//! branch between the two bracketing samples.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Result, RisError};
use crate::geometry::{circular_distance, nearest_branch};

/// Operating frequency of the reference 1-bit cell (Hz).
pub const GOLDEN_DESIGN_FREQUENCY_HZ: f64 = 100.75e9;
/// Worst-case reflection magnitude of the reference cell (dB).
pub const GOLDEN_MAGNITUDE_DB: f64 = -1.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub frequency: f64,
    pub magnitude: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    label: String,
    samples: Vec<Sample>,
}

impl CellState {
    pub fn new(label: impl Into<String>, samples: Vec<Sample>) -> Result<Self> {
        let label = label.into();
        let bad = |msg: String| Err(RisError::StateTable(format!("state `{label}`: {msg}")));
        if samples.is_empty() {
            return bad("needs at least one sample".into());
        }
        for (n, s) in samples.iter().enumerate() {
            if !(s.frequency.is_finite() && s.frequency > 0.0) {
                return bad(format!(
                    "row {n}: frequency must be positive, got {}",
                    s.frequency
                ));
            }
            if !(s.magnitude.is_finite() && s.magnitude > 0.0 && s.magnitude <= 1.0) {
                return bad(format!(
                    "row {n}: magnitude must lie in (0, 1], got {}",
                    s.magnitude
                ));
            }
            if !s.phase.is_finite() {
                return bad(format!("row {n}: phase must be finite"));
            }
        }
        for (n, w) in samples.windows(2).enumerate() {
            if w[1].frequency <= w[0].frequency {
                return bad(format!(
                    "frequencies must be strictly increasing (rows {n} and {})",
                    n + 1
                ));
            }
            if circular_distance(w[1].phase, w[0].phase) >= PI {
                return bad(format!(
                    "phase step between rows {n} and {} is ambiguous (>= 180 degrees); sample more densely",
                    n + 1
                ));
            }
        }
        Ok(Self { label, samples })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn band(&self) -> (f64, f64) {
        (
            self.samples[0].frequency,
            self.samples[self.samples.len() - 1].frequency,
        )
    }

    /// Interpolated `(magnitude, phase)` at `f`.
    pub fn interpolate(&self, f: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.band();
        if !(f >= lo && f <= hi) {
            return Err(RisError::OutOfBand {
                state: self.label.clone(),
                frequency_hz: f,
                min_hz: lo,
                max_hz: hi,
            });
        }
        let k = self.samples.partition_point(|s| s.frequency < f);
        let s1 = &self.samples[k];
        if s1.frequency == f {
            return Ok((s1.magnitude, s1.phase));
        }
        let s0 = &self.samples[k - 1];
        let t = (f - s0.frequency) / (s1.frequency - s0.frequency);
        let mag = s0.magnitude + t * (s1.magnitude - s0.magnitude);
        let phase = s0.phase + t * nearest_branch(s1.phase - s0.phase);
        Ok((mag, phase))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitCellStateTable {
    states: Vec<CellState>,
    design_frequency: f64,
}

impl UnitCellStateTable {
    pub fn new(states: Vec<CellState>, design_frequency: f64) -> Result<Self> {
        if states.len() < 2 {
            return Err(RisError::StateTable(format!(
                "need at least 2 states, got {}",
                states.len()
            )));
        }
        if !(design_frequency.is_finite() && design_frequency > 0.0) {
            return Err(RisError::StateTable(format!(
                "design frequency must be positive, got {design_frequency}"
            )));
        }
        for s in &states {
            let (lo, hi) = s.band();
            if design_frequency < lo || design_frequency > hi {
                return Err(RisError::StateTable(format!(
                    "design frequency {design_frequency} Hz lies outside the band of state `{}`",
                    s.label
                )));
            }
        }
        Ok(Self {
            states,
            design_frequency,
        })
    }

    /// Reference 1-bit cell: phases 0 and pi at 100.75 GHz, both at -1.2 dB.
    pub fn golden() -> Self {
        let mag = db_to_linear(GOLDEN_MAGNITUDE_DB);
        let state = |label: &str, phase: f64| {
            CellState::new(
                label,
                vec![Sample {
                    frequency: GOLDEN_DESIGN_FREQUENCY_HZ,
                    magnitude: mag,
                    phase,
                }],
            )
            .expect("golden state is valid")
        };
        Self::new(
            vec![state("OFF", 0.0), state("ON", PI)],
            GOLDEN_DESIGN_FREQUENCY_HZ,
        )
        .expect("golden table is valid")
    }

    /// Two single-sample states with unit magnitude and the given phases.
    pub fn ideal(phases: &[f64], frequency: f64) -> Result<Self> {
        let states = phases
            .iter()
            .enumerate()
            .map(|(n, &phase)| {
                CellState::new(
                    format!("S{n}"),
                    vec![Sample {
                        frequency,
                        magnitude: 1.0,
                        phase,
                    }],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(states, frequency)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[CellState] {
        &self.states
    }

    pub fn design_frequency(&self) -> f64 {
        self.design_frequency
    }

    fn state(&self, state_index: usize) -> Result<&CellState> {
        self.states.get(state_index).ok_or_else(|| {
            RisError::invalid(format!(
                "state index {state_index} out of range for a {}-state table",
                self.states.len()
            ))
        })
    }

    pub fn reflection_at(&self, state_index: usize, f: f64) -> Result<Complex64> {
        let (mag, phase) = self.state(state_index)?.interpolate(f)?;
        Ok(Complex64::from_polar(mag, phase))
    }

    pub fn phase_at(&self, state_index: usize, f: f64) -> Result<f64> {
        Ok(self.state(state_index)?.interpolate(f)?.1)
    }

    /// Reflection coefficients of every state at `f`. With `ideal_magnitude`
    /// the magnitudes are replaced by 1.
    pub fn reflections(&self, f: f64, ideal_magnitude: bool) -> Result<Vec<Complex64>> {
        self.states
            .iter()
            .map(|s| {
                let (mag, phase) = s.interpolate(f)?;
                let mag = if ideal_magnitude { 1.0 } else { mag };
                Ok(Complex64::from_polar(mag, phase))
            })
            .collect()
    }

    pub fn state_phases(&self, f: f64) -> Result<Vec<f64>> {
        self.states
            .iter()
            .map(|s| Ok(s.interpolate(f)?.1))
            .collect()
    }

    /// Parse the TOML state-table format (`mag_db`, `phase_deg` per row).
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let raw: RawTable = toml::from_str(src).map_err(|e| RisError::StateTable(e.to_string()))?;
        let mut states = Vec::with_capacity(raw.states.len());
        for s in raw.states {
            let mut samples = Vec::with_capacity(s.rows.len());
            for (n, [f_hz, mag_db, phase_deg]) in s.rows.into_iter().enumerate() {
                if mag_db.is_nan() || mag_db > 0.0 {
                    return Err(RisError::StateTable(format!(
                        "state `{}` row {n}: mag_db must be <= 0, got {mag_db}",
                        s.label
                    )));
                }
                samples.push(Sample {
                    frequency: f_hz,
                    magnitude: db_to_linear(mag_db),
                    phase: phase_deg.to_radians(),
                });
            }
            states.push(CellState::new(s.label, samples)?);
        }
        Self::new(states, raw.design_frequency_hz)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)
            .map_err(|e| RisError::StateTable(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    design_frequency_hz: f64,
    states: Vec<RawState>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    label: String,
    rows: Vec<[f64; 3]>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Phase separation of a two-state table at `f`, in `[0, pi]`.
pub fn state_phase_difference(table: &UnitCellStateTable, f: f64) -> Result<f64> {
    if table.len() != 2 {
        return Err(RisError::invalid(format!(
            "phase difference needs exactly 2 states, table has {}",
            table.len()
        )));
    }
    Ok(circular_distance(
        table.phase_at(0, f)?,
        table.phase_at(1, f)?,
    ))
}
