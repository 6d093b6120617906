//! Scenario files.
//!
//! A scenario is a TOML document. Angles are in degrees here and converted
//! to radians exactly once, when the domain types are built. Relative
//! `state_table` paths resolve against the scenario file's directory.

use std::path::{Path, PathBuf};

use ris_core::{ArrayGeometry, Direction, FeedModel, Observation, UnitCellStateTable};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub geometry: GeometrySpec,
    pub feed: FeedSpec,
    pub target: AngleSpec,
    /// Defaults to the state table's design frequency.
    pub frequency_hz: Option<f64>,
    pub state_table: PathBuf,
    #[serde(default)]
    pub synthesis: SynthesisSpec,
    #[serde(default)]
    pub pattern: PatternSpec,
    #[serde(default)]
    pub enhance: EnhanceSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub nx: usize,
    pub ny: usize,
    pub pitch_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeedSpec {
    PlaneWave {
        theta_deg: f64,
        #[serde(default)]
        phi_deg: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    PointSource {
        position_m: [f64; 3],
        #[serde(default)]
        taper_exponent: f64,
        #[serde(default = "yes")]
        spreading: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    pub theta_deg: f64,
    #[serde(default)]
    pub phi_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisSpec {
    pub n_offsets: usize,
}

impl Default for SynthesisSpec {
    fn default() -> Self {
        Self {
            n_offsets: ris_core::synthesis::DEFAULT_OFFSETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatternSpec {
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub theta_step_deg: f64,
    pub phi_cut_deg: f64,
    pub element_factor: bool,
    /// Evaluate with |reflection| = 1 instead of the tabulated magnitudes.
    pub ideal_magnitude: bool,
}

impl Default for PatternSpec {
    fn default() -> Self {
        Self {
            theta_min_deg: -90.0,
            theta_max_deg: 90.0,
            theta_step_deg: 0.25,
            phi_cut_deg: 0.0,
            element_factor: false,
            ideal_magnitude: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnhanceSpec {
    pub uniform_state: usize,
    /// Observation direction; defaults to the target.
    pub observe: Option<AngleSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    /// Defaults to the single synthesis frequency.
    pub frequencies_hz: Vec<f64>,
    pub freeze_map: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    pub nx: usize,
    pub ny: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { nx: 3, ny: 3 }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// A scenario with every domain object built and checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub geometry: ArrayGeometry,
    pub feed: FeedModel,
    pub target: Direction,
    pub table: UnitCellStateTable,
    pub frequency: f64,
    pub observation: Observation,
    pub observe_enhancement: Direction,
}

fn check(ok: bool, field: &str, constraint: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::validation(field, constraint))
    }
}

fn direction(spec: &AngleSpec, field: &str) -> Result<Direction> {
    check(
        spec.theta_deg.is_finite() && (0.0..=90.0).contains(&spec.theta_deg),
        &format!("{field}.theta_deg"),
        "must lie in [0, 90]",
    )?;
    check(
        spec.phi_deg.is_finite(),
        &format!("{field}.phi_deg"),
        "must be finite",
    )?;
    Direction::from_degrees(spec.theta_deg, spec.phi_deg)
        .map_err(|e| CliError::validation(field, e.to_string()))
}

impl Scenario {
    pub fn from_toml_str(src: &str, origin: &Path) -> Result<Self> {
        toml::from_str(src).map_err(|e| CliError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string().replace('\n', " "),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Validate every field and build the domain objects.
    pub fn resolve(self, base_dir: &Path) -> Result<Resolved> {
        let g = &self.geometry;
        check(g.nx >= 1, "geometry.nx", "must be >= 1")?;
        check(g.ny >= 1, "geometry.ny", "must be >= 1")?;
        check(
            g.pitch_m.is_finite() && g.pitch_m > 0.0,
            "geometry.pitch_m",
            "must be > 0",
        )?;
        let geometry = ArrayGeometry::new(g.nx, g.ny, g.pitch_m)
            .map_err(|e| CliError::validation("geometry", e.to_string()))?;

        let feed = match &self.feed {
            FeedSpec::PlaneWave {
                theta_deg,
                phi_deg,
                amplitude,
            } => {
                check(
                    theta_deg.is_finite() && (0.0..90.0).contains(theta_deg),
                    "feed.theta_deg",
                    "must lie in [0, 90)",
                )?;
                check(phi_deg.is_finite(), "feed.phi_deg", "must be finite")?;
                check(
                    amplitude.is_finite() && *amplitude > 0.0,
                    "feed.amplitude",
                    "must be > 0",
                )?;
                let d = Direction::from_degrees(*theta_deg, *phi_deg)
                    .map_err(|e| CliError::validation("feed", e.to_string()))?;
                FeedModel::plane_wave(d, *amplitude)
            }
            FeedSpec::PointSource {
                position_m,
                taper_exponent,
                spreading,
            } => {
                check(
                    position_m.iter().all(|c| c.is_finite()) && position_m[2] > 0.0,
                    "feed.position_m",
                    "must be finite with z > 0",
                )?;
                check(
                    taper_exponent.is_finite() && *taper_exponent >= 0.0,
                    "feed.taper_exponent",
                    "must be >= 0",
                )?;
                FeedModel::point_source(*position_m, *taper_exponent, *spreading)
            }
        }
        .map_err(|e| CliError::validation("feed", e.to_string()))?;

        let target = direction(&self.target, "target")?;

        let table_path = if self.state_table.is_absolute() {
            self.state_table.clone()
        } else {
            base_dir.join(&self.state_table)
        };
        if !table_path.is_file() {
            return Err(CliError::Read {
                path: table_path,
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "state table not found"),
            });
        }
        let table = UnitCellStateTable::load(&table_path)?;

        let frequency = self.frequency_hz.unwrap_or(table.design_frequency());
        check(
            frequency.is_finite() && frequency > 0.0,
            "frequency_hz",
            "must be > 0",
        )?;

        check(
            self.synthesis.n_offsets >= 1,
            "synthesis.n_offsets",
            "must be >= 1",
        )?;

        let p = &self.pattern;
        check(
            p.theta_step_deg.is_finite() && p.theta_step_deg > 0.0,
            "pattern.theta_step_deg",
            "must be > 0",
        )?;
        check(
            p.theta_min_deg >= -90.0 && p.theta_min_deg <= p.theta_max_deg,
            "pattern.theta_min_deg",
            "must satisfy -90 <= theta_min_deg <= theta_max_deg",
        )?;
        check(
            p.theta_max_deg <= 90.0,
            "pattern.theta_max_deg",
            "must be <= 90",
        )?;
        check(
            p.phi_cut_deg.is_finite(),
            "pattern.phi_cut_deg",
            "must be finite",
        )?;
        let observation = Observation::cut_degrees(
            p.theta_min_deg,
            p.theta_max_deg,
            p.theta_step_deg,
            p.phi_cut_deg,
        )
        .map_err(|e| CliError::validation("pattern", e.to_string()))?;

        check(
            self.enhance.uniform_state < table.len(),
            "enhance.uniform_state",
            &format!("must be a valid state index (< {})", table.len()),
        )?;
        let observe_enhancement = match &self.enhance.observe {
            Some(a) => direction(a, "enhance.observe")?,
            None => target,
        };

        check(
            self.sweep
                .frequencies_hz
                .iter()
                .all(|f| f.is_finite() && *f > 0.0),
            "sweep.frequencies_hz",
            "all entries must be > 0",
        )?;
        check(
            self.oracle.nx >= 1 && self.oracle.ny >= 1,
            "oracle",
            "nx and ny must be >= 1",
        )?;

        let mut scenario = self;
        scenario.state_table = table_path;
        Ok(Resolved {
            scenario,
            geometry,
            feed,
            target,
            table,
            frequency,
            observation,
            observe_enhancement,
        })
    }
}

/// Read, parse and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Resolved> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let scenario = Scenario::from_toml_str(&src, path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    scenario.resolve(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
state_table = "table.toml"

[geometry]
nx = 4
ny = 3
pitch_m = 1.125e-3

[feed]
kind = "plane_wave"
theta_deg = 30.0

[target]
theta_deg = 0.0
"#;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::from_toml_str(MINIMAL, Path::new("x.toml")).unwrap();
        assert_eq!(s.synthesis.n_offsets, 64);
        assert_eq!(s.pattern.theta_step_deg, 0.25);
        assert_eq!(s.oracle, OracleSpec { nx: 3, ny: 3 });
        assert_eq!(
            s.feed,
            FeedSpec::PlaneWave {
                theta_deg: 30.0,
                phi_deg: 0.0,
                amplitude: 1.0
            }
        );
    }

    #[test]
    fn unknown_keys_are_named() {
        let src = MINIMAL.replace("nx = 4", "nx = 4\ncolumns = 5");
        let e = Scenario::from_toml_str(&src, Path::new("x.toml")).unwrap_err();
        assert!(matches!(e, CliError::Parse { .. }));
        assert!(e.to_string().contains("columns"), "{e}");

        let src = MINIMAL.replace("theta_deg = 30.0", "theta_deg = 30.0\nwobble = 1");
        let e = Scenario::from_toml_str(&src, Path::new("x.toml")).unwrap_err();
        assert!(e.to_string().contains("wobble"), "{e}");
    }

    #[test]
    fn parse_errors_carry_a_position() {
        let e = Scenario::from_toml_str("[geometry\nnx = 1", Path::new("x.toml")).unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
        assert!(Scenario::from_toml_str("", Path::new("x.toml")).is_err());
    }

    #[test]
    fn zero_pitch_names_the_field() {
        let src = MINIMAL.replace("pitch_m = 1.125e-3", "pitch_m = 0.0");
        let s = Scenario::from_toml_str(&src, Path::new("x.toml")).unwrap();
        let e = s.resolve(Path::new(".")).unwrap_err();
        assert!(matches!(&e, CliError::Validation { field, .. } if field == "geometry.pitch_m"));
        assert_eq!(e.exit_code(), 5);
    }

    #[test]
    fn missing_table_is_a_read_error() {
        let s = Scenario::from_toml_str(MINIMAL, Path::new("x.toml")).unwrap();
        let e = s.resolve(Path::new("/nonexistent")).unwrap_err();
        assert_eq!(e.kind(), "missing-file");
    }

    #[test]
    fn grazing_plane_wave_rejected() {
        let src = MINIMAL.replace("theta_deg = 30.0", "theta_deg = 90.0");
        let s = Scenario::from_toml_str(&src, Path::new("x.toml")).unwrap();
        let e = s.resolve(Path::new(".")).unwrap_err();
        assert!(matches!(&e, CliError::Validation { field, .. } if field == "feed.theta_deg"));
    }

    #[test]
    fn round_trips_through_toml() {
        let s = Scenario::from_toml_str(MINIMAL, Path::new("x.toml")).unwrap();
        let again = Scenario::from_toml_str(&s.to_toml(), Path::new("x.toml")).unwrap();
        assert_eq!(s, again);
    }
}
