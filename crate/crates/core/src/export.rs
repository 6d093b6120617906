//! Text and image encodings of maps, patterns and metrics.
//!
//! Floats are written with Rust's `Display`, which produces the shortest
//! decimal that round-trips, so identical inputs give identical bytes.
//! Grids are written row-major, one lattice row (fixed `j`) per line.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::farfield::{BeamMetrics, Pattern, SweepEntry};
use crate::geometry::ArrayGeometry;
use crate::synthesis::{PhaseMap, StateMap};

fn grid_header(out: &mut String, g: &ArrayGeometry, frequency: f64) {
    out.push_str("# nx,ny,frequency_hz\n");
    let _ = writeln!(out, "# {},{},{}", g.nx(), g.ny(), frequency);
}

fn grid_rows<T>(out: &mut String, nx: usize, values: &[T], mut cell: impl FnMut(&mut String, &T)) {
    for row in values.chunks_exact(nx) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            cell(out, v);
        }
        out.push('\n');
    }
}

/// Phase map as CSV, entries in degrees.
pub fn phase_map_csv(pm: &PhaseMap) -> String {
    let g = pm.geometry();
    let mut out = String::new();
    grid_header(&mut out, g, pm.frequency());
    grid_rows(&mut out, g.nx(), pm.values(), |o, v| {
        let _ = write!(o, "{}", v.to_degrees());
    });
    out
}

/// State map as CSV, entries are state indices.
pub fn state_map_csv(sm: &StateMap) -> String {
    let g = sm.geometry();
    let mut out = String::new();
    grid_header(&mut out, g, sm.frequency());
    grid_rows(&mut out, g.nx(), sm.indices(), |o, v| {
        let _ = write!(o, "{v}");
    });
    out
}

fn pgm(g: &ArrayGeometry, pixels: impl Iterator<Item = u8>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", g.nx(), g.ny()).into_bytes();
    out.extend(pixels);
    out
}

/// Binary graymap with `[0, 2pi)` mapped linearly onto `[0, 255]`.
pub fn phase_map_pgm(pm: &PhaseMap) -> Vec<u8> {
    pgm(
        pm.geometry(),
        pm.values()
            .iter()
            .map(|v| (v / TAU * 255.0).round().clamp(0.0, 255.0) as u8),
    )
}

/// Binary graymap with state `s` drawn at `round(255 * s / (n_states - 1))`.
pub fn state_map_pgm(sm: &StateMap) -> Vec<u8> {
    let span = (sm.n_states().max(2) - 1) as f64;
    pgm(
        sm.geometry(),
        sm.indices()
            .iter()
            .map(|&s| (255.0 * s as f64 / span).round() as u8),
    )
}

pub const PATTERN_CSV_HEADER: &str = "theta_deg,phi_deg,re,im,mag_db_normalized";

pub fn pattern_csv(p: &Pattern) -> String {
    let db = p.normalized_db();
    let mut out = String::with_capacity(48 * p.samples.len());
    out.push_str(PATTERN_CSV_HEADER);
    out.push('\n');
    for (n, (s, d)) in p.samples.iter().zip(&db).enumerate() {
        let (theta, phi) = p.observation.angles(n);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            theta.to_degrees(),
            phi.to_degrees(),
            s.re,
            s.im,
            d
        );
    }
    out
}

/// `key = value` lines. Missing sidelobe and enhancement values are written as `"none"`.
pub fn metrics_text(m: Option<&BeamMetrics>, enhancement_db: Option<f64>) -> String {
    let mut out = String::new();
    if let Some(m) = m {
        let _ = writeln!(out, "main_lobe_deg = {}", m.main_lobe.to_degrees());
        let _ = writeln!(out, "peak_linear = {}", m.peak);
        let _ = writeln!(out, "hpbw_deg = {}", m.hpbw.to_degrees());
        match m.sidelobe_db {
            Some(s) => {
                let _ = writeln!(out, "sll_db = {s}");
            }
            None => out.push_str("sll_db = \"none\"\n"),
        }
    }
    match enhancement_db {
        Some(e) => {
            let _ = writeln!(out, "enhancement_db = {e}");
        }
        None => out.push_str("enhancement_db = \"none\"\n"),
    }
    out
}

pub const SWEEP_CSV_HEADER: &str = "frequency_hz,main_lobe_deg,peak_linear,hpbw_deg,sll_db,status";

pub fn sweep_csv(entries: &[SweepEntry]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for e in entries {
        match &e.result {
            Ok(m) => {
                let sll = m.sidelobe_db.map(|s| s.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},ok",
                    e.frequency,
                    m.main_lobe.to_degrees(),
                    m.peak,
                    m.hpbw.to_degrees(),
                    sll
                );
            }
            Err(err) => {
                let msg = err.to_string().replace([',', '\n'], ";");
                let _ = writeln!(out, "{},,,,,error: {msg}", e.frequency);
            }
        }
    }
    out
}
