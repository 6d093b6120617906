#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use ris_core::{ArrayGeometry, Direction, FeedModel, UnitCellStateTable, SPEED_OF_LIGHT};

pub const F: f64 = 100.75e9;

pub fn wavelength(f: f64) -> f64 {
    SPEED_OF_LIGHT / f
}

pub fn golden_geometry() -> ArrayGeometry {
    ArrayGeometry::new(60, 60, 1.125e-3).unwrap()
}

pub fn plane_wave_deg(theta: f64, phi: f64) -> FeedModel {
    FeedModel::plane_wave(Direction::from_degrees(theta, phi).unwrap(), 1.0).unwrap()
}

pub fn random_geometry(rng: &mut impl Rng, max_side: usize) -> ArrayGeometry {
    let lambda = wavelength(F);
    ArrayGeometry::new(
        rng.random_range(1..=max_side),
        rng.random_range(1..=max_side),
        rng.random_range(0.2..1.0) * lambda,
    )
    .unwrap()
}

pub fn random_direction(rng: &mut impl Rng, max_theta: f64) -> Direction {
    Direction::new(rng.random_range(0.0..max_theta), rng.random_range(-PI..PI)).unwrap()
}

pub fn random_feed(rng: &mut impl Rng) -> FeedModel {
    if rng.random_bool(0.5) {
        FeedModel::plane_wave(random_direction(rng, 1.3), rng.random_range(0.5..2.0)).unwrap()
    } else {
        let pos = [
            rng.random_range(-0.02..0.02),
            rng.random_range(-0.02..0.02),
            rng.random_range(0.01..0.15),
        ];
        FeedModel::point_source(pos, rng.random_range(0.0..4.0), rng.random_bool(0.5)).unwrap()
    }
}

/// Random table with `n` states, random phases and magnitudes, sampled at `F` only.
pub fn random_table(rng: &mut impl Rng, n: usize) -> UnitCellStateTable {
    use ris_core::{CellState, Sample};
    let states = (0..n)
        .map(|s| {
            CellState::new(
                format!("S{s}"),
                vec![Sample {
                    frequency: F,
                    magnitude: rng.random_range(0.3..1.0),
                    phase: rng.random_range(0.0..TAU),
                }],
            )
            .unwrap()
        })
        .collect();
    UnitCellStateTable::new(states, F).unwrap()
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..TAU))
}
