//! Phase-map synthesis and quantization.
//!
//! The continuous map is the phase the surface must add so that the
//! reflected field from every cell arrives in phase along the target
//! direction:
//!
//! ```text
//! phase(i, j) = k * |r(i, j) - r_feed| - k * (u0 . r(i, j)) + offset
//! ```
//!
//! For a plane-wave feed arriving from `u_src`, the range term becomes its
//! far-feed limit `-k * (u_src . r(i, j))` (the constant range is dropped).
//! The far-field evaluator applies `exp(+j * phase)`, so the two conventions
//! together put the beam on `u0`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Result, RisError};
use crate::exec::{map_indexed, Execution};
use crate::farfield;
use crate::geometry::{
    circular_distance, dot, element_positions, norm, sub, wrap, ArrayGeometry, Direction,
    FeedModel, Vec3,
};
use crate::unitcell::UnitCellStateTable;

/// Vacuum speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default number of offset candidates in [`optimize_offset`].
pub const DEFAULT_OFFSETS: usize = 64;

/// Circular-distance margin under which two states count as equidistant.
const TIE_EPS: f64 = 1e-12;

pub fn wavenumber(f: f64) -> f64 {
    TAU * f / SPEED_OF_LIGHT
}

/// Continuous phase per cell, radians in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    geometry: ArrayGeometry,
    frequency: f64,
    values: Vec<f64>,
}

impl PhaseMap {
    pub fn new(geometry: ArrayGeometry, frequency: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(RisError::invalid(format!(
                "phase map has {} entries, geometry needs {}",
                values.len(),
                geometry.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..TAU).contains(*v)) {
            return Err(RisError::invalid(format!("phase {v} outside [0, 2pi)")));
        }
        Ok(Self {
            geometry,
            frequency,
            values,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.geometry.index(i, j)]
    }

    /// Unit-magnitude reflections carrying the map's phases.
    pub fn reflections(&self) -> Vec<Complex64> {
        self.values.iter().map(|&p| Complex64::cis(p)).collect()
    }
}

/// Discrete state index per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMap {
    geometry: ArrayGeometry,
    frequency: f64,
    n_states: usize,
    indices: Vec<usize>,
}

impl StateMap {
    pub fn new(
        geometry: ArrayGeometry,
        frequency: f64,
        n_states: usize,
        indices: Vec<usize>,
    ) -> Result<Self> {
        if indices.len() != geometry.len() {
            return Err(RisError::invalid(format!(
                "state map has {} entries, geometry needs {}",
                indices.len(),
                geometry.len()
            )));
        }
        if let Some(s) = indices.iter().find(|&&s| s >= n_states) {
            return Err(RisError::invalid(format!(
                "state index {s} invalid for a {n_states}-state table"
            )));
        }
        Ok(Self {
            geometry,
            frequency,
            n_states,
            indices,
        })
    }

    /// Every cell set to `state`.
    pub fn uniform(
        geometry: ArrayGeometry,
        frequency: f64,
        n_states: usize,
        state: usize,
    ) -> Result<Self> {
        Self::new(geometry, frequency, n_states, vec![state; geometry.len()])
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.indices[self.geometry.index(i, j)]
    }

    /// Swap states 0 and 1 everywhere.
    pub fn flipped(&self) -> Self {
        let indices = self
            .indices
            .iter()
            .map(|&s| match s {
                0 => 1,
                1 => 0,
                s => s,
            })
            .collect();
        Self {
            indices,
            ..self.clone()
        }
    }

    /// Per-cell complex reflection at `f`, looked up from `table`.
    pub fn reflections(
        &self,
        table: &UnitCellStateTable,
        f: f64,
        ideal_magnitude: bool,
    ) -> Result<Vec<Complex64>> {
        if table.len() != self.n_states {
            return Err(RisError::invalid(format!(
                "state map built for {} states, table has {}",
                self.n_states,
                table.len()
            )));
        }
        let per_state = table.reflections(f, ideal_magnitude)?;
        Ok(self.indices.iter().map(|&s| per_state[s]).collect())
    }

    /// Realized phase per cell at the map's frequency, radians in `[0, 2pi)`.
    pub fn realized_phases(&self, table: &UnitCellStateTable) -> Result<Vec<f64>> {
        let phases = table.state_phases(self.frequency)?;
        Ok(self.indices.iter().map(|&s| wrap(phases[s])).collect())
    }
}

/// Continuous phase at arbitrary element positions.
pub fn continuous_phases(
    positions: &[Vec3],
    feed: &FeedModel,
    u0: &Direction,
    delta_phi: f64,
    f: f64,
) -> Vec<f64> {
    let k = wavenumber(f);
    let u0 = u0.unit();
    positions
        .iter()
        .map(|r| {
            let range_term = match feed {
                FeedModel::PointSource { position, .. } => k * norm(&sub(r, position)),
                FeedModel::PlaneWave { incidence, .. } => -k * dot(&incidence.unit(), r),
            };
            wrap(range_term - k * dot(&u0, r) + delta_phi)
        })
        .collect()
}

pub fn continuous_phase_map(
    g: &ArrayGeometry,
    feed: &FeedModel,
    u0: &Direction,
    delta_phi: f64,
    f: f64,
) -> Result<PhaseMap> {
    if !(f.is_finite() && f > 0.0) {
        return Err(RisError::invalid(format!(
            "frequency must be positive, got {f}"
        )));
    }
    if !delta_phi.is_finite() {
        return Err(RisError::invalid("phase offset must be finite"));
    }
    let values = continuous_phases(&element_positions(g), feed, u0, delta_phi, f);
    Ok(PhaseMap {
        geometry: *g,
        frequency: f,
        values,
    })
}

/// Index of the state circularly nearest `phase`; near-ties go to the lower index.
pub fn nearest_state(phase: f64, state_phases: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = circular_distance(phase, state_phases[0]);
    for (s, &sp) in state_phases.iter().enumerate().skip(1) {
        let d = circular_distance(phase, sp);
        if d < best_d - TIE_EPS {
            best = s;
            best_d = d;
        }
    }
    best
}

pub fn quantize_map(pm: &PhaseMap, table: &UnitCellStateTable) -> Result<StateMap> {
    let phases = table.state_phases(pm.frequency)?;
    let indices = pm
        .values
        .iter()
        .map(|&p| nearest_state(p, &phases))
        .collect();
    Ok(StateMap {
        geometry: pm.geometry,
        frequency: pm.frequency,
        n_states: table.len(),
        indices,
    })
}

/// Outcome of the offset sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetChoice {
    pub delta_phi: f64,
    pub state_map: StateMap,
    /// `|AF(u0)|` of the chosen map.
    pub peak: f64,
}

/// Sweep the global offset over `n_offsets` uniform candidates and keep the
/// quantized map with the largest `|AF(u0)|`. Ties keep the smallest offset.
#[allow(clippy::too_many_arguments)]
pub fn optimize_offset(
    g: &ArrayGeometry,
    feed: &FeedModel,
    u0: &Direction,
    f: f64,
    table: &UnitCellStateTable,
    n_offsets: usize,
    exec: Execution,
) -> Result<OffsetChoice> {
    if n_offsets == 0 {
        return Err(RisError::invalid("n_offsets must be at least 1"));
    }
    let excitations = farfield::element_excitations(g, feed, f);
    let u = u0.unit();
    let candidates = map_indexed(n_offsets, exec, |m| -> Result<OffsetChoice> {
        let delta_phi = TAU * m as f64 / n_offsets as f64;
        let pm = continuous_phase_map(g, feed, u0, delta_phi, f)?;
        let sm = quantize_map(&pm, table)?;
        let refl = sm.reflections(table, f, false)?;
        let peak = farfield::field_at(g, &excitations, &refl, &u, f)?.norm();
        Ok(OffsetChoice {
            delta_phi,
            state_map: sm,
            peak,
        })
    });
    let mut best: Option<OffsetChoice> = None;
    for c in candidates {
        let c = c?;
        if best.as_ref().is_none_or(|b| c.peak > b.peak) {
            best = Some(c);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Full synthesis result: the chosen offset, its continuous map and the
/// quantized map.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub delta_phi: f64,
    pub phase_map: PhaseMap,
    pub state_map: StateMap,
    pub peak: f64,
}

pub fn synthesize(
    g: &ArrayGeometry,
    feed: &FeedModel,
    u0: &Direction,
    f: f64,
    table: &UnitCellStateTable,
    n_offsets: usize,
    exec: Execution,
) -> Result<Synthesis> {
    let choice = optimize_offset(g, feed, u0, f, table, n_offsets, exec)?;
    let phase_map = continuous_phase_map(g, feed, u0, choice.delta_phi, f)?;
    Ok(Synthesis {
        delta_phi: choice.delta_phi,
        phase_map,
        state_map: choice.state_map,
        peak: choice.peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::translate_positions;
    use std::f64::consts::PI;

    const F: f64 = 100.75e9;

    fn normal_plane_wave() -> FeedModel {
        FeedModel::plane_wave(Direction::broadside(), 1.0).unwrap()
    }

    #[test]
    fn normal_incidence_broadside_is_flat() {
        let g = ArrayGeometry::new(5, 4, 1.125e-3).unwrap();
        let pm = continuous_phase_map(&g, &normal_plane_wave(), &Direction::broadside(), 0.0, F)
            .unwrap();
        assert!(pm.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_cell_under_point_source() {
        let g = ArrayGeometry::new(1, 1, 1.125e-3).unwrap();
        let feed = FeedModel::point_source([0.0, 0.0, 0.12], 0.0, true).unwrap();
        let pm = continuous_phase_map(&g, &feed, &Direction::broadside(), 0.0, F).unwrap();
        let k = TAU * 100.75e9 / 299_792_458.0;
        let expected = (k * 0.12).rem_euclid(TAU);
        assert!((pm.values()[0] - expected).abs() < 1e-9);
    }

    #[test]
    fn oblique_plane_wave_neighbor_step() {
        let p = 1.125e-3;
        let g = ArrayGeometry::new(2, 1, p).unwrap();
        let feed = FeedModel::plane_wave(Direction::from_degrees(30.0, 0.0).unwrap(), 1.0).unwrap();
        let pm = continuous_phase_map(&g, &feed, &Direction::broadside(), 0.0, F).unwrap();
        let k = wavenumber(F);
        let step = wrap(pm.get(0, 0) - pm.get(1, 0));
        assert!(circular_distance(step, k * p * 0.5) < 1e-12);
    }

    #[test]
    fn quantization_examples() {
        let t = UnitCellStateTable::ideal(&[0.0, PI], F).unwrap();
        let g = ArrayGeometry::new(4, 1, 1e-3).unwrap();
        let deg = [0.0f64, 89.0, 271.0, 90.0];
        let pm = PhaseMap::new(g, F, deg.iter().map(|d| d.to_radians()).collect()).unwrap();
        let sm = quantize_map(&pm, &t).unwrap();
        assert_eq!(sm.indices(), &[0, 0, 0, 0]);

        let pm = PhaseMap::new(
            g,
            F,
            [180.0f64, 91.0, 269.0, 270.0]
                .iter()
                .map(|d| d.to_radians())
                .collect(),
        )
        .unwrap();
        assert_eq!(quantize_map(&pm, &t).unwrap().indices(), &[1, 1, 1, 0]);
    }

    #[test]
    fn quantization_with_more_states() {
        let phases: Vec<f64> = (0..4).map(|s| s as f64 * PI / 2.0).collect();
        let t = UnitCellStateTable::ideal(&phases, F).unwrap();
        let g = ArrayGeometry::new(3, 1, 1e-3).unwrap();
        let pm = PhaseMap::new(g, F, vec![0.2, 1.6, 5.9]).unwrap();
        assert_eq!(quantize_map(&pm, &t).unwrap().indices(), &[0, 1, 0]);
    }

    #[test]
    fn quantization_out_of_band() {
        let t = UnitCellStateTable::golden();
        let g = ArrayGeometry::new(1, 1, 1e-3).unwrap();
        let pm = PhaseMap::new(g, 90e9, vec![0.0]).unwrap();
        assert!(matches!(
            quantize_map(&pm, &t),
            Err(RisError::OutOfBand { .. })
        ));
    }

    #[test]
    fn single_offset_candidate_is_zero() {
        let g = ArrayGeometry::new(6, 5, 1.125e-3).unwrap();
        let feed = FeedModel::plane_wave(Direction::from_degrees(30.0, 0.0).unwrap(), 1.0).unwrap();
        let t = UnitCellStateTable::golden();
        let u0 = Direction::broadside();
        let c = optimize_offset(&g, &feed, &u0, F, &t, 1, Execution::Sequential).unwrap();
        assert_eq!(c.delta_phi, 0.0);
        let direct =
            quantize_map(&continuous_phase_map(&g, &feed, &u0, 0.0, F).unwrap(), &t).unwrap();
        assert_eq!(c.state_map, direct);
        assert!(optimize_offset(&g, &feed, &u0, F, &t, 0, Execution::Sequential).is_err());
    }

    #[test]
    fn two_by_two_normal_incidence_offsets() {
        let g = ArrayGeometry::new(2, 2, 1.125e-3).unwrap();
        let t = UnitCellStateTable::ideal(&[0.0, PI], F).unwrap();
        let u0 = Direction::broadside();
        for m in 0..16 {
            let pm = continuous_phase_map(&g, &normal_plane_wave(), &u0, TAU * m as f64 / 16.0, F)
                .unwrap();
            let sm = quantize_map(&pm, &t).unwrap();
            assert!(sm.indices().iter().all(|&s| s == sm.indices()[0]));
        }
        let c = optimize_offset(
            &g,
            &normal_plane_wave(),
            &u0,
            F,
            &t,
            16,
            Execution::Parallel,
        )
        .unwrap();
        assert!((c.peak - 4.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let g = ArrayGeometry::new(12, 9, 1.125e-3).unwrap();
        let feed = FeedModel::point_source([0.01, -0.02, 0.05], 2.0, true).unwrap();
        let t = UnitCellStateTable::golden();
        let u0 = Direction::from_degrees(15.0, 40.0).unwrap();
        let a = optimize_offset(&g, &feed, &u0, F, &t, 32, Execution::Sequential).unwrap();
        let b = optimize_offset(&g, &feed, &u0, F, &t, 32, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn offset_periodicity_and_rotation() {
        let g = ArrayGeometry::new(7, 6, 1.125e-3).unwrap();
        let feed = FeedModel::point_source([0.003, 0.0, 0.04], 1.0, true).unwrap();
        let u0 = Direction::from_degrees(20.0, -30.0).unwrap();
        let base = continuous_phase_map(&g, &feed, &u0, 0.7, F).unwrap();
        let shifted = continuous_phase_map(&g, &feed, &u0, 0.7 + TAU, F).unwrap();
        for (a, b) in base.values().iter().zip(shifted.values()) {
            assert!(circular_distance(*a, *b) < 1e-12);
        }
        let rotated = continuous_phase_map(&g, &feed, &u0, 0.7 + 1.9, F).unwrap();
        for (a, b) in base.values().iter().zip(rotated.values()) {
            assert!(circular_distance(wrap(a + 1.9), *b) < 1e-12);
        }
    }

    #[test]
    fn quantizing_realized_phases_is_idempotent() {
        let g = ArrayGeometry::new(10, 10, 1.125e-3).unwrap();
        let feed = FeedModel::plane_wave(Direction::from_degrees(30.0, 0.0).unwrap(), 1.0).unwrap();
        let t = UnitCellStateTable::golden();
        let pm = continuous_phase_map(&g, &feed, &Direction::broadside(), 0.3, F).unwrap();
        let sm = quantize_map(&pm, &t).unwrap();
        let realized = PhaseMap::new(g, F, sm.realized_phases(&t).unwrap()).unwrap();
        assert_eq!(quantize_map(&realized, &t).unwrap(), sm);
    }

    #[test]
    fn translated_system_shifts_phases_uniformly() {
        let g = ArrayGeometry::new(5, 5, 1.125e-3).unwrap();
        let feed = FeedModel::point_source([0.0, 0.0, 0.03], 0.0, true).unwrap();
        let u0 = Direction::from_degrees(25.0, 10.0).unwrap();
        let d = [0.004, -0.002, 0.0];
        let pos = element_positions(&g);
        let moved = translate_positions(&pos, &d);
        let a = continuous_phases(&pos, &feed, &u0, 0.0, F);
        let b = continuous_phases(&moved, &feed.translated(&d), &u0, 0.0, F);
        let k = wavenumber(F);
        let shift = -k * dot(&u0.unit(), &d);
        for (x, y) in a.iter().zip(&b) {
            assert!(circular_distance(x + shift, *y) < 1e-9);
        }
    }

    #[test]
    fn state_map_validation() {
        let g = ArrayGeometry::new(2, 1, 1e-3).unwrap();
        assert!(StateMap::new(g, F, 2, vec![0, 2]).is_err());
        assert!(StateMap::new(g, F, 2, vec![0]).is_err());
        let sm = StateMap::new(g, F, 2, vec![0, 1]).unwrap();
        assert_eq!(sm.flipped().indices(), &[1, 0]);
        assert!(PhaseMap::new(g, F, vec![0.0, TAU]).is_err());
    }
}
