//! Far-field array factor, beam metrics and the brute-force oracles.
//!
//! ```text
//! AF(u) = sum_ij excitation(i, j) * reflection(i, j) * exp(+j k (u . r(i, j)))
//! ```
//!
//! The production evaluator factors the exponential over the lattice rows and
//! columns. [`direct_sum_oracle`] is the unfactored per-element loop and is
//! kept independent of it on purpose.

use num_complex::Complex64;

use crate::error::{Result, RisError};
use crate::exec::{map_indexed, Execution};
use crate::geometry::{
    add, dot, element_positions, norm, sub, ArrayGeometry, Direction, FeedModel, Vec3,
};
use crate::synthesis::{synthesize, wavenumber, StateMap};
use crate::unitcell::UnitCellStateTable;

/// Largest number of candidate maps [`brute_force_best_map`] will enumerate.
pub const BRUTE_FORCE_CAP: u64 = 1 << 20;

/// Relative margin under which two samples count as the same peak.
const PEAK_TIE_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Multiply the array factor by a `cos(theta)` element pattern.
    pub element_factor: bool,
    pub execution: Execution,
}

/// Sampling of observation directions.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    /// Signed polar angles in `[-pi/2, pi/2]` within the azimuth cut `phi`.
    Cut { phi: f64, thetas: Vec<f64> },
    /// Theta-major grid over `thetas x phis`.
    Grid { thetas: Vec<f64>, phis: Vec<f64> },
}

impl Observation {
    /// Uniform cut from `min_deg` to `max_deg` (inclusive) in steps of `step_deg`.
    pub fn cut_degrees(min_deg: f64, max_deg: f64, step_deg: f64, phi_deg: f64) -> Result<Self> {
        if !(step_deg.is_finite() && step_deg > 0.0) {
            return Err(RisError::invalid(format!(
                "theta step must be positive, got {step_deg}"
            )));
        }
        if !(min_deg.is_finite() && max_deg.is_finite() && phi_deg.is_finite()) {
            return Err(RisError::invalid("cut bounds must be finite"));
        }
        if !(-90.0..=90.0).contains(&min_deg)
            || !(-90.0..=90.0).contains(&max_deg)
            || min_deg > max_deg
        {
            return Err(RisError::invalid(format!(
                "cut must satisfy -90 <= min <= max <= 90, got [{min_deg}, {max_deg}]"
            )));
        }
        let n = ((max_deg - min_deg) / step_deg + 1e-9).floor() as usize;
        let thetas = (0..=n)
            .map(|m| (min_deg + m as f64 * step_deg).to_radians())
            .collect();
        Ok(Observation::Cut {
            phi: phi_deg.to_radians(),
            thetas,
        })
    }

    /// The default 0.25 degree cut over the full `[-90, 90]` range at `phi = 0`.
    pub fn default_cut() -> Self {
        Self::cut_degrees(-90.0, 90.0, 0.25, 0.0).expect("default cut is valid")
    }

    pub fn len(&self) -> usize {
        match self {
            Observation::Cut { thetas, .. } => thetas.len(),
            Observation::Grid { thetas, phis } => thetas.len() * phis.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(theta, phi)` of sample `n` in radians; cut thetas stay signed.
    pub fn angles(&self, n: usize) -> (f64, f64) {
        match self {
            Observation::Cut { phi, thetas } => (thetas[n], *phi),
            Observation::Grid { thetas, phis } => (thetas[n / phis.len()], phis[n % phis.len()]),
        }
    }

    /// Unit vector of sample `n`.
    pub fn unit(&self, n: usize) -> Vec3 {
        let (theta, phi) = self.angles(n);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Sampled complex array factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub observation: Observation,
    pub samples: Vec<Complex64>,
    pub frequency: f64,
    /// Largest `|AF|` over the samples, used for dB normalization.
    pub peak: f64,
}

impl Pattern {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm()).collect()
    }

    /// `20 log10(|AF| / peak)` per sample.
    pub fn normalized_db(&self) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| 20.0 * (s.norm() / self.peak).log10())
            .collect()
    }
}

/// Incident complex amplitude at every cell.
pub fn element_excitations(g: &ArrayGeometry, feed: &FeedModel, f: f64) -> Vec<Complex64> {
    excitations_at(&element_positions(g), feed, f)
}

/// Incident complex amplitude at arbitrary positions.
pub fn excitations_at(positions: &[Vec3], feed: &FeedModel, f: f64) -> Vec<Complex64> {
    let k = wavenumber(f);
    match *feed {
        FeedModel::PointSource {
            position,
            taper_exponent,
            spreading,
        } => {
            // boresight aims at the centroid of the cells
            let n = positions.len().max(1) as f64;
            let center = positions
                .iter()
                .fold([0.0; 3], |c, r| add(&c, r))
                .map(|c| c / n);
            let to_center = sub(&center, &position);
            let rc = norm(&to_center);
            let boresight = to_center.map(|c| c / rc);
            positions
                .iter()
                .map(|r| {
                    let d = sub(r, &position);
                    let range = norm(&d);
                    let cos_off = (dot(&d, &boresight) / range).max(0.0);
                    let mut amp = cos_off.powf(taper_exponent);
                    if spreading {
                        amp /= range;
                    }
                    Complex64::from_polar(amp, -k * range)
                })
                .collect()
        }
        FeedModel::PlaneWave {
            incidence,
            amplitude,
        } => {
            let u = incidence.unit();
            positions
                .iter()
                .map(|r| Complex64::from_polar(amplitude, k * dot(&u, r)))
                .collect()
        }
    }
}

fn check_lengths(
    g: &ArrayGeometry,
    excitations: &[Complex64],
    reflections: &[Complex64],
) -> Result<()> {
    if excitations.len() != g.len() || reflections.len() != g.len() {
        return Err(RisError::invalid(format!(
            "expected {} excitations and reflections, got {} and {}",
            g.len(),
            excitations.len(),
            reflections.len()
        )));
    }
    Ok(())
}

/// Row/column factored lattice sum of `weights` toward `u`.
fn lattice_sum(g: &ArrayGeometry, weights: &[Complex64], u: &Vec3, k: f64) -> Complex64 {
    let nx = g.nx();
    let col: Vec<Complex64> = (0..nx).map(|i| Complex64::cis(k * u[0] * g.x(i))).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, row) in weights.chunks_exact(nx).enumerate() {
        let s: Complex64 = row.iter().zip(&col).map(|(w, c)| w * c).sum();
        acc += s * Complex64::cis(k * u[1] * g.y(j));
    }
    acc
}

/// `AF(u)` at a single direction.
pub fn field_at(
    g: &ArrayGeometry,
    excitations: &[Complex64],
    reflections: &[Complex64],
    u: &Vec3,
    f: f64,
) -> Result<Complex64> {
    check_lengths(g, excitations, reflections)?;
    let weights: Vec<Complex64> = excitations
        .iter()
        .zip(reflections)
        .map(|(e, r)| e * r)
        .collect();
    Ok(lattice_sum(g, &weights, u, wavenumber(f)))
}

pub fn array_factor(
    g: &ArrayGeometry,
    excitations: &[Complex64],
    reflections: &[Complex64],
    observe: &Observation,
    f: f64,
    opts: &EvalOptions,
) -> Result<Pattern> {
    check_lengths(g, excitations, reflections)?;
    let k = wavenumber(f);
    let weights: Vec<Complex64> = excitations
        .iter()
        .zip(reflections)
        .map(|(e, r)| e * r)
        .collect();
    let samples = map_indexed(observe.len(), opts.execution, |n| {
        let u = observe.unit(n);
        let af = lattice_sum(g, &weights, &u, k);
        if opts.element_factor {
            af * u[2].max(0.0)
        } else {
            af
        }
    });
    let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    Ok(Pattern {
        observation: observe.clone(),
        samples,
        frequency: f,
        peak,
    })
}

/// Pattern of a state map under `feed`, with reflections looked up at `f`.
#[allow(clippy::too_many_arguments)]
pub fn state_map_pattern(
    g: &ArrayGeometry,
    feed: &FeedModel,
    sm: &StateMap,
    table: &UnitCellStateTable,
    f: f64,
    observe: &Observation,
    ideal_magnitude: bool,
    opts: &EvalOptions,
) -> Result<Pattern> {
    let exc = element_excitations(g, feed, f);
    let refl = sm.reflections(table, f, ideal_magnitude)?;
    array_factor(g, &exc, &refl, observe, f, opts)
}

/// Unfactored reference sum over arbitrary positions.
pub fn direct_sum_at_positions(
    positions: &[Vec3],
    excitations: &[Complex64],
    reflections: &[Complex64],
    u: &Vec3,
    f: f64,
) -> Complex64 {
    let k = wavenumber(f);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..positions.len() {
        let r = &positions[n];
        let path = u[0] * r[0] + u[1] * r[1] + u[2] * r[2];
        acc += excitations[n] * reflections[n] * Complex64::new((k * path).cos(), (k * path).sin());
    }
    acc
}

pub fn direct_sum_oracle(
    g: &ArrayGeometry,
    excitations: &[Complex64],
    reflections: &[Complex64],
    u: &Vec3,
    f: f64,
) -> Result<Complex64> {
    check_lengths(g, excitations, reflections)?;
    Ok(direct_sum_at_positions(
        &element_positions(g),
        excitations,
        reflections,
        u,
        f,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamMetrics {
    /// Signed polar angle of the main lobe within the cut (radians).
    pub main_lobe: f64,
    pub peak: f64,
    /// Half-power beamwidth (radians).
    pub hpbw: f64,
    /// Highest level outside the first nulls, dB relative to the peak.
    /// `None` when the cut holds nothing beyond the main lobe.
    pub sidelobe_db: Option<f64>,
}

/// Main lobe, half-power width and highest sidelobe of a cut pattern.
///
/// Samples within a relative `1e-9` of the maximum are treated as equal
/// peaks; among them the one with the smallest `|theta|` is the main lobe.
pub fn beam_metrics(p: &Pattern) -> Result<BeamMetrics> {
    let thetas = match &p.observation {
        Observation::Cut { thetas, .. } => thetas,
        Observation::Grid { .. } => {
            return Err(RisError::invalid("beam metrics need a single-azimuth cut"))
        }
    };
    let n = thetas.len();
    if n < 3 {
        return Err(RisError::invalid(format!(
            "beam metrics need at least 3 samples, got {n}"
        )));
    }
    let mag = p.magnitudes();
    let peak = mag.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(RisError::invalid("pattern is identically zero"));
    }
    let m = (0..n)
        .filter(|&i| mag[i] >= peak * (1.0 - PEAK_TIE_REL))
        .min_by(|&a, &b| thetas[a].abs().total_cmp(&thetas[b].abs()))
        .expect("the maximum is among the candidates");

    let half = mag[m] * mag[m] / 2.0;
    let power = |i: usize| mag[i] * mag[i];
    let crossing = |inner: usize, outer: usize| {
        let (pi, po) = (power(inner), power(outer));
        let t = (pi - half) / (pi - po);
        thetas[inner] + t * (thetas[outer] - thetas[inner])
    };
    let mut l = m;
    while l > 0 && power(l - 1) >= half {
        l -= 1;
    }
    let left = if l == 0 {
        thetas[0]
    } else {
        crossing(l, l - 1)
    };
    let mut r = m;
    while r + 1 < n && power(r + 1) >= half {
        r += 1;
    }
    let right = if r + 1 == n {
        thetas[n - 1]
    } else {
        crossing(r, r + 1)
    };

    let mut ln = m;
    while ln > 0 && mag[ln - 1] <= mag[ln] {
        ln -= 1;
    }
    let mut rn = m;
    while rn + 1 < n && mag[rn + 1] <= mag[rn] {
        rn += 1;
    }
    let outside = mag[..ln]
        .iter()
        .chain(&mag[rn + 1..])
        .copied()
        .fold(0.0, f64::max);
    let sidelobe_db = (outside > 0.0).then(|| 20.0 * (outside / mag[m]).log10());

    Ok(BeamMetrics {
        main_lobe: thetas[m],
        peak: mag[m],
        hpbw: right - left,
        sidelobe_db,
    })
}

/// ON/OFF contrast at one observation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enhancement {
    pub db: f64,
    /// The uniform map radiates nothing toward `u_obs`; `db` is `+inf`.
    pub degenerate: bool,
}

/// `20 log10(|AF_on(u)| / |AF_uniform(u)|)` with the uniform map set to `uniform_state`.
pub fn enhancement(
    g: &ArrayGeometry,
    feed: &FeedModel,
    sm_on: &StateMap,
    table: &UnitCellStateTable,
    uniform_state: usize,
    u_obs: &Direction,
    f: f64,
) -> Result<Enhancement> {
    if uniform_state >= table.len() {
        return Err(RisError::invalid(format!(
            "uniform state {uniform_state} invalid for a {}-state table",
            table.len()
        )));
    }
    let exc = element_excitations(g, feed, f);
    let u = u_obs.unit();
    let on = field_at(g, &exc, &sm_on.reflections(table, f, false)?, &u, f)?.norm();
    let uniform = StateMap::uniform(*g, f, table.len(), uniform_state)?;
    let off = field_at(g, &exc, &uniform.reflections(table, f, false)?, &u, f)?.norm();
    Ok(contrast_db(on, off))
}

/// `20 log10(on / off)`, flagged as degenerate when `off` is zero.
pub fn contrast_db(on: f64, off: f64) -> Enhancement {
    if off == 0.0 {
        Enhancement {
            db: f64::INFINITY,
            degenerate: true,
        }
    } else {
        Enhancement {
            db: 20.0 * (on / off).log10(),
            degenerate: false,
        }
    }
}

/// Exhaustively search every state map for the largest `|AF(u0)|`.
///
/// Candidates are visited in lexicographic order of the index vector
/// (element 0 most significant); the first maximizer wins.
pub fn brute_force_best_map(
    g: &ArrayGeometry,
    feed: &FeedModel,
    table: &UnitCellStateTable,
    u0: &Direction,
    f: f64,
    exec: Execution,
) -> Result<(StateMap, f64)> {
    let n_el = g.len();
    let n_states = table.len();
    let candidates = (n_states as f64).powi(n_el as i32);
    if candidates > BRUTE_FORCE_CAP as f64 {
        return Err(RisError::TooLarge {
            candidates,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let total = candidates as u64;
    let k = wavenumber(f);
    let u = u0.unit();
    let positions = element_positions(g);
    let exc = element_excitations(g, feed, f);
    let refl = table.reflections(f, false)?;
    // contrib[e * n_states + s]: element e in state s, propagated to u0
    let contrib: Vec<Complex64> = positions
        .iter()
        .zip(&exc)
        .flat_map(|(r, e)| {
            let steer = e * Complex64::cis(k * dot(&u, r));
            refl.iter().map(move |g| steer * g)
        })
        .collect();

    const CHUNK: u64 = 4096;
    let n_chunks = total.div_ceil(CHUNK) as usize;
    let best_per_chunk = map_indexed(n_chunks, exec, |c| {
        let start = c as u64 * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut digits = vec![0usize; n_el];
        let mut rest = start;
        for d in digits.iter_mut().rev() {
            *d = (rest % n_states as u64) as usize;
            rest /= n_states as u64;
        }
        let mut best = (f64::NEG_INFINITY, start);
        for idx in start..end {
            let mut acc = Complex64::new(0.0, 0.0);
            for (e, &s) in digits.iter().enumerate() {
                acc += contrib[e * n_states + s];
            }
            let v = acc.norm();
            if v > best.0 {
                best = (v, idx);
            }
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < n_states {
                    break;
                }
                *d = 0;
            }
        }
        best
    });
    let (peak, idx) = best_per_chunk
        .into_iter()
        .fold((f64::NEG_INFINITY, 0), |b, c| if c.0 > b.0 { c } else { b });

    let mut indices = vec![0usize; n_el];
    let mut rest = idx;
    for d in indices.iter_mut().rev() {
        *d = (rest % n_states as u64) as usize;
        rest /= n_states as u64;
    }
    Ok((StateMap::new(*g, f, n_states, indices)?, peak))
}

/// `sum |excitation| * |reflection|`: the `|AF|` reached when every term is
/// phase-aligned, an upper bound for any phase assignment.
pub fn coherent_bound(excitations: &[Complex64], reflection_magnitudes: &[f64]) -> f64 {
    excitations
        .iter()
        .zip(reflection_magnitudes)
        .map(|(e, m)| e.norm() * m)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub n_offsets: usize,
    pub observation: Observation,
    /// Reuse the map synthesized at the table's design frequency.
    pub freeze_map: bool,
    pub eval: EvalOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub frequency: f64,
    pub result: Result<BeamMetrics>,
}

/// Beam metrics per frequency. Failing entries (e.g. out of band) are
/// recorded and the sweep continues.
pub fn frequency_sweep(
    g: &ArrayGeometry,
    feed: &FeedModel,
    u0: &Direction,
    table: &UnitCellStateTable,
    frequencies: &[f64],
    opts: &SweepOptions,
) -> Vec<SweepEntry> {
    let frozen = opts.freeze_map.then(|| {
        synthesize(
            g,
            feed,
            u0,
            table.design_frequency(),
            table,
            opts.n_offsets,
            opts.eval.execution,
        )
        .map(|s| s.state_map)
    });
    frequencies
        .iter()
        .map(|&f| {
            let result = (|| {
                let sm = match &frozen {
                    Some(Ok(sm)) => sm.clone(),
                    Some(Err(e)) => return Err(e.clone()),
                    None => {
                        synthesize(g, feed, u0, f, table, opts.n_offsets, opts.eval.execution)?
                            .state_map
                    }
                };
                let p = state_map_pattern(
                    g,
                    feed,
                    &sm,
                    table,
                    f,
                    &opts.observation,
                    false,
                    &opts.eval,
                )?;
                beam_metrics(&p)
            })();
            SweepEntry {
                frequency: f,
                result,
            }
        })
        .collect()
}
