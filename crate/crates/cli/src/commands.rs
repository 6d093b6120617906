//! Command implementations. Each command writes its artifacts atomically
//! (temporary file, then rename), reads them back to validate, and appends a
//! reproducibility record to the output directory.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ris_core::export;
use ris_core::farfield::{self, state_map_pattern};
use ris_core::{
    beam_metrics, brute_force_best_map, direct_sum_oracle, element_excitations, enhancement,
    frequency_sweep, synthesize, ArrayGeometry, EvalOptions, Execution, StateMap, SweepOptions,
    Synthesis,
};

use crate::error::{CliError, Result};
use crate::scenario::Resolved;

/// Largest pointwise relative error accepted by `oracle-check`.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Synth,
    Pattern,
    Enhance,
    Sweep,
    OracleCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Synth => "synth",
            Command::Pattern => "pattern",
            Command::Enhance => "enhance",
            Command::Sweep => "sweep",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub freeze_map: bool,
    pub element_factor: bool,
}

/// Files written by a command, in write order.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Artifacts {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let werr = |e: std::io::Error| CliError::Write {
            path: path.clone(),
            message: e.to_string(),
        };
        fs::write(&tmp, bytes).map_err(werr)?;
        fs::rename(&tmp, &path).map_err(werr)?;
        let back = fs::read(&path).map_err(werr)?;
        if back != bytes {
            return Err(CliError::Write {
                path,
                message: "read-back mismatch".into(),
            });
        }
        self.files.push(path);
        Ok(())
    }
}

fn eval_options(r: &Resolved, opts: &RunOptions) -> EvalOptions {
    EvalOptions {
        element_factor: opts.element_factor || r.scenario.pattern.element_factor,
        execution: Execution::default(),
    }
}

fn synth(r: &Resolved) -> Result<Synthesis> {
    Ok(synthesize(
        &r.geometry,
        &r.feed,
        &r.target,
        r.frequency,
        &r.table,
        r.scenario.synthesis.n_offsets,
        Execution::default(),
    )?)
}

/// Run `cmd` on a resolved scenario, returning the artifacts written.
pub fn run_command(cmd: Command, r: &Resolved, opts: &RunOptions) -> Result<Artifacts> {
    let dir = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| r.scenario.output_dir.clone());
    fs::create_dir_all(&dir).map_err(|e| CliError::Write {
        path: dir.clone(),
        message: e.to_string(),
    })?;
    let mut art = Artifacts {
        dir,
        files: Vec::new(),
    };
    let eval = eval_options(r, opts);

    match cmd {
        Command::Synth => {
            let s = synth(r)?;
            art.write(
                "phase_map.csv",
                export::phase_map_csv(&s.phase_map).as_bytes(),
            )?;
            art.write(
                "state_map.csv",
                export::state_map_csv(&s.state_map).as_bytes(),
            )?;
            art.write("phase_map.pgm", &export::phase_map_pgm(&s.phase_map))?;
            art.write("state_map.pgm", &export::state_map_pgm(&s.state_map))?;
        }
        Command::Pattern => {
            let s = synth(r)?;
            let p = state_map_pattern(
                &r.geometry,
                &r.feed,
                &s.state_map,
                &r.table,
                r.frequency,
                &r.observation,
                r.scenario.pattern.ideal_magnitude,
                &eval,
            )?;
            let m = beam_metrics(&p)?;
            let e = enhancement_for(r, &s.state_map, r.scenario.enhance.uniform_state)?;
            art.write("pattern.csv", export::pattern_csv(&p).as_bytes())?;
            art.write(
                "metrics.txt",
                export::metrics_text(Some(&m), Some(e)).as_bytes(),
            )?;
        }
        Command::Enhance => {
            let s = synth(r)?;
            let chosen = r.scenario.enhance.uniform_state;
            let mut text =
                export::metrics_text(None, Some(enhancement_for(r, &s.state_map, chosen)?));
            let _ = writeln!(text, "uniform_state = {chosen}");
            for state in 0..r.table.len() {
                let e = enhancement(
                    &r.geometry,
                    &r.feed,
                    &s.state_map,
                    &r.table,
                    state,
                    &r.observe_enhancement,
                    r.frequency,
                )?;
                let _ = writeln!(text, "enhancement_db_state_{state} = {}", e.db);
                let _ = writeln!(text, "degenerate_state_{state} = {}", e.degenerate);
            }
            art.write("enhancement.txt", text.as_bytes())?;
        }
        Command::Sweep => {
            let freqs = if r.scenario.sweep.frequencies_hz.is_empty() {
                vec![r.frequency]
            } else {
                r.scenario.sweep.frequencies_hz.clone()
            };
            let sweep = SweepOptions {
                n_offsets: r.scenario.synthesis.n_offsets,
                observation: r.observation.clone(),
                freeze_map: opts.freeze_map || r.scenario.sweep.freeze_map,
                eval,
            };
            let entries =
                frequency_sweep(&r.geometry, &r.feed, &r.target, &r.table, &freqs, &sweep);
            art.write("sweep.csv", export::sweep_csv(&entries).as_bytes())?;
        }
        Command::OracleCheck => {
            let report = oracle_check(r, &eval)?;
            art.write("oracle_check.txt", report.text.as_bytes())?;
            if !report.passed {
                return Err(CliError::OracleMismatch(report.summary()));
            }
        }
    }
    append_record(&art.dir, cmd, r, opts)?;
    Ok(art)
}

fn enhancement_for(r: &Resolved, sm: &StateMap, state: usize) -> Result<f64> {
    Ok(enhancement(
        &r.geometry,
        &r.feed,
        sm,
        &r.table,
        state,
        &r.observe_enhancement,
        r.frequency,
    )?
    .db)
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub max_relative_error: f64,
    pub quantized_peak: f64,
    pub brute_force_peak: f64,
    pub passed: bool,
    pub text: String,
}

impl OracleReport {
    fn summary(&self) -> String {
        format!(
            "max_relative_error={} quantized_peak={} brute_force_peak={}",
            self.max_relative_error, self.quantized_peak, self.brute_force_peak
        )
    }
}

/// Compare the factored evaluator with the direct sum over the pattern cut,
/// and the offset-swept quantized map with exhaustive search, on an
/// `oracle.nx x oracle.ny` copy of the scenario.
pub fn oracle_check(r: &Resolved, eval: &EvalOptions) -> Result<OracleReport> {
    let spec = &r.scenario.oracle;
    let g = ArrayGeometry::new(spec.nx, spec.ny, r.geometry.pitch())?;
    let f = r.frequency;
    let s = synthesize(
        &g,
        &r.feed,
        &r.target,
        f,
        &r.table,
        r.scenario.synthesis.n_offsets,
        eval.execution,
    )?;
    let exc = element_excitations(&g, &r.feed, f);
    let refl = s.state_map.reflections(&r.table, f, false)?;

    let plain = EvalOptions {
        element_factor: false,
        ..*eval
    };
    let p = ris_core::array_factor(&g, &exc, &refl, &r.observation, f, &plain)?;
    let mut max_rel = 0.0f64;
    for (n, af) in p.samples.iter().enumerate() {
        let direct = direct_sum_oracle(&g, &exc, &refl, &r.observation.unit(n), f)?;
        let rel = if direct.norm() == 0.0 {
            (af - direct).norm()
        } else {
            (af - direct).norm() / direct.norm()
        };
        max_rel = max_rel.max(rel);
    }

    let (_, brute_peak) =
        brute_force_best_map(&g, &r.feed, &r.table, &r.target, f, eval.execution)?;
    let quant_peak = farfield::field_at(&g, &exc, &refl, &r.target.unit(), f)?.norm();
    let dominance = brute_peak >= quant_peak * (1.0 - ORACLE_TOLERANCE);
    let equivalence = max_rel <= ORACLE_TOLERANCE;

    let mut text = String::new();
    let _ = writeln!(text, "sub_scenario = \"{}x{}\"", g.nx(), g.ny());
    let _ = writeln!(text, "directions = {}", p.samples.len());
    let _ = writeln!(text, "max_relative_error = {max_rel}");
    let _ = writeln!(text, "tolerance = {ORACLE_TOLERANCE}");
    let _ = writeln!(
        text,
        "equivalence = {}",
        if equivalence { "pass" } else { "fail" }
    );
    let _ = writeln!(text, "quantized_peak = {quant_peak}");
    let _ = writeln!(text, "brute_force_peak = {brute_peak}");
    let _ = writeln!(
        text,
        "dominance = {}",
        if dominance { "pass" } else { "fail" }
    );
    Ok(OracleReport {
        max_relative_error: max_rel,
        quantized_peak: quant_peak,
        brute_force_peak: brute_peak,
        passed: equivalence && dominance,
        text,
    })
}

fn append_record(dir: &Path, cmd: Command, r: &Resolved, opts: &RunOptions) -> Result<()> {
    let path = dir.join("reproducibility.log");
    let mut record = String::new();
    let _ = writeln!(record, "# ---- run ----");
    let _ = writeln!(record, "# command = {}", cmd.name());
    let _ = writeln!(record, "# tool = ris {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(record, "# freeze_map = {}", opts.freeze_map);
    let _ = writeln!(record, "# element_factor_flag = {}", opts.element_factor);
    let _ = writeln!(record, "# resolved_frequency_hz = {}", r.frequency);
    let _ = writeln!(
        record,
        "# threads = {}",
        std::env::var("RIS_THREADS").unwrap_or_else(|_| "default".into())
    );
    record.push_str(&r.scenario.to_toml());
    record.push('\n');
    let werr = |e: std::io::Error| CliError::Write {
        path: path.clone(),
        message: e.to_string(),
    };
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(werr)?;
    file.write_all(record.as_bytes()).map_err(werr)
}
