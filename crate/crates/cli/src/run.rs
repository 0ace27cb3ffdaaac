//! The three subcommands.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use spinrg::analysis::{chi_squared, epsilon_delta_h, fit_exponential, FitResult};
use spinrg::observables::{run_comparison, Comparison};

use crate::config::{
    EntropyBaseSpec, ExperimentConfig, GridSpec, InitialStateSpec, ModeSpec, ModelName,
};
use crate::error::CliError;
use crate::output::{fmt_value, series_csv, series_file_name, sha256_hex, ArtifactWriter, FileRecord};

const CHI2_NOTE: &str = "chi2 is the plain sum of squared differences over the grid points; \
                         its scale depends on grid density";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compare,
    Convergence,
    Epsilon,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Compare => "compare",
            Command::Convergence => "convergence",
            Command::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitJson {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub residual: f64,
}

impl From<&FitResult> for FitJson {
    fn from(f: &FitResult) -> Self {
        Self {
            a: f.a,
            b: f.b,
            c: f.c,
            residual: f.residual,
        }
    }
}

/// Everything needed to regenerate a table.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub config_sha256: String,
    pub observable_detail: String,
    pub grid: GridSpec,
    pub initial_state: Option<InitialStateSpec>,
    pub normalize_truncated_state: bool,
    pub observable_mode: ModeSpec,
    pub rg_steps: usize,
    pub entropy_base: EntropyBaseSpec,
    pub seed: Option<u64>,
    pub fit_model: Option<&'static str>,
    pub r_squared: Option<f64>,
    pub fit_iterations: Option<usize>,
    pub fit_degenerate: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub observable: String,
    pub model: &'static str,
    pub points: Vec<(usize, f64)>,
    pub fit: Option<FitJson>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub n_spins: usize,
    pub n_coarse: usize,
    pub truncation_fidelity: f64,
    pub offset_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    config_sha256: String,
    wall_time_seconds: f64,
    memory_estimate_bytes: Option<u64>,
    runs: Vec<RunRecord>,
    files: &'a [FileRecord],
}

/// Hash of the configuration with the output location stripped.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = None;
    let text = serde_json::to_string(&c).expect("config serializes");
    sha256_hex(text.as_bytes())
}

pub struct Runner<'a> {
    pub cfg: &'a ExperimentConfig,
    pub writer: ArtifactWriter,
    pub allow_large: bool,
}

impl Runner<'_> {
    pub fn run(mut self, cmd: Command) -> Result<(), CliError> {
        let start = Instant::now();
        self.cfg.validate()?;
        if cmd == Command::Convergence && self.cfg.n_values.len() < 3 {
            return Err(CliError::Config(format!(
                "convergence needs at least 3 values of N, got {}",
                self.cfg.n_values.len()
            )));
        }
        let (runs, memory) = match cmd {
            Command::Compare | Command::Convergence => {
                let memory = self.cfg.check_resources(self.allow_large)?;
                if self.allow_large {
                    eprintln!("estimated peak memory: {}", crate::config::human_bytes(memory));
                }
                let comparisons = self.compare()?;
                let tables = self.chi2_tables(&comparisons)?;
                if cmd == Command::Convergence {
                    self.fit_tables(tables)?;
                }
                let runs = comparisons
                    .iter()
                    .map(|c| RunRecord {
                        n_spins: c.n_spins,
                        n_coarse: c.n_coarse,
                        truncation_fidelity: c.truncation_fidelity,
                        offset_deviation: c.offset_deviation,
                    })
                    .collect();
                (runs, Some(memory))
            }
            Command::Epsilon => {
                self.epsilon()?;
                (Vec::new(), None)
            }
        };
        let manifest = Manifest {
            tool: "spinrg",
            version: env!("CARGO_PKG_VERSION"),
            command: cmd.name(),
            config: self.cfg,
            config_sha256: config_hash(self.cfg),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            memory_estimate_bytes: memory,
            runs,
            files: self.writer.files(),
        };
        self.writer.write_manifest(&manifest)?;
        eprintln!(
            "wrote {} files and manifest.json to {}",
            self.writer.files().len(),
            self.writer.dir().display()
        );
        Ok(())
    }

    fn sorted_ns(&self) -> Vec<usize> {
        let mut ns = self.cfg.n_values.clone();
        ns.sort_unstable();
        ns
    }

    fn compare(&mut self) -> Result<Vec<Comparison>, CliError> {
        let cfg = self.cfg;
        let grid = cfg.grid()?;
        let kinds = cfg.kinds();
        let opts = cfg.options();
        let initial = cfg.initial_state();
        let comparisons = self
            .sorted_ns()
            .par_iter()
            .map(|&n| {
                let t0 = Instant::now();
                let cmp = run_comparison(&cfg.chain(n)?, &initial, &grid, &kinds, &opts)?;
                eprintln!(
                    "N = {n}: fidelity {:.6}, {:.1}s",
                    cmp.truncation_fidelity,
                    t0.elapsed().as_secs_f64()
                );
                Ok(cmp)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let model = cfg.model.as_str();
        for cmp in &comparisons {
            for s in cmp.original.iter().chain(&cmp.renormalized) {
                let name = series_file_name(model, s, cmp.n_spins);
                self.writer.write(&name, series_csv(s).as_bytes())?;
            }
        }
        Ok(comparisons)
    }

    fn metadata(&self, detail: String) -> Metadata {
        let cfg = self.cfg;
        Metadata {
            config_sha256: config_hash(cfg),
            observable_detail: detail,
            grid: cfg.grid,
            initial_state: cfg.initial_state.clone(),
            normalize_truncated_state: cfg.normalize_truncated_state,
            observable_mode: cfg.observable_mode,
            rg_steps: cfg.rg_steps,
            entropy_base: cfg.entropy_base,
            seed: cfg.seed(),
            fit_model: None,
            r_squared: None,
            fit_iterations: None,
            fit_degenerate: None,
            note: CHI2_NOTE.to_string(),
        }
    }

    fn chi2_tables(&mut self, comparisons: &[Comparison]) -> Result<Vec<Table>, CliError> {
        let model = self.cfg.model.as_str();
        let mut tables = Vec::new();
        for kind in self.cfg.kinds() {
            let points = comparisons
                .iter()
                .map(|cmp| {
                    let (o, r) = cmp
                        .pairs()
                        .find(|(o, _)| o.label.kind == kind)
                        .expect("every requested observable is produced");
                    Ok((cmp.n_spins, chi_squared(o, r)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let table = Table {
                observable: kind.name().to_string(),
                model,
                points,
                fit: None,
                metadata: self.metadata(kind.to_string()),
            };
            self.writer
                .write_json(&format!("{model}_{}_chi2.json", kind.name()), &table)?;
            tables.push(table);
        }
        Ok(tables)
    }

    fn fit_tables(&mut self, tables: Vec<Table>) -> Result<(), CliError> {
        let with_offset = self.cfg.model == ModelName::Heisenberg;
        for mut table in tables {
            let pts: Vec<(f64, f64)> = table.points.iter().map(|&(n, y)| (n as f64, y)).collect();
            let fit = fit_exponential(&pts, with_offset)?;
            table.fit = Some((&fit).into());
            table.metadata.fit_model = Some(if with_offset { "a*2^(-b*N)+c" } else { "a*2^(-b*N)" });
            table.metadata.r_squared = fit.r_squared;
            table.metadata.fit_iterations = Some(fit.iterations);
            table.metadata.fit_degenerate = Some(fit.degenerate);
            eprintln!(
                "{}: a = {:.6}, b = {:.6}, c = {:.6}",
                table.observable, fit.a, fit.b, fit.c
            );
            let name = format!("{}_{}_fit.json", table.model, table.observable);
            self.writer.write_json(&name, &table)?;
        }
        Ok(())
    }

    fn epsilon(&mut self) -> Result<(), CliError> {
        let model = self.cfg.model.as_str();
        let ns = self.sorted_ns();
        let reports = ns
            .par_iter()
            .map(|&n| Ok(epsilon_delta_h(&self.cfg.chain(n)?)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut csv = String::from("N,epsilon\n");
        for r in &reports {
            csv.push_str(&format!("{},{}\n", r.n_spins, fmt_value(r.epsilon)));
        }
        self.writer.write(&format!("{model}_epsilon.csv"), csv.as_bytes())?;

        let points: Vec<(usize, f64)> = reports.iter().map(|r| (r.n_spins, r.epsilon)).collect();
        let mut meta = self.metadata("epsilon(delta H)".to_string());
        meta.note = "normalized discrepancy of the projected Hamiltonian; time grid unused".into();
        let fit = if points.len() < 3 {
            eprintln!("notice: fit skipped, need at least 3 values of N");
            meta.note.push_str("; fit skipped: fewer than 3 values of N");
            None
        } else if points.iter().all(|&(_, e)| e.abs() <= 1e-12) {
            eprintln!("notice: fit skipped, epsilon vanishes for every N");
            meta.note.push_str("; fit skipped: epsilon vanishes");
            None
        } else {
            let pts: Vec<(f64, f64)> = points.iter().map(|&(n, y)| (n as f64, y)).collect();
            let fit = fit_exponential(&pts, false)?;
            eprintln!("epsilon: a = {:.6}, b = {:.6}", fit.a, fit.b);
            meta.fit_model = Some("a*2^(-b*N)");
            meta.r_squared = fit.r_squared;
            meta.fit_iterations = Some(fit.iterations);
            meta.fit_degenerate = Some(fit.degenerate);
            Some(FitJson::from(&fit))
        };
        let table = Table {
            observable: "epsilon".into(),
            model,
            points,
            fit,
            metadata: meta,
        };
        self.writer.write_json(&format!("{model}_epsilon_fit.json"), &table)
    }
}
