//! Batch front end: configuration schemas, command execution and artifact output.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};

use crate::elastica::{
    extremal_report, integrate_extremal, soliton_candidate, travelling_wave_residuals,
    ExtremalState, Resolution, SolitonTargets,
};
use crate::error::{Error, Result};
use crate::frames::{
    controls_from_frenet, geometric_invariants, horizontal_lift, integrate_frame_with,
    project_base, ControlSignal, Scheme,
};
use crate::grid::PeriodicGrid;
use crate::hasimoto::{hasimoto_of_trajectory, nls_check, NlsCheck};
use crate::hierarchy::{
    evolve_f1, f3_flow, functionals_of_controls, functionals_of_spin, poisson_bracket_f0_f1,
    FunctionalSeries, DEFAULT_STABILITY_F1,
};
use crate::io::{self, Series};
use crate::liealg::{
    bracket, matrix_bracket, parse_table, AlgebraElement, SpaceForm, BASIS_NAMES, TABLE_EPS,
    TABLE_POISSON, TABLE_SL2,
};
use crate::magnetic::{evolve_with, EvolveOptions, FlowTrajectory, DEFAULT_STABILITY};
use crate::samples::{random_controls, rng, SpinInit};

#[derive(Debug, Parser)]
#[command(
    name = "darboux",
    version,
    about = "Framed curves, magnetic flows, the Hasimoto map and elastica"
)]
pub struct Cli {
    /// JSON configuration of the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for refinement sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Validate the configuration and print the plan without computing or writing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Verify the three bracket tables and the matrix commutator oracle.
    Tables {
        /// Corrupt one expected entry, `TABLE:ROW:COL` (e.g. `2:B2:B3`), to exercise failure reporting.
        #[arg(long, hide = true)]
        inject: Option<String>,
    },
    /// Integrate a frame from controls; write the frame, base curve and invariants.
    Frame,
    /// Run a flow of the hierarchy on a spin field.
    Flow {
        #[arg(value_enum)]
        kind: FlowKind,
    },
    /// Magnetic flow -> Hasimoto field -> NLS -> Lax pair -> spins, with refinement.
    HasimotoCheck,
    /// Integrate an extremal and check its invariants and reductions.
    Elastica,
    /// Soliton candidate and its travelling-wave residual table.
    Soliton,
    /// Functionals and the Poisson bracket of a spin field.
    Invariants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Heisenberg,
    F1,
    Shortening,
}

impl FlowKind {
    fn name(self) -> &'static str {
        match self {
            FlowKind::Heisenberg => "heisenberg",
            FlowKind::F1 => "f1",
            FlowKind::Shortening => "shortening",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub n: usize,
}

impl GridConfig {
    fn periodic(&self) -> Result<PeriodicGrid> {
        PeriodicGrid::periodic(self.length, self.n)
    }
}

fn default_record_every() -> usize {
    1
}

fn default_tol() -> f64 {
    1e-12
}

fn default_samples() -> usize {
    1001
}

fn default_one() -> f64 {
    1.0
}

fn default_hyperbolic() -> SpaceForm {
    SpaceForm::Hyperbolic
}

/// Controls for the `frame` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlsSpec {
    Constant {
        u: [f64; 3],
    },
    /// Constant curvature and torsion through the Serret-Frenet dictionary.
    Frenet {
        kappa: f64,
        tau: f64,
    },
    Random {
        modes: usize,
        amplitude: f64,
        kappa0: f64,
    },
    /// CSV with columns `s, u1, u2, u3`, relative to the configuration file.
    Csv {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub form: SpaceForm,
    pub grid: GridConfig,
    pub controls: ControlsSpec,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub form: SpaceForm,
    pub grid: GridConfig,
    pub init: SpinInit,
    pub t_final: f64,
    /// Time step of the magnetic and `f1` flows.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Constant `c` of the stability bound; defaults per flow.
    #[serde(default)]
    pub stability: Option<f64>,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Output times of the translation flow.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HasimotoConfig {
    pub form: SpaceForm,
    pub grid: GridConfig,
    pub init: SpinInit,
    pub t_final: f64,
    pub dt: f64,
    /// Number of joint refinements (`N` doubled and `dt` halved each time).
    #[serde(default)]
    pub refinements: usize,
    #[serde(default)]
    pub stability: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticaConfig {
    pub form: SpaceForm,
    pub h: [f64; 3],
    #[serde(rename = "H")]
    pub hh: [f64; 3],
    pub span: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonConfig {
    #[serde(default = "default_hyperbolic")]
    pub form: SpaceForm,
    pub targets: SolitonTargets,
    /// Length of the integrated extremal.
    pub span: f64,
    /// Intervals of the candidate's control grid.
    pub n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Length of the spatial window.
    pub window: f64,
    pub t_final: f64,
    pub levels: Vec<Resolution>,
    /// Multiplier applied to the wave speed `xi = -H1`.
    #[serde(default = "default_one")]
    pub xi_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsConfig {
    pub form: SpaceForm,
    pub grid: GridConfig,
    pub init: SpinInit,
    #[serde(default)]
    pub seed: u64,
}

/// Parse a configuration, reporting the JSON path of the first schema violation.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn load_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| Error::Config {
        path: ".".into(),
        message: "this command needs --config".into(),
    })?;
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// A validated command ready to run.
#[derive(Debug, Clone)]
pub enum Job {
    Tables {
        inject: Option<String>,
    },
    Frame {
        config: FrameConfig,
        base_dir: PathBuf,
    },
    Flow {
        kind: FlowKind,
        config: FlowConfig,
    },
    HasimotoCheck(HasimotoConfig),
    Elastica(ElasticaConfig),
    Soliton(SolitonConfig),
    Invariants(InvariantsConfig),
}

/// Result of a command: pass/fail, a report, and the files to write.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub ok: bool,
    pub summary: String,
    pub report: Value,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Job {
    pub fn from_cli(cli: &Cli) -> Result<Job> {
        let cfg = cli.config.as_deref();
        let base_dir = cfg
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Ok(match &cli.command {
            Command::Tables { inject } => Job::Tables {
                inject: inject.clone(),
            },
            Command::Frame => Job::Frame {
                config: load_config(cfg)?,
                base_dir,
            },
            Command::Flow { kind } => {
                let config: FlowConfig = load_config(cfg)?;
                if *kind != FlowKind::Shortening && config.dt.is_none() {
                    return Err(Error::Config {
                        path: "dt".into(),
                        message: "missing field `dt`".into(),
                    });
                }
                Job::Flow {
                    kind: *kind,
                    config,
                }
            }
            Command::HasimotoCheck => Job::HasimotoCheck(load_config(cfg)?),
            Command::Elastica => Job::Elastica(load_config(cfg)?),
            Command::Soliton => Job::Soliton(load_config(cfg)?),
            Command::Invariants => Job::Invariants(load_config(cfg)?),
        })
    }

    /// Names of the files the job writes.
    pub fn outputs(&self) -> Vec<String> {
        let v = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        match self {
            Job::Tables { .. } => v(&["tables.json"]),
            Job::Frame { .. } => v(&[
                "frame_controls.csv",
                "frame_group.csv",
                "frame_base.csv",
                "frame_invariants.csv",
                "frame_summary.json",
                "frame_invariants.svg",
            ]),
            Job::Flow { kind, .. } => [
                "trajectory.csv",
                "functionals.csv",
                "summary.json",
                "functionals.svg",
            ]
            .iter()
            .map(|f| format!("flow_{}_{f}", kind.name()))
            .collect(),
            Job::HasimotoCheck(_) => v(&[
                "hasimoto_psi.csv",
                "hasimoto_manifest.json",
                "hasimoto_residuals.csv",
                "hasimoto_report.json",
            ]),
            Job::Elastica(_) => v(&[
                "elastica_trajectory.csv",
                "elastica_report.json",
                "elastica_h1.svg",
            ]),
            Job::Soliton(_) => v(&[
                "soliton_candidate.json",
                "soliton_residuals.csv",
                "soliton_report.json",
            ]),
            Job::Invariants(_) => v(&["invariants.json"]),
        }
    }

    pub fn execute(&self, jobs: usize) -> Result<Outcome> {
        match self {
            Job::Tables { inject } => cmd_tables(inject.as_deref()),
            Job::Frame { config, base_dir } => cmd_frame(config, base_dir),
            Job::Flow { kind, config } => cmd_flow(*kind, config),
            Job::HasimotoCheck(c) => cmd_hasimoto(c, jobs),
            Job::Elastica(c) => cmd_elastica(c),
            Job::Soliton(c) => cmd_soliton(c),
            Job::Invariants(c) => cmd_invariants(c),
        }
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    Ok(io::json_string(v)?.into_bytes())
}

// ---------------------------------------------------------------------------
// tables

/// One verified or failing table entry.
#[derive(Debug, Clone, Serialize)]
pub struct TableFailure {
    pub table: String,
    pub row: &'static str,
    pub col: &'static str,
    pub expected: [f64; 6],
    pub computed: [f64; 6],
}

fn parse_injection(spec: &str) -> Result<(usize, usize, usize)> {
    let bad = || Error::InvalidInput(format!("injection '{spec}' is not TABLE:ROW:COL"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let t: usize = parts[0].parse().map_err(|_| bad())?;
    let idx = |s: &str| BASIS_NAMES.iter().position(|n| *n == s).ok_or_else(bad);
    if !(1..=3).contains(&t) {
        return Err(bad());
    }
    Ok((t, idx(parts[1])?, idx(parts[2])?))
}

/// Verifies every entry of the three tables: the constant table against the
/// bracket at `eps = -1`, the parametrized table at `eps = 0` and `+1`, and the
/// Poisson table at all three cases. Also runs the commutator oracle and the
/// Jacobi identity on basis triples.
pub fn cmd_tables(inject: Option<&str>) -> Result<Outcome> {
    let injection = inject.map(parse_injection).transpose()?;
    let mut failures = Vec::new();
    let mut checked = 0usize;
    let tables: [(usize, &str, &[&str; 6], &[SpaceForm]); 3] = [
        (
            1,
            "table 1 (eps = -1)",
            &TABLE_SL2,
            &[SpaceForm::Hyperbolic],
        ),
        (
            2,
            "table 2 (eps = 0, +1)",
            &TABLE_EPS,
            &[SpaceForm::Euclidean, SpaceForm::Spherical],
        ),
        (
            3,
            "table 3 (Poisson, all eps)",
            &TABLE_POISSON,
            &SpaceForm::ALL,
        ),
    ];
    for (id, name, rows, forms) in tables {
        for i in 0..6 {
            for j in 0..6 {
                checked += 1;
                for &form in forms {
                    let parsed = parse_table(rows, form.epsilon())?;
                    let mut expected = parsed[i][j];
                    if injection == Some((id, i, j)) {
                        expected = expected + AlgebraElement::a_basis(0);
                    }
                    let computed =
                        bracket(&AlgebraElement::basis(i), &AlgebraElement::basis(j), form);
                    if (computed - expected).max_abs() != 0.0 {
                        failures.push(TableFailure {
                            table: format!("{name} at eps = {}", form.epsilon_int()),
                            row: BASIS_NAMES[i],
                            col: BASIS_NAMES[j],
                            expected: expected.to_array(),
                            computed: computed.to_array(),
                        });
                        break;
                    }
                }
            }
        }
    }
    // matrix commutator on the half-normalized realization, eps = -1
    let mut oracle = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let (x, y) = (AlgebraElement::basis(i), AlgebraElement::basis(j));
            let m = matrix_bracket(&x.to_matrix(), &y.to_matrix());
            oracle = oracle.max(m.dist(&bracket(&x, &y, SpaceForm::Hyperbolic).to_matrix()));
        }
    }
    let mut jacobi = 0.0f64;
    for form in SpaceForm::ALL {
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    let (x, y, z) = (
                        AlgebraElement::basis(i),
                        AlgebraElement::basis(j),
                        AlgebraElement::basis(k),
                    );
                    let b = |p: &AlgebraElement, q: &AlgebraElement| bracket(p, q, form);
                    let s = b(&x, &b(&y, &z)) + b(&y, &b(&z, &x)) + b(&z, &b(&x, &y));
                    jacobi = jacobi.max(s.max_abs());
                }
            }
        }
    }
    let ok = failures.is_empty() && oracle <= 1e-15 && jacobi == 0.0;
    let summary = match failures.first() {
        None => format!(
            "{checked} table entries verified; commutator oracle {oracle:.1e}; Jacobi on basis triples {jacobi:.1e}"
        ),
        Some(f) => format!(
            "FAIL {}: [{}, {}] expected {:?}, bracket gives {:?}",
            f.table, f.row, f.col, f.expected, f.computed
        ),
    };
    let report = json!({
        "entries_checked": checked,
        "failures": failures,
        "commutator_oracle_max": oracle,
        "jacobi_max": jacobi,
        "ok": ok,
    });
    let files = vec![("tables.json".to_string(), json_bytes(&report)?)];
    Ok(Outcome {
        ok,
        summary,
        report,
        files,
    })
}

// ---------------------------------------------------------------------------
// frame

fn build_controls(c: &FrameConfig, base_dir: &Path) -> Result<ControlSignal> {
    let grid = c.grid.periodic()?;
    match &c.controls {
        ControlsSpec::Constant { u } => Ok(ControlSignal::from_fn(grid, |_| *u)),
        ControlsSpec::Frenet { kappa, tau } => {
            controls_from_frenet(grid, &vec![*kappa; grid.n], &vec![*tau; grid.n], c.form)
        }
        ControlsSpec::Random {
            modes,
            amplitude,
            kappa0,
        } => Ok(random_controls(
            grid,
            *modes,
            *amplitude,
            *kappa0,
            &mut rng(c.seed),
        )),
        ControlsSpec::Csv { path } => {
            let full = base_dir.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
            let u = ControlSignal::from_csv(&text, c.grid.length, true)?;
            if u.grid.n != c.grid.n {
                return Err(Error::Config {
                    path: "grid.n".into(),
                    message: format!("CSV has {} samples, config says {}", u.grid.n, c.grid.n),
                });
            }
            Ok(u)
        }
    }
}

fn cmd_frame(c: &FrameConfig, base_dir: &Path) -> Result<Outcome> {
    let u = build_controls(c, base_dir)?;
    let frame = integrate_frame_with(&u, c.scheme);
    let lift = horizontal_lift(&frame, c.form);
    let base = project_base(&lift, c.form)?;
    let inv = geometric_invariants(&u, c.form);
    let nodes = u.grid.nodes_closed();

    let group_rows: Vec<Vec<f64>> = frame
        .r
        .iter()
        .zip(&nodes)
        .map(|(r, s)| {
            let m = r.m;
            vec![
                *s, m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im, m[1][0].re, m[1][0].im,
                m[1][1].re, m[1][1].im,
            ]
        })
        .collect();
    let group_csv = io::csv_string(
        &[
            "s", "r00_re", "r00_im", "r01_re", "r01_im", "r10_re", "r10_im", "r11_re", "r11_im",
        ],
        &group_rows,
    );

    let base_rows: Vec<Vec<f64>> = base
        .rows()
        .into_iter()
        .zip(&nodes)
        .map(|(p, s)| std::iter::once(*s).chain(p).collect())
        .collect();
    let base_head: &[&str] = if base_rows.first().map_or(0, Vec::len) == 5 {
        &["s", "x0", "x1", "x2", "x3"]
    } else {
        &["s", "x", "y", "z"]
    };
    let base_csv = io::csv_string(base_head, &base_rows);

    let kn = u.grid.nodes();
    let inv_rows: Vec<[f64; 3]> = (0..u.len())
        .map(|j| [kn[j], inv.kappa[j], inv.tau[j].unwrap_or(f64::NAN)])
        .collect();
    let inv_csv = io::csv_string(&["s", "kappa", "tau"], &inv_rows);
    let tau_plot: Vec<f64> = inv_rows.iter().map(|r| r[2]).collect();
    let svg = io::svg_plot(
        "curvature and torsion",
        &[
            Series {
                label: "kappa",
                x: &kn,
                y: &inv.kappa,
            },
            Series {
                label: "tau",
                x: &kn,
                y: &tau_plot,
            },
        ],
    );

    let closure = frame.end().dist(&frame.r[0]);
    let functionals = functionals_of_controls(&u, c.form).ok();
    let report = json!({
        "form": c.form,
        "scheme": c.scheme,
        "n": u.grid.n,
        "length": u.grid.length,
        "frame_closure_defect": closure,
        "kappa_max": inv.kappa.iter().cloned().fold(0.0, f64::max),
        "torsion_defined": inv.tau.iter().all(Option::is_some),
        "functionals": functionals,
    });
    let summary = format!(
        "frame integrated with {:?}: closure defect |R(L) - R(0)| = {closure:.3e}",
        c.scheme
    );
    let files = vec![
        ("frame_controls.csv".into(), u.to_csv().into_bytes()),
        ("frame_group.csv".into(), group_csv.into_bytes()),
        ("frame_base.csv".into(), base_csv.into_bytes()),
        ("frame_invariants.csv".into(), inv_csv.into_bytes()),
        ("frame_summary.json".into(), json_bytes(&report)?),
        ("frame_invariants.svg".into(), svg.into_bytes()),
    ];
    Ok(Outcome {
        ok: true,
        summary,
        report,
        files,
    })
}

// ---------------------------------------------------------------------------
// flows

/// Trajectory of the requested flow from a configuration.
pub fn run_flow(kind: FlowKind, c: &FlowConfig) -> Result<FlowTrajectory> {
    let grid = c.grid.periodic()?;
    let state = c.init.build(grid, c.form, c.seed)?;
    let dt = || {
        c.dt.ok_or_else(|| Error::Config {
            path: "dt".into(),
            message: "missing field `dt`".into(),
        })
    };
    match kind {
        FlowKind::Heisenberg => evolve_with(
            &state,
            c.t_final,
            dt()?,
            EvolveOptions {
                stability: c.stability.unwrap_or(DEFAULT_STABILITY),
                record_every: c.record_every,
            },
        ),
        FlowKind::F1 => evolve_f1(
            &state,
            c.t_final,
            dt()?,
            c.stability.unwrap_or(DEFAULT_STABILITY_F1),
            c.record_every,
        ),
        FlowKind::Shortening => f3_flow(&state, c.t_final, c.samples.unwrap_or(100)),
    }
}

fn trajectory_csv(traj: &FlowTrajectory) -> String {
    let mut rows = Vec::new();
    for (t, st) in traj.times.iter().zip(&traj.states) {
        for (s, l) in st.grid.nodes().iter().zip(&st.lam) {
            rows.push([*t, *s, l[0], l[1], l[2]]);
        }
    }
    io::csv_string(&["t", "s", "l1", "l2", "l3"], &rows)
}

fn cmd_flow(kind: FlowKind, c: &FlowConfig) -> Result<Outcome> {
    let traj = run_flow(kind, c)?;
    let series = FunctionalSeries::of(&traj)?;
    let drift = series.max_relative_drift();
    let unit = traj
        .states
        .iter()
        .flat_map(|s| s.lam.iter().map(|l| (crate::liealg::norm(*l) - 1.0).abs()))
        .fold(0.0, f64::max);
    let report = json!({
        "flow": kind,
        "form": c.form,
        "n": c.grid.n,
        "t_final": c.t_final,
        "dt": traj.dt,
        "recorded": traj.times.len(),
        "max_relative_drift": {"f0": drift[0], "f1": drift[1], "f2": drift[2], "spin": drift[3]},
        "max_unit_defect": unit,
    });
    let summary = format!(
        "{} flow to T = {}: relative drift f0 {:.2e}, f1 {:.2e}, f2 {:.2e}, spin {:.2e}",
        kind.name(),
        c.t_final,
        drift[0],
        drift[1],
        drift[2],
        drift[3]
    );
    let f: [Vec<f64>; 3] = [
        series.values.iter().map(|v| v.f0).collect(),
        series.values.iter().map(|v| v.f1).collect(),
        series.values.iter().map(|v| v.f2).collect(),
    ];
    let svg = io::svg_plot(
        &format!("functionals along the {} flow", kind.name()),
        &[
            Series {
                label: "f0",
                x: &series.times,
                y: &f[0],
            },
            Series {
                label: "f1",
                x: &series.times,
                y: &f[1],
            },
            Series {
                label: "f2",
                x: &series.times,
                y: &f[2],
            },
        ],
    );
    let p = |f: &str| format!("flow_{}_{f}", kind.name());
    let files = vec![
        (p("trajectory.csv"), trajectory_csv(&traj).into_bytes()),
        (p("functionals.csv"), series.to_csv().into_bytes()),
        (p("summary.json"), json_bytes(&report)?),
        (p("functionals.svg"), svg.into_bytes()),
    ];
    Ok(Outcome {
        ok: true,
        summary,
        report,
        files,
    })
}

// ---------------------------------------------------------------------------
// hasimoto-check

/// Joint refinement: level `k` uses `N 2^k` and `dt / 2^k`.
pub fn hasimoto_levels(c: &HasimotoConfig, jobs: usize) -> Result<Vec<(NlsCheck, FlowTrajectory)>> {
    let run = |k: usize| -> Result<(NlsCheck, FlowTrajectory)> {
        let grid = PeriodicGrid::periodic(c.grid.length, c.grid.n << k)?;
        let state = c.init.build(grid, c.form, c.seed)?;
        let opts = EvolveOptions {
            stability: c.stability.unwrap_or(DEFAULT_STABILITY),
            record_every: 1,
        };
        let traj = evolve_with(&state, c.t_final, c.dt / (1u64 << k) as f64, opts)?;
        Ok((nls_check(&traj)?, traj))
    };
    let levels: Vec<usize> = (0..=c.refinements).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    pool.install(|| levels.par_iter().map(|k| run(*k)).collect())
}

fn orders(values: &[f64]) -> Vec<Option<f64>> {
    std::iter::once(None)
        .chain(
            values
                .windows(2)
                .map(|w| (w[0] > 0.0 && w[1] > 0.0).then(|| (w[0] / w[1]).log2())),
        )
        .collect()
}

fn cmd_hasimoto(c: &HasimotoConfig, jobs: usize) -> Result<Outcome> {
    let levels = hasimoto_levels(c, jobs)?;
    let checks: Vec<&NlsCheck> = levels.iter().map(|l| &l.0).collect();
    let nls: Vec<f64> = checks.iter().map(|x| x.nls).collect();
    let heis: Vec<f64> = checks.iter().map(|x| x.heisenberg).collect();
    let rows: Vec<[f64; 8]> = checks
        .iter()
        .map(|x| {
            [
                x.n as f64,
                x.dt,
                x.nls_raw,
                x.nls,
                x.zero_curvature,
                x.heisenberg,
                x.v_relation.v_residual,
                x.v_relation.v1_residual,
            ]
        })
        .collect();
    let table = io::csv_string(
        &[
            "n",
            "dt",
            "nls_raw",
            "nls",
            "zero_curvature",
            "heisenberg",
            "v_residual",
            "v1_residual",
        ],
        &rows,
    );
    let (field, _) = hasimoto_of_trajectory(&levels[0].1)?;
    let report = json!({
        "levels": checks,
        "nls_orders": orders(&nls),
        "heisenberg_orders": orders(&heis),
    });
    let summary = checks
        .iter()
        .zip(orders(&nls))
        .map(|(x, o)| {
            format!(
                "N = {:4}, dt = {:.3e}: NLS residual {:.3e} (raw {:.3e}), order {}",
                x.n,
                x.dt,
                x.nls,
                x.nls_raw,
                o.map_or("-".into(), |o| format!("{o:.2}"))
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let files = vec![
        ("hasimoto_psi.csv".into(), field.to_csv().into_bytes()),
        (
            "hasimoto_manifest.json".into(),
            field.manifest()?.into_bytes(),
        ),
        ("hasimoto_residuals.csv".into(), table.into_bytes()),
        ("hasimoto_report.json".into(), json_bytes(&report)?),
    ];
    Ok(Outcome {
        ok: true,
        summary,
        report,
        files,
    })
}

// ---------------------------------------------------------------------------
// elastica and soliton

fn cmd_elastica(c: &ElasticaConfig) -> Result<Outcome> {
    let x0 = ExtremalState::new(c.h, c.hh, c.form);
    let traj = integrate_extremal(&x0, c.span, c.tol)?;
    let rep = extremal_report(&traj, c.samples)?;
    let samples = traj.sample(c.samples);
    let s: Vec<f64> = samples.iter().map(|p| p.0).collect();
    let h1: Vec<f64> = samples.iter().map(|p| p.1.h[0]).collect();
    let svg = io::svg_plot(
        "h1 along the extremal",
        &[Series {
            label: "h1",
            x: &s,
            y: &h1,
        }],
    );
    let report = serde_json::to_value(&rep).map_err(|e| Error::Io(e.to_string()))?;
    let summary = format!(
        "extremal over span {}: invariant drift {:.2e}, cubic residual {:.2e}, sphere residual {:.2e}",
        c.span, rep.invariant_drift, rep.cubic_residual, rep.sphere_residual
    );
    let files = vec![
        (
            "elastica_trajectory.csv".into(),
            traj.to_csv(c.samples).into_bytes(),
        ),
        ("elastica_report.json".into(), json_bytes(&rep)?),
        ("elastica_h1.svg".into(), svg.into_bytes()),
    ];
    Ok(Outcome {
        ok: true,
        summary,
        report,
        files,
    })
}

fn cmd_soliton(c: &SolitonConfig) -> Result<Outcome> {
    let cand = soliton_candidate(&c.targets, c.form, c.span, c.n, c.tol)?;
    let xi = cand.xi * c.xi_factor;
    let rows = travelling_wave_residuals(&cand, xi, c.window, c.t_final, &c.levels)?;
    let table: Vec<[f64; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.n as f64,
                r.slices as f64,
                r.ds,
                r.dt,
                r.residual,
                r.order.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    let csv = io::csv_string(&["n", "slices", "ds", "dt", "residual", "order"], &table);
    let report = json!({ "xi": xi, "xi_factor": c.xi_factor, "levels": rows });
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "N = {:5}, slices = {:4}: residual {:.3e}, order {}",
                r.n,
                r.slices,
                r.residual,
                r.order.map_or("-".into(), |o| format!("{o:.2}"))
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let files = vec![
        (
            "soliton_candidate.json".into(),
            cand.to_json()?.into_bytes(),
        ),
        ("soliton_residuals.csv".into(), csv.into_bytes()),
        ("soliton_report.json".into(), json_bytes(&report)?),
    ];
    Ok(Outcome {
        ok: true,
        summary,
        report,
        files,
    })
}

fn cmd_invariants(c: &InvariantsConfig) -> Result<Outcome> {
    let state = c.init.build(c.grid.periodic()?, c.form, c.seed)?;
    let rep = functionals_of_spin(&state)?;
    let pb = poisson_bracket_f0_f1(&state)?;
    let spin = crate::magnetic::functionals(&state).spin;
    let report = json!({ "functionals": rep, "poisson_f0_f1": pb, "poisson_scaled": pb.scaled(), "spin": spin });
    let v = rep.values;
    let summary = format!(
        "f0 = {:.12e}, f1 = {:.12e}, f2 = {:.12e}, f3 = {}, scaled bracket = {:.2e}",
        v.f0,
        v.f1,
        v.f2,
        v.f3.map_or("undefined".into(), |x| format!("{x:.12e}")),
        pb.scaled()
    );
    let files = vec![("invariants.json".into(), json_bytes(&report)?)];
    Ok(Outcome {
        ok: true,
        summary,
        report,
        files,
    })
}

// ---------------------------------------------------------------------------

/// Runs the parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let job = match Job::from_cli(cli) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if cli.dry_run {
        let plan = json!({ "command": format!("{:?}", cli.command), "out": cli.out, "writes": job.outputs() });
        if cli.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&plan).unwrap_or_default()
            );
        } else {
            println!("configuration valid; would write to {}:", cli.out.display());
            for f in job.outputs() {
                println!("  {f}");
            }
        }
        return 0;
    }
    let outcome = match job.execute(cli.jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    for (name, bytes) in &outcome.files {
        if let Err(e) = io::write_atomic(&cli.out.join(name), bytes) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome.report).unwrap_or_default()
        );
    } else {
        println!("{}", outcome.summary);
    }
    if outcome.ok {
        0
    } else {
        1
    }
}
