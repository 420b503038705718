//! The `ptcs` command line: spectra, coherent-state samples, harmonic-limit
//! sweeps and the verification suites.
//!
//! Exit codes: 0 when everything passes, 1 when a verification fails, 2 for
//! usage, parameter and domain errors, 3 for numerical non-convergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{limit_sweep, sweep_csv};
use crate::coherent::{check_symbols, coherent_state, PhasePoint};
use crate::error::{Error, Result};
use crate::frames::{appendix_suite, verify_resolution, Strategy};
use crate::output::{num, to_json, CsvTable};
use crate::params::{energy, ground_state, PtParams, Units};
use crate::quantization::{check_identity, identity_test_pairs, IdentityCase};
use crate::report::VerificationReport;
use crate::sgp::random_state;
use crate::susy::{
    check_eigenvalue, check_factorization, check_gegenbauer, check_intertwining, check_shape_invariance, eigenstate,
    MAX_CHAIN,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "PTCS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ptcs", version, about = "Coherent states and quantization checks for Poschl-Teller potentials")]
#[command(args_conflicts_with_subcommands = false, allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub length: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    /// Tolerance override; each suite has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for the random test states.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Defaults to csv for tables and json for verification manifests.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Record the wall time in verification manifests (makes them run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Unity,
    Susy,
    Identities,
    Symbols,
    Appendix,
}

impl Suite {
    fn name(&self) -> &'static str {
        match self {
            Suite::Unity => "unity",
            Suite::Susy => "susy",
            Suite::Identities => "identities",
            Suite::Symbols => "symbols",
            Suite::Appendix => "appendix",
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Energies E_0..E_nmax and eigenfunction samples.
    Eigen {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Number of interior sample points per level.
        #[arg(long, default_value_t = 17)]
        grid: usize,
    },
    /// Run a verification suite and write its manifest.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Sample a coherent state on an interior grid.
    Cs {
        /// Position label in (0, L); defaults to L/2.
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Fidelity of the harmonic approximation over an ascending list of L.
    Limit {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<f64>,
        /// Position label in centered coordinates, |q| < L/2.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
    },
}

/// Everything a verification run produced, in a stable key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: ManifestParams,
    pub tolerance: f64,
    pub seed: u64,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifestParams {
    pub nu: f64,
    pub beta: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "m")]
    pub mass: f64,
    pub hbar: f64,
}

impl Common {
    fn units(&self) -> Result<Units> {
        Units::new(self.length, self.mass, self.hbar)
    }

    fn params(&self) -> Result<PtParams> {
        PtParams::with_units(self.nu, self.beta, self.units()?)
    }

    fn manifest_params(&self) -> ManifestParams {
        ManifestParams {
            nu: self.nu,
            beta: self.beta,
            length: self.length,
            mass: self.mass,
            hbar: self.hbar,
        }
    }

    fn tol_or(&self, default: f64) -> Result<f64> {
        match self.tol {
            Some(t) if !(t > 0.0 && t.is_finite()) => Err(Error::param(format!("tolerance must be positive, got {t}"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }
}

/// Output of one command: the rendered document and whether it passed.
struct Outcome {
    text: String,
    pass: bool,
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numeric(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn eigen_table(common: &Common, n_max: usize, grid: usize) -> std::result::Result<Outcome, Failure> {
    if n_max > MAX_CHAIN {
        return Err(Failure::Usage(format!("n-max must be <= {MAX_CHAIN}, got {n_max}")));
    }
    let params = common.params()?;
    let l = params.length();
    let xs: Vec<f64> = (0..grid).map(|i| l * (i + 1) as f64 / (grid + 1) as f64).collect();
    #[derive(Serialize)]
    struct Level {
        n: usize,
        energy: f64,
        x: Vec<f64>,
        value_re: Vec<f64>,
        value_im: Vec<f64>,
    }
    let mut levels = Vec::new();
    for n in 0..=n_max {
        let phi = eigenstate(&params, n)?;
        let values = xs.iter().map(|&x| phi.evaluate(x)).collect::<Result<Vec<Complex64>>>()?;
        levels.push(Level {
            n,
            energy: energy(&params, n).value,
            x: xs.clone(),
            value_re: values.iter().map(|v| v.re).collect(),
            value_im: values.iter().map(|v| v.im).collect(),
        });
    }
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                params: PtParams,
                levels: &'a [Level],
            }
            to_json(&Doc { params, levels: &levels })?
        }
        Format::Csv => {
            let mut t = CsvTable::new(&["n", "energy", "x", "value_re", "value_im"]);
            for lv in &levels {
                for i in 0..xs.len() {
                    t.push_cells(vec![
                        lv.n.to_string(),
                        num(lv.energy),
                        num(lv.x[i]),
                        num(lv.value_re[i]),
                        num(lv.value_im[i]),
                    ]);
                }
            }
            t.render()
        }
    };
    Ok(Outcome { text, pass: true })
}

fn cs_table(common: &Common, q: Option<f64>, p: f64, grid: usize) -> std::result::Result<Outcome, Failure> {
    let units = common.units()?;
    let point = PhasePoint::new(q.unwrap_or(0.5 * units.length), p);
    let eta = coherent_state(common.nu, &units, point)?;
    let xs: Vec<f64> = (0..grid).map(|i| units.length * (i + 1) as f64 / (grid + 1) as f64).collect();
    let values = xs.iter().map(|&x| eta.evaluate(x)).collect::<Result<Vec<_>>>()?;
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Json => {
            #[derive(Serialize)]
            struct Sample {
                x: f64,
                re: f64,
                im: f64,
                abs2: f64,
            }
            #[derive(Serialize)]
            struct Doc {
                nu: f64,
                #[serde(rename = "L")]
                length: f64,
                hbar: f64,
                q: f64,
                p: f64,
                normalization: f64,
                samples: Vec<Sample>,
            }
            to_json(&Doc {
                nu: common.nu,
                length: units.length,
                hbar: units.hbar,
                q: point.q,
                p,
                normalization: eta.norm_const,
                samples: xs
                    .iter()
                    .zip(&values)
                    .map(|(&x, v)| Sample {
                        x,
                        re: v.re,
                        im: v.im,
                        abs2: v.norm_sqr(),
                    })
                    .collect(),
            })?
        }
        Format::Csv => {
            let mut t = CsvTable::new(&["x", "re", "im", "abs2"]);
            for (&x, v) in xs.iter().zip(&values) {
                t.push(&[x, v.re, v.im, v.norm_sqr()]);
            }
            t.render()
        }
    };
    Ok(Outcome { text, pass: true })
}

fn limit_table(common: &Common, lengths: &[f64], q: f64, p: f64) -> std::result::Result<Outcome, Failure> {
    let rows = limit_sweep(common.nu, lengths, PhasePoint::new(q, p), common.mass, common.hbar)?;
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows)?,
        Format::Csv => sweep_csv(&rows).render(),
    };
    Ok(Outcome { text, pass: true })
}

/// Reports of one suite at the given configuration; `tol` is the composite tolerance.
pub fn run_suite(suite: Suite, nu: f64, beta: f64, units: Units, tol: Option<f64>, seed: u64) -> Result<(f64, Vec<VerificationReport>)> {
    let tol_or = |d: f64| tol.unwrap_or(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Unity => {
            let tol = tol_or(1e-8);
            let params = PtParams::extended(nu, beta, units)?;
            let mut states = vec![ground_state(&params)?, eigenstate(&params, 1)?];
            let s = nu.max(0.0) + 2.0 + rand::Rng::gen_range(&mut rng, 0.0..1.0);
            states.push(random_state(&mut rng, s, 1, units.length, 2.0)?);
            let mut reports = states
                .iter()
                .map(|psi| verify_resolution(nu, units, psi, Strategy::Parseval, tol))
                .collect::<Result<Vec<_>>>()?;
            reports.push(verify_resolution(nu, units, &states[0], Strategy::Direct2d, tol.max(1e-4))?);
            Ok((tol, reports))
        }
        Suite::Susy => {
            let tol = tol_or(1e-10);
            let params = PtParams::with_units(nu, beta, units)?;
            let mut reports = Vec::new();
            for n in 0..=5 {
                let phi = eigenstate(&params, n)?;
                reports.push(check_eigenvalue(&params, n, tol)?);
                reports.push(check_factorization(&params, &phi, tol)?.with_n(n));
                reports.push(check_shape_invariance(&params, &phi, tol)?.with_n(n));
                if n < 5 {
                    reports.push(check_intertwining(&params, n, tol)?);
                }
                if beta == 0.0 {
                    reports.push(check_gegenbauer(&params, n, tol.max(1e-9))?);
                }
            }
            Ok((tol, reports))
        }
        Suite::Identities => {
            let tol = tol_or(1e-8);
            let params = PtParams::with_units(nu, beta, units)?;
            let pairs = identity_test_pairs(&params, &mut rng)?;
            let reports = IdentityCase::ALL
                .iter()
                .map(|&case| check_identity(case, &params, &pairs, tol))
                .collect::<Result<Vec<_>>>()?;
            Ok((tol, reports))
        }
        Suite::Symbols => {
            let tol = tol_or(1e-9);
            let params = PtParams::with_units(nu, beta, units)?;
            let l = units.length;
            let p_unit = units.hbar * std::f64::consts::PI / l;
            let mut reports = Vec::new();
            for &qf in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                for &pf in &[-6.0, -1.5, 0.0, 2.0, 5.0] {
                    reports.extend(check_symbols(&params, PhasePoint::new(qf * l, pf * p_unit), tol)?);
                }
            }
            Ok((tol, reports))
        }
        Suite::Appendix => {
            let tol = tol_or(1e-8);
            Ok((tol, appendix_suite(tol.min(1e-11), tol)?))
        }
    }
}

fn verify(common: &Common, suite: Suite) -> std::result::Result<Outcome, Failure> {
    if common.format == Some(Format::Csv) {
        return Err(Failure::Usage("verification manifests are written as json".into()));
    }
    common.tol_or(1.0)?;
    let start = Instant::now();
    let (tol, reports) = run_suite(suite, common.nu, common.beta, common.units()?, common.tol, common.seed)?;
    if reports.is_empty() {
        return Err(Failure::Usage("the suite produced no reports".into()));
    }
    let pass = reports.iter().all(|r| r.pass);
    let manifest = RunManifest {
        command: format!("verify {}", suite.name()),
        params: common.manifest_params(),
        tolerance: tol,
        seed: common.seed,
        pass,
        reports,
        wall_time: common.timing.then(|| start.elapsed().as_secs_f64()),
    };
    Ok(Outcome {
        text: to_json(&manifest)?,
        pass,
    })
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> std::result::Result<Outcome, Failure> {
    configure_threads()?;
    let c = &cli.common;
    match &cli.command {
        Command::Eigen { n_max, grid } => eigen_table(c, *n_max, *grid),
        Command::Verify { suite } => verify(c, *suite),
        Command::Cs { q, p, grid } => cs_table(c, *q, *p, *grid),
        Command::Limit { lengths, q, p } => limit_table(c, lengths, *q, *p),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let written = match &cli.common.out {
                Some(path) => fs::write(path, &outcome.text),
                None => std::io::stdout().lock().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return EXIT_USAGE;
            }
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            EXIT_NONCONVERGENCE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_negative_values_and_lists() {
        let cli = Cli::try_parse_from(["ptcs", "limit", "--lengths", "10,30", "--q", "-0.5", "--nu", "-0.5"]).unwrap();
        assert_eq!(cli.common.nu, -0.5);
        match cli.command {
            Command::Limit { lengths, q, .. } => {
                assert_eq!(lengths, vec![10.0, 30.0]);
                assert_eq!(q, -0.5);
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["ptcs", "eigen", "--n-max", "31"]), EXIT_USAGE);
        assert_eq!(run(["ptcs", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["ptcs", "cs", "--q", "1.5", "--grid", "0"]), EXIT_USAGE);
        assert_eq!(run(["ptcs", "limit", "--lengths", "30,10"]), EXIT_USAGE);
        assert_eq!(run(["ptcs", "verify", "appendix", "--format", "csv"]), EXIT_USAGE);
        assert_eq!(run(["ptcs", "eigen", "--grid", "0"]), EXIT_PASS);
    }
}
