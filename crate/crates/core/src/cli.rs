//! Command-line front end. Every command is a thin wrapper over a library call
//! and prints deterministic JSON.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::approx_lp::{approx_degree, indicator_system, parity_approximant, threshold_degree, ParityMethod};
use crate::boolean_core::io::parse_truth_table;
use crate::boolean_core::{PartialBooleanFunction, PartialSignMatrix, MAX_VARS};
use crate::error::{Error, Result};
use crate::factor_norms::{gamma2_eps, gamma2_sign, gdm_bound, NormConfig};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::theorem_bench::{catalog_ids, run_suite, unit_witness, SuiteConfig};
use crate::witness_forge::{build_phi_ell, build_psi_k, build_zeta, pk_poly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Tolerances, caps and parallelism shared by all commands.
#[derive(Args, Clone, Debug)]
pub struct CliConfig {
    /// SDP stopping tolerance.
    #[arg(long, env = "DPT_SDP_TOL", default_value_t = 1e-9, global = true)]
    pub sdp_tol: f64,
    /// Largest matrix side accepted by the SDP.
    #[arg(long, env = "DPT_MAX_DIM", default_value_t = 64, global = true)]
    pub max_dim: usize,
    /// Worker threads for `verify`.
    #[arg(long, env = "DPT_JOBS", default_value_t = 1, global = true)]
    pub jobs: usize,
    /// Largest number of Boolean variables accepted by the LP.
    #[arg(long, env = "DPT_MAX_VARS", default_value_t = MAX_VARS, global = true)]
    pub max_vars: usize,
}

impl CliConfig {
    pub fn norm(&self) -> NormConfig {
        NormConfig { tolerance: self.sdp_tol, max_dim: self.max_dim }
    }
}

#[derive(Parser, Debug)]
#[command(name = "dpt", version, about = "Approximate degree, gamma_2 norms and direct-product witnesses")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact epsilon-approximate degree with primal and dual certificates.
    Degree {
        /// Catalog function name.
        #[arg(long = "fn", conflicts_with = "file", required_unless_present = "file")]
        name: Option<String>,
        /// Truth-table file.
        #[arg(long)]
        file: Option<String>,
        /// Error as `num/den`.
        #[arg(long, default_value = "1/3")]
        eps: String,
        /// Compute the threshold degree instead.
        #[arg(long, conflicts_with = "eps")]
        threshold: bool,
    },
    /// gamma_2 norm certificate of a sign matrix.
    Gamma2 {
        /// Catalog matrix name.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        matrix: Option<String>,
        /// CSV file with entries 1, -1 or *.
        #[arg(long)]
        file: Option<String>,
        /// Approximate norm gamma_{2,eps}.
        #[arg(long)]
        eps: Option<String>,
        /// Discrepancy bound at the given error.
        #[arg(long, conflicts_with = "eps")]
        gdm: Option<String>,
    },
    /// Build and dump a dual-witness construction.
    Witness {
        #[command(subcommand)]
        kind: WitnessCommand,
    },
    /// Run the verification suite.
    Verify {
        /// Run every check (the default when no filter is given).
        #[arg(long, conflicts_with = "only")]
        all: bool,
        /// Substring filters on check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<String>,
    },
    /// List built-in functions, matrices and checks.
    Catalog,
}

#[derive(Subcommand, Debug)]
pub enum WitnessCommand {
    /// The symmetric polynomial p_k.
    Pk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Product witness Psi_k.
    Psik {
        #[arg(long = "fn", value_delimiter = ',', required = true)]
        fns: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Also report the correlation bound at this error.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Parity-smoothed approximant Phi_l from the indicator system.
    Phi {
        #[arg(long = "fn", value_delimiter = ',', required = true)]
        fns: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
    },
    /// Composed witness zeta for F(f_1, ..., f_n).
    Zeta {
        #[arg(long)]
        outer: String,
        #[arg(long = "fn", value_delimiter = ',', required = true)]
        fns: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
}

/// Outcome of a command: the JSON to print and whether all checks held.
pub struct Output {
    pub value: Value,
    pub ok: bool,
}

fn rat(s: &str) -> Result<Rational> {
    parse_rational(s)
}

fn function(name: &str, cfg: &CliConfig) -> Result<PartialBooleanFunction> {
    let f = PartialBooleanFunction::catalog(name)?;
    cap_vars(&f, cfg)?;
    Ok(f)
}

fn functions(names: &[String], cfg: &CliConfig) -> Result<Vec<PartialBooleanFunction>> {
    names.iter().map(|n| function(n, cfg)).collect()
}

fn cap_vars(f: &PartialBooleanFunction, cfg: &CliConfig) -> Result<()> {
    if f.num_vars() > cfg.max_vars {
        return Err(Error::TooLarge(format!("{} variables exceeds the cap {}", f.num_vars(), cfg.max_vars)));
    }
    Ok(())
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn cap_matrix(f: &PartialSignMatrix, cfg: &CliConfig) -> Result<()> {
    if f.rows().max(f.cols()) > cfg.max_dim {
        return Err(Error::TooLarge(format!("{}x{} exceeds the cap {}", f.rows(), f.cols(), cfg.max_dim)));
    }
    Ok(())
}

pub fn cmd_degree(name: Option<&str>, file: Option<&str>, eps: &str, threshold: bool, cfg: &CliConfig) -> Result<Output> {
    let f = match (name, file) {
        (Some(n), _) => function(n, cfg)?,
        (None, Some(p)) => {
            let f = parse_truth_table(&read(p)?)?;
            cap_vars(&f, cfg)?;
            f
        }
        (None, None) => return Err(Error::InvalidInput("need --fn or --file".into())),
    };
    if threshold {
        let t = threshold_degree(&f)?;
        return Ok(Output {
            value: json!({
                "threshold_degree": t.degree,
                "polynomial": t.polynomial.to_table().iter().map(format_rational).collect::<Vec<_>>(),
                "witness_table": t.witness.as_ref().map(|w| w.table().iter().map(format_rational).collect::<Vec<_>>()),
                "checks": {"primal_ok": t.primal_ok, "dual_ok": t.dual_ok},
            }),
            ok: t.primal_ok && t.dual_ok,
        });
    }
    let r = approx_degree(&f, &rat(eps)?)?;
    Ok(Output { value: r.to_json(), ok: r.primal_ok && r.dual_ok })
}

pub fn cmd_gamma2(matrix: Option<&str>, file: Option<&str>, eps: Option<&str>, gdm: Option<&str>, cfg: &CliConfig) -> Result<Output> {
    let f = match (matrix, file) {
        (Some(n), _) => PartialSignMatrix::catalog(n)?,
        (None, Some(p)) => PartialSignMatrix::from_csv(&read(p)?)?,
        (None, None) => return Err(Error::InvalidInput("need --matrix or --file".into())),
    };
    cap_matrix(&f, cfg)?;
    let norm = cfg.norm();
    if let Some(g) = gdm {
        let b = gdm_bound(&f, &rat(g)?, &norm)?;
        return Ok(Output { value: serde_json::to_value(&b).expect("serialisable"), ok: true });
    }
    let cert = match eps {
        Some(e) => gamma2_eps(&f, crate::rational::to_f64(&rat(e)?), &norm)?,
        None => gamma2_sign(&f, &norm)?,
    };
    Ok(Output { value: cert.to_json(), ok: true })
}

pub fn cmd_witness(kind: &WitnessCommand, cfg: &CliConfig) -> Result<Output> {
    match kind {
        WitnessCommand::Pk { n, k } => {
            let p = pk_poly(*n, *k)?;
            let s = p.summary();
            let ok = s.l1_ok && s.vertex_values_ok && s.dense_form_ok.unwrap_or(true);
            Ok(Output { value: serde_json::to_value(&s).expect("serialisable"), ok })
        }
        WitnessCommand::Psik { fns, eps, k, delta } => {
            let gs = functions(fns, cfg)?;
            let eps = rat(eps)?;
            let psis = gs.iter().map(|g| unit_witness(g, &eps)).collect::<Result<Vec<_>>>()?;
            let psi = build_psi_k(&psis, &gs, *k, &eps)?;
            let mut value = psi.composite.to_json();
            let mut ok = psi.composite.all_checks_pass();
            if let Some(d) = delta {
                let bound = psi.correlation_bound(&gs, &rat(d)?);
                ok &= bound.holds;
                value["correlation_bound"] = serde_json::to_value(&bound).expect("serialisable");
            }
            Ok(Output { value, ok })
        }
        WitnessCommand::Phi { fns, eps, k, l, m } => {
            let gs = functions(fns, cfg)?;
            let eps = rat(eps)?;
            let psis = gs.iter().map(|g| unit_witness(g, &eps)).collect::<Result<Vec<_>>>()?;
            let psi = build_psi_k(&psis, &gs, *k, &eps)?;
            let system = indicator_system(&gs)?;
            let q = parity_approximant(gs.len(), *m, *l, ParityMethod::Lp)?;
            let phi = build_phi_ell(&system, &psi.extensions, &q.polynomial, *m)?;
            let sigma = Rational::from_integer(1.into());
            let approx = phi.approximation_bound(&gs, &sigma);
            let corr = phi.correlation_bound(&psi, &sigma);
            let mut value = phi.composite.to_json();
            value["q_delta"] = json!(format_rational(&phi.q_delta));
            value["approximation_bound"] = serde_json::to_value(&approx).expect("serialisable");
            value["correlation_bound"] = serde_json::to_value(&corr).expect("serialisable");
            Ok(Output { value, ok: phi.composite.all_checks_pass() && approx.holds && corr.holds })
        }
        WitnessCommand::Zeta { outer, fns, eps, delta, k } => {
            let f = function(outer, cfg)?;
            let gs = functions(fns, cfg)?;
            let (eps, delta) = (rat(eps)?, rat(delta)?);
            let big_d = approx_degree(&f, &delta)?.degree;
            if big_d == 0 {
                return Err(Error::InvalidInput("outer function has degree 0 at this error".into()));
            }
            let outer_witness = crate::approx_lp::dual_witness_at(&f, &delta, big_d - 1)?
                .ok_or_else(|| Error::Solver("no outer witness".into()))?;
            let psis = gs.iter().map(|g| unit_witness(g, &eps)).collect::<Result<Vec<_>>>()?;
            let z = build_zeta(&outer_witness, &f, &delta, &psis, &gs, &eps, *k)?;
            let mut value = z.composite.to_json();
            value["expected_l1"] = json!(format_rational(&z.expected_l1));
            value["correlation_bound"] = serde_json::to_value(&z.correlation).expect("serialisable");
            Ok(Output { value, ok: z.composite.all_checks_pass() })
        }
    }
}

pub fn cmd_verify(only: &[String], seed: u64, cfg: &CliConfig) -> Output {
    let report = run_suite(&SuiteConfig { seed, only: only.to_vec(), jobs: cfg.jobs, norm: cfg.norm() });
    Output { value: serde_json::to_value(&report.reports).expect("serialisable"), ok: report.all_pass() }
}

pub fn cmd_catalog() -> Output {
    Output {
        value: json!({
            "functions": PartialBooleanFunction::catalog_names(),
            "matrices": PartialSignMatrix::catalog_names(),
            "checks": catalog_ids(),
        }),
        ok: true,
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge(_) => EXIT_CAP,
        Error::Precondition { .. } | Error::Solver(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn render(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serialisable") + "\n"
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let cfg = &cli.config;
    let result = match &cli.command {
        Command::Degree { name, file, eps, threshold } => {
            cmd_degree(name.as_deref(), file.as_deref(), eps, *threshold, cfg)
        }
        Command::Gamma2 { matrix, file, eps, gdm } => {
            cmd_gamma2(matrix.as_deref(), file.as_deref(), eps.as_deref(), gdm.as_deref(), cfg)
        }
        Command::Witness { kind } => cmd_witness(kind, cfg),
        Command::Verify { all: _, only, seed, out } => {
            let o = cmd_verify(only, *seed, cfg);
            if let Some(path) = out {
                if let Err(e) = std::fs::write(path, render(&o.value)) {
                    let _ = writeln!(stderr, "error: {path}: {e}");
                    return EXIT_USAGE;
                }
                let reports = o.value.as_array().map_or(0, Vec::len);
                let failed = o.value.as_array().map_or(0, |a| a.iter().filter(|r| r["status"] == "fail").count());
                let _ = writeln!(stdout, "{reports} reports, {failed} failed, written to {path}");
                return if o.ok { EXIT_OK } else { EXIT_CHECK_FAILED };
            }
            Ok(o)
        }
        Command::Catalog => Ok(cmd_catalog()),
    };
    match result {
        Ok(o) => {
            let _ = stdout.write_all(render(&o.value).as_bytes());
            if o.ok {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
