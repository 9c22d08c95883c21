//! Argument parsing, validation and dispatch for the `latsmooth` binary.
//!
//! Exit codes: 0 success, 1 usage or input-domain error (reported before any
//! computation starts), 2 computation or output failure. Decision commands
//! print `YES`, `NO` or `UNDECIDED` as the last line of standard output.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use latsmooth_core::decision::decide_gapspp_det;
use latsmooth_core::enumerate::LatticePoint;
use latsmooth_core::estimate::Mc;
use latsmooth_core::gauss::{lambda1, rho_sum_nonzero, smoothing_parameter};
use latsmooth_core::geometry::{
    ball_overlap_radii, check_overlap_sandwich, check_voronoi_sandwich, overlap_fraction, voronoi_gaussian_measure,
};
use latsmooth_core::protocols::amplify::{amplification_plan, apply_plan, Amplified, Op, SchemeParams};
use latsmooth_core::protocols::coam::{coam_shells, coam_verdict, ShellClaims};
use latsmooth_core::protocols::ggg::{decide_gapspp_bdd, ggg_simulate_szk, Ggg, Prover};
use latsmooth_core::protocols::gs::{encode_coefs, gs_lower_bound};
use latsmooth_core::protocols::spcom::{spcom_binding_estimate, spcom_hiding_sd, SpCom};
use latsmooth_core::protocols::{Outcome, Transcript};
use latsmooth_core::rng::derive_seed;
use latsmooth_core::samplers::Bits;
use latsmooth_core::{Basis, Rng};

use crate::basis_io::{parse_basis, ParseError};
use crate::executor::ThreadedExecutor;
use crate::report::{emit_report, Format, Record, Report, ReportError, Table, Value};
use crate::transcript_io::{payload_kind, payload_text};

/// Environment variable overriding the enumeration point budget.
pub const BUDGET_ENV: &str = "LATSMOOTH_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "latsmooth",
    version,
    about = "Smoothing parameters, Gaussian sums, Voronoi and ball-overlap checks, and proof-system simulations for lattices",
    after_help = "Basis files: first line n, then n rows; row i lists coordinate i of every basis column. \
                  Lines starting with '#' are ignored.\n\
                  Set LATSMOOTH_BUDGET to override the enumeration point budget (default 100000000)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Monte Carlo worker threads; reports do not depend on this.
    #[arg(long, default_value_t = 1, global = true)]
    pub workers: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Smoothing parameter η_ε(Λ) by bisection on certified sums.
    Eta {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long)]
        eps: f64,
        /// Relative bracket width at which bisection stops.
        #[arg(long, default_value_t = 1e-6)]
        rtol: f64,
    },
    /// Certified ρ_s(Λ∖0).
    Rho {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long)]
        s: f64,
        /// Bound on the omitted tail mass.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Length of a shortest nonzero lattice vector.
    Lambda1 {
        #[command(flatten)]
        basis: BasisArg,
    },
    /// Deterministic GapSPP decider by enumeration of the dual.
    DecideDet {
        #[command(flatten)]
        basis: BasisArg,
        #[command(flatten)]
        gap: GapArgs,
    },
    /// GapSPP decider running GGG with a BDD prover.
    DecideBdd {
        #[command(flatten)]
        basis: BasisArg,
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// The GGG protocol: acceptance probability or one transcript.
    Ggg {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, value_enum, default_value_t = GggMode::AcceptProb)]
        mode: GggMode,
        #[arg(long, value_enum, default_value_t = ProverArg::Optimal)]
        prover: ProverArg,
        /// BDD prover: decoding radius α/η_ε(Λ).
        #[arg(long)]
        alpha: Option<f64>,
        /// BDD prover: ε in the decoding radius.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Honest-verifier simulator transcript for GGG.
    SzkSim {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
    },
    /// Gaussian measure of the Voronoi cell, or its sandwich bounds.
    Voronoi {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, value_enum, default_value_t = VoronoiMode::Measure)]
        mode: VoronoiMode,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Ball-overlap fraction, its sandwich bounds, or the ε-overlap radii.
    Overlap {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, value_enum, default_value_t = OverlapMode::Fraction)]
        mode: OverlapMode,
        #[arg(long)]
        r: Option<f64>,
        /// Sandwich slack, in (0, 1/4).
        #[arg(long)]
        delta: Option<f64>,
        /// Target overlap for `radii`, in (0, 1/3].
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// SPCom commitments, their binding/hiding estimates, amplification and
    /// the SZK protocol built on them.
    Commit {
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CommitMode::Commit)]
        mode: CommitMode,
        /// Committed bit (0 or 1).
        #[arg(long, default_value_t = 0)]
        bit: u8,
        /// Hiding bound of the base scheme.
        #[arg(long)]
        p: Option<f64>,
        /// Binding bound of the base scheme.
        #[arg(long)]
        q: Option<f64>,
        /// Target for both bounds in `amplify-plan`.
        #[arg(long)]
        target: Option<f64>,
        /// Composition for `szk-run`, e.g. `repetition:2,sharing:3`.
        #[arg(long, default_value = "")]
        plan: String,
        #[command(flatten)]
        mc: McArgs,
    },
    /// The coAM shell protocol: shell sizes, the verifier's test, or the
    /// set-size lower-bound rounds.
    Coam {
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, value_enum, default_value_t = CoamMode::Shells)]
        mode: CoamMode,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[command(flatten)]
        gap: GapArgs,
        /// Approximation parameter of the set-size protocol.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Claimed sizes are ⌈inflate·|S_i|⌉.
        #[arg(long, default_value_t = 1.0)]
        inflate: f64,
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct BasisArg {
    /// Basis file.
    #[arg(long)]
    pub basis: PathBuf,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[arg(long = "epsY")]
    pub eps_y: f64,
    #[arg(long = "epsN")]
    pub eps_n: f64,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Decimal or 0x-prefixed hexadecimal.
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GggMode {
    AcceptProb,
    Transcript,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProverArg {
    Optimal,
    Bdd,
    Sabotage,
    RandomCoset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VoronoiMode {
    Measure,
    Sandwich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OverlapMode {
    Fraction,
    Sandwich,
    Radii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommitMode {
    Commit,
    Binding,
    Hiding,
    AmplifyPlan,
    SzkRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoamMode {
    Shells,
    Verdict,
    Gs,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("expected a decimal or 0x-prefixed 64-bit integer, got {s:?}"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("--basis {path}: {source}")]
    Basis { path: String, source: ParseError },
    #[error("{0}")]
    Compute(#[from] latsmooth_core::Error),
    #[error("{0}")]
    Report(#[from] ReportError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Basis { .. } => 1,
            CliError::Compute(latsmooth_core::Error::Domain { .. }) => 1,
            CliError::Compute(_) | CliError::Report(_) => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn open_unit(flag: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("{flag} must lie in (0, 1), got {v}")))
    }
}

fn positive(flag: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("{flag} must be a positive finite number, got {v}")))
    }
}

fn required<T: Copy>(flag: &str, v: Option<T>, why: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("{flag} is required {why}")))
}

fn check_gap(g: &GapArgs) -> Result<(), CliError> {
    open_unit("--epsY", g.eps_y)?;
    open_unit("--epsN", g.eps_n)?;
    if g.eps_y >= g.eps_n {
        return Err(usage(format!("--epsY ({}) must be below --epsN ({})", g.eps_y, g.eps_n)));
    }
    Ok(())
}

fn check_mc(m: &McArgs) -> Result<(), CliError> {
    if m.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    Ok(())
}

fn parse_plan(text: &str) -> Result<Vec<Op>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || usage(format!("--plan: expected repetition:K or sharing:K with K ≥ 1, got {t:?}"));
            let (kind, k) = t.split_once(':').ok_or_else(bad)?;
            let k: u32 = k.parse().ok().filter(|&k| k >= 1).ok_or_else(bad)?;
            match kind {
                "repetition" => Ok(Op::Repetition(k)),
                "sharing" => Ok(Op::Sharing(k)),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn op_str(op: Op) -> String {
    match op {
        Op::Repetition(k) => format!("repetition:{k}"),
        Op::Sharing(k) => format!("sharing:{k}"),
    }
}

/// Checks every numeric flag; nothing is read or computed before this passes.
fn validate(cli: &Cli) -> Result<(), CliError> {
    if cli.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    match &cli.command {
        Command::Eta { eps, rtol, .. } => {
            open_unit("--eps", *eps)?;
            open_unit("--rtol", *rtol)?;
        }
        Command::Rho { s, tol, .. } => {
            positive("--s", *s)?;
            positive("--tol", *tol)?;
        }
        Command::Lambda1 { .. } | Command::SzkSim { .. } => {}
        Command::DecideDet { gap, .. } => check_gap(gap)?,
        Command::DecideBdd { gap, alpha, mc, .. } => {
            check_gap(gap)?;
            if gap.eps_y > gap.eps_n / 100.0 {
                return Err(usage(format!("--epsY must be at most --epsN/100, got {} vs {}", gap.eps_y, gap.eps_n)));
            }
            open_unit("--alpha", *alpha)?;
            check_mc(mc)?;
        }
        Command::Ggg { prover, alpha, eps, mc, mode, .. } => {
            if *prover == ProverArg::Bdd {
                open_unit("--alpha", required("--alpha", *alpha, "with --prover bdd")?)?;
                open_unit("--eps", required("--eps", *eps, "with --prover bdd")?)?;
            }
            if *mode == GggMode::AcceptProb {
                check_mc(mc)?;
            }
        }
        Command::Voronoi { s, mc, .. } => {
            positive("--s", *s)?;
            check_mc(mc)?;
        }
        Command::Overlap { mode, r, delta, eps, mc, .. } => match mode {
            OverlapMode::Fraction | OverlapMode::Sandwich => {
                positive("--r", required("--r", *r, "for this mode")?)?;
                if *mode == OverlapMode::Sandwich {
                    let d = required("--delta", *delta, "for --mode sandwich")?;
                    if !(d > 0.0 && d < 0.25) {
                        return Err(usage(format!("--delta must lie in (0, 1/4), got {d}")));
                    }
                }
                check_mc(mc)?;
            }
            OverlapMode::Radii => open_unit("--eps", required("--eps", *eps, "for --mode radii")?)?,
        },
        Command::Commit { basis, mode, bit, p, q, target, plan, mc } => {
            if *mode != CommitMode::AmplifyPlan && basis.is_none() {
                return Err(usage("--basis is required for this mode"));
            }
            match mode {
                CommitMode::Commit if *bit > 1 => return Err(usage(format!("--bit must be 0 or 1, got {bit}"))),
                CommitMode::Binding | CommitMode::Hiding => check_mc(mc)?,
                CommitMode::AmplifyPlan => {
                    for (flag, v) in [("--p", p), ("--q", q)] {
                        let v = required(flag, *v, "for --mode amplify-plan")?;
                        if !(0.0..=1.0).contains(&v) {
                            return Err(usage(format!("{flag} must lie in [0, 1], got {v}")));
                        }
                    }
                    open_unit("--target", required("--target", *target, "for --mode amplify-plan")?)?;
                }
                CommitMode::SzkRun => {
                    parse_plan(plan)?;
                }
                CommitMode::Commit => {}
            }
        }
        Command::Coam { mode, alpha, gap, gamma, inflate, .. } => {
            positive("--alpha", *alpha)?;
            check_gap(gap)?;
            if *mode == CoamMode::Gs {
                if !(*gamma > 0.0 && *gamma <= 1.0) {
                    return Err(usage(format!("--gamma must lie in (0, 1], got {gamma}")));
                }
                if !(inflate.is_finite() && *inflate >= 1.0) {
                    return Err(usage(format!("--inflate must be at least 1, got {inflate}")));
                }
            }
        }
    }
    Ok(())
}

fn budget_override() -> Result<Option<u64>, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(b) if b >= 1 => Ok(Some(b)),
            _ => Err(usage(format!("{BUDGET_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(_) => Err(usage(format!("{BUDGET_ENV} is not valid UTF-8"))),
    }
}

fn load_basis(path: &Path, budget: Option<u64>) -> Result<Basis, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("--basis {}: cannot read: {e}", path.display())))?;
    let b = parse_basis(&text).map_err(|source| CliError::Basis { path: path.display().to_string(), source })?;
    Ok(match budget {
        Some(n) => b.with_point_budget(n),
        None => b,
    })
}

/// A report plus the verdict line decision commands print last.
struct Output {
    report: Report,
    verdict: Option<&'static str>,
}

impl From<Record> for Output {
    fn from(r: Record) -> Self {
        Output { report: r.into(), verdict: None }
    }
}

fn transcript_report(t: &Transcript) -> Report {
    let rows = t
        .messages
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                Value::Uint(i as u64),
                m.role.as_str().into(),
                payload_kind(&m.payload).into(),
                payload_text(&m.payload).into(),
            ]
        })
        .collect();
    Report::new(Record::new().with("outcome", t.outcome.as_str()).with("messages", t.messages.len()))
        .with_table(Table { columns: ["index", "role", "type", "payload"].map(String::from).to_vec(), rows })
}

fn bits_text(b: &Bits) -> String {
    b.iter().map(|x| if x { '1' } else { '0' }).collect()
}

fn shell_claims(b: &Basis, alpha: f64, gap: &GapArgs) -> Result<(ShellClaims, Vec<Vec<LatticePoint>>), CliError> {
    let shells = coam_shells(b, alpha, gap.eps_y)?;
    let (big_r, t) = latsmooth_core::protocols::coam::coam_parameters(b.dim(), alpha, gap.eps_y)?;
    let counts = shells.iter().map(|s| s.len() as u64).collect();
    let claims = ShellClaims { alpha, eps_y: gap.eps_y, eps_n: gap.eps_n, big_r, t, counts };
    Ok((claims, shells))
}

fn claims_record(c: &ShellClaims) -> Record {
    Record::new()
        .with("alpha", c.alpha)
        .with("eps_y", c.eps_y)
        .with("eps_n", c.eps_n)
        .with("big_r", c.big_r)
        .with("t", c.t)
        .with("weighted_sum", c.weighted_sum())
        .with("threshold", c.threshold())
        .with("inflation_factor", c.inflation_factor())
        .with("max_uninflated_sum", c.max_uninflated_sum())
}

fn execute(cli: &Cli, budget: Option<u64>) -> Result<Output, CliError> {
    let exec = ThreadedExecutor::new(cli.workers);
    let mc = |m: &McArgs| Mc::new(m.trials, m.seed).with_executor(&exec);
    let load = |p: &Path| load_basis(p, budget);
    Ok(match &cli.command {
        Command::Eta { basis, eps, rtol } => {
            Record::from(&smoothing_parameter(&load(&basis.basis)?, *eps, *rtol)?).into()
        }
        Command::Rho { basis, s, tol } => {
            let c = rho_sum_nonzero(&load(&basis.basis)?, *s, *tol)?;
            Record::from(&c).with("upper", c.upper()).into()
        }
        Command::Lambda1 { basis } => Record::new().with("lambda1", lambda1(&load(&basis.basis)?)?).into(),
        Command::DecideDet { basis, gap } => {
            let d = decide_gapspp_det(&load(&basis.basis)?, gap.eps_y, gap.eps_n)?;
            Output { report: Record::from(&d).into(), verdict: Some(d.verdict.as_str()) }
        }
        Command::DecideBdd { basis, gap, alpha, mc: m } => {
            let d = decide_gapspp_bdd(&load(&basis.basis)?, gap.eps_y, gap.eps_n, *alpha, &mc(m))?;
            Output { report: Record::from(&d).into(), verdict: Some(d.verdict.as_str()) }
        }
        Command::Ggg { basis, mode, prover, alpha, eps, mc: m } => {
            let b = load(&basis.basis)?;
            let p = match prover {
                ProverArg::Optimal => Prover::Optimal,
                ProverArg::Bdd => Prover::bdd(&b, alpha.unwrap_or_default(), eps.unwrap_or_default())?,
                ProverArg::Sabotage => Prover::Sabotage,
                ProverArg::RandomCoset => Prover::RandomCoset,
            };
            let g = Ggg::new(&b)?;
            match mode {
                GggMode::AcceptProb => {
                    let mut r = Record::new().with("prover", prover_name(*prover));
                    if let Prover::Bdd { radius } = p {
                        r = r.with("decoding_radius", radius);
                    }
                    r.extend(Record::from(&g.accept_prob(p, &mc(m))?)).into()
                }
                GggMode::Transcript => {
                    Output { report: transcript_report(&g.round(p, &mut Rng::new(m.seed))?), verdict: None }
                }
            }
        }
        Command::SzkSim { basis, seed } => {
            let t = ggg_simulate_szk(&load(&basis.basis)?, &mut Rng::new(*seed))?;
            Output { report: transcript_report(&t), verdict: None }
        }
        Command::Voronoi { basis, mode, s, mc: m } => {
            let b = load(&basis.basis)?;
            match mode {
                VoronoiMode::Measure => {
                    Record::new().with("s", *s).extend(Record::from(&voronoi_gaussian_measure(&b, *s, &mc(m))?))
                }
                VoronoiMode::Sandwich => {
                    Record::new().with("s", *s).extend(Record::from(&check_voronoi_sandwich(&b, *s, &mc(m))?))
                }
            }
            .into()
        }
        Command::Overlap { basis, mode, r, delta, eps, mc: m } => {
            let b = load(&basis.basis)?;
            match mode {
                OverlapMode::Fraction => {
                    let r = r.expect("validated");
                    Record::new().with("r", r).extend(Record::from(&overlap_fraction(&b, r, &mc(m))?))
                }
                OverlapMode::Sandwich => {
                    let (r, d) = (r.expect("validated"), delta.expect("validated"));
                    Record::new().with("r", r).with("delta", d).extend(Record::from(&check_overlap_sandwich(
                        &b,
                        r,
                        d,
                        &mc(m),
                    )?))
                }
                OverlapMode::Radii => {
                    let e = eps.expect("validated");
                    Record::new().with("eps", e).extend(Record::from(&ball_overlap_radii(&b, e)?))
                }
            }
            .into()
        }
        Command::Commit { basis, mode, bit, p, q, target, plan, mc: m } => match mode {
            CommitMode::AmplifyPlan => {
                let (p, q, target) = (p.expect("validated"), q.expect("validated"), target.expect("validated"));
                let ops = amplification_plan(p, q, target)?;
                let mut rows = Vec::new();
                let mut acc = SchemeParams::leaf(p, q)?;
                for (i, &op) in ops.iter().enumerate() {
                    acc = latsmooth_core::protocols::amplify::amplify(&acc, op)?;
                    rows.push(vec![Value::Uint(i as u64 + 1), op_str(op).into(), acc.p.into(), acc.q.into()]);
                }
                let record = Record::new()
                    .with("p", p)
                    .with("q", q)
                    .with("target", target)
                    .with("steps", ops.len())
                    .with("final_p", acc.p)
                    .with("final_q", acc.q)
                    .with("leaves", acc.leaves())
                    .with("plan", ops.iter().map(|&o| op_str(o)).collect::<Vec<_>>().join(","));
                let table = Table { columns: ["step", "op", "p", "q"].map(String::from).to_vec(), rows };
                Output { report: Report::new(record).with_table(table), verdict: None }
            }
            _ => {
                let b = load(basis.as_deref().expect("validated"))?;
                match mode {
                    CommitMode::Commit => {
                        let sc = SpCom::new(&b)?;
                        let c = sc.commit(*bit == 1, &mut Rng::new(m.seed))?;
                        Record::new()
                            .with("bit", u64::from(*bit))
                            .with("radius", sc.radius())
                            .with("w", c.w.as_slice())
                            .with("h_a", bits_text(&c.h.a))
                            .with("h_b", u64::from(c.h.b))
                            .with("z", bits_text(&c.opening.z))
                            .with("e", c.opening.e.as_slice())
                            .with("lift", c.opening.lift.as_slice())
                            .with("seed", m.seed)
                            .into()
                    }
                    CommitMode::Binding => {
                        let r = SpCom::new(&b)?.radius();
                        Record::new()
                            .with("radius", r)
                            .extend(Record::from(&spcom_binding_estimate(&b, &mc(m))?))
                            .into()
                    }
                    CommitMode::Hiding => {
                        let r = SpCom::new(&b)?.radius();
                        Record::new().with("radius", r).extend(Record::from(&spcom_hiding_sd(&b, &mc(m))?)).into()
                    }
                    CommitMode::SzkRun => {
                        let ops = parse_plan(plan)?;
                        let params = apply_plan(&SchemeParams::leaf(p.unwrap_or(1.0), q.unwrap_or(1.0))?, &ops)?;
                        let t = Amplified::new(&b, params)?.run(&mut Rng::new(m.seed))?;
                        Output { report: transcript_report(&t), verdict: None }
                    }
                    CommitMode::AmplifyPlan => unreachable!(),
                }
            }
        },
        Command::Coam { basis, mode, alpha, gap, gamma, inflate, seed } => {
            let b = load(&basis.basis)?;
            let (claims, shells) = shell_claims(&b, *alpha, gap)?;
            match mode {
                CoamMode::Shells => {
                    let rows = claims
                        .counts
                        .iter()
                        .enumerate()
                        .map(|(i, &k)| vec![Value::Uint(i as u64), Value::Uint(k), Value::Num(claims.weight(i))])
                        .collect();
                    let table = Table { columns: ["i", "count", "weight"].map(String::from).to_vec(), rows };
                    Output { report: Report::new(claims_record(&claims)).with_table(table), verdict: None }
                }
                CoamMode::Verdict => {
                    // The coAM verifier accepts NO instances.
                    let outcome = coam_verdict(&claims);
                    let verdict = if outcome.is_accept() { "NO" } else { "YES" };
                    let record = claims_record(&claims)
                        .with("counts", Value::List(claims.counts.iter().map(|&k| Value::Uint(k)).collect()))
                        .with("outcome", outcome.as_str())
                        .with("verdict", verdict);
                    Output { report: record.into(), verdict: Some(verdict) }
                }
                CoamMode::Gs => {
                    let mut rows = Vec::new();
                    let mut all = true;
                    for (i, shell) in shells.iter().enumerate() {
                        let members = shell.iter().map(|p| encode_coefs(&p.coefs)).collect::<Result<Vec<_>, _>>()?;
                        let claim = (inflate * members.len() as f64).ceil() as u64;
                        let run = gs_lower_bound(&members, claim, *gamma, &mut Rng::new(derive_seed(*seed, i as u64)))?;
                        all &= run.outcome.is_accept();
                        rows.push(vec![
                            Value::Uint(i as u64),
                            Value::Uint(members.len() as u64),
                            Value::Uint(claim),
                            Value::Uint(run.hash_bits.into()),
                            Value::Uint(run.rounds),
                            Value::Uint(run.hits),
                            run.outcome.as_str().into(),
                        ]);
                    }
                    let record = Record::new()
                        .with("gamma", *gamma)
                        .with("inflate", *inflate)
                        .with("seed", *seed)
                        .with("outcome", Outcome::from_bool(all).as_str());
                    let table = Table {
                        columns: ["i", "size", "claim", "hash_bits", "rounds", "hits", "outcome"]
                            .map(String::from)
                            .to_vec(),
                        rows,
                    };
                    Output { report: Report::new(record).with_table(table), verdict: None }
                }
            }
        }
    })
}

fn prover_name(p: ProverArg) -> &'static str {
    match p {
        ProverArg::Optimal => "optimal",
        ProverArg::Bdd => "bdd",
        ProverArg::Sabotage => "sabotage",
        ProverArg::RandomCoset => "random-coset",
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if informational {
                let _ = out.write_all(text.as_bytes());
                return 0;
            }
            let _ = err.write_all(text.as_bytes());
            return 1;
        }
    };
    match run_cli(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    validate(cli)?;
    let budget = budget_override()?;
    let output = execute(cli, budget)?;
    emit_report(&output.report, cli.format, cli.output.as_deref(), out)?;
    if let Some(v) = output.verdict {
        writeln!(out, "{v}").map_err(|source| ReportError::Write { path: "<stdout>".into(), source })?;
    }
    Ok(())
}
