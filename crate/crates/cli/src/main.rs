//! `ngon-cert`: certify local minimality of regular polygons, certify P1
//! interpolation constants, and sweep mesh sizes.
//!
//! Exit codes: 0 = certified, 1 = soundly not certified, 2 = configuration or
//! runtime error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ngon_cert::certify::{certify, certify_eigs, format_row, CertifyConfig, CertifyError, Problem, Verdict};
use ngon_cert::interval::{format_outward, Interval};
use ngon_cert::morley::{certify_interp_constant, slice_vertex, MorleyError};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "ngon-cert",
    version,
    about = "Certified Hessian spectrum of the first Dirichlet eigenvalue on regular polygons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full certification for the regular n-gon on the m-mesh.
    Certify(CertifyArgs),
    /// Certified upper bound of the P1 interpolation constant of a triangle.
    Morley(MorleyArgs),
    /// Certified enclosures of the two smallest discrete eigenvalues.
    Eigs(EigsArgs),
    /// Sweep the mesh parameter and tabulate the smallest eigenvalue.
    Scan(ScanArgs),
    /// Re-render a saved JSON certification report.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Number of polygon sides.
    #[arg(long)]
    n: usize,
    /// Subdivisions per slice edge.
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    threads: usize,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    common: Common,
    /// Border scaling of the bordered material systems.
    #[arg(long, default_value_t = 4.0)]
    gamma0: f64,
    /// Override the interpolation constant of the slice triangle.
    #[arg(long)]
    c1: Option<f64>,
}

#[derive(Args, Debug)]
struct MorleyArgs {
    /// Use the slice triangle of the regular n-gon.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    n: Option<usize>,
    /// Third vertex x-coordinate (first two vertices are (0,0), (1,0)).
    #[arg(long, requires = "b")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    #[arg(long, default_value_t = 32)]
    m: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EigsArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    /// Inclusive range `lo..hi`.
    #[arg(long, value_parser = parse_range)]
    m_range: (usize, usize),
    #[arg(long, default_value_t = 50)]
    step: usize,
    #[arg(long, default_value_t = 4.0)]
    gamma0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    threads: usize,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// JSON report written by `certify --format json`.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{b:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Outcome of a subcommand.
enum Outcome {
    Certified,
    NotCertified,
}

type CmdResult = Result<Outcome, String>;

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(n: usize, m: usize, gamma0: f64) -> Result<(), String> {
    if !(5..=10).contains(&n) {
        return Err(format!("--n {n} outside 5..=10"));
    }
    if m < 2 {
        return Err(format!("--m {m} must be at least 2"));
    }
    if !(1.0..=10.0).contains(&gamma0) {
        return Err(format!("--gamma0 {gamma0} outside [1, 10]"));
    }
    Ok(())
}

/// Maps a pipeline error to an outcome: sound failures are a negative
/// verdict, everything else is an error.
fn failure(e: CertifyError, out: &Option<PathBuf>, format: Format, n: usize, m: usize) -> CmdResult {
    if !e.is_sound_failure() {
        return Err(e.to_string());
    }
    let text = match format {
        Format::Json => {
            serde_json::to_string_pretty(
                &json!({"schema": 1, "n": n, "m": m, "verdict": "not_certified", "diagnosis": [e.to_string()]}),
            )
            .expect("json")
                + "\n"
        }
        _ => format!("Proof of local minimality failed.\n# {e}\n"),
    };
    emit(out, &text)?;
    Ok(Outcome::NotCertified)
}

fn cmd_certify(args: &CertifyArgs) -> CmdResult {
    let c = &args.common;
    validate(c.n, c.m, args.gamma0)?;
    let mut cfg = CertifyConfig::new(c.n, c.m);
    cfg.gamma0 = args.gamma0;
    cfg.threads = c.threads.max(1);
    cfg.c1 = args.c1.map(Interval::point);
    let report = match certify(&cfg) {
        Ok(r) => r,
        Err(e) => return failure(e, &c.out, c.format, c.n, c.m),
    };
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&report.to_json()).expect("json") + "\n",
        Format::Csv => {
            let mut s = String::from("j,mu_lo,mu_hi,budget,final_lo,final_hi\n");
            for (j, (mu, f)) in report.spectrum.mu.iter().zip(&report.final_intervals).enumerate() {
                let e = if j < 2 { 0.0 } else { report.budget.mode_error(j / 2) };
                writeln!(s, "{j},{:e},{:e},{:e},{:e},{:e}", mu.lo, mu.hi, e, f.lo, f.hi).expect("string");
            }
            s
        }
        Format::Text => report.to_text(),
    };
    emit(&c.out, &text)?;
    Ok(match report.verdict {
        Verdict::Certified => Outcome::Certified,
        Verdict::NotCertified => Outcome::NotCertified,
    })
}

fn cmd_morley(args: &MorleyArgs) -> CmdResult {
    let (a, b) = match (args.n, args.a, args.b) {
        (Some(n), _, _) => {
            if !(3..=64).contains(&n) {
                return Err(format!("--n {n} outside 3..=64"));
            }
            slice_vertex(n).map_err(|e| e.to_string())?
        }
        (None, Some(a), Some(b)) => (Interval::point(a), Interval::point(b)),
        _ => return Err("give either --n or both --a and --b".into()),
    };
    if args.eps.is_nan() || args.eps <= 0.0 {
        return Err("--eps must be positive".into());
    }
    match certify_interp_constant(a, b, args.m, args.eps) {
        Ok(r) => {
            let text = match args.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({
                        "a": [a.lo, a.hi], "b": [b.lo, b.hi], "m": args.m, "eps": args.eps,
                        "rho_approx": r.rho_approx, "rho_lower": r.rho_lower, "bound": r.bound.hi, "dof": r.dof,
                    }))
                    .expect("json")
                        + "\n"
                }
                Format::Csv => format!("a,b,m,bound\n{},{},{},{:e}\n", a.mid(), b.mid(), args.m, r.bound.hi),
                Format::Text => format!("C(T) <= {}\n", format_outward(r.bound.hi, 6, true)),
            };
            emit(&args.out, &text)?;
            Ok(Outcome::Certified)
        }
        Err(MorleyError::NotCertified(msg)) => {
            emit(&args.out, &format!("a lower bound was not found: {msg}\n"))?;
            Ok(Outcome::NotCertified)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_eigs(args: &EigsArgs) -> CmdResult {
    let c = &args.common;
    validate(c.n, c.m, 4.0)?;
    let cfg = CertifyConfig::new(c.n, c.m);
    let prob = Problem::build(&cfg).map_err(|e| e.to_string())?;
    let eigs = match certify_eigs(&prob.sys, prob.c1) {
        Ok(e) => e,
        Err(e) => return failure(e, &c.out, c.format, c.n, c.m),
    };
    let (l1, l2) = (eigs.lam1.value, eigs.lam2.value);
    let text = match c.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "n": c.n, "m": c.m, "unknowns": prob.sys.dof,
                "lam1": [l1.lo, l1.hi], "lam2": [l2.lo, l2.hi],
                "lam2_err": eigs.lam2_err.hi, "threshold": [eigs.threshold.lo, eigs.threshold.hi],
                "vector_radius_m": eigs.vector_radius_m, "positive_vector": eigs.positive_vector,
            }))
            .expect("json")
                + "\n"
        }
        Format::Csv => format!(
            "n,m,lam1_lo,lam1_hi,lam2_lo,lam2_hi\n{},{},{:e},{:e},{:e},{:e}\n",
            c.n, c.m, l1.lo, l1.hi, l2.lo, l2.hi
        ),
        Format::Text => format!("lambda_1,h in {l1}\nlambda_2,h in {l2}\nj_21^2 in {}\n", eigs.threshold),
    };
    emit(&c.out, &text)?;
    Ok(Outcome::Certified)
}

fn cmd_scan(args: &ScanArgs) -> CmdResult {
    validate(args.n, args.m_range.0, args.gamma0)?;
    if args.step == 0 {
        return Err("--step must be positive".into());
    }
    let mut csv = String::from("m,mu_min_lo,mu_min_hi,budget,fem_radius,status\n");
    let mut any = false;
    let mut m = args.m_range.0;
    while m <= args.m_range.1 {
        let mut cfg = CertifyConfig::new(args.n, m);
        cfg.gamma0 = args.gamma0;
        cfg.threads = args.threads.max(1);
        match certify(&cfg) {
            Ok(r) => {
                let mu = r.mu_min();
                let status = match r.verdict {
                    Verdict::Certified => "certified",
                    Verdict::NotCertified => "not_certified",
                };
                any |= r.verdict == Verdict::Certified;
                writeln!(csv, "{m},{:e},{:e},{:e},{:e},{status}", mu.lo, mu.hi, r.mu_min_budget(), r.fem_radius())
                    .expect("string");
            }
            Err(e) => {
                eprintln!("m = {m}: {e}");
                let status = if e.is_sound_failure() { "not_certified" } else { "error" };
                writeln!(csv, "{m},,,,,{status}").expect("string");
            }
        }
        m += args.step;
    }
    emit(&args.out, &csv)?;
    Ok(if any { Outcome::Certified } else { Outcome::NotCertified })
}

fn cmd_report(args: &ReportArgs) -> CmdResult {
    let raw = std::fs::read_to_string(&args.input).map_err(|e| format!("reading {}: {e}", args.input.display()))?;
    let v: serde_json::Value = serde_json::from_str(&raw).map_err(|e| format!("parsing report: {e}"))?;
    if v["schema"] != 1 {
        return Err("unsupported report schema".into());
    }
    let certified = v["verdict"] == "certified";
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&v).expect("json") + "\n",
        Format::Csv => {
            let mut s = String::from("j,final_lo,final_hi\n");
            for (j, x) in v["final"].as_array().into_iter().flatten().enumerate() {
                writeln!(s, "{j},{},{}", x[0], x[1]).expect("string");
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            if let Some(c) = v["positive_count"].as_u64() {
                writeln!(s, "Number of positive eigenvalues = {c}").expect("string");
            }
            s += if certified {
                "Proof of local minimality succeeded!\n"
            } else {
                "Proof of local minimality failed.\n"
            };
            if let Some(d) = v["dof"].as_u64() {
                writeln!(s, "Degrees of Freedom (full mesh) {d}").expect("string");
            }
            let mut rows: Vec<Interval> = v["final"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|x| Some(Interval::new(x[0].as_f64()?, x[1].as_f64()?)))
                .collect();
            rows.sort_by(|a, b| a.mid().total_cmp(&b.mid()));
            for r in rows {
                s += &format_row(r);
                s.push('\n');
            }
            for d in v["diagnosis"].as_array().into_iter().flatten() {
                writeln!(s, "# {}", d.as_str().unwrap_or_default()).expect("string");
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(if certified { Outcome::Certified } else { Outcome::NotCertified })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Certify(a) => cmd_certify(a),
        Command::Morley(a) => cmd_morley(a),
        Command::Eigs(a) => cmd_eigs(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(Outcome::Certified) => ExitCode::SUCCESS,
        Ok(Outcome::NotCertified) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
