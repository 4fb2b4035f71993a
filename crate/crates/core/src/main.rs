use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use drinfeld_core::coeff::Mode;
use drinfeld_core::drinfeld::psi_from_torsion;
use drinfeld_core::eisenstein::{eval_eisenstein, EvalConfig};
use drinfeld_core::fq::gf_q;
use drinfeld_core::goss;
use drinfeld_core::hecke::{self, HeckeSpec};
use drinfeld_core::lattice::{LatticeCoset, OmegaPoint, PointVariant};
use drinfeld_core::poly::RatF;
use drinfeld_core::ring::{self, Group, RingCtx};
use drinfeld_core::suite::{self, Section, SuiteConfig};
use drinfeld_core::tail::{tail_ctx, Exp};
use drinfeld_core::{Error, Result};

/// Exact computations with Drinfeld modular forms over F_q[t].
#[derive(Parser)]
#[command(name = "drinfeld", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the Goss polynomial G_k for F_q.
    Goss {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        k: usize,
        /// Emit JSON with the canonical term list and ord_X.
        #[arg(long)]
        json: bool,
    },
    /// Eisenstein series at a period point.
    #[command(subcommand)]
    Eisenstein(EisCmd),
    /// Coefficient forms of the Drinfeld module ψ_N.
    #[command(subcommand)]
    Drinfeld(DrinfeldCmd),
    /// The level-t ring R_V.
    #[command(subcommand)]
    Ring(RingCmd),
    /// Hecke checks: local coset counts, the global identity, rank-2 eigenvalues.
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Dimension formulas as CSV (no linear algebra).
    Dims(DimsArgs),
    /// Run the verification suite and emit a JSON report (CSV for `--suite dims`).
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Point {
    Standard,
    Perturbed,
    Spread,
}

#[derive(Subcommand)]
enum EisCmd {
    /// E_{k,v+L}(ω) modulo O(t^{−P}).
    Eval {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        /// JSON file {"basis": [[..]], "v": [..]}; defaults to A^r with --v.
        #[arg(long)]
        coset: Option<String>,
        /// Comma-separated coset vector for the default lattice A^r.
        #[arg(long, value_delimiter = ',')]
        v: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "standard")]
        point: Point,
        #[arg(long, default_value_t = 8)]
        prec: i128,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiMode {
    Symbolic,
    Numeric,
}

#[derive(Subcommand)]
enum DrinfeldCmd {
    /// Coefficients g_{N,i} of ψ_N: normal forms in R_V, or values at the standard point.
    Psi {
        #[arg(long = "N", default_value = "t")]
        n: String,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "symbolic")]
        mode: PsiMode,
        #[arg(long, default_value_t = 8)]
        prec: i128,
        /// Largest ring slice, in monomials.
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    /// Closed formula against the linear-algebra dimension, as CSV.
    Dims {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        kmax: usize,
        /// GL, SL, U1 or GAMMA_T.
        #[arg(long, default_value = "GAMMA_T")]
        group: String,
        /// Type m (GL only).
        #[arg(long = "type", default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum HeckeCmd {
    /// Exhaustive local coset count at one prime.
    Local {
        #[arg(long)]
        q: u32,
        /// Rank; must agree with the length of μ when given.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value = "t")]
        pi: String,
        #[arg(long, value_delimiter = ',')]
        mu: Vec<usize>,
        /// Accepted for compatibility: the local check always runs over every residue.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = hecke::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// The inclusion–exclusion identity mod p for a spec file.
    Global {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = hecke::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Σ over index-π sublattices for E_{k,A²} at the standard point.
    Rank2 {
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value = "t")]
        pi: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        prec: i128,
    },
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value = "GAMMA_T")]
    group: String,
    #[arg(long = "type", default_value_t = 0)]
    m: u32,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Auto,
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Absolute precision P (compare modulo O(t^{−P})).
    #[arg(long, default_value_t = 8)]
    prec: i128,
    #[arg(long, default_value_t = 6)]
    kmax: usize,
    #[arg(long, default_value_t = 200_000)]
    ring_budget: usize,
    #[arg(long, default_value_t = hecke::DEFAULT_BUDGET)]
    hecke_budget: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8")]
    schedule: Vec<i64>,
    /// Sections to run (comma-separated): goss, eisenstein, u-order,
    /// coefficient, discriminant, moore, dims, invariants, hecke.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// auto: CSV when the only section is dims, JSON otherwise.
    #[arg(long, value_enum, default_value = "auto")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

fn read_json(path: &str) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn point(q: u32, r: usize, p: Point) -> Result<OmegaPoint> {
    let ctx = tail_ctx(q, 1)?;
    Ok(match p {
        Point::Standard => OmegaPoint::standard(&ctx, r, PointVariant::Standard),
        Point::Perturbed => OmegaPoint::standard(&ctx, r, PointVariant::Perturbed),
        Point::Spread => suite::spread_point(&ctx, r),
    })
}

fn dim_csv_rows(q: u32, r: usize, kmax: usize, g: Group, m: u32) -> Result<String> {
    let mut s = String::new();
    if g == Group::U1 {
        s.push_str("k,dim_printed,dim_corrected\n");
    } else {
        s.push_str("k,dim\n");
    }
    for k in 0..=kmax {
        let (formula, corrected) = ring::formula_dim(q, r, k, g, m)?;
        match corrected {
            Some(c) => s.push_str(&format!("{k},{formula},{c}\n")),
            None => s.push_str(&format!("{k},{formula}\n")),
        }
    }
    Ok(s)
}

fn ring_dims_csv(ctx: &std::sync::Arc<RingCtx>, g: Group, m: u32, kmax: usize, with_group: bool) -> Result<(String, bool)> {
    let rows = ring::dimension_table(ctx, g, m, kmax)?;
    let mut s = String::new();
    let mut ok = true;
    for row in &rows {
        if with_group {
            s.push_str(&format!("{},{m},", g.name()));
        }
        s.push_str(&format!("{},{},{},{}", row.k, row.formula, row.computed, row.matches()));
        if let Some(c) = row.corrected {
            s.push_str(&format!(",{c}"));
            ok &= c == row.computed as u128;
        } else {
            ok &= row.matches();
            if with_group {
                s.push(',');
            }
        }
        s.push('\n');
    }
    Ok((s, ok))
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let sections = if a.suite.is_empty() {
        Section::ALL.to_vec()
    } else {
        a.suite.iter().map(|s| Section::parse(s)).collect::<Result<Vec<_>>>()?
    };
    let cfg = SuiteConfig {
        q: a.q,
        r: a.r,
        precision: a.prec,
        ring_budget: a.ring_budget,
        hecke_budget: a.hecke_budget,
        kmax: a.kmax,
        schedule: a.schedule,
        sections,
    };
    cfg.validate()?;
    let csv = match a.format {
        Format::Csv => true,
        Format::Json => false,
        Format::Auto => cfg.sections == [Section::Dims],
    };
    let (text, ok) = if csv {
        if cfg.sections != [Section::Dims] {
            return Err(Error::Invalid("CSV output is available for the dims section only".into()));
        }
        let ctx = RingCtx::new(cfg.q, cfg.r, Mode::Extended, cfg.ring_budget)?;
        // U1 rows carry the corrected count as an extra column
        let mut s = String::from("group,type,k,dim_formula,dim_linear_algebra,match,dim_corrected\n");
        let mut ok = true;
        for (g, m) in suite::dim_groups(cfg.q) {
            let (rows, good) = ring_dims_csv(&ctx, g, m, cfg.kmax, true)?;
            s.push_str(&rows);
            ok &= good;
        }
        (s, ok)
    } else {
        let report = suite::run_suite(&cfg)?;
        for c in &report.claims {
            if matches!(c.status, suite::Status::Fail | suite::Status::Error) {
                eprintln!("{}: {} ({})", c.status.name(), c.claim_id, c.paper_ref);
            }
        }
        (pretty(&report.to_json()) + "\n", report.ok())
    };
    match a.out {
        Some(path) => fs::write(&path, text).map_err(|e| Error::Invalid(format!("{path}: {e}")))?,
        None => emit_raw(&text),
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Writes to stdout; a closed pipe (`| head`) ends the process quietly.
fn emit_raw(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

fn emit(line: &str) {
    emit_raw(&format!("{line}\n"));
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Goss { q, k, json } => {
            let g = goss::goss(k, q)?;
            if json {
                let terms: Vec<Value> = g.canonical_terms().into_iter().map(|(e, c)| json!({"exponents": e, "coeff": c})).collect();
                emit(&(pretty(&json!({"q": q, "k": k, "G_k": g.to_string(), "terms": terms, "ord_X": goss::ord_x(k, q)?}))));
            } else {
                emit(&g.to_string());
            }
        }
        Cmd::Eisenstein(EisCmd::Eval { q, r, k, coset, v, point: pt, prec }) => {
            let f = gf_q(q)?;
            let c = match (coset, v) {
                (Some(path), _) => LatticeCoset::from_json(&f, &read_json(&path)?)?,
                (None, Some(v)) => {
                    let v: Vec<RatF> = v.iter().map(|s| RatF::parse(&f, s)).collect::<Result<_>>()?;
                    if v.len() != r {
                        return Err(Error::Invalid(format!("--v has {} entries, expected r = {r}", v.len())));
                    }
                    LatticeCoset::standard(&f, r).with_v(v)
                }
                (None, None) => LatticeCoset::standard(&f, r),
            };
            if c.rank() != r {
                return Err(Error::Invalid(format!("coset has rank {}, expected r = {r}", c.rank())));
            }
            let w = point(q, r, pt)?;
            let val = eval_eisenstein(&c, &w, k, Exp::int(prec), &EvalConfig::default())?;
            emit(&(pretty(&val.to_json())));
        }
        Cmd::Drinfeld(DrinfeldCmd::Psi { n, q, r, mode, prec, budget }) => {
            let f = gf_q(q)?;
            let n = hecke::parse_poly(&f, &n)?;
            let coeffs: Vec<Value> = match mode {
                PsiMode::Symbolic => {
                    let ctx = RingCtx::new(q, r, Mode::Extended, budget)?;
                    ring::psi_symbolic(&ctx, &n)?
                        .iter()
                        .map(|g| g.reduced().map(|x| Value::String(x.to_string())))
                        .collect::<Result<_>>()?
                }
                PsiMode::Numeric => {
                    let w = point(q, r, Point::Standard)?;
                    let psi = psi_from_torsion(&LatticeCoset::standard(&f, r), &w, &n, Exp::int(prec), &EvalConfig::default())?.psi;
                    psi.c.iter().map(|x| x.to_json()).collect()
                }
            };
            let mode = match mode {
                PsiMode::Symbolic => "symbolic",
                PsiMode::Numeric => "numeric",
            };
            emit(&(pretty(&json!({"q": q, "r": r, "N": n.to_string(), "mode": mode, "g": coeffs}))));
        }
        Cmd::Ring(RingCmd::Dims { q, r, kmax, group, m, budget }) => {
            let g = Group::parse(&group)?;
            let ctx = RingCtx::new(q, r, Mode::Extended, budget)?;
            let header = if g == Group::U1 { "k,dim_formula,dim_linear_algebra,match,dim_corrected" } else { "k,dim_formula,dim_linear_algebra,match" };
            let (rows, ok) = ring_dims_csv(&ctx, g, m, kmax, false)?;
            emit_raw(&format!("{header}\n{rows}"));
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Hecke(HeckeCmd::Local { q, r, pi, mu, exhaustive: _, budget }) => {
            if let Some(r) = r {
                if r != mu.len() {
                    return Err(Error::Invalid(format!("μ has {} entries, expected r = {r}", mu.len())));
                }
            }
            let f = gf_q(q)?;
            let rep = hecke::check_local(q, &hecke::parse_poly(&f, &pi)?, &mu, budget)?;
            emit(&(pretty(&rep.to_json())));
            if !rep.pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Hecke(HeckeCmd::Global { spec, budget }) => {
            let s = HeckeSpec::from_json(&read_json(&spec)?)?;
            let rep = hecke::global_identity_check(&s, budget)?;
            emit(&(pretty(&rep.to_json())));
            if !rep.pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Hecke(HeckeCmd::Rank2 { q, pi, k, prec }) => {
            let w = point(q, 2, Point::Standard)?;
            let pi = hecke::parse_poly(&gf_q(q)?, &pi)?;
            let rep = hecke::rank2_eigenvalue_check(&pi, k, &w, Exp::int(prec), &EvalConfig::default())?;
            emit(&(pretty(&rep.to_json())));
            if !rep.pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Dims(DimsArgs { q, r, kmax, group, m }) => {
            emit_raw(&dim_csv_rows(q, r, kmax, Group::parse(&group)?, m)?);
        }
        Cmd::Verify(a) => return verify(a),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

