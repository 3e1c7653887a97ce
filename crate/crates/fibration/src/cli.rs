//! The `fibration` command line.
//!
//! Every result is a block of `key: value` lines closed by `---`; with
//! `--machine` the same fields go on one tab-separated `key=value` line.
//!
//! Exit codes: `0` success, `2` invalid input (parse or validation), `3`
//! precision or recovery failure, `4` engine/oracle mismatch, `1` anything
//! else.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{parse_curve, random_family, validate, weighted_params, SplitMix64, WeierstrassFamily};
use crate::gauss_manin::{beta_height, connection_matrix, format_zpoly, residue_at_infinity, residue_nilpotency_check};
use crate::lattice::{expected_dimension, lattice_basis};
use crate::oracle::oracle_lfunction;
use crate::pipeline::{check_family, compute_lfunction, LFunctionRun, RunOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "fibration", version, about = "L-functions of elliptic curves over F_p(y) by the fibration method")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit single-line `key=value` records.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Seed for random curve generation.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute L(T), the sign and the analytic rank of one curve.
    Lfunction(CurveArgs),
    /// As `lfunction --verify`: compare the engine with the point-counting oracle.
    Verify(CurveArgs),
    /// Rank distribution of random curves.
    Survey(SurveyArgs),
    /// The monomial basis S(k) of the lattice.
    LatticeInfo(CurveArgs),
    /// The Gauss-Manin connection matrix B = β/Δ.
    GmInfo(CurveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Curve file (`p`, `a`, `b` lines); `-` reads standard input.
    pub curve: PathBuf,
    #[arg(long)]
    pub precision_override: Option<i64>,
    #[arg(long)]
    pub k_override: Option<usize>,
    /// Also run the oracle and print MATCH or MISMATCH.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub check_ambient_smooth: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SurveyArgs {
    #[arg(long, default_value_t = 7)]
    pub p: u64,
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Write the per-curve records here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub precision_override: Option<i64>,
    #[arg(long)]
    pub k_override: Option<usize>,
    /// Also cross-check every curve with the oracle.
    #[arg(long)]
    pub verify: bool,
    /// Sample only curves whose surface z^d = x^d + a x^(d/3) + b is smooth.
    #[arg(long)]
    pub check_ambient_smooth: bool,
}

/// An ordered list of fields.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record(pub Vec<(String, String)>);

impl Record {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, machine: bool) -> String {
        if machine {
            let fields: Vec<String> = self.0.iter().map(|(k, v)| format!("{}={}", k.replace(' ', "_"), v)).collect();
            format!("{}\n", fields.join("\t"))
        } else {
            let mut s: String = self.0.iter().map(|(k, v)| format!("{k}: {v}\n")).collect();
            s.push_str("---\n");
            s
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidFamily(_)
        | Error::Parse { .. }
        | Error::BadPrime(_)
        | Error::DegreeConditionViolated(_)
        | Error::InvalidParameters(_)
        | Error::Io(_) => EXIT_VALIDATION,
        Error::InsufficientPrecision(_)
        | Error::PrecisionUnderflow(_)
        | Error::NoConsistentSign
        | Error::WeilBoundViolation(_)
        | Error::RootModulusFailure(_)
        | Error::SignAmbiguity
        | Error::NoStabilization(_) => EXIT_PRECISION,
        _ => EXIT_INTERNAL,
    }
}

fn status_of(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_VALIDATION => "validation-failure",
        EXIT_PRECISION => "precision-failure",
        EXIT_MISMATCH => "mismatch",
        _ => "error",
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn curve_fields(rec: &mut Record, f: &WeierstrassFamily) {
    rec.push("p", f.p());
    rec.push("d", f.d());
    rec.push("a", join(&f.lifted_a()));
    rec.push("b", join(&f.lifted_b()));
}

fn run_fields(rec: &mut Record, run: &LFunctionRun, p: u64, e: usize) {
    rec.push("degree", run.l.degree());
    rec.push("coefficients", join(&run.l.coeffs));
    rec.push("epsilon", run.l.epsilon);
    rec.push("analytic rank", run.l.analytic_rank);
    rec.push("precision planned", run.n_planned);
    rec.push("precision delivered", run.n_delivered);
    rec.push("precision effective", run.n_effective);
    rec.push("basis change valuation", run.basis_change_valuation);
    rec.push("k", run.k);
    let precs: Vec<String> = run
        .l_low
        .iter()
        .enumerate()
        .skip(1)
        .map(|(l, c)| format!("a{l}:{}", c.precision))
        .collect();
    rec.push("coefficient precision", precs.join(","));
    rec.push("pole order at delta", run.pole_order);
    rec.push("pole order at infinity", run.pole_at_infinity);
    rec.push("pole bound (p+1)e", run.pole_bound);
    rec.push("pole within bound", run.pole_within_bound());
    if p == 7 {
        rec.push("pole equals 6e", run.pole_at_infinity == 6 * e as i64);
    }
    rec.push("elapsed ms", run.elapsed.as_millis());
}

/// One curve, as a record and an exit code.
pub fn cmd_lfunction(f: &WeierstrassFamily, opts: &RunOptions, verify: bool) -> (Record, i32) {
    let mut rec = Record::default();
    curve_fields(&mut rec, f);
    let code = match compute_lfunction(f, opts) {
        Ok(run) => {
            run_fields(&mut rec, &run, f.p(), f.e());
            if verify {
                match oracle_lfunction(f) {
                    Ok(l) if l == run.l => {
                        rec.push("oracle", "MATCH");
                        EXIT_OK
                    }
                    Ok(l) => {
                        rec.push("oracle", "MISMATCH");
                        rec.push("oracle coefficients", join(&l.coeffs));
                        EXIT_MISMATCH
                    }
                    Err(e) => {
                        rec.push("oracle", "MISMATCH");
                        rec.push("oracle error", e);
                        EXIT_MISMATCH
                    }
                }
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            rec.push("error", &e);
            exit_code(&e)
        }
    };
    rec.push("status", status_of(code));
    (rec, code)
}

/// Survey parameters.
#[derive(Clone, Debug)]
pub struct SurveyConfig {
    pub p: u64,
    pub d: usize,
    pub count: usize,
    pub seed: u64,
    pub parallelism: Option<usize>,
    pub output: Option<PathBuf>,
    pub check_ambient_smooth: bool,
    pub options: RunOptions,
    pub verify: bool,
}

impl SurveyConfig {
    pub fn new(p: u64, d: usize, count: usize, seed: u64) -> Self {
        SurveyConfig {
            p,
            d,
            count,
            seed,
            parallelism: None,
            output: None,
            check_ambient_smooth: false,
            options: RunOptions::default(),
            verify: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameters("survey count must be at least 1".into()));
        }
        if self.d == 0 || !self.d.is_multiple_of(6) {
            return Err(Error::InvalidParameters(format!("d = {} is not a positive multiple of 6", self.d)));
        }
        if self.parallelism == Some(0) {
            return Err(Error::InvalidParameters("--jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Rank counts `0, 1, 2, 3, 4, >4` and the per-curve records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveyTable {
    pub p: u64,
    pub d: usize,
    pub counts: [usize; 6],
    pub failures: usize,
    pub mismatches: usize,
    pub records: Vec<Record>,
}

impl SurveyTable {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Fraction of successfully computed curves with analytic rank ≥ 1.
    pub fn positive_rank_fraction(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            (t - self.counts[0]) as f64 / t as f64
        }
    }

    pub fn summary(&self) -> Record {
        let mut rec = Record::default();
        rec.push("p", self.p);
        rec.push("d", self.d);
        rec.push("curves", self.records.len());
        for (r, c) in self.counts.iter().enumerate() {
            let label = if r == 5 { "analytic rank >4".to_string() } else { format!("analytic rank {r}") };
            rec.push(&label, c);
        }
        rec.push("failures", self.failures);
        rec.push("mismatches", self.mismatches);
        rec.push("rank>=1 fraction", format!("{:.3}", self.positive_rank_fraction()));
        rec
    }
}

/// The curve with survey index `i`: seeds come from one SplitMix64 stream,
/// redrawn when the ambient surface is required smooth and is not.
pub fn survey_curve(cfg: &SurveyConfig, seed: u64) -> Result<WeierstrassFamily> {
    let mut rng = SplitMix64::new(seed);
    for _ in 0..1000 {
        let f = random_family(cfg.p, cfg.d, rng.next_u64())?;
        if !cfg.check_ambient_smooth || validate(&f, true).ambient_smooth == Some(true) {
            return Ok(f);
        }
    }
    Err(Error::RejectionExhausted(1000))
}

pub fn cmd_survey(cfg: &SurveyConfig) -> Result<SurveyTable> {
    cfg.validate()?;
    let mut master = SplitMix64::new(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.count).map(|_| master.next_u64()).collect();
    let job = |&seed: &u64| -> (Record, i32) {
        match survey_curve(cfg, seed) {
            Ok(f) => cmd_lfunction(&f, &cfg.options, cfg.verify),
            Err(e) => {
                let mut rec = Record::default();
                rec.push("error", &e);
                rec.push("status", status_of(exit_code(&e)));
                (rec, exit_code(&e))
            }
        }
    };
    // collect() keeps index order regardless of completion order
    let results: Vec<(Record, i32)> = in_pool(cfg.parallelism, || seeds.par_iter().map(job).collect())?;
    let mut table = SurveyTable { p: cfg.p, d: cfg.d, counts: [0; 6], failures: 0, mismatches: 0, records: Vec::new() };
    for (i, (mut rec, code)) in results.into_iter().enumerate() {
        rec.0.insert(0, ("index".into(), i.to_string()));
        match code {
            EXIT_OK => {
                let r: usize = rec.get("analytic rank").and_then(|v| v.parse().ok()).unwrap_or(0);
                table.counts[r.min(5)] += 1;
            }
            EXIT_MISMATCH => table.mismatches += 1,
            _ => table.failures += 1,
        }
        table.records.push(rec);
    }
    if let Some(path) = &cfg.output {
        let text: String = table.records.iter().map(|r| r.render(false)).collect();
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(table)
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn read_curve(path: &PathBuf) -> Result<WeierstrassFamily> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Io(e.to_string()))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
    };
    parse_curve(&text)
}

fn lattice_info(f: &WeierstrassFamily, k_override: Option<usize>) -> Result<Record> {
    let w = weighted_params(f);
    let k = k_override.unwrap_or(w.k_lattice);
    let basis = lattice_basis(f, k)?;
    let mut rec = Record::default();
    curve_fields(&mut rec, f);
    rec.push("weights (x,y,z)", format!("{},{},{}", w.w_x, w.w_y, w.w_z));
    rec.push("k", k);
    rec.push("basis size", basis.len());
    rec.push("expected dimension", expected_dimension(f.d()));
    rec.push("cokernel exponent", basis.coker_exponent);
    let monos: Vec<String> = basis.monomials.iter().map(|m| format!("x^{}y^{}", m.i, m.j)).collect();
    rec.push("basis", monos.join(","));
    Ok(rec)
}

fn gm_info(f: &WeierstrassFamily) -> Result<Record> {
    let c = connection_matrix(f);
    let mut rec = Record::default();
    curve_fields(&mut rec, f);
    rec.push("delta", format_zpoly(&c.delta));
    for (name, e) in ["2beta11", "2beta12", "2beta21", "2beta22"].iter().zip(&c.beta2) {
        rec.push(name, format_zpoly(e));
    }
    rec.push("trace beta", format_zpoly(&c.trace2()));
    rec.push("det 2beta", format_zpoly(&c.det2()));
    rec.push("beta height", beta_height(&c));
    rec.push("residues nilpotent mod delta", residue_nilpotency_check(&c));
    let r = residue_at_infinity(f)?;
    rec.push("residue at infinity eigenvalues", format!("{},{}", r.eigenvalues.0, r.eigenvalues.1));
    Ok(rec)
}

fn curve_options(a: &CurveArgs) -> RunOptions {
    RunOptions { precision_override: a.precision_override, k_override: a.k_override, check_ambient_smooth: a.check_ambient_smooth }
}

fn curve_command(a: &CurveArgs, verify: bool, jobs: Option<usize>, machine: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let f = match read_curve(&a.curve) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let opts = curve_options(a);
    let (rec, code) = match in_pool(jobs, || cmd_lfunction(&f, &opts, verify)) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let _ = out.write_all(rec.render(machine).as_bytes());
    if let Some(msg) = rec.get("error") {
        let _ = writeln!(err, "error: {msg}");
    }
    code
}

/// Runs a parsed command line, writing records to `out` and diagnostics to
/// `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let machine = cli.machine;
    let emit = |out: &mut dyn Write, rec: &Record| {
        let _ = out.write_all(rec.render(machine).as_bytes());
    };
    let fail = |err: &mut dyn Write, e: &Error| -> i32 {
        let _ = writeln!(err, "error: {e}");
        exit_code(e)
    };
    match cli.command {
        Command::Lfunction(a) => curve_command(&a, a.verify, cli.jobs, machine, out, err),
        Command::Verify(a) => curve_command(&a, true, cli.jobs, machine, out, err),
        Command::Survey(s) => {
            let cfg = SurveyConfig {
                p: s.p,
                d: s.d,
                count: s.count,
                seed: cli.seed,
                parallelism: cli.jobs,
                output: s.output,
                check_ambient_smooth: s.check_ambient_smooth,
                options: RunOptions { precision_override: s.precision_override, k_override: s.k_override, check_ambient_smooth: false },
                verify: s.verify,
            };
            match cmd_survey(&cfg) {
                Ok(t) => {
                    emit(out, &t.summary());
                    if t.mismatches > 0 {
                        EXIT_MISMATCH
                    } else {
                        EXIT_OK
                    }
                }
                Err(e) => fail(err, &e),
            }
        }
        Command::LatticeInfo(a) => {
            let r = read_curve(&a.curve).and_then(|f| {
                check_family(&f, a.check_ambient_smooth)?;
                lattice_info(&f, a.k_override)
            });
            match r {
                Ok(rec) => {
                    emit(out, &rec);
                    EXIT_OK
                }
                Err(e) => fail(err, &e),
            }
        }
        Command::GmInfo(a) => {
            let r = read_curve(&a.curve).and_then(|f| {
                check_family(&f, a.check_ambient_smooth)?;
                gm_info(&f)
            });
            match r {
                Ok(rec) => {
                    emit(out, &rec);
                    EXIT_OK
                }
                Err(e) => fail(err, &e),
            }
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
