//! `hermlab`: local densities, Whittaker functions, normalizing factors and
//! the verification suite from the command line.
//!
//! Exit codes: 0 success, 1 bad input or failed verification, 2 a
//! computational limit (budget, stabilization, degree cap) was reached.

mod input;
mod output;

use clap::{Args, Parser, Subcommand};
use hermlab_core::analytic::{lambda_factor, set_precision_digits, Real};
use hermlab_core::arith::{rat_to_f64, rat_to_string};
use hermlab_core::assembly::{
    corank1_unfold, finite_coefficient, functional_equation_sign, hecke_faltings, loglinear_decimal, rank1_flat_series,
    rat_decimal, sigma,
};
use hermlab_core::checks::{junit_json, run_suites, Suite};
use hermlab_core::density::{DensityConfig, DensityEngine};
use hermlab_core::density_poly::{default_max_degree, Interpolator};
use hermlab_core::field_data::{classify_prime, Discriminant, LocalQuadExt, Splitting};
use hermlab_core::Error;
use output::{render_report, Format, Table};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hermlab", version, about = "Hermitian local densities and Eisenstein series coefficients")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// working precision in decimal digits (at least 30)
    #[arg(long, global = true, default_value_t = 50)]
    precision: usize,
    /// largest level p^k used when counting (at least 2)
    #[arg(long, global = true, default_value_t = 4)]
    k_max: u32,
    /// cap on elementary enumeration steps
    #[arg(long, global = true, default_value_t = 1_000_000_000)]
    budget: u64,
    /// worker threads; defaults to all cores
    #[arg(long, global = true, env = "HERMLAB_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Clone)]
struct Local {
    /// residue characteristic
    #[arg(long)]
    p: Option<u64>,
    /// inert, split or ramified
    #[arg(long)]
    splitting: Option<String>,
    /// ramified models: π² = c·p
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    /// derive the local model at p from this discriminant
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Den(S,T), its interpolating polynomial and counting diagnostics
    Den {
        #[command(flatten)]
        local: Local,
        /// S as JSON or a path to a JSON file
        #[arg(long = "S", alias = "s-matrix")]
        s: String,
        /// T as JSON or a path to a JSON file
        #[arg(long = "T", alias = "t-matrix")]
        t: String,
        /// skip the polynomial Den(S,T,X)
        #[arg(long)]
        no_poly: bool,
        /// degree cap for the polynomial (default 2nm + v(det T))
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Run a verification suite and emit a JUnit-style report
    Verify {
        /// densities, analytic, groups, weil, assembly or all
        suite: String,
    },
    /// Tables of Hecke data, divisor sums or normalizing factors
    #[command(subcommand)]
    Table(TableKind),
    /// Finite part of the Fourier coefficient of a global Hermitian matrix
    Coeff {
        /// T as a rational symmetric matrix (JSON or a path)
        #[arg(long = "T", alias = "t-matrix")]
        t: String,
        /// fundamental discriminant of the imaginary quadratic field
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        /// rank of the ambient space
        #[arg(long)]
        n: usize,
        /// comma-separated points with 2s integral
        #[arg(long, allow_hyphen_values = true, default_value = "0,1/2,1")]
        s: String,
    },
    /// Corank-one unfolding of a singular coefficient with a rank-one flat series
    Unfold {
        /// rank of the ambient space
        #[arg(long)]
        n: u32,
        /// rank of the coefficient
        #[arg(long)]
        m: u32,
        /// fundamental discriminant of the imaginary quadratic field
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        /// |det a#|
        #[arg(long, default_value = "1")]
        a_sharp: String,
        /// index of the rank-one flat series j^{s+1/2}σ_{-2s}(j)
        #[arg(long, default_value_t = 1)]
        j: u64,
        /// comma-separated real points
        #[arg(long, allow_hyphen_values = true, default_value = "0.2,0.7")]
        s: String,
    },
    /// Degree and height delta of the j-th Hecke translate
    Hecke {
        /// an index j or an inclusive range a..b
        #[arg(long)]
        j: String,
    },
}

#[derive(Subcommand)]
enum TableKind {
    /// j, σ₁(j), height delta (decimal and exact)
    Hecke {
        /// an index j or an inclusive range a..b
        #[arg(long)]
        j: String,
    },
    /// j, σ_k(j)
    Sigma {
        /// an index j or an inclusive range a..b
        #[arg(long)]
        j: String,
        /// exponent of the divisor sum
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        k: i64,
    },
    /// Λ_m(s)°_n on a grid of s
    Lambda {
        /// rank of the ambient space
        #[arg(long)]
        n: u32,
        /// rank of the coefficient
        #[arg(long)]
        m: u32,
        /// fundamental discriminant of the imaginary quadratic field
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        /// comma-separated points
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        s: String,
    },
}

enum Failure {
    Input(String),
    Limit(String),
    /// a verification suite ran and reported failures; output already printed
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_computational_limit() {
            Failure::Limit(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Limit(m)) => {
            eprintln!("computational limit: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(1),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(out: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{out}");
}

fn run(cli: Cli) -> CmdResult {
    let g = &cli.global;
    if g.precision < 30 {
        return Err(Failure::Input(format!("--precision must be at least 30, got {}", g.precision)));
    }
    if g.k_max < 2 {
        return Err(Failure::Input(format!("--k-max must be at least 2, got {}", g.k_max)));
    }
    set_precision_digits(g.precision);
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(Failure::Input("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    let config = DensityConfig { k_max: g.k_max, budget: g.budget, ..DensityConfig::default() };
    match cli.command {
        Command::Den { local, s, t, no_poly, max_degree } => den(&config, &local, &s, &t, no_poly, max_degree, g.format),
        Command::Verify { suite } => verify(&suite, g.format),
        Command::Table(kind) => table(kind, g.format.unwrap_or(Format::Csv)),
        Command::Coeff { t, delta, n, s } => coeff(&config, &t, delta, n, &s, g.format),
        Command::Unfold { n, m, delta, a_sharp, j, s } => unfold(n, m, delta, &a_sharp, j, &s, g.format),
        Command::Hecke { j } => table(TableKind::Hecke { j }, g.format.unwrap_or(Format::Json)),
    }
}

fn local_ext(l: &Local) -> Result<Option<LocalQuadExt>, Error> {
    let Some(p) = l.p else {
        return match l.splitting {
            Some(_) => Err(Error::InvalidInput("--splitting needs --p".into())),
            None => Ok(None),
        };
    };
    if let Some(d) = l.delta {
        let e = classify_prime(Discriminant::new(d)?, p)?;
        if let Some(sp) = &l.splitting {
            if Splitting::parse(sp)? != e.splitting {
                return Err(Error::ContextMismatch(format!("{p} is {} for delta = {d}", e.splitting.name())));
            }
        }
        return Ok(Some(e));
    }
    let sp = Splitting::parse(l.splitting.as_deref().ok_or_else(|| Error::InvalidInput("--p needs --splitting or --delta".into()))?)?;
    Ok(Some(match (sp, l.c) {
        (Splitting::Ramified, Some(c)) => LocalQuadExt::ramified(p, c)?,
        _ => LocalQuadExt::new(p, sp)?,
    }))
}

fn den(
    config: &DensityConfig,
    local: &Local,
    s: &str,
    t: &str,
    no_poly: bool,
    max_degree: Option<usize>,
    format: Option<Format>,
) -> CmdResult {
    let ext = local_ext(local)?;
    let s = input::gram(s, ext)?;
    let t = input::gram(t, ext.or(Some(s.ext)))?;
    let engine = DensityEngine::new(config.clone());
    let d = engine.local_density(&s, &t)?;
    let mut report = json!({
        "context": s.ext.to_string(),
        "S": s.to_json(),
        "T": t.to_json(),
        "n": s.rank().to_string(),
        "m": t.rank().to_string(),
        "density": d.to_json(),
    });
    if !no_poly {
        let cap = max_degree.unwrap_or_else(|| default_max_degree(&s, &t));
        match Interpolator::new(&engine).interpolate(&s, &t, cap) {
            Ok(p) => report["polynomial"] = p.to_json(),
            Err(e) => {
                emit(&render_report(&report, format.unwrap_or(Format::Json)));
                return Err(e.into());
            }
        }
    }
    Ok(render_report(&report, format.unwrap_or(Format::Json)))
}

fn verify(suite: &str, format: Option<Format>) -> CmdResult {
    let suites = Suite::parse(suite)?;
    let results = run_suites(&suites);
    let ok = results.iter().flat_map(|(_, r)| r).all(|r| r.passed());
    let out = match format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&junit_json(&results)).expect("serializable"),
        f => {
            let mut t = Table::new(vec!["suite", "criterion", "result", "cases", "seconds", "title"]);
            for (s, reports) in &results {
                for r in reports {
                    t.rows.push(vec![
                        s.name().into(),
                        r.id.to_string(),
                        if r.passed() { "pass" } else { "FAIL" }.into(),
                        r.cases.len().to_string(),
                        format!("{:.2}", r.seconds),
                        r.title.into(),
                    ]);
                }
            }
            let mut out = t.render(f);
            for r in results.iter().flat_map(|(_, r)| r) {
                for c in r.failures() {
                    out.push_str(&format!("\nfailed: criterion {} {}: {} vs {}", r.id, c.name, c.lhs, c.rhs));
                }
            }
            out
        }
    };
    if ok {
        Ok(out)
    } else {
        emit(&out);
        for r in results.iter().flat_map(|(_, r)| r) {
            for c in r.failures() {
                eprintln!("criterion {} failed: {}: {} vs {}", r.id, c.name, c.lhs, c.rhs);
            }
        }
        Err(Failure::Verification)
    }
}

fn table(kind: TableKind, format: Format) -> CmdResult {
    let t = match kind {
        TableKind::Hecke { j } => {
            let mut t = Table::new(vec!["j", "sigma1", "height_delta", "height_delta_exact"]);
            for j in input::range(&j)? {
                if j == 0 {
                    return Err(Failure::Input("j must be positive".into()));
                }
                let (deg, h) = hecke_faltings(j);
                t.rows.push(vec![j.to_string(), deg.to_string(), loglinear_decimal(&h), h.to_string()]);
            }
            t
        }
        TableKind::Sigma { j, k } => {
            let mut t = Table::new(vec!["j", "sigma", "sigma_decimal"]);
            for j in input::range(&j)? {
                if j == 0 {
                    return Err(Failure::Input("j must be positive".into()));
                }
                let v = sigma(k, j);
                let exact = if v.is_integer() { v.to_integer().to_string() } else { rat_to_string(&v) };
                t.rows.push(vec![j.to_string(), exact, rat_decimal(&v)]);
            }
            t
        }
        TableKind::Lambda { n, m, delta, s } => {
            let d = Discriminant::new(delta)?;
            let mut t = Table::new(vec!["n", "m", "delta", "s", "re", "im", "err"]);
            for s in input::rationals(&s)? {
                let v = lambda_factor(m, n, &Real::from_rat(&s), d)?;
                t.rows.push(vec![
                    n.to_string(),
                    m.to_string(),
                    delta.to_string(),
                    rat_to_string(&s),
                    v.re.to_decimal(20),
                    v.im.to_decimal(20),
                    format!("{:.3e}", v.err),
                ]);
            }
            t
        }
    };
    Ok(t.render(format))
}

fn coeff(config: &DensityConfig, t: &str, delta: i64, n: usize, s: &str, format: Option<Format>) -> CmdResult {
    let t = input::global_gram(t)?;
    let d = Discriminant::new(delta)?;
    let points = input::rationals(s)?;
    let engine = DensityEngine::new(config.clone());
    let series = finite_coefficient(&engine, &t, d, n)?;
    let values: Vec<Value> = points
        .iter()
        .map(|s| {
            let exact = series.eval(s)?;
            Ok(json!({
                "s": rat_to_string(s),
                "exact": exact.to_string(),
                "decimal": format!("{:.12}", series.eval_f64(rat_to_f64(s))),
            }))
        })
        .collect::<Result<_, Error>>()?;
    let mut report = series.to_json();
    report["det_T"] = json!(rat_to_string(&t.det()));
    report["values"] = Value::Array(values);
    Ok(render_report(&report, format.unwrap_or(Format::Json)))
}

fn unfold(n: u32, m: u32, delta: i64, a_sharp: &str, j: u64, s: &str, format: Option<Format>) -> CmdResult {
    let d = Discriminant::new(delta)?;
    let a = Real::from_rat(&input::rational(a_sharp)?);
    if j == 0 {
        return Err(Failure::Input("j must be positive".into()));
    }
    let sign = functional_equation_sign(n as i64, m as i64);
    let mut t = Table::new(vec!["s", "value_re", "value_im", "err", "mirror_re", "sign"]);
    for s in input::rationals(s)? {
        let sr = Real::from_rat(&s);
        let v = corank1_unfold(n, m, d, &a, rank1_flat_series(j), &sr)?;
        let w = corank1_unfold(n, m, d, &a, rank1_flat_series(j), &-&sr)?;
        t.rows.push(vec![
            rat_to_string(&s),
            v.re.to_decimal(20),
            v.im.to_decimal(20),
            format!("{:.3e}", v.err.max(w.err)),
            w.re.to_decimal(20),
            sign.to_string(),
        ]);
    }
    Ok(t.render(format.unwrap_or(Format::Json)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse() {
        let c = Cli::try_parse_from(["hermlab", "den", "--p", "3", "--splitting", "inert", "--S", "[[1]]", "--T", "[[1]]"]);
        assert!(c.is_ok());
        let c = Cli::try_parse_from(["hermlab", "table", "lambda", "--n", "2", "--m", "2", "--delta", "-7", "--s", "0"]);
        assert!(c.is_ok());
        assert!(Cli::try_parse_from(["hermlab", "table", "nope"]).is_err());
    }
}
