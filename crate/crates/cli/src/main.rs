//! `wdc`: exact digit-class representation counts, correlation sums, and
//! exponential-sum reports from the command line.
//!
//! Exit codes: 0 success, 1 invariant failure (with a machine-readable
//! failure record on stdout), 2 usage error, 3 resource limit.

mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use wdc_core::correlation;
use wdc_core::counting::{self, Pattern};
use wdc_core::digits;
use wdc_core::expsums;
use wdc_core::report::{to_csv, Envelope, FareyCsvRow};
use wdc_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVARIANT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Quick,
    Full,
}

/// Reproducible run configuration: the seed fully determines every
/// randomized probe set.
#[derive(Debug, Parser)]
#[command(name = "wdc", version, about)]
struct RunConfig {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "WDC_THREADS")]
    threads: Option<usize>,

    /// Seed for randomized probe selection.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Output format for data reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Correlation sums: one (X, h) pair with its coefficient trace, or the
    /// per-h audit over 1..=H.
    Corr {
        #[arg(long = "X")]
        x: u64,
        /// Audit bound: report every shift 1..=H.
        #[arg(long = "H")]
        h_max: Option<u64>,
        /// Single shift to evaluate (with recursion trace).
        #[arg(long)]
        h: Option<u64>,
    },
    /// Exact block identity: sum of (3/4)^kappa12 over a full base-4 block.
    Identity {
        #[arg(long)]
        t: u32,
    },
    /// Even moment (--s) or mixed moment (--l with --m) of the power sums.
    Moments {
        #[arg(long = "P")]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Representation count of N as k n-th powers, optionally class-restricted.
    Count {
        #[arg(long = "N")]
        n_value: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Class labels, one 0/1 per slot; omit for unrestricted.
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Window report of restricted vs unrestricted counts.
    Ratio {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Scan |W(a/q)|/P over reduced fractions with q <= q-max.
    Weylscan {
        #[arg(long = "P")]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long = "q-max")]
        q_max: u64,
    },
    /// Run the invariant suite and write deterministic reports.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Directory for the report files.
        #[arg(long = "out-dir", default_value = "reports")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Some(threads) = config.threads {
        if threads > 0 {
            // ignore failure: the pool may already exist in tests
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    match run(&config) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code_for(&e);
            let record = json!({
                "failure": {
                    "operation": "run",
                    "detail": e.to_string(),
                    "exit": code,
                }
            });
            println!("{record}");
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. }
        | Error::PowerOverflow { .. }
        | Error::CoefficientOverflow { .. } => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            if content.ends_with('\n') {
                print!("{content}");
            } else {
                println!("{content}");
            }
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, kind: &str, data: T) -> Result<(), Error> {
    emit(out, &Envelope::new(kind, data).to_json()?)
}

fn run(config: &RunConfig) -> Result<u8, Error> {
    match &config.command {
        Command::Corr { x, h_max, h } => run_corr(config, *x, *h_max, *h),
        Command::Identity { t } => run_identity(config, *t),
        Command::Moments { p, n, s, l, m } => run_moments(config, *p, *n, *s, *l, *m),
        Command::Count {
            n_value,
            n,
            k,
            pattern,
        } => run_count(config, *n_value, *n, *k, pattern.as_deref()),
        Command::Ratio { n, k, from, to } => run_ratio(config, *n, *k, *from, *to),
        Command::Weylscan { p, n, q_max } => run_weylscan(config, *p, *n, *q_max),
        Command::Verify { level, out_dir } => {
            let all_passed = verify::run(*level == Level::Full, config.seed, out_dir)?;
            Ok(if all_passed { EXIT_OK } else { EXIT_INVARIANT })
        }
    }
}

fn run_corr(config: &RunConfig, x: u64, h_max: Option<u64>, h: Option<u64>) -> Result<u8, Error> {
    match (h, h_max) {
        (Some(h), _) => {
            let value = correlation::corr_direct(x, h)?;
            let trace = if h >= 1 {
                Some(correlation::coefficient_trace_with_residuals(x, h)?.to_report())
            } else {
                None
            };
            #[derive(Serialize)]
            struct CorrSingle {
                value: correlation::CorrelationValue,
                trace: Option<correlation::TraceReport>,
            }
            // residual contract is MUST-level when inside the audited regime
            if let Some(t) = &trace {
                let bad = t
                    .levels
                    .iter()
                    .any(|lv| lv.theta.map_or(false, |v| v.abs() > 1.0) && x.is_power_of_two());
                if bad {
                    emit(
                        &config.out,
                        &failure_record("recursion_step_check", json!({"X": x, "h": h})),
                    )?;
                    return Ok(EXIT_INVARIANT);
                }
            }
            emit_json(&config.out, "correlation", CorrSingle { value, trace })?;
            Ok(EXIT_OK)
        }
        (None, Some(h_max)) => {
            let audit = correlation::bound_audit(x, h_max)?;
            match config.format {
                Format::Csv => emit(&config.out, &to_csv(&audit.rows)?)?,
                Format::Json => emit_json(&config.out, "bound_audit", &audit)?,
            }
            Ok(EXIT_OK)
        }
        (None, None) => Err(Error::EmptyRange),
    }
}

fn run_identity(config: &RunConfig, t: u32) -> Result<u8, Error> {
    let sum = digits::identity_sum(t)?;
    let expected = digits::seven_halves_pow(t);
    let pass = sum == expected;
    #[derive(Serialize)]
    struct IdentityOutcome {
        t: u32,
        sum: String,
        expected: String,
        pass: bool,
    }
    let payload = IdentityOutcome {
        t,
        sum: format!("{}/{}", sum.numer(), sum.denom()),
        expected: format!("{}/{}", expected.numer(), expected.denom()),
        pass,
    };
    match config.format {
        Format::Json => emit(
            &config.out,
            &serde_json::to_string(&payload).expect("plain struct"),
        )?,
        Format::Csv => emit(
            &config.out,
            &format!(
                "t,sum,expected,pass\n{},{}/{},{}/{},{}\n",
                t,
                sum.numer(),
                sum.denom(),
                expected.numer(),
                expected.denom(),
                pass
            ),
        )?,
    }
    if pass {
        Ok(EXIT_OK)
    } else {
        println!("{}", failure_record("identity_sum", json!({ "t": t })));
        Ok(EXIT_INVARIANT)
    }
}

fn run_moments(
    config: &RunConfig,
    p: u64,
    n: u32,
    s: Option<u32>,
    l: Option<u32>,
    m: Option<u32>,
) -> Result<u8, Error> {
    let report = match (s, l, m) {
        (Some(s), None, None) => counting::moment_s(p, n, s)?,
        (None, Some(l), Some(m)) => counting::mixed_moment(p, n, l, m)?,
        _ => return Err(Error::EmptyRange),
    };
    // mixed moments must stay under the plain moment of the same order
    if let counting::MomentExponent::Mixed { l, m } = report.exponent {
        let plain = counting::moment_s(p, n, l + m)?;
        if report.value > plain.value {
            emit(
                &config.out,
                &failure_record(
                    "mixed_moment_domination",
                    json!({"P": p, "n": n, "l": l, "m": m}),
                ),
            )?;
            return Ok(EXIT_INVARIANT);
        }
    }
    match config.format {
        Format::Json => emit_json(&config.out, "moment_report", &report)?,
        Format::Csv => {
            let exp = match report.exponent {
                counting::MomentExponent::Even { s } => format!("2s={}", 2 * s),
                counting::MomentExponent::Mixed { l, m } => format!("(2l,2m)=({},{})", 2 * l, 2 * m),
            };
            emit(
                &config.out,
                &format!(
                    "P,n,exponent,value,reference_bound\n{},{},{},{},{}\n",
                    report.p,
                    report.n,
                    exp,
                    report.value,
                    wdc_core::report::fmt_real(report.reference_bound)
                ),
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn run_count(
    config: &RunConfig,
    n_value: u64,
    n: u32,
    k: u32,
    pattern: Option<&str>,
) -> Result<u8, Error> {
    let pattern = match pattern {
        None => Pattern::Unrestricted,
        Some(s) => Pattern::parse(s)?,
    };
    let result = counting::count_representations(n_value, n, k, &pattern)?;
    match config.format {
        Format::Json => emit_json(&config.out, "rep_count", &result)?,
        Format::Csv => emit(
            &config.out,
            &format!(
                "N,n,k,pattern,count\n{},{},{},{},{}\n",
                result.n_value, result.n, result.k, result.pattern, result.count
            ),
        )?,
    }
    Ok(EXIT_OK)
}

fn run_ratio(config: &RunConfig, n: u32, k: u32, from: u64, to: u64) -> Result<u8, Error> {
    let report = counting::theorem_ratio_report(n, k, from, to)?;
    match config.format {
        Format::Csv => {
            let mut out = String::from("N,I,J,ratio\n");
            for row in &report.rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row.n_value,
                    row.restricted,
                    row.unrestricted,
                    row.ratio
                        .map(wdc_core::report::fmt_real)
                        .unwrap_or_default()
                ));
            }
            emit(&config.out, &out)?;
        }
        Format::Json => emit_json(&config.out, "ratio_report", &report)?,
    }
    Ok(EXIT_OK)
}

fn run_weylscan(config: &RunConfig, p: u64, n: u32, q_max: u64) -> Result<u8, Error> {
    let started = std::time::Instant::now();
    let scan = expsums::sup_scan(p, n, q_max)?;
    let wall = started.elapsed().as_secs_f64();
    match config.format {
        Format::Csv => {
            let rows: Vec<FareyCsvRow> = scan
                .rows
                .iter()
                .map(|&row| FareyCsvRow { row, p, n })
                .collect();
            emit(&config.out, &to_csv(&rows)?)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct ScanReport {
                scan: expsums::SupScan,
                wall_time_seconds: f64,
            }
            emit_json(&config.out, "sup_scan", ScanReport { scan, wall_time_seconds: wall })?;
        }
    }
    Ok(EXIT_OK)
}

fn failure_record(operation: &str, inputs: serde_json::Value) -> String {
    json!({
        "failure": {
            "operation": operation,
            "inputs": inputs,
        }
    })
    .to_string()
}
