use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rispace::harness::{run_suite, summing_ratio, SuiteParams};
use rispace::mixed2d::{materialize, mixed_norm, tk_lower_bound, KnAnalytic, KnParams, StepFn2d};
use rispace::rademacher::head_estimate_profile;
use rispace::signselect::{select_signs, PipelineConfig, SearchConfig};
use rispace::{Error, SeqVec, SpaceSpec, StepFn};

/// Exit status for a failed certification or suite check.
const EXIT_CHECK_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "rispace", version, about = "Norms, sign selection and counterexamples for r.i. spaces on step functions")]
struct Cli {
    /// Base seed for randomized searches and suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of suite trials (suite default when omitted).
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,
    /// Significant digits for printed numbers (full precision when omitted).
    #[arg(long, global = true)]
    precision: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum KnMode {
    Analytic,
    Materialized,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a step function, or of a sequence for `lq`/`lqw` spaces.
    Norm {
        #[arg(long)]
        space: SpaceSpec,
        /// Step function (or sequence) as JSON, inline or a file path.
        #[arg(long)]
        input: String,
    },
    /// Decreasing rearrangement of a step function.
    Rearrange {
        #[arg(long)]
        input: String,
    },
    /// Both sides of the Rademacher head-integral equivalence.
    RadEquiv {
        /// Coefficients as a JSON array, inline or a file path.
        #[arg(long)]
        coeffs: String,
        /// Dyadic level(s) `i`; defaults to `1..=n`.
        #[arg(long = "i")]
        levels: Vec<usize>,
    },
    /// Certified sign selection for the head integral at level `i`.
    SelectSigns {
        /// JSON array of step functions, inline or a file path.
        #[arg(long)]
        funcs: String,
        #[arg(long = "i")]
        level: usize,
    },
    /// Column and row norms of the transposition counterexample.
    Counterexample {
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = KnMode::Analytic)]
        mode: KnMode,
    },
    /// Mixed norm of a 2D step function: `--space OUTER --space INNER`.
    MixedNorm {
        #[arg(long)]
        input: String,
        #[arg(long = "space", num_args = 1, required = true)]
        spaces: Vec<SpaceSpec>,
    },
    /// Summing ratio `‖(‖f_k‖_target)‖_seq / max_ε ‖Σ ε_k f_k‖_domain`.
    Summing {
        #[arg(long)]
        funcs: String,
        #[arg(long)]
        seq: SpaceSpec,
        #[arg(long)]
        target: SpaceSpec,
        #[arg(long)]
        domain: SpaceSpec,
    },
    /// Run a seeded experiment suite.
    Suite {
        /// One of rademacher-head, sign-selection, rademacher-domination,
        /// weak-summing, concavity, xp-summing, indicators, transpose-exp,
        /// counterexample.
        id: String,
        /// Parameter overrides as a JSON object, inline or a file path.
        #[arg(long)]
        params: Option<String>,
    },
}

/// Inline JSON when the argument starts like JSON, otherwise a file path.
fn json_arg(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {arg}"))
    }
}

fn parse_arg<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    serde_json::from_str(&json_arg(arg)?).with_context(|| format!("parsing {what}"))
}

fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x, digits));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_value(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_value(x, digits)),
        _ => {}
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(_) | Value::Bool(_) | Value::Null => v.to_string(),
        other => format!("\"{}\"", other.to_string().replace('"', "\"\"")),
    }
}

/// Objects become a header row and one value row; arrays of objects one row each.
fn to_csv(v: &Value) -> String {
    let rows: Vec<&serde_json::Map<String, Value>> = match v {
        Value::Object(o) => vec![o],
        Value::Array(a) => a.iter().filter_map(Value::as_object).collect(),
        _ => return format!("{}\n", csv_cell(v)),
    };
    let Some(first) = rows.first() else {
        return String::new();
    };
    let keys: Vec<&String> = first.keys().collect();
    let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = keys.iter().map(|k| r.get(*k).map_or(String::new(), csv_cell)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn emit<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let Some(d) = cli.precision {
        round_value(&mut v, d);
    }
    let text = match cli.out {
        OutFormat::Json => format!("{}\n", serde_json::to_string_pretty(&v)?),
        OutFormat::Csv => to_csv(&v),
    };
    write_out(&text)
}

fn write_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Runs the command; `Ok(false)` means a check failed after output was written.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Norm { space, input } => {
            let norm = if space.is_sequence_space() {
                space.seq_norm(&parse_arg::<SeqVec>(input, "sequence")?)?
            } else {
                space.norm(&parse_arg::<StepFn>(input, "step function")?)?
            };
            emit(cli, &json!({ "space": space.to_string(), "norm": norm }))?;
        }
        Command::Rearrange { input } => {
            emit(cli, &parse_arg::<StepFn>(input, "step function")?.rearrange())?;
        }
        Command::RadEquiv { coeffs, levels } => {
            let a: SeqVec = parse_arg(coeffs, "coefficients")?;
            let levels = if levels.is_empty() {
                (1..=a.len()).collect()
            } else {
                levels.clone()
            };
            emit(cli, &head_estimate_profile(&a, &levels)?)?;
        }
        Command::SelectSigns { funcs, level } => {
            let g: Vec<StepFn> = parse_arg(funcs, "functions")?;
            let config = PipelineConfig {
                search: SearchConfig {
                    seed: cli.seed,
                    ..SearchConfig::default()
                },
                ..PipelineConfig::default()
            };
            let (eps, certificate) = select_signs(&g, *level, &config)?;
            emit(cli, &json!({ "eps": eps, "certificate": certificate }))?;
        }
        Command::Counterexample { p, n, mode } => {
            let params = KnParams::new(*n, *p)?;
            let b = tk_lower_bound(&params)?;
            let (col_norm, sup_norm) = match mode {
                KnMode::Analytic => {
                    let an = KnAnalytic::new(params);
                    (an.column_norm(), an.sup_row_norm().0)
                }
                KnMode::Materialized => {
                    let kn = materialize(&params)?;
                    let xp = SpaceSpec::xp(*p);
                    (
                        mixed_norm(&kn.transpose(), &SpaceSpec::lp(1.0), &xp)?,
                        mixed_norm(&kn, &SpaceSpec::Linf, &xp)?,
                    )
                }
            };
            let sup_ok = sup_norm <= 1.0 + 1e-12;
            emit(
                cli,
                &json!({
                    "n": n,
                    "p": p,
                    "col_norm": col_norm,
                    "col_norm_p": b.exact_col_norm_p,
                    "bound": b.bound,
                    "sup_norm": sup_norm,
                    "sup_norm_check": sup_ok,
                }),
            )?;
            return Ok(sup_ok);
        }
        Command::MixedNorm { input, spaces } => {
            let [outer, inner] = spaces.as_slice() else {
                bail!("mixed-norm takes exactly two --space flags (outer, then inner)");
            };
            let f: StepFn2d = parse_arg(input, "2D step function")?;
            let norm = mixed_norm(&f, outer, inner)?;
            emit(
                cli,
                &json!({ "space": SpaceSpec::mixed(outer.clone(), inner.clone()).to_string(), "norm": norm }),
            )?;
        }
        Command::Summing { funcs, seq, target, domain } => {
            let f: Vec<StepFn> = parse_arg(funcs, "functions")?;
            emit(cli, &summing_ratio(&f, seq, target, domain)?)?;
        }
        Command::Suite { id, params } => {
            let mut p = SuiteParams::for_suite(id)?;
            if let Some(raw) = params {
                let mut base = serde_json::to_value(&p)?;
                let over: Value = parse_arg(raw, "suite parameters")?;
                let Value::Object(over) = over else {
                    bail!("suite parameters must be a JSON object");
                };
                for (k, v) in over {
                    base[k] = v;
                }
                p = serde_json::from_value(base).context("suite parameters")?;
            }
            if let Some(t) = cli.trials {
                p.trials = t;
            }
            let report = run_suite(id, cli.seed, &p)?;
            match cli.out {
                OutFormat::Json => emit(cli, &report)?,
                OutFormat::Csv => write_out(&report.to_csv(cli.precision.unwrap_or(17)))?,
            }
            return Ok(report.all_ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e)
            if e
                .downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let failed_check = matches!(
                e.downcast_ref::<Error>(),
                Some(Error::CertificationFailed(_) | Error::SearchFailed(_))
            );
            ExitCode::from(if failed_check { EXIT_CHECK_FAILED } else { 1 })
        }
    }
}
