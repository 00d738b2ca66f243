use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use quench_core::experiments::{
    detect_crossover, figure_preset, sample_curve, shift_time, FigureId, Scenario, TimeGrid,
};
use quench_core::io::{run_validation_suite, write_curve, OutputFormat, RunConfig, ToleranceProfile};
use quench_core::{early_time_coefficients, multi_quench_offset, LambdaPolicy};

/// Exit code when the validation suite reports failed checks.
const EXIT_VALIDATION: u8 = 3;
/// Exit code for malformed input (config, arguments, presets).
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "quench", version, about = "Circuit complexity of a harmonic chain after sudden quenches")]
struct Cli {
    /// Suppress progress and summary messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CurveArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    #[arg(long, value_parser = parse_policy)]
    policy: Option<LambdaPolicy>,
    /// Replaces the sampling grid, as `start:end:samples`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<TimeGrid<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the curve described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Sample one of the built-in figure presets (fig1 .. fig11).
    Figure {
        id: String,
        #[arg(long, default_value_t = 1)]
        variant: usize,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Run the cross-check suite and print a JSON report.
    Validate {
        /// Shortened oracle runs.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the early-time coefficients a2, a4 and the offsets a_i0.
    Expand {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_policy)]
        policy: Option<LambdaPolicy>,
        #[arg(long, value_parser = parse_format)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Times where two curves cross inside a window.
    ///
    /// Each source is a config path or a preset such as `fig11-v2`.
    Crossover {
        a: String,
        b: String,
        /// `lo:hi`, in the (possibly shifted) time of the curves.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
        /// Shift each curve so that its grid starts at zero.
        #[arg(long)]
        align: bool,
        #[arg(long, value_parser = parse_policy)]
        policy: Option<LambdaPolicy>,
        #[arg(long, value_parser = parse_format)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: quench_core::Error| e.to_string())
}

fn parse_policy(s: &str) -> Result<LambdaPolicy, String> {
    s.parse().map_err(|e: quench_core::Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<TimeGrid<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, samples] = parts[..] else {
        return Err("expected start:end:samples".into());
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    let samples = samples.trim().parse::<usize>().map_err(|e| format!("`{samples}`: {e}"))?;
    TimeGrid::new(num(start)?, num(end)?, samples).map_err(|e| e.to_string())
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    if !(lo < hi) {
        return Err(format!("window {lo}:{hi} is empty"));
    }
    Ok((lo, hi))
}

/// `figN` or `figN-vK`.
fn parse_preset(s: &str) -> Option<(FigureId, usize)> {
    let (id, v) = match s.split_once("-v") {
        Some((id, v)) => (id, v.parse().ok()?),
        None => (s, 1),
    };
    Some((id.parse().ok()?, v))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn load_source(s: &str) -> Result<Scenario<f64>> {
    match parse_preset(s) {
        Some((id, v)) if !Path::new(s).exists() => Ok(figure_preset(id, v)?),
        _ => Ok(load_config(Path::new(s))?.to_scenario()?),
    }
}

fn apply(mut sc: Scenario<f64>, policy: Option<LambdaPolicy>, grid: Option<TimeGrid<f64>>) -> Scenario<f64> {
    if let Some(p) = policy {
        sc.policy = p;
    }
    if let Some(g) = grid {
        sc.grid = g;
    }
    sc
}

/// Explicit flag, then the config, then the file extension.
fn pick_format(flag: Option<OutputFormat>, config: Option<OutputFormat>, out: Option<&Path>) -> OutputFormat {
    flag.or(config)
        .or_else(|| match out?.extension()?.to_str()? {
            "json" => Some(OutputFormat::Json),
            _ => None,
        })
        .unwrap_or_default()
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

struct Reporter {
    quiet: bool,
}

impl Reporter {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn emit(sc: &Scenario<f64>, format: OutputFormat, out: Option<&Path>, rep: &Reporter) -> Result<()> {
    let curve = sample_curve(sc).with_context(|| format!("sampling {}", sc.name))?;
    let mut w = open_out(out)?;
    write_curve(&mut w, sc, &curve, format)?;
    w.flush()?;
    let flagged = curve.iter().filter(|c| !c.branch_flagged.is_empty()).count();
    if flagged > 0 {
        rep.note(format!("warning: {flagged} samples had a non-positive arctan denominator"));
    }
    if let Some(p) = out {
        rep.note(format!("{}: {} samples ({format}) -> {}", sc.name, curve.len(), p.display()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let rep = Reporter { quiet: cli.quiet };
    match cli.command {
        Command::Run { config, curve } => {
            let cfg = load_config(&config)?;
            let sc = apply(cfg.to_scenario()?, curve.policy, curve.grid);
            let out = curve.out.or(cfg.output.path);
            let format = pick_format(curve.format, cfg.output.format, out.as_deref());
            emit(&sc, format, out.as_deref(), &rep)?;
        }
        Command::Figure { id, variant, curve } => {
            let id: FigureId = id.parse()?;
            let sc = apply(figure_preset(id, variant)?, curve.policy, curve.grid);
            let format = pick_format(curve.format, None, curve.out.as_deref());
            emit(&sc, format, curve.out.as_deref(), &rep)?;
        }
        Command::Validate { quick, out } => {
            let profile = if quick { ToleranceProfile::quick() } else { ToleranceProfile::default() };
            let report = run_validation_suite(&profile);
            let mut w = open_out(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
            let failed: Vec<_> = report.failures().collect();
            for c in &failed {
                rep.note(format!(
                    "FAIL {}: measured {:e}, tolerance {:e}{}",
                    c.name,
                    c.measured,
                    c.tolerance,
                    c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                ));
            }
            rep.note(format!("{} checks, {} failed", report.checks.len(), failed.len()));
            if !failed.is_empty() {
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
        }
        Command::Expand { config, policy, format, out } => {
            let sc = load_config(&config)?.to_scenario()?;
            let policy = policy.unwrap_or(sc.policy);
            let schedule = &sc.schedule;
            let series = early_time_coefficients(schedule.spec(), &schedule.segments()[0])?;
            let offsets = (1..=schedule.n_segments())
                .map(|i| multi_quench_offset(schedule, i, policy))
                .collect::<quench_core::Result<Vec<f64>>>()?;
            let mut w = open_out(out.as_deref())?;
            match pick_format(format, None, out.as_deref()) {
                OutputFormat::Json => {
                    let v = serde_json::json!({ "a2": series.a2, "a4": series.a4, "policy": policy, "a_i0": offsets });
                    serde_json::to_writer_pretty(&mut w, &v)?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => {
                    writeln!(w, "coefficient,value")?;
                    writeln!(w, "a2,{:.16e}", series.a2)?;
                    writeln!(w, "a4,{:.16e}", series.a4)?;
                    for (i, a) in offsets.iter().enumerate() {
                        writeln!(w, "a_{}0,{a:.16e}", i + 1)?;
                    }
                }
            }
            w.flush()?;
        }
        Command::Crossover { a, b, window, align, policy, format, out } => {
            let sa = apply(load_source(&a)?, policy, None);
            let sb = apply(load_source(&b)?, policy, None);
            let curve = |sc: &Scenario<f64>| -> Result<Vec<_>> {
                let c = sample_curve(sc).with_context(|| format!("sampling {}", sc.name))?;
                Ok(if align { shift_time(&c, sc.grid.start) } else { c })
            };
            let (ca, cb) = (curve(&sa)?, curve(&sb)?);
            let window = match window {
                Some(w) => w,
                None => {
                    let lo = ca[0].t.max(cb[0].t);
                    let hi = ca[ca.len() - 1].t.min(cb[cb.len() - 1].t);
                    if !(lo < hi) {
                        bail!("the two curves do not overlap; pass --window or --align");
                    }
                    (lo, hi)
                }
            };
            let crossings = detect_crossover(&ca, &cb, window)?;
            let mut w = open_out(out.as_deref())?;
            match pick_format(format, None, out.as_deref()) {
                OutputFormat::Json => {
                    let v = serde_json::json!({ "a": sa.name, "b": sb.name, "window": window, "crossings": crossings });
                    serde_json::to_writer_pretty(&mut w, &v)?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => {
                    writeln!(w, "t")?;
                    for t in &crossings {
                        writeln!(w, "{t:.16e}")?;
                    }
                }
            }
            w.flush()?;
            rep.note(format!("{} crossings of {} and {} in [{}, {}]", crossings.len(), sa.name, sb.name, window.0, window.1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let input = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<quench_core::Error>(),
                    Some(err) if !matches!(err, quench_core::Error::Io(_))
                )
            });
            if input {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
