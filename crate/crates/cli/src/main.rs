use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use compass_cli::presets::paper_figure;
use compass_cli::{run_sweep, AlphaSpec, Format, Quantity, StateSelector, SweepSpec};
use compass_core::fock_oracle::TruncationBudget;
use compass_core::states::DEFAULT_TAIL_TOLERANCE;
use compass_core::verify::{run_suite, SuiteConfig};
use compass_core::{par, PhaseSpaceGrid};

#[derive(Parser)]
#[command(
    name = "compass",
    version,
    about = "Phase-space and photon statistics of generalized compass states"
)]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "COMPASS_THREADS", default_value_t = 0)]
    threads: usize,

    /// Regenerate the data set for figure N into --out-dir.
    #[arg(long, value_name = "N", conflicts_with = "spec")]
    paper_figure: Option<u32>,

    /// Run a sweep described by a JSON or TOML file.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,

    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Wigner function on a grid.
    Wigner(StateArgs),
    /// Mean photon number, Q, g2(0), A3 and quadrature squeezing.
    Stats(StateArgs),
    /// Negative volume of the Wigner function.
    Negativity {
        #[command(flatten)]
        state: StateArgs,
        /// One row per l at each alpha.
        #[arg(long)]
        vs_l: bool,
    },
    /// Photon-number distribution.
    Pnd {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Quadrature variances and higher-order squeezing.
    Squeeze {
        #[command(flatten)]
        state: StateArgs,
        /// Quadrature angle in radians.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle: f64,
    },
    /// Quadrature density P(x).
    Quad(StateArgs),
    /// Sensitivity map F(delta).
    Sense(StateArgs),
    /// Central chessboard tile metrics.
    Tiles(StateArgs),
    /// Closed-form versus number-basis equivalence suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        sets: usize,
        #[arg(long, default_value_t = 80)]
        cutoff: usize,
        #[arg(long, default_value_t = DEFAULT_TAIL_TOLERANCE)]
        tail_tolerance: f64,
        #[arg(long, default_value_t = 3.0)]
        max_amplitude: f64,
        #[arg(long, default_value_t = 0.1)]
        min_amplitude: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Bin,
}

#[derive(Args)]
struct StateArgs {
    /// `re[,im]` for one value or `start:stop:count` for a magnitude range.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Fixed beta `re,im` (needs --phases).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// beta = ratio * alpha, as `re,im` (default `0,1`).
    #[arg(long, allow_hyphen_values = true)]
    beta_ratio: Option<String>,
    /// Explicit phases `theta,phi,chi`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "l")]
    phases: Option<String>,
    /// Canonical subtraction indices, e.g. `0,1,2,3`.
    #[arg(long)]
    l: Option<String>,
    /// `xmin:xmax:n[,ymin:ymax:n]`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    cutoff: Option<usize>,
}

fn floats(s: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad {what}: {s}"))
        })
        .collect()
}

fn pair(s: &str, what: &str) -> anyhow::Result<[f64; 2]> {
    match floats(s, what)?.as_slice() {
        [re] => Ok([*re, 0.0]),
        [re, im] => Ok([*re, *im]),
        _ => bail!("{what} takes re[,im]: {s}"),
    }
}

fn parse_alpha(s: &str) -> anyhow::Result<AlphaSpec> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            bail!("alpha range takes start:stop:count: {s}");
        };
        return Ok(AlphaSpec::Range {
            start: a.parse()?,
            stop: b.parse()?,
            count: n.parse()?,
            arg: 0.0,
        });
    }
    Ok(AlphaSpec::Fixed(pair(s, "alpha")?))
}

fn parse_axis(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("grid axis takes min:max:n: {s}");
    };
    Ok((a.parse()?, b.parse()?, n.parse()?))
}

fn parse_grid(s: &str) -> anyhow::Result<PhaseSpaceGrid> {
    let (x, y) = match s.split_once(',') {
        Some((x, y)) => (parse_axis(x)?, parse_axis(y)?),
        None => (parse_axis(s)?, parse_axis(s)?),
    };
    Ok(PhaseSpaceGrid::new(x.0, x.1, x.2, y.0, y.1, y.2)?)
}

impl StateArgs {
    fn into_spec(self, quantity: Quantity) -> anyhow::Result<SweepSpec> {
        let beta_ratio = self
            .beta_ratio
            .as_deref()
            .map(|s| pair(s, "beta-ratio"))
            .transpose()?;
        let state = match self.phases {
            Some(ph) => {
                let v = floats(&ph, "phases")?;
                let [t, p, c] = v.as_slice() else {
                    bail!("phases takes theta,phi,chi");
                };
                StateSelector::Explicit {
                    phases: [*t, *p, *c],
                    beta: self.beta.as_deref().map(|s| pair(s, "beta")).transpose()?,
                    beta_ratio,
                }
            }
            None => {
                if self.beta.is_some() {
                    bail!("--beta needs --phases");
                }
                let l = match self.l {
                    Some(s) => s
                        .split(',')
                        .map(|t| {
                            t.trim()
                                .parse::<u8>()
                                .with_context(|| format!("bad l: {s}"))
                        })
                        .collect::<anyhow::Result<_>>()?,
                    None if quantity == Quantity::NegativityVsL => vec![0, 1, 2, 3],
                    None => vec![0],
                };
                StateSelector::Canonical { l, beta_ratio }
            }
        };
        Ok(SweepSpec {
            quantity,
            state,
            alpha: parse_alpha(&self.alpha)?,
            grid: self.grid.as_deref().map(parse_grid).transpose()?,
            output: self.out,
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
                FormatArg::Bin => Format::Bin,
            },
            cutoff: self.cutoff,
            angle: 0.0,
            n_max: None,
        })
    }
}

fn run_spec(spec: &SweepSpec) -> anyhow::Result<()> {
    let result = run_sweep(spec)?;
    result.write(spec.format, spec.output.as_deref())?;
    Ok(())
}

fn load_spec(path: &Path) -> anyhow::Result<SweepSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => SweepSpec::from_toml(&text)?,
        _ => SweepSpec::from_json(&text)?,
    };
    Ok(spec)
}

fn run_figure(n: u32, dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, mut spec) in paper_figure(n)? {
        let path = dir.join(format!("fig{n}_{name}.csv"));
        spec.output = Some(path.clone());
        run_spec(&spec)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    par::configure_threads(cli.threads);
    if let Some(n) = cli.paper_figure {
        run_figure(n, &cli.out_dir)?;
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(path) = &cli.spec {
        run_spec(&load_spec(path)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        bail!("nothing to do: give a subcommand, --spec or --paper-figure");
    };
    let spec = match command {
        Command::Verify {
            seed,
            sets,
            cutoff,
            tail_tolerance,
            max_amplitude,
            min_amplitude,
            out,
        } => {
            let cfg = SuiteConfig {
                seed,
                sets,
                budget: TruncationBudget::new(cutoff, tail_tolerance)?,
                max_amplitude,
                min_amplitude,
            };
            let report = run_suite(&cfg);
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(p) => fs::write(&p, text + "\n")
                    .with_context(|| format!("writing {}", p.display()))?,
                None => println!("{text}"),
            }
            return Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
        Command::Wigner(s) => s.into_spec(Quantity::Wigner)?,
        Command::Stats(s) => s.into_spec(Quantity::Stats)?,
        Command::Negativity { state, vs_l } => state.into_spec(if vs_l {
            Quantity::NegativityVsL
        } else {
            Quantity::Negativity
        })?,
        Command::Pnd { state, nmax } => SweepSpec {
            n_max: nmax,
            ..state.into_spec(Quantity::Pnd)?
        },
        Command::Squeeze { state, angle } => SweepSpec {
            angle,
            ..state.into_spec(Quantity::Squeezing)?
        },
        Command::Quad(s) => s.into_spec(Quantity::Quadrature)?,
        Command::Sense(s) => s.into_spec(Quantity::Sensitivity)?,
        Command::Tiles(s) => s.into_spec(Quantity::Tiles)?,
    };
    run_spec(&spec)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
