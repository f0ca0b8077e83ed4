use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grushin::horizontal::{compare_alpha1, solve_horizontal, TAU};
use grushin::rearrange::{rearrangement_report, SlabSet};
use grushin::variational::{minimize, DiscreteProblem, Orientation};
use grushin::vertical::solve_vertical;
use grushin::{Alpha, IsoperimetricProfile, QuadratureSpec, SampledProfile};
use serde_json::{json, Value};

/// Directory prepended to relative `--output` paths when set.
const OUTPUT_DIR_VAR: &str = "GRUSHIN_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "grushin", version, about = "Double bubbles in the Grushin plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of the isoperimetric profile `phi_alpha` on [0, 1].
    Isoprofile {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Closed-form minimizer with the interface on a coordinate axis.
    Bubble {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_orientation, default_value = "vertical")]
        orientation: Orientation,
        #[command(flatten)]
        volume: Volume,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Vertical against horizontal interface at equal area.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        volume: Volume,
        /// Compare numerically for alpha other than 1.
        #[arg(long)]
        force: bool,
    },
    /// Direct minimization of the discretized problem.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_orientation, default_value = "vertical")]
        orientation: Orientation,
        #[command(flatten)]
        volume: Volume,
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Horizontal rearrangement of a polyhedral set read from JSON.
    Rearrange {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct Volume {
    #[arg(long, default_value_t = 1.0)]
    volume: f64,
    /// Comma-separated volumes; one result per entry.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
}

impl Volume {
    fn values(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| vec![self.volume])
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    s.parse::<Orientation>().map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<grushin::Error> for Failure {
    fn from(e: grushin::Error) -> Self {
        use grushin::Error::*;
        match e {
            NonConvergence { .. } | NonFiniteIntegrand { .. } | SolverNonConvergence { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// Rendered output plus whether the computation met its own convergence test.
struct Rendered {
    text: String,
    converged: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grushin: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let (common, rendered) = match &cli.command {
        Command::Isoprofile { common, samples } => (common, isoprofile(common, *samples)?),
        Command::Bubble {
            common,
            orientation,
            volume,
            samples,
        } => (common, bubble(common, *orientation, volume, *samples)?),
        Command::Compare { common, volume, force } => (common, compare(common, volume, *force)?),
        Command::Solve {
            common,
            orientation,
            volume,
            grid,
        } => (common, solve(common, *orientation, volume, *grid)?),
        Command::Rearrange { common, input } => (common, rearrange(common, input)?),
    };
    write_output(common.output.as_deref(), &rendered.text)?;
    if rendered.converged {
        Ok(())
    } else {
        Err(Failure::Numerical("the discrete solver stopped before its step tolerance".into()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            let target = match std::env::var_os(OUTPUT_DIR_VAR) {
                Some(dir) if p.is_relative() => Path::new(&dir).join(p),
                _ => p.to_path_buf(),
            };
            fs::write(&target, text).map_err(|e| Failure::Io(format!("{}: {e}", target.display())))
        }
    }
}

fn alpha_of(common: &Common) -> Outcome<Alpha> {
    Ok(Alpha::new(common.alpha)?)
}

fn check_samples(samples: usize) -> Outcome<()> {
    if samples < 2 {
        return Err(Failure::Validation(format!("--samples must be at least 2, got {samples}")));
    }
    Ok(())
}

fn check_volume(v: f64) -> Outcome<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("--volume must be positive and finite, got {v}")))
    }
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn done(text: String) -> Rendered {
    Rendered { text, converged: true }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn sweep_json(items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.into_iter().next().expect("one item")
    } else {
        Value::Array(items)
    }
}

fn profile_json(p: &SampledProfile, x: &str, y: &str) -> Value {
    json!({ x: p.xs(), y: p.ys() })
}

fn isoprofile(common: &Common, samples: usize) -> Outcome<Rendered> {
    check_samples(samples)?;
    let alpha = alpha_of(common)?;
    let profile = IsoperimetricProfile::new(alpha, QuadratureSpec::default())?;
    let table = profile.table(samples)?;
    let rows = table.xs().iter().zip(table.ys()).map(|(&x, &y)| vec![x, y]);
    Ok(done(match common.format {
        Format::Csv => csv_table(&["x", "phi"], rows),
        Format::Json => json_text(&json!({
            "alpha": alpha,
            "r_alpha": profile.r_alpha(),
            "rows": rows.map(|r| json!({"x": r[0], "phi": r[1]})).collect::<Vec<_>>(),
        })),
    }))
}

fn bubble(common: &Common, orientation: Orientation, volume: &Volume, samples: usize) -> Outcome<Rendered> {
    check_samples(samples)?;
    let alpha = alpha_of(common)?;
    let spec = QuadratureSpec::default();
    let mut items = Vec::new();
    let mut csv_rows = Vec::new();
    for v in volume.values() {
        check_volume(v)?;
        match orientation {
            Orientation::Vertical => {
                let b = solve_vertical(alpha, v, spec)?;
                let profile = b.uniform_profile(samples - 1)?;
                let (theta, theta_transformed) = b.interface_angles();
                csv_rows.extend(profile.xs().iter().zip(profile.ys()).map(|(&x, &f)| vec![v, x, f]));
                items.push(json!({
                    "orientation": orientation,
                    "descriptor": b.descriptor()?,
                    "d": b.d(),
                    "argmax": b.argmax(),
                    "assembled_perimeter": b.assembled_perimeter()?,
                    "area": b.area()?,
                    "angles": { "interface": theta, "transformed": theta_transformed },
                    "profile": profile_json(&profile, "x", "f"),
                }));
            }
            Orientation::Horizontal => {
                let b = solve_horizontal(alpha, v, spec)?;
                let profile = b.uniform_profile(samples - 1)?;
                csv_rows.extend(profile.xs().iter().zip(profile.ys()).map(|(&y, &g)| vec![v, y, g]));
                items.push(json!({
                    "orientation": orientation,
                    "descriptor": b.descriptor()?,
                    "tau": TAU,
                    "y_hat": b.y_hat(),
                    "g0": b.profile_g(0.0)?,
                    "g_prime_at_zero": b.g_prime_at_zero(),
                    "assembled_perimeter": b.assembled_perimeter()?,
                    "area": b.area()?,
                    "angles": {
                        "transformed": b.transformed_angle(),
                        "constraint_residual": b.angle_constraint_residual(),
                    },
                    "profile": profile_json(&profile, "y", "g"),
                }));
            }
        }
    }
    Ok(done(match common.format {
        Format::Json => json_text(&sweep_json(items)),
        Format::Csv => match orientation {
            Orientation::Vertical => csv_table(&["volume", "x", "f"], csv_rows),
            Orientation::Horizontal => csv_table(&["volume", "y", "g"], csv_rows),
        },
    }))
}

fn compare(common: &Common, volume: &Volume, force: bool) -> Outcome<Rendered> {
    let alpha = alpha_of(common)?;
    if alpha.value() != 1.0 && !force {
        return Err(Failure::Validation(format!(
            "UnsupportedAlpha: the closed-form comparison holds for alpha = 1 only (got {}); pass --force to compare numerically",
            alpha.value()
        )));
    }
    let spec = QuadratureSpec::default();
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for v in volume.values() {
        check_volume(v)?;
        let item = if alpha.value() == 1.0 {
            let c = compare_alpha1(v)?;
            rows.push(vec![1.0, v, c.p_vertical, c.p_horizontal, c.ratio]);
            serde_json::to_value(c).expect("comparison serializes")
        } else {
            let px = solve_vertical(alpha, v, spec)?.min_perimeter()?;
            let py = solve_horizontal(alpha, v, spec)?.min_perimeter()?;
            let ratio = px / py;
            let winner = if (ratio - 1.0).abs() <= 1e-12 {
                "tie"
            } else if py < px {
                "horizontal"
            } else {
                "vertical"
            };
            rows.push(vec![alpha.value(), v, px, py, ratio]);
            json!({
                "alpha": alpha,
                "v": v,
                "P_x": px,
                "P_y": py,
                "winner": winner,
                "ratio": ratio,
                "forced": true,
            })
        };
        items.push(item);
    }
    Ok(done(match common.format {
        Format::Json => json_text(&sweep_json(items)),
        Format::Csv => csv_table(&["alpha", "volume", "P_x", "P_y", "ratio"], rows),
    }))
}

fn solve(common: &Common, orientation: Orientation, volume: &Volume, grid: usize) -> Outcome<Rendered> {
    let alpha = alpha_of(common)?;
    let spec = QuadratureSpec::default();
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut converged = true;
    for v in volume.values() {
        check_volume(v)?;
        let problem = DiscreteProblem::new(alpha, v, orientation)?.with_grid(grid);
        let report = minimize(&problem)?;
        let exact = match orientation {
            Orientation::Vertical => solve_vertical(alpha, v, spec)?.min_perimeter()?,
            Orientation::Horizontal => solve_horizontal(alpha, v, spec)?.min_perimeter()?,
        };
        converged &= report.converged;
        rows.extend(report.profile.xs().iter().zip(report.profile.ys()).map(|(&x, &u)| vec![v, x, u]));
        let mut value = serde_json::to_value(&report).expect("reports serialize");
        value["v"] = json!(v);
        value["grid"] = json!(grid);
        value["closed_form_perimeter"] = json!(exact);
        value["relative_gap"] = json!((report.perimeter - exact) / exact);
        items.push(value);
    }
    let text = match common.format {
        Format::Json => json_text(&sweep_json(items)),
        Format::Csv => csv_table(&["volume", "t", "u"], rows),
    };
    Ok(Rendered { text, converged })
}

fn rearrange(common: &Common, input: &Path) -> Outcome<Rendered> {
    if common.format == Format::Csv {
        return Err(Failure::Validation("rearrange writes JSON only".into()));
    }
    let alpha = alpha_of(common)?;
    let text = fs::read_to_string(input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
    let set = SlabSet::from_json(&text)?;
    let (after, report) = rearrangement_report(&set, alpha)?;
    let rearranged: Value = serde_json::from_str(&after.to_json()).expect("slab sets produce valid json");
    Ok(done(json_text(&json!({
        "alpha": alpha,
        "rearranged": rearranged,
        "report": report,
    }))))
}
