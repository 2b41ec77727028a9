//! The `barypoly` command line.
//!
//! Exit codes: 0 success, 1 invalid input or failed output, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::barypolygonal::{convergence_gap, iterate_sequence, limit_point, ParamVector};
use crate::derived::{
    classify_dynamics, conjugate_trace, derived_trace, solve_alpha, ClassifyConfig, ConjugateState, Tolerances,
};
use crate::dual::{centroid_convergence_report, dual_trace};
use crate::io::config::{
    build_config, parse_config, parse_real_str, seed_from_env, ConfigError, OutputFormat, OutputSpec, PointsSource,
    SimulationConfig, DEFAULT_ITERATIONS,
};
use crate::io::{dual_svg, fmt_num, polygon_svg, SvgStyle, TraceTable};
use crate::PointFamily;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "barypoly", version, about = "Barypolygonal sequences, derived systems and dual sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate the barypolygon map and write the trace
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: OutArgs,
        /// Worker threads when several --config files are given
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write the derived parameter trace t^(0..n)
    Derive {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: OutArgs,
        /// Write u = 1 - t (the conjugate system) instead
        #[arg(long)]
        conjugate: bool,
    },
    /// Dual sequence and its convergence to the centroid
    Dual {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classify the dynamics of the derived system
    Classify {
        #[command(flatten)]
        input: Input,
        /// Number of derived steps to simulate
        #[arg(long, default_value_t = 200)]
        horizon: usize,
        /// Print the classification as JSON
        #[arg(long)]
        json: bool,
    },
    /// Emit SVG figures of iterates (planar families only)
    Figure {
        #[command(flatten)]
        input: Input,
        /// Also draw the derived sequences of order 1..=K; --out is then a directory
        #[arg(long)]
        derivatives: Option<usize>,
        /// Draw the dual sequence instead of the iterates
        #[arg(long)]
        dual: bool,
        /// Output file (or directory with --derivatives); stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print alpha_p, the root in [0, 1] of x^(p-1) + x - 1
    Alpha {
        #[arg(long)]
        p: usize,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Input {
    /// JSON config file (repeatable for `simulate --jobs`)
    #[arg(long, conflicts_with_all = ["points", "regular", "random", "t"])]
    config: Vec<PathBuf>,
    /// Points as `x1,y1;x2,y2;...`
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["regular", "random"])]
    points: Option<String>,
    /// Regular polygon with this many vertices on the unit circle
    #[arg(long, conflicts_with = "random")]
    regular: Option<usize>,
    /// Random family `p,d` in [-1,1]^d (seed from --seed or BARYPOLY_SEED)
    #[arg(long)]
    random: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Parameters as `t1,t2,...`; fractions like 1/61 allowed
    #[arg(long)]
    t: Option<String>,
    /// Number of iterations / derived steps
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol_stationary: Option<f64>,
    #[arg(long)]
    tol_periodic: Option<f64>,
    #[arg(long)]
    tol_regularity: Option<f64>,
    #[arg(long)]
    tol_distinct: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<TraceFmt>,
    /// Output file; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TraceFmt {
    Csv,
    Json,
}

/// Failure inside a subcommand, mapped to an exit code.
enum Failure {
    Invalid(Vec<String>),
    Usage(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Invalid(v) => Failure::Invalid(v),
            syntax => Failure::Invalid(vec![syntax.to_string()]),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Invalid(vec![e.to_string()])
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(vec![format!("i/o error: {e}")])
    }
}

type Outcome = Result<(), Failure>;

/// Runs the CLI on `argv` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Alpha { p } => cmd_alpha(p, stdout),
        Command::Simulate { input, out, jobs } => cmd_simulate(&input, &out, jobs, stdout),
        Command::Derive { input, out, conjugate } => cmd_derive(&input, &out, conjugate, stdout),
        Command::Dual { input, out } => cmd_dual(&input, &out, stdout),
        Command::Classify { input, horizon, json } => cmd_classify(&input, horizon, json, stdout),
        Command::Figure { input, derivatives, dual, out } => cmd_figure(&input, derivatives, dual, out, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msgs)) => {
            for m in msgs {
                let _ = writeln!(stderr, "error: {m}");
            }
            EXIT_INVALID
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "usage error: {m}");
            EXIT_USAGE
        }
    }
}

fn parse_list(s: &str, what: &str, issues: &mut Vec<String>) -> Vec<f64> {
    let mut out = Vec::new();
    for (k, item) in s.split(',').enumerate() {
        match parse_real_str(item) {
            Ok(x) => out.push(x),
            Err(e) => issues.push(format!("{what}[{k}]: {e}")),
        }
    }
    out
}

fn tolerances_from(input: &Input) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(x) = input.tol_stationary {
        tol.stationary = x;
    }
    if let Some(x) = input.tol_periodic {
        tol.periodic = x;
    }
    if let Some(x) = input.tol_regularity {
        tol.regularity = x;
    }
    if let Some(x) = input.tol_distinct {
        tol.distinctness = x;
    }
    tol
}

fn points_from_flags(input: &Input, issues: &mut Vec<String>) -> Option<PointsSource> {
    if let Some(s) = &input.points {
        let rows: Vec<Vec<f64>> =
            s.split(';').enumerate().map(|(i, row)| parse_list(row, &format!("points[{i}]"), issues)).collect();
        return Some(PointsSource::Explicit(rows));
    }
    if let Some(p) = input.regular {
        return Some(PointsSource::RegularPolygon { p, radius: 1.0 });
    }
    if let Some(spec) = &input.random {
        let parts: Vec<&str> = spec.split(',').collect();
        let parsed: Vec<Option<usize>> = parts.iter().map(|x| x.trim().parse().ok()).collect();
        let (p, d) = match parsed.as_slice() {
            [Some(p), Some(d)] if *d > 0 => (*p, *d),
            _ => {
                issues.push(format!("random: expected `p,d` with d >= 1, got {spec:?}"));
                return None;
            }
        };
        let seed = match input.seed {
            Some(s) => s,
            None => match seed_from_env() {
                Ok(s) => s.unwrap_or(0),
                Err(e) => {
                    issues.push(e);
                    return None;
                }
            },
        };
        return Some(PointsSource::Random { p, d, seed });
    }
    None
}

fn output_spec(out: &OutArgs) -> Option<OutputSpec> {
    if out.format.is_none() && out.out.is_none() {
        return None;
    }
    Some(OutputSpec {
        format: match out.format {
            Some(TraceFmt::Json) => OutputFormat::Json,
            _ => OutputFormat::Csv,
        },
        path: out.out.as_ref().map(|p| p.display().to_string()),
    })
}

/// Config from a file or from flags; points required.
fn load_config(input: &Input, out: Option<&OutArgs>) -> Result<SimulationConfig, Failure> {
    match input.config.as_slice() {
        [] => {
            let mut issues = Vec::new();
            let points = points_from_flags(input, &mut issues);
            if points.is_none() && issues.is_empty() {
                issues.push("points: missing (give --points, --regular, --random or --config)".into());
            }
            let t = input.t.as_deref().map(|s| parse_list(s, "t", &mut issues));
            let t = if issues.iter().any(|m| m.starts_with("t[")) { None } else { t };
            Ok(build_config(
                points,
                t,
                input.n.unwrap_or(DEFAULT_ITERATIONS),
                tolerances_from(input),
                out.and_then(output_spec),
                issues,
            )?)
        }
        [path] => {
            let mut cfg = read_config(path)?;
            if let Some(n) = input.n {
                cfg.iterations = n;
            }
            if let Some(spec) = out.and_then(output_spec) {
                cfg.output = Some(spec);
            }
            Ok(cfg)
        }
        _ => Err(Failure::Usage("several --config files are only accepted by `simulate`".into())),
    }
}

fn read_config(path: &Path) -> Result<SimulationConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config(&text).map_err(|e| match e {
        ConfigError::Invalid(v) => {
            Failure::Invalid(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect())
        }
        other => Failure::Invalid(vec![format!("{}: {other}", path.display())]),
    })
}

/// Parameters only, for subcommands that do not need points.
fn load_params(input: &Input) -> Result<(ParamVector, usize, Tolerances), Failure> {
    if !input.config.is_empty() || input.points.is_some() || input.regular.is_some() || input.random.is_some() {
        let cfg = load_config(input, None)?;
        return Ok((cfg.t, cfg.iterations, cfg.tolerances));
    }
    let mut issues = Vec::new();
    let Some(s) = &input.t else {
        return Err(Failure::Invalid(vec!["t: missing (give --t or --config)".into()]));
    };
    let t = parse_list(s, "t", &mut issues);
    for (k, &x) in t.iter().enumerate() {
        if !(x > 0.0 && x < 1.0) {
            issues.push(format!("t[{k}] = {x}: parameter out of open interval (0, 1)"));
        }
    }
    if t.len() < 2 {
        issues.push(format!("t: need at least 2 parameters, got {}", t.len()));
    }
    if !issues.is_empty() {
        return Err(Failure::Invalid(issues));
    }
    Ok((ParamVector::new(t)?, input.n.unwrap_or(DEFAULT_ITERATIONS), tolerances_from(input)))
}

fn emit(table: &TraceTable, spec: Option<&OutputSpec>, stdout: &mut dyn Write) -> Result<Option<String>, Failure> {
    let format = spec.map(|s| s.format).unwrap_or(OutputFormat::Csv);
    let text = match format {
        OutputFormat::Json => table.to_json(),
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Svg => return Err(Failure::Usage("svg output is produced by `figure`".into())),
    };
    match spec.and_then(|s| s.path.as_ref()) {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Invalid(vec![format!("cannot write {path}: {e}")]))?;
            Ok(Some(path.clone()))
        }
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(None)
        }
    }
}

fn join_nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ")
}

fn cmd_alpha(p: usize, stdout: &mut dyn Write) -> Outcome {
    let a = solve_alpha(p)?;
    writeln!(stdout, "{}", fmt_num(a))?;
    Ok(())
}

fn simulate_one(cfg: &SimulationConfig, stdout: &mut dyn Write) -> Outcome {
    let trace = iterate_sequence(&cfg.family, &cfg.t, cfg.iterations)?;
    let g = limit_point(&cfg.family, &cfg.t)?;
    let gaps = convergence_gap(&trace, &g)?;
    let table = TraceTable::from_polygon(&trace);
    if let Some(path) = emit(&table, cfg.output.as_ref(), stdout)? {
        writeln!(stdout, "wrote: {path}")?;
        writeln!(stdout, "limit: {}", join_nums(g.coords()))?;
        writeln!(stdout, "final_gap: {}", fmt_num(*gaps.last().unwrap()))?;
    }
    Ok(())
}

fn cmd_simulate(input: &Input, out: &OutArgs, jobs: usize, stdout: &mut dyn Write) -> Outcome {
    if input.config.len() <= 1 {
        let cfg = load_config(input, Some(out))?;
        return simulate_one(&cfg, stdout);
    }
    if out.out.is_some() {
        return Err(Failure::Usage("--out cannot be combined with several --config files".into()));
    }
    let mut configs = Vec::new();
    let mut issues = Vec::new();
    for path in &input.config {
        match read_config(path) {
            Ok(mut cfg) => {
                if let Some(n) = input.n {
                    cfg.iterations = n;
                }
                if cfg.output.as_ref().and_then(|o| o.path.as_ref()).is_none() {
                    issues.push(format!("{}: batch runs need output.path", path.display()));
                }
                configs.push(cfg);
            }
            Err(Failure::Invalid(v)) => issues.extend(v),
            Err(other) => return Err(other),
        }
    }
    if !issues.is_empty() {
        return Err(Failure::Invalid(issues));
    }
    let jobs = jobs.max(1);
    let mut results: Vec<Option<Result<Vec<u8>, Failure>>> = (0..configs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = configs.len().div_ceil(jobs);
        for (cfgs, slots) in configs.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (cfg, slot) in cfgs.iter().zip(slots.iter_mut()) {
                    let mut buf = Vec::new();
                    *slot = Some(simulate_one(cfg, &mut buf).map(|()| buf));
                }
            });
        }
    });
    let mut failures = Vec::new();
    for r in results.into_iter().flatten() {
        match r {
            Ok(buf) => stdout.write_all(&buf)?,
            Err(Failure::Invalid(v)) => failures.extend(v),
            Err(other) => return Err(other),
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid(failures))
    }
}

fn cmd_derive(input: &Input, out: &OutArgs, conjugate: bool, stdout: &mut dyn Write) -> Outcome {
    let (t, n, tol) = load_params(input)?;
    let spec = output_spec(out);
    let (table, saturated_at, len) = if conjugate {
        let tr = conjugate_trace(&ConjugateState::from_params(&t), n)?;
        (TraceTable::from_conjugate(&tr), tr.saturated_at, tr.len())
    } else {
        let tr = derived_trace(&t, n);
        (TraceTable::from_derived(&tr, Some(tol)), tr.saturated_at, tr.len())
    };
    if let Some(path) = emit(&table, spec.as_ref(), stdout)? {
        writeln!(stdout, "wrote: {path}")?;
        writeln!(stdout, "steps: {len}")?;
        match saturated_at {
            Some(s) => writeln!(stdout, "saturated_at: {s}")?,
            None => writeln!(stdout, "saturated_at: none")?,
        }
    }
    Ok(())
}

fn cmd_dual(input: &Input, out: &OutArgs, stdout: &mut dyn Write) -> Outcome {
    let cfg = load_config(input, Some(out))?;
    let trace = dual_trace(&cfg.family, &cfg.t, cfg.iterations)?;
    if cfg.output.as_ref().and_then(|o| o.path.as_ref()).is_some() {
        let table = TraceTable::from_dual(&trace, Some(cfg.tolerances));
        if let Some(path) = emit(&table, cfg.output.as_ref(), stdout)? {
            writeln!(stdout, "wrote: {path}")?;
        }
    }
    writeln!(stdout, "centroid: {}", join_nums(trace.centroid.coords()))?;
    writeln!(stdout, "steps: {}", trace.len())?;
    match trace.params_used.saturated_at {
        Some(s) => writeln!(stdout, "saturated_at: {s}")?,
        None => writeln!(stdout, "saturated_at: none")?,
    }
    match centroid_convergence_report(&trace, cfg.tolerances.regularity) {
        Ok(rep) => {
            let last = rep.distances.last().copied().unwrap_or(0.0);
            writeln!(stdout, "final_distance: {}", fmt_num(last))?;
            match rep.first_below {
                Some(m) => writeln!(stdout, "first_below_1e-6: {m}")?,
                None => writeln!(stdout, "first_below_1e-6: none")?,
            }
            if rep.immediate {
                writeln!(stdout, "decay_rate: undefined (stationary at the centroid)")?;
            } else if let Some(r) = rep.decay_rate {
                writeln!(stdout, "decay_rate: {}", fmt_num(r))?;
            }
            if rep.conjectured {
                writeln!(stdout, "status: conjectured")?;
            }
        }
        Err(e) => writeln!(stdout, "report: {e}")?,
    }
    Ok(())
}

fn cmd_classify(input: &Input, horizon: usize, json: bool, stdout: &mut dyn Write) -> Outcome {
    let (t, _, tol) = load_params(input)?;
    let config = ClassifyConfig { tolerances: tol, horizon, ..ClassifyConfig::default() };
    let c = classify_dynamics(&t, &config)?;
    if json {
        writeln!(stdout, "{}", serde_json::to_string_pretty(&c).expect("serializable"))?;
        return Ok(());
    }
    writeln!(stdout, "{}", c.verdict)?;
    writeln!(stdout, "alpha: {}", fmt_num(c.alpha))?;
    if let Some(m0) = c.lockin_index {
        writeln!(stdout, "lockin_index: {m0}")?;
    }
    if let Some(p) = c.parity {
        writeln!(stdout, "parity: {p:?}")?;
    }
    if let Some(e) = c.evidence {
        writeln!(stdout, "evidence: {}", fmt_num(e))?;
    }
    if c.lockin_index.is_some() {
        writeln!(stdout, "confirmed_pairs: {}", c.confirmed_pairs)?;
    }
    match c.saturated_at {
        Some(s) => writeln!(stdout, "saturated_at: {s}")?,
        None => writeln!(stdout, "saturated_at: none")?,
    }
    Ok(())
}

/// SVG for the `t`-barypolygonal sequence of `family`, with its limit marked.
pub fn figure_document(family: &PointFamily, t: &ParamVector, n: usize, title: String) -> crate::Result<String> {
    let trace = iterate_sequence(family, t, n)?;
    let g = limit_point(family, t)?;
    let style = SvgStyle { title: Some(title), ..SvgStyle::default() };
    polygon_svg(&trace, Some(&g), &style)
}

/// Figures of the derived sequences of orders `0..=max_order`.
pub fn derivative_figures(
    family: &PointFamily,
    t0: &ParamVector,
    n: usize,
    max_order: usize,
) -> crate::Result<Vec<String>> {
    let derived = derived_trace(t0, max_order);
    if derived.len() <= max_order {
        return Err(crate::Error::Precondition(format!(
            "derived parameters saturate at order {}",
            derived.saturated_at.unwrap_or(derived.len())
        )));
    }
    derived
        .params
        .iter()
        .enumerate()
        .map(|(m, t)| {
            let title = format!("derived sequence of order {m}, t = {}", join_nums(t.as_slice()));
            figure_document(family, t, n, title)
        })
        .collect()
}

fn cmd_figure(
    input: &Input,
    derivatives: Option<usize>,
    dual: bool,
    out: Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Outcome {
    let mut cfg = load_config(input, None)?;
    if input.n.is_none() && input.config.is_empty() {
        cfg.iterations = 20;
    }
    if dual && derivatives.is_some() {
        return Err(Failure::Usage("--dual and --derivatives are exclusive".into()));
    }
    if let Some(k) = derivatives {
        let Some(dir) = out else {
            return Err(Failure::Usage("--derivatives needs --out DIR".into()));
        };
        let docs = derivative_figures(&cfg.family, &cfg.t, cfg.iterations, k)?;
        std::fs::create_dir_all(&dir)?;
        for (m, doc) in docs.iter().enumerate() {
            let path = dir.join(format!("derivative_{m}.svg"));
            std::fs::write(&path, doc)?;
            writeln!(stdout, "wrote: {}", path.display())?;
        }
        return Ok(());
    }
    let doc = if dual {
        let trace = dual_trace(&cfg.family, &cfg.t, cfg.iterations)?;
        dual_svg(&cfg.family, &trace, &SvgStyle { title: Some("dual sequence".into()), ..SvgStyle::default() })?
    } else {
        let title = format!("barypolygonal sequence, t = {}", join_nums(cfg.t.as_slice()));
        figure_document(&cfg.family, &cfg.t, cfg.iterations, title)?
    };
    match out {
        Some(path) => {
            std::fs::write(&path, doc)?;
            writeln!(stdout, "wrote: {}", path.display())?;
        }
        None => stdout.write_all(doc.as_bytes())?,
    }
    Ok(())
}
