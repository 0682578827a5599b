//! `lsl`: command-line front end for 1/k length spectra, minimizing indices,
//! energy critical points and spectral convergence experiments.

mod output;
mod syntax;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lsl::curves::{GridConfig, IndexResult, DEFAULT_DELTA, DEFAULT_K_MAX};
use lsl::energy::{find_critical_points, open_index_search, SearchConfig};
use lsl::gh::{self, convergence_experiment, gap_check, gh_upper_bound, ExperimentConfig, Family, GapResult, GhMethod, Inclusion};
use lsl::spaces::LengthSpace;
use lsl::spectra::{self, SpectrumConfig, WALK_CAP};

use output::{Format, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(lsl::Error),
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<lsl::Error> for CliError {
    fn from(e: lsl::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn number(s: &str) -> Result<f64, String> {
    syntax::parse_number(s).map_err(|e| e.to_string())
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive value, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a non-negative value, got {v}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "lsl", version, about = "1/k length spectra and energy critical points on compact length spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LSL_THREADS")]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Length spectrum, 1/k spectrum or open 1/k spectrum.
    Spectrum(SpectrumArgs),
    /// Minimizing index of the space.
    Minind(MinindArgs),
    /// Shortest closed geodesic.
    Systole(SpaceArgs),
    /// Critical points of the uniform energy.
    Energy(EnergyArgs),
    /// Gromov-Hausdorff upper bound between two spaces.
    Gh(GhArgs),
    /// Spectral convergence along a family of spaces.
    Converge(ConvergeArgs),
    /// Whether a spectrum avoids an interval.
    Gap(GapArgs),
}

#[derive(Args, Debug, Serialize)]
struct SpaceArgs {
    /// Space descriptor, e.g. `circle:pi`, `torus:pi,pi/2`, `sphere2`, `graph:g.json`.
    #[arg(long)]
    space: String,
}

#[derive(Args, Debug, Serialize)]
struct GridArgs {
    /// Initial grid spacing for sampled checks.
    #[arg(long, value_parser = positive, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Largest k tried when computing indices.
    #[arg(long = "kmax", default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    /// Cap on explored walk steps during graph enumeration.
    #[arg(long, default_value_t = WALK_CAP)]
    walk_cap: usize,
}

impl GridArgs {
    fn spectrum_config(&self) -> Result<SpectrumConfig, CliError> {
        if self.k_max < 2 {
            return Err(CliError::config("--kmax must be at least 2"));
        }
        Ok(SpectrumConfig { grid: GridConfig::with_delta(self.delta), k_max: self.k_max, walk_cap: self.walk_cap, ..SpectrumConfig::default() })
    }
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,
    /// Restrict to 1/k geodesics.
    #[arg(long)]
    k: Option<usize>,
    /// Length cutoff.
    #[arg(long = "R", value_parser = positive)]
    #[serde(rename = "R")]
    r: Option<f64>,
    /// Only openly 1/k geodesics.
    #[arg(long, requires = "k")]
    open: bool,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
struct MinindArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,
    /// Also bound the shortest closed geodesic length.
    #[arg(long)]
    bounds: bool,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
struct EnergyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,
    /// Search a fixed k; without it the open index search runs up to --kmax.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "kmax", default_value_t = 6)]
    k_max: usize,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the Newton runs (descent only).
    #[arg(long)]
    no_newton: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Exact,
    Greedy,
    /// Natural map: torus onto circle projection, identity between meshes
    /// with the same triangulation, identity between equal specs.
    Map,
}

#[derive(Args, Debug, Serialize)]
struct GhArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,
    /// Second space.
    #[arg(long)]
    target: String,
    /// Net radius.
    #[arg(long, value_parser = positive)]
    r: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Greedy)]
    method: MethodArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FamilyArg {
    TorusCollapse,
    Constant,
    EllipsoidFlatten,
}

#[derive(Args, Debug, Serialize)]
struct ConvergeArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Comma-separated family parameters, ordered toward the limit.
    #[arg(long, value_parser = spec_list)]
    params: Params,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long = "R", value_parser = positive, default_value_t = 10.0)]
    #[serde(rename = "R")]
    r: f64,
    #[arg(long, value_parser = non_negative, default_value_t = 1.0)]
    eps: f64,
    /// Space of the constant family.
    #[arg(long, default_value = "circle:pi")]
    space: String,
    /// Mesh resolution of the ellipsoid family.
    #[arg(long, default_value_t = syntax::DEFAULT_RINGS)]
    rings: usize,
    #[arg(long, default_value_t = syntax::DEFAULT_STEINER)]
    steiner: usize,
    /// Net radius for a GH bound per member.
    #[arg(long, value_parser = positive)]
    gh_r: Option<f64>,
    /// Write plot data (long format CSV) here.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct Params(Vec<f64>);

fn spec_list(s: &str) -> Result<Params, String> {
    syntax::parse_list(s).map(Params).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Serialize)]
struct GapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "R", value_parser = positive)]
    #[serde(rename = "R")]
    r: f64,
    #[arg(long, value_parser = number)]
    a: f64,
    #[arg(long, value_parser = number)]
    b: f64,
    #[arg(long, value_parser = non_negative, default_value_t = 0.0)]
    eps: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
}

/// Outcome of a command: the artifact plus whether anything stayed undecided.
struct Run {
    undecided: bool,
}

fn run(cli: &Cli) -> Result<Run, CliError> {
    let sink = output::Sink { out: cli.out.clone(), format: cli.format };
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, &sink),
        Command::Minind(a) => cmd_minind(a, &sink),
        Command::Systole(a) => cmd_systole(a, &sink),
        Command::Energy(a) => cmd_energy(a, &sink),
        Command::Gh(a) => cmd_gh(a, &sink),
        Command::Converge(a) => cmd_converge(a, &sink),
        Command::Gap(a) => cmd_gap(a, &sink),
    }
}

#[derive(Serialize)]
struct Resolved<'a, A: Serialize, C: Serialize> {
    #[serde(flatten)]
    args: &'a A,
    resolved: C,
}

fn spectrum_of(space: &Arc<LengthSpace>, k: Option<usize>, r: Option<f64>, open: bool, cfg: &SpectrumConfig) -> Result<spectra::Spectrum, CliError> {
    Ok(match (k, open) {
        (Some(k), true) => spectra::spectrum_open_1_over_k(space, k, r, cfg)?,
        (Some(k), false) => spectra::spectrum_1_over_k(space, k, r, cfg)?,
        (None, _) => {
            let r = r.ok_or_else(|| CliError::config("the full spectrum needs --R"))?;
            spectra::spectrum(space, r, cfg)?
        }
    })
}

fn report_undecided(s: &spectra::Spectrum) {
    for u in &s.undecided {
        eprintln!("undecided: length {} ({}): {}", u.length, u.witness, u.reason);
    }
}

fn index_cell(i: &IndexResult) -> String {
    match i {
        IndexResult::Found(k) => k.to_string(),
        IndexResult::Exceeds => "exceeds".into(),
        IndexResult::Undecided(k) => format!("undecided:{k}"),
    }
}

fn spectrum_table(s: &spectra::Spectrum) -> Table {
    let mut t = Table::new(&["status", "length", "minind", "opind", "open", "witnesses"]);
    for e in &s.entries {
        t.row(vec!["entry".into(), e.length.to_string(), index_cell(&e.minind), index_cell(&e.opind), e.open.to_string(), e.witnesses.join(";")]);
    }
    for u in &s.undecided {
        t.row(vec!["undecided".into(), u.length.to_string(), String::new(), String::new(), String::new(), u.witness.clone()]);
    }
    t
}

fn cmd_spectrum(a: &SpectrumArgs, sink: &output::Sink) -> Result<Run, CliError> {
    let space = syntax::parse_space(&a.space.space)?;
    let cfg = a.grid.spectrum_config()?;
    let s = spectrum_of(&space, a.k, a.r, a.open, &cfg)?;
    report_undecided(&s);
    let config = Resolved { args: a, resolved: cfg };
    sink.emit("spectrum", &config, &s, || spectrum_table(&s))?;
    Ok(Run { undecided: !s.is_decided() })
}

#[derive(Serialize)]
struct MinindResult {
    index: spectra::SpaceIndex,
    bounds: Option<spectra::MinLengthBounds>,
}

fn cmd_minind(a: &MinindArgs, sink: &output::Sink) -> Result<Run, CliError> {
    let space = syntax::parse_space(&a.space.space)?;
    let cfg = a.grid.spectrum_config()?;
    let index = spectra::space_minind(&space, &cfg)?;
    let bounds = if a.bounds && index.minind.found().is_some() { Some(spectra::min_length_bounds(&space, &cfg)?) } else { None };
    let undecided = matches!(index.minind, IndexResult::Undecided(_));
    let res = MinindResult { index, bounds };
    let config = Resolved { args: a, resolved: cfg };
    sink.emit("minind", &config, &res, || {
        let mut t = Table::new(&["key", "value"]);
        t.row(vec!["minind".into(), index_cell(&res.index.minind)]);
        t.row(vec!["upper_bound_only".into(), res.index.upper_bound_only.to_string()]);
        t.row(vec!["witness_length".into(), res.index.witness_length.map(|l| l.to_string()).unwrap_or_default()]);
        if let Some(b) = &res.bounds {
            t.row(vec!["upper".into(), b.upper.to_string()]);
            t.row(vec!["lower".into(), b.lower.map(|l| l.to_string()).unwrap_or_default()]);
            t.row(vec!["diameter".into(), b.diameter.to_string()]);
        }
        t
    })?;
    Ok(Run { undecided })
}

#[derive(Serialize)]
struct SystoleResult {
    length: f64,
    /// Directed edge sequence `(edge, forward)` for graphs.
    walk: Option<Vec<spectra::Step>>,
}

fn cmd_systole(a: &SpaceArgs, sink: &output::Sink) -> Result<Run, CliError> {
    let space = syntax::parse_space(&a.space)?;
    let res = match space.as_graph() {
        Some(g) => {
            let (length, walk) = spectra::graph_systole(g)?;
            SystoleResult { length, walk: Some(walk) }
        }
        None => SystoleResult { length: spectra::systole(&space)?.0, walk: None },
    };
    sink.emit("systole", a, &res, || {
        let mut t = Table::new(&["length"]);
        t.row(vec![res.length.to_string()]);
        t
    })?;
    Ok(Run { undecided: false })
}

#[derive(Serialize)]
#[serde(untagged)]
enum EnergyResult {
    Fixed(lsl::energy::SearchReport),
    OpenIndex(lsl::energy::OpenIndexSearch),
}

fn cmd_energy(a: &EnergyArgs, sink: &output::Sink) -> Result<Run, CliError> {
    let space = syntax::parse_space(&a.space.space)?;
    if a.starts == 0 {
        return Err(CliError::config("--starts must be positive"));
    }
    let cfg = SearchConfig { n_starts: a.starts, seed: a.seed, newton: !a.no_newton, ..SearchConfig::default() };
    let res = match a.k {
        Some(k) => EnergyResult::Fixed(find_critical_points(&space, k, &cfg)?),
        None => EnergyResult::OpenIndex(open_index_search(&space, a.k_max, &cfg)?),
    };
    let config = Resolved { args: a, resolved: cfg };
    sink.emit("energy", &config, &res, || match &res {
        EnergyResult::Fixed(rep) => {
            let mut t = Table::new(&["rotating", "energy", "length", "gradient_norm", "hessian_index", "nullity", "method", "start"]);
            for r in rep.rotating.iter().chain(&rep.non_rotating) {
                let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
                t.row(vec![
                    r.rotating.to_string(),
                    r.energy.to_string(),
                    r.length.to_string(),
                    r.gradient_norm.to_string(),
                    opt(r.hessian_index),
                    opt(r.nullity),
                    format!("{:?}", r.method).to_lowercase(),
                    r.start.to_string(),
                ]);
            }
            t
        }
        EnergyResult::OpenIndex(o) => {
            let mut t = Table::new(&["k", "rotating"]);
            for (k, n) in &o.rotating_per_k {
                t.row(vec![k.to_string(), n.to_string()]);
            }
            t
        }
    })?;
    Ok(Run { undecided: false })
}

fn natural_map(x: &LengthSpace, y: &LengthSpace, same_descriptor: bool) -> Result<GhMethod, CliError> {
    match (x, y) {
        (LengthSpace::FlatTorus { .. }, LengthSpace::Circle { .. }) => Ok(GhMethod::ProvidedMap(gh::torus_projection(x, y)?)),
        (LengthSpace::MeshSurface(_), LengthSpace::MeshSurface(_)) => Ok(GhMethod::ProvidedMap(gh::mesh_identity(x, y)?)),
        _ if same_descriptor => Ok(GhMethod::ProvidedMap(Arc::new(|p: &lsl::spaces::SpacePoint| Ok(p.clone())))),
        _ => Err(CliError::config(format!("no natural map from a {} space to a {} space", x.kind(), y.kind()))),
    }
}

fn cmd_gh(a: &GhArgs, sink: &output::Sink) -> Result<Run, CliError> {
    let x = syntax::parse_space(&a.space.space)?;
    let y = syntax::parse_space(&a.target)?;
    let method = match a.method {
        MethodArg::Exact => GhMethod::Exact,
        MethodArg::Greedy => GhMethod::Greedy,
        MethodArg::Map => natural_map(&x, &y, a.space.space.trim() == a.target.trim())?,
    };
    let b = gh_upper_bound(&x, &y, a.r, &method)?;
    sink.emit("gh", a, &b, || {
        let mut t = Table::new(&["method", "r", "r_x", "r_y", "net_x", "net_y", "distortion", "bound", "sharp_bound"]);
        t.row(vec![
            b.method.to_string(),
            b.r.to_string(),
            b.r_x.to_string(),
            b.r_y.to_string(),
            b.net_x.to_string(),
            b.net_y.to_string(),
            b.distortion.to_string(),
            b.bound.to_string(),
            b.sharp_bound.to_string(),
        ]);
        t
    })?;
    Ok(Run { undecided: false })
}

fn plot_table(rep: &gh::ConvergenceReport) -> Table {
    let mut t = Table::new(&["param", "series", "value"]);
    for l in &rep.limit_lengths {
        t.row(vec![String::new(), "limit_length".into(), l.to_string()]);
    }
    for m in &rep.members {
        let p = m.param.to_string();
        t.row(vec![p.clone(), "hausdorff".into(), m.hausdorff.to_string()]);
        for l in &m.lengths {
            t.row(vec![p.clone(), "length".into(), l.to_string()]);
        }
        if let Some(b) = &m.gh {
            t.row(vec![p.clone(), "gh_bound".into(), b.bound.to_string()]);
        }
    }
    t
}

fn cmd_converge(a: &ConvergeArgs, sink: &output::Sink) -> Result<Run, CliError> {
    let family = match a.family {
        FamilyArg::TorusCollapse => Family::TorusCollapse,
        FamilyArg::Constant => Family::Constant(syntax::parse_space(&a.space)?),
        FamilyArg::EllipsoidFlatten => Family::EllipsoidFlatten { rings: a.rings, steiner: a.steiner },
    };
    if a.params.0.is_empty() {
        return Err(CliError::config("--params is empty"));
    }
    let cfg = ExperimentConfig { k: a.k, r: a.r, epsilon: a.eps, gh_r: a.gh_r, spectrum: a.grid.spectrum_config()? };
    let rep = convergence_experiment(&family, &a.params.0, &cfg)?;
    for m in &rep.members {
        report_undecided(&m.spectrum);
    }
    let config = Resolved { args: a, resolved: cfg };
    sink.emit("converge", &config, &rep, || {
        let mut t = Table::new(&["param", "hausdorff", "inclusion", "lengths", "undecided", "gh_bound"]);
        for m in &rep.members {
            t.row(vec![
                m.param.to_string(),
                m.hausdorff.to_string(),
                format!("{:?}", m.inclusion).to_lowercase(),
                m.lengths.len().to_string(),
                m.undecided.to_string(),
                m.gh.as_ref().map(|b| b.bound.to_string()).unwrap_or_default(),
            ]);
        }
        t
    })?;
    if let Some(path) = &a.plot {
        output::write_csv(path, "converge", &config, &plot_table(&rep))?;
    }
    let undecided = rep.members.iter().any(|m| m.undecided > 0 || m.inclusion == Inclusion::Inconclusive);
    Ok(Run { undecided })
}

#[derive(Serialize)]
struct GapOutput {
    lengths: Vec<f64>,
    undecided: Vec<f64>,
    #[serde(flatten)]
    gap: GapResult,
}

fn cmd_gap(a: &GapArgs, sink: &output::Sink) -> Result<Run, CliError> {
    if a.a > a.b {
        return Err(CliError::config(format!("need a ≤ b, got a={} b={}", a.a, a.b)));
    }
    let space = syntax::parse_space(&a.space.space)?;
    let cfg = a.grid.spectrum_config()?;
    let s = spectrum_of(&space, a.k, Some(a.r), false, &cfg)?;
    report_undecided(&s);
    let gap = gap_check(&s, a.a, a.b, a.eps)?;
    let undecided = matches!(gap, GapResult::Inconclusive { .. });
    let res = GapOutput { lengths: s.lengths(), undecided: s.undecided.iter().map(|u| u.length).collect(), gap };
    let config = Resolved { args: a, resolved: cfg };
    sink.emit("gap", &config, &res, || {
        let mut t = Table::new(&["result", "lengths"]);
        let (name, ls) = match &res.gap {
            GapResult::Gap => ("gap", Vec::new()),
            GapResult::Occupied { lengths, .. } => ("occupied", lengths.clone()),
            GapResult::Inconclusive { lengths } => ("inconclusive", lengths.clone()),
        };
        t.row(vec![name.into(), ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";")]);
        t
    })?;
    Ok(Run { undecided })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(exit_status(run(&cli)))
}

/// 0 on clean success, 2 when undecided entries remain, 1 on errors.
fn exit_status(res: Result<Run, CliError>) -> u8 {
    match res {
        Ok(Run { undecided: false }) => 0,
        Ok(Run { undecided: true }) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use std::f64::consts::PI;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_statuses() {
        assert_eq!(exit_status(Ok(Run { undecided: false })), 0);
        assert_eq!(exit_status(Ok(Run { undecided: true })), 2);
        assert_eq!(exit_status(Err(CliError::config("bad"))), 1);
    }

    #[test]
    fn parses_expressions_in_flags() {
        let cli = Cli::try_parse_from(["lsl", "spectrum", "--space", "circle:pi", "--k", "3", "--R", "2*pi"]).unwrap();
        match cli.command {
            Command::Spectrum(a) => assert_eq!(a.r, Some(2.0 * PI)),
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["lsl", "spectrum", "--space", "circle:pi", "--R", "-1"]).is_err());
        assert!(Cli::try_parse_from(["lsl", "spectrum", "--space", "circle:pi", "--open"]).is_err());
    }
}
