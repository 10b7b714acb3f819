use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rowcut::cglp::{enumerate_facets_with, format_cut, is_integer_hull_facet, FacetOptions, Mode};
use rowcut::harness::{gap_experiment, run_rounds, HarnessError, RoundOptions};
use rowcut::instance::{
    parse_optima, read_mps, write_report, write_report_to, Instance, RoundReport,
};
use rowcut::octahedron::{render_svg, ParametricBody};
use rowcut::rowsystem::{alww_instance, from_tableau, QRowSystem, FRAC_TOL};
use rowcut::scalar::Rational;
use rowcut::simplex::{self, extract_rows, LpStatus};

#[derive(Parser)]
#[command(
    name = "rowcut",
    version,
    about = "Two-row cuts, facet enumeration and separation rounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separation rounds of GMI, triangle and cone cuts.
    Rounds(RoundsArgs),
    /// Separation rounds with GMI cuts only.
    GmiOnly(CommonRoundArgs),
    /// Enumerate the facets of a two-row disjunctive hull.
    Facets(FacetsArgs),
    /// Average gap closed by the facets over random objectives.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Mip,
    Binary,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Mip => Mode::Mip,
            ModeArg::Binary => Mode::Binary,
        }
    }
}

#[derive(Args)]
struct CommonRoundArgs {
    /// MPS file.
    instance: PathBuf,
    #[arg(long, default_value_t = 5)]
    rounds: usize,
    #[arg(long, value_enum, default_value = "binary")]
    mode: ModeArg,
    /// Sidecar with `name = optimum` lines.
    #[arg(long)]
    optima: PathBuf,
    /// CSV report destination; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Known integer solution (`variable = value` lines) checked against every cut.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct RoundsArgs {
    #[command(flatten)]
    common: CommonRoundArgs,
    #[arg(long)]
    triangles: bool,
    #[arg(long)]
    cones: bool,
    #[arg(long)]
    strengthen: bool,
    /// Skip the GMI cuts.
    #[arg(long)]
    no_gmi: bool,
}

#[derive(Args)]
struct FacetsArgs {
    /// `builtin:alww` or an MPS file.
    #[arg(long, default_value = "builtin:alww")]
    instance: String,
    /// Two basic variable names of the MPS instance, comma separated.
    #[arg(long, value_delimiter = ',')]
    rows: Vec<String>,
    #[arg(long, value_enum, default_value = "mip")]
    mode: ModeArg,
    /// Report whether each cut is a facet of the integer hull.
    #[arg(long)]
    check_ih: bool,
    /// Directory receiving one SVG per cut.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 1000)]
    objectives: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rounds(a) => rounds(&a.common, !a.no_gmi, a.triangles, a.cones, a.strengthen),
        Command::GmiOnly(a) => rounds(&a, true, false, false, false),
        Command::Facets(a) => facets(&a),
        Command::Experiment(a) => experiment(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            let breach = matches!(
                e.downcast_ref::<HarnessError>(),
                Some(HarnessError::ValidityBreach { .. } | HarnessError::OverClosure { .. })
            );
            ExitCode::from(if breach { 3 } else { 1 })
        }
    }
}

fn rounds(
    a: &CommonRoundArgs,
    gmi: bool,
    triangles: bool,
    cones: bool,
    strengthen: bool,
) -> Result<()> {
    let instance = read_mps(&a.instance)?;
    let optima = parse_optima(&read(&a.optima)?)?;
    let z_ip = optima
        .get(&instance.name)
        .with_context(|| format!("no known optimum for '{}'", instance.name))?;
    let known_solutions = match &a.solution {
        Some(p) => vec![solution_vector(&instance, p)?],
        None => Vec::new(),
    };
    let opts = RoundOptions {
        rounds: a.rounds,
        gmi,
        triangles,
        cones,
        strengthen,
        mode: a.mode.into(),
        known_solutions,
        ..RoundOptions::default()
    };
    let reports = run_rounds(&instance, z_ip, &opts)?;
    emit_report(&reports, a.report.as_deref())
}

fn emit_report(reports: &[RoundReport], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_report(reports, p).with_context(|| format!("writing {}", p.display()))?,
        None => write_report_to(reports, std::io::stdout().lock())?,
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn solution_vector(instance: &Instance, path: &Path) -> Result<Vec<f64>> {
    let values = parse_optima(&read(path)?)?;
    let mut x = vec![0.0; instance.num_vars];
    for (name, v) in &values.values {
        let j = instance
            .var_index(name)
            .with_context(|| format!("solution names unknown variable '{}'", name))?;
        x[j] = *v;
    }
    Ok(x)
}

/// Two tableau rows of an MPS instance in exact arithmetic.
fn system_from_mps(path: &Path, rows: &[String]) -> Result<QRowSystem<Rational>> {
    if rows.len() != 2 {
        bail!("--rows needs exactly two variable names");
    }
    let instance = read_mps(path)?;
    let basics = rows
        .iter()
        .map(|r| {
            instance
                .var_index(r)
                .with_context(|| format!("unknown variable '{}'", r))
        })
        .collect::<Result<Vec<_>>>()?;
    let sol = simplex::solve(&instance.to_lp_exact());
    if sol.status != LpStatus::Optimal {
        bail!("LP relaxation ended with status {:?}", sol.status);
    }
    let tableau = extract_rows(&sol, &basics)?;
    let n = tableau[0].ray.len();
    Ok(from_tableau(&tableau, &vec![false; n], FRAC_TOL)?)
}

fn facets(a: &FacetsArgs) -> Result<()> {
    let system = if a.instance == "builtin:alww" {
        alww_instance()
    } else if let Some(name) = a.instance.strip_prefix("builtin:") {
        bail!("unknown built-in instance '{}'", name);
    } else {
        system_from_mps(Path::new(&a.instance), &a.rows)?
    };
    let mode: Mode = a.mode.into();
    let t = Instant::now();
    let (cuts, stats) = enumerate_facets_with(&system, mode, &FacetOptions::default())?;
    println!(
        "{} mode: {} cuts ({} bases, {} candidates, {:.2}s)",
        mode,
        cuts.len(),
        stats.bases,
        stats.candidates,
        t.elapsed().as_secs_f64()
    );
    for (k, cut) in cuts.iter().enumerate() {
        let mut line = format!("{:>2}: {}", k + 1, format_cut(cut));
        if a.check_ih {
            let (facet, _) = is_integer_hull_facet(&system, cut);
            line.push_str(if facet {
                " ; integer hull facet"
            } else {
                " ; not an integer hull facet"
            });
        }
        println!("{}", line);
    }
    if let Some(dir) = &a.svg {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (k, cut) in cuts.iter().enumerate() {
            let Some(m) = &cut.multipliers else { continue };
            let path = dir.join(format!("cut-{}.svg", k + 1));
            std::fs::write(
                &path,
                render_svg(&system, &ParametricBody::from_multipliers(m)),
            )
            .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn experiment(a: &ExperimentArgs) -> Result<()> {
    if a.objectives == 0 {
        bail!("--objectives must be positive");
    }
    let system = alww_instance();
    let opts = FacetOptions::default();
    let (mip, _) = enumerate_facets_with(&system, Mode::Mip, &opts)?;
    let (binary, _) = enumerate_facets_with(&system, Mode::Binary, &opts)?;
    let r = gap_experiment(&system, &mip, &binary, a.objectives, a.seed)?;
    let exact = r.records.iter().filter(|x| x.binary_exact).count();
    println!("objectives {} seed {}", r.num_objectives, r.seed);
    println!("mip closure {:.2}", r.avg_gap_closed_mip);
    println!("binary closure {:.2}", r.avg_gap_closed_binary);
    println!("binary exact {}/{}", exact, r.records.len());
    Ok(())
}
