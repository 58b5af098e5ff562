//! Command-line front end: generate example spaces, classify them, compute
//! M, build embeddings, extract maximal strict subspaces, evaluate L1
//! bounds, and run the extremal configuration search. Spaces travel as JSON
//! `{"n": int, "d": [[real]]}`, point sets as CSV `label,x1,...,xk`;
//! commands compose through files and pipes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qhm::{
    angle_classification, classify, config_to_metric, diameter, enumerate_maximal_strict_subspaces,
    gen_box_corners, gen_circle, gen_discrete, gen_join_discrete_cycle, gen_join_discrete_pair,
    gen_random_nonobtuse, gen_random_nonobtuse_on_sphere, gen_star, hypermetric_check_bounded,
    knr_lower_bound_search, l1_necessary_condition, l1_upper_bounds,
    m_value, m_value_oracle, maximal_strict_subspace, schoenberg_embed, AngleClassification,
    DistanceMatrix, L1Config, MValue, PointConfig, DEFAULT_ENUM_CAP, DEFAULT_SUBSET_CAP,
    DEFAULT_TOL,
};

#[derive(Parser)]
#[command(
    name = "qhm",
    about = "Analysis of finite quasihypermetric metric spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Numerical tolerance for validation and spectral tests
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Seed for randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output path (defaults to standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel sections (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an example space and emit it as space.json
    Generate(GenerateArgs),
    /// Classification verdicts with certificates
    Classify(ClassifyArgs),
    /// The constant M with its finite/infinite dichotomy
    MValue(MValueArgs),
    /// Embed (X, sqrt(d)) isometrically and emit points.csv
    Embed(InputArgs),
    /// Point configuration utilities (points.csv to space.json)
    Config(ConfigArgs),
    /// Maximal strictly quasihypermetric subspaces
    Subspace(SubspaceArgs),
    /// Upper bounds on M for a point set under the 1-norm
    L1Bounds(L1Args),
    /// Hill-climbing lower-bound search over configurations of a given type
    SearchKnr(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Discrete,
    Circle,
    Box,
    Star,
    Join,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    /// Example family to construct
    #[arg(long, value_enum)]
    family: Family,

    /// Point count (discrete, star) or left-block size (join) or point count (random)
    #[arg(long)]
    n: Option<usize>,

    /// Point count on the circle
    #[arg(long)]
    k: Option<usize>,

    /// Circle radius
    #[arg(long)]
    radius: Option<f64>,

    /// Box half-sides, comma separated (e.g. 0.5,0.5,0.5)
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<f64>>,

    /// Optional corner subset for the box family, comma separated indices
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,

    /// Join closeness parameter
    #[arg(long)]
    eps: Option<f64>,

    /// Join the discrete block with a 4-point cycle instead of a pair
    /// (the non-strict variant)
    #[arg(long)]
    nonstrict: bool,

    /// Ambient dimension for the random family
    #[arg(long)]
    dim: Option<usize>,

    /// Constrain random points to the unit sphere
    #[arg(long)]
    sphere: bool,

    /// Sampling attempts for the random family
    #[arg(long, default_value_t = 100)]
    attempts: usize,
}

#[derive(Args)]
struct InputArgs {
    /// space.json path; standard input when omitted or "-"
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Also scan the hypermetric inequalities with integer weights up to
    /// this bound
    #[arg(long)]
    hypermetric_bound: Option<i64>,
}

#[derive(Args)]
struct MValueArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Also run the independent ascent oracle
    #[arg(long)]
    oracle: bool,

    /// Iteration budget per oracle restart
    #[arg(long, default_value_t = 10_000)]
    oracle_budget: usize,
}

#[derive(Args)]
struct ConfigArgs {
    /// points.csv path; standard input when omitted or "-"
    #[arg(long)]
    input: Option<PathBuf>,

    /// Emit the squared-distance metric of the configuration
    #[arg(long)]
    to_metric: bool,
}

#[derive(Args)]
struct SubspaceArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Enumerate every maximal strict subset instead of extracting one
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args)]
struct L1Args {
    /// points.csv path; standard input when omitted or "-"
    #[arg(long)]
    points: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Cardinality of the spaces searched
    #[arg(long)]
    n: usize,

    /// Maximal strict subspace cardinality
    #[arg(long)]
    r: usize,

    /// Total move proposals across restarts
    #[arg(long, default_value_t = 100_000)]
    budget: u64,

    /// Stop once the ratio reaches this threshold
    #[arg(long)]
    threshold: Option<f64>,

    /// Also write the improvement history as CSV to this path
    #[arg(long)]
    history_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    qhm::configure_threads(cli.threads);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Read>> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Ok(Box::new(BufReader::new(file)))
        }
        _ => Ok(Box::new(std::io::stdin().lock())),
    }
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn load_space(path: &Option<PathBuf>) -> anyhow::Result<DistanceMatrix> {
    qhm::read_space(read_input(path)?).context("reading space.json")
}

fn emit_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> anyhow::Result<()> {
    let mut w = open_output(out)?;
    serde_json::to_writer(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let tol = cli.tol;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(anyhow!("tolerance must be positive"));
    }
    match cli.command {
        Command::Generate(args) => {
            let space = generate(&args, cli.seed)?;
            emit_json(&cli.out, &space)
        }
        Command::Classify(args) => {
            let d = load_space(&args.input.input)?;
            let classification = classify(&d, tol)?;
            let hypermetric = match args.hypermetric_bound {
                Some(bound) => Some(hypermetric_check_bounded(&d, bound, DEFAULT_ENUM_CAP)?),
                None => None,
            };
            let l1_possible = l1_necessary_condition(&d, tol)?;
            #[derive(serde::Serialize)]
            struct Output {
                #[serde(flatten)]
                classification: qhm::Classification,
                #[serde(skip_serializing_if = "Option::is_none")]
                hypermetric: Option<qhm::HypermetricVerdict>,
                l1_embeddable_necessary: bool,
            }
            emit_json(
                &cli.out,
                &Output {
                    classification,
                    hypermetric,
                    l1_embeddable_necessary: l1_possible,
                },
            )
        }
        Command::MValue(args) => {
            let d = load_space(&args.input.input)?;
            let value = m_value(&d, tol)?;
            let oracle = if args.oracle {
                Some(m_value_oracle(&d, args.oracle_budget)?)
            } else {
                None
            };
            #[derive(serde::Serialize)]
            struct Output {
                status: &'static str,
                #[serde(skip_serializing_if = "Option::is_none")]
                m: Option<f64>,
                #[serde(skip_serializing_if = "Option::is_none")]
                invariant: Option<Vec<f64>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                oracle: Option<f64>,
            }
            let output = match value {
                MValue::Finite { value, invariant } => Output {
                    status: "finite",
                    m: Some(value),
                    invariant: Some(invariant.weights().to_vec()),
                    oracle,
                },
                MValue::Infinite => Output {
                    status: "infinite",
                    m: None,
                    invariant: None,
                    oracle,
                },
                MValue::NotQuasihypermetric => Output {
                    status: "not_quasihypermetric",
                    m: None,
                    invariant: None,
                    oracle,
                },
            };
            emit_json(&cli.out, &output)
        }
        Command::Embed(args) => {
            let d = load_space(&args.input)?;
            let config = schoenberg_embed(&d, tol)?;
            let labels: Vec<String> = (0..config.len()).map(|i| config.label_of(i)).collect();
            qhm::write_points(open_output(&cli.out)?, &labels, config.points())?;
            Ok(())
        }
        Command::Config(args) => {
            if !args.to_metric {
                return Err(anyhow!("nothing to do: pass --to-metric"));
            }
            let pts = qhm::read_points(read_input(&args.input)?)?;
            let config = PointConfig::with_labels(pts.points, pts.labels)?;
            let d = config_to_metric(&config)?;
            emit_json(&cli.out, &d)
        }
        Command::Subspace(args) => {
            let d = load_space(&args.input.input)?;
            if args.enumerate {
                let sets = enumerate_maximal_strict_subspaces(&d, tol, DEFAULT_SUBSET_CAP)?;
                #[derive(serde::Serialize)]
                struct Output {
                    cardinality: usize,
                    count: usize,
                    subsets: Vec<Vec<usize>>,
                }
                emit_json(
                    &cli.out,
                    &Output {
                        cardinality: sets.first().map_or(0, |s| s.len()),
                        count: sets.len(),
                        subsets: sets,
                    },
                )
            } else {
                let result = maximal_strict_subspace(&d, tol)?;
                emit_json(&cli.out, &result)
            }
        }
        Command::L1Bounds(args) => {
            let pts = qhm::read_points(read_input(&args.points)?)?;
            let config = L1Config::with_labels(pts.points, pts.labels)?;
            let report = l1_upper_bounds(&config, tol)?;
            emit_json(&cli.out, &report)
        }
        Command::SearchKnr(args) => {
            let result =
                knr_lower_bound_search(args.n, args.r, args.budget, cli.seed, args.threshold)?;
            if let Some(path) = &args.history_out {
                let mut w = BufWriter::new(
                    File::create(path).with_context(|| format!("creating {}", path.display()))?,
                );
                writeln!(w, "move,ratio")?;
                for (step, ratio) in &result.history {
                    writeln!(w, "{step},{ratio:?}")?;
                }
            }
            emit_json(&cli.out, &result)
        }
    }
}

fn generate(args: &GenerateArgs, seed: u64) -> anyhow::Result<DistanceMatrix> {
    let need = |v: Option<usize>, what: &str| v.ok_or_else(|| anyhow!("--{what} is required"));
    match args.family {
        Family::Discrete => Ok(gen_discrete(need(args.n, "n")?)),
        Family::Circle => {
            let k = need(args.k, "k")?;
            let radius = args.radius.ok_or_else(|| anyhow!("--radius is required"))?;
            Ok(gen_circle(k, radius)?)
        }
        Family::Box => {
            let a = args
                .a
                .clone()
                .ok_or_else(|| anyhow!("--a half-sides are required"))?;
            let (_, d) = gen_box_corners(&a, args.subset.as_deref())?;
            Ok(d)
        }
        Family::Star => {
            let (_, d, _) = gen_star(need(args.n, "n")?)?;
            Ok(d)
        }
        Family::Join => {
            let m = need(args.n, "n")?;
            let eps = args.eps.ok_or_else(|| anyhow!("--eps is required"))?;
            if args.nonstrict {
                Ok(gen_join_discrete_cycle(m, eps)?)
            } else {
                Ok(gen_join_discrete_pair(m, eps)?)
            }
        }
        Family::Random => {
            let n = need(args.n, "n")?;
            let dim = need(args.dim, "dim")?;
            let config = if args.sphere {
                gen_random_nonobtuse_on_sphere(n, dim, seed, args.attempts)?
            } else {
                gen_random_nonobtuse(n, dim, seed, args.attempts)?
            };
            debug_assert!(!matches!(
                angle_classification(&config, DEFAULT_TOL)?,
                AngleClassification::Obtuse { .. }
            ));
            let d = config_to_metric(&config)?;
            let _ = diameter(&d);
            Ok(d)
        }
    }
}
