use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use quesadilla::{
    generate, pass_histogram, prefix_plan, quesadilla_plan, read_tns_with, transpose_in_place,
    write_tns, BucketSchedule, CooTensor, GenSpec, Ordering, ParallelConfig, SortStrategy,
    TnsOptions, TransposeOptions, Workspace,
};
use quesadilla_cli::bench::{run_bench, write_csv, BenchConfig};

/// Sparse COO tensor transposition with pass-minimal histogram sorting.
///
/// Orderings are written 1-based, as digit strings ("2134") or, above rank 9,
/// comma-separated ("2,1,3,...").
#[derive(Parser)]
#[command(name = "quesadilla", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a .tns file, sort it under a target ordering, write the result.
    Transpose(TransposeArgs),
    /// Print the partial-sort passes used to reach a target ordering.
    Plan(PlanArgs),
    /// Exit 0 if a .tns file is sorted under an ordering, 1 otherwise.
    Verify(VerifyArgs),
    /// Write a seeded uniform random tensor.
    Gen(GenArgs),
    /// Time strategies over target orderings and write CSV.
    Bench(BenchArgs),
    /// Count target orderings of a rank by the passes they need.
    Passes(PassesArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Declared dimensions, e.g. 100x50x20. Inferred from the data otherwise.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<Dims>,
    /// Keep the file's row order instead of sorting it to the simple ordering.
    #[arg(long)]
    no_canonicalize: bool,
}

#[derive(Args)]
struct ParallelArgs {
    /// Worker count. Defaults to $QUESADILLA_WORKERS, then the hardware thread count.
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long, value_enum, default_value_t = Schedule::Dynamic)]
    schedule: Schedule,
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    Dynamic,
    Guided,
}

#[derive(Args)]
struct TransposeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = parse_ordering)]
    target: Ordering,
    #[arg(long, default_value = "quesadilla", value_parser = parse_strategy)]
    strategy: SortStrategy,
    #[command(flatten)]
    parallel: ParallelArgs,
    #[arg(long)]
    output: PathBuf,
    /// Check every pass's input ordering.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    rank: usize,
    #[arg(long, value_parser = parse_ordering)]
    target: Ordering,
    /// Only establish the first K target modes.
    #[arg(long)]
    prefix: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_ordering)]
    ordering: Ordering,
    #[arg(long, value_parser = parse_dims)]
    dims: Option<Dims>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_dims)]
    dims: Dims,
    #[arg(long)]
    nnz: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resample until all coordinates are distinct.
    #[arg(long)]
    distinct: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Tensor name for the CSV. Defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    /// "all" or a comma-separated list (qsort, splatt, topK, quesadilla, radix).
    #[arg(long, default_value = "all", value_parser = parse_strategies)]
    strategies: Selection<Vec<SortStrategy>>,
    /// "all" or one or more orderings.
    #[arg(long, num_args = 1.., default_value = "all", value_parser = parse_target)]
    targets: Vec<Selection<Ordering>>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value = "top1", value_parser = parse_strategy)]
    reference: SortStrategy,
    #[arg(long)]
    csv: PathBuf,
    #[command(flatten)]
    parallel: ParallelArgs,
}

#[derive(Args)]
struct PassesArgs {
    #[arg(long)]
    rank: usize,
}

#[derive(Clone)]
enum Selection<T> {
    All,
    Some(T),
}

fn parse_strategies(s: &str) -> Result<Selection<Vec<SortStrategy>>, String> {
    if s.trim() == "all" {
        return Ok(Selection::All);
    }
    s.split(',').map(parse_strategy).collect::<Result<_, _>>().map(Selection::Some)
}

fn parse_target(s: &str) -> Result<Selection<Ordering>, String> {
    if s.trim() == "all" {
        return Ok(Selection::All);
    }
    parse_ordering(s).map(Selection::Some)
}

fn parse_ordering(s: &str) -> Result<Ordering, String> {
    Ordering::parse_one_based(s).map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<SortStrategy, String> {
    s.parse().map_err(|e: quesadilla::Error| e.to_string())
}

#[derive(Clone)]
struct Dims(Vec<usize>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    s.split(['x', 'X', ','])
        .map(|d| match d.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("bad dimension {d:?} in {s:?}")),
        })
        .collect::<Result<_, _>>()
        .map(Dims)
}

impl ParallelArgs {
    fn config(&self) -> Result<ParallelConfig> {
        let cfg = match self.parallel {
            Some(p) => ParallelConfig::new(p)?,
            None => ParallelConfig::from_env()?,
        };
        Ok(cfg.with_schedule(match self.schedule {
            Schedule::Dynamic => BucketSchedule::Dynamic,
            Schedule::Guided => BucketSchedule::Guided,
        }))
    }
}

fn load(args: &InputArgs) -> Result<CooTensor> {
    let opts = TnsOptions { dims: args.dims.clone().map(|d| d.0), canonicalize: !args.no_canonicalize };
    let (t, _) = read_tns_with(&args.input, &opts)
        .with_context(|| format!("reading {}", args.input.display()))?;
    Ok(t)
}

fn check_rank(t: &CooTensor, o: &Ordering) -> Result<()> {
    if t.rank() != o.rank() {
        bail!("ordering {} has rank {}, tensor has rank {}", o.to_one_based(), o.rank(), t.rank());
    }
    Ok(())
}

fn transpose(args: TransposeArgs) -> Result<ExitCode> {
    let mut t = load(&args.input)?;
    check_rank(&t, &args.target)?;
    let opts = TransposeOptions { verify: args.verify, parallel: Some(args.parallel.config()?) };
    let passes = transpose_in_place(&mut t, &args.target, args.strategy, &opts, &mut Workspace::new())?;
    write_tns(&t, &args.output).with_context(|| format!("writing {}", args.output.display()))?;
    println!(
        "{} nonzeros sorted under {} by {} in {} passes",
        t.nnz(),
        args.target.to_one_based(),
        args.strategy,
        passes.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn plan(args: PlanArgs) -> Result<ExitCode> {
    if args.target.rank() != args.rank {
        bail!("target {} does not have rank {}", args.target.to_one_based(), args.rank);
    }
    let plan = match args.prefix {
        Some(k) => prefix_plan(&args.target, k)?,
        None => quesadilla_plan(&args.target),
    };
    let cost = plan.cost();
    println!("target {} reached as {}", args.target.to_one_based(), plan.target.to_one_based());
    for (i, s) in plan.steps.iter().enumerate() {
        let prefix: Vec<String> = plan
            .ordering_before(i)?
            .modes()[..s.prefix_len]
            .iter()
            .map(|m| (m + 1).to_string())
            .collect();
        println!(
            "  pass {}: sort mode {} keeping ({}) {}",
            i + 1,
            s.mode + 1,
            prefix.join(","),
            if s.is_bucketed() { "bucketed" } else { "non-bucketed" }
        );
    }
    println!("  {} passes, {} bucketed", cost.total_passes, cost.bucketed_passes);
    for s in &plan.steps {
        println!("STEP prefix_len={} mode={} bucketed={}", s.prefix_len, s.mode + 1, s.is_bucketed() as u8);
    }
    println!("COST total_passes={} bucketed_passes={}", cost.total_passes, cost.bucketed_passes);
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let input = InputArgs { input: args.input, dims: args.dims, no_canonicalize: true };
    let t = load(&input)?;
    check_rank(&t, &args.ordering)?;
    if t.is_sorted_under(&args.ordering)? {
        println!("sorted under {}", args.ordering.to_one_based());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("not sorted under {}", args.ordering.to_one_based());
        Ok(ExitCode::FAILURE)
    }
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let mut spec = GenSpec::new(args.dims.0, args.nnz, args.seed);
    if args.distinct {
        spec = spec.distinct();
    }
    let t = generate(&spec)?;
    write_tns(&t, &args.output).with_context(|| format!("writing {}", args.output.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let t = load(&args.input)?;
    let r = t.rank();
    let strategies = match args.strategies {
        Selection::All => SortStrategy::all_for_rank(r),
        Selection::Some(v) => v,
    };
    let targets: Vec<Ordering> = if args.targets.iter().any(|t| matches!(t, Selection::All)) {
        Ordering::all(r).collect()
    } else {
        args.targets
            .into_iter()
            .filter_map(|t| match t {
                Selection::Some(o) => Some(o),
                Selection::All => None,
            })
            .collect()
    };
    for target in &targets {
        check_rank(&t, target)?;
    }
    let name = args.name.unwrap_or_else(|| stem(&args.input.input));
    let cfg = BenchConfig { reps: args.reps, reference: args.reference, parallel: Some(args.parallel.config()?) };
    let records = run_bench(&name, &t, &targets, &strategies, &cfg)?;
    let file = File::create(&args.csv).with_context(|| format!("creating {}", args.csv.display()))?;
    write_csv(&records, BufWriter::new(file))?;
    println!("{} records written to {}", records.len(), args.csv.display());
    Ok(ExitCode::SUCCESS)
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "tensor".into(), |s| s.to_string_lossy().into_owned())
}

fn passes(args: PassesArgs) -> Result<ExitCode> {
    let hist = pass_histogram(args.rank)?;
    let line: Vec<String> = hist.iter().map(|(p, n)| format!("{p}:{n}")).collect();
    println!("{}", line.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Transpose(a) => transpose(a),
        Command::Plan(a) => plan(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench(a),
        Command::Passes(a) => passes(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
