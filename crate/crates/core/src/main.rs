use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use liftlattice::census::{brute_force_census, explicit_census, voltage_census, CensusReport};
use liftlattice::certify::{construct, verify_certificate, LiftCertificate, Policy, SearchOptions, DEFAULT_POOL};
use liftlattice::embed::{default_resolution, find_good_try, is_good_try, lattice_properties, Embedding};
use liftlattice::entropy::{format_table, lattice_report, min_degree_for_kappa, LatticeSummary};
use liftlattice::graph::{build_root_unit_graph, validate, LabeledGraph};
use liftlattice::rational;
use liftlattice::voltage::{derived_torus, full_unit_graph};
use liftlattice::Error;

#[derive(Parser)]
#[command(name = "liftlattice", version, about = "Periodic bipartite lattices from fiber-uniform 2-lifts")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a lift certificate.
    Construct(ConstructArgs),
    /// Re-verify a certificate from scratch.
    Verify(VerifyArgs),
    /// Exact C4 / C6 / theta counts of a graph or of a certified lattice.
    Census(CensusArgs),
    /// Per-vertex averages and d6 of a certificate or census file.
    Report(ReportArgs),
    /// Find a straight-line placement of a full unit graph.
    Embed(EmbedArgs),
    /// Write graphs as JSON and DOT.
    Export(ExportArgs),
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    rational::parse(text).map_err(|e| e.to_string())
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, conflicts_with = "kappa", required_unless_present = "kappa")]
    d: Option<u32>,
    /// Target ratio; the degree becomes the smallest one exceeding it.
    #[arg(long, value_parser = parse_rational)]
    kappa: Option<BigRational>,
    #[arg(long, default_value_t = 40)]
    max_s: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Policy::Greedy)]
    policy: Policy,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    certificate: PathBuf,
    /// Torus side for the explicit cross-check, run when s <= 3.
    #[arg(long, default_value_t = 2)]
    torus_n: u32,
    #[arg(long, value_parser = parse_rational)]
    kappa: Option<BigRational>,
}

#[derive(Args)]
struct CensusArgs {
    /// Graph JSON, or a certificate for a per-cube lattice census.
    input: PathBuf,
    /// Also count by subset enumeration and compare (small graphs only).
    #[arg(long)]
    brute_force: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Certificate or census JSON.
    input: PathBuf,
    #[arg(long, value_parser = parse_rational)]
    kappa: Option<BigRational>,
    #[arg(long)]
    json: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Certificate whose full unit graph is placed.
    #[arg(required_unless_present = "check")]
    certificate: Option<PathBuf>,
    /// Keep only the first stages of the certificate.
    #[arg(long)]
    trunc_s: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_attempts: u64,
    #[arg(long, value_parser = parse_rational)]
    resolution: Option<BigRational>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    obj: Option<PathBuf>,
    /// Re-check an existing embedding file instead.
    #[arg(long, conflicts_with = "certificate")]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Certificate or embedding JSON; without it the root unit graph of `--d`.
    #[arg(required_unless_present = "d")]
    input: Option<PathBuf>,
    #[arg(long, conflicts_with = "input")]
    d: Option<u32>,
    #[arg(long)]
    trunc_s: Option<u32>,
    /// Export the derived torus of this side instead of the full unit graph.
    #[arg(long)]
    torus_n: Option<u32>,
    /// Output prefix; writes PREFIX.json and PREFIX.dot.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write PREFIX.obj (embedding input only).
    #[arg(long)]
    obj: bool,
}

type CliResult = Result<ExitCode, Error>;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetExhausted { .. } | Error::AttemptsExhausted { .. } => 3,
        Error::InvalidCertificate(_) | Error::MalformedGraph(_) | Error::CentralEdgeCrossed { .. } | Error::Json(_) => {
            1
        }
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            eprintln!("wrote {}", p.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_construct(args: ConstructArgs) -> CliResult {
    let d = match (args.d, &args.kappa) {
        (Some(d), _) => d,
        (None, Some(k)) => {
            let d = min_degree_for_kappa(k);
            let d = u32::try_from(d).map_err(|_| Error::InvalidArgument(format!("kappa {k} needs degree {d}")))?;
            eprintln!("kappa {} -> d = {d}", rational::format(k));
            d
        }
        (None, None) => unreachable!("clap requires --d or --kappa"),
    };
    let opts = SearchOptions { policy: args.policy, max_s: args.max_s, seed: args.seed, pool: DEFAULT_POOL };
    let run = construct(d, opts)?;
    eprintln!(
        "d = {d}: {} constraint cycles, s = {}, search {:.2?}",
        run.certificate.constraint_count, run.certificate.s, run.search_time
    );
    eprint!("{}", run.verification.transcript());
    emit(args.output.as_deref(), &run.certificate.to_json()?)?;
    Ok(status(run.verification.passed()))
}

fn run_verify(args: VerifyArgs) -> CliResult {
    if args.torus_n < 2 {
        return Err(Error::TorusTooSmall { n: args.torus_n });
    }
    let cert = LiftCertificate::from_json(&read(&args.certificate)?)?;
    let (base, volt) = cert.assignment()?;
    let verification = verify_certificate(&base, &volt);
    print!("{}", verification.transcript());
    let mut ok = verification.passed();
    if verification.flags != cert.flags {
        println!("recorded flags {:?} differ from recomputed flags", cert.flags);
        ok = false;
    }
    if cert.s <= 3 {
        let n = args.torus_n;
        let torus = derived_torus(&base, &volt, n)?;
        let explicit = explicit_census(&torus);
        let cubes = (n as u128).pow(3);
        let per_cube = &verification.census;
        let agrees = explicit.c4_total == per_cube.c4_total * cubes
            && explicit.c6 == per_cube.c6 * cubes
            && explicit.theta222 == per_cube.theta222 * cubes
            && validate(&torus, Some(cert.d as usize)).passed();
        println!("explicit torus n = {n}: {}", if agrees { "agrees" } else { "DISAGREES" });
        ok &= agrees;
    }
    if ok {
        let summary = LatticeSummary::from_census(&verification.census, args.kappa);
        print!("{}", format_table(&[summary]));
    }
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(status(ok))
}

fn run_census(args: CensusArgs) -> CliResult {
    let text = read(&args.input)?;
    let report = if let Ok(graph) = LabeledGraph::from_json(&text) {
        let report = explicit_census(&graph);
        if args.brute_force {
            let brute = brute_force_census(&graph)?;
            let same = brute == report;
            eprintln!("brute force: {}", if same { "agrees" } else { "DISAGREES" });
            if !same {
                emit(args.output.as_deref(), &report.to_json()?)?;
                return Ok(ExitCode::from(1));
            }
        }
        report
    } else {
        let cert = LiftCertificate::from_json(&text)?;
        let (base, volt) = cert.assignment()?;
        voltage_census(&base, &volt)
    };
    emit(args.output.as_deref(), &report.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn run_report(args: ReportArgs) -> CliResult {
    let text = read(&args.input)?;
    let summary = match LiftCertificate::from_json(&text) {
        Ok(cert) => lattice_report(&cert, args.kappa)?,
        Err(_) => LatticeSummary::from_census(&CensusReport::from_json(&text)?, args.kappa),
    };
    let out = if args.json { summary.to_json()? } else { format_table(&[summary]) };
    emit(args.output.as_deref(), out.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

fn full_unit_graph_of(cert: &LiftCertificate, trunc_s: Option<u32>) -> Result<LabeledGraph, Error> {
    let (_, volt) = cert.assignment()?;
    let s = trunc_s.unwrap_or(cert.s);
    if s > cert.s {
        return Err(Error::InvalidArgument(format!("--trunc-s {s} exceeds the certificate's s = {}", cert.s)));
    }
    full_unit_graph(&build_root_unit_graph(cert.d)?, &volt.truncated(s))
}

fn check_embedding(emb: &Embedding) -> bool {
    let good = is_good_try(&emb.placement, &emb.graph);
    let props = lattice_properties(&emb.placement, &emb.graph);
    println!("segments meet only at shared vertices: {}", if good { "yes" } else { "NO" });
    println!("vertices inside unit cubes:            {}", props.vertices_inside_cubes);
    println!("edges are straight segments:           {}", props.edges_straight);
    println!("edges join the same or adjacent cubes: {}", props.edges_between_neighbor_cubes);
    println!("invariant under integer translation:   {}", props.translation_invariant);
    good && props.all()
}

fn run_embed(args: EmbedArgs) -> CliResult {
    if let Some(path) = args.check {
        let emb = Embedding::from_json(&read(&path)?)?;
        let ok = check_embedding(&emb);
        println!("{}", if ok { "PASS" } else { "FAIL" });
        return Ok(status(ok));
    }
    let path = args.certificate.expect("clap requires a certificate");
    let cert = LiftCertificate::from_json(&read(&path)?)?;
    let fug = full_unit_graph_of(&cert, args.trunc_s)?;
    let resolution = args.resolution.unwrap_or_else(default_resolution);
    let good = find_good_try(&fug, args.seed, args.max_attempts, &resolution)?;
    eprintln!(
        "good try after {} attempt(s): {} vertices, {} edges",
        good.attempts,
        fug.vertex_count(),
        fug.edge_count()
    );
    let emb = Embedding::new(fug, good);
    if let Some(obj) = &args.obj {
        std::fs::write(obj, emb.to_obj())?;
        eprintln!("wrote {}", obj.display());
    }
    emit(args.output.as_deref(), &emb.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn run_export(args: ExportArgs) -> CliResult {
    let mut embedding = None;
    let graph = match (&args.input, args.d) {
        (Some(path), _) => {
            let text = read(path)?;
            match LiftCertificate::from_json(&text) {
                Ok(cert) => match args.torus_n {
                    Some(n) => {
                        let (base, volt) = cert.assignment()?;
                        derived_torus(&base, &volt.truncated(args.trunc_s.unwrap_or(cert.s).min(cert.s)), n)?
                    }
                    None => full_unit_graph_of(&cert, args.trunc_s)?,
                },
                Err(_) => {
                    let emb = Embedding::from_json(&text)?;
                    let graph = emb.graph.clone();
                    embedding = Some(emb);
                    graph
                }
            }
        }
        (None, Some(d)) => build_root_unit_graph(d)?,
        (None, None) => unreachable!("clap requires an input or --d"),
    };
    let with_ext = |ext: &str| {
        let mut p = args.output.clone().into_os_string();
        p.push(ext);
        PathBuf::from(p)
    };
    std::fs::write(with_ext(".json"), graph.to_json()?)?;
    std::fs::write(with_ext(".dot"), graph.to_dot())?;
    eprintln!("wrote {0}.json and {0}.dot", args.output.display());
    if args.obj {
        let emb = embedding.ok_or_else(|| Error::InvalidArgument("--obj needs an embedding input".into()))?;
        std::fs::write(with_ext(".obj"), emb.to_obj())?;
        eprintln!("wrote {}.obj", args.output.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Census(a) => run_census(a),
        Command::Report(a) => run_report(a),
        Command::Embed(a) => run_embed(a),
        Command::Export(a) => run_export(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}
