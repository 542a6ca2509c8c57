//! Command-line driver. Exit code 0 means success, 2 means a verification
//! or structure match failed, 1 means an error prevented the run.

use clap::{Args, Parser, Subcommand};
use hermikron::bundles::{enumerate_bounded, enumerate_regular, BundleDescriptor};
use hermikron::canonical::{build_block, CanonicalBlock, Hkcf};
use hermikron::codim::{
    orbit_codim_assembled, orbit_codim_bruteforce, pair_system_dim, realify, solution_space_dim,
    Backend,
};
use hermikron::experiment::{
    csv_string, emit_csv, emit_plotdata, experiment_rank, experiment_regular, Generator, Shift,
};
use hermikron::infer::{full_report, match_descriptor};
use hermikron::perturb::{all_pass, verify_prediction, PerturbationSpec};
use hermikron::{Error, HermitianPencil, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hermikron",
    version,
    about = "Hermitian matrix pencils: canonical structures, generic eigenstructure \
             enumeration, codimensions, structured perturbations, inference, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the generic complete eigenstructures at a given size.
    Enumerate(EnumerateArgs),
    /// Orbit and bundle codimensions of a canonical structure.
    Codim(CodimArgs),
    /// Build a structured perturbation and optionally verify its prediction.
    Perturb(PerturbArgs),
    /// Infer the complete eigenstructure of a numeric Hermitian pencil.
    Infer(InferArgs),
    /// Seeded numerical experiments emitting CSV rows.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Pencil size n.
    #[arg(long)]
    n: usize,
    /// Rank bound; omit for the regular family (r = n).
    #[arg(long)]
    r: Option<usize>,
    /// Emit CSV instead of JSON.
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// Emit JSON (the default).
    #[arg(long)]
    json: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodimArgs {
    /// JSON file holding the canonical block list.
    #[arg(long, required_unless_present = "verify_tables")]
    hkcf: Option<PathBuf>,
    /// Use the exact rational backend.
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Use the floating backend (default for --hkcf).
    #[arg(long)]
    float: bool,
    /// Assemble the codimension from per-block and pairwise systems.
    #[arg(long)]
    assemble: bool,
    /// Check the per-block and pairwise dimension tables instead.
    #[arg(long)]
    verify_tables: bool,
    /// Largest singular block order covered by --verify-tables.
    #[arg(long, default_value_t = 4)]
    kmax: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PerturbArgs {
    /// Family: finiteJordan, infiniteJordan, conjPairSplit, regularizeM,
    /// or singularAbsorb.
    #[arg(long)]
    family: String,
    /// Real eigenvalue of the perturbed Jordan block.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    /// Jordan block order.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Singular block order.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Block sign, +1 or -1.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    sign: i8,
    /// Perturbation strength.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    /// Strength divisor, at least 1.
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Real part of the non-real eigenvalue mu.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu_re: f64,
    /// Imaginary part of mu (positive).
    #[arg(long, default_value_t = 1.0)]
    mu_im: f64,
    /// Verify the prediction against the built pencil; exit 2 on failure.
    #[arg(long)]
    verify: bool,
    /// Seed for the verification's sampled rank decisions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    /// JSON file holding the pencil as {"A": matrix, "B": matrix}.
    #[arg(long)]
    pencil: PathBuf,
    /// Seed for sampled rank decisions and regularization draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Descriptor JSON {n, r, c, d} to match against; exit 2 on mismatch.
    #[arg(long = "match")]
    match_desc: Option<PathBuf>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Random regular pencils with a diagonal shift schedule on B.
    Regular {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 350)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shift schedule: none, linear, or jlogj.
        #[arg(long, default_value = "jlogj")]
        shift: Shift,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a matplotlib stub next to the CSV (needs --out).
        #[arg(long)]
        plot: bool,
    },
    /// Random bounded-rank structures recovered by inference.
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Descriptor sampler: g1 (stratified) or g2 (codimension weighted).
        #[arg(long, default_value = "g1")]
        generator: Generator,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a matplotlib stub next to the CSV (needs --out).
        #[arg(long)]
        plot: bool,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var(hermikron::THREADS_ENV) {
        if let Ok(threads) = raw.trim().parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Enumerate(args) => run_enumerate(args),
        Command::Codim(args) => run_codim(args),
        Command::Perturb(args) => run_perturb(args),
        Command::Infer(args) => run_infer(args),
        Command::Experiment(cmd) => run_experiment(cmd),
    }
}

fn write_out(text: String, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EnumerateRow {
    n: usize,
    r: usize,
    c: usize,
    d: usize,
    alpha: usize,
    s: usize,
    codim_orbit: usize,
    codim_bundle: usize,
    pos: usize,
    neg: usize,
    zero: usize,
}

impl From<&BundleDescriptor> for EnumerateRow {
    fn from(desc: &BundleDescriptor) -> Self {
        let codim = desc.codim_closed_form();
        let inertia = desc.leading_inertia();
        EnumerateRow {
            n: desc.n,
            r: desc.r,
            c: desc.c,
            d: desc.d,
            alpha: desc.alpha,
            s: desc.s,
            codim_orbit: codim.orbit,
            codim_bundle: codim.bundle,
            pos: inertia.pos,
            neg: inertia.neg,
            zero: inertia.zero,
        }
    }
}

fn run_enumerate(args: EnumerateArgs) -> Result<bool> {
    let descriptors = match args.r {
        Some(r) if r == args.n => enumerate_regular(args.n),
        Some(r) => enumerate_bounded(args.n, r)?,
        None => enumerate_regular(args.n),
    };
    let rows: Vec<EnumerateRow> = descriptors.iter().map(EnumerateRow::from).collect();
    let text = if args.csv {
        let mut out = String::from("n,r,c,d,alpha,s,codim_orbit,codim_bundle,pos,neg,zero\n");
        for row in &rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                row.n,
                row.r,
                row.c,
                row.d,
                row.alpha,
                row.s,
                row.codim_orbit,
                row.codim_bundle,
                row.pos,
                row.neg,
                row.zero
            ));
        }
        out
    } else {
        format!("{}\n", serde_json::to_string_pretty(&rows)?)
    };
    write_out(text, args.out.as_ref())?;
    Ok(true)
}

#[derive(Serialize)]
struct TableRow {
    system: String,
    computed: usize,
    expected: usize,
    pass: bool,
}

fn block_dim(block: &CanonicalBlock, backend: Backend) -> Result<usize> {
    solution_space_dim(&realify(&build_block(block)?), backend)
}

fn verify_tables(kmax: usize, backend: Backend) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    let mut push = |system: String, computed: usize, expected: usize| {
        rows.push(TableRow { system, computed, expected, pass: computed == expected });
    };
    for (a, sign) in [(0.0, 1), (1.5, 1), (-2.0, -1)] {
        let block = CanonicalBlock::RealJordan { k: 1, a, sign };
        push(format!("syst J1(a={a}, sign={sign})"), block_dim(&block, backend)?, 1);
    }
    let pair_block = CanonicalBlock::ConjPair { k: 1, mu: Complex64::new(0.0, 1.0) };
    push("syst conjPair(1, i)".into(), block_dim(&pair_block, backend)?, 2);
    for k in 0..=kmax {
        let block = CanonicalBlock::Singular { d: k };
        push(format!("syst M_{k}"), block_dim(&block, backend)?, 2 * k + 2);
    }
    let j_zero = CanonicalBlock::RealJordan { k: 1, a: 0.0, sign: 1 };
    let j_other = CanonicalBlock::RealJordan { k: 1, a: 1.5, sign: -1 };
    push("pair J1 J1".into(), pair_system_dim(&j_zero, &j_other, backend)?, 0);
    for k in 0..=kmax {
        let m = CanonicalBlock::Singular { d: k };
        push(format!("pair J1 M_{k}"), pair_system_dim(&j_zero, &m, backend)?, 2);
    }
    for i in 0..=kmax {
        for j in i..=kmax {
            let mi = CanonicalBlock::Singular { d: i };
            let mj = CanonicalBlock::Singular { d: j };
            let expected = 2 * (2 * j.max(i) + if i == j { 2 } else { 1 });
            push(format!("pair M_{i} M_{j}"), pair_system_dim(&mi, &mj, backend)?, expected);
        }
    }
    Ok(rows)
}

fn run_codim(args: CodimArgs) -> Result<bool> {
    if args.verify_tables {
        let backend = if args.float { Backend::Float } else { Backend::Exact };
        let rows = verify_tables(args.kmax, backend)?;
        let ok = rows.iter().all(|r| r.pass);
        write_out(format!("{}\n", serde_json::to_string_pretty(&rows)?), args.out.as_ref())?;
        return Ok(ok);
    }
    let path = args.hkcf.expect("clap enforces --hkcf without --verify-tables");
    let hkcf: Hkcf = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let backend = if args.exact { Backend::Exact } else { Backend::Float };
    let result = if args.assemble {
        orbit_codim_assembled(&hkcf, backend)?
    } else {
        orbit_codim_bruteforce(&hkcf, backend)?
    };
    write_out(format!("{}\n", serde_json::to_string_pretty(&result)?), args.out.as_ref())?;
    Ok(true)
}

fn run_perturb(args: PerturbArgs) -> Result<bool> {
    let spec = match args.family.as_str() {
        "finiteJordan" => PerturbationSpec::FiniteJordan {
            a: args.a,
            k: args.k,
            sign: args.sign,
            eps: args.eps,
            m: args.m,
        },
        "infiniteJordan" => {
            PerturbationSpec::InfiniteJordan { k: args.k, sign: args.sign, eps: args.eps, m: args.m }
        }
        "conjPairSplit" => PerturbationSpec::ConjPairSplit {
            mu_re: args.mu_re,
            mu_im: args.mu_im,
            k: args.k,
            eps: args.eps,
            m: args.m,
        },
        "regularizeM" => PerturbationSpec::RegularizeM { d: args.d, m: args.m },
        "singularAbsorb" => PerturbationSpec::SingularAbsorb {
            mu_re: args.mu_re,
            mu_im: args.mu_im,
            k: args.k,
            d: args.d,
            eps: args.eps,
        },
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown family {other:?}; expected finiteJordan, infiniteJordan, \
                 conjPairSplit, regularizeM, or singularAbsorb"
            )))
        }
    };
    let perturbation = spec.build()?;
    if args.verify {
        let checks = verify_prediction(&perturbation, args.seed)?;
        let ok = all_pass(&checks);
        write_out(format!("{}\n", serde_json::to_string_pretty(&checks)?), args.out.as_ref())?;
        Ok(ok)
    } else {
        write_out(format!("{}\n", serde_json::to_string_pretty(&perturbation)?), args.out.as_ref())?;
        Ok(true)
    }
}

fn run_infer(args: InferArgs) -> Result<bool> {
    let pencil: HermitianPencil = serde_json::from_str(&std::fs::read_to_string(&args.pencil)?)?;
    let report = full_report(&pencil, args.seed)?;
    match args.match_desc {
        Some(path) => {
            let desc: BundleDescriptor = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let outcome = match_descriptor(&report, &desc);
            let ok = outcome.pass;
            let payload = serde_json::json!({ "report": report, "match": outcome });
            write_out(format!("{}\n", serde_json::to_string_pretty(&payload)?), args.out.as_ref())?;
            Ok(ok)
        }
        None => {
            write_out(format!("{}\n", serde_json::to_string_pretty(&report)?), args.out.as_ref())?;
            Ok(true)
        }
    }
}

fn run_experiment(cmd: ExperimentCommand) -> Result<bool> {
    let (rows, out, plot) = match cmd {
        ExperimentCommand::Regular { n, trials, seed, shift, out, plot } => {
            (experiment_regular(n, trials, shift, seed)?, out, plot)
        }
        ExperimentCommand::Rank { n, r, trials, seed, generator, out, plot } => {
            (experiment_rank(n, r, trials, generator, seed)?, out, plot)
        }
    };
    match (out, plot) {
        (Some(path), true) => emit_plotdata(&rows, &path)?,
        (Some(path), false) => emit_csv(&rows, &path)?,
        (None, true) => {
            return Err(Error::InvalidParams("--plot needs --out to place the script".into()))
        }
        (None, false) => print!("{}", csv_string(&rows)),
    }
    Ok(true)
}
