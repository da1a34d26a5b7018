use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use latmn::bases::{echelon_pivots, import_moveset, pivotal_lattice_basis, theorem1_basis};
use latmn::fiber::{connectivity, enumerate_fiber, witness_path, EnumerationOptions, WitnessPath};
use latmn::lattice::kernel_lattice_basis;
use latmn::models::{build_bandmisread, build_contingency, build_mta, build_suffstats};

mod io;
mod manifest;
mod reproduce;

use io::{default_out_dir, load_model, load_vector, resolve_columns, write_file};

#[derive(Parser)]
#[command(name = "latmn", version, about = "Lattice and Markov bases for latent multinomial models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Contingency,
    Mta,
    Suffstats,
    Bandmisread,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Hnf,
    Theorem1,
    Pivotal,
    Import,
}

#[derive(Subcommand)]
enum Command {
    /// Write a configuration matrix (`<name>.mat`) and its label sidecar (`<name>.json`).
    Build {
        family: FamilyArg,
        #[arg(long = "K", short = 'K')]
        k: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        /// Output directory; defaults to $LATMN_OUT_DIR, then the working directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute or import a move set for a matrix and print it in 4ti2 format.
    Basis {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Pivot columns for `pivotal`, by index or label; defaults to the echelon pivots.
        #[arg(long, value_delimiter = ',')]
        pivots: Vec<String>,
        /// Move file for `import`.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate a fiber and report how a move set partitions it.
    Audit {
        #[arg(long)]
        matrix: PathBuf,
        /// Observation as `a,b,c` or a 4ti2 vector file.
        #[arg(long)]
        y: String,
        #[arg(long)]
        moves: PathBuf,
        /// Bound for columns no nonnegative row constrains.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Find a path between two fiber elements.
        #[arg(long, requires = "to")]
        from: Option<String>,
        #[arg(long, requires = "from")]
        to: Option<String>,
    },
    /// Run the chains described by a JSON manifest.
    Sample {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Check one reference example and print expected against actual values.
    Reproduce { example: reproduce::Example },
}

fn build(family: FamilyArg, k: Option<usize>, r: Option<usize>, c: Option<usize>, out: Option<PathBuf>) -> Result<()> {
    let need_k = |name: &str| k.with_context(|| format!("{name} needs --K"));
    let (spec, name) = match family {
        FamilyArg::Contingency => {
            let (r, c) = (r.context("contingency needs --r")?, c.context("contingency needs --c")?);
            (build_contingency(r, c)?, format!("contingency{r}x{c}"))
        }
        FamilyArg::Mta => {
            let k = need_k("mta")?;
            (build_mta(k)?, format!("mta{k}"))
        }
        FamilyArg::Suffstats => {
            let k = need_k("suffstats")?;
            (build_suffstats(k)?, format!("suffstats{k}"))
        }
        FamilyArg::Bandmisread => {
            let k = need_k("bandmisread")?;
            (build_bandmisread(k)?, format!("bandmisread{k}"))
        }
    };
    let dir = out.unwrap_or_else(default_out_dir);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let prefix = dir.join(&name);
    spec.write(&prefix).with_context(|| format!("writing {}", prefix.display()))?;
    println!(
        "{}: {}x{} matrix written to {}",
        name,
        spec.matrix.rows(),
        spec.matrix.cols(),
        prefix.with_extension("mat").display()
    );
    Ok(())
}

fn basis(matrix: PathBuf, method: Method, pivots: Vec<String>, file: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let spec = load_model(&matrix)?;
    let a = &spec.matrix;
    let moves = match method {
        Method::Hnf => kernel_lattice_basis(a)?,
        Method::Theorem1 => theorem1_basis(a)?,
        Method::Pivotal => {
            let p = if pivots.is_empty() { echelon_pivots(a)? } else { resolve_columns(&spec, &pivots)? };
            pivotal_lattice_basis(a, &p)?
        }
        Method::Import => {
            let f = file.context("--method import needs --file")?;
            import_moveset(&f, a).with_context(|| format!("importing {}", f.display()))?
        }
    };
    match out {
        Some(path) => {
            write_file(&path, &moves.to_4ti2())?;
            eprintln!("{} moves ({}) written to {}", moves.len(), moves.provenance(), path.display());
        }
        None => print!("{}", moves.to_4ti2()),
    }
    Ok(())
}

struct AuditArgs {
    matrix: PathBuf,
    y: String,
    moves: PathBuf,
    bound: Option<u64>,
    cap: usize,
    json: Option<PathBuf>,
    from: Option<String>,
    to: Option<String>,
}

fn audit(args: AuditArgs) -> Result<()> {
    let spec = load_model(&args.matrix)?;
    let y = load_vector(&args.y)?;
    let moves = import_moveset(&args.moves, &spec.matrix).with_context(|| format!("importing {}", args.moves.display()))?;
    let fiber = enumerate_fiber(&spec.matrix, &y, EnumerationOptions { zero_column_bound: args.bound, cap: args.cap })?;
    let report = connectivity(&fiber, &moves)?;
    println!("fiber size: {}", fiber.len());
    println!("moves: {}", moves.len());
    println!("components: {}", report.component_count);
    println!("component sizes: {:?}", report.component_sizes);
    println!("isolated states: {}", report.isolated);
    println!("connected: {}", if report.is_connected() { "yes" } else { "no" });
    if let Some(path) = &args.json {
        write_file(path, &(report.to_json() + "\n"))?;
    }
    if let (Some(from), Some(to)) = (&args.from, &args.to) {
        let (from, to) = (load_vector(from)?, load_vector(to)?);
        match witness_path(&fiber, &moves, &from, &to)? {
            WitnessPath::Connected(steps) => {
                let shown: Vec<String> =
                    steps.iter().map(|s| format!("{}{}", if s.sign > 0 { '+' } else { '-' }, s.move_index + 1)).collect();
                println!("path ({} steps): {}", steps.len(), shown.join(" "));
            }
            WitnessPath::Disconnected { from_component, to_component } => {
                println!("no path: components {from_component} and {to_component}");
            }
        }
    }
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Build { family, k, r, c, out } => build(family, k, r, c, out)?,
        Command::Basis { matrix, method, pivots, file, out } => basis(matrix, method, pivots, file, out)?,
        Command::Audit { matrix, y, moves, bound, cap, json, from, to } => {
            audit(AuditArgs { matrix, y, moves, bound, cap, json, from, to })?
        }
        Command::Sample { manifest } => {
            let report = manifest::run(&manifest)?;
            for (seed, records, rate) in &report.chains {
                println!("seed {seed}: {records} records, acceptance {rate:.4}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Reproduce { example } => {
            let checks = reproduce::checks(example)?;
            print!("{}", reproduce::render(&checks));
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                bail!("{failed} of {} checks failed", checks.len());
            }
            println!("all {} checks passed", checks.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
