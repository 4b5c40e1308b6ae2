//! Command-line front end: batch verification of the fibration tables, group invariants,
//! identification, GL(n,ℤ) class counts, and table regeneration.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatfold::atlas::{Atlas, AtlasError, Base};
use flatfold::classify::{classify_glnz, SearchBounds};
use flatfold::fibration::{build_circle_total, build_interval_total, FibrationError};
use flatfold::spacegroup::{parse_affine, parse_group, SpaceGroup, SpaceGroupError, DEFAULT_CLOSURE_CAP};

#[derive(Parser, Debug)]
#[command(name = "flatfold", version, about = "Co-Seifert fibrations of flat 3- and 4-manifolds, checked exactly")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Bound on matrix entries in normalizer and conjugacy searches.
    #[arg(long, global = true, default_value_t = SearchBounds::default().entry_bound)]
    entry_bound: i64,
    /// Denominator of sampled translations.
    #[arg(long, global = true, default_value_t = SearchBounds::default().denom_bound)]
    denom_bound: i64,
    /// Largest point group produced when closing generators.
    #[arg(long, global = true, default_value_t = DEFAULT_CLOSURE_CAP)]
    closure_cap: usize,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Treat unknown equivalence verdicts as failures.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rebuild every table row and check it against the claimed manifold.
    VerifyTables {
        /// Table numbers; all tables when omitted.
        tables: Vec<u32>,
        /// Restrict to fiberings over one base.
        #[arg(long, value_enum)]
        base: Option<BaseArg>,
        /// Skip the pairwise inequivalence pass.
        #[arg(long)]
        no_equivalence: bool,
    },
    /// Invariants and Calabi data of a group file.
    Invariants { group: PathBuf },
    /// Atlas names consistent with a group file, or with an atlas group given by name.
    Identify { group: String },
    /// Inverse-pair classes of finite-order elements of GL(n,ℤ).
    ClassifyGlnz {
        n: usize,
        #[arg(long, default_value_t = SearchBounds::default().conj_bound)]
        conj_bound: i64,
    },
    /// Mapping torus of a fiber group and a monodromy `b₁ … | B`.
    BuildCircle { fiber: String, beta: String, order: usize },
    /// Total group over the interval from two reflections.
    BuildInterval { fiber: String, beta: String, gamma: String, order: usize },
    /// Regenerate the fibration tables with computed columns.
    EmitTables {
        tables: Vec<u32>,
        /// Write one file per table here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    Circle,
    Interval,
}

/// Failure kinds, mapped to exit codes.
#[derive(Debug)]
enum Failure {
    /// A check did not pass.
    Hard(String),
    /// Unreadable or malformed input.
    Input(String),
}

impl From<AtlasError> for Failure {
    fn from(e: AtlasError) -> Self {
        match e {
            AtlasError::Io { .. } | AtlasError::Parse { .. } | AtlasError::Checksum(_) | AtlasError::UnknownName(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Hard(e.to_string()),
        }
    }
}

impl From<SpaceGroupError> for Failure {
    fn from(e: SpaceGroupError) -> Self {
        match e {
            SpaceGroupError::Parse { .. } => Failure::Input(e.to_string()),
            _ => Failure::Hard(e.to_string()),
        }
    }
}

impl From<FibrationError> for Failure {
    fn from(e: FibrationError) -> Self {
        Failure::Hard(e.to_string())
    }
}

fn bounds(opts: &GlobalOpts) -> SearchBounds {
    SearchBounds { entry_bound: opts.entry_bound, denom_bound: opts.denom_bound, ..SearchBounds::default() }
}

fn read_group(path: &Path, cap: usize) -> Result<SpaceGroup, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let (dim, gens) = parse_group(&text)?;
    Ok(SpaceGroup::close(dim, &gens, cap)?)
}

/// An atlas group name, or otherwise a path to a group file.
fn group_arg(atlas: &Atlas, arg: &str, cap: usize) -> Result<SpaceGroup, Failure> {
    match atlas.group_generators(arg) {
        Ok((dim, gens)) => Ok(SpaceGroup::close(*dim, gens, cap)?),
        Err(_) => read_group(Path::new(arg), cap),
    }
}

fn affine_arg(s: &str) -> Result<flatfold::AffineMap, Failure> {
    parse_affine(s).map_err(Failure::Input)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let opts = &cli.opts;
    let cap = opts.closure_cap;
    let out = &mut std::io::stdout().lock();
    match &cli.command {
        Command::VerifyTables { tables, base, no_equivalence } => {
            let atlas = Atlas::load()?;
            let ids = if tables.is_empty() { atlas.table_ids() } else { tables.clone() };
            let mut rows = Vec::new();
            for id in &ids {
                rows.extend(atlas.load_table(*id)?.iter().filter(|r| match base {
                    Some(BaseArg::Circle) => r.base == Base::Circle,
                    Some(BaseArg::Interval) => r.base == Base::Interval,
                    None => true,
                }));
            }
            let rep = report::verify(&atlas, &rows, cap, (!no_equivalence).then(|| bounds(opts)))?;
            report::write_verification(out, &rep, opts.format).map_err(io_failure)?;
            Ok(rep.passed(opts.strict))
        }
        Command::Invariants { group } => {
            let g = read_group(group, cap)?;
            report::write_invariants(out, &g, opts.format).map_err(io_failure)?;
            Ok(true)
        }
        Command::Identify { group } => {
            let atlas = Atlas::load()?;
            let g = group_arg(&atlas, group, cap)?;
            let names = atlas.identify_group(&g)?;
            report::write_names(out, &names, opts.format).map_err(io_failure)?;
            Ok(true)
        }
        Command::ClassifyGlnz { n, conj_bound } => {
            if !(1..=3).contains(n) {
                return Err(Failure::Input(format!("dimension must be 1, 2 or 3, got {n}")));
            }
            let b = SearchBounds { conj_bound: *conj_bound, ..bounds(opts) };
            let classes = classify_glnz(*n, &b);
            report::write_glnz(out, &classes, opts.format).map_err(io_failure)?;
            Ok(true)
        }
        Command::BuildCircle { fiber, beta, order } => {
            let atlas = Atlas::load()?;
            let m = group_arg(&atlas, fiber, cap)?;
            let (g, _) = build_circle_total(&m, &affine_arg(beta)?, *order, cap)?;
            report::write_built(out, &atlas, &g, opts.format).map_err(io_failure)?;
            Ok(true)
        }
        Command::BuildInterval { fiber, beta, gamma, order } => {
            let atlas = Atlas::load()?;
            let m = group_arg(&atlas, fiber, cap)?;
            let (g, _) = build_interval_total(&m, &affine_arg(beta)?, &affine_arg(gamma)?, *order, cap)?;
            report::write_built(out, &atlas, &g, opts.format).map_err(io_failure)?;
            Ok(true)
        }
        Command::EmitTables { tables, out: dir } => {
            let atlas = Atlas::load()?;
            let ids = if tables.is_empty() { atlas.table_ids() } else { tables.clone() };
            let format = if opts.format == Format::Text { Format::Markdown } else { opts.format };
            let mut ok = true;
            for id in ids {
                let rows = atlas.load_table(id)?;
                let (text, pass) = report::emit_table(&atlas, id, rows, cap, format);
                ok &= pass;
                match dir {
                    Some(d) => {
                        let ext = if format == Format::Tsv { "tsv" } else { "md" };
                        std::fs::create_dir_all(d).map_err(io_failure)?;
                        std::fs::write(d.join(format!("table-{id:02}.{ext}")), text).map_err(io_failure)?;
                    }
                    None => {
                        use std::io::Write;
                        writeln!(out, "{text}").map_err(io_failure)?;
                    }
                }
            }
            Ok(ok)
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.opts.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.opts.jobs).build_global().expect("thread pool is configured once");
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Hard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
