//! The `anameter` command line.
//!
//! [`run`] takes the argument list and two writers and returns the process
//! exit code, so every command can be driven from tests without spawning a
//! process.

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anameter::taxonomy::load_taxonomy;
use anameter::{
    compare, load_evaluation, merge, render_comparison, render_merged, render_score, score, AnalysisError,
    Evaluation, Format, LoadError, Mode, ScoreError, Taxonomy, TaxonomyError, TaxonomyRegistry,
};
use anameter_server::store::{load_registry, StoreError};
use anameter_server::Store;
use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
/// A document is malformed, fails validation, or two documents are incompatible.
pub const EXIT_VALIDATION: i32 = 1;
/// A file could not be read or written, or the server could not bind.
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
/// The evaluation is well formed but every micro-grid is N/A.
pub const EXIT_NO_SCORE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "anameter", version, about = "Score adaptation characterization grids")]
pub struct Cli {
    /// Output format: markdown, json or csv.
    #[arg(long, global = true, default_value = "markdown")]
    pub format: Format,

    /// Decimals shown in rendered degrees.
    #[arg(long, global = true, default_value_t = anameter::render::DEFAULT_DECIMALS)]
    pub decimals: usize,

    /// Directory holding evaluation files and `taxonomies/`.
    #[arg(long, global = true, env = "ANAMETER_DATA_DIR", default_value = ".")]
    pub data_dir: PathBuf,

    /// Taxonomy as `id` or `id@version`, or a path to a taxonomy document.
    #[arg(long, global = true)]
    pub taxonomy: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create an empty evaluation file in the data directory.
    Init {
        system: String,
        evaluator: String,
        mode: Mode,
    },
    /// Print the degrees of one evaluation.
    Score { file: String },
    /// Check an evaluation or taxonomy document.
    Validate { file: String },
    /// Print the differences between two evaluations (right minus left).
    Compare { left: String, right: String },
    /// Average several evaluators' grids of the same system and mode.
    Merge {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Write the degrees of one evaluation to a file.
    Export {
        file: String,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run the HTTP API and serve the UI bundle.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Address to listen on.
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory with the built UI bundle.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {e}", path.display()))
    }
}

impl From<ScoreError> for Failure {
    fn from(e: ScoreError) -> Self {
        let code = match e {
            ScoreError::NoScore => EXIT_NO_SCORE,
            ScoreError::WrongTaxonomy { .. } => EXIT_VALIDATION,
        };
        Self::new(code, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Score(s) => s.into(),
            other => Self::new(EXIT_VALIDATION, other.to_string()),
        }
    }
}

pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

struct Context {
    registry: TaxonomyRegistry,
    /// Reference selected with `--taxonomy`, if any.
    taxonomy: Option<String>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let mut registry =
            load_registry(&cli.data_dir).map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
        let mut taxonomy = cli.taxonomy.clone();
        if let Some(spec) = &cli.taxonomy {
            let path = Path::new(spec);
            if path.is_file() {
                let t = read_taxonomy(path)?;
                let reference = t.reference().to_string();
                if registry.resolve(&t.reference()).is_none() {
                    registry
                        .insert(t)
                        .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
                }
                taxonomy = Some(reference);
            } else if registry.lookup(spec).is_err() {
                return Err(Failure::new(EXIT_VALIDATION, format!("unknown taxonomy {spec}")));
            }
        }
        Ok(Self { registry, taxonomy })
    }

    fn load(&self, path: &Path) -> Result<(Evaluation, &Taxonomy), Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
        let e = load_evaluation(&bytes, &self.registry).map_err(|e| load_failure(path, e))?;
        let t = self
            .registry
            .resolve(&e.taxonomy)
            .expect("load_evaluation resolved the taxonomy");
        Ok((e, t))
    }
}

fn load_failure(path: &Path, e: LoadError) -> Failure {
    Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display()))
}

fn read_taxonomy(path: &Path) -> Result<Taxonomy, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    load_taxonomy(&bytes).map_err(|e| taxonomy_failure(path, e))
}

fn taxonomy_failure(path: &Path, e: TaxonomyError) -> Failure {
    let mut msg = format!("{}: {e}", path.display());
    if let TaxonomyError::Invalid(violations) = &e {
        for v in violations {
            msg.push_str(&format!("\n  {}: {}", v.path, v.message));
        }
    }
    Failure::new(EXIT_VALIDATION, msg)
}

/// Finds a file argument as given, then inside the data dir, then with `.json` added.
pub fn resolve_file(data_dir: &Path, name: &str) -> PathBuf {
    let direct = PathBuf::from(name);
    if direct.is_file() {
        return direct;
    }
    let inside = data_dir.join(name);
    if inside.is_file() {
        return inside;
    }
    let with_ext = data_dir.join(format!("{name}.json"));
    if with_ext.is_file() {
        return with_ext;
    }
    direct
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_IO, format!("stdout: {e}")))
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let file = |name: &str| resolve_file(&cli.data_dir, name);
    match &cli.command {
        Command::Init {
            system,
            evaluator,
            mode,
        } => {
            let ctx = Context::new(cli)?;
            let default_ref = anameter::default_taxonomy().reference().to_string();
            let taxonomy = ctx.taxonomy.clone().unwrap_or(default_ref);
            let store = Store::open(&cli.data_dir, ctx.registry).map_err(|e| Failure::io(&cli.data_dir, e))?;
            let created = store
                .create(&taxonomy, system, evaluator, *mode)
                .map_err(|e| match e {
                    StoreError::Exists(_) => Failure::new(EXIT_IO, format!("{e}; refusing to overwrite")),
                    StoreError::UnknownTaxonomy(_) => Failure::new(EXIT_VALIDATION, e.to_string()),
                    other => Failure::new(EXIT_IO, other.to_string()),
                })?;
            let path = anameter_server::store::evaluation_path(&cli.data_dir, &created.id);
            emit(stdout, &format!("{}\n", path.display()))
        }
        Command::Score { file: name } => {
            let ctx = Context::new(cli)?;
            let (e, t) = ctx.load(&file(name))?;
            let report = score(&e, t)?;
            emit(stdout, &render_score(&report, t, cli.format, cli.decimals))
        }
        Command::Export { file: name, output } => {
            let ctx = Context::new(cli)?;
            let (e, t) = ctx.load(&file(name))?;
            let report = score(&e, t)?;
            let text = render_score(&report, t, cli.format, cli.decimals);
            fs::write(output, text).map_err(|e| Failure::io(output, e))?;
            emit(stdout, &format!("{}\n", output.display()))
        }
        Command::Validate { file: name } => validate(cli, &file(name), stdout),
        Command::Compare { left, right } => {
            let ctx = Context::new(cli)?;
            let (a, ta) = ctx.load(&file(left))?;
            let (b, tb) = ctx.load(&file(right))?;
            let (ra, rb) = (score(&a, ta)?, score(&b, tb)?);
            let report = compare(&ra, &rb)?;
            emit(stdout, &render_comparison(&report, ta, cli.format, cli.decimals))
        }
        Command::Merge { files } => {
            let ctx = Context::new(cli)?;
            let mut evals = Vec::with_capacity(files.len());
            let mut taxonomy = None;
            for name in files {
                let (e, t) = ctx.load(&file(name))?;
                taxonomy.get_or_insert(t);
                evals.push(e);
            }
            let t = taxonomy.expect("clap requires one file");
            let merged = merge(&evals, t)?;
            emit(stdout, &render_merged(&merged, t, cli.format, cli.decimals))
        }
        Command::Serve { port, host, ui_dir } => serve(cli, SocketAddr::new(*host, *port), ui_dir.clone()),
    }
}

fn validate(cli: &Cli, path: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    let is_taxonomy = value.get("factors").is_some() || value.get("aspects").is_some();
    if is_taxonomy {
        let t = load_taxonomy(&bytes).map_err(|e| taxonomy_failure(path, e))?;
        return emit(
            stdout,
            &format!(
                "{}: valid taxonomy {} ({} micro-grids)\n",
                path.display(),
                t.reference(),
                t.micro_grid_count()
            ),
        );
    }
    let ctx = Context::new(cli)?;
    let e = load_evaluation(&bytes, &ctx.registry).map_err(|e| load_failure(path, e))?;
    emit(
        stdout,
        &format!(
            "{}: valid {} evaluation of {} by {} ({} marks)\n",
            path.display(),
            e.mode,
            e.system,
            e.evaluator,
            e.mark_count()
        ),
    )
}

fn serve(cli: &Cli, addr: SocketAddr, ui_dir: Option<PathBuf>) -> Result<(), Failure> {
    let ctx = Context::new(cli)?;
    let store = Store::open(&cli.data_dir, ctx.registry).map_err(|e| Failure::io(&cli.data_dir, e))?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    runtime.block_on(async {
        let listener = anameter_server::bind(addr)
            .await
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        anameter_server::serve(listener, Arc::new(store), ui_dir)
            .await
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))
    })
}
