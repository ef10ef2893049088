use std::fs;
use std::io::{self, Read as _, Write as _};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use imt_core::document::{AssessmentRequest, Document, IndicatorFiles, PlanRequest};
use imt_core::model::{NetworkId, Period, WeightVector};
use imt_core::planner::PlanError;
use imt_core::scoring::DcAggregation;

use crate::render;
use crate::service::{Project, ServiceError};

#[derive(Debug, Parser)]
#[command(name = "imt", version, about = "Interoperability monitoring of collaboration networks")]
pub struct Cli {
    /// Project directory holding the store and indicator files.
    #[arg(long, global = true, env = "IMT_PROJECT", default_value = ".")]
    pub project: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Doc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Import a network or indicator files document, or a period's CSV files.
    Import(ImportArgs),
    /// Assess a period from its indicator files and store the result.
    Assess(AssessArgs),
    /// Compute the cheapest actions reaching a target ratlop.
    Plan(PlanArgs),
    /// Show the assessed periods with their changes.
    Report(ReportArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    /// Canonical document to import; `-` reads standard input.
    pub document: Option<PathBuf>,
    #[arg(long)]
    pub network: Option<String>,
    #[arg(long, requires_all = ["probes", "survey"], conflicts_with = "document")]
    pub period: Option<Period>,
    #[arg(long, requires = "period")]
    pub probes: Option<PathBuf>,
    #[arg(long, requires = "period")]
    pub survey: Option<PathBuf>,
    /// Replace an existing network.
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    #[arg(long)]
    pub period: Period,
    #[arg(long)]
    pub network: Option<String>,
    /// Component weights `w1,w2,w3`.
    #[arg(long)]
    pub weights: Option<WeightVector>,
    #[arg(long)]
    pub dc_aggregation: Option<DcAggregation>,
    /// Store a new version when the period is already assessed.
    #[arg(long)]
    pub overwrite: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub target: f64,
    /// Catalog document.
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub network: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub network: Option<String>,
    #[arg(long)]
    pub from: Option<Period>,
    #[arg(long)]
    pub to: Option<Period>,
    /// Ratlop decrease tolerated before a period is flagged.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
}

fn read_input(path: &Path) -> Result<String, ServiceError> {
    let io_err = |source| ServiceError::Io {
        path: path.to_owned(),
        source,
    };
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(io_err)?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn network_id(project: &Project, named: Option<String>) -> Result<NetworkId, ServiceError> {
    match named {
        Some(id) => Ok(NetworkId::new(id)),
        None => project.default_network(),
    }
}

fn emit(format: Format, table: String, doc: Document) -> Result<String, ServiceError> {
    Ok(match format {
        Format::Doc => doc.to_canonical()? + "\n",
        Format::Table => table,
    })
}

/// Runs a command and returns what it prints on standard output.
pub fn execute(project: &Project, command: Command) -> Result<String, ServiceError> {
    match command {
        Command::Import(args) => import(project, args),
        Command::Assess(args) => {
            let id = network_id(project, args.network)?;
            let request = AssessmentRequest {
                weights: args.weights,
                dc_aggregation: args.dc_aggregation,
                overwrite: args.overwrite,
                ..Default::default()
            };
            let a = project.assess(&id, args.period, &request)?;
            emit(args.format, render::assessment(&a), Document::Assessment(a))
        }
        Command::Plan(args) => {
            let id = network_id(project, args.network)?;
            let catalog = Document::parse(&read_input(&args.catalog)?)?.into_catalog()?;
            let request = PlanRequest {
                catalog,
                target: args.target,
                config: None,
            };
            let plan = project.plan(&id, &request, &AtomicBool::new(false))?;
            emit(args.format, render::plan(&plan), Document::Plan(plan))
        }
        Command::Report(args) => {
            let id = network_id(project, args.network)?;
            let report = project.series(&id, args.from, args.to, args.epsilon)?;
            if report.series.entries.is_empty() {
                return Err(ServiceError::Invalid(format!("network {id} has no assessments")));
            }
            emit(args.format, render::series(&report), Document::Series(report))
        }
        Command::Serve(_) => Err(ServiceError::Invalid("serve runs through `run`".into())),
    }
}

fn import(project: &Project, args: ImportArgs) -> Result<String, ServiceError> {
    if let Some(period) = args.period {
        let id = network_id(project, args.network)?;
        let files = IndicatorFiles {
            network_id: id,
            period,
            probes: read_input(args.probes.as_deref().expect("required with --period"))?,
            survey: read_input(args.survey.as_deref().expect("required with --period"))?,
        };
        project.put_indicator_files(&files)?;
        return Ok(format!("imported indicator files for {} {}\n", files.network_id, files.period));
    }
    let Some(path) = args.document else {
        return Err(ServiceError::Invalid(
            "name a document to import, or give --period with --probes and --survey".into(),
        ));
    };
    match Document::parse(&read_input(&path)?)? {
        Document::Network(network) => {
            let id = network.id.clone();
            let (revision, created) = project.put_network(network, args.overwrite)?;
            let verb = if created { "created" } else { "updated" };
            Ok(format!("{verb} network {id} (revision {revision})\n"))
        }
        Document::IndicatorFiles(files) => {
            project.put_indicator_files(&files)?;
            Ok(format!("imported indicator files for {} {}\n", files.network_id, files.period))
        }
        other => Err(ServiceError::Invalid(format!(
            "cannot import a {} document; expected network or indicator_files",
            other.kind()
        ))),
    }
}

fn report_error(e: &ServiceError) -> ExitCode {
    let mut stderr = io::stderr().lock();
    match e {
        ServiceError::Plan(PlanError::Infeasible { target, max_achievable }) => {
            let _ = writeln!(stderr, "error: {}", render::infeasible(*target, max_achievable));
        }
        _ => {
            let _ = writeln!(stderr, "error: {e}");
        }
    }
    ExitCode::from(e.code().exit_code())
}

pub fn run(cli: Cli) -> ExitCode {
    let project = match Project::open(&cli.project) {
        Ok(p) => p,
        Err(e) => return report_error(&e),
    };
    if let Command::Serve(args) = cli.command {
        let runtime = match tokio::runtime::Runtime::new() {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
        return match runtime.block_on(crate::http::serve(Arc::new(project), args.addr)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        };
    }
    match execute(&project, cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => report_error(&e),
    }
}
