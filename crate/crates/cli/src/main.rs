use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rlab_core::complex::BigradedComplex;
use rlab_core::connection::EquivariantConnection;
use rlab_core::io::{self, Document, Report, Status};
use rlab_core::models::{self, ModelDescriptor};
use rlab_core::multifilt::{FilteredMap, MultiFilteredSpace};
use rlab_core::{audit, report, Error};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "rlab", version, about = "Exact Rees-module computations for multifiltered spaces and double complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Splitting of a multifiltration.
    Split { file: PathBuf },
    /// Rees module of a multifiltration.
    Rees {
        file: PathBuf,
        /// Point `a1,..,an` for an extra fiber.
        #[arg(long, allow_hyphen_values = true)]
        fiber: Option<String>,
        /// Degree window `lo..hi`, corners comma separated.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Fiber of the Rees module at a point.
    Fiber {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// r-strictness of a filtered map.
    Strict {
        file: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Cokernel of the Rees map and its torsion.
    Coker { file: PathBuf },
    /// Projective charts and their overlaps.
    Charts { file: PathBuf },
    /// Splitting type of the bundle on the projective line.
    P1type { file: PathBuf },
    /// Flatness and curvature of an equivariant connection.
    Connection {
        file: PathBuf,
        /// Also compute a trivializing gauge.
        #[arg(long)]
        flatten: bool,
    },
    /// Pages of the spectral sequence.
    Specseq {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 8)]
        rmax: usize,
    },
    /// Approximating bundle in degree k.
    Favb {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: i64,
    },
    /// Two-variable approximating bundle in degree k.
    Favb2 {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: i64,
    },
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Run the verification suites.
    VerifyAll {
        #[arg(long)]
        model: Option<String>,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
    Export { name: String },
}

#[derive(Args)]
struct Source {
    /// Built-in model, e.g. `torus:g=2`.
    #[arg(long, conflicts_with = "file")]
    model: Option<String>,
    /// Bigraded complex file.
    #[arg(required_unless_present = "model")]
    file: Option<PathBuf>,
}

enum Output {
    Report(Report),
    Document(Document),
}

fn load(path: &Path) -> Result<Document, Error> {
    io::read_document(path)
}

fn wrong_kind(path: &Path, want: &str, got: &Document) -> Error {
    Error::Parse(format!("{}: expected a {want} file, found kind {:?}", path.display(), got.kind()))
}

fn space(path: &Path) -> Result<MultiFilteredSpace, Error> {
    match load(path)? {
        Document::Multifiltration(v) => Ok(v),
        d => Err(wrong_kind(path, "multifiltration", &d)),
    }
}

fn map(path: &Path) -> Result<FilteredMap, Error> {
    match load(path)? {
        Document::FilteredMap(f) => Ok(f),
        d => Err(wrong_kind(path, "filtered_map", &d)),
    }
}

fn connection(path: &Path) -> Result<EquivariantConnection, Error> {
    match load(path)? {
        Document::Connection(c) => Ok(c),
        d => Err(wrong_kind(path, "connection", &d)),
    }
}

fn complex(src: &Source) -> Result<(BigradedComplex, String), Error> {
    match (&src.model, &src.file) {
        (Some(m), _) => {
            let d = ModelDescriptor::parse(m)?;
            Ok((d.instantiate()?, format!("model:{}", d.label())))
        }
        (None, Some(path)) => match load(path)? {
            Document::BigradedComplex(x) => Ok((x, path.display().to_string())),
            d => Err(wrong_kind(path, "bigraded_complex", &d)),
        },
        (None, None) => Err(Error::Parse("give --model or a file".into())),
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Split { .. } => "split",
        Command::Rees { .. } => "rees",
        Command::Fiber { .. } => "fiber",
        Command::Strict { .. } => "strict",
        Command::Coker { .. } => "coker",
        Command::Charts { .. } => "charts",
        Command::P1type { .. } => "p1type",
        Command::Connection { .. } => "connection",
        Command::Specseq { .. } => "specseq",
        Command::Favb { .. } => "favb",
        Command::Favb2 { .. } => "favb2",
        Command::Models { .. } => "models",
        Command::VerifyAll { .. } => "verify-all",
    }
}

fn input_label(cmd: &Command) -> String {
    let p = |f: &PathBuf| f.display().to_string();
    match cmd {
        Command::Split { file }
        | Command::Rees { file, .. }
        | Command::Fiber { file, .. }
        | Command::Strict { file, .. }
        | Command::Coker { file }
        | Command::Charts { file }
        | Command::P1type { file }
        | Command::Connection { file, .. } => p(file),
        Command::Specseq { source, .. } | Command::Favb { source, .. } | Command::Favb2 { source, .. } => {
            match (&source.model, &source.file) {
                (Some(m), _) => format!("model:{m}"),
                (None, Some(f)) => p(f),
                (None, None) => String::new(),
            }
        }
        Command::Models { action: ModelsAction::List } => "list".into(),
        Command::Models { action: ModelsAction::Export { name } } => name.clone(),
        Command::VerifyAll { model } => model.clone().unwrap_or_else(|| "all".into()),
    }
}

fn run(cmd: &Command) -> Result<Output, Error> {
    let label = input_label(cmd);
    let r = match cmd {
        Command::Split { file } => report::split(&space(file)?, &label),
        Command::Rees { file, fiber, window } => {
            let v = space(file)?;
            let point = fiber.as_deref().map(report::parse_point).transpose()?;
            let window = window.as_deref().map(report::parse_window).transpose()?;
            report::rees(&v, &label, point.as_deref(), window.as_ref())
        }
        Command::Fiber { file, at } => {
            let v = space(file)?;
            report::fiber(&v, &label, &report::parse_point(at)?)
        }
        Command::Strict { file, r } => report::strict(&map(file)?, &label, *r),
        Command::Coker { file } => report::coker(&map(file)?, &label),
        Command::Charts { file } => report::charts(&space(file)?, &label),
        Command::P1type { file } => report::p1type(&space(file)?, &label),
        Command::Connection { file, flatten } => report::connection(&connection(file)?, &label, *flatten),
        Command::Specseq { source, rmax } => {
            let (x, label) = complex(source)?;
            report::specseq(&x, &label, *rmax)
        }
        Command::Favb { source, k } => {
            let (x, label) = complex(source)?;
            report::favb(&x, &label, *k)
        }
        Command::Favb2 { source, k } => {
            let (x, label) = complex(source)?;
            report::favb2(&x, &label, *k)
        }
        Command::Models { action: ModelsAction::List } => report::models_list(),
        Command::Models { action: ModelsAction::Export { name } } => {
            return Ok(Output::Document(Document::BigradedComplex(models::model(name)?)));
        }
        Command::VerifyAll { model } => {
            let d = model.as_deref().map(ModelDescriptor::parse).transpose()?;
            report::verify_all(&audit::verify_all(d.as_ref()), &label)
        }
    };
    Ok(Output::Report(r))
}

fn is_dim_entry(v: &Value) -> bool {
    v.as_object()
        .is_some_and(|o| o.contains_key("dim") && o.keys().all(|k| matches!(k.as_str(), "dim" | "degree" | "p" | "q")))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if !items.is_empty() && items.iter().all(is_dim_entry) => items
            .iter()
            .map(|x| {
                let key: Vec<String> = x
                    .as_object()
                    .into_iter()
                    .flatten()
                    .filter(|(k, _)| k.as_str() != "dim")
                    .map(|(_, v)| v.to_string())
                    .collect();
                format!("{}:{}", key.join(","), x["dim"])
            })
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn table(r: &Report) -> String {
    let mut out = format!("{} [{}] {}\n", r.command, r.input, serde_json::to_value(&r.status).unwrap().as_str().unwrap_or(""));
    if let Some(m) = &r.message {
        out.push_str(&format!("  message: {m}\n"));
    }
    if let Value::Object(map) = &r.result {
        let width = map.keys().map(String::len).max().unwrap_or(0);
        for (k, v) in map {
            out.push_str(&format!("  {k:<width$}  {}\n", cell(v)));
        }
    }
    out
}

fn exit_code(s: &Status) -> u8 {
    match s {
        Status::Ok => 0,
        Status::Rejected => 1,
        Status::Error => 2,
    }
}

fn write_out(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match run(&cli.command) {
        Ok(Output::Document(d)) => (io::emit(&d), 0),
        Ok(Output::Report(r)) => {
            let text = match cli.format {
                Format::Json => io::emit_report(&r),
                Format::Table => table(&r),
            };
            (text, exit_code(&r.status))
        }
        Err(e) => {
            eprintln!("rlab {}: {e}", name(&cli.command));
            let r = Report::failed(name(&cli.command), &input_label(&cli.command), &e, Value::Object(Default::default()));
            let text = match cli.format {
                Format::Json => io::emit_report(&r),
                Format::Table => table(&r),
            };
            (text, if e.is_rejection() { 1 } else { 2 })
        }
    };
    if let Err(e) = write_out(&text, cli.output.as_deref()) {
        eprintln!("rlab: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
