//! `mex`: REPL and batch front end.

mod config;
mod error;
mod repl;

use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use mex_core::comprehension::{emit_loops, evaluate, normalize};
use mex_core::derivation::{check_derivation, corpus, Derivation, StepStatus};
use mex_core::paths::{check_holes, mkholes, parse_path_list, Exercise};
use mex_core::render::{
    checked_derivation_ascii, checked_derivation_latex, render_ascii, render_latex, render_tree,
    AsciiStyle, DocBase, Layout, RenderableDocument, TreeDirection,
};
use mex_core::subst::{parse_bindings, presentation, SubstForm};
use mex_core::{json, parse, Expr};
use serde_json::Value;

use config::Config;
use error::CliError;
use repl::{split_statements, strip_comments, Repl};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Ascii,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
            .map_err(|_| format!("unknown format `{s}` (ascii, latex, json)"))
    }
}

/// One expression in the chosen format.
pub fn show(e: &Expr, format: Format, tree: bool) -> String {
    match format {
        Format::Ascii if tree => render_tree(e, TreeDirection::RootTop, AsciiStyle::Display),
        Format::Ascii => render_ascii(&RenderableDocument::expr(e.clone())),
        Format::Latex => render_latex(&RenderableDocument::expr(e.clone())),
        Format::Json => json::to_string(e),
    }
}

#[derive(Parser)]
#[command(name = "mex", version, about = "Manipulable expressions: evaluate, substitute, check derivations, make exercises")]
struct Cli {
    /// `key = value` file with defaults for format, snapshot and port.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prompt loop: `;` prints the result, `$` keeps it quiet, `name : expr` binds.
    Repl {
        /// Run this script instead of reading standard input.
        script: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Evaluate statements and print the shown results.
    Eval {
        #[arg(short = 'e', long = "expr")]
        src: String,
        #[arg(long)]
        format: Option<Format>,
        /// Draw results as trees.
        #[arg(long)]
        tree: bool,
    },
    /// Apply a substitution, showing it in one of the presentation forms.
    Subst {
        #[arg(short = 'e', long = "expr")]
        src: String,
        #[arg(short = 's', long = "subst")]
        bindings: String,
        #[arg(long, default_value = "s")]
        form: String,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Check a derivation document (JSON or text), or a corpus document by name.
    Check {
        document: String,
        /// One line per step with its verdict.
        #[arg(long)]
        verbose: bool,
        /// Treat soft-verified algebra steps as failures.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Make and check fill-in-the-hole exercises.
    Holes {
        #[command(subcommand)]
        command: HolesCommand,
    },
    /// Evaluate a set comprehension.
    Compre {
        #[arg(short = 'e', long = "expr")]
        src: String,
        /// Show the trace tree.
        #[arg(long)]
        tree: bool,
        /// Show the equivalent loop program.
        #[arg(long)]
        loops: bool,
    },
    /// Serve the JSON session API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Origin allowed by CORS; any origin when omitted.
        #[arg(long)]
        allow_origin: Option<String>,
    },
}

#[derive(Subcommand)]
enum HolesCommand {
    /// Replace the subterms at the given paths by holes and print the exercise JSON.
    Make {
        #[arg(short = 'e', long = "expr")]
        src: String,
        /// Dot-separated paths, comma separated: `1.2.2.1.2,2.2.2`.
        #[arg(short = 'p', long = "paths")]
        paths: String,
        /// Print only what a student may see.
        #[arg(long)]
        student: bool,
        /// Write to this file instead of standard output.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Check proposed answers against an exercise file.
    Check {
        exercise: PathBuf,
        /// `label=src` pairs, comma separated.
        #[arg(short = 'a', long = "answers")]
        answers: String,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Run the statements in `src` in a fresh session; returns the shown values and the
/// value of the last statement.
fn eval_all(src: &str) -> Result<(Vec<(Expr, bool)>, Option<Expr>), CliError> {
    let (mut stmts, rest) = split_statements(&strip_comments(src));
    if !rest.is_empty() {
        stmts.push(rest);
    }
    if stmts.is_empty() {
        return Err(CliError::Usage("nothing to evaluate".into()));
    }
    let mut r = Repl::new(Format::Ascii);
    let mut shown = Vec::new();
    for s in &stmts {
        if let Some(v) = r.run(s)? {
            shown.push(v);
        }
    }
    Ok((shown, r.session.last().cloned()))
}

fn load_derivation(name: &str) -> Result<Derivation, CliError> {
    let path = Path::new(name);
    if path.exists() {
        return Ok(Derivation::load(&read(path)?)?);
    }
    corpus::get(name).ok_or_else(|| {
        CliError::Io(format!(
            "{name}: no such file or corpus document (corpus: {})",
            corpus::names().collect::<Vec<_>>().join(", ")
        ))
    })
}

fn check(
    out: &mut impl Write,
    document: &str,
    verbose: bool,
    strict: bool,
    format: Format,
) -> Result<(), CliError> {
    let d = load_derivation(document)?;
    let report = check_derivation(&d);
    let layout = Layout::default();
    match format {
        Format::Json => {
            let v = serde_json::to_value(&report).expect("report serializes");
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"));
        }
        Format::Latex => {
            let _ = writeln!(out, "{}", checked_derivation_latex(&d, &report, &layout));
        }
        Format::Ascii => {
            let _ = writeln!(out, "{}", checked_derivation_ascii(&d, &report, &layout));
            if verbose {
                for v in &report.steps {
                    let status = match v.status {
                        StepStatus::Verified => "verified",
                        StepStatus::Soft => "soft",
                        StepStatus::Failed => "FAILED",
                    };
                    let mut line = format!("{:>6} {status}", v.label);
                    if let Some(r) = &v.rule {
                        line.push_str(&format!("  {r}"));
                    }
                    if let Some(n) = &v.note {
                        line.push_str(&format!("  ({n})"));
                    }
                    let _ = writeln!(out, "{line}");
                }
            }
            if let Some(c) = &report.conclusion {
                let _ = writeln!(out, "conclusion: {}", show(c, Format::Ascii, false));
            }
        }
    }
    let failed = report.failed_labels();
    if !failed.is_empty() {
        return Err(CliError::CheckFailed(format!(
            "{} of {} steps failed: {}",
            failed.len(),
            report.steps.len(),
            failed.join(", ")
        )));
    }
    if report.soft > 0 {
        let soft: Vec<&str> = report
            .steps
            .iter()
            .filter(|s| s.status == StepStatus::Soft)
            .map(|s| s.label.as_str())
            .collect();
        if strict {
            return Err(CliError::CheckFailed(format!(
                "soft-verified steps are not accepted with --strict: {}",
                soft.join(", ")
            )));
        }
        eprintln!("warning: steps {} are soft-verified algebra, not machine-checked", soft.join(", "));
    }
    Ok(())
}

/// Split `1=src,2=src` at commas outside brackets.
fn parse_answers(text: &str) -> Result<std::collections::BTreeMap<u32, Expr>, CliError> {
    let mut items = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                items.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&text[start..]);
    let mut out = std::collections::BTreeMap::new();
    for item in items.into_iter().filter(|s| !s.trim().is_empty()) {
        let (label, src) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("answer `{item}` is not label=expr")))?;
        let label: u32 = label
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("hole label `{}` is not a number", label.trim())))?;
        out.insert(label, parse(src.trim())?);
    }
    Ok(out)
}

fn write_or_print(out: &mut impl Write, dest: Option<&Path>, text: &str) -> Result<(), CliError> {
    match dest {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| CliError::io(p, e)),
        None => {
            let _ = writeln!(out, "{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let fmt = |f: Option<Format>| f.or(config.format).unwrap_or_default();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Repl { script, format } => {
            let mut r = Repl::new(fmt(format));
            let mut err = io::stderr();
            match script {
                Some(p) => {
                    let text = read(&p)?;
                    r.run_loop(text.as_bytes(), &mut out, &mut err, false);
                }
                None => {
                    let stdin = io::stdin();
                    let prompt = stdin.is_terminal();
                    r.run_loop(stdin.lock(), &mut out, &mut err, prompt);
                }
            }
            if r.errors > 0 {
                return Err(CliError::StatementsFailed(r.errors));
            }
        }
        Command::Eval { src, format, tree } => {
            let (shown, _) = eval_all(&src)?;
            for (v, t) in shown {
                let _ = writeln!(out, "{}", show(&v, fmt(format), tree || t));
            }
        }
        Command::Subst { src, bindings, form, format } => {
            let form: SubstForm = form.parse()?;
            let e = parse(&src)?;
            let s = parse_bindings(&bindings)?;
            let (v, _) = presentation(form, &e, &s, &Default::default())?;
            let _ = writeln!(out, "{}", show(&v, fmt(format), false));
        }
        Command::Check { document, verbose, strict, format } => {
            check(&mut out, &document, verbose, strict, fmt(format))?;
        }
        Command::Holes { command } => match command {
            HolesCommand::Make { src, paths, student, out: dest } => {
                let (_, last) = eval_all(&src)?;
                let target = last.ok_or_else(|| CliError::Usage("nothing to make holes in".into()))?;
                let x = mkholes(&target, &parse_path_list(&paths)?)?;
                let v = if student { x.student_view() } else { x.to_json() };
                let text = serde_json::to_string_pretty(&v).expect("json");
                write_or_print(&mut out, dest.as_deref(), &text)?;
                eprintln!("{}", show(&x.statement, Format::Ascii, false));
            }
            HolesCommand::Check { exercise, answers } => {
                let v: Value = serde_json::from_str(&read(&exercise)?)
                    .map_err(|e| CliError::Engine(mex_core::Error::Json(e.to_string())))?;
                let x = Exercise::from_json(&v)?;
                let report = check_holes(&x, &parse_answers(&answers)?)?;
                for h in &report.per_hole {
                    let verdict = if h.correct { "correct" } else { "incorrect" };
                    let _ = writeln!(out, "hole {}: {verdict}", h.label);
                }
                if !report.all_correct {
                    return Err(CliError::CheckFailed("not all holes are correct".into()));
                }
                let _ = writeln!(out, "all correct");
            }
        },
        Command::Compre { src, tree, loops } => {
            let c = normalize(&parse(&src)?)?;
            let ev = evaluate(&c)?;
            let _ = writeln!(out, "{}", show(&Expr::op("set", ev.values.clone()), Format::Ascii, false));
            if tree {
                let doc = RenderableDocument::new(DocBase::Trace(ev.tree));
                let _ = writeln!(out, "{}", render_ascii(&doc));
            }
            if loops {
                let _ = writeln!(out, "{}", emit_loops(&c));
            }
        }
        Command::Serve { port, snapshot, host, allow_origin } => {
            let _ = tracing_subscriber::fmt().with_writer(io::stderr).try_init();
            let cfg = mex_service::ServiceConfig {
                host,
                port: port.or(config.port).unwrap_or(8080),
                snapshot: snapshot.or(config.snapshot),
                allow_origin,
                ..Default::default()
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            rt.block_on(mex_service::serve(cfg))
                .map_err(|e| CliError::Io(format!("serve: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mex: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
