//! Command-line driver: batch runs, type-only checks and the REPL.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::Parser;

use crate::runtime::{PriceTable, RuntimeError};
use crate::session::{ItemResult, Session, SessionError, SessionOptions};
use crate::stdlib::prelude_source;
use crate::syntax::{line_col, pretty_type};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// I/O, usage or syntax errors.
    pub const INPUT: i32 = 1;
    pub const STATIC: i32 = 2;
    pub const RUNTIME_TYPE: i32 = 3;
    /// Any other runtime failure, such as division by zero.
    pub const RUNTIME: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "gradual", about = "Gradually typed contract language")]
pub struct CliConfig {
    /// Source file to run. Without one, starts the REPL.
    pub file: Option<PathBuf>,
    /// Source text to run instead of a file.
    #[arg(short = 'e', long = "eval", conflicts_with = "file")]
    pub eval: Option<String>,
    /// Type check only and print each item's type.
    #[arg(long)]
    pub type_only: bool,
    /// Give every unannotated parameter and binding the type `?`.
    #[arg(long)]
    pub dynamic_by_default: bool,
    /// Print the type of every subterm.
    #[arg(long)]
    pub dump_types: bool,
    /// Print each constraint and the unification steps taken, to stderr.
    #[arg(long)]
    pub trace_unify: bool,
    /// Price table with `date, company, price` lines.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// Print the prelude source and exit.
    #[arg(long)]
    pub dump_prelude: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    TypeOnly,
    Repl,
    DumpPrelude,
}

impl CliConfig {
    pub fn mode(&self) -> Mode {
        if self.dump_prelude {
            Mode::DumpPrelude
        } else if self.file.is_none() && self.eval.is_none() {
            Mode::Repl
        } else if self.type_only {
            Mode::TypeOnly
        } else {
            Mode::Run
        }
    }
}

pub fn exit_code(e: &SessionError) -> i32 {
    match e {
        SessionError::Syntax { .. } => exit::INPUT,
        SessionError::Type { .. } | SessionError::Prelude { .. } => exit::STATIC,
        SessionError::Runtime(RuntimeError::Type(_)) => exit::RUNTIME_TYPE,
        SessionError::Runtime(_) => exit::RUNTIME,
    }
}

/// Parses `args` (including the program name) and runs.
pub fn main_with(args: &[String], stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return exit::INPUT;
            }
            let _ = write!(out, "{e}");
            return exit::OK;
        }
    };
    run(&config, stdin, out, err)
}

pub fn run(config: &CliConfig, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if config.mode() == Mode::DumpPrelude {
        let _ = write!(out, "{}", prelude_source());
        return exit::OK;
    }
    let prices = match &config.prices {
        Some(path) => match PriceTable::load(path) {
            Ok(p) => p,
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", path.display());
                return exit::INPUT;
            }
        },
        None => PriceTable::embedded(),
    };
    let options = SessionOptions {
        dynamic_by_default: config.dynamic_by_default,
        trace: config.trace_unify,
    };
    let mut session = match Session::new(prices, options) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let (unit, src) = match (&config.file, &config.eval) {
        (Some(path), _) => match std::fs::read_to_string(path) {
            Ok(src) => (path.display().to_string(), src),
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", path.display());
                return exit::INPUT;
            }
        },
        (None, Some(src)) => ("<eval>".to_string(), src.clone()),
        (None, None) => return repl(&mut session, config, stdin, out, err),
    };
    let mut report = |item: &ItemResult| {
        report_item(item, config, &src, config.mode() == Mode::TypeOnly, out, err);
    };
    let result = if config.mode() == Mode::TypeOnly {
        session.check(&unit, &src).map(|items| items.iter().for_each(&mut report))
    } else {
        session.run_with(&unit, &src, &mut report).map(drop)
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn report_item(item: &ItemResult, config: &CliConfig, src: &str, show_decls: bool, out: &mut dyn Write, err: &mut dyn Write) {
    if config.trace_unify {
        for line in &item.trace {
            let _ = writeln!(err, "{line}");
        }
    }
    if item.name.is_none() || show_decls {
        let _ = writeln!(out, "{item}");
    }
    if config.dump_types {
        let mut types = item.types.clone();
        types.sort_by_key(|(span, _)| (span.start, std::cmp::Reverse(span.end)));
        types.dedup_by_key(|(span, _)| *span);
        for (span, ty) in types {
            let (l1, c1) = line_col(src, span.start);
            let (l2, c2) = line_col(src, span.end);
            let text = src.get(span.start..span.end).unwrap_or("");
            let text: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
            let text = if text.chars().count() > 40 {
                format!("{}...", text.chars().take(37).collect::<String>())
            } else {
                text
            };
            let _ = writeln!(out, "  {l1}:{c1}-{l2}:{c2}  {text}  : {}", pretty_type(&ty));
        }
    }
}

fn repl(session: &mut Session, config: &CliConfig, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    use std::io::IsTerminal;
    let interactive = std::io::stdin().is_terminal();
    let mut line = String::new();
    let mut n = 0;
    loop {
        if interactive {
            let _ = write!(out, "> ");
            let _ = out.flush();
        }
        line.clear();
        match stdin.read_line(&mut line) {
            Ok(0) => return exit::OK,
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return exit::INPUT;
            }
        }
        let input = line.trim();
        if input.is_empty() {
            continue;
        }
        if input == ":quit" || input == ":q" {
            return exit::OK;
        }
        if let Some(expr) = input.strip_prefix(":type") {
            match session.type_of(expr) {
                Ok(ty) => {
                    let _ = writeln!(out, "{}", pretty_type(&ty));
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                }
            }
            continue;
        }
        if input.starts_with(':') {
            let _ = writeln!(err, "unknown command {input}; try :type <expr> or :quit");
            continue;
        }
        n += 1;
        let unit = format!("<repl:{n}>");
        let src = input.to_string();
        let result = session.run_with(&unit, &src, &mut |item| report_item(item, config, &src, true, out, err));
        if let Err(e) = result {
            let _ = writeln!(err, "error: {e}");
        }
    }
}
