use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bireflect::cli::{self, CorpusDocument, ElementDocument, Options, ReportDocument, EXIT_INTERNAL};
use bireflect::oracle::CorpusConfig;
use bireflect::transform::GroupTag;
use bireflect::Error;

#[derive(Parser)]
#[command(name = "bireflect", version, about = "Reversibility and bireflectionality in O(p,q), SO(p,q), Omega(p,q)")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Group to decide in: O, SO or Omega.
    #[arg(long, global = true, default_value = "Omega")]
    group: GroupTag,
    /// Seed for the randomized steps; runs are reproducible per seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial budget for randomized searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an element document (file path, or stdin when omitted).
    Classify { input: Option<String> },
    /// Construct and verify a pair of involutions in the requested group.
    Witness { input: Option<String> },
    /// Run the randomized corpus over all small signatures.
    Corpus {
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
        #[arg(long, default_value_t = 100)]
        per_signature: usize,
    },
}

fn read_input(path: &Option<String>) -> Result<ElementDocument, Error> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("cannot read {p}: {e}")))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    ElementDocument::parse(&text)
}

fn emit_report(r: &ReportDocument, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(r).expect("reports serialize")),
        Format::Text => print!("{}", r.to_text()),
    }
}

fn emit_corpus(c: &CorpusDocument, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(c).expect("reports serialize")),
        Format::Text => print!("{}", c.to_text()),
    }
}

fn run(args: &Args) -> Result<i32, Error> {
    let mut opts = Options { group: args.group, ..Options::default() };
    if let Some(s) = args.seed {
        opts.seed = s;
    }
    if let Some(b) = args.budget {
        opts.budget = b;
    }
    match &args.command {
        Command::Classify { input } => {
            let doc = read_input(input)?;
            let r = cli::classify(&doc.load()?, doc.label.clone(), opts)?;
            emit_report(&r, args.format);
            Ok(cli::exit_code(&r, false))
        }
        Command::Witness { input } => {
            let doc = read_input(input)?;
            let r = cli::witness(&doc.load()?, doc.label.clone(), opts)?;
            emit_report(&r, args.format);
            if let Some(m) = &r.message {
                eprintln!("{m}");
            }
            Ok(cli::exit_code(&r, true))
        }
        Command::Corpus { max_dim, per_signature } => {
            let mut cfg = CorpusConfig { max_dim: *max_dim, per_signature: *per_signature, ..CorpusConfig::default() };
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(b) = args.budget {
                cfg.budget = b;
            }
            let c = cli::corpus(&cfg);
            emit_corpus(&c, args.format);
            let errors: usize = c.rows.iter().map(|r| r.errors).sum();
            Ok(if c.conflicts > 0 || errors > 0 { EXIT_INTERNAL } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
