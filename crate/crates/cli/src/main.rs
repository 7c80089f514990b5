//! spinnet: exact spin network evaluation and 6j asymptotics.
//!
//! Exit codes: 0 ok (1: selftest found failures), 2 parse, 3 capacity,
//! 4 degenerate input, 5 not found.

mod cmds;
mod inputs;
mod render;

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spinnet::Error;

use render::Format;

#[derive(Parser)]
#[command(
    name = "spinnet",
    version,
    about = "Exact spin network evaluation and 6j asymptotics"
)]
struct Cli {
    /// Decimal digits of printed numerics.
    #[arg(long, global = true, default_value_t = 64)]
    precision: usize,
    /// Correction depth of asymptotic series (terms mu_1..mu_depth).
    #[arg(long, global = true, default_value_t = 6)]
    depth: usize,
    /// Largest sequence index, where a command generates one.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for commands that support them (selftest).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphArgs {
    /// Builtin graph: theta, tet, k33, circle, drum<s>.
    #[arg(long, conflicts_with = "graph")]
    builtin: Option<String>,
    /// Graph description file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Inline coloring, comma separated, one entry per color slot.
    #[arg(long, value_delimiter = ',', conflicts_with = "coloring")]
    colors: Option<Vec<u32>>,
    /// Coloring file with `<edge> <color>` lines.
    #[arg(long)]
    coloring: Option<PathBuf>,
}

#[derive(Args)]
struct TetArgs {
    /// Tetrahedron colors a,b,c,d,e,f (opposite pairs (a,d), (b,e), (c,f)).
    #[arg(long, value_delimiter = ',', required = true)]
    colors: Vec<u32>,
}

#[derive(Args)]
struct SeqArgs {
    /// Tetrahedron colors; the sequence is the unitary evaluation at n
    /// times these.
    #[arg(long, value_delimiter = ',', conflicts_with = "sequence")]
    colors: Option<Vec<u32>>,
    /// File with one exact term per line (`num` or `num/den`).
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Largest recurrence order tried.
    #[arg(long, default_value_t = 2)]
    max_order: usize,
    /// Largest polynomial degree tried (default: what the data supports).
    #[arg(long)]
    max_degree: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a colored network in all four normalizations.
    Eval(GraphArgs),
    /// Exact 6j sequence at colors scaled by n.
    Sequence {
        #[command(flatten)]
        tet: TetArgs,
        /// Normalization of the sequence (std or unitary).
        #[arg(long, default_value = "unitary")]
        norm: String,
    },
    /// Curve set, Fourier spectrum and diagonal of the generating function.
    Genfun(GraphArgs),
    /// Geometric classification of a tetrahedron.
    Classify(TetArgs),
    /// Growth rates, exponents and Stokes constants of the 6j expansion.
    Asympt(TetArgs),
    /// Plot-ready table comparing a sequence with its asymptotic expansion.
    Predict(TetArgs),
    /// Guess a polynomial-coefficient recurrence from exact terms.
    GuessRec(SeqArgs),
    /// Formal power-like solutions of the guessed recurrence.
    FormalSeries(SeqArgs),
    /// Spectral radius estimate of a diagonal evaluation sequence.
    Radius(GraphArgs),
    /// Run the end-to-end check suite.
    Selftest,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::Capacity(_) => 3,
        Error::Degenerate(_) => 4,
        Error::NotFound(_) => 5,
    }
}

fn run(cli: &Cli) -> spinnet::Result<(String, i32)> {
    let out = match &cli.cmd {
        Cmd::Eval(args) => cmds::cmd_eval(args, cli.precision, cli.format)?,
        Cmd::Sequence { tet, norm } => cmds::cmd_sequence(tet, norm, cli.nmax, cli.format)?,
        Cmd::Genfun(args) => cmds::cmd_genfun(args, cli.nmax, cli.format)?,
        Cmd::Classify(args) => cmds::cmd_classify(args, cli.precision, cli.format)?,
        Cmd::Asympt(args) => cmds::cmd_asympt(args, cli.precision, cli.format)?,
        Cmd::Predict(args) => {
            cmds::cmd_predict(args, cli.precision, cli.depth, cli.nmax, cli.format)?
        }
        Cmd::GuessRec(args) => cmds::cmd_guess_rec(args, cli.nmax, cli.format)?,
        Cmd::FormalSeries(args) => cmds::cmd_formal_series(args, cli.depth, cli.nmax, cli.format)?,
        Cmd::Radius(args) => cmds::cmd_radius(args, cli.nmax, cli.format)?,
        Cmd::Selftest => return cmds::cmd_selftest(cli.jobs, cli.format),
    };
    Ok((out, 0))
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, code)) => {
            // A reader that stops early (e.g. piping into `head`) closes
            // the pipe; treat that as a normal end of output.
            let mut stdout = io::stdout();
            let r = stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush());
            if let Err(e) = r {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    std::process::exit(1);
                }
            }
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
