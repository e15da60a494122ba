use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use closefield::scenario::{self, compare_reports, RunOptions};

#[derive(Parser, Debug)]
#[command(name = "closefield", version, about = "Transfer of torus data between close local fields")]
struct Cli {
    /// Compare two reports, ignoring the timing footer
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    compare: Option<Vec<PathBuf>>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file
    Run {
        file: PathBuf,
        /// Also write the report to this path
        #[arg(long)]
        report: Option<PathBuf>,
        /// Degree of the unramified stage used for congruent isomorphisms
        #[arg(long)]
        stage_degree: Option<usize>,
        /// Largest group enumerated element by element
        #[arg(long, default_value_t = 10_000)]
        max_enumeration: usize,
    },
    /// Describe a construction
    Explain { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(paths) = cli.compare {
        return compare(&paths[0], &paths[1]);
    }
    match cli.command {
        Some(Command::Run { file, report, stage_degree, max_enumeration }) => run(&file, report.as_deref(), RunOptions { stage_degree, max_enumeration }),
        Some(Command::Explain { name }) => match scenario::explain(&name) {
            Ok(text) => {
                println!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        None => {
            eprintln!("error: nothing to do; use `run <file>`, `explain <name>` or `--compare <a> <b>`");
            ExitCode::from(2)
        }
    }
}

fn run(file: &std::path::Path, report: Option<&std::path::Path>, opts: RunOptions) -> ExitCode {
    let out = scenario::load(file).and_then(|sc| scenario::run_scenario(&sc, &opts));
    let out = match out {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = out.render();
    print!("{text}");
    if let Some(path) = report {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn compare(a: &std::path::Path, b: &std::path::Path) -> ExitCode {
    let read = |p: &std::path::Path| std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()));
    match (read(a), read(b)) {
        (Ok(x), Ok(y)) => match compare_reports(&x, &y) {
            None => {
                println!("reports match");
                ExitCode::SUCCESS
            }
            Some((line, l, r)) => {
                println!("reports differ at line {line}:\n< {l}\n> {r}");
                ExitCode::from(1)
            }
        },
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
