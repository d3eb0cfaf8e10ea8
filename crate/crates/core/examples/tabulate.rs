//! Tabulate F2 and a crossover law to CSV with a manifest, through the CLI
//! layer. Files land in the directory given as the first argument.

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "tables".into());
    for args in [
        vec!["tabulate", "--law", "f2", "--grid", "-6:4:0.25"],
        vec!["tabulate", "--law", "crossover", "--p", "0.3", "--m", "2", "--grid", "-4:4:0.5"],
    ] {
        let argv = std::iter::once("asep").chain(args).chain(["--out", &dir]);
        let code = asep::cli::main_with_args(argv);
        if code != 0 {
            std::process::exit(code);
        }
    }
}
