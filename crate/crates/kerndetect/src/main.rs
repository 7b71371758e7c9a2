use clap::Parser;
use kerndetect::cli;

fn main() {
    let parsed = match cli::Cli::try_parse() {
        Ok(parsed) => parsed,
        Err(e) => {
            // --help/--version land here too and should exit 0; real usage
            // errors use the operational-error code
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(cli::run(parsed));
}
