use std::process::ExitCode;

use sheargeo::par::init_threads_from_env;
use sheargeo::suite::{parse_config, run_suite};

const USAGE: &str = "usage: sheargeo <command> [--config FILE] [--key value]...

commands: verify-base, verify-sasaki, einstein, taubnut, wave, cr-roundtrip, all
keys:     base n lambda lambda0 B C grid seed format output tol.<check-prefix>

Exit status: 0 when every check passes, 1 when any fails, 2 on a bad
configuration or an I/O error.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    init_threads_from_env();
    let cfg = match parse_config(&args, None) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sheargeo: {e}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };
    let report = run_suite(&cfg);
    let text = report.emit(cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("sheargeo: cannot write `{}`: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
