use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, report) = extprob_cli::run(std::env::args_os());
    if code == extprob_cli::EXIT_USAGE || code == extprob_cli::EXIT_INPUT {
        eprint!("{report}");
    } else {
        print!("{report}");
    }
    ExitCode::from(code as u8)
}
