use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dicke_fringe::cli::run() as u8)
}
