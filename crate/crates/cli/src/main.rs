use std::io::IsTerminal;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal();
    let code = esdp_cli::run(std::env::args_os(), &mut std::io::stdout().lock(), &mut stdin.lock(), interactive);
    ExitCode::from(code as u8)
}
