use std::process::ExitCode;

fn main() -> ExitCode {
    dmst_cli::execute(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
