use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = mhfa_cli::run_command(std::env::args_os().skip(1));
    if code == 0 {
        print!("{out}");
    } else {
        eprint!("{out}");
    }
    ExitCode::from(code as u8)
}
