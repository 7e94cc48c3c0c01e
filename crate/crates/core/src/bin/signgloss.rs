use std::io::{self, BufReader};

fn main() {
    let stdin = io::stdin();
    let mut stdin = BufReader::new(stdin.lock());
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let mut cli_io = signgloss::cli::Io {
        stdin: &mut stdin,
        stdout: &mut stdout,
        stderr: &mut stderr,
    };
    let code = signgloss::cli::run(std::env::args_os(), &mut cli_io);
    std::process::exit(code);
}
