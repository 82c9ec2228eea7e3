use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    let code = symext_cli::run(std::env::args_os(), &mut out, &mut err);
    if out.flush().is_err() {
        std::process::exit(symext_cli::EXIT_FAILURE);
    }
    std::process::exit(code);
}
