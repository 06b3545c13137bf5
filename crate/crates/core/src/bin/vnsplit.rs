use std::io;

fn main() {
    let code = vnsplit::cli::run_command(std::env::args_os(), &mut io::stdin(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
