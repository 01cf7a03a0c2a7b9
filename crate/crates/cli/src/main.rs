use std::io;

fn main() {
    let status = tailbound_cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(status);
}
