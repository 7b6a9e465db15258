use std::io::Write;

fn main() {
    gfdiv_cli::init_threads();
    let out = gfdiv_cli::run(std::env::args().collect());
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}
