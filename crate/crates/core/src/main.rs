use std::io::Write;

fn main() {
    let (code, out, err) = weldkit::cli::main_with_args(std::env::args_os(), &mut std::io::stdin().lock());
    std::io::stdout().write_all(out.as_bytes()).ok();
    std::io::stderr().write_all(err.as_bytes()).ok();
    std::process::exit(code);
}
