use iet_words::cli::{run, Registry};

fn main() {
    let registry = Registry::builtin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(&registry, std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
