use std::io::Write;

fn main() {
    let result = ctis_cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(result.render().as_bytes());
    if !result.json {
        for d in &result.diagnostics {
            eprintln!("ctis: {d}");
        }
    }
    std::process::exit(result.exit_code());
}
