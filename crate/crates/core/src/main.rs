use std::io::{self, Write};

/// Deeply nested programs recurse deeply in the checker and evaluator.
const STACK_SIZE: usize = 512 * 1024 * 1024;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || {
            let stdin = io::stdin();
            let mut out = io::stdout().lock();
            let mut err = io::stderr().lock();
            let code = gradual::cli::main_with(&args, &mut stdin.lock(), &mut out, &mut err);
            let _ = out.flush();
            code
        })
        .expect("spawn interpreter thread")
        .join()
        .unwrap_or(101);
    std::process::exit(code);
}
