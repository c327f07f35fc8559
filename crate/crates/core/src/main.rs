fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out = geologic::cli::run(&args);
    print!("{}", out.stdout);
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
    }
    std::process::exit(out.code);
}
