fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(cqfi_cli::run(&argv));
}
