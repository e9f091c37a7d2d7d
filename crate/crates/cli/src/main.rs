fn main() {
    std::process::exit(bratu_cli::run(std::env::args_os()));
}
