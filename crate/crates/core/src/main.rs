fn main() {
    std::process::exit(darkgas::cli::run_cli(std::env::args_os()));
}
