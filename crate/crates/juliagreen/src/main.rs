fn main() {
    std::process::exit(juliagreen::cli::run_from(std::env::args_os()));
}
