fn main() {
    std::process::exit(mlmkit::cli::run_from(std::env::args_os()));
}
