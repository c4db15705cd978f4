fn main() {
    std::process::exit(gcr_cli::run(std::env::args_os()));
}
