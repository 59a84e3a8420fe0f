fn main() {
    std::process::exit(mqcb::cli::run_cli(std::env::args_os()));
}
