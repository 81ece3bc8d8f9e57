fn main() {
    std::process::exit(rdm_core::cli::run_cli(std::env::args_os()));
}
