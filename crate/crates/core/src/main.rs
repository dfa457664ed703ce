fn main() {
    std::process::exit(gstrand_core::cli::run_cli(std::env::args_os()));
}
