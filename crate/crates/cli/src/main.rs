fn main() {
    std::process::exit(levy_spde_cli::run_from_args(std::env::args_os()));
}
