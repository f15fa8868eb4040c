fn main() {
    std::process::exit(thermal_gbs::cli::main_with_args(std::env::args_os()));
}
