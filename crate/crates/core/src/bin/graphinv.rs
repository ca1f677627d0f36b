fn main() {
    std::process::exit(graphinv::cli::main_with_args(std::env::args_os()));
}
