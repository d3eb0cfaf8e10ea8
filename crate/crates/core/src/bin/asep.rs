fn main() {
    std::process::exit(asep::cli::main_with_args(std::env::args_os()));
}
