fn main() {
    std::process::exit(teneig::cli::main_with_args(std::env::args_os()));
}
