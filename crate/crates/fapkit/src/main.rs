fn main() {
    std::process::exit(fapkit::cli::main_with_args(std::env::args_os()));
}
