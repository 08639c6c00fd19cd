fn main() {
    std::process::exit(srgg::cli::main_with_args(std::env::args_os()));
}
