fn main() {
    std::process::exit(fracmax::cli::main_with_args(std::env::args_os()));
}
