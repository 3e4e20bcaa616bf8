fn main() {
    std::process::exit(opjensen::cli::main_with_args(std::env::args_os()));
}
