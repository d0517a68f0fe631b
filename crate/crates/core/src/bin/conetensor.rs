fn main() {
    std::process::exit(conetensor::cli::main_with_args(std::env::args_os()));
}
