fn main() {
    std::process::exit(kmot::cli::main_with_args(std::env::args_os()));
}
