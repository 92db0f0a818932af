fn main() {
    std::process::exit(mediaboard::cli::main_with_args(std::env::args_os()));
}
