fn main() {
    std::process::exit(spinboson::cli::main_with_args(std::env::args_os()));
}
