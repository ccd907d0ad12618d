fn main() {
    std::process::exit(crfner_cli::main_with_args(std::env::args_os()));
}
